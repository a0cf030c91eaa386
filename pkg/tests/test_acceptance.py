"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v`` for one pass/fail line per
criterion. Criteria 7/8 share a full ~1M-token benchmark run (the slow part).
"""

import filecmp
import json
import random
import time
from collections import Counter
from fractions import Fraction

import pytest

from cxgminer import bench, mdl
from cxgminer.association import (
    build_table, count_pairs, delta_p_cells, token_reps,
)
from cxgminer.candidates import (
    FREQUENCY, MAX_LEN, MIN_LEN, association_search, harvest_ngrams,
)
from cxgminer.cli import benchmark_config, main
from cxgminer.config import load_config, save_config
from cxgminer.corpus import Line, TaggedToken
from cxgminer.grammar import (
    Construction, ConstraintKind, Grammar, Inventories, SlotConstraint,
    load_grammar,
)
from cxgminer.lexsem import xmeans_cluster
from cxgminer.matcher import Match, match_line, satisfies
from cxgminer.pipeline import Pipeline
from cxgminer.search import MembershipScorer, TabuConfig, tabu_search


def test_criterion_01_encoding_worked_values():
    start = time.perf_counter()
    assert mdl.bits(1 / 14) == pytest.approx(3.81, abs=0.01)
    assert mdl.bits(1 / 50_000) == pytest.approx(15.61, abs=0.01)
    assert mdl.pointer_cost(100, 500_000) == pytest.approx(12.29, abs=0.01)
    assert mdl.pointer_cost(1_000, 500_000) == pytest.approx(8.97, abs=0.01)
    assert time.perf_counter() - start < 1.0


def test_criterion_02_delta_p_oracle():
    start = time.perf_counter()
    rng = random.Random(42)

    def oracle(a, b, c, d):
        def cond(num, den):
            return Fraction(num, den) if den else Fraction(0)
        lr = cond(a, a + c) - cond(b, b + d)
        rl = cond(a, a + b) - cond(c, c + d)
        return float(lr), float(rl)

    n = 0
    while n < 1000:
        a, b, c, d = (rng.randrange(0, 500) for _ in range(4))
        if a + c == 0 or b + d == 0 or a + b == 0 or c + d == 0:
            continue  # degenerate: a zero margin
        n += 1
        lr, rl, mx = delta_p_cells(a, b, c, d)
        olr, orl = oracle(a, b, c, d)
        assert lr == pytest.approx(olr, abs=1e-12)
        assert rl == pytest.approx(orl, abs=1e-12)
        assert mx == max(lr, rl)
        assert -1.0 <= lr <= 1.0 and -1.0 <= rl <= 1.0

    # independent rows: identical columns, and power-of-two column scalings
    for _ in range(100):
        a, c = rng.randrange(1, 200), rng.randrange(1, 200)
        scale = 2 ** rng.randrange(0, 5)
        assert delta_p_cells(a, a * scale, c, c * scale) == (0.0, 0.0, 0.0)
    assert time.perf_counter() - start < 1.0


def test_criterion_03_matcher_oracle():
    start = time.perf_counter()
    rng = random.Random(7)
    inv = Inventories(tuple(f"t{i}" for i in range(40)),
                      tuple(f"P{i}" for i in range(14)), 20)

    cons = set()
    while len(cons) < 50:
        m = rng.randint(3, 6)
        cons.add(Construction(tuple(
            SlotConstraint(ConstraintKind(rng.randrange(3)), rng.randrange(6))
            for _ in range(m)
        )))
    grammar = Grammar(sorted(cons, key=Construction.sort_key), inv)

    def brute_force(line, li):
        out = []
        for ci, c in enumerate(grammar.constructions):
            for s in range(len(line) - len(c) + 1):
                window = line.tokens[s:s + len(c)]
                if all(satisfies(sl, t) for sl, t in zip(c.slots, window)):
                    out.append(Match(ci, s, s + len(c), li))
        return out

    for li in range(500):
        line = Line([
            TaggedToken(
                f"t{rng.randrange(40)}", pos=rng.randrange(4),
                lex=rng.randrange(6) if rng.random() < 0.8 else None,
                cluster=rng.randrange(4) if rng.random() < 0.6 else None,
            )
            for _ in range(rng.randint(1, 100))
        ])
        key = lambda m: (m.construction, m.start, m.end, m.line)
        got = match_line(grammar, line, li)
        assert sorted(got, key=key) == sorted(brute_force(line, li), key=key)
    assert time.perf_counter() - start < 30.0


def test_criterion_04_association_search_oracle():
    start = time.perf_counter()
    rng = random.Random(11)

    def oracle(line, table, thr):
        toks = line.tokens
        n = len(toks)
        reps = [token_reps(t) for t in toks]
        out = Counter()

        def emit(path):
            if len(path) >= MIN_LEN:
                c = Construction(tuple(
                    SlotConstraint(ConstraintKind(k), f) for k, f in path
                ))
                out[c] += 1

        for s in range(n):
            frontier = [[r] for r in reps[s]]
            while frontier:
                path = frontier.pop()
                pos = s + len(path) - 1
                if len(path) == MAX_LEN or pos == n - 1:
                    emit(path)
                    continue
                succ = [r for r in reps[pos + 1]
                        if table.dp_max(path[-1], r) > thr]
                if len(succ) < len(reps[pos + 1]):
                    emit(path)
                for r in succ:
                    frontier.append(path + [r])
        return out

    for _ in range(200):
        lines = []
        for _ in range(5):
            toks = [
                TaggedToken(
                    f"w{rng.randrange(8)}", pos=rng.randrange(3),
                    lex=rng.randrange(8) if rng.random() < 0.7 else None,
                    cluster=rng.randrange(4) if rng.random() < 0.5 else None,
                )
                for _ in range(rng.randint(1, 12))
            ]
            lines.append(Line(toks))
        table = build_table(count_pairs(lines), 1)
        thr = rng.choice([0.0, 0.05, 0.1, 0.2])
        line = lines[0]
        assert association_search(line, table, thr) == oracle(line, table, thr)
    assert time.perf_counter() - start < 30.0


def test_criterion_05_harvest_combinatorics():
    start = time.perf_counter()
    rng = random.Random(3)
    for _ in range(100):
        m = rng.randint(0, 40)
        rs = tuple(SlotConstraint(ConstraintKind.SYN, i % 5) for i in range(m))
        expected = sum(max(0, m - n + 1) for n in range(MIN_LEN, MAX_LEN + 1))
        assert len(harvest_ngrams(list(rs))) == expected
    assert time.perf_counter() - start < 1.0


def test_criterion_06_tabu_properties(tmp_path):
    start = time.perf_counter()
    spec = bench.default_benchmark_spec(n_tokens=100_000, seed=1)
    gen = bench.gen_benchmark(spec)
    bench.write_benchmark(gen, spec, str(tmp_path))
    p = Pipeline(benchmark_config(str(tmp_path), 1, tokens=100_000))
    p.prepare()

    cand = p.fold_candidates(FREQUENCY)[0]
    opt_lines = p.lines_for(p.divisions.optimizing)

    # plant a candidate verified to never match the optimizing division
    never = None
    for w in range(p.inventories.t_lex):
        c = Construction(tuple(SlotConstraint(ConstraintKind.LEX, w)
                               for _ in range(3)))
        if all(not match_line(Grammar([c], p.inventories), line)
               for line in opt_lines):
            never = c
            break
    assert never is not None and never not in cand.items
    cand.items[never] = next(iter(cand.items.values()))

    trace = tmp_path / "trace.tsv"
    g = tabu_search(cand, opt_lines, p.inventories,
                    TabuConfig(patience=25, seed=1), trace)

    rows = [r.split("\t") for r in trace.read_text().splitlines()]
    bests = [float(r[2]) for r in rows]
    assert bests == sorted(bests, reverse=True)  # best-so-far non-increasing

    cand_list = sorted(cand.items, key=Construction.sort_key)
    full = mdl.score(Grammar(cand_list, p.inventories), opt_lines)
    final = mdl.score(Grammar(list(g.constructions), p.inventories), opt_lines)
    assert final.total <= full.total + 1e-9

    assert never not in g.constructions
    assert time.perf_counter() - start < 120.0


@pytest.fixture(scope="module")
def benchmark_run(tmp_path_factory):
    """The full ~1M-token planted-pattern benchmark, run end to end once."""
    root = tmp_path_factory.mktemp("bench1m")
    start = time.perf_counter()
    spec = bench.default_benchmark_spec(seed=0)
    gen = bench.gen_benchmark(spec)
    bench.write_benchmark(gen, spec, str(root))
    p = Pipeline(benchmark_config(str(root), 0))
    p.prepare()
    result = p.compare()
    elapsed = time.perf_counter() - start
    gt = json.loads((root / "ground_truth.json").read_text())
    return p, result, gt, elapsed


def test_criterion_07_headline_direction(benchmark_run):
    p, result, gt, elapsed = benchmark_run
    assert result["association"]["mean_compression"] < \
        result["frequency"]["mean_compression"]

    rare = {}
    for mode in ("frequency", "association"):
        g = load_grammar(p.out_path(f"grammar_{mode}.tsv"), p.inventories)
        rare[mode] = bench.count_recovered(
            g, gt, p.lexicon, p.inventory, p.tagset, rare_only=True)
    assert rare["association"] > rare["frequency"]
    assert elapsed < 900.0


def test_criterion_08_compression_sanity(benchmark_run):
    p, result, _, _ = benchmark_run
    eval_lines = p.lines_for(p.divisions.evaluation[0])
    empty = mdl.score(Grammar([], p.inventories), eval_lines)
    assert empty.compression == 1.0

    for mode in ("frequency", "association"):
        for comp in result[mode]["per_set_compression"]:
            assert comp < 1.0


def test_criterion_09_xmeans_recovery():
    start = time.perf_counter()
    adjusted_rand_score = pytest.importorskip(
        "sklearn.metrics").adjusted_rand_score
    for seed in range(10):
        rng = random.Random(seed)
        points, labels = [], []
        centers = [[8.0 * j] * 10 for j in range(3)]
        for j, center in enumerate(centers):
            for _ in range(100):
                points.append([c + rng.gauss(0.0, 1.0) for c in center])
                labels.append(j)
        got = xmeans_cluster(points, k_min=2, k_max=10, seed=seed)
        assert len(set(got.tolist())) == 3
        assert adjusted_rand_score(labels, got) >= 0.9
    assert time.perf_counter() - start < 10.0


def test_criterion_10_compare_determinism(tmp_path):
    root = tmp_path / "bench"
    cfg_path = tmp_path / "run.cfg"
    assert main(["genbench", "--out", str(root), "--seed", "0",
                 "--tokens", "120000", "--config-out", str(cfg_path)]) == 0
    cfg = load_config(cfg_path)
    cfg.tabu_patience = 3
    cfg.tabu_proposals = 5
    cfg.top_n = 400
    save_config(cfg, cfg_path)

    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main(["compare", "--config", str(cfg_path),
                     "--out", str(out)]) == 0
        outs.append(out)

    names = ["grammar_frequency.tsv", "grammar_association.tsv",
             "comparison.json", "comparison.txt"]
    names += [f"report_{m}_eval{i}.json"
              for m in ("frequency", "association") for i in range(5)]
    for name in names:
        assert filecmp.cmp(outs[0] / name, outs[1] / name,
                           shallow=False), name
