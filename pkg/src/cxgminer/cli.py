"""Command-line interface for the induction pipeline."""

from __future__ import annotations

import argparse
import json
import sys

from . import bench, lexsem
from .candidates import ASSOCIATION, FREQUENCY
from .config import PipelineConfig, load_config, save_config
from .corpus import write_tagged
from .pipeline import Pipeline, StageError

_MODES = {"freq": FREQUENCY, "assoc": ASSOCIATION}


def _add_common(parser):
    parser.add_argument("--config", required=True, help="flat key = value config file")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="override the artifact directory")


def _pipeline(args) -> Pipeline:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    return Pipeline(cfg)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cxgminer",
                                     description="Construction grammar induction and comparison")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("ingest", "normalize the corpus and assign data divisions"),
        ("lexicon", "build and save the word-form lexicon"),
        ("cluster", "cluster embeddings into the semantic inventory"),
        ("stats", "count background pairs and save the association table"),
        ("gridsearch", "pick the association threshold on dev data"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)

    p = sub.add_parser("candidates", help="generate per-fold candidate sets")
    _add_common(p)
    p.add_argument("--mode", choices=sorted(_MODES), required=True)

    for name, help_text in [
        ("learn", "run per-fold tabu search and save fold grammars"),
        ("merge", "merge fold grammars with horizontal pruning"),
        ("score", "score the merged grammar on the evaluation sets"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        p.add_argument("--mode", choices=sorted(_MODES), required=True)

    p = sub.add_parser("compare", help="run both modes and the paired significance test")
    _add_common(p)

    p = sub.add_parser("genbench", help="generate the synthetic planted-pattern benchmark")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tokens", type=int, default=1_000_000)
    p.add_argument("--config-out", default=None,
                   help="also write a ready-to-run config pointing at the benchmark")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args):
    if args.command == "genbench":
        spec = bench.default_benchmark_spec(n_tokens=args.tokens, seed=args.seed)
        gen = bench.gen_benchmark(spec)
        bench.write_benchmark(gen, spec, args.out)
        print(f"wrote {args.tokens}-token benchmark with {len(spec.patterns)} planted "
              f"patterns to {args.out}")
        if args.config_out:
            cfg = benchmark_config(args.out, args.seed, args.tokens)
            save_config(cfg, args.config_out)
            print(f"wrote config to {args.config_out}")
        return 0

    pipe = _pipeline(args)

    if args.command == "ingest":
        pipe.prepare()
        write_tagged(pipe.lines, pipe.tagset, pipe.out_path("corpus_normalized.tsv"))
        print(f"{pipe.n_tokens} tokens in {len(pipe.lines)} lines, "
              f"{len(pipe.chunks)} chunks; divisions written")
    elif args.command == "lexicon":
        pipe.prepare()
        print(f"lexicon of {pipe.lexicon.size} word-forms "
              f"(threshold {pipe.lexicon.threshold})")
    elif args.command == "cluster":
        pipe.prepare()
        print(f"{pipe.inventory.n_clusters} POS-pure semantic clusters")
    elif args.command == "stats":
        table = pipe.background_table()
        print(f"association table with {len(table)} pairs "
              f"(bound {table.min_pair_count})")
    elif args.command == "gridsearch":
        best = pipe.pick_dp_threshold()
        print(f"best dp threshold: {best}")
    elif args.command == "candidates":
        mode = _MODES[args.mode]
        dp = pipe.pick_dp_threshold() if mode == ASSOCIATION else None
        sets = pipe.fold_candidates(mode, dp)
        for f, cand in enumerate(sets):
            print(f"fold {f}: {len(cand)} candidates")
    elif args.command in ("learn", "merge", "score"):
        result = pipe.run_mode(_MODES[args.mode])
        print(f"grammar of {len(result.grammar)} constructions; "
              f"mean compression {result.mean_compression:.4f}")
    elif args.command == "compare":
        result = pipe.compare()
        print(open(pipe.out_path("comparison.txt")).read(), end="")
    return 0


def benchmark_config(bench_dir: str, seed: int, tokens: int = 1_000_000) -> PipelineConfig:
    """Desk-scale config tuned for the bundled planted-pattern benchmark."""
    import os

    return PipelineConfig(
        corpus=os.path.join(bench_dir, "corpus.tsv"),
        embeddings=os.path.join(bench_dir, "embeddings.txt"),
        out=os.path.join(bench_dir, "out"),
        seed=seed,
        chunk_lines=max(1, -(-tokens // 3100)),  # 100-token lines over 31 division units
        min_count=5,
        k_min=2,
        k_max=64,
        min_pair_count=5,
        dp_threshold=0.0,
        freq_threshold=max(5, round(6e-5 * tokens)),
        top_n=2500,
        tabu_patience=25,
    )


if __name__ == "__main__":
    sys.exit(main())
