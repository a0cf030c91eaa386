"""Construction subset selection: tabu search, the four-fold protocol, and
grammar merging with horizontal pruning."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from . import association, candidates as cand_mod, mdl
from .candidates import ASSOCIATION, FREQUENCY, CandidateSet
from .grammar import Construction, Grammar, Inventories, contains, edge_overlap
from .matcher import GrammarIndex, select_cover


@dataclass
class TabuConfig:
    block: int = 10        # candidates toggled per move
    proposals: int = 20    # moves considered per turn
    tenure: int = 10       # turns a moved block stays tabu
    patience: int = 50     # stop after this many non-improving turns
    seed: int = 0


class MembershipScorer:
    """Scores candidate-subset grammars with matches precomputed once.

    Produces bit-identical results to a fresh ``mdl.score`` of the
    corresponding sub-grammar (same cover tie-breaking, same summation
    order).
    """

    def __init__(self, constructions: list[Construction], inventories: Inventories, lines):
        self.constructions = constructions
        self.inventories = inventories
        self.line_lengths = [len(line) for line in lines]
        self.corpus_tokens = sum(self.line_lengths)
        if self.corpus_tokens == 0:
            raise ValueError("cannot score on an empty corpus")
        self.model = mdl.EncodingModel(
            inventories.t_lex, inventories.t_syn, inventories.t_sem, self.corpus_tokens
        )
        index = GrammarIndex(Grammar(list(constructions), inventories))
        # Presorted by the cover tie-break key; pointer counts are empty
        # during search, so the key is static and the per-proposal sort in
        # select_cover can be skipped.
        self.line_matches = []
        for i, line in enumerate(lines):
            ms = index.match_line(line, i)
            ms.sort(key=lambda m: (m.start - m.end, m.start, m.construction))
            self.line_matches.append([(m.construction, m.start, m.end) for m in ms])
        self.l1_costs = [mdl.construction_cost(c, self.model) for c in constructions]
        # Regret indices are global and sequential, so the regret total only
        # depends on how many words stay uncovered. The prefix sums use the
        # same running float addition as a fresh scoring pass, keeping the
        # result bit-identical.
        self.regret_prefix = [0.0]
        acc = 0.0
        for i in range(1, self.corpus_tokens + 1):
            acc += mdl.regret_cost(i, self.model)
            self.regret_prefix.append(acc)
        self.baseline = self.regret_prefix[self.corpus_tokens]

    def score(self, mask) -> tuple[mdl.MdlReport, dict[int, int]]:
        pointer_counts: Counter = Counter()
        selected_seq: list[int] = []  # construction ids in cover order
        uncovered_total = 0
        for matches, length in zip(self.line_matches, self.line_lengths):
            occupied = bytearray(length)
            covered = 0
            for cid, start, end in matches:
                if not mask[cid]:
                    continue
                if any(occupied[start:end]):
                    continue
                for i in range(start, end):
                    occupied[i] = 1
                covered += end - start
                selected_seq.append(cid)
                pointer_counts[cid] += 1
            uncovered_total += length - covered

        l1 = 0.0
        for cid, included in enumerate(mask):
            if included:
                l1 += self.l1_costs[cid]
        cost_of = {
            cid: mdl.pointer_cost(count, self.corpus_tokens)
            for cid, count in pointer_counts.items()
        }
        l2c = 0.0
        for cid in selected_seq:
            l2c += cost_of[cid]
        l2r = self.regret_prefix[uncovered_total]

        return mdl.make_report(l1, l2c, l2r, self.baseline), dict(pointer_counts)


def tabu_search(candidate_set: CandidateSet, opt_lines, inventories: Inventories,
                config: TabuConfig = TabuConfig(), trace_path=None) -> Grammar:
    """Select the construction subset minimizing total description length.

    Starts from the full candidate set; each turn proposes random block
    toggles, skips tabu blocks unless they beat the best score (aspiration),
    accepts the best proposal even when worse, and stops after ``patience``
    turns without improvement.
    """
    cand_list = sorted(candidate_set.items, key=Construction.sort_key)
    if not cand_list:
        return Grammar([], inventories)

    rng = random.Random(config.seed)
    scorer = MembershipScorer(cand_list, inventories, opt_lines)
    n = len(cand_list)
    block_size = min(config.block, n)

    mask = [True] * n
    report, _ = scorer.score(mask)
    current = report.total
    best_mask = list(mask)
    best_total = current
    tabu: dict[int, int] = {}  # candidate index -> expiry turn

    trace = [(0, current, best_total, sum(mask))]
    turn = 0
    stall = 0
    while stall < config.patience:
        turn += 1
        chosen = None  # (total, block, new_mask)
        included = [i for i, m in enumerate(mask) if m]
        for _ in range(config.proposals):
            # Mix exploration blocks (drawn from all candidates) with pruning
            # blocks (drawn from the current grammar), so unproductive
            # candidates stay removable even when most are already out.
            if len(included) >= block_size and rng.random() < 0.5:
                block = rng.sample(included, block_size)
            else:
                block = rng.sample(range(n), block_size)
            new_mask = list(mask)
            for idx in block:
                new_mask[idx] = not new_mask[idx]
            proposal_report, _ = scorer.score(new_mask)
            total = proposal_report.total
            is_tabu = any(tabu.get(idx, 0) >= turn for idx in block)
            if is_tabu and total >= best_total:
                continue
            if chosen is None or total < chosen[0]:
                chosen = (total, block, new_mask)
        if chosen is not None:
            current, block, mask = chosen
            for idx in block:
                tabu[idx] = turn + config.tenure
        if current < best_total:
            best_total = current
            best_mask = list(mask)
            stall = 0
        else:
            stall += 1
        trace.append((turn, current, best_total, sum(mask)))

    if trace_path is not None:
        with open(trace_path, "w", encoding="utf-8") as fh:
            for row in trace:
                fh.write(f"{row[0]}\t{row[1]:.6f}\t{row[2]:.6f}\t{row[3]}\n")

    # Final polish: drop candidates that never enter the cover. They add L1
    # without touching L2 (an unselected match never claims a span), so this
    # strictly improves the objective.
    _, counts = scorer.score(best_mask)
    for cid in range(n):
        if best_mask[cid] and cid not in counts:
            best_mask[cid] = False

    final = [c for c, keep in zip(cand_list, best_mask) if keep]
    grammar = Grammar(final, inventories)
    # pointer counts on the optimizing division, re-keyed to the final grammar
    remap = {}
    new_id = 0
    for old_id, keep in enumerate(best_mask):
        if keep:
            remap[old_id] = new_id
            new_id += 1
    grammar.pointer_counts = {remap[k]: v for k, v in counts.items()}
    return grammar


def run_folds(fold_lines: list[list], opt_lines, mode: str, inventories: Inventories, *,
              min_pair_count: int | None = None, freq_threshold: int = 5,
              dp_threshold: float = 0.1, top_n: int = 25000,
              tabu_config: TabuConfig = TabuConfig(), trace_dir=None) -> list[Grammar]:
    """One grammar per fold: fold-local statistics, candidates, tabu search.

    The lexicon and cluster inventory are fixed upstream and shared; only the
    association statistics and candidates are fold-specific.
    """
    grammars = []
    for f, lines in enumerate(fold_lines):
        counts = association.count_pairs(lines)
        bound = min_pair_count if min_pair_count is not None else association.default_min_pair_count(counts.total)
        table = association.build_table(counts, bound)
        if mode == FREQUENCY:
            cand = cand_mod.frequency_pipeline(lines, table, freq_threshold)
        elif mode == ASSOCIATION:
            cand = cand_mod.association_pipeline(lines, table, dp_threshold, top_n)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        fold_config = TabuConfig(
            tabu_config.block, tabu_config.proposals, tabu_config.tenure,
            tabu_config.patience, tabu_config.seed + f,
        )
        trace_path = None if trace_dir is None else f"{trace_dir}/trace_{mode}_fold{f}.tsv"
        grammars.append(tabu_search(cand, opt_lines, inventories, fold_config, trace_path))
    return grammars


def merge_grammars(grammars: list[Grammar]) -> Grammar:
    """Concatenate fold grammars, collapse duplicates, and horizontally prune.

    A construction is pruned when a strictly longer survivor wholly contains
    it or overlaps all but one of its slots at an edge.
    """
    if not grammars:
        raise ValueError("nothing to merge")
    inventories = grammars[0].inventories
    for g in grammars[1:]:
        if g.inventories != inventories:
            raise ValueError("grammars built over different inventories cannot be merged")

    pool = sorted({c for g in grammars for c in g.constructions},
                  key=lambda c: (-len(c), c.sort_key()))
    kept: list[Construction] = []
    for c in pool:
        swallowed = any(
            len(y) > len(c) and (contains(y, c) or edge_overlap(c, y) >= len(c) - 1)
            for y in kept
        )
        if not swallowed:
            kept.append(c)
    return Grammar(kept, inventories)
