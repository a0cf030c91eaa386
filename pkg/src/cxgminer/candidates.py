"""Candidate construction generation under the two competing models.

The frequency model greedily fixes one slot-constraint per token (strongest
adjacent association first), harvests constraint n-grams (n = 3..6), and
keeps the frequent ones after containment pruning. The association model
searches transition paths whose every delta-P clears a threshold and ranks
them by total delta-P.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .association import AssociationTable, token_reps
from .grammar import Construction, ConstraintKind, Grammar, Inventories, SlotConstraint, contains, render_construction

MIN_LEN = 3
MAX_LEN = 6

# Tie-break priority between kinds: richer constraints first.
_KIND_PRIORITY = {int(ConstraintKind.SEMSYN): 0, int(ConstraintKind.LEX): 1, int(ConstraintKind.SYN): 2}

FREQUENCY = "frequency"
ASSOCIATION = "association"


@dataclass
class CandidateStats:
    frequency: int
    total_dp: float


@dataclass
class CandidateSet:
    items: dict[Construction, CandidateStats]
    provenance: str

    def __len__(self):
        return len(self.items)


def construction_total_dp(c: Construction, table: AssociationTable) -> float:
    """Sum of max delta-P over the construction's adjacent slot transitions."""
    total = 0.0
    for s1, s2 in zip(c.slots, c.slots[1:]):
        total += table.dp_max((int(s1.kind), s1.filler), (int(s2.kind), s2.filler))
    return total


def represent_line(line, table: AssociationTable) -> list[SlotConstraint]:
    """Greedily fix one slot-constraint per token by descending pair delta-P.

    Committed positions are never reassigned; positions left without any
    table-backed pair fall back to their syntactic constraint.
    """
    toks = line.tokens
    n = len(toks)
    reps = []
    for tok in toks:
        reps.append({k: f for k, f in token_reps(tok)})

    # Per adjacent pair, all table-backed kind combinations, best first.
    pair_combos = []
    for i in range(n - 1):
        combos = []
        for ki, fi in reps[i].items():
            for kj, fj in reps[i + 1].items():
                entry = table.get((ki, fi), (kj, fj))
                if entry is not None:
                    combos.append((-entry[2], _KIND_PRIORITY[ki], _KIND_PRIORITY[kj], ki, kj))
        combos.sort()
        pair_combos.append(combos)

    assigned: list[int | None] = [None] * n
    while True:
        best = None  # (neg_dp, i, prio_i, prio_j, ki, kj)
        for i in range(n - 1):
            ai, aj = assigned[i], assigned[i + 1]
            if ai is not None and aj is not None:
                continue
            for neg_dp, pi, pj, ki, kj in pair_combos[i]:
                if ai is not None and ai != ki:
                    continue
                if aj is not None and aj != kj:
                    continue
                key = (neg_dp, i, pi, pj)
                if best is None or key < best[0]:
                    best = (key, i, ki, kj)
                break  # combos sorted: first admissible one is this pair's best
        if best is None:
            break
        _, i, ki, kj = best
        assigned[i] = ki
        assigned[i + 1] = kj

    slots = []
    for i, kind in enumerate(assigned):
        if kind is None:
            kind = int(ConstraintKind.SYN)
        slots.append(SlotConstraint(ConstraintKind(kind), reps[i][kind]))
    return slots


def harvest_ngrams(rs, n_range=range(MIN_LEN, MAX_LEN + 1)) -> list[Construction]:
    """All contiguous constraint windows with lengths in ``n_range``."""
    out = []
    slots = tuple(rs)
    for n in n_range:
        for i in range(len(slots) - n + 1):
            out.append(Construction(slots[i:i + n]))
    return out


def frequency_pipeline(lines, table: AssociationTable, freq_threshold: int) -> CandidateSet:
    """Harvest n-grams over all lines, apply the fixed frequency threshold,
    then drop every candidate entirely contained in another survivor."""
    if freq_threshold < 1:
        raise ValueError("freq_threshold must be >= 1")
    counts = Counter()
    for line in lines:
        rs = represent_line(line, table)
        counts.update(harvest_ngrams(rs))
    survivors = {c: f for c, f in counts.items() if f >= freq_threshold}

    by_len: dict[int, list[Construction]] = {}
    for c in survivors:
        by_len.setdefault(len(c), []).append(c)
    lengths = sorted(by_len, reverse=True)

    kept = {}
    for c, f in survivors.items():
        swallowed = False
        for m in lengths:
            if m <= len(c):
                break
            if any(contains(outer, c) for outer in by_len[m]):
                swallowed = True
                break
        if not swallowed:
            kept[c] = CandidateStats(f, construction_total_dp(c, table))
    return CandidateSet(kept, FREQUENCY)


def association_search(line, table: AssociationTable, dp_threshold: float,
                       len_range=(MIN_LEN, MAX_LEN)) -> Counter:
    """Depth-first path search from every start position and starting kind.

    A path extends along successor kinds whose transition exceeds the
    threshold; it is emitted when it hits the maximum length, the line end,
    or a failed extension, provided its length is admissible. Returns a
    Counter of constructions (one count per emitting path).
    """
    min_len, max_len = len_range
    toks = line.tokens
    n = len(toks)
    reps = [token_reps(t) for t in toks]
    emitted: Counter = Counter()

    def emit(path):
        emitted[Construction(tuple(SlotConstraint(ConstraintKind(k), f) for k, f in path))] += 1

    def extend(pos, path):
        if len(path) == max_len:
            if len(path) >= min_len:
                emit(path)
            return
        if pos == n - 1:
            if len(path) >= min_len:
                emit(path)
            return
        failed = False
        for rep in reps[pos + 1]:
            if table.dp_max(path[-1], rep) > dp_threshold:
                path.append(rep)
                extend(pos + 1, path)
                path.pop()
            else:
                failed = True
        if failed and min_len <= len(path):
            emit(path)

    for start in range(n):
        for rep in reps[start]:
            extend(start, [rep])
    return emitted


def association_pipeline(lines, table: AssociationTable, dp_threshold: float,
                         top_n: int) -> CandidateSet:
    """Aggregate per-line path candidates and keep the top_n by total delta-P."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    counts = Counter()
    for line in lines:
        counts.update(association_search(line, table, dp_threshold))
    scored = [
        (c, CandidateStats(f, construction_total_dp(c, table))) for c, f in counts.items()
    ]
    scored.sort(key=lambda cs: (-cs[1].total_dp, -cs[1].frequency, cs[0].sort_key()))
    return CandidateSet(dict(scored[:top_n]), ASSOCIATION)


def grid_search_dp(gen_lines, dev_lines, table: AssociationTable, grid,
                   inventories: Inventories, top_n: int):
    """Pick the delta-P threshold whose candidate set compresses dev data best.

    No tabu search is run: each threshold's full candidate set is scored as a
    grammar. Ties go to the smaller threshold. Returns (best, results) where
    results maps threshold -> compression.
    """
    from . import mdl

    if not grid:
        raise ValueError("empty threshold grid")
    results = {}
    best = None
    for thr in sorted(grid):
        cand = association_pipeline(gen_lines, table, thr, top_n)
        grammar = Grammar(sorted(cand.items, key=Construction.sort_key), inventories)
        report = mdl.score(grammar, dev_lines)
        results[thr] = report.compression
        if best is None or report.compression < results[best]:
            best = thr
    return best, results


def save_candidates(cand: CandidateSet, inventories: Inventories, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#provenance\t{cand.provenance}\n")
        for c in sorted(cand.items, key=Construction.sort_key):
            stats = cand.items[c]
            fh.write(
                f"{render_construction(c, inventories)}\t{stats.frequency}\t{stats.total_dp:.10g}\n"
            )
