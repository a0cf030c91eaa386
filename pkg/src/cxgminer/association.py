"""Adjacent-pair counts and directional delta-P association values.

A representation is a (kind, filler) pair; every adjacent token pair
contributes one count per available ordered representation combination
(up to 9 when both tokens carry all three representations).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import TaggedToken
from .grammar import ConstraintKind, Inventories, SlotConstraint

Rep = tuple[int, int]  # (kind, filler)

#: Sentinel association for pairs absent from the table.
NO_ASSOCIATION = -1.0


class ContingencyError(ValueError):
    """Derived contingency cell went negative: counts are inconsistent."""


def token_reps(tok: TaggedToken) -> list[Rep]:
    """All representations available for one token, in kind order."""
    reps = []
    if tok.lex is not None:
        reps.append((int(ConstraintKind.LEX), tok.lex))
    reps.append((int(ConstraintKind.SYN), tok.pos))
    if tok.cluster is not None:
        reps.append((int(ConstraintKind.SEMSYN), tok.cluster))
    return reps


@dataclass
class PairCounts:
    joint: Counter
    left_marginal: Counter
    right_marginal: Counter
    total: int

    def merge(self, other: "PairCounts") -> "PairCounts":
        """Associative shard merge; pairs never cross line boundaries, so no seams."""
        return PairCounts(
            self.joint + other.joint,
            self.left_marginal + other.left_marginal,
            self.right_marginal + other.right_marginal,
            self.total + other.total,
        )


def count_pairs(lines) -> PairCounts:
    joint = Counter()
    left = Counter()
    right = Counter()
    total = 0
    for line in lines:
        toks = line.tokens
        for i in range(len(toks) - 1):
            reps_a = token_reps(toks[i])
            reps_b = token_reps(toks[i + 1])
            for ra in reps_a:
                for rb in reps_b:
                    joint[(ra, rb)] += 1
                    left[ra] += 1
                    right[rb] += 1
                    total += 1
    return PairCounts(joint, left, right, total)


def delta_p_cells(a: int, b: int, c: int, d: int) -> tuple[float, float, float]:
    """Directional delta-P from contingency cells; 0/0 conditionals count as 0."""
    if min(a, b, c, d) < 0:
        raise ContingencyError(f"negative contingency cell: a={a} b={b} c={c} d={d}")

    def cond(num, den):
        return num / den if den else 0.0

    lr = cond(a, a + c) - cond(b, b + d)
    rl = cond(a, a + b) - cond(c, c + d)
    return lr, rl, max(lr, rl)


def delta_p(pair: tuple[Rep, Rep], counts: PairCounts) -> tuple[float, float, float]:
    x, y = pair
    a = counts.joint[(x, y)]
    b = counts.left_marginal[x] - a
    c = counts.right_marginal[y] - a
    d = counts.total - a - b - c
    return delta_p_cells(a, b, c, d)


@dataclass
class AssociationTable:
    """Delta-P triples for every pair whose joint count clears the bound.

    Absent pairs read as ``NO_ASSOCIATION`` (-1).
    """

    values: dict[tuple[Rep, Rep], tuple[float, float, float]]
    min_pair_count: int

    def dp_max(self, r1: Rep, r2: Rep) -> float:
        entry = self.values.get((r1, r2))
        return entry[2] if entry is not None else NO_ASSOCIATION

    def get(self, r1: Rep, r2: Rep):
        return self.values.get((r1, r2))

    def __len__(self):
        return len(self.values)


def build_table(counts: PairCounts, min_pair_count: int) -> AssociationTable:
    if min_pair_count < 1:
        raise ValueError("min_pair_count must be >= 1")
    values = {}
    for pair, joint in counts.joint.items():
        if joint >= min_pair_count:
            values[pair] = delta_p(pair, counts)
    return AssociationTable(values, min_pair_count)


def default_min_pair_count(total_pairs: int) -> int:
    """10 per 10M adjacent pairs, floored at 5."""
    return max(5, round(1e-6 * total_pairs))


def _render_rep(rep: Rep, inventories: Inventories) -> str:
    kind = ConstraintKind(rep[0])
    slot = SlotConstraint(kind, rep[1])
    return f"{kind.name}:{inventories.filler_name(slot)}"


def save_table(table: AssociationTable, inventories: Inventories, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (r1, r2) in sorted(table.values):
            lr, rl, mx = table.values[(r1, r2)]
            fh.write(
                f"{_render_rep(r1, inventories)}\t{_render_rep(r2, inventories)}"
                f"\t{lr:.10g}\t{rl:.10g}\t{mx:.10g}\n"
            )
