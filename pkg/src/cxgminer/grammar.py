"""Core construction representation shared by every other module.

A construction is an ordered sequence of slot-constraints; each constraint
names a kind (lexical word-form, syntactic tag, or joint semantic-syntactic
cluster) and a filler id into that kind's inventory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum


class ConstraintKind(IntEnum):
    LEX = 0
    SYN = 1
    SEMSYN = 2


N_KINDS = 3

MIN_SLOTS = 3
MAX_SLOTS = 6

_KIND_NAMES = {ConstraintKind.LEX: "LEX", ConstraintKind.SYN: "SYN", ConstraintKind.SEMSYN: "SEMSYN"}
_KIND_BY_NAME = {v: k for k, v in _KIND_NAMES.items()}


@dataclass(frozen=True)
class SlotConstraint:
    kind: ConstraintKind
    filler: int

    def __repr__(self):
        return f"{_KIND_NAMES[self.kind]}:{self.filler}"


@dataclass(frozen=True)
class Construction:
    """An ordered, immutable sequence of slot-constraints."""

    slots: tuple[SlotConstraint, ...]

    def __len__(self):
        return len(self.slots)

    def sort_key(self):
        return tuple((int(s.kind), s.filler) for s in self.slots)


@dataclass(frozen=True)
class Inventories:
    """Sizes and display names of the three filler inventories."""

    lex_names: tuple[str, ...]
    syn_names: tuple[str, ...]
    n_clusters: int

    @property
    def t_lex(self) -> int:
        return len(self.lex_names)

    @property
    def t_syn(self) -> int:
        return len(self.syn_names)

    @property
    def t_sem(self) -> int:
        return self.n_clusters

    def size_of(self, kind: ConstraintKind) -> int:
        if kind == ConstraintKind.LEX:
            return self.t_lex
        if kind == ConstraintKind.SYN:
            return self.t_syn
        return self.n_clusters

    def filler_name(self, slot: SlotConstraint) -> str:
        if slot.kind == ConstraintKind.LEX:
            return self.lex_names[slot.filler]
        if slot.kind == ConstraintKind.SYN:
            return self.syn_names[slot.filler]
        return f"c{slot.filler}"

    def filler_id(self, kind: ConstraintKind, name: str) -> int:
        if kind == ConstraintKind.LEX:
            return self.lex_names.index(name)
        if kind == ConstraintKind.SYN:
            return self.syn_names.index(name)
        return int(name.lstrip("c"))


@dataclass
class Grammar:
    """A set of constructions plus the inventories and pointer counts that price it."""

    constructions: list[Construction]
    inventories: Inventories
    pointer_counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for c in self.constructions:
            if c in seen:
                raise ValueError(f"duplicate construction: {c}")
            seen.add(c)
        bad = set(self.pointer_counts) - set(range(len(self.constructions)))
        if bad:
            raise ValueError(f"pointer counts for unknown construction ids: {sorted(bad)}")

    def __len__(self):
        return len(self.constructions)


def contains(outer: Construction, inner: Construction) -> bool:
    """True iff inner's slots are a contiguous subsequence of outer's."""
    n, m = len(outer), len(inner)
    if m > n:
        return False
    for off in range(n - m + 1):
        if outer.slots[off:off + m] == inner.slots:
            return True
    return False


def edge_overlap(x: Construction, y: Construction) -> int:
    """Longest proper prefix/suffix overlap between two constructions.

    Returns the largest m < min(|x|, |y|) such that the last m slots of one
    equal the first m slots of the other, in either orientation.
    """
    limit = min(len(x), len(y)) - 1
    for m in range(limit, 0, -1):
        if x.slots[-m:] == y.slots[:m] or y.slots[-m:] == x.slots[:m]:
            return m
    return 0


def render_construction(c: Construction, inventories: Inventories) -> str:
    return "--".join(f"{_KIND_NAMES[s.kind]}:{inventories.filler_name(s)}" for s in c.slots)


def parse_construction(text: str, inventories: Inventories) -> Construction:
    slots = []
    for part in text.split("--"):
        kind_name, _, filler_name = part.partition(":")
        kind = _KIND_BY_NAME[kind_name]
        slots.append(SlotConstraint(kind, inventories.filler_id(kind, filler_name)))
    return Construction(tuple(slots))


def save_grammar(grammar: Grammar, path) -> None:
    """One construction per row, pointer count as second column.

    A leading metadata row records the inventory sizes.
    """
    with open(path, "w", encoding="utf-8") as fh:
        inv = grammar.inventories
        fh.write(f"#inventories\tlex={inv.t_lex}\tsyn={inv.t_syn}\tsem={inv.n_clusters}\n")
        for cid, c in enumerate(grammar.constructions):
            count = grammar.pointer_counts.get(cid, 0)
            fh.write(f"{render_construction(c, inv)}\t{count}\n")


def load_grammar(path, inventories: Inventories) -> Grammar:
    constructions = []
    pointer_counts = {}
    with open(path, encoding="utf-8") as fh:
        for row in fh:
            row = row.rstrip("\n")
            if not row or row.startswith("#"):
                continue
            rendered, _, count = row.partition("\t")
            cid = len(constructions)
            constructions.append(parse_construction(rendered, inventories))
            if count and int(count):
                pointer_counts[cid] = int(count)
    return Grammar(constructions, inventories, pointer_counts)
