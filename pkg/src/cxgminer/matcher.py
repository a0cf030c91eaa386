"""Span extraction: find every token span satisfying a construction, and
select a disjoint pointer cover per line for encoding."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .corpus import Line, TaggedToken
from .grammar import ConstraintKind, Grammar, SlotConstraint


@dataclass(frozen=True)
class Match:
    construction: int
    start: int
    end: int
    line: int = -1


@dataclass
class PointerCover:
    selected: list[Match]
    uncovered: int


def satisfies(slot: SlotConstraint, token: TaggedToken) -> bool:
    if slot.kind == ConstraintKind.LEX:
        return token.lex == slot.filler
    if slot.kind == ConstraintKind.SYN:
        return token.pos == slot.filler
    return token.cluster == slot.filler


def encode_line(line: Line) -> np.ndarray:
    """(n_tokens, 3) filler array indexed by kind; -1 marks a missing representation."""
    arr = np.full((len(line), 3), -1, dtype=np.int64)
    for i, tok in enumerate(line.tokens):
        if tok.lex is not None:
            arr[i, int(ConstraintKind.LEX)] = tok.lex
        arr[i, int(ConstraintKind.SYN)] = tok.pos
        if tok.cluster is not None:
            arr[i, int(ConstraintKind.SEMSYN)] = tok.cluster
    return arr


class GrammarIndex:
    """Flat array encoding of a grammar, built once and reused across lines."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        kinds = []
        fillers = []
        offsets = [0]
        for c in grammar.constructions:
            for s in c.slots:
                kinds.append(int(s.kind))
                fillers.append(s.filler)
            offsets.append(len(kinds))
        self.kinds = np.asarray(kinds, dtype=np.int64)
        self.fillers = np.asarray(fillers, dtype=np.int64)
        self.offsets = np.asarray(offsets, dtype=np.int64)

    def match_line(self, line: Line, line_index: int = -1) -> list[Match]:
        if not len(self.grammar):
            return []
        arr = encode_line(line)
        hits = _kernels.match_all(arr, self.kinds, self.fillers, self.offsets)
        out = []
        for c, start in hits:
            length = int(self.offsets[c + 1] - self.offsets[c])
            out.append(Match(int(c), int(start), int(start) + length, line_index))
        return out


def match_line(grammar: Grammar, line: Line, line_index: int = -1) -> list[Match]:
    """All (construction, offset) matches on one line; overlaps all reported."""
    return GrammarIndex(grammar).match_line(line, line_index)


def match_corpus(grammar: Grammar, lines) -> list[list[Match]]:
    index = GrammarIndex(grammar)
    return [index.match_line(line, i) for i, line in enumerate(lines)]


def select_cover(matches, line_len: int, pointer_counts=None) -> PointerCover:
    """Greedy longest-first disjoint selection.

    Ties break leftmost, then by higher pointer frequency, then by lower
    construction id.
    """
    counts = pointer_counts or {}
    order = sorted(
        matches,
        key=lambda m: (m.start - m.end, m.start, -counts.get(m.construction, 0), m.construction),
    )
    occupied = [False] * line_len
    selected = []
    covered = 0
    for m in order:
        if any(occupied[m.start:m.end]):
            continue
        for i in range(m.start, m.end):
            occupied[i] = True
        covered += m.end - m.start
        selected.append(m)
    return PointerCover(selected, line_len - covered)


def save_matches(per_line_matches, path) -> None:
    """Tab-separated dump: lineIndex, start, end, constructionId."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, matches in enumerate(per_line_matches):
            for m in matches:
                fh.write(f"{i}\t{m.start}\t{m.end}\t{m.construction}\n")
