"""Three-term description-length scoring of a grammar against a corpus.

L1 prices the grammar itself, L2{C} the pointers that cover the corpus, and
L2{R} the words no construction covers. The baseline is the empty-grammar
score, so compression = total / baseline is exactly 1.0 with no grammar.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

from .grammar import Construction, Grammar, N_KINDS
from .matcher import GrammarIndex, select_cover


@dataclass
class EncodingModel:
    t_lex: int
    t_syn: int
    t_sem: int
    corpus_tokens: int
    pointer_counts: dict[int, int] = field(default_factory=dict)
    n_kinds: int = N_KINDS

    def __post_init__(self):
        if min(self.t_lex, self.t_syn, self.t_sem) < 1:
            raise ValueError("inventory sizes must be >= 1")

    def filler_inventory(self, kind) -> int:
        return (self.t_lex, self.t_syn, self.t_sem)[int(kind)]


@dataclass
class MdlReport:
    l1: float
    l2c: float
    l2r: float
    total: float
    baseline: float
    compression: float
    shares: tuple[float, float, float]

    def to_dict(self):
        return {
            "l1_bits": self.l1,
            "l2_pointer_bits": self.l2c,
            "l2_regret_bits": self.l2r,
            "total_bits": self.total,
            "baseline_bits": self.baseline,
            "compression": self.compression,
            "share_l1_pct": self.shares[0],
            "share_l2_pointers_pct": self.shares[1],
            "share_l2_regret_pct": self.shares[2],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        d = self.to_dict()
        return "\n".join(f"{k} = {v:.6f}" for k, v in sorted(d.items()))


def bits(p: float) -> float:
    """Encoding size in bits of an event with probability p."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"probability {p} outside (0, 1]")
    return -math.log2(p)


def construction_cost(c: Construction, model: EncodingModel) -> float:
    """Bits to write the construction down: kind plus filler, per slot."""
    cost = 0.0
    for slot in c.slots:
        cost += math.log2(model.n_kinds) + math.log2(model.filler_inventory(slot.kind))
    return cost


def pointer_cost(count: int, corpus_tokens: int) -> float:
    """Bits per use of a construction matched ``count`` times on the corpus."""
    if not 1 <= count <= corpus_tokens:
        raise ValueError(f"count {count} outside [1, {corpus_tokens}]")
    return bits(count / corpus_tokens)


def regret_cost(i: int, model: EncodingModel) -> float:
    """Bits for the i-th uncovered word: base lexicon cost plus an
    accumulation surcharge that grows with how many words went unencoded."""
    if i < 1:
        raise ValueError("regret index is 1-based")
    return math.log2(model.t_lex + 1) + math.log2(i)


def grammar_cost(grammar: Grammar, model: EncodingModel) -> float:
    return sum(construction_cost(c, model) for c in grammar.constructions)


def baseline_bits(n_tokens: int, model: EncodingModel) -> float:
    total = 0.0
    for i in range(1, n_tokens + 1):
        total += regret_cost(i, model)
    return total


def _share(x, total):
    return 100.0 * x / total if total else 0.0


def make_report(l1: float, l2c: float, l2r: float, baseline: float) -> MdlReport:
    total = l1 + l2c + l2r
    shares = (_share(l1, total), _share(l2c, total), _share(l2r, total))
    return MdlReport(l1, l2c, l2r, total, baseline, total / baseline, shares)


def score(grammar: Grammar, lines) -> MdlReport:
    """Full two-pass scoring: covers and pointer counts first, bits second."""
    corpus_tokens = sum(len(line) for line in lines)
    if corpus_tokens == 0:
        raise ValueError("cannot score an empty corpus")

    inv = grammar.inventories
    model = EncodingModel(inv.t_lex, inv.t_syn, inv.t_sem, corpus_tokens)

    index = GrammarIndex(grammar)
    covers = []
    pointer_counts: Counter = Counter()
    for li, line in enumerate(lines):
        cover = select_cover(index.match_line(line, li), len(line), grammar.pointer_counts)
        covers.append(cover)
        for m in cover.selected:
            pointer_counts[m.construction] += 1
    model.pointer_counts = dict(pointer_counts)

    l1 = grammar_cost(grammar, model)
    l2c = 0.0
    l2r = 0.0
    regret_index = 0
    for cover in covers:
        for m in cover.selected:
            l2c += pointer_cost(pointer_counts[m.construction], corpus_tokens)
        for _ in range(cover.uncovered):
            regret_index += 1
            l2r += regret_cost(regret_index, model)

    return make_report(l1, l2c, l2r, baseline_bits(corpus_tokens, model))


def breakdown(report: MdlReport) -> tuple[float, float, float]:
    """Percentage shares of the three terms."""
    if report.total <= 0:
        raise ValueError("total must be positive")
    return report.shares
