"""Corpus ingestion: normalization, 100-word lines, chunking, data divisions."""

from __future__ import annotations

import random
import unicodedata
from dataclasses import dataclass, field

LINE_LENGTH = 100

DEFAULT_CHUNK_LINES = 1000

#: Universal POS tags used by the bundled tagset.
UNIVERSAL_TAGS = (
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ",
    "NOUN", "NUM", "PART", "PRON", "PROPN", "SCONJ", "VERB",
)


class CorpusFormatError(ValueError):
    """Malformed corpus input (bad columns, unknown tag, ...)."""


@dataclass
class Tagset:
    names: tuple[str, ...] = UNIVERSAL_TAGS

    def __post_init__(self):
        self.index = {name: i for i, name in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    def __getitem__(self, i):
        return self.names[i]

    def id_of(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise CorpusFormatError(f"unknown tag {name!r}") from None


@dataclass
class TaggedToken:
    """One corpus word with its candidate lexical / syntactic / semantic fillers.

    ``lex`` and ``cluster`` stay ``None`` until resolved against the lexicon
    and cluster inventory.
    """

    word: str
    pos: int
    lex: int | None = None
    cluster: int | None = None


@dataclass
class Line:
    """Up to 100 tokens in source order: the fixed unit of analysis."""

    tokens: list[TaggedToken]

    def __post_init__(self):
        if not 1 <= len(self.tokens) <= LINE_LENGTH:
            raise ValueError(f"line length {len(self.tokens)} outside 1..{LINE_LENGTH}")

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


@dataclass
class DataDivisions:
    """Chunk-index sets for each stage of the pipeline."""

    background: set[int]
    potentials: set[int]
    potentials_folds: list[list[int]]
    optimizing: set[int]
    evaluation: list[set[int]]

    def all_divisions(self):
        return [self.background, self.potentials, self.optimizing, *self.evaluation]


def _clean_token(token: str) -> str:
    # Punctuation = Unicode categories P* and S*, stripped inside tokens too.
    return "".join(
        ch for ch in token.lower()
        if unicodedata.category(ch)[0] not in ("P", "S")
    )


def normalize_and_segment(text: str, line_length: int = LINE_LENGTH) -> list[list[str]]:
    """Lowercase, strip punctuation, and cut the token stream into fixed lines.

    The trailing partial line is kept. Tokens that are nothing but punctuation
    vanish entirely.
    """
    tokens = [t for t in (_clean_token(tok) for tok in text.split()) if t]
    return [tokens[i:i + line_length] for i in range(0, len(tokens), line_length)]


def ingest_tagged(path, tagset: Tagset, line_length: int = LINE_LENGTH):
    """Read a two-column ``word<TAB>TAG`` file into lines of TaggedTokens.

    Blank rows (document separators) are ignored; 100-word lines may straddle
    them but never cross files. Returns ``(lines, n_skipped)`` where skipped
    rows are those whose word normalizes to nothing.
    """
    tokens: list[TaggedToken] = []
    skipped = 0
    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, row in enumerate(fh, start=1):
            row = row.rstrip("\n")
            if not row.strip():
                continue
            cols = row.split("\t")
            if len(cols) != 2:
                raise CorpusFormatError(f"{path}:{lineno}: expected 2 columns, got {len(cols)}")
            word, tag = cols
            try:
                pos = tagset.id_of(tag)
            except CorpusFormatError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from None
            word = _clean_token(word)
            if not word:
                skipped += 1
                continue
            tokens.append(TaggedToken(word, pos))
    lines = [Line(tokens[i:i + line_length]) for i in range(0, len(tokens), line_length)]
    return lines, skipped


def write_tagged(lines, tagset: Tagset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            for tok in line:
                fh.write(f"{tok.word}\t{tagset[tok.pos]}\n")


def chunk_lines(lines, chunk_size: int = DEFAULT_CHUNK_LINES) -> list[list[Line]]:
    """Group consecutive lines into fixed-size chunks (last chunk may be short)."""
    return [lines[i:i + chunk_size] for i in range(0, len(lines), chunk_size)]


DEFAULT_PROPORTIONS = (20, 5, 1, 1)  # background : potentials : optimizing : each evaluation set

N_FOLDS = 4
N_EVAL_SETS = 5


def assign_divisions(
    n_chunks: int,
    proportions: tuple[int, int, int, int] = DEFAULT_PROPORTIONS,
    seed: int = 0,
) -> DataDivisions:
    """Randomly assign chunk indices to the pipeline divisions.

    Proportions scale the background : potentials : optimizing : evaluation
    ratio; each of the five evaluation sets gets the last share. Deterministic
    given the seed; leftover chunks go to the background division.
    """
    bg_r, pot_r, opt_r, eval_r = proportions
    total_ratio = bg_r + pot_r + opt_r + N_EVAL_SETS * eval_r
    unit = n_chunks // total_ratio
    if unit < 1:
        raise ValueError(
            f"need at least {total_ratio} chunks for proportions {proportions}, got {n_chunks}"
        )
    n_pot = pot_r * unit
    if n_pot < N_FOLDS:
        raise ValueError(f"potentials division has {n_pot} chunks; needs >= {N_FOLDS} for folds")

    order = list(range(n_chunks))
    random.Random(seed).shuffle(order)

    pos = 0

    def take(n):
        nonlocal pos
        out = order[pos:pos + n]
        pos += n
        return out

    background = take(bg_r * unit)
    potentials = take(n_pot)
    optimizing = take(opt_r * unit)
    evaluation = [set(take(eval_r * unit)) for _ in range(N_EVAL_SETS)]
    background += order[pos:]  # leftovers

    folds = [sorted(potentials[i::N_FOLDS]) for i in range(N_FOLDS)]
    return DataDivisions(
        background=set(background),
        potentials=set(potentials),
        potentials_folds=folds,
        optimizing=set(optimizing),
        evaluation=evaluation,
    )
