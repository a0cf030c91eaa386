"""Synthetic benchmark corpora with planted constructions.

Plants two kinds of patterns into a unigram background stream: frequent ones
(found by raw counting) and rare-but-strongly-associated ones, whose words
co-occur near-deterministically but too seldom to clear a frequency
threshold. Transition strength is tuned by adding solo occurrences of the
pattern words: with F pattern instances and E solo occurrences per word, the
measured max delta-P of each internal transition is close to F / (F + E).
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field

from .corpus import LINE_LENGTH, UNIVERSAL_TAGS
from .association import delta_p_cells
from .grammar import ConstraintKind


class BenchmarkError(ValueError):
    """Infeasible benchmark specification."""


@dataclass
class PatternSpec:
    name: str
    words: list[str]
    tags: list[str]
    rate: float          # instances per corpus token
    dp_target: float     # intended per-transition max delta-P
    rare: bool = False


@dataclass
class BenchmarkSpec:
    n_tokens: int
    vocab_size: int
    patterns: list[PatternSpec]
    tagset: tuple[str, ...] = UNIVERSAL_TAGS
    n_background_clusters: int = 20
    embedding_dim: int = 16
    seed: int = 0


def default_benchmark_spec(n_tokens: int = 1_000_000, seed: int = 0,
                           n_frequent: int = 10, n_rare: int = 10,
                           frequent_rate: float = 2.5e-3, rare_rate: float = 6e-4,
                           frequent_dp: float = 0.6, rare_dp: float = 0.85) -> BenchmarkSpec:
    """The bundled benchmark: 1000 background words, 20 planted 4-slot patterns."""
    tags = UNIVERSAL_TAGS
    patterns = []
    for i in range(n_frequent):
        patterns.append(PatternSpec(
            name=f"freq{i:02d}",
            words=[f"pf{i:02d}s{j}" for j in range(4)],
            tags=[tags[(i + j) % len(tags)] for j in range(4)],
            rate=frequent_rate,
            dp_target=frequent_dp,
            rare=False,
        ))
    for i in range(n_rare):
        patterns.append(PatternSpec(
            name=f"rare{i:02d}",
            words=[f"pr{i:02d}s{j}" for j in range(4)],
            tags=[tags[(i + 2 * j + 1) % len(tags)] for j in range(4)],
            rate=rare_rate,
            dp_target=rare_dp,
            rare=True,
        ))
    return BenchmarkSpec(n_tokens=n_tokens, vocab_size=1000, patterns=patterns, seed=seed)


def _validate(spec: BenchmarkSpec):
    event_tokens = 0
    for p in spec.patterns:
        if not 0.0 < p.dp_target <= 1.0:
            raise BenchmarkError(f"{p.name}: dp_target {p.dp_target} outside (0, 1]")
        instances = round(p.rate * spec.n_tokens)
        if instances < 5:
            raise BenchmarkError(
                f"{p.name}: rate {p.rate} yields only {instances} instances at "
                f"{spec.n_tokens} tokens; too few to realize dp_target {p.dp_target}"
            )
        solo = round(instances * (1.0 - p.dp_target) / p.dp_target)
        event_tokens += instances * len(p.words) + solo * len(p.words)
        if len(p.words) != len(p.tags):
            raise BenchmarkError(f"{p.name}: words and tags length mismatch")
    if event_tokens > 0.8 * spec.n_tokens:
        raise BenchmarkError(
            f"planted material needs {event_tokens} tokens, over 80% of {spec.n_tokens}"
        )


def _zipf_weights(n):
    return [1.0 / (i + 1) for i in range(n)]


@dataclass
class GeneratedBenchmark:
    stream: list[tuple[str, str]]           # (word, tag)
    word_tags: dict[str, str]
    word_clusters: dict[str, int]
    n_clusters: int
    ground_truth: list[dict] = field(default_factory=list)


def gen_benchmark(spec: BenchmarkSpec) -> GeneratedBenchmark:
    """Generate the token stream and verify planted frequencies and delta-Ps."""
    _validate(spec)
    rng = random.Random(spec.seed)

    word_tags = {}
    word_clusters = {}
    for i in range(spec.vocab_size):
        w = f"w{i:05d}"
        word_tags[w] = spec.tagset[i % len(spec.tagset)]
        word_clusters[w] = i * spec.n_background_clusters // spec.vocab_size
    next_cluster = spec.n_background_clusters
    for p in spec.patterns:
        for w, t in zip(p.words, p.tags):
            if w in word_tags:
                raise BenchmarkError(f"pattern word {w!r} collides with another word")
            word_tags[w] = t
            word_clusters[w] = next_cluster
        next_cluster += 1

    events: list[tuple[str, ...]] = []
    planted = {}
    for p in spec.patterns:
        instances = round(p.rate * spec.n_tokens)
        solo = round(instances * (1.0 - p.dp_target) / p.dp_target)
        planted[p.name] = instances
        events.extend([tuple(p.words)] * instances)
        for w in p.words:
            events.extend([(w,)] * solo)

    bg_words = [f"w{i:05d}" for i in range(spec.vocab_size)]
    weights = _zipf_weights(spec.vocab_size)
    n_background = spec.n_tokens - sum(len(e) for e in events)
    if n_background + 1 < len(events):
        raise BenchmarkError(
            f"{len(events)} planted events need at least {len(events) - 1} "
            f"background separators but only {n_background} are available"
        )
    rng.shuffle(events)
    bg = rng.choices(bg_words, weights=weights, k=n_background)

    # Drop each event into its own gap of the background stream. Distinct gaps
    # keep planted events non-adjacent, so no spurious cross-pattern chains
    # of associated transitions arise at event junctions.
    gaps = sorted(rng.sample(range(n_background + 1), len(events)))
    flat: list[str] = []
    prev = 0
    for g, ev in zip(gaps, events):
        flat.extend(bg[prev:g])
        flat.extend(ev)
        prev = g
    flat.extend(bg[prev:])

    stream = [(w, word_tags[w]) for w in flat]
    assert len(stream) == spec.n_tokens

    ground_truth = _verify(spec, stream, planted)
    return GeneratedBenchmark(stream, word_tags, word_clusters, next_cluster, ground_truth)


def _verify(spec: BenchmarkSpec, stream, planted):
    words = [w for w, _ in stream]
    # adjacency counts within 100-token lines, mirroring downstream segmentation
    pair_counts = Counter()
    left = Counter()
    right = Counter()
    total = 0
    for i in range(len(words) - 1):
        if (i + 1) % LINE_LENGTH == 0:
            continue
        pair_counts[(words[i], words[i + 1])] += 1
        left[words[i]] += 1
        right[words[i + 1]] += 1
        total += 1

    ground_truth = []
    for p in spec.patterns:
        target = planted[p.name]
        found = 0
        k = len(p.words)
        for i in range(len(words) - k + 1):
            if words[i:i + k] == p.words:
                found += 1
        if abs(found - target) > 0.1 * target:
            raise BenchmarkError(
                f"{p.name}: planted {target} instances but measured {found}"
            )
        dps = []
        for w1, w2 in zip(p.words, p.words[1:]):
            a = pair_counts[(w1, w2)]
            b = left[w1] - a
            c = right[w2] - a
            d = total - a - b - c
            dps.append(delta_p_cells(a, b, c, d)[2])
            if abs(dps[-1] - p.dp_target) > 0.05:
                raise BenchmarkError(
                    f"{p.name}: transition {w1}->{w2} measured dp {dps[-1]:.3f}, "
                    f"target {p.dp_target}"
                )
        ground_truth.append({
            "name": p.name,
            "words": p.words,
            "tags": p.tags,
            "rare": p.rare,
            "rate": p.rate,
            "dp_target": p.dp_target,
            "measured_frequency": found,
            "measured_dp": dps,
        })
    return ground_truth


def write_benchmark(gen: GeneratedBenchmark, spec: BenchmarkSpec, out_dir) -> None:
    """Write corpus.tsv, embeddings.txt, and ground_truth.json."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "corpus.tsv"), "w", encoding="utf-8") as fh:
        for w, t in gen.stream:
            fh.write(f"{w}\t{t}\n")

    # embeddings: cluster centroid plus small noise, deterministic
    rng = random.Random(spec.seed + 1)
    centroids = {}
    for cid in range(gen.n_clusters):
        centroids[cid] = [rng.gauss(0.0, 10.0) for _ in range(spec.embedding_dim)]
    keys = sorted(gen.word_tags)
    with open(os.path.join(out_dir, "embeddings.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"{len(keys)} {spec.embedding_dim}\n")
        for w in keys:
            center = centroids[gen.word_clusters[w]]
            vec = [c + rng.gauss(0.0, 0.05) for c in center]
            fh.write(f"{w}_{gen.word_tags[w]} " + " ".join(f"{v:.6f}" for v in vec) + "\n")

    with open(os.path.join(out_dir, "ground_truth.json"), "w", encoding="utf-8") as fh:
        json.dump(gen.ground_truth, fh, sort_keys=True, indent=2)


def count_recovered(grammar, ground_truth, lexicon, inventory, tagset, rare_only=False):
    """How many planted patterns the grammar recovers.

    A pattern counts as recovered when some construction of the same length
    matches its canonical token sequence slot for slot and pins at least one
    slot with a non-syntactic constraint (so all-POS templates do not count).
    """
    from .corpus import TaggedToken
    from .lexsem import Lexicon  # noqa: F401  (type context)
    from .matcher import satisfies

    recovered = 0
    for entry in ground_truth:
        if rare_only and not entry["rare"]:
            continue
        toks = []
        for w, t in zip(entry["words"], entry["tags"]):
            pos = tagset.id_of(t)
            lex = lexicon.id_of(w) if w in lexicon else None
            toks.append(TaggedToken(w, pos, lex, inventory.get(w, pos)))
        for c in grammar.constructions:
            if len(c) != len(toks):
                continue
            if all(satisfies(s, tok) for s, tok in zip(c.slots, toks)) and any(
                s.kind != ConstraintKind.SYN for s in c.slots
            ):
                recovered += 1
                break
    return recovered
