"""Lexicon, embedding ingestion, x-means clustering, and token resolution.

The semantic inventory is built by clustering pre-trained embeddings keyed by
``word_POS`` and then splitting every cluster by POS so each cluster is
syntactically pure.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import Tagset


class EmbeddingFormatError(ValueError):
    pass


@dataclass
class Lexicon:
    """Word-form inventory admitted by the frequency threshold.

    Ids are dense in [0, size), assigned by descending count then
    alphabetically for determinism.
    """

    entries: dict[str, tuple[int, int]]  # word -> (id, count)
    threshold: int

    @property
    def size(self) -> int:
        return len(self.entries)

    def __contains__(self, word):
        return word in self.entries

    def id_of(self, word: str) -> int:
        return self.entries[word][0]

    def names(self) -> tuple[str, ...]:
        out = [None] * len(self.entries)
        for word, (lid, _) in self.entries.items():
            out[lid] = word
        return tuple(out)


@dataclass
class ClusterInventory:
    """POS-pure semantic clusters keyed by (word, pos id)."""

    assignment: dict[tuple[str, int], int]
    n_clusters: int
    per_pos: dict[int, int] = field(default_factory=dict)

    def get(self, word: str, pos: int):
        return self.assignment.get((word, pos))


@dataclass
class EmbeddingTable:
    keys: list[tuple[str, int]]  # (word, pos id)
    vectors: np.ndarray  # shape (len(keys), D)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.keys)


def default_min_count(n_tokens: int) -> int:
    """Scale the 500-per-billion-words inclusion rate to an N-token corpus."""
    return max(2, math.ceil(500 * n_tokens / 1e9))


def build_lexicon(lines, min_count: int) -> Lexicon:
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts = Counter()
    for line in lines:
        for tok in line:
            counts[tok.word] += 1
    kept = sorted(
        ((w, c) for w, c in counts.items() if c >= min_count),
        key=lambda wc: (-wc[1], wc[0]),
    )
    return Lexicon({w: (i, c) for i, (w, c) in enumerate(kept)}, min_count)


def save_lexicon(lexicon: Lexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word in lexicon.names():
            fh.write(f"{word}\t{lexicon.entries[word][1]}\n")


def load_lexicon(path, threshold: int = 1) -> Lexicon:
    counts = {}
    with open(path, encoding="utf-8") as fh:
        for row in fh:
            row = row.rstrip("\n")
            if not row:
                continue
            word, count = row.split("\t")
            counts[word] = int(count)
    kept = sorted(counts.items(), key=lambda wc: (-wc[1], wc[0]))
    return Lexicon({w: (i, c) for i, (w, c) in enumerate(kept)}, threshold)


def load_embeddings(path, lexicon: Lexicon, tagset: Tagset) -> EmbeddingTable:
    """Read a text embedding file (header ``N D``, rows ``word_POS v1 .. vD``).

    Keys whose word is outside the lexicon are dropped; keys whose tag is not
    in the tagset raise.
    """
    keys = []
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingFormatError(f"{path}: bad header {header!r}")
        try:
            n_rows, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingFormatError(f"{path}: non-numeric header {header!r}") from None
        for _ in range(n_rows):
            parts = fh.readline().split()
            if not parts:
                raise EmbeddingFormatError(f"{path}: fewer rows than header promises")
            key = parts[0]
            if len(parts) - 1 != dim:
                raise EmbeddingFormatError(
                    f"{path}: key {key!r} has {len(parts) - 1} values, expected {dim}"
                )
            word, _, tag = key.rpartition("_")
            if not word:
                raise EmbeddingFormatError(f"{path}: key {key!r} is not word_POS")
            if word not in lexicon:
                continue
            try:
                vec = [float(v) for v in parts[1:]]
            except ValueError:
                raise EmbeddingFormatError(f"{path}: non-numeric value for key {key!r}") from None
            keys.append((word, tagset.id_of(tag)))
            rows.append(vec)
    vectors = np.asarray(rows, dtype=np.float64) if rows else np.zeros((0, dim))
    return EmbeddingTable(keys, vectors)


# ---------------------------------------------------------------------------
# x-means
# ---------------------------------------------------------------------------

_VAR_FLOOR = 1e-12


def _seed_centers(X, k, first):
    """Farthest-point seeding starting from index ``first``."""
    centers = [X[first]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(d2))
        centers.append(X[nxt])
        d2 = np.minimum(d2, np.sum((X - centers[-1]) ** 2, axis=1))
    return np.array(centers)


def _kmeans(X, k, first, max_iter=100):
    centers = _seed_centers(X, k, first)
    labels = np.zeros(len(X), dtype=np.intp)
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        for j in range(k):
            mask = new_labels == j
            if mask.any():
                centers[j] = X[mask].mean(axis=0)
            else:
                # revive an empty cluster at the worst-fit point
                worst = int(np.argmax(d2[np.arange(len(X)), new_labels]))
                centers[j] = X[worst]
                new_labels[worst] = j
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels, centers


def _global_bic(X, clusters):
    """BIC (higher is better) of a spherical Gaussian mixture with hard labels."""
    n, d = X.shape
    k = len(clusters)
    sse = 0.0
    for idx in clusters:
        pts = X[idx]
        mu = pts.mean(axis=0)
        sse += float(((pts - mu) ** 2).sum())
    dof = max(n - k, 1)
    var = max(sse / dof, _VAR_FLOOR)
    loglik = 0.0
    for idx in clusters:
        nj = len(idx)
        loglik += nj * math.log(nj / n)
    loglik -= 0.5 * n * d * math.log(2 * math.pi * var)
    loglik -= 0.5 * (n - k)
    p = (k - 1) + k * d + 1
    return loglik - 0.5 * p * math.log(n)


def xmeans_cluster(table_or_points, k_min: int = 2, k_max: int = 1024, seed: int = 0,
                   force_k: int | None = None) -> np.ndarray:
    """Hard-cluster points, choosing k in [k_min, k_max] by BIC-guided splitting.

    Starts from a k_min-way partition, then repeatedly 2-splits clusters,
    keeping a split only when the global BIC improves. ``force_k`` keeps
    splitting (taking the least-bad split) until exactly that many clusters
    exist, which is used for BIC sanity checks.
    """
    X = table_or_points.vectors if isinstance(table_or_points, EmbeddingTable) else np.asarray(table_or_points, dtype=np.float64)
    n = len(X)
    if k_min < 2 or k_max < k_min:
        raise ValueError("need 2 <= k_min <= k_max")
    if n < k_min:
        raise ValueError(f"{n} points cannot form {k_min} clusters")

    rng = random.Random(seed)
    labels, _ = _kmeans(X, k_min, rng.randrange(n))
    clusters = [np.flatnonzero(labels == j) for j in range(k_min)]
    clusters = [c for c in clusters if len(c)]

    def try_split(idx):
        if len(idx) < 2:
            return None
        sub = X[idx]
        if np.allclose(sub, sub[0]):
            return None
        sub_labels, _ = _kmeans(sub, 2, rng.randrange(len(idx)))
        left = idx[sub_labels == 0]
        right = idx[sub_labels == 1]
        if not len(left) or not len(right):
            return None
        return left, right

    target = force_k if force_k is not None else k_max
    bic = _global_bic(X, clusters)
    improved = True
    while improved and len(clusters) < target:
        improved = False
        best = None  # (delta, position, split)
        for pos, idx in enumerate(clusters):
            split = try_split(idx)
            if split is None:
                continue
            candidate = clusters[:pos] + [split[0], split[1]] + clusters[pos + 1:]
            delta = _global_bic(X, candidate) - bic
            if best is None or delta > best[0]:
                best = (delta, pos, split)
        if best is None:
            break
        delta, pos, split = best
        if delta > 1e-12 or force_k is not None:
            clusters = clusters[:pos] + [split[0], split[1]] + clusters[pos + 1:]
            bic += delta
            improved = True

    out = np.empty(n, dtype=np.intp)
    for j, idx in enumerate(clusters):
        out[idx] = j
    return out


def split_by_pos(keys, labels) -> ClusterInventory:
    """Divide raw clusters so each output cluster holds a single POS."""
    groups = {}
    for (word, pos), raw in zip(keys, labels):
        groups.setdefault((int(raw), pos), []).append((word, pos))
    assignment = {}
    per_pos = Counter()
    for cid, group_key in enumerate(sorted(groups)):
        _, pos = group_key
        per_pos[pos] += 1
        for word, p in groups[group_key]:
            assignment[(word, p)] = cid
    return ClusterInventory(assignment, len(groups), dict(per_pos))


def save_clusters(inventory: ClusterInventory, tagset: Tagset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (word, pos), cid in sorted(inventory.assignment.items()):
            fh.write(f"{word}_{tagset[pos]}\t{cid}\n")


def load_clusters(path, tagset: Tagset) -> ClusterInventory:
    assignment = {}
    with open(path, encoding="utf-8") as fh:
        for row in fh:
            row = row.rstrip("\n")
            if not row:
                continue
            key, cid = row.split("\t")
            word, _, tag = key.rpartition("_")
            assignment[(word, tagset.id_of(tag))] = int(cid)
    n_clusters = max(assignment.values()) + 1 if assignment else 0
    seen = {}
    for (_, pos), cid in assignment.items():
        seen.setdefault(pos, set()).add(cid)
    per_pos = {pos: len(cids) for pos, cids in seen.items()}
    return ClusterInventory(assignment, n_clusters, per_pos)


def resolve_tokens(lines, lexicon: Lexicon, inventory: ClusterInventory) -> None:
    """Populate lex and cluster fields in place from the shared inventories."""
    for line in lines:
        for tok in line:
            entry = lexicon.entries.get(tok.word)
            tok.lex = entry[0] if entry else None
            tok.cluster = inventory.get(tok.word, tok.pos)


# ---------------------------------------------------------------------------
# bundled lookup tagger for raw text
# ---------------------------------------------------------------------------


@dataclass
class LookupTagger:
    """Word -> most-frequent-tag lookup with a default for unknown words."""

    mapping: dict[str, str]
    default_tag: str = "NOUN"

    @classmethod
    def from_tagged_lines(cls, lines, tagset: Tagset, default_tag: str = "NOUN"):
        counts: dict[str, Counter] = {}
        for line in lines:
            for tok in line:
                counts.setdefault(tok.word, Counter())[tagset[tok.pos]] += 1
        mapping = {
            w: min(c.items(), key=lambda tc: (-tc[1], tc[0]))[0] for w, c in counts.items()
        }
        return cls(mapping, default_tag)

    def tag(self, word: str) -> str:
        return self.mapping.get(word, self.default_tag)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#default\t{self.default_tag}\n")
            for word in sorted(self.mapping):
                fh.write(f"{word}\t{self.mapping[word]}\n")

    @classmethod
    def load(cls, path):
        mapping = {}
        default_tag = "NOUN"
        with open(path, encoding="utf-8") as fh:
            for row in fh:
                row = row.rstrip("\n")
                if not row:
                    continue
                word, tag = row.split("\t")
                if word == "#default":
                    default_tag = tag
                else:
                    mapping[word] = tag
        return cls(mapping, default_tag)
