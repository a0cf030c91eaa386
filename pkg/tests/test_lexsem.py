import random
from collections import Counter

import numpy as np
import pytest

from cxgminer.corpus import Line, TaggedToken, Tagset
from cxgminer.lexsem import (
    EmbeddingFormatError, LookupTagger, build_lexicon, default_min_count,
    load_clusters, load_embeddings, load_lexicon, resolve_tokens, save_clusters,
    save_lexicon, split_by_pos, xmeans_cluster, _global_bic,
)


def lines_from_words(words):
    toks = [TaggedToken(w, 0) for w in words]
    return [Line(toks[i:i + 100]) for i in range(0, len(toks), 100)]


class TestLexicon:
    def test_threshold_boundary(self):
        lex = build_lexicon(lines_from_words(["a", "a", "b"]), 2)
        assert "a" in lex and "b" not in lex
        assert lex.entries["a"][1] == 2

    def test_scaled_threshold_matches_independent_recount(self):
        rng = random.Random(0)
        words = [f"w{rng.randrange(300)}" for _ in range(20000)]
        threshold = default_min_count(int(1e7) )
        assert threshold == 5  # ceil(500 * 1e7 / 1e9)
        lex = build_lexicon(lines_from_words(words), threshold)
        oracle = {w for w, c in Counter(words).items() if c >= threshold}
        assert set(lex.entries) == oracle

    def test_empty_corpus_empty_lexicon(self):
        lex = build_lexicon([], 2)
        assert lex.size == 0

    def test_monotone_in_threshold(self):
        words = ["a"] * 5 + ["b"] * 3 + ["c"]
        low = build_lexicon(lines_from_words(words), 2)
        high = build_lexicon(lines_from_words(words), 4)
        assert set(high.entries) <= set(low.entries)

    def test_ids_dense_and_round_trip(self, tmp_path):
        lex = build_lexicon(lines_from_words(["b", "b", "a", "a", "a"]), 1)
        assert sorted(i for i, _ in lex.entries.values()) == list(range(lex.size))
        save_lexicon(lex, tmp_path / "lex.tsv")
        again = load_lexicon(tmp_path / "lex.tsv")
        assert again.entries == lex.entries

    def test_default_min_count_billion_word_rate(self):
        assert default_min_count(int(1e9)) == 500


class TestLoadEmbeddings:
    def write(self, tmp_path, text):
        p = tmp_path / "emb.txt"
        p.write_text(text)
        return p

    def lexicon(self, *words):
        return build_lexicon(lines_from_words([w for w in words for _ in range(2)]), 1)

    def test_direct_parse(self, tmp_path):
        p = self.write(tmp_path, "2 3\ndog_NOUN 0.1 0.2 0.3\nrun_VERB 1 0 0\n")
        table = load_embeddings(p, self.lexicon("dog", "run"), Tagset())
        assert len(table) == 2 and table.dim == 3

    def test_short_vector_names_key(self, tmp_path):
        p = self.write(tmp_path, "1 3\ndog_NOUN 0.1 0.2\n")
        with pytest.raises(EmbeddingFormatError, match="dog_NOUN"):
            load_embeddings(p, self.lexicon("dog"), Tagset())

    def test_non_numeric_field(self, tmp_path):
        p = self.write(tmp_path, "1 2\ndog_NOUN 0.1 oops\n")
        with pytest.raises(EmbeddingFormatError, match="dog_NOUN"):
            load_embeddings(p, self.lexicon("dog"), Tagset())

    def test_restricts_to_lexicon_intersection(self, tmp_path):
        rng = random.Random(1)
        keys = [f"word{i:04d}" for i in range(1000)]
        in_lex = set(rng.sample(keys, 400))
        body = "".join(f"{k}_NOUN 0.5 0.5\n" for k in keys)
        p = self.write(tmp_path, f"1000 2\n{body}")
        table = load_embeddings(p, self.lexicon(*in_lex), Tagset())
        assert {w for w, _ in table.keys} == in_lex


class TestXMeans:
    def test_two_separated_masses(self):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(0, 0.05, (40, 2)), rng.normal(10, 0.05, (40, 2))])
        labels = xmeans_cluster(X, 2, 10, seed=1)
        assert len(set(labels[:40])) == 1
        assert len(set(labels[40:])) == 1
        assert labels[0] != labels[40]

    def test_three_blobs_recovered(self):
        from sklearn.metrics import adjusted_rand_score
        rng = np.random.default_rng(42)
        centers = rng.normal(0, 10, (3, 10))
        X = np.vstack([c + rng.normal(0, 0.3, (100, 10)) for c in centers])
        truth = np.repeat(np.arange(3), 100)
        labels = xmeans_cluster(X, 2, 16, seed=7)
        assert len(set(labels.tolist())) == 3
        assert adjusted_rand_score(truth, labels) >= 0.9

    def test_duplicated_points_stay_at_k_min(self):
        X = np.vstack([np.tile([0.0, 0.0], (20, 1)), np.tile([5.0, 5.0], (20, 1))])
        labels = xmeans_cluster(X, 2, 8, seed=3)
        assert len(set(labels.tolist())) == 2
        assert len(set(labels[:20])) == 1 and len(set(labels[20:])) == 1

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        X = rng.normal(0, 1, (80, 4))
        a = xmeans_cluster(X, 2, 12, seed=11)
        b = xmeans_cluster(X, 2, 12, seed=11)
        assert np.array_equal(a, b)

    def test_fewer_points_than_k_min_errors(self):
        with pytest.raises(ValueError):
            xmeans_cluster(np.zeros((1, 2)), 2, 4, seed=0)

    def test_bic_of_chosen_k_beats_forced_bounds(self):
        rng = np.random.default_rng(9)
        centers = rng.normal(0, 8, (4, 6))
        X = np.vstack([c + rng.normal(0, 0.2, (50, 6)) for c in centers])

        def bic_of(labels):
            clusters = [np.flatnonzero(labels == j) for j in sorted(set(labels.tolist()))]
            return _global_bic(X, clusters)

        chosen = xmeans_cluster(X, 2, 12, seed=2)
        at_k_min = xmeans_cluster(X, 2, 12, seed=2, force_k=2)
        at_k_max = xmeans_cluster(X, 2, 12, seed=2, force_k=12)
        assert bic_of(chosen) >= bic_of(at_k_min) - 1e-9
        assert bic_of(chosen) >= bic_of(at_k_max) - 1e-9


class TestSplitByPos:
    def test_mixed_cluster_splits(self):
        keys = [("dog", 7), ("cat", 7), ("bark", 13)]
        inv = split_by_pos(keys, [0, 0, 0])
        assert inv.n_clusters == 2
        assert inv.get("dog", 7) == inv.get("cat", 7)
        assert inv.get("bark", 13) != inv.get("dog", 7)

    def test_pure_cluster_unchanged(self):
        keys = [("dog", 7), ("cat", 7)]
        inv = split_by_pos(keys, [0, 0])
        assert inv.n_clusters == 1

    def test_pos_purity_property(self):
        rng = random.Random(3)
        keys = [(f"w{i}", rng.randrange(5)) for i in range(200)]
        labels = [rng.randrange(8) for _ in keys]
        inv = split_by_pos(keys, labels)
        by_cluster = {}
        for (word, pos), cid in inv.assignment.items():
            by_cluster.setdefault(cid, set()).add(pos)
        assert all(len(poses) == 1 for poses in by_cluster.values())
        assert inv.n_clusters >= len(set(labels))

    def test_round_trip(self, tmp_path):
        keys = [("dog", 7), ("cat", 7), ("bark", 13)]
        inv = split_by_pos(keys, [0, 0, 0])
        save_clusters(inv, Tagset(), tmp_path / "c.tsv")
        again = load_clusters(tmp_path / "c.tsv", Tagset())
        assert again.assignment == inv.assignment


class TestResolveTokens:
    def test_known_token_gets_both_fields(self):
        lex = build_lexicon(lines_from_words(["gave", "gave"]), 1)
        inv = split_by_pos([("gave", 13)], [0])
        line = Line([TaggedToken("gave", 13)])
        resolve_tokens([line], lex, inv)
        tok = line.tokens[0]
        assert tok.lex == lex.id_of("gave")
        assert tok.cluster == inv.get("gave", 13)

    def test_unknown_token_gets_neither(self):
        lex = build_lexicon(lines_from_words(["gave"]), 1)
        inv = split_by_pos([("gave", 13)], [0])
        line = Line([TaggedToken("zyx", 7)])
        resolve_tokens([line], lex, inv)
        assert line.tokens[0].lex is None and line.tokens[0].cluster is None

    def test_matches_per_token_lookup_oracle(self):
        rng = random.Random(8)
        vocab = [f"w{i}" for i in range(60)]
        words = [rng.choice(vocab) for _ in range(1000)]
        lex = build_lexicon(lines_from_words(words), 5)
        keys = [(w, i % 4) for i, w in enumerate(vocab) if w in lex]
        inv = split_by_pos(keys, [i % 6 for i in range(len(keys))])
        lines = [Line([TaggedToken(w, i % 4) for i, w in enumerate(words[:100])])]
        resolve_tokens(lines, lex, inv)
        for i, tok in enumerate(lines[0]):
            assert tok.lex == (lex.id_of(tok.word) if tok.word in lex else None)
            assert tok.cluster == inv.assignment.get((tok.word, tok.pos))


class TestLookupTagger:
    def test_most_frequent_tag_wins(self):
        tagset = Tagset()
        lines = [Line([
            TaggedToken("run", tagset.id_of("VERB")),
            TaggedToken("run", tagset.id_of("VERB")),
            TaggedToken("run", tagset.id_of("NOUN")),
        ])]
        tagger = LookupTagger.from_tagged_lines(lines, tagset)
        assert tagger.tag("run") == "VERB"
        assert tagger.tag("unseen") == "NOUN"

    def test_round_trip(self, tmp_path):
        tagger = LookupTagger({"a": "DET", "dog": "NOUN"}, "PROPN")
        tagger.save(tmp_path / "t.tsv")
        again = LookupTagger.load(tmp_path / "t.tsv")
        assert again.mapping == tagger.mapping
        assert again.default_tag == "PROPN"
