"""End-to-end orchestration: ingest, inventories, divisions, per-fold
learning, merging, evaluation, and the two-model comparison."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from scipy import stats as scipy_stats

from . import association, candidates as cand_mod, lexsem, mdl, search
from .candidates import ASSOCIATION, FREQUENCY
from .config import PipelineConfig
from .corpus import Line, Tagset, assign_divisions, chunk_lines, ingest_tagged, normalize_and_segment
from .grammar import Grammar, Inventories, save_grammar
from .search import TabuConfig


class StageError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


@dataclass
class ModeResult:
    grammar: Grammar
    reports: list[mdl.MdlReport]

    @property
    def mean_compression(self) -> float:
        return sum(r.compression for r in self.reports) / len(self.reports)


def paired_t_test(xs, ys):
    """Two-sided paired t statistic and p-value; zero variance is guarded."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need two equal-length samples of size >= 2")
    diffs = [x - y for x, y in zip(xs, ys)]
    n = len(diffs)
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        return 0.0 if mean == 0.0 else float("inf"), 1.0 if mean == 0.0 else 0.0
    t = mean / (var / n) ** 0.5
    p = 2.0 * float(scipy_stats.t.sf(abs(t), n - 1))
    return t, p


class Pipeline:
    """Runs pipeline stages in order, persisting every intermediate artifact.

    All stages are recomputed deterministically from the config on each run,
    so deleting an artifact and rerunning reproduces it byte for byte.
    """

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg.validate()
        self.tagset = Tagset()
        self._prepared = False

    # -- stage 1: ingestion ------------------------------------------------

    def out_path(self, name):
        os.makedirs(self.cfg.out, exist_ok=True)
        return os.path.join(self.cfg.out, name)

    def ingest(self) -> list[Line]:
        cfg = self.cfg
        if not os.path.exists(cfg.corpus):
            raise StageError("ingest", f"corpus file not found: {cfg.corpus}")
        if cfg.raw:
            if not os.path.exists(cfg.tagger):
                raise StageError("ingest", f"tagger file not found: {cfg.tagger}")
            tagger = lexsem.LookupTagger.load(cfg.tagger)
            with open(cfg.corpus, encoding="utf-8", errors="replace") as fh:
                token_lines = normalize_and_segment(fh.read())
            lines = []
            from .corpus import TaggedToken
            for toks in token_lines:
                lines.append(Line([
                    TaggedToken(w, self.tagset.id_of(tagger.tag(w))) for w in toks
                ]))
        else:
            lines, skipped = ingest_tagged(cfg.corpus, self.tagset)
            if skipped:
                print(f"warning: skipped {skipped} rows with empty normalized words")
        return lines

    # -- stages 2-4: inventories, divisions, resolution --------------------

    def prepare(self):
        if self._prepared:
            return
        cfg = self.cfg
        if cfg.embeddings and not os.path.exists(cfg.embeddings):
            raise StageError("prepare", f"embeddings file not found: {cfg.embeddings}")

        self.lines = self.ingest()
        self.n_tokens = sum(len(l) for l in self.lines)
        if self.n_tokens == 0:
            raise StageError("prepare", "corpus is empty after normalization")

        self.chunks = chunk_lines(self.lines, cfg.chunk_lines)
        self.divisions = assign_divisions(len(self.chunks), cfg.proportions, cfg.seed)
        with open(self.out_path("divisions.json"), "w", encoding="utf-8") as fh:
            json.dump({
                "background": sorted(self.divisions.background),
                "potentials_folds": self.divisions.potentials_folds,
                "optimizing": sorted(self.divisions.optimizing),
                "evaluation": [sorted(s) for s in self.divisions.evaluation],
            }, fh, sort_keys=True, indent=2)

        min_count = cfg.min_count or lexsem.default_min_count(self.n_tokens)
        self.lexicon = lexsem.build_lexicon(self.lines, min_count)
        lexsem.save_lexicon(self.lexicon, self.out_path("lexicon.tsv"))

        if cfg.embeddings:
            table = lexsem.load_embeddings(cfg.embeddings, self.lexicon, self.tagset)
            if len(table) < cfg.k_min:
                raise StageError("prepare", f"only {len(table)} embedding keys; k_min={cfg.k_min}")
            k_max = min(cfg.k_max, len(table))
            labels = lexsem.xmeans_cluster(table, cfg.k_min, k_max, cfg.seed)
            self.inventory = lexsem.split_by_pos(table.keys, labels)
        else:
            self.inventory = lexsem.ClusterInventory({}, 0, {})
        lexsem.save_clusters(self.inventory, self.tagset, self.out_path("clusters.tsv"))

        lexsem.resolve_tokens(self.lines, self.lexicon, self.inventory)
        self.inventories = Inventories(
            self.lexicon.names(), self.tagset.names, max(self.inventory.n_clusters, 1)
        )
        self._prepared = True

    def lines_for(self, chunk_ids) -> list[Line]:
        return [line for cid in sorted(chunk_ids) for line in self.chunks[cid]]

    # -- stage 5: background statistics ------------------------------------

    def background_table(self) -> association.AssociationTable:
        self.prepare()
        counts = association.count_pairs(self.lines_for(self.divisions.background))
        bound = self.cfg.min_pair_count or association.default_min_pair_count(counts.total)
        table = association.build_table(counts, bound)
        association.save_table(table, self.inventories, self.out_path("background_table.tsv"))
        return table

    # -- stage 6: threshold grid search ------------------------------------

    def pick_dp_threshold(self, table=None) -> float:
        cfg = self.cfg
        if cfg.dp_threshold:
            return cfg.dp_threshold
        self.prepare()
        if table is None:
            table = self.background_table()
        gen_lines = self.lines_for(self.divisions.potentials)
        dev_lines = self.lines_for(self.divisions.optimizing)
        best, results = cand_mod.grid_search_dp(
            gen_lines, dev_lines, table, cfg.dp_grid, self.inventories, cfg.top_n
        )
        with open(self.out_path("gridsearch.json"), "w", encoding="utf-8") as fh:
            json.dump({"best": best, "compression": {str(k): v for k, v in results.items()}},
                      fh, sort_keys=True, indent=2)
        return best

    # -- stages 7-9: folds, merge, evaluation ------------------------------

    def fold_candidates(self, mode: str, dp_threshold: float | None = None):
        """Per-fold candidate sets (and their fold-local association tables)."""
        self.prepare()
        cfg = self.cfg
        out = []
        for f, chunk_ids in enumerate(self.divisions.potentials_folds):
            lines = self.lines_for(chunk_ids)
            counts = association.count_pairs(lines)
            bound = cfg.min_pair_count or association.default_min_pair_count(counts.total)
            table = association.build_table(counts, bound)
            if mode == FREQUENCY:
                thr = cfg.freq_threshold or max(5, round(2e-6 * self.n_tokens))
                cand = cand_mod.frequency_pipeline(lines, table, thr)
            else:
                cand = cand_mod.association_pipeline(lines, table, dp_threshold, cfg.top_n)
            cand_mod.save_candidates(cand, self.inventories,
                                     self.out_path(f"candidates_{mode}_fold{f}.tsv"))
            out.append(cand)
        return out

    def run_mode(self, mode: str) -> ModeResult:
        if mode not in (FREQUENCY, ASSOCIATION):
            raise ValueError(f"unknown mode {mode!r}")
        self.prepare()
        cfg = self.cfg
        dp = self.pick_dp_threshold() if mode == ASSOCIATION else None
        fold_cands = self.fold_candidates(mode, dp)
        opt_lines = self.lines_for(self.divisions.optimizing)

        grammars = []
        for f, cand in enumerate(fold_cands):
            tconf = TabuConfig(cfg.tabu_block, cfg.tabu_proposals, cfg.tabu_tenure,
                               cfg.tabu_patience, cfg.seed + f)
            g = search.tabu_search(cand, opt_lines, self.inventories, tconf,
                                   self.out_path(f"trace_{mode}_fold{f}.tsv"))
            save_grammar(g, self.out_path(f"grammar_{mode}_fold{f}.tsv"))
            grammars.append(g)

        merged = search.merge_grammars(grammars)
        save_grammar(merged, self.out_path(f"grammar_{mode}.tsv"))

        reports = []
        for i, eval_ids in enumerate(self.divisions.evaluation):
            report = mdl.score(merged, self.lines_for(eval_ids))
            with open(self.out_path(f"report_{mode}_eval{i}.json"), "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
            reports.append(report)
        return ModeResult(merged, reports)

    # -- stage 10: comparison ----------------------------------------------

    def compare(self) -> dict:
        freq = self.run_mode(FREQUENCY)
        assoc = self.run_mode(ASSOCIATION)
        t, p = paired_t_test(
            [r.compression for r in freq.reports],
            [r.compression for r in assoc.reports],
        )
        result = {
            "frequency": {
                "per_set_compression": [r.compression for r in freq.reports],
                "mean_compression": freq.mean_compression,
                "grammar_size": len(freq.grammar),
            },
            "association": {
                "per_set_compression": [r.compression for r in assoc.reports],
                "mean_compression": assoc.mean_compression,
                "grammar_size": len(assoc.grammar),
            },
            "t_statistic": t if t != float("inf") else "inf",
            "p_value": p,
        }
        with open(self.out_path("comparison.json"), "w", encoding="utf-8") as fh:
            json.dump(result, fh, sort_keys=True, indent=2)
        with open(self.out_path("comparison.txt"), "w", encoding="utf-8") as fh:
            fh.write(f"{'model':<14}{'compression':>14}{'p':>10}\n")
            fh.write(f"{'frequency':<14}{100 * freq.mean_compression:>13.2f}%{'':>10}\n")
            fh.write(f"{'association':<14}{100 * assoc.mean_compression:>13.2f}%{p:>10.4f}\n")
        return result
