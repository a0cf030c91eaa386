"""Flat key = value pipeline configuration."""

from __future__ import annotations

from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    pass


def _parse_grid(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


DEFAULT_DP_GRID = [round(0.05 * i, 2) for i in range(1, 11)]


@dataclass
class PipelineConfig:
    """All knobs for a pipeline run. Every threshold left at 0 is auto-scaled
    from the corpus size; the seed has no entropy default and must be set."""

    corpus: str = ""            # tagged corpus path (word<TAB>TAG), or raw text with raw=true
    embeddings: str = ""        # text embedding file, header "N D"
    out: str = "out"            # artifact directory
    tagger: str = ""            # lookup tagger TSV, required when raw=true
    raw: bool = False
    seed: int = 0
    chunk_lines: int = 1000     # lines per chunk (100 words each)
    proportions: tuple = (20, 5, 1, 1)
    min_count: int = 0          # lexicon threshold; 0 = scale 500-per-1e9-words
    k_min: int = 2
    k_max: int = 1024
    min_pair_count: int = 0     # association bound; 0 = scale 10-per-1e7-pairs
    dp_grid: list = field(default_factory=lambda: list(DEFAULT_DP_GRID))
    dp_threshold: float = 0.0   # 0 = pick by grid search
    freq_threshold: int = 0     # 0 = scale max(5, 2e-6 * tokens)
    top_n: int = 25000
    tabu_block: int = 10
    tabu_proposals: int = 20
    tabu_tenure: int = 10
    tabu_patience: int = 50

    def validate(self):
        if not self.corpus:
            raise ConfigError("corpus path is required")
        if self.raw and not self.tagger:
            raise ConfigError("raw corpus input requires a tagger file")
        if self.chunk_lines < 1:
            raise ConfigError("chunk_lines must be >= 1")
        if not (2 <= self.k_min <= self.k_max):
            raise ConfigError("need 2 <= k_min <= k_max")
        if self.top_n < 1:
            raise ConfigError("top_n must be >= 1")
        if self.dp_threshold and not -1.0 < self.dp_threshold < 1.0:
            raise ConfigError("dp_threshold must lie in (-1, 1)")
        for name in ("tabu_block", "tabu_proposals", "tabu_tenure", "tabu_patience"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        return self


_CONVERTERS = {
    "raw": lambda v: v.lower() in ("1", "true", "yes"),
    "proportions": lambda v: tuple(int(x) for x in v.replace(",", " ").split()),
    "dp_grid": _parse_grid,
}


def load_config(path) -> PipelineConfig:
    known = {f.name: f.type for f in fields(PipelineConfig)}
    cfg = PipelineConfig()
    with open(path, encoding="utf-8") as fh:
        for lineno, row in enumerate(fh, start=1):
            row = row.split("#", 1)[0].strip()
            if not row:
                continue
            if "=" not in row:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in row.split("=", 1))
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in _CONVERTERS:
                parsed = _CONVERTERS[key](value)
            else:
                current = getattr(cfg, key)
                if isinstance(current, bool):
                    parsed = value.lower() in ("1", "true", "yes")
                elif isinstance(current, int):
                    parsed = int(value)
                elif isinstance(current, float):
                    parsed = float(value)
                else:
                    parsed = value
            setattr(cfg, key, parsed)
    return cfg.validate()


def save_config(cfg: PipelineConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for f in fields(PipelineConfig):
            value = getattr(cfg, f.name)
            if isinstance(value, (tuple, list)):
                value = " ".join(str(v) for v in value)
            fh.write(f"{f.name} = {value}\n")
