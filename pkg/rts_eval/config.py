from __future__ import annotations

from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

Mode = Literal["strict", "official-2016"]
Variant = Literal["0", "1", "p"]
WindowBasis = Literal["creation", "push"]

VARIANT_ORDER: Tuple[str, ...] = ("0", "1", "p")
DEFAULT_ALPHAS: Tuple[float, ...] = (0.33, 0.50, 0.66)
LATENCY_KEYS: Tuple[str, ...] = ("latency-mean", "latency-median")

# Headline metric per track year (primary marker of the official metric table).
YEAR_PRESETS = {
    2016: "EG-1",
    2017: "EG-p",
}


def normalize_mode(mode: str) -> str:
    m = (mode or "").strip().lower()
    if m in ("official", "official2016", "official-2016"):
        return "official-2016"
    if m == "strict":
        return m
    raise ValueError("mode must be one of: strict | official-2016")


def preset_for_year(year: Optional[int]) -> str:
    if year is None:
        return YEAR_PRESETS[2017]
    if year not in YEAR_PRESETS:
        raise ValueError(f"no preset for year {year} (known: {sorted(YEAR_PRESETS)})")
    return YEAR_PRESETS[year]


def gmp_key(alpha: float) -> str:
    return f"GMP.{int(round(alpha * 100)):02d}"


class Windowing(BaseModel):
    """
    Half-open, contiguous windows:
      w_j = [start + j*len, start + (j+1)*len) for 0 <= j < num_windows
    """

    model_config = ConfigDict(frozen=True)

    start_epoch: int = 0
    window_seconds: int = Field(default=86400, gt=0)
    num_windows: int = Field(default=10, gt=0)

    @property
    def end_epoch(self) -> int:
        return self.start_epoch + self.num_windows * self.window_seconds

    def day_index(self, epoch: int) -> int:
        """Unbounded window index; may be negative or >= num_windows."""
        return (epoch - self.start_epoch) // self.window_seconds

    def window_of(self, epoch: int) -> Optional[int]:
        j = self.day_index(epoch)
        if 0 <= j < self.num_windows:
            return j
        return None


def window_of(epoch: int, w: Windowing) -> Optional[int]:
    """Window index of `epoch`, or None when it falls outside the period."""
    return w.window_of(epoch)


class EvalConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    windowing: Windowing = Field(default_factory=Windowing)
    cap: int = Field(default=10, ge=1)
    alphas: Tuple[float, ...] = DEFAULT_ALPHAS
    mode: Mode = "strict"
    eg_variants: Tuple[Variant, ...] = VARIANT_ORDER
    ncg_variants: Tuple[Variant, ...] = VARIANT_ORDER
    window_basis: WindowBasis = "creation"
    gold_padding: Literal["always", "never"] = "always"

    @field_validator("mode", mode="before")
    @classmethod
    def _mode(cls, v):
        return normalize_mode(v)

    @field_validator("alphas")
    @classmethod
    def _alphas(cls, v):
        if not v:
            raise ValueError("at least one alpha is required")
        for a in v:
            if not 0.0 < a < 1.0:
                raise ValueError(f"alpha must be strictly between 0 and 1 (got {a})")
        return tuple(dict.fromkeys(v))

    @field_validator("eg_variants", "ncg_variants")
    @classmethod
    def _variants(cls, v):
        return tuple(x for x in VARIANT_ORDER if x in set(v))

    @property
    def strict(self) -> bool:
        return self.mode == "strict"

    def gain_keys(self) -> list[str]:
        keys = [f"EG-{v}" for v in self.eg_variants]
        keys += [f"nCG-{v}" for v in self.ncg_variants]
        keys += [gmp_key(a) for a in self.alphas]
        return keys

    def metric_keys(self) -> list[str]:
        return self.gain_keys() + list(LATENCY_KEYS)


def is_lower_better(metric: str) -> bool:
    return metric.startswith("latency")
