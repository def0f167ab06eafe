# rts_eval/scoring.py
from dataclasses import dataclass
from typing import Dict

from rts_eval.config import EvalConfig, gmp_key


@dataclass(frozen=True)
class WindowCell:
    """
    One (run, profile, window) cell.

    pushed  counted tweets attributed to the window, |T_i(w_j)|
    gain    first-of-cluster tweets attributed here (gain-eligible only)
    z       maximum achievable gain, 0 on a silent window
    pain    counted tweets that are redundant, judged non-relevant or unjudged
    """

    run: str
    profile: str
    window: int
    pushed: int
    gain: int
    z: int
    pain: int

    @property
    def silent(self) -> bool:
        return self.z == 0


def _silent_score(cell: WindowCell, variant: str, cap: int) -> float:
    if variant == "0":
        return 0.0
    if variant == "1":
        return 1.0 if cell.pushed == 0 else 0.0
    if variant == "p":
        # every counted tweet on a silent window is non-relevant
        return max(0.0, (cap - cell.pushed) / cap)
    raise ValueError(f"unknown variant: {variant}")


def eg_score(cell: WindowCell, variant: str, cfg: EvalConfig) -> float:
    if cell.silent:
        return _silent_score(cell, variant, cfg.cap)
    if cell.pushed == 0:
        return 0.0
    return cell.gain / cell.pushed


def ncg_score(cell: WindowCell, variant: str, cfg: EvalConfig) -> float:
    if cell.silent:
        return _silent_score(cell, variant, cfg.cap)
    return cell.gain / cell.z


def gmp_score(cell: WindowCell, alpha: float) -> float:
    return alpha * cell.gain - (1.0 - alpha) * cell.pain


def cell_scores(cell: WindowCell, cfg: EvalConfig) -> Dict[str, float]:
    scores: Dict[str, float] = {}
    for v in cfg.eg_variants:
        scores[f"EG-{v}"] = eg_score(cell, v, cfg)
    for v in cfg.ncg_variants:
        scores[f"nCG-{v}"] = ncg_score(cell, v, cfg)
    for a in cfg.alphas:
        scores[gmp_key(a)] = gmp_score(cell, a)
    return scores
