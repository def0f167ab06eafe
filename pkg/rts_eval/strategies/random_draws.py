# rts_eval/strategies/random_draws.py
from __future__ import annotations

from typing import List

from rts_eval.config import EvalConfig
from rts_eval.engine import group_by_push_day
from rts_eval.errors import UsageError
from rts_eval.models import GroundTruth, PushRecord, Run
from rts_eval.strategies.base import Strategy, check_n
from rts_eval.utils import rng_stream


def restrict_random(run: Run, gt: GroundTruth, cfg: EvalConfig, n: int, seed: int, draws: int) -> List[Run]:
    """
    `draws` independent uniform n-subsets per (profile, push-day) group.
    Each group draws from its own stream keyed by (seed, draw, profile, day).
    """
    check_n(n, cfg)
    if draws < 1:
        raise UsageError(f"draws must be >= 1 (got {draws})")
    run = run.collapsed()
    groups = group_by_push_day(run.pushes, cfg, gt.epochs)

    out: List[Run] = []
    for d in range(draws):
        kept: List[PushRecord] = []
        for (profile, day), group in groups.items():
            if len(group) <= n:
                kept.extend(group)
                continue
            rng = rng_stream(seed, d, profile, str(day))
            idx = rng.choice(len(group), size=n, replace=False)
            kept.extend(group[i] for i in sorted(int(i) for i in idx))
        out.append(run.with_pushes(kept))
    return out


class RandomStrategy(Strategy):
    name = "random"

    def __init__(self, seed: int = 0, draws: int = 100):
        self.seed = seed
        self.draws = draws

    def restrict(self, run: Run, gt: GroundTruth, cfg: EvalConfig, n: int) -> List[Run]:
        return restrict_random(run, gt, cfg, n, self.seed, self.draws)
