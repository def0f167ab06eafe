# rts_eval/strategies/sweep.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence, Tuple

from rts_eval.config import EvalConfig
from rts_eval.engine import evaluate_run
from rts_eval.errors import UsageError
from rts_eval.ingest import fmt6
from rts_eval.models import GroundTruth, Run
from rts_eval.strategies import get_strategy
from rts_eval.strategies.base import Strategy
from rts_eval.utils import parallel_map

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ("strategy", "N", "metric", "mean", "runs", "draws", "seed")


@dataclass(frozen=True)
class SweepRow:
    n: int
    mean: float


@dataclass(frozen=True)
class SweepResult:
    strategy: str
    metric: str
    rows: Tuple[SweepRow, ...]
    runs: int
    draws: int = 1
    seed: Optional[int] = None

    def mean_at(self, n: int) -> float:
        for r in self.rows:
            if r.n == n:
                return r.mean
        raise KeyError(n)

    def to_tsv(self) -> str:
        seed = "-" if self.seed is None else str(self.seed)
        lines = ["\t".join(SWEEP_COLUMNS)]
        for r in self.rows:
            lines.append(
                "\t".join([self.strategy, str(r.n), self.metric, fmt6(r.mean), str(self.runs), str(self.draws), seed])
            )
        return "\n".join(lines) + "\n"


def _restricted_score(strategy: Strategy, gt: GroundTruth, cfg: EvalConfig, n: int, metric: str, run: Run) -> float:
    # random: mean over draws first
    variants = strategy.restrict(run, gt, cfg, n)
    scores = [evaluate_run(v, gt, cfg).aggregate(v.tag, metric) for v in variants]
    return math.fsum(scores) / len(scores)


def sweep(
    runs: Sequence[Run],
    gt: GroundTruth,
    cfg: EvalConfig,
    strategy: str,
    metric: str = "EG-1",
    n_min: int = 1,
    n_max: Optional[int] = None,
    seed: int = 0,
    draws: int = 100,
    jobs: int = 1,
) -> SweepResult:
    n_max = cfg.cap if n_max is None else n_max
    if not 1 <= n_min <= n_max <= cfg.cap:
        raise UsageError(f"N range [{n_min}, {n_max}] must lie within [1, {cfg.cap}]")
    if metric not in cfg.metric_keys():
        raise UsageError(f"unknown metric {metric!r} (known: {', '.join(cfg.metric_keys())})")
    if not runs:
        raise UsageError("sweep needs at least one run")

    strat = get_strategy(strategy, seed=seed, draws=draws)
    rows: List[SweepRow] = []
    for n in range(n_min, n_max + 1):
        per_run = parallel_map(partial(_restricted_score, strat, gt, cfg, n, metric), runs, jobs)
        mean = math.fsum(per_run) / len(per_run)
        logger.debug("sweep %s N=%d: %s=%.6f", strat.name, n, metric, mean)
        rows.append(SweepRow(n=n, mean=mean))

    is_random = strat.name == "random"
    return SweepResult(
        strategy=strat.name,
        metric=metric,
        rows=tuple(rows),
        runs=len(runs),
        draws=draws if is_random else 1,
        seed=seed if is_random else None,
    )
