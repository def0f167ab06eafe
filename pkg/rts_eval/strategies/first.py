# rts_eval/strategies/first.py
from typing import List

from rts_eval.config import EvalConfig
from rts_eval.engine import truncate_groups
from rts_eval.models import GroundTruth, Run
from rts_eval.strategies.base import Strategy, check_n


def restrict_first(run: Run, gt: GroundTruth, cfg: EvalConfig, n: int) -> Run:
    """Earliest n pushes of each (profile, push-day) group."""
    check_n(n, cfg)
    run = run.collapsed()
    kept, _ = truncate_groups(run.pushes, cfg, gt.epochs, n)
    return run.with_pushes(kept)


class FirstStrategy(Strategy):
    name = "first"

    def restrict(self, run: Run, gt: GroundTruth, cfg: EvalConfig, n: int) -> List[Run]:
        return [restrict_first(run, gt, cfg, n)]
