# rts_eval/strategies/base.py
from abc import ABC, abstractmethod
from typing import List

from rts_eval.config import EvalConfig
from rts_eval.errors import UsageError
from rts_eval.models import GroundTruth, Run


class Strategy(ABC):
    """Restricts a run to at most n pushes per (profile, push-day) group."""

    name: str = ""

    @abstractmethod
    def restrict(self, run: Run, gt: GroundTruth, cfg: EvalConfig, n: int) -> List[Run]:
        """One restricted run per draw; deterministic strategies return a single run."""


def check_n(n: int, cfg: EvalConfig) -> None:
    if not 1 <= n <= cfg.cap:
        raise UsageError(f"N must be in [1, {cfg.cap}] (got {n})")
