"""Batch evaluation of real-time push-notification runs (TREC RTS scenario A)."""

from rts_eval.config import EvalConfig, Windowing
from rts_eval.engine import evaluate_run, evaluate_runs, rank_runs
from rts_eval.models import GroundTruth, Run, ScoreReport

__all__ = [
    "EvalConfig",
    "Windowing",
    "GroundTruth",
    "Run",
    "ScoreReport",
    "evaluate_run",
    "evaluate_runs",
    "rank_runs",
]
