# rts_eval/reusability.py
"""
Test-collection reusability: leave-one-out re-ranking, epoch-file audit and
official-vs-strict comparison.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from functools import partial
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from rts_eval.config import EvalConfig
from rts_eval.engine import RankedRun, evaluate_run, evaluate_runs, rank_runs, rank_scores
from rts_eval.errors import MissingEpochError, UsageError
from rts_eval.ingest import fmt6
from rts_eval.models import EpochMap, GroundTruth, Run
from rts_eval.utils import parallel_map

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


def _opt(x: Optional[float]) -> str:
    return "-" if x is None else fmt6(x)


def _opt_rank(x: Optional[int]) -> str:
    return "-" if x is None else str(x)


# ----------------------------
# Leave-one-out
# ----------------------------

def unique_tweets(target: Run, runs: Sequence[Run]) -> Set[Pair]:
    """(profile, tweet) pairs pushed by `target` and by no other run."""
    others: Set[Pair] = set()
    for r in runs:
        if r is target or r.tag == target.tag:
            continue
        others |= r.pairs
    return set(target.pairs) - others


def reduce_ground_truth(gt: GroundTruth, removed: Iterable[Pair], keep_epochs: bool = False) -> GroundTruth:
    """
    Drop judgments and cluster assignments of `removed`. Unless `keep_epochs`,
    epoch entries go too, except for tweets still judged under some profile.
    """
    removed = set(removed)
    if not removed:
        return gt

    judgments = [j for j in gt.judgments if (j.profile, j.tweet) not in removed]
    clusters = [a for a in gt.clusters if (a.profile, a.tweet) not in removed]
    if keep_epochs:
        epochs = gt.epochs
    else:
        still_judged = {j.tweet for j in judgments}
        gone = {t for _, t in removed} - still_judged
        epochs = EpochMap({t: e for t, e in gt.epochs.items() if t not in gone})
    return GroundTruth.build(judgments, clusters, epochs)


@dataclass(frozen=True)
class LooRow:
    run: str
    orig_rank: int
    loo_rank: int
    orig_score: float
    loo_score: float

    @property
    def delta(self) -> int:
        # positive: the run moves up once its unique tweets are gone
        return self.orig_rank - self.loo_rank


@dataclass(frozen=True)
class LooResult:
    metric: str
    mode: str
    rows: Tuple[LooRow, ...]

    @property
    def mean_delta(self) -> float:
        if not self.rows:
            return 0.0
        return math.fsum(r.delta for r in self.rows) / len(self.rows)

    def to_tsv(self) -> str:
        lines = ["\t".join(("run", "orig_rank", "loo_rank", "delta", "orig_score", "loo_score"))]
        for r in self.rows:
            lines.append(
                "\t".join([r.run, str(r.orig_rank), str(r.loo_rank), str(r.delta), fmt6(r.orig_score), fmt6(r.loo_score)])
            )
        lines.append(f"#mean_delta\t{self.metric}\t{self.mode}\t{fmt6(self.mean_delta)}")
        return "\n".join(lines) + "\n"


def _loo_position(runs: Sequence[Run], gt: GroundTruth, cfg: EvalConfig, metric: str, index: int) -> RankedRun:
    target = runs[index]
    removed = unique_tweets(target, runs)
    gt_i = reduce_ground_truth(gt, removed, keep_epochs=cfg.strict)
    ranking = rank_runs([evaluate_run(r, gt_i, cfg) for r in runs], metric)
    logger.debug("leave-one-out %s: removed %d unique pairs", target.tag, len(removed))
    return next(r for r in ranking if r.tag == target.tag)


def leave_one_out(
    runs: Sequence[Run], gt: GroundTruth, cfg: EvalConfig, metric: str = "EG-1", jobs: int = 1
) -> LooResult:
    if len(runs) < 2:
        raise UsageError("leave-one-out needs at least two runs")
    tags = Counter(r.tag for r in runs)
    dup = sorted(t for t, c in tags.items() if c > 1)
    if dup:
        raise UsageError(f"run tags must be unique: {' '.join(dup)}")

    original = {r.tag: r for r in rank_runs(evaluate_runs(runs, gt, cfg, jobs), metric)}
    positions = parallel_map(partial(_loo_position, list(runs), gt, cfg, metric), range(len(runs)), jobs)

    rows = [
        LooRow(
            run=p.tag,
            orig_rank=original[p.tag].rank,
            loo_rank=p.rank,
            orig_score=original[p.tag].score,
            loo_score=p.score,
        )
        for p in positions
    ]
    rows.sort(key=lambda r: (r.orig_rank, r.run))
    return LooResult(metric=metric, mode=cfg.mode, rows=tuple(rows))


# ----------------------------
# Epoch-file audit
# ----------------------------

@dataclass(frozen=True)
class EpochAudit:
    rows: Tuple[Tuple[str, str, str], ...]  # (run, missing tweet, profile)
    pushes: Dict[str, int]
    missing: Dict[str, int]

    @property
    def clean(self) -> bool:
        return not self.rows

    def fraction(self, run: str) -> float:
        total = self.pushes.get(run, 0)
        return self.missing.get(run, 0) / total if total else 0.0

    def to_tsv(self) -> str:
        lines = ["\t".join(("run", "missing_tweet", "profile"))]
        lines += ["\t".join(r) for r in self.rows]
        for run in sorted(self.pushes):
            lines.append(f"#summary\t{run}\t{self.missing.get(run, 0)}\t{self.pushes[run]}\t{fmt6(self.fraction(run))}")
        return "\n".join(lines) + "\n"


def audit_epoch(gt: GroundTruth, runs: Sequence[Run]) -> EpochAudit:
    rows: List[Tuple[str, str, str]] = []
    pushes: Dict[str, int] = {}
    missing: Dict[str, int] = {}
    for run in runs:
        collapsed = run.collapsed()
        pushes[run.tag] = len(collapsed.pushes)
        gaps = [(run.tag, p.tweet, p.profile) for p in collapsed.pushes if p.tweet not in gt.epochs]
        missing[run.tag] = len(gaps)
        rows.extend(gaps)
    rows.sort()
    if rows:
        logger.warning("epoch file misses %d pushed (profile, tweet) pairs", len(rows))
    return EpochAudit(rows=tuple(rows), pushes=pushes, missing=missing)


# ----------------------------
# Mode and window-basis comparisons
# ----------------------------

@dataclass(frozen=True)
class ModeRow:
    run: str
    strict_score: Optional[float]
    official_score: float
    strict_rank: Optional[int]
    official_rank: int
    error: Optional[str] = None

    @property
    def diff(self) -> Optional[float]:
        if self.strict_score is None:
            return None
        return self.official_score - self.strict_score


def _ranks(ranking: List[RankedRun]) -> Dict[str, int]:
    return {r.tag: r.rank for r in ranking}


def compare_modes(
    runs: Sequence[Run], gt: GroundTruth, cfg: EvalConfig, metric: str = "EG-1"
) -> List[ModeRow]:
    strict_cfg = cfg.model_copy(update={"mode": "strict"})
    official_cfg = cfg.model_copy(update={"mode": "official-2016"})

    strict: Dict[str, Optional[float]] = {}
    errors: Dict[str, str] = {}
    for run in runs:
        try:
            strict[run.tag] = evaluate_run(run, gt, strict_cfg).aggregate(run.tag, metric)
        except MissingEpochError as exc:
            logger.warning("strict evaluation of %s refused: %s", run.tag, exc)
            strict[run.tag] = None
            errors[run.tag] = str(exc)
    official = {run.tag: evaluate_run(run, gt, official_cfg).aggregate(run.tag, metric) for run in runs}

    strict_rank = _ranks(rank_scores({t: s for t, s in strict.items() if s is not None}, metric))
    official_rank = _ranks(rank_scores(official, metric))
    rows = [
        ModeRow(
            run=tag,
            strict_score=strict[tag],
            official_score=official[tag],
            strict_rank=strict_rank.get(tag),
            official_rank=official_rank[tag],
            error=errors.get(tag),
        )
        for tag in official
    ]
    rows.sort(key=lambda r: (r.official_rank, r.run))
    return rows


def modes_to_tsv(rows: Sequence[ModeRow]) -> str:
    lines = ["\t".join(("run", "strict_score", "official_score", "strict_rank", "official_rank", "diff"))]
    for r in rows:
        lines.append(
            "\t".join(
                [r.run, _opt(r.strict_score), fmt6(r.official_score), _opt_rank(r.strict_rank), str(r.official_rank), _opt(r.diff)]
            )
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BasisRow:
    run: str
    creation_score: float
    push_score: float
    creation_rank: int
    push_rank: int


def compare_window_basis(
    runs: Sequence[Run], gt: GroundTruth, cfg: EvalConfig, metric: str = "EG-1", jobs: int = 1
) -> List[BasisRow]:
    """Score and rank of every run under creation-window and push-window attribution."""
    by_creation = rank_runs(evaluate_runs(runs, gt, cfg.model_copy(update={"window_basis": "creation"}), jobs), metric)
    by_push = rank_runs(evaluate_runs(runs, gt, cfg.model_copy(update={"window_basis": "push"}), jobs), metric)
    push_of = {r.tag: r for r in by_push}
    rows = [
        BasisRow(
            run=r.tag,
            creation_score=r.score,
            push_score=push_of[r.tag].score,
            creation_rank=r.rank,
            push_rank=push_of[r.tag].rank,
        )
        for r in by_creation
    ]
    changed = [r.run for r in rows if r.creation_rank != r.push_rank]
    if changed:
        logger.info("window basis changes the rank of %d runs: %s", len(changed), " ".join(changed))
    return rows
