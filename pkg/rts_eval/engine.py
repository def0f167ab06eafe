# rts_eval/engine.py
"""
Evaluation pipeline for one run:

  collapse -> enforce_cap -> assign_windows -> classify -> cells -> aggregates

Cluster-first status is decided per profile across the whole period in push
order; gains are then attributed to the scoring window of each tweet
(creation window by default).
"""
from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from rts_eval.config import EvalConfig, is_lower_better
from rts_eval.errors import MissingEpochError
from rts_eval.models import (
    CellRow,
    ClusterId,
    GroundTruth,
    ProfileLatency,
    PushRecord,
    Run,
    RunAggregate,
    ScoreReport,
)
from rts_eval.scoring import WindowCell, cell_scores
from rts_eval.utils import order_key, parallel_map

logger = logging.getLogger(__name__)


class Status(str, Enum):
    RELEVANT_NEW = "relevant-new"
    REDUNDANT = "redundant"
    JUDGED_NONRELEVANT = "judged-nonrelevant"
    UNJUDGED = "unjudged"


PAIN_STATUSES = frozenset({Status.REDUNDANT, Status.JUDGED_NONRELEVANT, Status.UNJUDGED})


@dataclass(frozen=True)
class Placement:
    push: PushRecord
    creation_epoch: int
    creation_window: Optional[int]
    push_window: Optional[int]
    window: int


@dataclass(frozen=True)
class TweetVerdict:
    tweet: str
    profile: str
    creation_window: Optional[int]
    push_window: Optional[int]
    window: int
    push_epoch: int
    creation_epoch: int
    status: Status
    cluster: Optional[ClusterId] = None
    over_cap: bool = False

    @property
    def gains(self) -> bool:
        return self.status is Status.RELEVANT_NEW and not self.over_cap


@dataclass(frozen=True)
class CapReport:
    mode: str
    cap: int
    removed: Tuple[PushRecord, ...] = ()
    over_cap: FrozenSet[Tuple[str, str]] = frozenset()
    violations: Tuple[Tuple[str, int, int], ...] = ()  # (profile, day, pushes)


@dataclass(frozen=True)
class WindowAssignment:
    placements: Tuple[Placement, ...]
    dropped: Tuple[Tuple[str, str, str], ...] = ()  # (profile, tweet, reason)

    def lists(self) -> Dict[Tuple[str, int], List[str]]:
        """T_i(w_j) per (profile, window), in push order."""
        out: Dict[Tuple[str, int], List[str]] = defaultdict(list)
        for pl in self.placements:
            out[(pl.push.profile, pl.window)].append(pl.push.tweet)
        return dict(out)


@dataclass(frozen=True)
class LatencyResult:
    run: str
    per_profile: Tuple[ProfileLatency, ...]
    mean: float
    median: float

    @property
    def flagged(self) -> Tuple[str, ...]:
        return tuple(p.profile for p in self.per_profile if p.flagged)


@dataclass(frozen=True)
class RankedRun:
    rank: int
    tag: str
    score: float


# ----------------------------
# Cap (setting S1)
# ----------------------------

def group_by_push_day(
    pushes: Iterable[PushRecord], cfg: EvalConfig, epochs: Mapping[str, int]
) -> Dict[Tuple[str, int], List[PushRecord]]:
    groups: Dict[Tuple[str, int], List[PushRecord]] = defaultdict(list)
    for p in pushes:
        groups[(p.profile, cfg.windowing.day_index(p.push_epoch))].append(p)
    for g in groups.values():
        g.sort(key=lambda p: order_key(p, epochs))
    return dict(sorted(groups.items()))


def truncate_groups(
    pushes: Iterable[PushRecord], cfg: EvalConfig, epochs: Mapping[str, int], n: int
) -> Tuple[List[PushRecord], List[PushRecord]]:
    """First n pushes of every (profile, push-day) group; returns (kept, overflow)."""
    kept: List[PushRecord] = []
    overflow: List[PushRecord] = []
    for group in group_by_push_day(pushes, cfg, epochs).values():
        kept.extend(group[:n])
        overflow.extend(group[n:])
    return kept, overflow


def enforce_cap(run: Run, cfg: EvalConfig, epochs: Optional[Mapping[str, int]] = None) -> Tuple[Run, CapReport]:
    epochs = epochs if epochs is not None else {}
    groups = group_by_push_day(run.pushes, cfg, epochs)
    violations = tuple((p, d, len(g)) for (p, d), g in groups.items() if len(g) > cfg.cap)
    if not violations:
        return run, CapReport(mode=cfg.mode, cap=cfg.cap)

    overflow = [push for g in groups.values() for push in g[cfg.cap:]]
    if cfg.strict:
        logger.warning(
            "run %s: %d (profile, day) groups exceed N=%d; truncated %d pushes",
            run.tag, len(violations), cfg.cap, len(overflow),
        )
        dropped = {p.key for p in overflow}
        kept = [p for p in run.pushes if p.key not in dropped]
        return run.with_pushes(kept), CapReport(cfg.mode, cfg.cap, removed=tuple(overflow), violations=violations)

    logger.warning(
        "run %s: %d (profile, day) groups exceed N=%d; %d pushes counted without gain (official-2016)",
        run.tag, len(violations), cfg.cap, len(overflow),
    )
    return run, CapReport(cfg.mode, cfg.cap, over_cap=frozenset(p.key for p in overflow), violations=violations)


# ----------------------------
# Window assignment (setting S2)
# ----------------------------

def assign_windows(run: Run, gt: GroundTruth, cfg: EvalConfig) -> WindowAssignment:
    w = cfg.windowing
    judged = set(gt.profiles)
    placements: List[Placement] = []
    dropped: List[Tuple[str, str, str]] = []
    missing: List[Tuple[str, str]] = []
    early: List[Tuple[str, str]] = []
    unknown_profiles: Set[str] = set()

    for push in run.pushes:
        if push.profile not in judged:
            unknown_profiles.add(push.profile)
            continue
        creation = gt.epochs.get(push.tweet)
        if creation is None:
            if cfg.strict:
                missing.append(push.key)
            else:
                dropped.append((push.profile, push.tweet, "no-epoch"))
            continue
        if cfg.strict and push.push_epoch < creation:
            early.append(push.key)
            continue

        cw = w.window_of(creation)
        pw = w.window_of(push.push_epoch)
        window = cw if cfg.window_basis == "creation" else pw
        if window is None:
            dropped.append((push.profile, push.tweet, "outside-period"))
            continue
        placements.append(Placement(push, creation, cw, pw, window))

    if unknown_profiles:
        logger.warning(
            "run %s: skipping %d profiles absent from the ground truth: %s",
            run.tag, len(unknown_profiles), " ".join(sorted(unknown_profiles)),
        )
    if missing or early:
        raise MissingEpochError(run.tag, missing, early)

    reasons = Counter(r for _, _, r in dropped)
    if reasons.get("outside-period"):
        logger.warning("run %s: dropped %d pushes outside the evaluation period", run.tag, reasons["outside-period"])
    if reasons.get("no-epoch"):
        logger.warning("run %s: ignored %d pushed tweets absent from the epoch file", run.tag, reasons["no-epoch"])

    placements.sort(key=lambda pl: (pl.push.profile, order_key(pl.push, gt.epochs)))
    return WindowAssignment(placements=tuple(placements), dropped=tuple(dropped))


# ----------------------------
# Relevance (system-dependent)
# ----------------------------

def classify(
    assignment: WindowAssignment,
    gt: GroundTruth,
    cfg: EvalConfig,
    over_cap: FrozenSet[Tuple[str, str]] = frozenset(),
) -> List[TweetVerdict]:
    claimed: Set[ClusterId] = set()
    verdicts: List[TweetVerdict] = []

    for pl in assignment.placements:
        push = pl.push
        cluster = gt.cluster(push.profile, push.tweet)
        grade = gt.grade(push.profile, push.tweet)

        if grade is None:
            status = Status.UNJUDGED
        elif cluster is not None and grade >= 1:
            if cluster in claimed:
                status = Status.REDUNDANT
            else:
                # over-cap pushes earn nothing, so they leave the cluster unclaimed
                if push.key not in over_cap:
                    claimed.add(cluster)
                status = Status.RELEVANT_NEW
        else:
            # relevant-but-unclustered tweets carry no gain either
            status = Status.JUDGED_NONRELEVANT

        verdicts.append(
            TweetVerdict(
                tweet=push.tweet,
                profile=push.profile,
                creation_window=pl.creation_window,
                push_window=pl.push_window,
                window=pl.window,
                push_epoch=push.push_epoch,
                creation_epoch=pl.creation_epoch,
                status=status,
                cluster=cluster,
                over_cap=push.key in over_cap,
            )
        )
    return verdicts


# ----------------------------
# Cell quantities
# ----------------------------

def window_gain(verdicts: Iterable[TweetVerdict]) -> int:
    return sum(1 for v in verdicts if v.gains)


def max_gain_z(
    profile: str,
    window: int,
    retrieved_before: Set[ClusterId],
    gt: GroundTruth,
    cfg: EvalConfig,
    gain: int = 0,
) -> int:
    """
    min(N, clusters with a tweet created in `window` not retrieved earlier),
    lifted to `gain` when window reassignment gathered more than N gains.
    """
    w = cfg.windowing
    fresh = 0
    for c in gt.clusters_by_profile.get(profile, ()):
        if c in retrieved_before:
            continue
        for t in gt.members[c]:
            e = gt.epochs.get(t)
            if e is not None and w.window_of(e) == window:
                fresh += 1
                break
    return max(min(cfg.cap, fresh), gain)


def score_cells(verdicts: Sequence[TweetVerdict], gt: GroundTruth, cfg: EvalConfig, run_tag: str) -> List[WindowCell]:
    by_cell: Dict[Tuple[str, int], List[TweetVerdict]] = defaultdict(list)
    claims: Dict[str, Dict[ClusterId, int]] = defaultdict(dict)
    for v in verdicts:
        by_cell[(v.profile, v.window)].append(v)
        if v.gains:
            claims[v.profile][v.cluster] = v.window

    cells: List[WindowCell] = []
    for profile in gt.profiles:
        profile_claims = claims.get(profile, {})
        for j in range(cfg.windowing.num_windows):
            vs = by_cell.get((profile, j), [])
            gain = window_gain(vs)
            pain = sum(1 for v in vs if v.status in PAIN_STATUSES)
            before = {c for c, wj in profile_claims.items() if wj < j}
            z = max_gain_z(profile, j, before, gt, cfg, gain=gain)
            cells.append(WindowCell(run_tag, profile, j, len(vs), gain, z, pain))
    return cells


def latency(verdicts: Sequence[TweetVerdict], gt: GroundTruth, cfg: EvalConfig, run_tag: str) -> LatencyResult:
    sums = {p: 0 for p in gt.profiles}
    counts = {p: 0 for p in gt.profiles}
    for v in verdicts:
        if not v.gains:
            continue
        first = gt.first_epoch.get(v.cluster, v.creation_epoch)
        sums[v.profile] += v.push_epoch - first
        counts[v.profile] += 1

    rows = tuple(
        ProfileLatency(run=run_tag, profile=p, latency=sums[p], clusters=counts[p], flagged=counts[p] == 0)
        for p in gt.profiles
    )
    if not rows:
        return LatencyResult(run_tag, rows, 0.0, 0.0)
    values = np.array([r.latency for r in rows], dtype=float)
    return LatencyResult(run_tag, rows, float(values.mean()), float(np.median(values)))


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values) if values else 0.0


def build_report(run_tag: str, cells: Sequence[WindowCell], lat: LatencyResult, cfg: EvalConfig) -> ScoreReport:
    rows = [
        CellRow(
            run=c.run, profile=c.profile, window=c.window,
            pushed=c.pushed, gain=c.gain, z=c.z, pain=c.pain, silent=c.silent,
            scores=cell_scores(c, cfg),
        )
        for c in cells
    ]
    metrics = {k: _mean([r.scores[k] for r in rows]) for k in cfg.gain_keys()}
    metrics["latency-mean"] = lat.mean
    metrics["latency-median"] = lat.median
    profiles = sorted({c.profile for c in cells})
    return ScoreReport(
        metric_keys=cfg.metric_keys(),
        cells=rows,
        profiles=list(lat.per_profile),
        aggregates=[
            RunAggregate(run=run_tag, metrics=metrics, profiles=len(profiles), windows=cfg.windowing.num_windows)
        ],
    )


def evaluate_run(run: Run, gt: GroundTruth, cfg: EvalConfig) -> ScoreReport:
    run = run.collapsed()
    capped, cap_report = enforce_cap(run, cfg, gt.epochs)
    assignment = assign_windows(capped, gt, cfg)
    verdicts = classify(assignment, gt, cfg, over_cap=cap_report.over_cap)
    cells = score_cells(verdicts, gt, cfg, run.tag)
    lat = latency(verdicts, gt, cfg, run.tag)
    logger.debug("run %s: %d counted pushes over %d cells", run.tag, len(verdicts), len(cells))
    return build_report(run.tag, cells, lat, cfg)


def evaluate_runs(runs: Sequence[Run], gt: GroundTruth, cfg: EvalConfig, jobs: int = 1) -> List[ScoreReport]:
    return parallel_map(partial(evaluate_run, gt=gt, cfg=cfg), runs, jobs)


# ----------------------------
# Ranking
# ----------------------------

def rank_scores(scores: Mapping[str, float], metric: str) -> List[RankedRun]:
    """Competition ranking: ties share the better rank, then order by tag."""
    sign = 1.0 if is_lower_better(metric) else -1.0
    items = sorted(scores.items(), key=lambda kv: (sign * round(kv[1], 12), kv[0]))
    out: List[RankedRun] = []
    rank = 0
    prev: Optional[float] = None
    for pos, (tag, score) in enumerate(items, start=1):
        key = round(score, 12)
        if key != prev:
            rank = pos
            prev = key
        out.append(RankedRun(rank=rank, tag=tag, score=score))
    return out


def rank_runs(reports: Iterable[ScoreReport], metric: str) -> List[RankedRun]:
    scores: Dict[str, float] = {}
    for r in reports:
        for a in r.aggregates:
            scores[a.run] = a.metrics[metric]
    return rank_scores(scores, metric)


# ----------------------------
# Push-window gaps
# ----------------------------

@dataclass(frozen=True)
class WindowGapRow:
    run: str
    pushes: int
    cross_window: int

    @property
    def fraction(self) -> float:
        return self.cross_window / self.pushes if self.pushes else 0.0


def window_gaps(runs: Sequence[Run], gt: GroundTruth, cfg: EvalConfig) -> List[WindowGapRow]:
    """Pushes whose push window differs from their creation window, per run."""
    w = cfg.windowing
    rows: List[WindowGapRow] = []
    for run in runs:
        total = gaps = 0
        for p in run.collapsed().pushes:
            creation = gt.epochs.get(p.tweet)
            if creation is None:
                continue
            cw = w.window_of(creation)
            if cw is None:
                continue
            total += 1
            if w.window_of(p.push_epoch) != cw:
                gaps += 1
        rows.append(WindowGapRow(run=run.tag, pushes=total, cross_window=gaps))
    return rows
