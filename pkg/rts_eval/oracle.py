# rts_eval/oracle.py
"""
Brute-force reference scorer used by the test-suite.

Everything is recomputed with nested scans over the raw tuples: no indexes,
no shared helpers from engine.py or scoring.py. Quadratic or worse; keep
instances small.
"""
from __future__ import annotations

import statistics
from typing import Dict, List, Optional, Tuple

from rts_eval.config import EvalConfig, gmp_key
from rts_eval.errors import MissingEpochError
from rts_eval.models import (
    CellRow,
    GroundTruth,
    ProfileLatency,
    PushRecord,
    Run,
    RunAggregate,
    ScoreReport,
)

MAX_PUSHES = 1000


def _grade(gt: GroundTruth, profile: str, tweet: str) -> Optional[int]:
    for j in gt.judgments:
        if j.profile == profile and j.tweet == tweet:
            return j.grade
    return None


def _cluster(gt: GroundTruth, profile: str, tweet: str) -> Optional[str]:
    for a in gt.clusters:
        if a.profile == profile and a.tweet == tweet:
            return a.cluster.value
    return None


def _silent(variant: str, pushed: int, cap: int) -> float:
    if variant == "0":
        return 0.0
    if variant == "1":
        return 1.0 if pushed == 0 else 0.0
    return max(0.0, (cap - pushed) / cap)


def oracle_eval(run: Run, gt: GroundTruth, cfg: EvalConfig) -> ScoreReport:
    if len(run.pushes) > MAX_PUSHES:
        raise ValueError(f"oracle is limited to {MAX_PUSHES} pushes (got {len(run.pushes)})")

    start = cfg.windowing.start_epoch
    width = cfg.windowing.window_seconds
    T = cfg.windowing.num_windows
    N = cfg.cap

    def rank(p: PushRecord) -> Tuple[int, int, int, str]:
        c = gt.epochs.get(p.tweet)
        return (p.push_epoch, 0 if c is not None else 1, c if c is not None else 0, p.tweet)

    # one push per (profile, tweet): the earliest
    pushes: List[PushRecord] = []
    for p in run.pushes:
        if any(q.key == p.key for q in pushes):
            continue
        if any(q.key == p.key and q.push_epoch < p.push_epoch for q in run.pushes):
            continue
        pushes.append(p)

    # daily cap on push days
    counted: List[PushRecord] = []
    no_gain: List[Tuple[str, str]] = []
    for p in pushes:
        day = (p.push_epoch - start) // width
        ahead = 0
        for q in pushes:
            if q.profile == p.profile and (q.push_epoch - start) // width == day and rank(q) < rank(p):
                ahead += 1
        if ahead >= N:
            if cfg.strict:
                continue
            no_gain.append(p.key)
        counted.append(p)

    judged_profiles = sorted({j.profile for j in gt.judgments})

    placed: List[Tuple[PushRecord, int]] = []
    missing: List[Tuple[str, str]] = []
    early: List[Tuple[str, str]] = []
    for p in counted:
        if p.profile not in judged_profiles:
            continue
        if p.tweet not in gt.epochs:
            if cfg.strict:
                missing.append(p.key)
            continue
        theta = gt.epochs[p.tweet]
        if cfg.strict and p.push_epoch < theta:
            early.append(p.key)
            continue
        basis = theta if cfg.window_basis == "creation" else p.push_epoch
        j = (basis - start) // width
        if 0 <= j < T:
            placed.append((p, j))
    if missing or early:
        raise MissingEpochError(run.tag, missing, early)

    def claims(p: PushRecord) -> bool:
        g = _grade(gt, p.profile, p.tweet)
        return g is not None and g >= 1 and _cluster(gt, p.profile, p.tweet) is not None

    def unclaimed(p: PushRecord) -> bool:
        if not claims(p):
            return False
        c = _cluster(gt, p.profile, p.tweet)
        for q, _ in placed:
            if q.profile == p.profile and q.key != p.key and rank(q) < rank(p):
                if claims(q) and q.key not in no_gain and _cluster(gt, q.profile, q.tweet) == c:
                    return False
        return True

    def is_new(p: PushRecord) -> bool:
        return unclaimed(p) and p.key not in no_gain

    gain_keys = cfg.gain_keys()
    rows: List[CellRow] = []
    for profile in judged_profiles:
        profile_clusters = sorted({a.cluster.value for a in gt.clusters if a.profile == profile})
        for j in range(T):
            here = [p for p, wj in placed if p.profile == profile and wj == j]
            b = len(here)
            G = sum(1 for p in here if is_new(p))
            P = sum(1 for p in here if not unclaimed(p))

            available = 0
            for c in profile_clusters:
                created_here = False
                for a in gt.clusters:
                    if a.profile == profile and a.cluster.value == c and a.tweet in gt.epochs:
                        if (gt.epochs[a.tweet] - start) // width == j:
                            created_here = True
                retrieved_before = False
                for q, wq in placed:
                    if q.profile == profile and wq < j and is_new(q) and _cluster(gt, profile, q.tweet) == c:
                        retrieved_before = True
                if created_here and not retrieved_before:
                    available += 1
            Z = max(min(N, available), G)

            scores: Dict[str, float] = {}
            for v in cfg.eg_variants:
                if Z == 0:
                    scores[f"EG-{v}"] = _silent(v, b, N)
                else:
                    scores[f"EG-{v}"] = G / b if b else 0.0
            for v in cfg.ncg_variants:
                scores[f"nCG-{v}"] = _silent(v, b, N) if Z == 0 else G / Z
            for a in cfg.alphas:
                scores[gmp_key(a)] = a * G - (1.0 - a) * P

            rows.append(
                CellRow(
                    run=run.tag, profile=profile, window=j,
                    pushed=b, gain=G, z=Z, pain=P, silent=Z == 0, scores=scores,
                )
            )

    latencies: List[ProfileLatency] = []
    for profile in judged_profiles:
        total = 0
        n = 0
        for p, _ in placed:
            if p.profile != profile or not is_new(p) or p.key in no_gain:
                continue
            c = _cluster(gt, profile, p.tweet)
            first = gt.epochs[p.tweet]
            for a in gt.clusters:
                if a.profile == profile and a.cluster.value == c and a.tweet in gt.epochs:
                    first = min(first, gt.epochs[a.tweet])
            total += p.push_epoch - first
            n += 1
        latencies.append(ProfileLatency(run=run.tag, profile=profile, latency=total, clusters=n, flagged=n == 0))

    metrics: Dict[str, float] = {}
    for k in gain_keys:
        values = [r.scores[k] for r in rows]
        metrics[k] = sum(values) / len(values) if values else 0.0
    lat_values = [float(x.latency) for x in latencies]
    metrics["latency-mean"] = sum(lat_values) / len(lat_values) if lat_values else 0.0
    metrics["latency-median"] = float(statistics.median(lat_values)) if lat_values else 0.0

    return ScoreReport(
        metric_keys=cfg.metric_keys(),
        cells=rows,
        profiles=latencies,
        aggregates=[RunAggregate(run=run.tag, metrics=metrics, profiles=len(judged_profiles), windows=T)],
    )
