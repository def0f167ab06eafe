# rts_eval/synth.py
"""
Seeded synthetic corpora and runs.

Every profile and every (system, profile, window) cell draws from its own
PCG64 stream, so adding profiles or systems never perturbs earlier draws.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from rts_eval.config import EvalConfig, Windowing
from rts_eval.engine import truncate_groups
from rts_eval.ingest import write_clusters, write_epoch, write_qrels, write_run
from rts_eval.models import ClusterAssignment, ClusterId, EpochMap, GroundTruth, Judgment, PushRecord, Run
from rts_eval.utils import rng_stream

logger = logging.getLogger(__name__)

IntRange = Tuple[int, int]


def _check_range(v: IntRange) -> IntRange:
    lo, hi = v
    if lo < 0 or hi < lo:
        raise ValueError(f"range must satisfy 0 <= lo <= hi (got {lo}, {hi})")
    return (lo, hi)


class SynthSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = 0
    profiles: int = Field(default=10, ge=0)
    windows: int = Field(default=10, ge=1)
    window_seconds: int = Field(default=86400, gt=0)
    start_epoch: int = Field(default=0, ge=0)
    clusters_per_profile: IntRange = (3, 8)
    tweets_per_cluster: IntRange = (1, 4)
    silent_rate: float = Field(default=0.2, ge=0.0, le=1.0)
    background_per_window: IntRange = (2, 6)
    unjudged_rate: float = Field(default=0.2, ge=0.0, le=1.0)

    @field_validator("clusters_per_profile", "background_per_window")
    @classmethod
    def _ranges(cls, v):
        return _check_range(v)

    @field_validator("tweets_per_cluster")
    @classmethod
    def _cluster_size(cls, v):
        v = _check_range(v)
        if v[0] < 1:
            raise ValueError("clusters hold at least one tweet")
        return v

    def windowing(self) -> Windowing:
        return Windowing(start_epoch=self.start_epoch, window_seconds=self.window_seconds, num_windows=self.windows)


class SystemSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: str
    seed: int = 0
    precision: float = Field(default=0.5, ge=0.0, le=1.0)
    verbosity: IntRange = (1, 3)
    latency: IntRange = (0, 600)
    silence_respect: float = Field(default=0.5, ge=0.0, le=1.0)

    @field_validator("verbosity", "latency")
    @classmethod
    def _ranges(cls, v):
        return _check_range(v)

    @field_validator("tag")
    @classmethod
    def _tag(cls, v: str):
        v = (v or "").strip()
        if not v or any(c.isspace() for c in v):
            raise ValueError("system tag must be a non-empty token")
        return v


class SynthConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    corpus: SynthSpec = Field(default_factory=SynthSpec)
    systems: Tuple[SystemSpec, ...] = ()
    cap: int = Field(default=10, ge=1)


@dataclass(frozen=True)
class SynthCorpus:
    gt: GroundTruth
    # (profile, window) -> non-relevant tweets (judged 0 or unjudged) created there
    background: Dict[Tuple[str, int], Tuple[str, ...]]


def profile_id(index: int) -> str:
    return f"SP{index + 1:03d}"


def _uniform(rng, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi + 1))


def gen_corpus(spec: SynthSpec) -> SynthCorpus:
    w = spec.windowing()
    judgments: List[Judgment] = []
    clusters: List[ClusterAssignment] = []
    epochs: Dict[str, int] = {}
    background: Dict[Tuple[str, int], Tuple[str, ...]] = {}

    for p in range(spec.profiles):
        pid = profile_id(p)
        rng = rng_stream(spec.seed, "profile", p)
        next_id = (p + 1) * 1_000_000

        def new_tweet(window: int) -> str:
            nonlocal next_id
            next_id += 1
            tid = str(next_id)
            epochs[tid] = w.start_epoch + window * w.window_seconds + int(rng.integers(0, w.window_seconds))
            return tid

        n_silent = int(round(spec.silent_rate * spec.windows))
        silent = {int(x) for x in rng.choice(spec.windows, size=n_silent, replace=False)}
        active = [j for j in range(spec.windows) if j not in silent]

        k = _uniform(rng, *spec.clusters_per_profile) if active else 0
        if k:
            k = max(k, len(active))
        for c in range(k):
            # the first len(active) clusters anchor one per active window
            anchor = active[c] if c < len(active) else active[int(rng.integers(0, len(active)))]
            later = [j for j in active if j >= anchor]
            cid = ClusterId(pid, f"C{c + 1:03d}")
            size = _uniform(rng, *spec.tweets_per_cluster)
            for m in range(size):
                window = anchor if m == 0 else later[int(rng.integers(0, len(later)))]
                tid = new_tweet(window)
                judgments.append(Judgment(pid, tid, _uniform(rng, 1, 2)))
                clusters.append(ClusterAssignment(cid, tid))

        for j in range(spec.windows):
            pool = []
            for _ in range(_uniform(rng, *spec.background_per_window)):
                tid = new_tweet(j)
                if rng.random() >= spec.unjudged_rate:
                    judgments.append(Judgment(pid, tid, 0))
                pool.append(tid)
            background[(pid, j)] = tuple(pool)

    gt = GroundTruth.build(judgments, clusters, EpochMap(epochs))
    logger.debug(
        "synthetic corpus: %d profiles, %d judgments, %d clustered tweets",
        spec.profiles, len(judgments), len(clusters),
    )
    return SynthCorpus(gt=gt, background=background)


def gen_ground_truth(spec: SynthSpec) -> GroundTruth:
    return gen_corpus(spec).gt


def _background_from_gt(gt: GroundTruth, w: Windowing) -> Dict[Tuple[str, int], Tuple[str, ...]]:
    out: Dict[Tuple[str, int], List[str]] = {}
    for j in gt.judgments:
        if j.relevant or j.tweet not in gt.epochs:
            continue
        win = w.window_of(gt.epochs[j.tweet])
        if win is not None:
            out.setdefault((j.profile, win), []).append(j.tweet)
    return {k: tuple(sorted(v)) for k, v in out.items()}


def gen_run(
    gt: GroundTruth,
    system: SystemSpec,
    cfg: EvalConfig,
    background: Optional[Dict[Tuple[str, int], Tuple[str, ...]]] = None,
) -> Run:
    """
    Simulated system. Without an explicit background stream, judged
    non-relevant tweets stand in for it.
    """
    w = cfg.windowing
    if background is None:
        background = _background_from_gt(gt, w)

    relevant_by_cell: Dict[Tuple[str, int], List[Tuple[str, ClusterId]]] = {}
    for c, tweets in gt.members.items():
        for t in tweets:
            grade = gt.grade(c.profile, t)
            if grade is None or grade < 1 or t not in gt.epochs:
                continue
            win = w.window_of(gt.epochs[t])
            if win is not None:
                relevant_by_cell.setdefault((c.profile, win), []).append((t, c))

    pushes: List[PushRecord] = []
    lat_lo, lat_hi = system.latency
    for profile in gt.profiles:
        pushed: set = set()
        claimed: set = set()
        for j in range(w.num_windows):
            rng = rng_stream(system.seed, system.tag, profile, j)
            rel = sorted(relevant_by_cell.get((profile, j), []))
            noise = [t for t in background.get((profile, j), ()) if t not in pushed]
            # silent for an omniscient observer: nothing new to retrieve here
            silent = not any(c not in claimed for _, c in rel)
            count = min(_uniform(rng, *system.verbosity), cfg.cap)
            if silent:
                if rng.random() >= 1.0 - system.silence_respect:
                    continue
                picks = []
                for _ in range(count):
                    if not noise:
                        break
                    picks.append(noise.pop(int(rng.integers(0, len(noise)))))
            else:
                picks = []
                for _ in range(count):
                    if rng.random() < system.precision:
                        fresh = [(t, c) for t, c in rel if c not in claimed and t not in pushed]
                        any_rel = [(t, c) for t, c in rel if t not in pushed]
                        pool = fresh or any_rel
                        if pool:
                            t, c = pool[int(rng.integers(0, len(pool)))]
                            pushed.add(t)
                            claimed.add(c)
                            picks.append(t)
                            continue
                    if noise:
                        picks.append(noise.pop(int(rng.integers(0, len(noise)))))
            for t in picks:
                pushed.add(t)
                pushes.append(PushRecord(profile, t, gt.epochs[t] + _uniform(rng, lat_lo, lat_hi)))

    kept, overflow = truncate_groups(pushes, cfg, gt.epochs, cfg.cap)
    if overflow:
        logger.debug("system %s: %d pushes beyond the daily cap discarded", system.tag, len(overflow))
    return Run(tag=system.tag).with_pushes(kept)


def default_systems(count: int, seed: int = 0) -> Tuple[SystemSpec, ...]:
    """A spread of precision / verbosity profiles, deterministic in `seed`."""
    rng = rng_stream(seed, "systems")
    out = []
    for i in range(count):
        hi = _uniform(rng, 1, 10)
        out.append(
            SystemSpec(
                tag=f"sys{i + 1:02d}",
                seed=seed * 1000 + i,
                precision=round(float(rng.uniform(0.2, 0.9)), 2),
                verbosity=(1, hi),
                latency=(0, _uniform(rng, 60, 3600)),
                silence_respect=round(float(rng.uniform(0.0, 1.0)), 2),
            )
        )
    return tuple(out)


def load_synth_config(path: str) -> SynthConfig:
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    return SynthConfig.model_validate(data)


def eval_config_for(config: SynthConfig) -> EvalConfig:
    return EvalConfig(windowing=config.corpus.windowing(), cap=config.cap)


def generate(config: SynthConfig) -> Tuple[GroundTruth, List[Run]]:
    corpus = gen_corpus(config.corpus)
    cfg = eval_config_for(config)
    runs = [gen_run(corpus.gt, s, cfg, corpus.background) for s in config.systems]
    return corpus.gt, runs


def write_synth(out_dir: str, config: SynthConfig) -> List[Path]:
    """
    Write qrels.txt, clusters.txt, epoch.txt, runs/<tag>.txt and manifest.yaml.
    """
    gt, runs = generate(config)
    root = Path(out_dir)
    (root / "runs").mkdir(parents=True, exist_ok=True)

    files = {
        root / "qrels.txt": write_qrels(gt.judgments),
        root / "clusters.txt": write_clusters(gt.clusters),
        root / "epoch.txt": write_epoch(gt.epochs),
    }
    for run in runs:
        files[root / "runs" / f"{run.tag}.txt"] = write_run(run)

    for path, text in files.items():
        path.write_text(text, encoding="utf-8")

    manifest = {
        "seed": config.corpus.seed,
        "config": config.model_dump(mode="json"),
        "files": sorted(str(p.relative_to(root)) for p in files),
        "counts": {
            "profiles": len(gt.profiles),
            "judgments": len(gt.judgments),
            "clustered": len(gt.clusters),
            "epochs": len(gt.epochs),
            "runs": {r.tag: len(r.pushes) for r in runs},
        },
    }
    manifest_path = root / "manifest.yaml"
    manifest_path.write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")
    logger.info("wrote %d files to %s", len(files) + 1, root)
    return sorted(files) + [manifest_path]
