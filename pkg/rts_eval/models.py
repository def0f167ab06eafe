from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, NewType, Optional, Tuple

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

TweetId = NewType("TweetId", str)
ProfileId = NewType("ProfileId", str)


def is_token(value: str) -> bool:
    return bool(value) and not any(c.isspace() for c in value)


@dataclass(frozen=True, order=True)
class ClusterId:
    """Cluster identity is scoped to a profile."""

    profile: str
    value: str

    def __str__(self) -> str:
        return f"{self.profile}:{self.value}"


@dataclass(frozen=True)
class Judgment:
    profile: str
    tweet: str
    grade: int
    line: Optional[int] = field(default=None, compare=False)

    @property
    def relevant(self) -> bool:
        # three-level grades collapse to binary relevance
        return self.grade >= 1


@dataclass(frozen=True)
class ClusterAssignment:
    cluster: ClusterId
    tweet: str
    line: Optional[int] = field(default=None, compare=False)

    @property
    def profile(self) -> str:
        return self.cluster.profile


class EpochMap(Mapping):
    """Read-only tweet -> creation epoch (UTC seconds)."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[str, int] | Iterable[Tuple[str, int]] = ()):
        self._entries: Dict[str, int] = dict(entries)

    def __getitem__(self, tweet: str) -> int:
        return self._entries[tweet]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"EpochMap({len(self._entries)} entries)"

    def __reduce__(self):
        return (EpochMap, (self._entries,))


@dataclass(frozen=True)
class PushRecord:
    profile: str
    tweet: str
    push_epoch: int
    line: Optional[int] = field(default=None, compare=False)

    @property
    def key(self) -> Tuple[str, str]:
        return (self.profile, self.tweet)


def collapse_pushes(pushes: Iterable[PushRecord]) -> Tuple[Tuple[PushRecord, ...], List[PushRecord]]:
    """
    At most one push per (profile, tweet): the earliest push_epoch wins.
    Returns (kept pushes sorted by profile/push/tweet, discarded duplicates).
    """
    best: Dict[Tuple[str, str], PushRecord] = {}
    dropped: List[PushRecord] = []
    for p in pushes:
        prev = best.get(p.key)
        if prev is None:
            best[p.key] = p
            continue
        if p.push_epoch < prev.push_epoch:
            best[p.key] = p
            dropped.append(prev)
        else:
            dropped.append(p)
    kept = tuple(sorted(best.values(), key=lambda r: (r.profile, r.push_epoch, r.tweet)))
    return kept, dropped


@dataclass(frozen=True)
class Run:
    tag: str
    pushes: Tuple[PushRecord, ...] = ()

    def collapsed(self) -> "Run":
        kept, dropped = collapse_pushes(self.pushes)
        if dropped:
            logger.warning(
                "run %s: collapsed %d duplicate (profile, tweet) pushes to the earliest",
                self.tag,
                len(dropped),
            )
        return Run(tag=self.tag, pushes=kept)

    @cached_property
    def pairs(self) -> frozenset:
        return frozenset(p.key for p in self.pushes)

    @cached_property
    def profiles(self) -> Tuple[str, ...]:
        return tuple(sorted({p.profile for p in self.pushes}))

    def with_pushes(self, pushes: Iterable[PushRecord]) -> "Run":
        return Run(tag=self.tag, pushes=tuple(sorted(pushes, key=lambda r: (r.profile, r.push_epoch, r.tweet))))


@dataclass(frozen=True)
class GroundTruth:
    judgments: Tuple[Judgment, ...]
    clusters: Tuple[ClusterAssignment, ...]
    epochs: EpochMap

    @classmethod
    def build(
        cls,
        judgments: Iterable[Judgment],
        clusters: Iterable[ClusterAssignment],
        epochs: Mapping[str, int] | EpochMap,
    ) -> "GroundTruth":
        return cls(
            judgments=tuple(sorted(judgments, key=lambda j: (j.profile, j.tweet, j.grade))),
            clusters=tuple(sorted(clusters, key=lambda a: (a.cluster, a.tweet))),
            epochs=epochs if isinstance(epochs, EpochMap) else EpochMap(epochs),
        )

    @cached_property
    def grades(self) -> Dict[Tuple[str, str], int]:
        return {(j.profile, j.tweet): j.grade for j in self.judgments}

    @cached_property
    def cluster_of(self) -> Dict[Tuple[str, str], ClusterId]:
        out: Dict[Tuple[str, str], ClusterId] = {}
        for a in self.clusters:
            out.setdefault((a.profile, a.tweet), a.cluster)
        return out

    @cached_property
    def members(self) -> Dict[ClusterId, Tuple[str, ...]]:
        out: Dict[ClusterId, List[str]] = {}
        for a in self.clusters:
            out.setdefault(a.cluster, []).append(a.tweet)
        return {c: tuple(sorted(ts)) for c, ts in out.items()}

    @cached_property
    def profiles(self) -> Tuple[str, ...]:
        """Judged profiles, i.e. the ones that get scored."""
        return tuple(sorted({j.profile for j in self.judgments}))

    @cached_property
    def clusters_by_profile(self) -> Dict[str, Tuple[ClusterId, ...]]:
        out: Dict[str, List[ClusterId]] = {}
        for c in self.members:
            out.setdefault(c.profile, []).append(c)
        return {p: tuple(sorted(cs)) for p, cs in out.items()}

    @cached_property
    def first_epoch(self) -> Dict[ClusterId, int]:
        """Earliest known creation epoch per cluster."""
        out: Dict[ClusterId, int] = {}
        for c, tweets in self.members.items():
            known = [self.epochs[t] for t in tweets if t in self.epochs]
            if known:
                out[c] = min(known)
        return out

    def grade(self, profile: str, tweet: str) -> Optional[int]:
        return self.grades.get((profile, tweet))

    def cluster(self, profile: str, tweet: str) -> Optional[ClusterId]:
        return self.cluster_of.get((profile, tweet))


@dataclass(frozen=True)
class Violation:
    rule: str
    ids: Tuple[str, ...]
    line: Optional[int] = None

    def __str__(self) -> str:
        where = f" (line {self.line})" if self.line is not None else ""
        return f"{self.rule}: {' '.join(self.ids)}{where}"


def validate_ground_truth(gt: GroundTruth) -> List[Violation]:
    """Report every broken GroundTruth invariant; never raises."""
    out: List[Violation] = []

    seen_j: Dict[Tuple[str, str], Judgment] = {}
    for j in gt.judgments:
        if not (is_token(j.profile) and is_token(j.tweet)):
            out.append(Violation("bad-token", (j.profile, j.tweet), j.line))
        if j.grade < 0:
            out.append(Violation("negative-grade", (j.profile, j.tweet, str(j.grade)), j.line))
        if (j.profile, j.tweet) in seen_j:
            out.append(Violation("duplicate-judgment", (j.profile, j.tweet), j.line))
        seen_j[(j.profile, j.tweet)] = j

    seen_c: Dict[Tuple[str, str], ClusterId] = {}
    for a in gt.clusters:
        key = (a.profile, a.tweet)
        ids = (str(a.cluster), a.tweet)
        if key in seen_c and seen_c[key] != a.cluster:
            out.append(Violation("tweet-in-two-clusters", (str(seen_c[key]), str(a.cluster), a.tweet), a.line))
        seen_c.setdefault(key, a.cluster)

        judged = seen_j.get(key)
        if judged is None:
            out.append(Violation("clustered-without-judgment", ids, a.line))
        elif not judged.relevant:
            out.append(Violation("clustered-but-not-relevant", ids, a.line))
        if a.tweet not in gt.epochs:
            out.append(Violation("clustered-without-epoch", ids, a.line))

    for tweet, epoch in gt.epochs.items():
        if epoch < 0:
            out.append(Violation("negative-epoch", (tweet, str(epoch))))

    out.sort(key=lambda v: (v.line if v.line is not None else -1, v.rule, v.ids))
    return out


# ----------------------------
# Score report
# ----------------------------


class CellRow(BaseModel):
    run: str
    profile: str
    window: int
    pushed: int
    gain: int
    z: int
    pain: int
    silent: bool
    scores: Dict[str, float] = Field(default_factory=dict)


class ProfileLatency(BaseModel):
    run: str
    profile: str
    latency: int
    clusters: int
    flagged: bool


class RunAggregate(BaseModel):
    run: str
    metrics: Dict[str, float] = Field(default_factory=dict)
    profiles: int = 0
    windows: int = 0


class ScoreReport(BaseModel):
    metric_keys: List[str] = Field(default_factory=list)
    cells: List[CellRow] = Field(default_factory=list)
    profiles: List[ProfileLatency] = Field(default_factory=list)
    aggregates: List[RunAggregate] = Field(default_factory=list)

    @property
    def runs(self) -> List[str]:
        return [a.run for a in self.aggregates]

    def aggregate(self, run: str, metric: str) -> float:
        for a in self.aggregates:
            if a.run == run:
                return a.metrics[metric]
        raise KeyError(f"no aggregate for run {run}")

    def cells_for(self, run: str) -> List[CellRow]:
        return [c for c in self.cells if c.run == run]

    @classmethod
    def combine(cls, reports: Iterable["ScoreReport"]) -> "ScoreReport":
        reports = list(reports)
        keys: List[str] = []
        for r in reports:
            for k in r.metric_keys:
                if k not in keys:
                    keys.append(k)
        cells = [c for r in reports for c in r.cells]
        profiles = [p for r in reports for p in r.profiles]
        aggregates = [a for r in reports for a in r.aggregates]
        cells.sort(key=lambda c: (c.run, c.profile, c.window))
        profiles.sort(key=lambda p: (p.run, p.profile))
        aggregates.sort(key=lambda a: a.run)
        return cls(metric_keys=keys, cells=cells, profiles=profiles, aggregates=aggregates)
