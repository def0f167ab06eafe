# rts_eval/ingest.py
"""
Line-oriented readers and writers for the four ground-truth / run file kinds
and the score report.

Formats (whitespace-separated, `#` comments and blank lines skipped):
  qrels     profile_id Q0 tweet_id grade
  clusters  profile_id cluster_id tweet_id
  epoch     tweet_id epoch_seconds
  run       profile_id tweet_id push_epoch [runtag]

Parsers are total: they never raise on content, every skipped or rewritten
line yields a ParseDiagnostic.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Literal, Optional, Tuple, Union

from rts_eval.models import (
    ClusterAssignment,
    ClusterId,
    EpochMap,
    Judgment,
    PushRecord,
    Run,
    ScoreReport,
)

TextSource = Union[str, bytes, Iterable[Union[str, bytes]]]
DiagnosticKind = Literal["malformed", "duplicate", "conflict"]

# ASCII digits with an optional minus sign
_INTEGER = re.compile(r"-?[0-9]+")


@dataclass(frozen=True)
class ParseDiagnostic:
    """`line` is the 1-based physical line, or None for file-level findings (epoch merges)."""

    file: str
    line: Optional[int]
    kind: DiagnosticKind
    message: str

    def __str__(self) -> str:
        where = self.file if self.line is None else f"{self.file}:{self.line}"
        return f"{where}: {self.kind}: {self.message}"


def _decode(x: Union[str, bytes]) -> str:
    if isinstance(x, bytes):
        return x.decode("utf-8", errors="replace")
    return x


def _chunks(source: TextSource) -> Iterator[str]:
    if isinstance(source, (str, bytes)):
        yield from _decode(source).split("\n")
        return
    # file objects and lists of lines
    for item in source:
        text = _decode(item)
        if text.endswith("\n"):
            text = text[:-1]
        yield from text.split("\n")


def _physical_lines(source: TextSource) -> Iterator[Tuple[int, str]]:
    for n, raw in enumerate(_chunks(source), start=1):
        yield n, raw.replace("\r", "")


def _records(source: TextSource) -> Iterator[Tuple[int, List[str]]]:
    for n, line in _physical_lines(source):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield n, stripped.split()


def _int_or_none(token: str) -> Optional[int]:
    if not _INTEGER.fullmatch(token):
        return None
    return int(token)


# ----------------------------
# Parsers
# ----------------------------

def parse_qrels(source: TextSource, name: str = "<qrels>") -> Tuple[List[Judgment], List[ParseDiagnostic]]:
    diags: List[ParseDiagnostic] = []
    found: Dict[Tuple[str, str], Judgment] = {}

    for n, cols in _records(source):
        if len(cols) != 4:
            diags.append(ParseDiagnostic(name, n, "malformed", f"expected 4 columns, got {len(cols)}"))
            continue
        profile, _, tweet, grade_s = cols
        grade = _int_or_none(grade_s)
        if grade is None or grade < 0:
            diags.append(ParseDiagnostic(name, n, "malformed", f"grade must be a non-negative integer: {grade_s!r}"))
            continue

        key = (profile, tweet)
        prev = found.get(key)
        if prev is not None:
            kind: DiagnosticKind = "conflict" if prev.grade != grade else "duplicate"
            diags.append(
                ParseDiagnostic(name, n, kind, f"{profile} {tweet} judged again (grades {prev.grade}, {grade}); keeping max")
            )
            if grade <= prev.grade:
                continue
        found[key] = Judgment(profile=profile, tweet=tweet, grade=grade, line=n)

    return sorted(found.values(), key=lambda j: (j.profile, j.tweet)), diags


def parse_clusters(
    source: TextSource, name: str = "<clusters>"
) -> Tuple[List[ClusterAssignment], List[ParseDiagnostic]]:
    diags: List[ParseDiagnostic] = []
    found: Dict[Tuple[str, str], ClusterAssignment] = {}

    for n, cols in _records(source):
        if len(cols) != 3:
            diags.append(ParseDiagnostic(name, n, "malformed", f"expected 3 columns, got {len(cols)}"))
            continue
        profile, cluster, tweet = cols
        key = (profile, tweet)
        prev = found.get(key)
        if prev is not None:
            diags.append(
                ParseDiagnostic(
                    name, n, "duplicate",
                    f"{profile} {tweet} already in cluster {prev.cluster.value}; ignoring {cluster}",
                )
            )
            continue
        found[key] = ClusterAssignment(cluster=ClusterId(profile, cluster), tweet=tweet, line=n)

    return sorted(found.values(), key=lambda a: (a.cluster, a.tweet)), diags


def parse_epoch(source: TextSource, name: str = "<epoch>") -> Tuple[EpochMap, List[ParseDiagnostic]]:
    diags: List[ParseDiagnostic] = []
    found: Dict[str, int] = {}

    for n, cols in _records(source):
        if len(cols) != 2:
            diags.append(ParseDiagnostic(name, n, "malformed", f"expected 2 columns, got {len(cols)}"))
            continue
        tweet, epoch_s = cols
        epoch = _int_or_none(epoch_s)
        if epoch is None or epoch < 0:
            diags.append(ParseDiagnostic(name, n, "malformed", f"epoch must be a non-negative integer: {epoch_s!r}"))
            continue
        prev = found.get(tweet)
        if prev is not None and prev != epoch:
            diags.append(ParseDiagnostic(name, n, "conflict", f"{tweet} has epochs {prev} and {epoch}; keeping min"))
            epoch = min(prev, epoch)
        found[tweet] = epoch

    return EpochMap(found), diags


def parse_run(
    source: TextSource, default_tag: str = "run", name: str = "<run>"
) -> Tuple[Run, List[ParseDiagnostic]]:
    diags: List[ParseDiagnostic] = []
    pushes: Dict[Tuple[str, str], PushRecord] = {}
    tag: Optional[str] = None

    for n, cols in _records(source):
        if len(cols) not in (3, 4):
            diags.append(ParseDiagnostic(name, n, "malformed", f"expected 3 or 4 columns, got {len(cols)}"))
            continue
        profile, tweet, push_s = cols[:3]
        push_epoch = _int_or_none(push_s)
        if push_epoch is None or push_epoch < 0:
            diags.append(ParseDiagnostic(name, n, "malformed", f"push epoch must be a non-negative integer: {push_s!r}"))
            continue

        if len(cols) == 4:
            if tag is None:
                tag = cols[3]
            elif cols[3] != tag:
                diags.append(ParseDiagnostic(name, n, "conflict", f"run tag {cols[3]!r} differs from {tag!r}; keeping first"))

        rec = PushRecord(profile=profile, tweet=tweet, push_epoch=push_epoch, line=n)
        prev = pushes.get(rec.key)
        if prev is not None:
            diags.append(
                ParseDiagnostic(
                    name, n, "duplicate",
                    f"{profile} {tweet} pushed again ({prev.push_epoch}, {push_epoch}); keeping earliest",
                )
            )
            if push_epoch >= prev.push_epoch:
                continue
        pushes[rec.key] = rec

    run = Run(tag=tag or default_tag).with_pushes(pushes.values())
    return run, diags


def merge_epochs(base: EpochMap, supplement: EpochMap, name: str = "<supplement>") -> Tuple[EpochMap, List[ParseDiagnostic]]:
    """Union of both maps; the base wins on conflict."""
    merged = dict(base.items())
    diags: List[ParseDiagnostic] = []
    for tweet, epoch in supplement.items():
        prev = merged.get(tweet)
        if prev is None:
            merged[tweet] = epoch
        elif prev != epoch:
            diags.append(ParseDiagnostic(name, None, "conflict", f"{tweet}: base {prev} kept over {epoch}"))
    return EpochMap(merged), diags


# ----------------------------
# Writers
# ----------------------------

def write_qrels(judgments: Iterable[Judgment]) -> str:
    rows = sorted(judgments, key=lambda j: (j.profile, j.tweet))
    return "".join(f"{j.profile} Q0 {j.tweet} {j.grade}\n" for j in rows)


def write_clusters(assignments: Iterable[ClusterAssignment]) -> str:
    rows = sorted(assignments, key=lambda a: (a.cluster, a.tweet))
    return "".join(f"{a.profile} {a.cluster.value} {a.tweet}\n" for a in rows)


def write_epoch(epochs: EpochMap) -> str:
    return "".join(f"{t} {epochs[t]}\n" for t in sorted(epochs))


def write_run(run: Run) -> str:
    rows = sorted(run.pushes, key=lambda p: (p.profile, p.push_epoch, p.tweet))
    return "".join(f"{p.profile} {p.tweet} {p.push_epoch} {run.tag}\n" for p in rows)


def fmt6(x: float) -> str:
    return f"{x:.6f}"


_CELL_COLUMNS = ["run", "profile", "window", "pushed", "gain", "z", "pain", "silent"]


def write_report(report: ScoreReport, fmt: str = "tsv") -> str:
    fmt = (fmt or "").strip().lower()
    if fmt == "json":
        return _report_json(report)
    if fmt != "tsv":
        raise ValueError("format must be one of: tsv | json")

    gain_keys = [k for k in report.metric_keys if not k.startswith("latency")]
    lines = ["\t".join(_CELL_COLUMNS + gain_keys)]
    for c in report.cells:
        base = [c.run, c.profile, str(c.window), str(c.pushed), str(c.gain), str(c.z), str(c.pain), str(int(c.silent))]
        lines.append("\t".join(base + [fmt6(c.scores[k]) for k in gain_keys]))
    for a in report.aggregates:
        for k in report.metric_keys:
            if k in a.metrics:
                lines.append(f"#aggregate\t{k}\t{a.run}\t{fmt6(a.metrics[k])}")
    return "\n".join(lines) + "\n"


def _report_json(report: ScoreReport) -> str:
    doc = report.model_dump()
    for c in doc["cells"]:
        c["scores"] = {k: round(v, 6) for k, v in c["scores"].items()}
    for a in doc["aggregates"]:
        a["metrics"] = {k: round(v, 6) for k, v in a["metrics"].items()}
    return json.dumps(doc, indent=2) + "\n"


def read_report_json(text: str) -> ScoreReport:
    return ScoreReport.model_validate_json(text)
