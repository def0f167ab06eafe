# rts_eval/main.py
from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from rts_eval.errors import GroundTruthInvalid
from rts_eval.ingest import ParseDiagnostic, merge_epochs, parse_clusters, parse_epoch, parse_qrels, parse_run
from rts_eval.models import GroundTruth, Run, Violation, validate_ground_truth

logger = logging.getLogger(__name__)


def _read(path: Path) -> bytes:
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    return path.read_bytes()


def _report(diags: Sequence[ParseDiagnostic]) -> None:
    for d in diags:
        if d.kind == "malformed":
            logger.warning("%s", d)
        else:
            logger.debug("%s", d)


def load_ground_truth(
    qrels: str,
    clusters: str,
    epoch: str,
    extra_epochs: Sequence[str] = (),
    validate: bool = True,
) -> Tuple[GroundTruth, List[ParseDiagnostic]]:
    """
    Parse the three ground-truth files. Supplementary epoch files are merged
    in order, the primary one winning conflicts.
    """
    qp, cp, ep = Path(qrels), Path(clusters), Path(epoch)
    judgments, d1 = parse_qrels(_read(qp), name=str(qp))
    assignments, d2 = parse_clusters(_read(cp), name=str(cp))
    epochs, d3 = parse_epoch(_read(ep), name=str(ep))
    diags = d1 + d2 + d3
    for extra in extra_epochs:
        xp = Path(extra)
        more, d4 = parse_epoch(_read(xp), name=str(xp))
        epochs, d5 = merge_epochs(epochs, more, name=str(xp))
        diags += d4 + d5
    _report(diags)

    gt = GroundTruth.build(judgments, assignments, epochs)
    logger.debug(
        "ground truth: %d judgments, %d clustered tweets, %d epochs, %d profiles",
        len(gt.judgments), len(gt.clusters), len(gt.epochs), len(gt.profiles),
    )
    if validate:
        violations = validate_ground_truth(gt)
        if violations:
            raise GroundTruthInvalid(violations)
    return gt, diags


def load_runs(paths: Sequence[str]) -> List[Run]:
    runs: List[Run] = []
    for p in paths:
        path = Path(p)
        run, diags = parse_run(_read(path), default_tag=path.stem, name=str(path))
        _report(diags)
        logger.debug("run %s: %d pushes from %s", run.tag, len(run.pushes), path)
        runs.append(run)
    return runs


def write_output(text: str, out: Optional[str] = None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)


def format_violations(violations: Sequence[Violation]) -> str:
    return "".join(f"{v}\n" for v in violations)
