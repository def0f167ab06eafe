# rts_eval/errors.py
from __future__ import annotations

from typing import List, Sequence, Tuple


class RtsEvalError(Exception):
    """Base class for every error raised by the toolkit."""


class UsageError(RtsEvalError):
    """Flag combination that parses but cannot be honoured (exit 1)."""


class GroundTruthInvalid(RtsEvalError):
    def __init__(self, violations: Sequence[object]):
        self.violations = list(violations)
        super().__init__(f"ground truth failed validation ({len(self.violations)} violations)")


class MissingEpochError(RtsEvalError):
    """
    Strict mode refuses to score pushes it cannot place in time.

    `missing` lists (profile, tweet) pairs absent from the epoch map;
    `early` lists pairs pushed before their own creation epoch.
    """

    def __init__(
        self,
        run_tag: str,
        missing: Sequence[Tuple[str, str]],
        early: Sequence[Tuple[str, str]] = (),
    ):
        self.run_tag = run_tag
        self.missing: List[Tuple[str, str]] = sorted(missing)
        self.early: List[Tuple[str, str]] = sorted(early)
        parts = []
        if self.missing:
            parts.append(f"{len(self.missing)} pushed tweets without epoch")
        if self.early:
            parts.append(f"{len(self.early)} pushes before creation")
        super().__init__(f"run {run_tag}: " + ", ".join(parts))
