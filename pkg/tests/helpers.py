# tests/helpers.py
from __future__ import annotations

from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple

from rts_eval.config import EvalConfig, Windowing
from rts_eval.main import load_ground_truth, load_runs
from rts_eval.models import ClusterAssignment, ClusterId, EpochMap, GroundTruth, Judgment, PushRecord, Run
from rts_eval.utils import rng_stream

FIXTURES = Path(__file__).resolve().parents[1] / "data" / "fixtures"


def cfg_for(windows: int, window_seconds: int = 50, **kwargs) -> EvalConfig:
    return EvalConfig(windowing=Windowing(start_epoch=0, window_seconds=window_seconds, num_windows=windows), **kwargs)


def build_gt(
    judged: Iterable[Tuple[str, str, int]],
    clustered: Iterable[Tuple[str, str, str]] = (),
    epochs: Optional[Dict[str, int]] = None,
) -> GroundTruth:
    return GroundTruth.build(
        [Judgment(p, t, g) for p, t, g in judged],
        [ClusterAssignment(ClusterId(p, c), t) for p, c, t in clustered],
        EpochMap(epochs or {}),
    )


def make_run(tag: str, rows: Iterable[Tuple[str, str, int]]) -> Run:
    return Run(tag=tag).with_pushes(PushRecord(p, t, e) for p, t, e in rows)


def load_fixture(name: str) -> Tuple[GroundTruth, Dict[str, Run]]:
    root = FIXTURES / name
    gt, _ = load_ground_truth(str(root / "qrels.txt"), str(root / "clusters.txt"), str(root / "epoch.txt"))
    runs = load_runs([str(root / "s1.txt"), str(root / "s2.txt")])
    return gt, {r.tag: r for r in runs}


def random_instance(seed: int, mode: str = "strict") -> Tuple[GroundTruth, Run, EvalConfig]:
    """
    Small random world: <= 5 profiles, <= 6 windows, <= 30 pushes.
    Always a valid ground truth; in strict mode every pushed tweet has an
    epoch no later than its push.
    """
    rng = rng_stream(seed, "instance")
    n_profiles = int(rng.integers(1, 6))
    windows = int(rng.integers(1, 7))
    width = 100
    cap = int(rng.integers(1, 5))
    basis = "push" if rng.random() < 0.25 else "creation"

    judged, clustered = [], []
    epochs: Dict[str, int] = {}
    pool = []
    for p in range(n_profiles):
        pid = f"P{p}"
        for i in range(int(rng.integers(1, 13))):
            tid = f"t{p}_{i}"
            has_epoch = mode == "strict" or rng.random() < 0.85
            epoch = int(rng.integers(0, windows * width + 50))
            if has_epoch:
                epochs[tid] = epoch
            r = rng.random()
            if r < 0.2:
                pass
            elif r < 0.5 or not has_epoch:
                judged.append((pid, tid, 0))
            else:
                judged.append((pid, tid, int(rng.integers(1, 3))))
                clustered.append((pid, f"C{int(rng.integers(0, 3))}", tid))
            pool.append((pid, tid, epoch))
    if rng.random() < 0.2:
        pool.append(("PX", "tx_0", 5))
        epochs["tx_0"] = 5

    rows = []
    for _ in range(int(rng.integers(0, 31))):
        pid, tid, epoch = pool[int(rng.integers(0, len(pool)))]
        rows.append((pid, tid, epoch + int(rng.integers(0, 150))))

    gt = build_gt(judged, clustered, epochs)
    cfg = cfg_for(windows, window_seconds=width, cap=cap, mode=mode, window_basis=basis)
    return gt, make_run(f"r{seed}", rows), cfg
