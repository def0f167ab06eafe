# rts_eval/strategies/gold.py
"""
Gold restriction: keep the pushes that retrieve the most new clusters.

Days are processed chronologically per profile so clusters claimed on an
earlier day are no longer "new". Within a group one push per new cluster is
taken (the earliest), then, with padding on, the remaining pushes fill the
selection up to n in push order.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Set

from rts_eval.config import EvalConfig
from rts_eval.engine import group_by_push_day
from rts_eval.models import ClusterId, GroundTruth, PushRecord, Run
from rts_eval.strategies.base import Strategy, check_n
from rts_eval.utils import order_key


def claimable_cluster(push: PushRecord, gt: GroundTruth):
    grade = gt.grade(push.profile, push.tweet)
    if grade is None or grade < 1:
        return None
    return gt.cluster(push.profile, push.tweet)


def restrict_gold(run: Run, gt: GroundTruth, cfg: EvalConfig, n: int) -> Run:
    check_n(n, cfg)
    run = run.collapsed()
    retrieved: Dict[str, Set[ClusterId]] = defaultdict(set)
    kept: List[PushRecord] = []

    # groups come back sorted by (profile, day)
    for (profile, _day), group in group_by_push_day(run.pushes, cfg, gt.epochs).items():
        if len(group) <= n:
            chosen = list(group)
        else:
            chosen = []
            for push in group:
                if len(chosen) == n:
                    break
                c = claimable_cluster(push, gt)
                if c is None or c in retrieved[profile]:
                    continue
                if any(claimable_cluster(p, gt) == c for p in chosen):
                    continue
                chosen.append(push)
            if cfg.gold_padding == "always" and len(chosen) < n:
                picked = {p.key for p in chosen}
                pads = [p for p in group if p.key not in picked][: n - len(chosen)]
                chosen = sorted(chosen + pads, key=lambda p: order_key(p, gt.epochs))

        for push in chosen:
            c = claimable_cluster(push, gt)
            if c is not None:
                retrieved[profile].add(c)
        kept.extend(chosen)

    return run.with_pushes(kept)


class GoldStrategy(Strategy):
    name = "gold"

    def restrict(self, run: Run, gt: GroundTruth, cfg: EvalConfig, n: int) -> List[Run]:
        return [restrict_gold(run, gt, cfg, n)]
