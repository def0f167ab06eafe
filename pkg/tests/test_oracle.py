import pytest

from rts_eval.engine import evaluate_run
from rts_eval.errors import MissingEpochError
from rts_eval.models import EpochMap, GroundTruth
from rts_eval.oracle import oracle_eval

from helpers import build_gt, cfg_for, make_run, random_instance


def assert_same_report(fast, slow):
    assert fast.metric_keys == slow.metric_keys
    assert len(fast.cells) == len(slow.cells)
    for a, b in zip(fast.cells, slow.cells):
        assert (a.run, a.profile, a.window) == (b.run, b.profile, b.window)
        assert (a.pushed, a.gain, a.z, a.pain, a.silent) == (b.pushed, b.gain, b.z, b.pain, b.silent)
        for k in fast.metric_keys:
            if k in a.scores:
                assert a.scores[k] == pytest.approx(b.scores[k], abs=1e-12)
    assert [p.model_dump() for p in fast.profiles] == [p.model_dump() for p in slow.profiles]
    for a, b in zip(fast.aggregates, slow.aggregates):
        for k in fast.metric_keys:
            assert a.metrics[k] == pytest.approx(b.metrics[k], abs=1e-12)


@pytest.mark.parametrize("name", ["h1", "h2"])
def test_oracle_matches_golden_fixtures(name, request):
    gt, runs = request.getfixturevalue(name)
    for run in runs.values():
        assert_same_report(evaluate_run(run, gt, cfg_for(2)), oracle_eval(run, gt, cfg_for(2)))


def test_oracle_agrees_on_over_cap_claims():
    gt = build_gt(
        [("P1", "n", 0), ("P1", "a1", 1), ("P1", "a2", 1)],
        [("P1", "A", "a1"), ("P1", "A", "a2")],
        {"n": 1, "a1": 2, "a2": 60},
    )
    run = make_run("r", [("P1", "n", 5), ("P1", "a1", 10), ("P1", "a2", 61)])
    cfg = cfg_for(2, cap=1, mode="official-2016")

    slow = oracle_eval(run, gt, cfg)

    assert [c.gain for c in slow.cells] == [0, 1]
    assert_same_report(evaluate_run(run, gt, cfg), slow)


@pytest.mark.parametrize("seed", range(200))
def test_oracle_matches_random_instances(seed):
    mode = "official-2016" if seed % 3 == 0 else "strict"
    gt, run, cfg = random_instance(seed, mode=mode)

    assert_same_report(evaluate_run(run, gt, cfg), oracle_eval(run, gt, cfg))


def test_oracle_raises_like_the_engine(h1):
    gt, runs = h1
    partial = GroundTruth.build(gt.judgments, gt.clusters, EpochMap({"tA": 10}))

    with pytest.raises(MissingEpochError):
        evaluate_run(runs["S1"], partial, cfg_for(2))
    with pytest.raises(MissingEpochError):
        oracle_eval(runs["S1"], partial, cfg_for(2))
