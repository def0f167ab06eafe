import pytest

from rts_eval.models import EpochMap, GroundTruth, validate_ground_truth
from rts_eval.reusability import (
    audit_epoch,
    compare_modes,
    compare_window_basis,
    leave_one_out,
    reduce_ground_truth,
    unique_tweets,
)
from rts_eval.synth import SynthConfig, SynthSpec, default_systems, generate

from helpers import build_gt, cfg_for, make_run


def test_unique_tweets_set_algebra():
    a = make_run("a", [("P1", "x", 1), ("P1", "y", 2), ("P2", "x", 3)])
    b = make_run("b", [("P1", "x", 5)])
    c = make_run("c", [("P1", "y", 9)])

    assert unique_tweets(a, [a, b, c]) == {("P2", "x")}
    assert unique_tweets(b, [a, b, c]) == set()
    assert unique_tweets(a, [a]) == a.pairs


def test_reduce_keeps_surviving_cluster_members(h1):
    gt, _ = h1

    reduced = reduce_ground_truth(gt, {("P1", "tB")})

    assert "tB" not in reduced.epochs
    assert reduced.members[next(iter(reduced.members))] == ("tA",)
    assert validate_ground_truth(reduced) == []


def test_reduce_drops_emptied_clusters(h1):
    gt, _ = h1

    reduced = reduce_ground_truth(gt, {("P1", "tC")})

    assert len(reduced.members) == 1
    assert validate_ground_truth(reduced) == []


def test_reduce_nothing_is_identity(h1):
    gt, _ = h1

    assert reduce_ground_truth(gt, set()) is gt


def test_reduce_keeps_epochs_judged_under_another_profile():
    gt = build_gt([("P1", "t", 1), ("P2", "t", 0)], [("P1", "C", "t")], {"t": 4})

    reduced = reduce_ground_truth(gt, {("P1", "t")})

    assert reduced.epochs["t"] == 4
    assert reduce_ground_truth(gt, {("P1", "t"), ("P2", "t")}).epochs == {}
    assert reduce_ground_truth(gt, {("P1", "t"), ("P2", "t")}, keep_epochs=True).epochs["t"] == 4


def test_identical_runs_never_move(h1):
    gt, runs = h1
    twin = make_run("S1b", [(p.profile, p.tweet, p.push_epoch) for p in runs["S1"].pushes])

    result = leave_one_out([runs["S1"], twin], gt, cfg_for(2))

    assert [r.delta for r in result.rows] == [0, 0]
    assert result.mean_delta == 0.0


def test_leave_one_out_ranks_the_same_population(h1):
    gt, runs = h1

    result = leave_one_out(list(runs.values()), gt, cfg_for(2))

    assert sorted(r.run for r in result.rows) == ["S1", "S2"]
    assert {r.loo_rank for r in result.rows} <= {1, 2}
    lines = result.to_tsv().splitlines()
    assert lines[0] == "run\torig_rank\tloo_rank\tdelta\torig_score\tloo_score"
    assert lines[-1].startswith("#mean_delta\tEG-1\tstrict\t")


def test_leave_one_out_is_deterministic(h2):
    gt, runs = h2

    a = leave_one_out(list(runs.values()), gt, cfg_for(2)).to_tsv()
    b = leave_one_out(list(runs.values()), gt, cfg_for(2)).to_tsv()

    assert a == b


def test_official_mode_gains_more_from_removal():
    config = SynthConfig(
        corpus=SynthSpec(seed=3, profiles=10, windows=10, unjudged_rate=0.3),
        systems=default_systems(10, seed=3),
    )
    gt, runs = generate(config)

    strict = leave_one_out(runs, gt, cfg_for(10, window_seconds=86400))
    official = leave_one_out(runs, gt, cfg_for(10, window_seconds=86400, mode="official-2016"))

    assert official.mean_delta >= strict.mean_delta


def test_audit_epoch_counts_missing_tweets(h1):
    gt, runs = h1
    gapped = GroundTruth.build(gt.judgments, gt.clusters, EpochMap({t: e for t, e in gt.epochs.items() if t != "tX"}))

    clean = audit_epoch(gt, list(runs.values()))
    dirty = audit_epoch(gapped, list(runs.values()))

    assert clean.clean and clean.rows == ()
    assert dirty.rows == (("S2", "tX", "P1"),)
    assert dirty.fraction("S2") == 0.5
    assert dirty.fraction("S1") == 0.0
    assert "#summary\tS2\t1\t2\t0.500000" in dirty.to_tsv()


def test_compare_modes_with_epoch_gap():
    gt = build_gt([("P1", "tA", 1)], [("P1", "C1", "tA")], {"tA": 10})
    gapped = make_run("gapped", [("P1", "tA", 12), ("P1", "tY", 60)])
    plain = make_run("plain", [("P1", "tA", 13)])

    rows = {r.run: r for r in compare_modes([gapped, plain], gt, cfg_for(2))}

    assert rows["gapped"].strict_score is None
    assert rows["gapped"].strict_rank is None
    assert "without epoch" in rows["gapped"].error
    assert rows["gapped"].official_score == pytest.approx(1.0)
    assert rows["plain"].diff == pytest.approx(0.0)


def test_compare_modes_with_complete_epochs_agree(h1):
    gt, runs = h1

    rows = compare_modes(list(runs.values()), gt, cfg_for(2))

    assert all(r.diff == pytest.approx(0.0) for r in rows)
    assert [r.run for r in rows] == ["S2", "S1"]


def test_unjudged_pushes_on_silent_windows_favour_official():
    gt = build_gt([("P1", "tA", 1)], [("P1", "C1", "tA")], {"tA": 10, "u": 70})
    run = make_run("r", [("P1", "tA", 12), ("P1", "u", 71)])
    gap = GroundTruth.build(gt.judgments, gt.clusters, EpochMap({"tA": 10}))

    strict = compare_modes([run], gt, cfg_for(2), metric="EG-1")[0]
    official = compare_modes([run], gap, cfg_for(2), metric="EG-1")[0]

    assert official.official_score >= strict.strict_score
    assert strict.strict_score == pytest.approx(0.5)


def test_compare_window_basis_reports_both_rankings(h1):
    gt, runs = h1

    rows = compare_window_basis(list(runs.values()), gt, cfg_for(2))

    by_run = {r.run: r for r in rows}
    assert by_run["S1"].creation_score == pytest.approx(0.25)
    # push basis: tB counts in window 1 as redundant
    assert by_run["S1"].push_score == pytest.approx(0.5)
    assert by_run["S2"].creation_rank == 1
