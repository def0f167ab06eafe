import json

import pytest

from rts_eval.engine import evaluate_run
from rts_eval.ingest import (
    merge_epochs,
    parse_clusters,
    parse_epoch,
    parse_qrels,
    parse_run,
    read_report_json,
    write_clusters,
    write_epoch,
    write_qrels,
    write_report,
    write_run,
)
from rts_eval.models import EpochMap

from helpers import cfg_for


def test_parse_qrels_keeps_max_grade_and_reports():
    text = "# header\nP1 Q0 t1 0\nP1 Q0 t1 2\n\nP1 Q0 t2 x\nP1 Q0 t3\nP1 Q0 t4 1\r\n"
    judgments, diags = parse_qrels(text)

    assert [(j.tweet, j.grade) for j in judgments] == [("t1", 2), ("t4", 1)]
    assert [d.kind for d in diags] == ["conflict", "malformed", "malformed"]
    assert [d.line for d in diags] == [3, 5, 6]


def test_parse_qrels_accepts_bytes_and_line_iterables():
    from_bytes, _ = parse_qrels(b"P1 Q0 t1 1\nP1 Q0 t2 0\n")
    from_lines, _ = parse_qrels(["P1 Q0 t1 1\n", "P1 Q0 t2 0\n"])

    assert from_bytes == from_lines


def test_parse_clusters_first_assignment_wins():
    assignments, diags = parse_clusters("P1 C1 t1\nP1 C2 t1\nP1 C1 t2\nbad line\n")

    assert [(a.cluster.value, a.tweet) for a in assignments] == [("C1", "t1"), ("C1", "t2")]
    assert [d.kind for d in diags] == ["duplicate", "malformed"]


def test_parse_epoch_keeps_min_on_conflict():
    epochs, diags = parse_epoch("t1 50\nt1 20\nt2 -3\nt3 7\n")

    assert dict(epochs) == {"t1": 20, "t3": 7}
    assert [d.kind for d in diags] == ["conflict", "malformed"]


def test_parse_run_tag_and_duplicates():
    run, diags = parse_run("P1 t1 30 alpha\nP1 t1 10 alpha\nP1 t2 40 beta\nP1 t3 nope\n", default_tag="fallback")

    assert run.tag == "alpha"
    assert [(p.tweet, p.push_epoch) for p in run.pushes] == [("t1", 10), ("t2", 40)]
    assert [d.kind for d in diags] == ["duplicate", "conflict", "malformed"]


def test_parse_run_without_tag_uses_default():
    run, diags = parse_run("P1 t1 3\n", default_tag="fromfile")

    assert run.tag == "fromfile"
    assert diags == []


def test_merge_epochs_base_wins():
    merged, diags = merge_epochs(EpochMap({"a": 1, "b": 2}), EpochMap({"b": 9, "c": 3}))

    assert dict(merged) == {"a": 1, "b": 2, "c": 3}
    assert len(diags) == 1 and diags[0].kind == "conflict"
    assert diags[0].line is None
    assert str(diags[0]) == "<supplement>: conflict: b: base 2 kept over 9"


def test_numbers_must_be_plain_ascii_digits():
    epochs, diags = parse_epoch("111 1_0\n222 +5\n333 ١٢\n444 7\n")

    assert dict(epochs) == {"444": 7}
    assert [(d.line, d.kind) for d in diags] == [(1, "malformed"), (2, "malformed"), (3, "malformed")]

    judgments, diags = parse_qrels("P1 Q0 t1 +1\nP1 Q0 t2 -1\nP1 Q0 t3 2\n")
    assert [j.tweet for j in judgments] == ["t3"]
    assert [d.line for d in diags] == [1, 2]

    run, diags = parse_run("P1 t1 1_000\nP1 t2 12\n")
    assert [p.tweet for p in run.pushes] == ["t2"]
    assert diags[0].kind == "malformed"


def test_writers_reparse_to_same_ground_truth(h1):
    gt, runs = h1

    judgments, _ = parse_qrels(write_qrels(gt.judgments))
    clusters, _ = parse_clusters(write_clusters(gt.clusters))
    epochs, _ = parse_epoch(write_epoch(gt.epochs))
    run, _ = parse_run(write_run(runs["S1"]))

    assert tuple(judgments) == gt.judgments
    assert tuple(clusters) == gt.clusters
    assert dict(epochs) == dict(gt.epochs)
    assert run == runs["S1"]


def test_write_report_tsv_layout(h1):
    gt, runs = h1
    report = evaluate_run(runs["S1"], gt, cfg_for(2))

    lines = write_report(report, "tsv").splitlines()
    header = lines[0].split("\t")

    assert header[:8] == ["run", "profile", "window", "pushed", "gain", "z", "pain", "silent"]
    assert "EG-p" in header and "latency-mean" not in header
    assert lines[1].split("\t")[:8] == ["S1", "P1", "0", "2", "1", "1", "1", "0"]
    assert "#aggregate\tEG-1\tS1\t0.250000" in lines
    assert "#aggregate\tlatency-mean\tS1\t2.000000" in lines


def test_report_json_round_trip(h2):
    gt, runs = h2
    report = evaluate_run(runs["S2"], gt, cfg_for(2))

    text = write_report(report, "json")
    back = read_report_json(text)

    assert json.loads(text)["aggregates"][0]["metrics"]["EG-1"] == 0.75
    assert back.aggregate("S2", "EG-1") == pytest.approx(0.75)
    assert [c.silent for c in back.cells] == [False, True]


def test_write_report_rejects_unknown_format(h1):
    gt, runs = h1
    report = evaluate_run(runs["S1"], gt, cfg_for(2))

    with pytest.raises(ValueError):
        write_report(report, "xml")
