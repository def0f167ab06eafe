import pytest

from rts_eval.config import EvalConfig
from rts_eval.scoring import WindowCell, cell_scores, eg_score, gmp_score, ncg_score

CFG = EvalConfig()


def cell(pushed=0, gain=0, z=0, pain=0):
    return WindowCell("r", "P1", 0, pushed, gain, z, pain)


@pytest.mark.parametrize("pushed,expected", [(0, 1.0), (1, 0.9), (2, 0.8), (10, 0.0), (12, 0.0)])
def test_silent_eg_p_loses_a_tenth_per_push(pushed, expected):
    c = cell(pushed=pushed, pain=pushed)

    assert c.silent
    assert eg_score(c, "p", CFG) == pytest.approx(expected)


def test_silent_variants():
    quiet = cell()
    noisy = cell(pushed=1, pain=1)

    assert eg_score(quiet, "0", CFG) == 0.0
    assert eg_score(quiet, "1", CFG) == 1.0
    assert eg_score(noisy, "1", CFG) == 0.0
    assert ncg_score(quiet, "1", CFG) == 1.0
    assert ncg_score(noisy, "p", CFG) == pytest.approx(0.9)


def test_non_silent_ratios():
    c = cell(pushed=4, gain=1, z=2, pain=3)

    assert eg_score(c, "1", CFG) == 0.25
    assert ncg_score(c, "0", CFG) == 0.5
    assert gmp_score(c, 0.5) == pytest.approx(-1.0)


def test_non_silent_window_without_pushes_scores_zero():
    c = cell(z=1)

    assert not c.silent
    for v in ("0", "1", "p"):
        assert eg_score(c, v, CFG) == 0.0
        assert ncg_score(c, v, CFG) == 0.0


def test_official_overflow_numerator_uses_first_n_only():
    # 12 counted, 10 gain-eligible
    c = cell(pushed=12, gain=10, z=10, pain=0)

    assert eg_score(c, "1", CFG) == pytest.approx(10 / 12)
    assert ncg_score(c, "1", CFG) == 1.0


def test_cell_scores_keys():
    scores = cell_scores(cell(pushed=1, gain=1, z=1), CFG)

    assert list(scores) == CFG.gain_keys()
    assert scores["GMP.33"] == pytest.approx(0.33)
