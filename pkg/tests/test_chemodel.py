import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chemca.chemodel import (
    ChemModel2DParams,
    PwmClass,
    SingleCellHysteresisParams,
    prob_high_1d,
    prob_high_2d,
    prob_high_2d_grid,
    prob_high_single,
    sample_cs,
)


def test_pwm_class_levels():
    assert PwmClass.OFF.pwm == 0
    assert PwmClass.FLUCT.pwm == 22
    assert PwmClass.HALO.pwm == 30
    assert PwmClass.CORE.pwm == 50


def test_default_params_published():
    p = ChemModel2DParams()
    assert (p.p1, p.p2, p.p3, p.p4) == (0.5, 0.3, 0.25, 0.1)
    assert (p.q1, p.q2, p.q3, p.q4) == (0.0, 0.1, 0.5, 0.5)
    assert (p.k_low, p.k_high) == (0.7, 1.0)


def test_params_validated():
    with pytest.raises(ValueError):
        ChemModel2DParams(p1=1.5)


def test_prob_1d_published_rows():
    assert prob_high_1d(1, 0, 0, 0, 0) == 1.0
    assert prob_high_1d(0, 1, 1, 1, 1) == 0.8
    assert prob_high_1d(0, 1, 0, 1, 0) == 0.5
    assert prob_high_1d(0, 0, 0, 1, 1) == 0.0  # no active neighbor stirrer
    assert prob_high_1d(0, 1, 1, 0, 0) == 0.0  # no active interface


def test_prob_1d_unmatched_pattern_is_zero():
    # active left neighbor but only the right interface on: no coupling path
    assert prob_high_1d(0, 1, 0, 0, 1) == 0.0


def test_prob_1d_range_and_mirror_symmetry():
    for s_c, s_l, s_r, i_l, i_r in itertools.product((0, 1), repeat=5):
        v = prob_high_1d(s_c, s_l, s_r, i_l, i_r)
        assert 0.0 <= v <= 1.0
        assert v == prob_high_1d(s_c, s_r, s_l, i_r, i_l)


def test_prob_2d_core_center():
    assert prob_high_2d(PwmClass.CORE, [PwmClass.OFF] * 4, 1) == 0.5
    assert prob_high_2d(PwmClass.CORE, [PwmClass.OFF] * 4, 0) == pytest.approx(0.35)


def test_prob_2d_fluct_one_core_neighbor():
    nb = [PwmClass.CORE, PwmClass.OFF, PwmClass.OFF, PwmClass.OFF]
    assert prob_high_2d(PwmClass.FLUCT, nb, 1) == pytest.approx(0.03)


def test_prob_2d_off_center_annihilated_by_q1():
    for nb in itertools.product(list(PwmClass), repeat=4):
        assert prob_high_2d(PwmClass.OFF, list(nb), 0) == 0.0


def test_prob_2d_cascade_order():
    p = ChemModel2DParams()
    core3 = [PwmClass.CORE] * 3 + [PwmClass.OFF]
    assert prob_high_2d(PwmClass.HALO, core3, 1) == pytest.approx(p.q4 * p.p1)
    halo3 = [PwmClass.HALO] * 3 + [PwmClass.OFF]
    assert prob_high_2d(PwmClass.HALO, halo3, 1) == pytest.approx(p.q4 * p.p3)
    halo1 = [PwmClass.HALO] + [PwmClass.FLUCT] * 3
    assert prob_high_2d(PwmClass.HALO, halo1, 1) == pytest.approx(p.q4 * p.p4)
    quiet = [PwmClass.OFF] * 4
    assert prob_high_2d(PwmClass.HALO, quiet, 1) == 0.0


def test_prob_2d_requires_four_neighbors():
    with pytest.raises(ValueError):
        prob_high_2d(PwmClass.CORE, [PwmClass.OFF] * 3, 0)


@given(st.integers(0, 3), st.lists(st.integers(0, 3), min_size=4, max_size=4), st.integers(0, 1))
def test_prob_2d_in_unit_interval(center, neighbors, prev):
    v = prob_high_2d(PwmClass(center), [PwmClass(c) for c in neighbors], prev)
    assert 0.0 <= v <= 1.0


@given(
    st.builds(
        ChemModel2DParams,
        p1=st.sampled_from([0.0, 1.0]),
        p2=st.sampled_from([0.0, 1.0]),
        p3=st.sampled_from([0.0, 1.0]),
        p4=st.sampled_from([0.0, 1.0]),
        q1=st.sampled_from([0.0, 1.0]),
        q2=st.sampled_from([0.0, 1.0]),
        q3=st.sampled_from([0.0, 1.0]),
        q4=st.sampled_from([0.0, 1.0]),
        k_low=st.just(1.0),
        k_high=st.just(1.0),
    ),
    st.integers(0, 3),
    st.lists(st.integers(0, 3), min_size=4, max_size=4),
    st.integers(0, 1),
)
def test_display_screen_limit_is_deterministic(params, center, neighbors, prev):
    v = prob_high_2d(PwmClass(center), [PwmClass(c) for c in neighbors], prev, params)
    assert v in (0.0, 1.0)


def test_grid_model_matches_scalar():
    rng = np.random.default_rng(42)
    for _ in range(20):
        h, w = int(rng.integers(3, 8)), int(rng.integers(3, 8))
        classes = rng.integers(0, 4, (h, w)).astype(np.int8)
        prev = rng.integers(0, 2, (h, w)).astype(np.uint8)
        grid_p = prob_high_2d_grid(classes, prev)
        for r in range(h):
            for c in range(w):
                nb = [
                    PwmClass(classes[r, (c - 1) % w]),
                    PwmClass(classes[r, (c + 1) % w]),
                    PwmClass(classes[(r - 1) % h, c]),
                    PwmClass(classes[(r + 1) % h, c]),
                ]
                want = prob_high_2d(PwmClass(classes[r, c]), nb, int(prev[r, c]))
                assert grid_p[r, c] == pytest.approx(want)


def test_prob_single():
    hp = SingleCellHysteresisParams(0.9)
    assert prob_high_single(1, 0, hp) == 0.9
    assert prob_high_single(0, 1, hp) == pytest.approx(0.1)
    assert prob_high_single(0, 0, hp) == 0.0
    assert prob_high_single(1, 1, hp) == 0.9


def test_sample_cs_degenerate_and_validated():
    rng = np.random.default_rng(0)
    assert all(sample_cs(0.0, rng) == 0 for _ in range(100))
    assert all(sample_cs(1.0, rng) == 1 for _ in range(100))
    with pytest.raises(ValueError):
        sample_cs(1.2, rng)


def test_sample_cs_frequency():
    rng = np.random.default_rng(2024)
    n = 100_000
    mean = sum(sample_cs(0.8, rng) for _ in range(n)) / n
    # binomial 3-sigma bound around 0.8
    assert abs(mean - 0.8) < 3 * (0.8 * 0.2 / n) ** 0.5


def test_sample_cs_chi_square_at_half():
    rng = np.random.default_rng(99)
    n = 100_000
    ones = sum(sample_cs(0.37, rng) for _ in range(n))
    expected = 0.37 * n
    chi2 = (ones - expected) ** 2 / expected + ((n - ones) - (n - expected)) ** 2 / (n - expected)
    assert chi2 < 6.635  # chi-square 1 dof at p=0.01


def test_params_dict_round_trip():
    p = ChemModel2DParams(p1=0.4)
    assert ChemModel2DParams.from_dict(p.to_dict()) == p
