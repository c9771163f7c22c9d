import numpy as np
import pytest

from chemca.cca1d import (
    MODE_DISPLAY,
    MODE_PROBABILISTIC,
    Cca1dState,
    RULE_SPACE,
    Rule1D,
    apply_rule_a,
    apply_rule_b,
    default_chain,
    raster_to_text,
    run_1d,
    single_seed,
    step_1d,
    write_raster_csv,
)
from chemca.chemodel import prob_high_1d
from chemca.lattice import line

from .eca_reference import eca_run


def test_rule_a_published_rows():
    assert apply_rule_a(30, 1, 1, 1) == 0
    assert apply_rule_a(30, 0, 0, 1) == 1
    assert apply_rule_a(30, 1, 0, 0) == 1
    assert all(apply_rule_a(0, *t) == 0 for t in np.ndindex(2, 2, 2))


def test_rule_a_full_table_rule30():
    # eighth published table: cell-stirrer part is exactly rule 30
    table = {
        (1, 1, 1): 0, (1, 1, 0): 0, (1, 0, 1): 0, (1, 0, 0): 1,
        (0, 1, 1): 1, (0, 1, 0): 1, (0, 0, 1): 1, (0, 0, 0): 0,
    }
    for (l, c, r), want in table.items():
        assert apply_rule_a(30, l, c, r) == want


def test_rule_b_or_instance():
    # interface part of the eighth published table is OR of the pair
    or_rule = 0b1110
    assert apply_rule_b(or_rule, 0, 0) == 0
    assert apply_rule_b(or_rule, 1, 0) == 1
    assert apply_rule_b(or_rule, 0, 1) == 1
    assert apply_rule_b(or_rule, 1, 1) == 1


def test_rule_b_zero_all_off():
    assert all(apply_rule_b(0, a, b) == 0 for a in (0, 1) for b in (0, 1))


def test_label_bijection_over_rule_space():
    seen = set()
    for a in range(256):
        for b in range(16):
            rule = Rule1D(a, b)
            back = Rule1D.from_label(rule.label)
            assert back == rule
            seen.add(rule.label)
    assert len(seen) == RULE_SPACE == 4096


def test_label_parse_errors():
    with pytest.raises(ValueError):
        Rule1D.from_label("30-0")
    with pytest.raises(ValueError):
        Rule1D.from_label("30-17")
    with pytest.raises(ValueError):
        Rule1D.from_label("banana")
    with pytest.raises(ValueError):
        Rule1D(256, 0)


@pytest.mark.parametrize("rule_a", [30, 110, 250])
def test_display_mode_matches_eca_oracle(rule_a):
    grid = default_chain(7)
    init = single_seed(7)
    raster = run_1d(grid, init, Rule1D(rule_a, 0), 25, mode=MODE_DISPLAY)
    want = eca_run(rule_a, list(init), 25)
    assert raster.tolist() == want


def test_display_mode_periodic_matches_oracle():
    grid = line(11, periodic=True)
    init = single_seed(11)
    raster = run_1d(grid, init, Rule1D(30, 0), 20, mode=MODE_DISPLAY)
    assert raster.tolist() == eca_run(30, list(init), 20, periodic=True)


def test_interfaces_off_probabilistic_equals_display():
    grid = default_chain(7)
    init = single_seed(7)
    rule = Rule1D(30, 0)
    disp = run_1d(grid, init, rule, 25, mode=MODE_DISPLAY)
    prob = run_1d(grid, init, rule, 25, mode=MODE_PROBABILISTIC, rng=np.random.default_rng(3))
    assert np.array_equal(disp, prob)


def test_thresholded_single_step_matches_eca_row():
    # interfaces all on (rule_b = 15); chemistry collapsed to a 0.75
    # threshold reproduces the rule-30 row for one step from a single seed
    grid = default_chain(7)
    rule = Rule1D(30, 15)
    state = Cca1dState.initial(grid, single_seed(7))
    hard = lambda *args: 1.0 if prob_high_1d(*args) >= 0.75 else 0.0
    nxt = step_1d(grid, state, rule, np.random.default_rng(0), model=hard)
    assert nxt.cs.tolist() == eca_run(30, list(single_seed(7)), 1)[1]


def test_quiescent_all_zero():
    grid = default_chain(7)
    rule = Rule1D(30, 15)  # rule 30 has bit0 = 0
    state = Cca1dState.initial(grid, np.zeros(7, np.uint8))
    nxt = step_1d(grid, state, rule, np.random.default_rng(0))
    assert nxt.cs.sum() == 0


def test_raster_reproducible_bit_for_bit():
    grid = default_chain(7)
    init = single_seed(7)
    rule = Rule1D(110, 9)
    a = run_1d(grid, init, rule, 30, rng=np.random.default_rng(77))
    b = run_1d(grid, init, rule, 30, rng=np.random.default_rng(77))
    assert np.array_equal(a, b)


def test_asymmetric_interface_rule_differs_statistically():
    # interface on only for (left=1, right=0) vs the symmetric both-ways rule
    grid = default_chain(7)
    init = single_seed(7)
    asym = Rule1D(30, 0b0100)
    sym = Rule1D(30, 0b0110)
    differing = 0
    for seed in range(50):
        a = run_1d(grid, init, asym, 25, rng=np.random.default_rng(seed))
        s = run_1d(grid, init, sym, 25, rng=np.random.default_rng(seed))
        differing += not np.array_equal(a, s)
    assert differing >= 45


def test_run_zero_steps_and_negative():
    grid = default_chain(7)
    raster = run_1d(grid, single_seed(7), Rule1D(30, 0), 0, mode=MODE_DISPLAY)
    assert raster.shape == (1, 7)
    with pytest.raises(ValueError):
        run_1d(grid, single_seed(7), Rule1D(30, 0), -1)


def test_raster_text_and_csv(tmp_path):
    grid = default_chain(5)
    raster = run_1d(grid, single_seed(5), Rule1D(250, 0), 2, mode=MODE_DISPLAY)
    text = raster_to_text(raster)
    assert text.splitlines()[0] == "..#.."
    path = tmp_path / "raster.csv"
    write_raster_csv(path, raster)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,cell,cs"
    assert len(lines) == 1 + raster.size
