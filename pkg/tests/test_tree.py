import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from engagement_lab import tree
from engagement_lab.distributions import ValueDist
from engagement_lab.exceptions import NumericalError, ValidationError
from engagement_lab.tree import TreeConfig, iid_family, optimize_branching, solve_tree

from oracles import agrees_with_rerun, tree_policy_value

NEAR_TIE = ValueDist.finite([(1.011, 0.5), (1.05, 0.5)])
FIG6 = ValueDist.finite([(1.0, 0.5), (4.0, 0.5)])


def test_max_value_dist():
    assert tree.max_value_dist(TreeConfig.iid(1, 0.1, 0.2, FIG6)) == FIG6
    m = tree.max_value_dist(TreeConfig.iid(2, 0.1, 0.2, FIG6))
    assert m.support == [(1.0, pytest.approx(0.25)), (4.0, pytest.approx(0.75))]
    m = tree.max_value_dist(TreeConfig.iid(2, 0.01, 0, NEAR_TIE))
    assert m.support == [(1.011, pytest.approx(0.25)), (1.05, pytest.approx(0.75))]


def test_two_branch_worked_example():
    fam = iid_family(0.01, 0.0, NEAR_TIE, 1.0)
    one, two = solve_tree(fam(1)), solve_tree(fam(2))
    assert one.participates and one.tau_star <= 1.011
    assert two.tau_star == 1.05
    rep = optimize_branching(fam, 5)
    assert (rep.d_s, rep.d_t) == (2, 1)


def test_one_shot_reduction():
    values = ValueDist.finite([(0.5, 0.3), (1.5, 0.4), (3.0, 0.3)])
    sol = solve_tree(TreeConfig.iid(1, 0.0, 0.0, values, 1.0))
    assert sol.e_t == pytest.approx(values.prob_ge(1.0))
    assert sol.e_s == pytest.approx(0.4 * 0.5 + 0.3 * 2.0)


def test_config_validation():
    with pytest.raises(ValidationError):
        TreeConfig(2, (0.1,), 0.1, (FIG6, FIG6))
    with pytest.raises(ValidationError):
        TreeConfig(1, (1.0,), 0.1, (FIG6,))
    with pytest.raises(ValidationError):
        TreeConfig(0, (), 0.1, ())
    with pytest.raises(ValidationError):
        TreeConfig(1, (0.1,), 0.1, ((1.0, 1.0),))


def test_v_bar_definitions():
    a, b = ValueDist.point_mass(1.0), ValueDist.point_mass(3.0)
    assert TreeConfig(2, (0.1, 0.3), 0.2, (a, b)).v_bar == pytest.approx((0.1 + 0.9) / 0.4)
    assert TreeConfig(2, (0.0, 0.0), 0.2, (a, b)).v_bar == 2.0


configs = st.builds(
    lambda d, p, q, vals, w: TreeConfig.iid(d, p, q, vals, w),
    st.integers(1, 6),
    st.floats(0, 0.9),
    st.floats(0, 0.95),
    st.lists(st.tuples(st.floats(0.1, 6), st.floats(0.05, 1)), min_size=1, max_size=4).map(
        lambda xs: ValueDist.finite([(v, w / sum(x[1] for x in xs)) for v, w in xs])),
    st.floats(0.2, 3),
)


@given(configs)
def test_fixed_point_brackets(cfg):
    sol = solve_tree(cfg)
    vmax = tree.max_value_dist(cfg)
    g = sol.gamma_star
    d = 1e-6
    assert tree.continuation_map(cfg, g - d, vmax) >= g - d
    assert tree.continuation_map(cfg, g + d, vmax) < g + d
    assert sol.gamma_star >= 0


@given(configs)
def test_threshold_maximises_f(cfg):
    sol = solve_tree(cfg)
    vmax = tree.max_value_dist(cfg)
    f_star = sol.gamma_star
    if math.isfinite(sol.tau_star):
        assert tree.threshold_value(cfg, sol.tau_star, vmax) == pytest.approx(f_star, abs=1e-8)
    for tau in list(vmax.values) + [vmax.v_max + 1]:
        assert tree.threshold_value(cfg, tau, vmax) <= f_star + 1e-9
    assert tree.threshold_value(cfg, vmax.v_max + 1, vmax) == 0


@given(configs)
def test_closed_forms_match_policy_recursion(cfg):
    sol = solve_tree(cfg)
    vmax = tree.max_value_dist(cfg)
    s, t = tree_policy_value(cfg.p_hat, cfg.q, cfg.v_bar, cfg.w, vmax.values, vmax.probs, sol.tau_star)
    if sol.participates:
        assert sol.e_s == pytest.approx(max(s, 0.0), rel=1e-7, abs=1e-8)
        assert sol.e_t == pytest.approx(t, rel=1e-9)
    else:
        assert s < 1e-9
        assert sol.e_s == 0 and sol.e_t == 0
    # no other threshold does better for the user
    for tau in vmax.values:
        alt, _ = tree_policy_value(cfg.p_hat, cfg.q, cfg.v_bar, cfg.w, vmax.values, vmax.probs, tau)
        assert alt <= sol.e_s + 1e-8


@given(st.integers(1, 30), st.floats(0, 0.99))
def test_p_hat_iid(d, p):
    cfg = TreeConfig.iid(d, p, 0.3, FIG6)
    assert cfg.p_off == pytest.approx((1 - p) ** d, rel=1e-12)
    if d > 1 and p > 0:
        assert cfg.p_hat >= TreeConfig.iid(d - 1, p, 0.3, FIG6).p_hat


def test_simulator_trivial():
    cfg = TreeConfig.iid(1, 0.0, 0.0, ValueDist.point_mass(2.0), 1.0)
    arrays = tree.simulate_tree_sessions(cfg, solve_tree(cfg), 1000, seed=1)
    assert np.all(arrays.t == 1) and np.all(arrays.s == 1.0)


def test_simulator_no_overrun_without_system1():
    cfg = TreeConfig.iid(3, 0.0, 0.6, FIG6, 1.0)
    arrays = tree.simulate_tree_sessions(cfg, solve_tree(cfg), 20_000, seed=2)
    assert np.all(arrays.phase2 == 0)


@pytest.mark.parametrize("d,p,q", [(2, 0.01, 0.0), (1, 0.3, 0.5), (3, 0.2, 0.7), (2, 0.5, 0.5)])
def test_simulator_matches_solution(d, p, q):
    values = NEAR_TIE if p == 0.01 else FIG6
    cfg = TreeConfig.iid(d, p, q, values, 1.0)
    sol = solve_tree(cfg)

    def run(seed):
        b = tree.simulate_tree(cfg, sol, 400_000, seed)
        return [(b.mean_t, sol.e_t, b.se_t), (b.mean_s, sol.e_s, b.se_s)]

    ok, attempts = agrees_with_rerun(run, seed=5)
    assert ok, attempts


def test_heterogeneous_branches_simulate():
    cfg = TreeConfig(2, (0.1, 0.4), 0.5, (FIG6, ValueDist.point_mass(2.0)), 1.0)
    sol = solve_tree(cfg)

    def run(seed):
        b = tree.simulate_tree(cfg, sol, 400_000, seed)
        return [(b.mean_t, sol.e_t, b.se_t), (b.mean_s, sol.e_s, b.se_s)]

    ok, attempts = agrees_with_rerun(run, seed=6)
    assert ok, attempts


def test_no_participation_family():
    rep = optimize_branching(iid_family(0.3, 0.3, ValueDist.finite([(0.2, 0.5), (0.8, 0.5)]), 1.0), 5)
    assert (rep.d_s, rep.d_t) == (0, 0)


def test_large_d_high_p_is_finite():
    rep = optimize_branching(iid_family(0.95, 0.95, FIG6, 1.0), 20)
    assert all(np.isfinite(r[4]) for r in rep.table)


def test_bracket_failure_raises(monkeypatch):
    cfg = TreeConfig.iid(1, 0.1, 0.1, FIG6)
    monkeypatch.setattr(tree, "continuation_map", lambda c, g, v=None: g + 1.0)
    with pytest.raises(NumericalError):
        solve_tree(cfg)


def test_report_dict():
    rep = optimize_branching(iid_family(0.01, 0.0, NEAR_TIE, 1.0), 3)
    d = rep.to_dict()
    assert d["d_s"] == 2 and len(d["table"]) == 3 and set(d["table"][0]) == set(tree.SWEEP_COLUMNS)
