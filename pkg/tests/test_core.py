import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from engagement_lab import core
from engagement_lab.core import ContentParams, ModelPoint, OutsideOption
from engagement_lab.exceptions import ValidationError

from oracles import linear_moments_by_series

prob = st.floats(0.0, 0.95)
value = st.floats(0.05, 20.0)
outside = st.floats(0.05, 5.0)


@pytest.mark.parametrize(
    "p,q,v,w,expected",
    [(0, 0.5, 3, 1, 4.0), (0.8, 0.5, 3, 1, 0.0), (0.9, 0.5, 3, 1, -5.0)],
)
def test_g_utility_examples(p, q, v, w, expected):
    assert core.g_utility(ModelPoint.of(p, q, v, w)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("p,q,expected", [(0, 0.5, 2.0), (0.5, 0.5, 3.0), (0.8, 0.5, 6.0)])
def test_g_engagement_examples(p, q, expected):
    assert core.g_engagement(ModelPoint.of(p, q, 3.0)) == pytest.approx(expected, rel=1e-12)


def test_participation_examples():
    assert core.participates(ModelPoint.of(0, 0.5, 3, 1))
    assert not core.participates(ModelPoint.of(0.9, 0.5, 3, 1))
    # the engagement maximiser of the moreishness curve sits exactly on the frontier
    assert core.participates(ModelPoint.of(0.8, 0.5, 3, 1))


def test_expected_values_examples():
    assert core.expected_utility(ModelPoint.of(0, 0.5, 3, 1)) == 4.0
    assert core.expected_utility(ModelPoint.of(0.9, 0.5, 3, 1)) == 0.0
    assert core.expected_utility(ModelPoint.of(0.5, 0.5, 3, 1)) == pytest.approx(3.0)
    assert core.expected_engagement(ModelPoint.of(0, 0, 2.5, 1)) == 1.0
    assert core.expected_engagement(ModelPoint.of(0.9, 0.5, 3, 1)) == 0.0
    assert core.expected_engagement(ModelPoint.of(0.5, 0.5, 3, 1)) == pytest.approx(3.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(p=1.0, q=0.5, v_bar=3), dict(p=-0.1, q=0.5, v_bar=3), dict(p=0.1, q=1.0, v_bar=3),
     dict(p=0.1, q=0.5, v_bar=0.0), dict(p=0.1, q=0.5, v_bar=float("nan")), dict(p=0.1, q=0.5, v_bar=float("inf"))],
)
def test_content_params_rejects_out_of_domain(kwargs):
    with pytest.raises(ValidationError):
        ContentParams(**kwargs)


@pytest.mark.parametrize("w", [0.0, -1.0, float("inf")])
def test_outside_option_rejects(w):
    with pytest.raises(ValidationError):
        OutsideOption(w)


def test_validation_error_is_value_error():
    with pytest.raises(ValueError):
        ContentParams(2, 0, 1)


@given(prob, prob, value, outside)
def test_closed_forms_match_series(p, q, v, w):
    s, t = linear_moments_by_series(p, q, v, w)
    pt = ModelPoint.of(p, q, v, w)
    assert core.g_utility(pt) == pytest.approx(s, rel=1e-9, abs=1e-9)
    assert core.g_engagement(pt) == pytest.approx(t, rel=1e-9)


@given(prob, prob, value, outside)
def test_clamp_and_zero_engagement(p, q, v, w):
    pt = ModelPoint.of(p, q, v, w)
    assert core.expected_utility(pt) == max(core.g_utility(pt), 0.0)
    assert (core.expected_engagement(pt) == 0.0) == (not core.participates(pt))
    g = core.g_utility(pt)
    if abs(g) > 1e-9:
        assert core.participates(pt) == (g > 0)


@given(st.floats(0.0, 0.9), st.floats(0.001, 0.09), prob, value, outside)
def test_monotone_in_p(p, dp, q, v, w):
    a, b = ModelPoint.of(p, q, v, w), ModelPoint.of(p + dp, q, v, w)
    assert core.g_engagement(b) > core.g_engagement(a)
    assert core.g_utility(b) < core.g_utility(a)


@given(st.floats(0.0, 0.9), st.floats(0.001, 0.09), st.floats(1.01, 10))
def test_p_zero_monotone_in_q_when_valuable(q, dq, v):
    a, b = ModelPoint.of(0, q, v, 1), ModelPoint.of(0, q + dq, v, 1)
    assert core.expected_engagement(b) > core.expected_engagement(a)
    assert core.expected_utility(b) > core.expected_utility(a)


@given(prob, prob, value, outside, st.floats(0.01, 100))
def test_scale_invariance(p, q, v, w, c):
    a, b = ModelPoint.of(p, q, v, w), ModelPoint.of(p, q, v * c, w * c)
    assert core.g_utility(b) == pytest.approx(c * core.g_utility(a), rel=1e-9, abs=1e-9 * c)
    assert core.g_engagement(b) == core.g_engagement(a)
    if abs(core.g_utility(a)) > 1e-9:
        assert core.participates(a) == core.participates(b)


def test_array_forms_agree_with_scalars():
    rng = np.random.default_rng(5)
    p, q, v = rng.uniform(0, 0.95, 200), rng.uniform(0, 0.95, 200), rng.uniform(0.1, 6, 200)
    gs = core.g_utility_array(p, q, v, 1.3)
    gt = core.g_engagement_array(p, q)
    part = core.participates_array(p, q, v, 1.3)
    for i in range(200):
        pt = ModelPoint.of(p[i], q[i], v[i], 1.3)
        assert gs[i] == core.g_utility(pt)
        assert gt[i] == core.g_engagement(pt)
        assert part[i] == core.participates(pt)


def test_points_are_immutable():
    pt = ModelPoint.of(0.1, 0.2, 3)
    with pytest.raises(AttributeError):
        pt.params.p = 0.5
