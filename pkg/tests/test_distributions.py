import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from engagement_lab.distributions import ValueDist, max_of
from engagement_lab.exceptions import ValidationError


def test_max_of_examples():
    d = ValueDist.finite([(1, 0.5), (4, 0.5)])
    m = max_of([d, d])
    assert m.support == [(1.0, pytest.approx(0.25)), (4.0, pytest.approx(0.75))]
    assert max_of([d]) is d
    ad = ValueDist.finite([(1.011, 0.5), (1.05, 0.5)])
    assert max_of([ad, ad]).support == [(1.011, pytest.approx(0.25)), (1.05, pytest.approx(0.75))]


def test_rejects_bad_supports():
    with pytest.raises(ValidationError):
        ValueDist.finite([(1, 0.5), (2, 0.4)])
    with pytest.raises(ValidationError):
        ValueDist.finite([(1, -0.5), (2, 1.5)])
    with pytest.raises(ValidationError):
        ValueDist("finite_support", (), ())
    with pytest.raises(ValidationError):
        ValueDist("lognormal", (1.0,), (1.0,))


def test_merges_duplicates_and_sorts():
    d = ValueDist.finite([(3, 0.25), (1, 0.5), (3, 0.25)])
    assert d.values == (1.0, 3.0)
    assert d.probs == (0.5, 0.5)


def test_point_mass_sampling_uses_no_randomness():
    rng = np.random.default_rng(0)
    state = rng.bit_generator.state
    assert np.all(ValueDist.point_mass(2.5).sample(rng, 10) == 2.5)
    assert rng.bit_generator.state == state


def test_tail_helpers():
    d = ValueDist.finite([(1, 0.2), (2, 0.3), (5, 0.5)])
    assert d.prob_ge(2) == pytest.approx(0.8)
    assert d.prob_ge(5.0001) == 0.0
    assert d.partial_mean_ge(2) == pytest.approx(0.6 + 2.5)
    assert d.cdf(1.5) == pytest.approx(0.2)
    assert d.mean == pytest.approx(0.2 + 0.6 + 2.5)
    assert d.v_max == 5.0


supports = st.lists(
    st.tuples(st.integers(0, 6), st.floats(0.05, 1.0)), min_size=1, max_size=3
).map(lambda xs: ValueDist.finite([(float(v), w / sum(x[1] for x in xs)) for v, w in xs]))


@given(st.lists(supports, min_size=1, max_size=3))
def test_max_of_matches_enumeration(dists):
    exact = {}
    for combo in itertools.product(*(d.support for d in dists)):
        v = max(x for x, _ in combo)
        exact[v] = exact.get(v, 0.0) + float(np.prod([pr for _, pr in combo]))
    got = dict(max_of(dists).support)
    assert set(got) == {v for v, pr in exact.items() if pr > 0}
    for v, pr in got.items():
        assert pr == pytest.approx(exact[v], abs=1e-12)
