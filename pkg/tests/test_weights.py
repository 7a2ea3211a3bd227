import numpy as np
import pytest
from hypothesis import given, strategies as st

from unbounded_dsp.errors import ValidationError
from unbounded_dsp.weights import (Weight, require_submultiplicative, submultiplicativity_check,
                                   weight_eval)

finite = st.floats(-1e6, 1e6, allow_nan=False)
alphas = st.floats(0.0, 5.0, allow_nan=False)


@pytest.mark.parametrize("family,alpha,t,expected", [
    ("polynomial", 1.0, 0.0, 1.0),
    ("polynomial", 2.0, 3.0, 1.0 / 16.0),
    ("polynomial", 0.0, 1e6, 1.0),
    ("exponential", 1.0, 2.0, np.exp(-2.0)),
    ("gaussian", 1.0, 2.0, np.exp(-4.0)),
])
def test_weight_values(family, alpha, t, expected):
    assert weight_eval(Weight(family, alpha), t) == pytest.approx(expected, rel=1e-15)


def test_negative_alpha_rejected():
    with pytest.raises(ValidationError):
        Weight("polynomial", -0.1)
    with pytest.raises(ValidationError):
        Weight("cubic", 1.0)


def test_weight_serialisation_roundtrip():
    w = Weight("polynomial", 1.0)
    assert w.to_dict() == {"family": "polynomial", "alpha": 1.0}
    assert Weight.from_dict(w.to_dict()) == w


def test_submultiplicative_families_on_square():
    g = np.linspace(-10, 10, 41)
    pairs = [(t, s) for t in g for s in g]
    assert submultiplicativity_check(Weight("polynomial", 1.0), pairs).holds
    assert submultiplicativity_check(Weight("exponential", 1.0), pairs).holds


def test_gaussian_counterexample():
    rep = submultiplicativity_check(Weight("gaussian", 1.0), [(1.0, 1.0)])
    assert not rep.holds
    assert rep.worst_pair == (1.0, 1.0)
    assert rep.worst_ratio == pytest.approx(np.e ** 2, rel=1e-12)
    with pytest.raises(ValidationError):
        require_submultiplicative(Weight("gaussian", 1.0))


def test_polynomial_submultiplicative_dense_random():
    rng = np.random.default_rng(0)
    for alpha in (0.0, 0.25, 1.0, 3.0):
        pairs = rng.uniform(-1e4, 1e4, size=(10_000, 2))
        rep = submultiplicativity_check(Weight("polynomial", alpha), pairs)
        assert rep.holds and rep.worst_ratio <= 1.0 + 1e-12


@given(alphas, finite, finite)
def test_polynomial_submultiplicative_property(alpha, t, s):
    w = Weight("polynomial", alpha)
    assert weight_eval(w, t) * weight_eval(w, s) <= weight_eval(w, t + s) * (1 + 1e-12)


@given(st.sampled_from(["polynomial", "exponential", "gaussian"]), alphas,
       st.floats(-50, 50, allow_nan=False))
def test_even_and_bounded(family, alpha, t):
    w = Weight(family, alpha)
    v = weight_eval(w, t)
    assert v == weight_eval(w, -t)
    assert 0.0 <= v <= 1.0


@given(st.sampled_from(["polynomial", "exponential", "gaussian"]), alphas,
       st.floats(0, 50, allow_nan=False), st.floats(0, 50, allow_nan=False))
def test_monotone_in_abs_t(family, alpha, a, b):
    w = Weight(family, alpha)
    lo, hi = sorted((a, b))
    assert weight_eval(w, hi) <= weight_eval(w, lo)
