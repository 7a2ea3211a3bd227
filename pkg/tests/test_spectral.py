import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from unbounded_dsp.errors import NonConvergenceError, ValidationError
from unbounded_dsp.kernels import trapezoid_kernel_closed_form
from unbounded_dsp.signals import SampledSignal, SymbolicSignal
from unbounded_dsp.spectral import (TestFunction, gap_test, make_bump, pairing, parseval_check,
                                    taper, truncated_transform)


def test_truncated_transform_examples():
    one = SymbolicSignal.of((1.0, 0, 0.0))
    assert truncated_transform(one, 3.0, [0.0]).values[0] == pytest.approx(6.0, rel=1e-15)
    w = np.array([0.3, 2.0, -5.0])
    v = truncated_transform(one, 3.0, w).values
    assert np.allclose(v, 2 * np.sin(3 * w) / w, rtol=1e-13, atol=1e-14)
    nu0 = 1.3
    x = SymbolicSignal.of((1.0, 0, nu0))
    v = truncated_transform(x, 3.0, w).values
    assert np.allclose(v, 2 * np.sin(3 * (w - nu0)) / (w - nu0), rtol=1e-12, atol=1e-13)


def _quad_transform(k, nu, m, w):
    f = lambda t: t ** k * np.exp(1j * (nu - w) * t)
    re = quad(lambda t: f(t).real, -m, m, limit=500, epsabs=1e-13, epsrel=1e-13)[0]
    im = quad(lambda t: f(t).imag, -m, m, limit=500, epsabs=1e-13, epsrel=1e-13)[0]
    return re + 1j * im


def test_truncated_transform_matches_quadrature_100_random():
    rng = np.random.default_rng(7)
    for _ in range(100):
        k = int(rng.integers(0, 5))
        nu = rng.uniform(-3, 3)
        m = rng.uniform(0.1, 20)
        w = rng.uniform(-4, 4)
        x = SymbolicSignal.of((1.0, k, nu))
        got = truncated_transform(x, m, [w]).values[0]
        ref = _quad_transform(k, nu, m, w)
        assert abs(got - ref) <= 1e-8 * max(1.0, abs(ref))


@pytest.mark.parametrize("k", [0, 1, 2, 3, 6])
def test_truncated_transform_at_signal_frequency(k):
    x = SymbolicSignal.of((1.0, k, 0.7))
    v = truncated_transform(x, 2.0, [0.7]).values[0]
    exact = 0.0 if k % 2 else 2 * 2.0 ** (k + 1) / (k + 1)
    assert v == pytest.approx(exact, abs=1e-12)


def test_truncated_transform_sampled():
    s = SampledSignal.from_function(lambda t: np.exp(0.5j * t), (-10, 10), 20001)
    v = truncated_transform(s, 10.0, [0.2]).values[0]
    assert v == pytest.approx(2 * np.sin(10 * 0.3) / 0.3, abs=1e-5)


def test_bump_profile():
    f = make_bump(3.0, 1.0, 2, 0.4)
    assert f(3.0) == 1.0
    assert f(2.0) == pytest.approx(0.0, abs=1e-15) and f(4.0) == pytest.approx(0.0, abs=1e-15)
    assert f(3.7) == pytest.approx(0.5, abs=1e-15)  # taper midpoint between 3.4 and 4
    assert f(5.0) == 0.0
    with pytest.raises(ValidationError):
        make_bump(0.0, -1.0)
    with pytest.raises(ValidationError):
        make_bump(0.0, 1.0, 3)


def test_fhat_matches_closed_form_for_d1():
    # d=1 bump is the trapezoid shifted to w0: fhat(t) = 2 pi e^{-i w0 t} h_trap(t)
    f = make_bump(1.0, 2.0, 1, 0.5)
    t0, dt, n = -30.0, 0.25, 241
    t = t0 + dt * np.arange(n)
    got = f.fhat_on_grid(t0, dt, n)
    ref = 2 * np.pi * np.exp(-1j * t) * trapezoid_kernel_closed_form(1.0, 2.0, t)
    assert np.max(np.abs(got - ref)) < 1e-6


def test_fhat_decay_order():
    for d in (1, 2):
        f = make_bump(0.0, 1.0, d, 0.5)
        dt = 0.5
        n = 1 << 14
        t = -dt * ((n - 1) // 2) + dt * np.arange(n)
        v = np.abs(f.fhat_on_grid(float(t[0]), dt, n))
        env = lambda lo, hi: v[(np.abs(t) > lo) & (np.abs(t) < hi)].max()
        # envelope decay exponent over one decade
        slope = np.log(env(100, 200) / env(1000, 2000)) / np.log(10)
        assert slope >= d + 1 - 0.1


def test_fhat_rejects_unresolved_probe():
    with pytest.raises(ValidationError):
        make_bump(5.0, 1.0).fhat_on_grid(0.0, 1.0, 16)


def test_taper_shape():
    t = np.linspace(-2, 2, 401)
    v = taper(t, 1.0)
    assert np.all(v[np.abs(t) <= 0.5] == 1.0) and np.all(v[np.abs(t) >= 1.0] == 0.0)
    assert np.all(np.diff(v[t >= 0]) <= 0)
    assert taper(0.75, 1.0) == pytest.approx(0.5)


@pytest.mark.parametrize("nu", [3.0, 3.3, 2.6, 4.5, 0.0])
def test_pairing_with_exponential(nu):
    f = make_bump(3.0, 1.0, 2, 0.4)
    r = pairing(SymbolicSignal.of((1.0, 0, nu)), f)
    assert r.value == pytest.approx(2 * np.pi * f(nu), abs=1e-5)


@pytest.mark.parametrize("nu", [2.3, 3.55, 3.8])
def test_pairing_with_ramp(nu):
    f = make_bump(3.0, 1.0, 2, 0.4)
    h = 1e-5
    dF = (f(nu + h) - f(nu - h)) / (2 * h)
    r = pairing(SymbolicSignal.of((1.0, 1, nu)), f)
    assert r.value == pytest.approx(-2j * np.pi * dF, abs=1e-4)


def test_fhat_at_zero_is_profile_area():
    f = make_bump(1.0, 0.8, 1, 0.5)
    ref = quad(lambda w: f(w).real, 0.2, 1.8, points=[0.6, 1.4])[0]
    # fhat(0) is the area under the profile
    assert f.fhat_on_grid(0.0, 0.5, 1)[0] == pytest.approx(ref, abs=1e-8)


def test_pairing_zero_probe_and_zero_signal():
    f = TestFunction(1.0, 0.5, 2, 0.5, 0.0)
    assert pairing(SymbolicSignal.of((1.0, 0, 1.0)), f).value == 0
    assert pairing(SymbolicSignal.of((0.0, 0, 1.0)), make_bump(1.0, 0.5)).value == 0


def test_pairing_nonconvergence_for_fast_growth():
    # t**3 against a probe whose transform decays like t**-2: the tail does not settle
    f = make_bump(0.5, 0.5, 1, 0.5)
    with pytest.raises(NonConvergenceError):
        pairing(SymbolicSignal.of((1.0, 3, 0.0)), f)


def test_doubling_T_within_tail_estimate():
    f = make_bump(1.0, 0.6, 2, 0.5)
    x = SymbolicSignal.of((1.0, 1, 1.45), (0.5j, 0, 0.7))
    r1 = pairing(x, f, T=200.0)
    r2 = pairing(x, f, T=400.0)
    assert abs(r2.value - r1.value) <= max(r1.tail_estimate, 1e-12) * 1.01


@settings(max_examples=30)
@given(st.floats(-4, 4), st.floats(-4, 4), st.complex_numbers(max_magnitude=3, allow_nan=False,
                                                              allow_infinity=False))
def test_pairing_linear(nu1, nu2, c):
    f = make_bump(0.5, 1.5, 2, 0.5)
    x1 = SymbolicSignal.of((1.0, 0, nu1))
    x2 = SymbolicSignal.of((c, 1, nu2))
    T = 300.0
    lhs = pairing(x1 + x2, f, T=T).value
    rhs = pairing(x1, f, T=T).value + pairing(x2, f, T=T).value
    # the quadrature grid depends on the signal's band, so agreement is to quadrature accuracy
    assert lhs == pytest.approx(rhs, abs=1e-6 * (1 + abs(lhs)))
    # conjugating the profile conjugates the amplitude
    g = TestFunction(0.5, 1.5, 2, 0.5, 1j)
    assert pairing(x1, g, T=T).value == pytest.approx(1j * pairing(x1, f, T=T).value, abs=1e-10)


def test_pairing_bounded_by_weighted_norms():
    from unbounded_dsp.kernels import rho_l1_norm, synthesize_kernel
    from unbounded_dsp.signals import weighted_sup_norm
    from unbounded_dsp.weights import Weight

    f = make_bump(1.0, 1.0, 2, 0.5)
    x = SymbolicSignal.of((1.0, 1, 0.5), (2.0, 0, 1.5))
    w = Weight("polynomial", 1.0)
    T = 500.0
    xn = weighted_sup_norm(x, w, (-T, T), 20001).estimate
    # fhat = 2 pi times the kernel of F(-w)
    G = TestFunction(-1.0, 1.0, 2, 0.5).transfer()
    fn = 2 * np.pi * rho_l1_norm(synthesize_kernel(G, 16.0, 1 << 14), w).norm
    r = pairing(x, f, T=T)
    assert abs(r.value) <= xn * fn + r.tail_estimate


def test_parseval_examples():
    f = make_bump(0.5, 0.5, 2, 0.6)
    r = parseval_check(SymbolicSignal.of((1.0, 0, 0.5)), f)
    assert r.abs_err < 1e-4 and abs(r.lhs - 1) < 1e-4 and abs(r.rhs - 1) < 1e-4
    r = parseval_check(SymbolicSignal.of((1.0, 0, 3.0)), f)
    assert abs(r.lhs) < 1e-4 and abs(r.rhs) < 1e-4
    r = parseval_check(SymbolicSignal.of((0.0, 0, 3.0)), f)
    assert r.lhs == 0 and r.rhs == 0


def test_parseval_complex_amplitude():
    f = TestFunction(0.5, 0.5, 2, 0.6, 2 - 1j)
    r = parseval_check(SymbolicSignal.of((1.0, 0, 0.5)), f)
    assert r.lhs == pytest.approx(2 + 1j, abs=1e-4) and r.abs_err < 1e-4


def test_gap_test_examples():
    probe = make_bump(3.0, 1.0, 2, 0.5)
    ok = gap_test(SymbolicSignal.of((1.0, 0, 0.5)), (-1, 1), [probe])
    assert ok.passed and ok.max_pairing < 1e-5
    bad = gap_test(SymbolicSignal.of((1.0, 0, 3.0)), (-1, 1), [probe])
    assert not bad.passed and bad.max_pairing == pytest.approx(2 * np.pi, rel=1e-6)
    empty = gap_test(SymbolicSignal.of((1.0, 0, 3.0)), (-1, 1), [])
    assert empty.passed and empty.max_pairing == 0


def test_gap_test_rejects_overlapping_probe():
    with pytest.raises(ValidationError):
        gap_test(SymbolicSignal.of((1.0, 0, 0.5)), (-1, 1), [make_bump(1.5, 1.0)])
    # touching the edge is allowed
    gap_test(SymbolicSignal.of((1.0, 0, 0.5)), (-1, 1), [make_bump(2.0, 1.0)])
    with pytest.raises(ValidationError):
        gap_test(SymbolicSignal.of((1.0, 0, 0.5)), (-1, 1), [make_bump(0.5, 1.0)], inside=True)


def test_gap_test_on_sampled_signal():
    s = SampledSignal.from_function(lambda t: (1 + 0.1 * t) * np.exp(0.3j * t), (-64, 64), 1025)
    rep = gap_test(s, (-1, 1), [make_bump(2.0, 0.8)])
    assert rep.passed
    s2 = SampledSignal.from_function(lambda t: np.exp(2.0j * t), (-64, 64), 1025)
    assert not gap_test(s2, (-1, 1), [make_bump(2.0, 0.8)]).passed
