import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from unbounded_dsp.errors import DivergenceError, SpectralLeakageWarning, ValidationError
from unbounded_dsp.kernels import (ExpTail, Kernel, TransferFunction, convolve, convolve_at,
                                   ideal_rect_kernel, rho_l1_norm, synthesize_kernel,
                                   trapezoid_kernel_closed_form, trapezoid_transfer)
from unbounded_dsp.signals import SampledSignal, SymbolicSignal
from unbounded_dsp.spectral import make_bump
from unbounded_dsp.weights import Weight

# (1/2pi) int H(w) cos(5w) dw for the trapezoid p=1, q=2, by scipy quad
H5_QUAD = 0.01429508963559317


@pytest.fixture(scope="module")
def trap_kernel():
    return synthesize_kernel(trapezoid_transfer(1.0, 2.0), 16.0, 1 << 14)


def test_zero_transfer_gives_zero_kernel():
    h = synthesize_kernel(TransferFunction.zero(), 8.0, 64)
    assert np.all(h.values == 0)


def test_closed_form_examples():
    assert trapezoid_kernel_closed_form(1, 2, 0.0) == pytest.approx(3 / (2 * np.pi), rel=1e-15)
    assert trapezoid_kernel_closed_form(1, 2, np.pi) == pytest.approx(-2 / np.pi ** 3, rel=1e-14)
    assert trapezoid_kernel_closed_form(1, 2, 5.0) == pytest.approx(H5_QUAD, rel=1e-12)
    assert trapezoid_kernel_closed_form(1, 2, 1e-6) == pytest.approx(3 / (2 * np.pi), rel=1e-11)


@given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(-200, 200))
def test_closed_form_even_and_matches_cosines(p, dq, t):
    q = p + dq
    v = trapezoid_kernel_closed_form(p, q, t)
    assert v == trapezoid_kernel_closed_form(p, q, -t)
    if abs(t) > 1e-2:
        ref = (np.cos(p * t) - np.cos(q * t)) / (np.pi * (q - p) * t * t)
        assert v == pytest.approx(ref, abs=1e-12 * (1 + 1 / (q - p)))


def test_synthesis_matches_closed_form(trap_kernel):
    t = trap_kernel.times
    m = np.abs(t) <= 50
    err = np.max(np.abs(trap_kernel.values[m] - trapezoid_kernel_closed_form(1, 2, t[m])))
    assert err < 1e-5
    assert trap_kernel.values[trap_kernel.n // 2] == pytest.approx(3 / (2 * np.pi), abs=1e-12)


def test_synthesis_grid(trap_kernel):
    assert trap_kernel.dt == pytest.approx(np.pi / 16)
    assert trap_kernel.times[trap_kernel.n // 2] == 0.0
    assert trap_kernel.n == 1 << 14


def test_synthesis_offset_grid():
    H = trapezoid_transfer(1.0, 2.0)
    h = synthesize_kernel(H, 16.0, 1 << 12, offset=0.37)
    t = h.times
    m = np.abs(t) < 40
    assert np.max(np.abs(h.values[m] - trapezoid_kernel_closed_form(1, 2, t[m]))) < 1e-4


def test_synthesis_consistency_under_refinement():
    H = TransferFunction("tabulated", lambda w: np.exp(-w * w))
    a = synthesize_kernel(H, 16.0, 1 << 10)
    b = synthesize_kernel(H, 32.0, 1 << 11)
    # b's grid is twice as fine over the same span; compare on the common points
    common = b.values[::2][: a.n]
    assert b.times[::2][0] == pytest.approx(a.times[0])
    assert np.max(np.abs(common - a.values)) < 1e-8
    ref = np.exp(-a.times ** 2 / 4) / (2 * np.sqrt(np.pi))
    assert np.max(np.abs(a.values - ref)) < 1e-12


def test_leakage_warning():
    H = TransferFunction("tabulated", lambda w: 1.0 / (1.0 + w * w))
    with pytest.warns(SpectralLeakageWarning):
        synthesize_kernel(H, 8.0, 256)


def test_kernel_validation():
    with pytest.raises(ValidationError):
        Kernel(0.0, 0.1, np.zeros(100))
    with pytest.raises(ValidationError):
        Kernel(0.0, 0.1, np.full(64, np.nan))
    with pytest.raises(ValidationError):
        synthesize_kernel(TransferFunction.zero(), 8.0, 8)


def test_csv_export(tmp_path, trap_kernel):
    p = tmp_path / "k.csv"
    trap_kernel.write_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "t,re,im"
    assert len(lines) == trap_kernel.n + 1
    row0 = [ln for ln in lines[1:] if ln.startswith("0,")][0]
    assert float(row0.split(",")[1]) == pytest.approx(3 / (2 * np.pi), abs=1e-12)


# ---------------------------------------------------------------- tails


@pytest.mark.parametrize("causal", [True, False])
def test_exp_tail_transfer_matches_quadrature(causal):
    tail = ExpTail((0.7 - 0.2j, 1.3), 1.5, causal)
    for w in (-2.0, 0.0, 0.7, 3.0):
        sgn = 1 if causal else -1
        f = lambda t, w=w: tail.kernel(sgn * t) * np.exp(-1j * w * sgn * t)
        re = quad(lambda t: f(t).real, 0, np.inf, limit=400)[0]
        im = quad(lambda t: f(t).imag, 0, np.inf, limit=400)[0]
        assert complex(tail.transfer(w)) == pytest.approx(re + 1j * im, abs=1e-9)


@pytest.mark.parametrize("causal", [True, False])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_exp_tail_convolution_matches_quadrature(causal, k):
    tail = ExpTail((1.0, -0.5), 1.2, causal)
    x = SymbolicSignal.of((1.0, k, 0.8))
    for t in (-1.5, 0.0, 2.0):
        sgn = 1 if causal else -1
        g = lambda u, t=t: tail.kernel(sgn * u) * x(t - sgn * u)
        re = quad(lambda u: g(u).real, 0, np.inf, limit=400)[0]
        im = quad(lambda u: g(u).imag, 0, np.inf, limit=400)[0]
        assert complex(tail.convolve_symbolic(x, t)) == pytest.approx(re + 1j * im, abs=1e-8)


def test_anticausal_exponential_sampled_kernel():
    a, w1 = 1.0, 0.7
    x = SymbolicSignal.of((1.0, 0, w1))
    t = np.linspace(-5, 5, 11)
    exact = np.exp(1j * w1 * t) / (a - 1j * w1)
    errs = []
    for dt, n in ((0.02, 1 << 12), (0.01, 1 << 13)):
        k = Kernel.from_function(
            lambda s: np.where(s < 0, np.exp(a * s), np.where(s == 0, 0.5, 0.0)), dt, n)
        errs.append(np.max(np.abs(convolve_at(k, x, t) - exact)))
    # a jump stored at its midpoint keeps the trapezoid rule second order
    assert errs[1] < 3e-5
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_anticausal_base_is_exact_with_analytic_tail():
    H = TransferFunction.anticausal_base(2.0)
    h = synthesize_kernel(H, 16.0, 256)
    assert np.max(np.abs(h.values)) < 1e-14
    x = SymbolicSignal.of((1.0, 0, 0.7))
    t = np.linspace(-5, 5, 11)
    y = convolve_at(h, x, t)
    assert np.max(np.abs(y - np.exp(0.7j * t) / (2.0 - 0.7j))) < 1e-14


# ---------------------------------------------------------------- norms


def test_rho_l1_examples(trap_kernel):
    r = rho_l1_norm(trap_kernel, Weight("polynomial", 0.0))
    assert not r.diverging and 1.0 < r.norm < 2.0
    r = rho_l1_norm(ideal_rect_kernel(1.0, 0.5, 1 << 16), Weight("polynomial", 0.0))
    assert r.diverging and r.last_increment > 1e-2
    z = Kernel(-32.0, 1.0, np.zeros(64))
    r = rho_l1_norm(z, Weight("polynomial", 0.0))
    assert r.norm == 0.0 and not r.diverging


def test_rho_l1_rejects_other_families(trap_kernel):
    with pytest.raises(ValidationError):
        rho_l1_norm(trap_kernel, Weight("exponential", 1.0))


def test_rho_l1_extrapolation_converges():
    # |t|**-3 tail under alpha=1: the extrapolated norm is stable under span doubling
    H = make_bump(0.0, 1.0, 2, 0.5).transfer()
    w = Weight("polynomial", 1.0)
    a = rho_l1_norm(synthesize_kernel(H, 16.0, 1 << 12), w)
    b = rho_l1_norm(synthesize_kernel(H, 16.0, 1 << 14), w)
    assert not a.diverging and not b.diverging
    assert a.norm == pytest.approx(b.norm, rel=5e-3)


def test_norm_is_cached(trap_kernel):
    w = Weight("polynomial", 0.5)
    assert rho_l1_norm(trap_kernel, w) is rho_l1_norm(trap_kernel, w)


@settings(max_examples=25)
@given(st.floats(-200, 200), st.floats(0, 1.0))
def test_shift_bound(s, alpha):
    h = synthesize_kernel(make_bump(0.5, 1.0, 2, 0.5).transfer(), 16.0, 1 << 12)
    w = Weight("polynomial", alpha)
    lhs = (1 + abs(s)) ** -alpha * rho_l1_norm(h.shifted(s), w).norm
    assert lhs <= rho_l1_norm(h, w).norm * (1 + 1e-6)


@settings(max_examples=20)
@given(st.floats(-3, 3), st.floats(0.3, 2), st.floats(-1, 1), st.floats(0.3, 2),
       st.floats(0, 1))
def test_submultiplicative_norm_of_products(c1, w1, dc, w2, alpha):
    f = make_bump(c1, w1, 2, 0.5)
    g = make_bump(c1 + dc * w1, w2, 2, 0.5)
    W, n = 16.0, 1 << 13
    w = Weight("polynomial", alpha)
    nf = rho_l1_norm(synthesize_kernel(f.transfer(), W, n), w).norm
    ng = rho_l1_norm(synthesize_kernel(g.transfer(), W, n), w).norm
    nfg = rho_l1_norm(synthesize_kernel(f.transfer() * g.transfer(), W, n), w).norm
    assert nfg <= nf * ng * (1 + 1e-3)


# ---------------------------------------------------------------- convolution


def test_convolve_zero_signal(trap_kernel):
    y = convolve(trap_kernel, SymbolicSignal.of((0.0, 0, 1.0)), (-5, 5), 11)
    assert np.all(y.values == 0)


def test_convolve_stopband(trap_kernel):
    y = convolve(trap_kernel, SymbolicSignal.of((1.0, 0, 3.0)), (-20, 20), 41)
    assert np.max(np.abs(y.values)) < 1e-6


@pytest.mark.parametrize("nu", [0.3, 1.5, -1.2, 1.9, 2.5])
def test_modulation_identity_first_order(nu):
    # h * (t e^{i nu t}) = e^{i nu t} (t H(nu) - i H'(nu)), smooth profile d=2
    from unbounded_dsp.filters import FilterSpec, design_filter, filter_transfer

    spec = FilterSpec(1.0, 2.0, 2, "lowpass", 1.0)
    h = design_filter(spec, n=1 << 16)
    Hn = filter_transfer(spec, nu)
    aw = abs(nu)
    dH = 0.0 if not 1 < aw < 2 else np.sign(nu) * 6 * (aw - 1) * (aw - 2)  # -P'/M, M=-1/6
    x = SymbolicSignal.of((1.0, 1, nu))
    t = np.linspace(-10, 10, 21)
    y = convolve_at(h, x, t)
    exact = np.exp(1j * nu * t) * (t * Hn - 1j * dH)
    assert np.max(np.abs(y - exact)) < 1e-4


def test_convolution_refuses_too_rough_kernel_for_growth(trap_kernel):
    # |t| * |t|**-2 is not integrable: the d=1 kernel cannot act on t e^{i nu t}
    with pytest.raises(DivergenceError):
        convolve_at(trap_kernel, SymbolicSignal.of((1.0, 1, 0.3)), [0.0])


def test_modulation_identity_flat_passband():
    from unbounded_dsp.filters import FilterSpec, design_filter

    h = design_filter(FilterSpec(1.0, 2.0, 2, "lowpass", 1.0), n=1 << 14)
    x = SymbolicSignal.of((1.0, 1, 0.3), (2.0, 0, -0.5))
    t = np.linspace(-10, 10, 21)
    y = convolve_at(h, x, t)
    assert np.max(np.abs(y - x(t))) < 1e-6


def test_convolution_refuses_divergent_kernel():
    h = ideal_rect_kernel(1.0, 0.5, 1 << 16)
    with pytest.raises(DivergenceError):
        convolve(h, SymbolicSignal.of((1.0, 0, 0.5)), (-1, 1), 3)


def test_sampled_signal_convolution_matches_symbolic(trap_kernel):
    x = SymbolicSignal.of((1.0, 0, 0.5), (0.3j, 0, -1.5))
    s = SampledSignal.from_function(x, (-3000, 3000), 600_001)
    t = np.linspace(-5, 5, 6)
    ys = convolve_at(trap_kernel, s, t)
    yx = convolve_at(trap_kernel, x, t)
    assert np.max(np.abs(ys - yx)) < 1e-3


def test_causal_restriction():
    k = Kernel.from_function(lambda t: np.exp(-np.abs(t)), 0.01, 1 << 12)
    x = SymbolicSignal.of((1.0, 0, 0.0))
    full = convolve_at(k, x, [0.0])[0]
    half = convolve_at(k, x, [0.0], causal=True)[0]
    assert full == pytest.approx(2.0, abs=1e-4)
    assert half == pytest.approx(1.0, abs=1e-2)
