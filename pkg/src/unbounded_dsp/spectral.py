"""Truncated spectra, pairings with spectral probes, and spectrum-gap tests.

A probe is a frequency profile F with compact support.  Its pairing with a
signal is computed in the time domain::

    <x, F> = int x(t) fhat(t) dt,     fhat(t) = int F(w) exp(-i w t) dw,

so that <exp(i nu .), F> = 2 pi F(nu).  The integral is truncated with a
C-infinity taper that is flat on |t| <= T/2 and vanishes at |t| = T, which
turns the truncation error into a super-algebraically small smoothing of F
away from its corners.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import NonConvergenceError, ValidationError
from .filters import lowpass_profile
from .kernels import TransferFunction, synthesize_kernel
from .signals import (SampledSignal, SymbolicSignal, eval_signal, weighted_sup_norm)
from .weights import Weight

__all__ = [
    "TruncatedSpectrum",
    "TestFunction",
    "PairingResult",
    "ParsevalResult",
    "GapReport",
    "truncated_transform",
    "make_bump",
    "pairing",
    "parseval_check",
    "gap_test",
    "taper",
]

PAIRING_TOL = 1e-6
GAP_TOL = 1e-3
# largest number of quadrature points an adaptive pairing may use
MAX_POINTS = 1 << 22
MIN_FFT_LOG2 = 16


# ---------------------------------------------------------------------------
# truncated transform


@dataclass(frozen=True, eq=False)
class TruncatedSpectrum:
    m: float
    omega: np.ndarray
    values: np.ndarray


def _power_integral(k: int, beta: np.ndarray, m: float) -> np.ndarray:
    """int_{-m}^{m} t**k exp(i beta t) dt for real beta (vectorised)."""
    beta = np.asarray(beta, dtype=float)
    out = np.empty(beta.shape, dtype=np.complex128)
    big = np.abs(beta) * m > max(2.0, float(k))
    if np.any(big):
        b = beta[big]
        ib = 1j * b

        def anti(t):
            acc = np.zeros(b.shape, dtype=np.complex128)
            for j in range(k + 1):
                acc += (-1) ** j * math.factorial(k) / math.factorial(k - j) * t ** (k - j) / ib ** (j + 1)
            return np.exp(ib * t) * acc

        out[big] = anti(m) - anti(-m)
    small = ~big
    if np.any(small):
        b = beta[small]
        acc = np.zeros(b.shape, dtype=np.complex128)
        term = np.ones(b.shape, dtype=np.complex128)  # (i b)**n / n!
        for n in range(200):
            e = k + n + 1
            if e % 2 == 1:
                acc += term * (2.0 * m ** e / e)
            term = term * (1j * b) / (n + 1)
            if n > 8 and np.all(np.abs(term) * m ** (e + 1) <= 1e-18 * np.maximum(np.abs(acc), 1e-300)):
                break
        out[small] = acc
    return out


def truncated_transform(x, m: float, omega) -> TruncatedSpectrum:
    """X_m(w) = int_{-m}^{m} exp(-i w t) x(t) dt.

    Symbolic terms are integrated in closed form (including w equal to a
    signal frequency, where the power series branch applies).  Sampled
    signals use the trapezoid rule over the samples inside [-m, m].
    """
    if not m > 0:
        raise ValidationError("truncation half-width m must be positive")
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if isinstance(x, SymbolicSignal):
        vals = np.zeros(omega.shape, dtype=np.complex128)
        for s in x.active_terms:
            vals += s.coeff * _power_integral(s.power, s.freq - omega, m)
    elif isinstance(x, SampledSignal):
        t = x.times
        keep = (t >= -m) & (t <= m)
        t, v = t[keep], x.values[keep]
        if t.size < 2:
            raise ValidationError("fewer than two samples inside [-m, m]")
        wts = np.full(t.size, x.dt)
        wts[0] = wts[-1] = 0.5 * x.dt
        vals = np.exp(-1j * np.outer(omega, t)) @ (v * wts)
    else:
        raise ValidationError(f"cannot transform {type(x).__name__}")
    return TruncatedSpectrum(float(m), omega, vals)


# ---------------------------------------------------------------------------
# probes


@dataclass(frozen=True)
class TestFunction:
    """Bump profile: amplitude on |w - center| <= plateau*half_width, mu taper to 0 at half_width."""

    center: float
    half_width: float
    d: int = 2
    plateau: float = 0.5
    amplitude: complex = 1.0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not (np.isfinite(self.center) and self.half_width > 0):
            raise ValidationError("probe needs a finite center and positive half-width")
        if self.d not in (1, 2):
            raise ValidationError("probe smoothness must be 1 or 2")
        if not 0 < self.plateau < 1:
            raise ValidationError("plateau fraction must lie in (0, 1)")
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.half_width, self.center + self.half_width

    def __call__(self, w):
        v = self.amplitude * lowpass_profile(self.plateau * self.half_width, self.half_width,
                                             self.d, np.asarray(w, dtype=float) - self.center)
        return complex(v) if np.ndim(v) == 0 else v

    def conj(self) -> "TestFunction":
        return TestFunction(self.center, self.half_width, self.d, self.plateau,
                            self.amplitude.conjugate())

    def transfer(self) -> TransferFunction:
        return TransferFunction("tabulated", self.__call__, {"bump": True, "center": self.center})

    def fhat_on_grid(self, t0: float, dt: float, n: int) -> np.ndarray:
        """fhat(t0 + j dt), j < n, by FFT synthesis (band limit pi/dt)."""
        lo, hi = self.support
        W = np.pi / dt
        if max(abs(lo), abs(hi)) >= W:
            raise ValidationError(
                f"grid spacing {dt:g} cannot resolve a probe reaching |w|={max(abs(lo), abs(hi)):g}"
            )
        if self.amplitude == 0:
            return np.zeros(n, dtype=np.complex128)
        c = (n - 1) // 2
        # period N dt well beyond the window keeps the |t|**-(d+1) aliasing small
        N = 1 << max(MIN_FFT_LOG2, int(np.ceil(np.log2(4 * n))))
        vals = _unit_fhat(self.center, self.half_width, self.d, self.plateau,
                          float(W), N, float(-t0 - c * dt))
        # fhat(s) = 2 pi h(-s); -(t0 + j dt) = offset + (c - j) dt
        idx = c - np.arange(n) + N // 2
        return self.amplitude * 2 * np.pi * vals[idx]


@lru_cache(maxsize=64)
def _unit_fhat(center, half_width, d, plateau, W, N, offset):
    prof = TestFunction(center, half_width, d, plateau)
    k = synthesize_kernel(prof.transfer(), W, N, offset=offset, warn=False)
    v = k.values
    v.setflags(write=False)
    return v


def make_bump(center: float, half_width: float, d: int = 2, plateau: float = 0.5) -> TestFunction:
    return TestFunction(float(center), float(half_width), int(d), float(plateau))


def taper(t, T: float):
    """1 on |t| <= T/2, 0 for |t| >= T, smooth (all derivatives) in between."""
    u = np.clip((np.abs(np.asarray(t, dtype=float)) - 0.5 * T) / (0.5 * T), 0.0, 1.0)

    def f(v):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)

    a, b = f(1.0 - u), f(u)
    return a / (a + b)


# ---------------------------------------------------------------------------
# pairing


class PairingResult(NamedTuple):
    value: complex
    tail_estimate: float
    T: float


def _tapered_sum(xv, fv, t, dt, T):
    return complex(np.sum(xv * fv * taper(t, T)) * dt)


def _pair_symbolic(x, f, T, dt):
    n_half = int(np.ceil(T / dt))
    j = np.arange(-n_half, n_half + 1)
    t = j * dt
    fv = f.fhat_on_grid(float(t[0]), dt, t.size)
    xv = eval_signal(x, t)
    full = _tapered_sum(xv, fv, t, dt, T)
    half = _tapered_sum(xv, fv, t, dt, 0.5 * T)
    return full, abs(full - half)


def pairing(x, f: TestFunction, T: Optional[float] = None, tol: float = PAIRING_TOL) -> PairingResult:
    """<x, F> = int x(t) fhat(t) dt with a tapered truncation at |t| = T.

    For symbolic x the window doubles from a probe-dependent start until the
    change between T/2 and T is at most ``tol * (1 + |value|)``; a fixed T
    is honoured as given.  Sampled signals are paired over their own window
    (tapered about its midpoint) and never raise.
    """
    if isinstance(x, SampledSignal):
        t = x.times
        mid = 0.5 * (t[0] + t[-1])
        half_span = 0.5 * (t[-1] - t[0])
        fv = f.fhat_on_grid(x.t0, x.dt, x.n)
        full = _tapered_sum(x.values, fv, t - mid, x.dt, half_span)
        half = _tapered_sum(x.values, fv, t - mid, x.dt, 0.5 * half_span)
        return PairingResult(full, abs(full - half), half_span)
    if not isinstance(x, SymbolicSignal):
        raise ValidationError(f"cannot pair {type(x).__name__}")
    if f.amplitude == 0 or not x.active_terms:
        return PairingResult(0j, 0.0, 0.0 if T is None else float(T))
    B = float(np.max(np.abs(x.frequencies))) + abs(f.center) + f.half_width
    dt = np.pi / (2.0 * B)
    if T is not None:
        v, est = _pair_symbolic(x, f, float(T), dt)
        return PairingResult(v, est, float(T))
    T_cur = 32.0 / f.half_width
    while True:
        v, est = _pair_symbolic(x, f, T_cur, dt)
        if est <= tol * (1.0 + abs(v)):
            return PairingResult(v, est, T_cur)
        if 2 * T_cur / dt > MAX_POINTS:
            raise NonConvergenceError(
                f"pairing tail estimate {est:.3g} exceeds {tol:g} at T={T_cur:g}; "
                "the signal grows too fast for this probe"
            )
        T_cur *= 2.0


class ParsevalResult(NamedTuple):
    lhs: complex
    rhs: complex
    abs_err: float


def parseval_check(x: SymbolicSignal, f: TestFunction, T: Optional[float] = None,
                   tol: float = PAIRING_TOL) -> ParsevalResult:
    """Compare int x conj(y) dt with (1/2pi) <x, conj F>, y the kernel of F.

    The left side is a plain trapezoid sum over the sharp window [-T, T]
    (default 4096 / half_width); the right side is the tapered pairing.
    """
    g = f.conj()
    if T is None:
        T = 4096.0 / f.half_width
    if isinstance(x, SymbolicSignal) and x.active_terms and f.amplitude != 0:
        B = float(np.max(np.abs(x.frequencies))) + abs(f.center) + f.half_width
        dt = np.pi / (2.0 * B)
        n_half = int(np.ceil(T / dt))
        t = np.arange(-n_half, n_half + 1) * dt
        # conj(y(t)) = (1/2pi) ghat(t) for g = conj F
        cy = g.fhat_on_grid(float(t[0]), dt, t.size) / (2 * np.pi)
        wts = np.full(t.size, dt)
        wts[0] = wts[-1] = 0.5 * dt
        lhs = complex(np.sum(eval_signal(x, t) * cy * wts))
    else:
        lhs = 0j
    rhs = pairing(x, g, tol=tol).value / (2 * np.pi)
    return ParsevalResult(lhs, rhs, abs(lhs - rhs))


# ---------------------------------------------------------------------------
# gap test


class GapReport(NamedTuple):
    probes: list
    max_pairing: float
    passed: bool
    threshold: float


def _check_probe(f: TestFunction, gap: tuple[float, float], inside: bool) -> None:
    lo, hi = f.support
    a, b = gap
    if inside:
        ok = a <= lo and hi <= b
    else:
        ok = hi <= a or lo >= b
    if not ok:
        where = f"inside ({a:g}, {b:g})" if inside else f"outside [{a:g}, {b:g}]"
        raise ValidationError(f"probe support [{lo:g}, {hi:g}] is not {where}")


def gap_test(x, gap: Sequence[float], bank: Sequence[TestFunction], T: Optional[float] = None,
             tol: float = GAP_TOL, inside: bool = False, weight: Optional[Weight] = None) -> GapReport:
    """Check that x pairs to (numerically) zero with every probe in the gap.

    By default the gap is the complement of [gap[0], gap[1]]; ``inside``
    makes it the open interval itself.  Probes touching the boundary are
    accepted.  Passing means max |pairing| <= tol * (1 + ||x||), the norm
    being the weighted sup norm on [-100, 100].
    """
    gap = (float(gap[0]), float(gap[1]))
    if not gap[0] < gap[1]:
        raise ValidationError("gap interval must satisfy lower < upper")
    for f in bank:
        _check_probe(f, gap, inside)
    if not bank:
        return GapReport([], 0.0, True, tol)
    if weight is None:
        alpha = float(x.max_power) if isinstance(x, SymbolicSignal) else 0.0
        weight = Weight("polynomial", alpha)
    if isinstance(x, SampledSignal):
        lo, hi = x.times[0], x.times[-1]
        nrm = weighted_sup_norm(x, weight, window=(max(lo, -100.0), min(hi, 100.0))).estimate
    else:
        nrm = weighted_sup_norm(x, weight).estimate
    threshold = tol * (1.0 + nrm)
    probes = []
    for f in bank:
        v = pairing(x, f, T=T).value
        probes.append({"center": f.center, "half_width": f.half_width, "pairing": v})
    mx = max(abs(p["pairing"]) for p in probes)
    return GapReport(probes, float(mx), bool(mx <= threshold), float(threshold))
