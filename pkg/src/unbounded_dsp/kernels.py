"""Transfer functions, kernel synthesis and convolution.

Conventions used throughout::

    H(w)      = int h(t) exp(-i w t) dt
    h(t)      = (1 / 2 pi) int H(w) exp(i w t) dw
    (h * x)(t) = int h(t - s) x(s) ds

so ``h * exp(i nu .) = H(nu) exp(i nu .)``.  A transfer function is a
constant (applied exactly as ``constant * x``) plus an integrable part.  The
integrable part may carry exponential tails whose kernels are known in
closed form; these are subtracted before the inverse FFT and added back
analytically, which removes the ringing of slowly decaying spectra.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import _accel
from .errors import DivergenceError, SpectralLeakageWarning, ValidationError
from .signals import SampledSignal, SymbolicSignal, eval_signal, window_grid
from .weights import Weight, log_weight, require_submultiplicative

__all__ = [
    "ExpTail",
    "TransferFunction",
    "Kernel",
    "RhoL1",
    "synthesize_kernel",
    "trapezoid_kernel_closed_form",
    "trapezoid_transfer",
    "ideal_rect_kernel",
    "rho_l1_norm",
    "convolve",
    "convolve_at",
]

KINDS = ("lowpass", "highpass", "predictor", "compensator", "anticausal_base", "tabulated", "product")
LEAKAGE_TOL = 1e-8
# relative Cauchy threshold and tail-ratio limit for the dyadic norm estimator
CAUCHY_TOL = 1e-4
RATIO_LIMIT = 0.9


# ---------------------------------------------------------------------------
# exponential tails


@dataclass(frozen=True)
class ExpTail:
    """One-sided exponential template with a closed-form kernel.

    causal:      H(w) = sum_m c_m / (b + i w)**(m+1),  h(t) = sum_m c_m t**m/m! e^{-bt}, t > 0
    anti-causal: H(w) = sum_m c_m / (b - i w)**(m+1),  h(t) = sum_m c_m (-t)**m/m! e^{bt}, t < 0

    At t = 0 the stored value is the midpoint of the jump.
    """

    coeffs: tuple
    rate: float
    causal: bool = True

    def __post_init__(self):
        if not self.rate > 0:
            raise ValidationError("exponential tail needs a positive rate")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    def transfer(self, w):
        w = np.asarray(w, dtype=float)
        base = self.rate + 1j * w if self.causal else self.rate - 1j * w
        out = np.zeros(w.shape, dtype=np.complex128)
        for m, c in enumerate(self.coeffs):
            out += c / base ** (m + 1)
        return out

    def kernel(self, t):
        t = np.asarray(t, dtype=float)
        u = t if self.causal else -t
        up = np.where(u > 0, u, 0.0)
        env = np.exp(-self.rate * up)
        out = np.zeros(t.shape, dtype=np.complex128)
        for m, c in enumerate(self.coeffs):
            out += c * up ** m / math.factorial(m) * env
        out = np.where(u > 0, out, 0.0)
        return np.where(u == 0, 0.5 * self.coeffs[0], out)

    def convolve_symbolic(self, x: SymbolicSignal, t):
        """Exact (tail * x)(t) for a symbolic signal."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=np.complex128)
        for s in x.active_terms:
            k, nu = s.power, s.freq
            lam = self.rate + 1j * nu if self.causal else self.rate - 1j * nu
            sign = -1.0 if self.causal else 1.0
            acc = np.zeros(t.shape, dtype=np.complex128)
            for m, c in enumerate(self.coeffs):
                if c == 0:
                    continue
                for j in range(k + 1):
                    f = math.comb(k, j) * math.factorial(m + j) / math.factorial(m)
                    acc += c * f * sign ** j * t ** (k - j) / lam ** (m + j + 1)
            out += s.coeff * np.exp(1j * nu * t) * acc
        return out


# ---------------------------------------------------------------------------
# transfer functions


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """``constant + func(w)``; ``tails`` are exponential parts contained in func."""

    kind: str
    func: Callable
    params: dict = field(default_factory=dict)
    constant: complex = 0.0
    tails: tuple = ()
    closed_form: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown transfer-function kind {self.kind!r}")
        object.__setattr__(self, "tails", tuple(self.tails))

    def integrable(self, w):
        w = np.asarray(w, dtype=float)
        return np.asarray(self.func(w), dtype=np.complex128) * np.ones(w.shape)

    def __call__(self, w):
        out = self.constant + self.integrable(w)
        return complex(out) if np.ndim(out) == 0 else out

    def residual(self, w):
        """Integrable part with the exponential tails removed."""
        out = self.integrable(w)
        for tl in self.tails:
            out = out - tl.transfer(w)
        return out

    @classmethod
    def zero(cls) -> "TransferFunction":
        return cls("tabulated", lambda w: np.zeros(np.shape(w)), {"zero": True})

    @classmethod
    def anticausal_base(cls, a: float) -> "TransferFunction":
        if not a > 0:
            raise ValidationError("anti-causal base rate must be positive")
        tail = ExpTail((1.0,), a, causal=False)
        return cls("anticausal_base", tail.transfer, {"a": float(a)}, tails=(tail,))

    @classmethod
    def tabulated(cls, omega, values) -> "TransferFunction":
        omega = np.asarray(omega, dtype=float)
        values = np.asarray(values, dtype=np.complex128)
        if omega.ndim != 1 or omega.size != values.size or omega.size < 2:
            raise ValidationError("tabulated transfer needs matching 1-D grids")
        if np.any(np.diff(omega) <= 0):
            raise ValidationError("tabulated frequencies must increase")

        def f(w):
            re = np.interp(w, omega, values.real, left=0.0, right=0.0)
            im = np.interp(w, omega, values.imag, left=0.0, right=0.0)
            return re + 1j * im

        return cls("tabulated", f, {"n": int(omega.size)})

    def __mul__(self, other: "TransferFunction") -> "TransferFunction":
        if self.tails or other.tails:
            raise ValidationError("products of transfers with exponential tails are not supported")
        cf, cg = self.constant, other.constant
        ff, fg = self.integrable, other.integrable

        def f(w):
            a, b = ff(w), fg(w)
            return cf * b + cg * a + a * b

        return TransferFunction("product", f, {"factors": [self.kind, other.kind]}, constant=cf * cg)


def trapezoid_transfer(p: float, q: float) -> TransferFunction:
    """Lowpass with a linear transition from 1 at |w|=p to 0 at |w|=q."""
    if not 0 < p < q:
        raise ValidationError(f"need 0 < p < q, got p={p}, q={q}")

    def f(w):
        aw = np.abs(w)
        return np.clip((q - aw) / (q - p), 0.0, 1.0)

    return TransferFunction(
        "lowpass", f, {"p": p, "q": q, "d": 1},
        closed_form=lambda t: trapezoid_kernel_closed_form(p, q, t),
    )


def trapezoid_kernel_closed_form(p: float, q: float, t):
    """(cos pt - cos qt) / (pi (q-p) t**2), with value (p+q)/(2 pi) at t = 0.

    Evaluated as ((p+q)/2pi) sinc(St) sinc(Dt), S=(p+q)/2, D=(q-p)/2, which
    has no cancellation near t = 0.
    """
    if not 0 < p < q:
        raise ValidationError(f"need 0 < p < q, got p={p}, q={q}")
    t = np.asarray(t, dtype=float)
    s, d = 0.5 * (p + q), 0.5 * (q - p)
    out = (p + q) / (2 * np.pi) * np.sinc(s * t / np.pi) * np.sinc(d * t / np.pi)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True, eq=False)
class Kernel:
    """Impulse response on the grid t_j = t0 + j dt, j < n (n a power of two).

    ``values`` hold the numerically synthesized part; ``tails`` are added
    analytically, and ``delta`` is the weight of a Dirac part applied as an
    exact pass-through.
    """

    t0: float
    dt: float
    values: np.ndarray = field(repr=False)
    delta: complex = 0.0
    tails: tuple = ()
    closed_form: Optional[str] = None
    meta: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        n = v.size
        if v.ndim != 1 or n < 2 or n & (n - 1):
            raise ValidationError(f"kernel length must be a power of two, got {n}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("kernel values must be finite")
        if not self.dt > 0:
            raise ValidationError("kernel spacing must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "tails", tuple(self.tails))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def center(self) -> float:
        return self.t0 + self.dt * (self.n // 2)

    def full_values(self) -> np.ndarray:
        """Synthesized part plus sampled tails (the Dirac part excluded)."""
        out = self.values.copy()
        t = self.times
        for tl in self.tails:
            out += tl.kernel(t)
        return out

    def shifted(self, s: float) -> "Kernel":
        """Kernel of ``H(w) exp(-i w s)``, i.e. h(t - s)."""
        if self.tails:
            raise ValidationError("shifting kernels with analytic tails is not supported")
        return Kernel(self.t0 + s, self.dt, self.values, self.delta, (), self.closed_form,
                      dict(self.meta, shift=s))

    @classmethod
    def from_function(cls, fn, dt: float, n: int, center: float = 0.0,
                      closed_form: Optional[str] = None) -> "Kernel":
        t0 = center - dt * (n // 2)
        t = t0 + dt * np.arange(n)
        return cls(t0, dt, fn(t), closed_form=closed_form)

    def write_csv(self, path) -> None:
        from .signals import write_csv

        write_csv(path, self.times, self.full_values())


def synthesize_kernel(H: TransferFunction, omega_max: float, n: int, offset: float = 0.0,
                      warn: bool = True) -> Kernel:
    """Sample h(t) = (1/2pi) int_{-W}^{W} H(w) exp(iwt) dw with an n-point FFT.

    The frequency grid is w_k = -W + k dw, dw = 2W/n, and the output grid is
    t_j = offset + (j - n/2) dt with dt = pi/W.  The k = 0 sample carries the
    average of both endpoints (trapezoid rule), so the result equals the
    periodised continuous integral exactly for band-limited H.
    """
    n = int(n)
    if n < 16 or n & (n - 1):
        raise ValidationError(f"n must be a power of two >= 16, got {n}")
    if not omega_max > 0:
        raise ValidationError("omega_max must be positive")
    W = float(omega_max)
    dw = 2 * W / n
    dt = np.pi / W
    k = np.arange(n)
    w = -W + dw * k
    R = H.residual(w)
    R_end = complex(H.residual(np.array([W]))[0])
    leak = max(abs(R[0]), abs(R_end))
    if warn and leak > LEAKAGE_TOL:
        warnings.warn(
            f"transfer magnitude {leak:.3g} at the truncation edge {W:g} exceeds {LEAKAGE_TOL:g}",
            SpectralLeakageWarning, stacklevel=2,
        )
    R[0] = 0.5 * (R[0] + R_end * np.exp(2j * W * offset))
    sign_k = np.where(k % 2 == 0, 1.0, -1.0)
    G = R * np.exp(1j * dw * k * offset) * sign_k * np.exp(-1j * W * offset)
    j = k - n // 2
    sign_j = np.where(j % 2 == 0, 1.0, -1.0)
    h = (dw / (2 * np.pi)) * n * np.fft.ifft(G) * sign_j
    t0 = offset - (n // 2) * dt
    tag = None
    if H.closed_form is not None:
        tag = H.kind
    meta = {"omega_max": W, "n": n, "edge_magnitude": leak}
    meta.update({k_: v for k_, v in H.params.items() if isinstance(v, (int, float, str))})
    return Kernel(t0, dt, h, delta=complex(H.constant), tails=H.tails,
                  closed_form=tag, meta=meta)


def ideal_rect_kernel(p: float, dt: float = 0.5, n: int = 1 << 18) -> Kernel:
    """Sampled sin(pt)/(pi t) of the brick-wall lowpass 1_{|w| <= p}."""
    if not p > 0:
        raise ValidationError("cutoff must be positive")
    return Kernel.from_function(lambda t: (p / np.pi) * np.sinc(p * t / np.pi), dt, n,
                                closed_form="rect")


# ---------------------------------------------------------------------------
# weighted L1 norm


class RhoL1(NamedTuple):
    norm: float
    diverging: bool
    last_increment: float
    decay_ratio: float
    partial_sums: tuple


def rho_l1_norm(h: Kernel, w: Weight, levels: int = 10) -> RhoL1:
    """Estimate int |h(t)| / rho(t) dt with a dyadic Cauchy test.

    Partial sums I_j are taken over |t - c| <= R_j, R_j = R / 2**(J-j), where
    c is the grid centre and R its half-span.  With increments D_j = I_j -
    I_{j-1}, the estimate converges when D_J / I_J <= 1e-4 or the geometric
    ratio r = sqrt(D_J / D_{J-2}) is at most 0.9; the tail is then
    extrapolated as D_J r / (1 - r).  Otherwise ``diverging`` is set and the
    grid sum is reported.  The Dirac part is not part of this norm.
    """
    if w.family != "polynomial":
        raise ValidationError("the weighted L1 estimator supports polynomial weights only")
    require_submultiplicative(w)
    key = (w.family, float(w.alpha), int(levels))
    if key in h._cache:
        return h._cache[key]
    t = h.times
    g = np.abs(h.full_values()) * np.exp(-log_weight(w, t)) * h.dt
    total = float(g.sum())
    if total == 0.0:
        res = RhoL1(0.0, False, 0.0, 0.0, (0.0,))
        h._cache[key] = res
        return res
    dist = np.abs(t - h.center)
    R = dist.max()
    J = int(max(2, min(levels, math.floor(math.log2(max(R / (16 * h.dt), 4.0))))))
    radii = R / 2.0 ** np.arange(J, -1, -1)
    order = np.argsort(dist, kind="stable")
    cums = np.cumsum(g[order])
    idx = np.searchsorted(dist[order], radii, side="right")
    partial = np.where(idx > 0, cums[np.maximum(idx - 1, 0)], 0.0)
    partial[-1] = total
    inc = np.diff(partial)
    dJ, dJ2 = inc[-1], inc[-3]
    rel = dJ / total
    r = math.sqrt(dJ / dJ2) if dJ2 > 0 else 0.0
    if rel <= CAUCHY_TOL or r <= RATIO_LIMIT:
        norm = total + (dJ * r / (1 - r) if r < 1 else 0.0)
        res = RhoL1(norm, False, float(dJ), r, tuple(partial))
    else:
        res = RhoL1(total, True, float(dJ), r, tuple(partial))
    h._cache[key] = res
    return res


# ---------------------------------------------------------------------------
# convolution


def _certifying_weight(x) -> Weight:
    if isinstance(x, SymbolicSignal):
        return Weight("polynomial", float(x.max_power))
    return Weight("polynomial", 0.0)


def convolve_at(h: Kernel, x, t, causal: bool = False, weight: Optional[Weight] = None,
                check: bool = True, backend: Optional[str] = None) -> np.ndarray:
    """(h * x)(t) at the given points.

    The integral runs over the kernel grid (only tau >= 0 when ``causal``),
    with the tau = 0 sample weighted fully because it stores the midpoint of
    any jump there.  Symbolic signals are evaluated exactly at every s = t - tau,
    analytic tails are convolved in closed form and the Dirac part is exact.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if check:
        nrm = rho_l1_norm(h, weight or _certifying_weight(x))
        if nrm.diverging:
            raise DivergenceError(
                "kernel weighted L1 norm does not converge "
                f"(last dyadic increment {nrm.last_increment:.3g}); the convolution may diverge"
            )
    tau = h.times
    hw = h.values * h.dt
    if causal:
        keep = tau >= -1e-9 * h.dt
        tau0 = float(tau[keep][0]) if keep.any() else 0.0
        hw = hw[keep]
    else:
        tau0 = h.t0
    if isinstance(x, SymbolicSignal):
        coeffs, powers, freqs = x.arrays()
        y = _accel.convolve_symbolic(tau0, h.dt, hw, t, coeffs, powers, freqs, backend=backend)
        for tl in h.tails:
            if causal and not tl.causal:
                continue
            y = y + tl.convolve_symbolic(x, t)
        if h.delta != 0:
            y = y + h.delta * eval_signal(x, t)
        return y
    if isinstance(x, SampledSignal):
        if h.tails:
            full = h.full_values() * h.dt
            hw = full[tau >= -1e-9 * h.dt] if causal else full
        y = _accel.convolve_sampled(tau0, h.dt, hw, t, x.t0, x.dt, x.values)
        if h.delta != 0:
            xs = x.times
            y = y + h.delta * (np.interp(t, xs, x.values.real, left=0.0, right=0.0)
                               + 1j * np.interp(t, xs, x.values.imag, left=0.0, right=0.0))
        return y
    raise ValidationError(f"cannot convolve with {type(x).__name__}")


def convolve(h: Kernel, x, window: Sequence[float], n: int, **kw) -> SampledSignal:
    """Convolution sampled on the inclusive grid linspace(window[0], window[1], n)."""
    t = window_grid(window, n)
    y = convolve_at(h, x, t, **kw)
    return SampledSignal(float(t[0]), float(t[1] - t[0]), y)
