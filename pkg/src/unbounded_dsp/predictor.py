"""Causal predictors of the anti-causal filter 1/(a - i w).

The target output is y(t) = int_t^inf exp(a (t - s)) x(s) ds, whose kernel
exp(a t) 1_{t <= 0} looks into the future.  The causal family is::

    H_gamma(z) = (1 - exp(E(z))) / (a - z),   z = i w,
    E(z) = -gamma (z - a) / (z - i w_hat + gamma**-r)     ("as_printed")
    E(z) = -gamma (a - z) / (z - i w_hat + gamma**-r)     ("proof_variant")

Both conventions are kept.  The removable singularity at z = a is handled by
writing H_gamma = kappa(z) phi(E) with kappa = E / (z - a) and
phi(E) = expm1(E) / E, which is entire.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import NotAMemberError, SaturationWarning, ValidationError
from .kernels import (ExpTail, Kernel, TransferFunction, convolve_at, rho_l1_norm,
                      synthesize_kernel)
from .signals import SymbolicSignal, degeneracy_certificate, window_grid
from .weights import Weight, weight_eval

__all__ = [
    "PredictorSpec",
    "Prediction",
    "VProfile",
    "anticausal_base_transfer",
    "predictor_exponent",
    "predictor_transfer",
    "predictor_transfer_z",
    "re_exponent",
    "compensator",
    "v_gamma_profile",
    "predictor_transfer_function",
    "default_kernel_size",
    "synthesize_predictor_kernel",
    "anticausal_mass_fraction",
    "predict",
    "vgamma_study",
]

CONVENTIONS = ("as_printed", "proof_variant")
_ALIASES = {"printed": "as_printed", "proof": "proof_variant"}
RE_E_CLAMP = 700.0
DEFAULT_OMEGA_MAX = 256.0
MAX_KERNEL_N = 1 << 22


@dataclass(frozen=True)
class PredictorSpec:
    a: float = 1.0
    omega_hat: float = 0.0
    gamma: float = 8.0
    r_exp: float = 0.5
    c: float = 1.0
    convention: str = "as_printed"

    def __post_init__(self):
        conv = _ALIASES.get(self.convention, self.convention)
        if conv not in CONVENTIONS:
            raise ValidationError(f"unknown sign convention {self.convention!r}")
        object.__setattr__(self, "convention", conv)
        for name in ("a", "gamma", "r_exp", "c"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be positive, got {v}")
        if not np.isfinite(self.omega_hat):
            raise ValidationError("omega_hat must be finite")

    @property
    def sign(self) -> float:
        """+1 when E = -gamma (z - a)/D, -1 when E = +gamma (z - a)/D."""
        return 1.0 if self.convention == "as_printed" else -1.0

    @property
    def nu(self) -> float:
        return self.gamma ** (-self.r_exp)

    def to_dict(self) -> dict:
        return {"a": self.a, "omega_hat": self.omega_hat, "gamma": self.gamma,
                "r_exp": self.r_exp, "c": self.c, "convention": self.convention}


def anticausal_base_transfer(a: float, w):
    if not a > 0:
        raise ValidationError("a must be positive")
    out = 1.0 / (a - 1j * np.asarray(w, dtype=float))
    return complex(out) if np.ndim(out) == 0 else out


def _kappa(spec: PredictorSpec, z):
    D = z - 1j * spec.omega_hat + spec.nu
    return -spec.sign * spec.gamma / D


def predictor_exponent(spec: PredictorSpec, z):
    z = np.asarray(z, dtype=np.complex128)
    return _kappa(spec, z) * (z - spec.a)


def _phi(E):
    """expm1(E) / E, equal to 1 at E = 0."""
    E = np.asarray(E, dtype=np.complex128)
    small = np.abs(E) < 1e-4
    Es = np.where(small, 1.0, E)
    big = np.expm1(Es) / Es
    ser = 1.0 + E / 2.0 + E * E / 6.0 + E ** 3 / 24.0
    return np.where(small, ser, big)


def predictor_transfer_z(spec: PredictorSpec, z):
    """H_gamma at complex z; returns (values, saturated mask)."""
    z = np.asarray(z, dtype=np.complex128)
    kap = _kappa(spec, z)
    E = kap * (z - spec.a)
    sat = E.real > RE_E_CLAMP
    with np.errstate(over="ignore", invalid="ignore"):
        val = kap * _phi(E)
        if np.any(sat):
            Ec = np.minimum(E.real, RE_E_CLAMP) + 1j * E.imag
            zz = np.where(sat, z - spec.a, 1.0)
            val = np.where(sat, np.expm1(Ec) / zz, val)
    return val, sat


def predictor_transfer(spec: PredictorSpec, w, warn: bool = True):
    """H_gamma(i w) on the real frequency axis."""
    val, sat = predictor_transfer_z(spec, 1j * np.asarray(w, dtype=float))
    if warn and np.any(sat):
        import warnings

        warnings.warn(f"{int(np.sum(sat))} points saturated (Re E > {RE_E_CLAMP:g})",
                      SaturationWarning, stacklevel=2)
    return complex(val) if np.ndim(val) == 0 else val


def re_exponent(spec: PredictorSpec, w):
    """Closed form of Re E(i w) = s gamma (a nu - w (w - w_hat)) / ((w - w_hat)**2 + nu**2)."""
    w = np.asarray(w, dtype=float)
    g, nu = spec.gamma, spec.nu
    dw = w - spec.omega_hat
    return spec.sign * g * (spec.a * nu - w * dw) / (dw * dw + nu * nu)


def compensator(spec: PredictorSpec, w, nu: float):
    """G(w, w_hat, nu) = exp(c / ((w - w_hat)**2 + nu))."""
    if not nu > 0:
        raise ValidationError("compensator regularisation nu must be positive")
    w = np.asarray(w, dtype=float)
    out = np.exp(spec.c / ((w - spec.omega_hat) ** 2 + nu))
    return float(out) if out.ndim == 0 else out


def _v_gamma(spec: PredictorSpec, w):
    """H_gamma - 1/(a - i w) = -exp(E) / (a - i w), with Re E clamped."""
    z = 1j * np.asarray(w, dtype=float)
    E = predictor_exponent(spec, z)
    sat = E.real > RE_E_CLAMP
    Ec = np.minimum(E.real, RE_E_CLAMP) + 1j * E.imag
    return -np.exp(Ec) / (spec.a - z), sat, E


class VProfile(NamedTuple):
    V: np.ndarray
    damped: np.ndarray
    sup_damped: float
    re_E: np.ndarray
    saturated: np.ndarray


def v_gamma_profile(spec: PredictorSpec, w) -> VProfile:
    """Deviation V of the predictor from the anti-causal target and its compensated size.

    ``damped`` is |V| / G(w, w_hat, gamma**-r); saturated points are
    excluded from ``sup_damped``.
    """
    w = np.asarray(w, dtype=float)
    V, sat, _ = _v_gamma(spec, w)
    damped = np.abs(V) / compensator(spec, w, spec.nu)
    ok = ~sat
    sup = float(np.max(damped[ok])) if np.any(ok) else float("nan")
    return VProfile(V, damped, sup, re_exponent(spec, w), sat)


# ---------------------------------------------------------------------------
# kernel synthesis


def _tail_template(spec: PredictorSpec) -> ExpTail:
    """Causal template matching H_gamma to O(1/w**2) as |w| -> inf."""
    s = -spec.sign  # E -> s * gamma at infinity
    a = b = spec.a
    C = -math.expm1(s * spec.gamma)
    beta = spec.a + spec.nu - 1j * spec.omega_hat
    A1 = -C
    A2 = -C * (a + b) - s * spec.gamma * beta * math.exp(s * spec.gamma)
    return ExpTail((A1, A2), b, causal=True)


def predictor_transfer_function(spec: PredictorSpec) -> TransferFunction:
    return TransferFunction(
        "predictor", lambda w: predictor_transfer(spec, w, warn=False), spec.to_dict(),
        tails=(_tail_template(spec),),
    )


def default_kernel_size(spec: PredictorSpec, omega_max: float = DEFAULT_OMEGA_MAX) -> int:
    """Power of two covering the kernel's decay.

    |h(t)| behaves like exp(2 sqrt(k t) - g t) with g = gamma**-r and
    k = gamma |a + g - i w_hat|; the span is chosen where that envelope and
    the exp(-a t) tail have dropped by about exp(-25).
    """
    g = spec.nu
    k = spec.gamma * abs(spec.a + g - 1j * spec.omega_hat)
    L = 25.0
    u = (math.sqrt(k) + math.sqrt(k + g * L)) / g
    T = max(L / spec.a, L / g, u * u)
    dt = math.pi / omega_max
    n = 1 << max(10, math.ceil(math.log2(2.2 * T / dt)))
    return min(n, MAX_KERNEL_N)


def anticausal_mass_fraction(h: Kernel) -> float:
    m = np.abs(h.full_values())
    total = m.sum()
    if total == 0:
        return 0.0
    return float(m[h.times < -h.dt].sum() / total)


def synthesize_predictor_kernel(spec: PredictorSpec, omega_max: float = DEFAULT_OMEGA_MAX,
                                n: Optional[int] = None) -> tuple[Kernel, float]:
    """Kernel of H_gamma and the share of |h| found at t < -dt."""
    if n is None:
        n = default_kernel_size(spec, omega_max)
    h = synthesize_kernel(predictor_transfer_function(spec), omega_max, n)
    h.meta.update(spec.to_dict())
    return h, anticausal_mass_fraction(h)


# ---------------------------------------------------------------------------
# prediction experiment


class Prediction(NamedTuple):
    t: np.ndarray
    y_true: np.ndarray
    y_hat: np.ndarray
    sup_err: float
    roundoff_floor: float
    anticausal_mass_fraction: float
    kernel_mass: float


def predict(spec: PredictorSpec, x: SymbolicSignal, window: Sequence[float], n: int,
            alpha: float = 0.0, omega_max: float = DEFAULT_OMEGA_MAX,
            kernel: Optional[Kernel] = None, backend: Optional[str] = None) -> Prediction:
    """Compare the causal prediction with the exact anti-causal output.

    Both outputs carry the factor rho(t) = (1+|t|)**-alpha.  ``roundoff_floor``
    is eps * int |h| * max|x|, the size of float64 cancellation in the causal
    sum; errors below it are not resolvable.
    """
    if not 0 <= alpha < 0.5:
        raise ValidationError(f"prediction needs alpha in [0, 1/2), got {alpha}")
    cert = degeneracy_certificate(x, spec.omega_hat)
    if not cert.member:
        raise NotAMemberError(
            f"signal has a frequency at omega_hat={spec.omega_hat:g} "
            f"(certificate margin {cert.margin:g}); it is not in the degeneracy class"
        )
    if x.max_power > alpha:
        raise ValidationError(f"signal power {x.max_power} exceeds alpha={alpha}")
    w = Weight("polynomial", alpha)
    t = window_grid(window, n)
    rho = weight_eval(w, t)
    target = ExpTail((1.0,), spec.a, causal=False)
    y_true = rho * target.convolve_symbolic(x, t)
    if kernel is None:
        kernel, _ = synthesize_predictor_kernel(spec, omega_max)
    frac = anticausal_mass_fraction(kernel)
    y_hat = rho * convolve_at(kernel, x, t, causal=True, weight=w, backend=backend)
    mass = float(np.sum(np.abs(kernel.full_values())) * kernel.dt)
    xmax = float(np.max(np.abs(x(t))))
    floor = float(np.finfo(float).eps * mass * xmax)
    err = float(np.max(np.abs(y_true - y_hat)))
    return Prediction(t, y_true, y_hat, err, floor, frac, mass)


def vgamma_study(gammas: Sequence[float], omega_grid, base: PredictorSpec = PredictorSpec(),
                 conventions: Sequence[str] = CONVENTIONS, alpha: float = 0.25,
                 omega_max: float = DEFAULT_OMEGA_MAX, n: int = 1 << 16) -> list[dict]:
    """Per (convention, gamma): sup of the damped profile, saturation count and
    the weighted L1 norm of the kernel of V_gamma / G.

    The damped transfer tends to -exp(E_inf) / (a - i w) at large |w|; that
    anti-causal tail is handled analytically during synthesis.
    """
    import warnings

    w = np.asarray(omega_grid, dtype=float)
    rows = []
    for conv in conventions:
        for g in gammas:
            spec = replace(base, gamma=float(g), convention=conv)
            prof = v_gamma_profile(spec, w)
            e_inf = -spec.sign * spec.gamma

            def damped_transfer(om, spec=spec):
                V, _, _ = _v_gamma(spec, om)
                return V / compensator(spec, om, spec.nu)

            tail = ExpTail((-math.exp(e_inf),), spec.a, causal=False)
            H = TransferFunction("compensator", damped_transfer, spec.to_dict(), tails=(tail,))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                h = synthesize_kernel(H, omega_max, n)
            nrm = rho_l1_norm(h, Weight("polynomial", alpha))
            nsat = int(np.sum(prof.saturated))
            rows.append({
                "convention": conv,
                "gamma": float(g),
                "sup_damped": prof.sup_damped,
                "saturated_points": nsat,
                "saturated_fraction": nsat / max(1, w.size),
                "max_re_E": float(np.max(prof.re_E)),
                "rho_l1_of_damped": nrm.norm,
                "rho_l1_diverging": nrm.diverging,
            })
    return rows
