"""Lowpass and highpass transfer functions with polynomial transition bands.

The lowpass profile is 1 on [-p, p], 0 outside [-q, q], and follows mu(|w|)
on the transition, where mu(p) = 1, mu(q) = 0 and, for d = 2, mu' vanishes at
both ends::

    d = 1:  mu(w) = (q - w) / (q - p)
    d = 2:  mu(w) = 1 - P(w) / M,  P(w) = int_p^w (s - p)(s - q) ds,  M = P(q)

A d-times differentiable profile gives a kernel decaying like |t|**-(d+1),
which lies in the weighted L1 space for rho = (1+|t|)**-alpha when
d > alpha + 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .kernels import (Kernel, TransferFunction, convolve_at, rho_l1_norm, synthesize_kernel,
                      trapezoid_kernel_closed_form)
from .signals import SampledSignal, SymbolicSignal, in_weighted_space, window_grid
from .weights import Weight

__all__ = [
    "FilterSpec",
    "FilterResult",
    "select_smoothness",
    "mu_eval",
    "mu_profile",
    "filter_transfer",
    "lowpass_profile",
    "transfer_function",
    "design_filter",
    "apply_filter",
    "default_probe_bank",
]

KINDS = ("lowpass", "highpass")
DEFAULT_KERNEL_N = 1 << 16
DEFAULT_GAP_WINDOW = (-64.0, 64.0)


def _sobolev_interval(d: int, alpha: float) -> tuple[float, float]:
    return max(1.0, 1.0 / (d - alpha)), 2.0


@dataclass(frozen=True)
class FilterSpec:
    p: float
    q: float
    d: int = 2
    kind: str = "lowpass"
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind in ("lp", "hp"):
            object.__setattr__(self, "kind", {"lp": "lowpass", "hp": "highpass"}[self.kind])
        if self.kind not in KINDS:
            raise ValidationError(f"filter kind must be lowpass or highpass, got {self.kind!r}")
        if not (np.isfinite(self.p) and np.isfinite(self.q) and 0 < self.p < self.q):
            raise ValidationError(f"need 0 < p < q, got p={self.p}, q={self.q}")
        if self.d not in (1, 2):
            raise ValidationError(f"smoothness d must be 1 or 2, got {self.d}")
        if not (np.isfinite(self.alpha) and self.alpha >= 0):
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")
        lo, hi = _sobolev_interval(self.d, self.alpha)
        if not (self.d > self.alpha + 0.5 and lo < hi):
            raise ValidationError(
                f"d={self.d} is too rough for alpha={self.alpha}: need d > alpha + 1/2"
            )
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def sobolev_r(self) -> float:
        lo, hi = _sobolev_interval(self.d, self.alpha)
        return 0.5 * (lo + hi)

    @property
    def gap(self) -> tuple[float, float]:
        """Lowpass: outputs vanish spectrally outside [-q, q]; highpass: inside (-p, p)."""
        return (-self.q, self.q) if self.kind == "lowpass" else (-self.p, self.p)

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "d": self.d, "kind": self.kind, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d: dict) -> "FilterSpec":
        try:
            return cls(float(d["p"]), float(d["q"]), int(d.get("d", 2)),
                       d.get("kind", "lowpass"), float(d.get("alpha", 0.0)))
        except KeyError as exc:
            raise ValidationError(f"filter description lacks {exc}") from exc


def select_smoothness(alpha: float) -> tuple[int, float]:
    """Smallest d in {1, 2} with d > alpha + 1/2, and the midpoint r of its admissible range."""
    if not (np.isfinite(alpha) and alpha >= 0):
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    if alpha >= 1.5:
        raise ValidationError(f"alpha={alpha} needs a profile smoother than d=2")
    d = 1 if 1 > alpha + 0.5 else 2
    lo, hi = _sobolev_interval(d, alpha)
    return d, 0.5 * (lo + hi)


def mu_profile(p: float, q: float, d: int, w):
    """Vectorised transition profile on [p, q] (values outside are not checked)."""
    w = np.asarray(w, dtype=float)
    if d == 1:
        return (q - w) / (q - p)
    M = -((q - p) ** 3) / 6.0
    u = w - p
    # P(w) = int_p^w (s-p)(s-q) ds = u**3/3 - (q-p) u**2/2
    P = u ** 3 / 3.0 - (q - p) * u ** 2 / 2.0
    return 1.0 - P / M


def mu_eval(spec: FilterSpec, w: float) -> float:
    if not spec.p <= w <= spec.q:
        raise ValidationError(f"mu is defined on [p, q] = [{spec.p}, {spec.q}], got {w}")
    return float(mu_profile(spec.p, spec.q, spec.d, w))


def lowpass_profile(p: float, q: float, d: int, w):
    aw = np.abs(np.asarray(w, dtype=float))
    out = np.where(aw <= p, 1.0, 0.0)
    band = (aw > p) & (aw <= q)
    if np.any(band):
        out = np.where(band, mu_profile(p, q, d, np.clip(aw, p, q)), out)
    return out


def filter_transfer(spec: FilterSpec, w):
    lp = lowpass_profile(spec.p, spec.q, spec.d, w)
    out = lp if spec.kind == "lowpass" else 1.0 - lp
    return float(out) if np.ndim(out) == 0 else out


def transfer_function(spec: FilterSpec) -> TransferFunction:
    """Transfer object; the highpass is the constant 1 minus the lowpass."""
    p, q, d = spec.p, spec.q, spec.d
    params = spec.to_dict()
    cf = (lambda t: trapezoid_kernel_closed_form(p, q, t)) if d == 1 else None
    if spec.kind == "lowpass":
        return TransferFunction("lowpass", lambda w: lowpass_profile(p, q, d, w), params,
                                closed_form=cf)
    neg = (lambda t: -trapezoid_kernel_closed_form(p, q, t)) if d == 1 else None
    return TransferFunction("highpass", lambda w: -lowpass_profile(p, q, d, w), params,
                            constant=1.0, closed_form=neg)


def design_filter(spec: FilterSpec, omega_max: Optional[float] = None,
                  n: int = DEFAULT_KERNEL_N) -> Kernel:
    """Synthesize the filter kernel; default frequency truncation is 8 q."""
    W = 8.0 * spec.q if omega_max is None else float(omega_max)
    if W <= spec.q:
        raise ValidationError(f"omega_max={W} must exceed the stopband edge q={spec.q}")
    k = synthesize_kernel(transfer_function(spec), W, n)
    k.meta.update(spec.to_dict())
    k.meta["rho_l1"] = rho_l1_norm(k, Weight("polynomial", spec.alpha)).norm
    return k


def default_probe_bank(spec: FilterSpec):
    """Three d=2 probes strictly inside the claimed gap."""
    from .spectral import make_bump

    if spec.kind == "lowpass":
        e = spec.q
        return [make_bump(m * e, 0.4 * e, 2, 0.5) for m in (1.5, 2.0, 3.0)]
    e = spec.p
    return [make_bump(c * e, 0.4 * e, 2, 0.5) for c in (-0.5, 0.0, 0.5)]


class FilterResult(NamedTuple):
    y: SampledSignal
    gap_report: object
    kernel: Kernel


def apply_filter(spec: FilterSpec, x: SymbolicSignal, window: Sequence[float], n: int,
                 kernel: Optional[Kernel] = None, gap_window: Sequence[float] = DEFAULT_GAP_WINDOW,
                 bank=None, backend: Optional[str] = None) -> FilterResult:
    """Filter a symbolic signal and verify the output's spectrum gap.

    The gap test needs the output on a longer stretch than a short display
    window; it is evaluated on the union of ``window`` and ``gap_window`` at a
    spacing that resolves every probe.
    """
    from .spectral import gap_test

    w = Weight("polynomial", spec.alpha)
    if not in_weighted_space(x, w):
        raise ValidationError(
            f"signal power {x.max_power} exceeds alpha={spec.alpha}; it is not in the weighted space"
        )
    h = design_filter(spec) if kernel is None else kernel
    t = window_grid(window, n)
    y = convolve_at(h, x, t, weight=w, backend=backend)
    out = SampledSignal(float(t[0]), float(t[1] - t[0]), y)

    if bank is None:
        bank = default_probe_bank(spec)
    report = None
    if bank:
        # the grid must resolve the probes and every input frequency, or
        # content above its Nyquist limit aliases into the gap
        B = max(max(abs(f.center) + f.half_width for f in bank),
                float(np.max(np.abs(x.frequencies), initial=0.0)) * 1.25)
        lo = min(window[0], gap_window[0])
        hi = max(window[1], gap_window[1])
        dt = np.pi / (2.0 * B)
        m = int(np.ceil((hi - lo) / dt)) + 1
        tg = lo + dt * np.arange(m)
        yg = SampledSignal(lo, dt, convolve_at(h, x, tg, weight=w, backend=backend))
        report = gap_test(yg, spec.gap, bank, inside=spec.kind == "highpass", weight=w)
    return FilterResult(out, report, h)
