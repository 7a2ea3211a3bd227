"""Signal models: exact polynomial-modulated exponentials and sampled grids.

A :class:`SymbolicSignal` is a finite sum ``sum_j c_j t**k_j exp(i nu_j t)``.
Everything about it (values, truncated transforms, anti-causal integrals)
can be computed in closed form, which makes it the reference class for the
numerical routines elsewhere in the package.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ValidationError
from .weights import Weight, log_weight

__all__ = [
    "SignalTerm",
    "SymbolicSignal",
    "SampledSignal",
    "SupNorm",
    "Certificate",
    "eval_signal",
    "weighted_sup_norm",
    "degeneracy_certificate",
    "in_weighted_space",
    "window_grid",
]

MAX_POWER = 8
# outer shell of the window used by the divergence heuristic
_OUTER_FRACTION = 0.1
# local growth exponent above which the running max is taken to diverge
_GROWTH_EXPONENT = 0.02


@dataclass(frozen=True)
class SignalTerm:
    coeff: complex = 1.0
    power: int = 0
    freq: float = 0.0

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 0:
            raise ValidationError(f"term power must be a nonnegative integer, got {self.power}")
        if self.power > MAX_POWER:
            raise ValidationError(f"term power {self.power} exceeds the maximum {MAX_POWER}")
        if not np.isfinite(self.freq):
            raise ValidationError("term frequency must be finite")
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "power", int(self.power))
        object.__setattr__(self, "freq", float(self.freq))


@dataclass(frozen=True)
class SymbolicSignal:
    terms: tuple[SignalTerm, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValidationError("a symbolic signal needs at least one term")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *terms: tuple) -> "SymbolicSignal":
        """Build from ``(coeff, power, freq)`` tuples."""
        return cls(tuple(SignalTerm(*t) for t in terms))

    def __call__(self, t):
        return eval_signal(self, t)

    def __add__(self, other: "SymbolicSignal") -> "SymbolicSignal":
        return SymbolicSignal(self.terms + other.terms)

    def scaled(self, c: complex) -> "SymbolicSignal":
        return SymbolicSignal(tuple(SignalTerm(c * s.coeff, s.power, s.freq) for s in self.terms))

    @property
    def active_terms(self) -> tuple[SignalTerm, ...]:
        return tuple(s for s in self.terms if s.coeff != 0)

    @property
    def max_power(self) -> int:
        return max((s.power for s in self.active_terms), default=0)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([s.freq for s in self.active_terms])

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coefficients, powers and frequencies as contiguous arrays."""
        ts = self.terms
        return (
            np.array([s.coeff for s in ts], dtype=np.complex128),
            np.array([s.power for s in ts], dtype=np.int64),
            np.array([s.freq for s in ts], dtype=np.float64),
        )

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"re": s.coeff.real, "im": s.coeff.imag, "power": s.power, "freq": s.freq}
                for s in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SymbolicSignal":
        try:
            return cls(tuple(
                SignalTerm(complex(float(e.get("re", 0.0)), float(e.get("im", 0.0))),
                           int(e.get("power", 0)), float(e.get("freq", 0.0)))
                for e in d["terms"]
            ))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed signal description: {exc}") from exc

    @classmethod
    def load(cls, path) -> "SymbolicSignal":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True, eq=False)
class SampledSignal:
    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (self.dt > 0):
            raise ValidationError(f"sample spacing must be positive, got {self.dt}")
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("sampled signal needs a nonempty 1-D value array")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @classmethod
    def from_function(cls, fn, window: tuple[float, float], n: int) -> "SampledSignal":
        t = window_grid(window, n)
        return cls(float(t[0]), float(t[1] - t[0]), fn(t))

    def write_csv(self, path) -> None:
        write_csv(path, self.times, self.values)

    @classmethod
    def read_csv(cls, path) -> "SampledSignal":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if len(rows) < 2:
            raise ValidationError("sampled signal CSV needs at least two rows")
        t = np.array([float(r["t"]) for r in rows])
        v = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        dts = np.diff(t)
        if not np.allclose(dts, dts[0], rtol=1e-9, atol=1e-12 * max(1.0, abs(t).max())):
            raise ValidationError("sampled signal CSV must be on a uniform grid")
        return cls(float(t[0]), float((t[-1] - t[0]) / (t.size - 1)), v)


def write_csv(path, t, values, columns: Sequence[str] = ("t", "re", "im")) -> None:
    """Plain CSV with 17 significant digits; '.' decimal regardless of locale."""
    from ._io import atomic_write_text

    lines = [",".join(columns)]
    vals = np.asarray(values)
    for ti, vi in zip(np.asarray(t, dtype=float), vals):
        lines.append(f"{ti:.17g},{vi.real:.17g},{vi.imag:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def window_grid(window: tuple[float, float], n: int) -> np.ndarray:
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValidationError(f"window must satisfy lower < upper, got {window}")
    if n < 2:
        raise ValidationError("grid needs at least two points")
    return np.linspace(lo, hi, int(n))


def eval_signal(x: SymbolicSignal, t):
    """sum_j c_j t**k_j exp(i nu_j t)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=np.complex128)
    for s in x.terms:
        if s.coeff == 0:
            continue
        out += s.coeff * t ** s.power * np.exp(1j * s.freq * t)
    return complex(out) if out.ndim == 0 else out


class SupNorm(NamedTuple):
    estimate: float
    diverging: bool


def weighted_sup_norm(x, w: Weight, window=(-100.0, 100.0), n: int = 10001) -> SupNorm:
    """Grid estimate of sup_t rho(t)|x(t)| with a heuristic divergence flag.

    The flag compares the maximum over the outer shell |t| >= 0.9 max|t| with
    the maximum inside it and converts the ratio into a local growth exponent
    d log(max) / d log|t|.  Bounded weighted signals give exponents that tend
    to zero as the window grows; ``diverging`` is raised when the exponent
    exceeds 0.02.
    """
    if isinstance(x, SampledSignal):
        t = x.times
        lo, hi = float(window[0]), float(window[1])
        mask = (t >= lo) & (t <= hi)
        t, v = t[mask], x.values[mask]
        if t.size < 2:
            raise ValidationError("window contains fewer than two samples")
    else:
        t = window_grid(window, n)
        v = eval_signal(x, t)
    g = np.abs(v) * np.exp(log_weight(w, t))
    estimate = float(g.max())

    at = np.abs(t)
    r_out = at.max()
    outer = at >= (1.0 - _OUTER_FRACTION) * r_out
    if not outer.any() or outer.all() or estimate == 0.0:
        return SupNorm(estimate, False)
    m_out, m_in = g[outer].max(), g[~outer].max()
    r_in = at[~outer].max()
    if m_in == 0.0:
        return SupNorm(estimate, bool(m_out > 0))
    if r_in <= 0 or r_out <= r_in:
        return SupNorm(estimate, False)
    growth = np.log(m_out / m_in) / np.log(r_out / r_in)
    return SupNorm(estimate, bool(growth > _GROWTH_EXPONENT))


def in_weighted_space(x: SymbolicSignal, w: Weight) -> bool:
    """Certificate that rho x is bounded.

    For polynomial weights ``t**k`` is admissible iff ``k <= alpha``; the
    exponential family dominates every polynomial.
    """
    if w.family == "polynomial":
        return x.max_power <= w.alpha
    if w.alpha > 0:
        return True
    return x.max_power == 0


class Certificate(NamedTuple):
    member: bool
    margin: float


def degeneracy_certificate(x: SymbolicSignal, omega_hat: float) -> Certificate:
    """Sufficient test that x has its spectrum degenerate at ``omega_hat``.

    The spectrum of x sits on its frequencies; the compensator
    exp(c / ((w - omega_hat)**2 + nu)) stays bounded on them uniformly in nu
    exactly when none of them equals omega_hat.  ``margin`` is the distance
    from omega_hat to the nearest frequency (inf for the zero signal).
    """
    nus = x.frequencies
    if nus.size == 0:
        return Certificate(True, float("inf"))
    margin = float(np.min(np.abs(nus - omega_hat)))
    return Certificate(margin > 0.0, margin)
