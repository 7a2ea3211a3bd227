"""Damping weights rho and their submultiplicativity.

Three families are supported::

    polynomial   rho(t) = (1 + |t|)**(-alpha)
    exponential  rho(t) = exp(-alpha |t|)
    gaussian     rho(t) = exp(-alpha t**2)

The first two satisfy rho(t) rho(s) <= rho(t + s).  The gaussian family does
not and is kept only as a counterexample; the rest of the package refuses it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ValidationError

__all__ = [
    "Weight",
    "SubmultiplicativityReport",
    "weight_eval",
    "log_weight",
    "submultiplicativity_check",
    "require_submultiplicative",
]

FAMILIES = ("polynomial", "exponential", "gaussian")
SUBMULT_TOL = 1e-12


@dataclass(frozen=True)
class Weight:
    family: str = "polynomial"
    alpha: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown weight family {self.family!r}")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValidationError(f"weight exponent must be >= 0, got {self.alpha}")

    def __call__(self, t):
        return weight_eval(self, t)

    def to_dict(self) -> dict:
        return {"family": self.family, "alpha": float(self.alpha)}

    @classmethod
    def from_dict(cls, d: dict) -> "Weight":
        return cls(family=d.get("family", "polynomial"), alpha=float(d["alpha"]))


def log_weight(w: Weight, t):
    """log rho(t), evaluated without underflow."""
    at = np.abs(np.asarray(t, dtype=float))
    if w.family == "polynomial":
        return -w.alpha * np.log1p(at)
    if w.family == "exponential":
        return -w.alpha * at
    return -w.alpha * at * at


def weight_eval(w: Weight, t):
    """rho(t) in closed form; scalar in, scalar out."""
    out = np.exp(log_weight(w, t))
    return float(out) if np.ndim(out) == 0 else out


class SubmultiplicativityReport(NamedTuple):
    holds: bool
    worst_pair: tuple[float, float]
    worst_ratio: float


def submultiplicativity_check(
    w: Weight, pairs: Iterable[tuple[float, float]], tol: float = SUBMULT_TOL
) -> SubmultiplicativityReport:
    """Check rho(t) rho(s) <= rho(t+s) (1 + tol) on every (t, s) pair.

    ``worst_ratio`` is the largest rho(t) rho(s) / rho(t+s) seen.
    """
    p = np.asarray(list(pairs), dtype=float).reshape(-1, 2)
    if p.size == 0:
        raise ValidationError("submultiplicativity check needs at least one pair")
    t, s = p[:, 0], p[:, 1]
    log_ratio = log_weight(w, t) + log_weight(w, s) - log_weight(w, t + s)
    i = int(np.argmax(log_ratio))
    worst = float(np.exp(log_ratio[i]))
    holds = bool(np.all(log_ratio <= np.log1p(tol)))
    return SubmultiplicativityReport(holds, (float(t[i]), float(s[i])), worst)


def require_submultiplicative(w: Weight) -> Weight:
    if w.family == "gaussian" and w.alpha > 0:
        raise ValidationError(
            "gaussian weights violate rho(t)rho(s) <= rho(t+s) and are not accepted here"
        )
    return w
