"""Closed-form stress-relaxation responses of the log-kernel Maxwell model.

The stress under held strain decays as sigma0 * E_{nu,1}(-s^nu) where
s = (E/theta)*ln(eta0 + theta*t) is the transformed time.  The nu = 1
limit collapses to the power law (eta0 + theta*t)^(-E/theta); the
large-time behavior follows the first asymptotic term; the classical
power-law-kernel analogue E_nu(-t^nu) is included for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError, GridError
from .hadamard import OperatorParams, to_transformed_time
from .mlf import MLQuery, ml_eval

__all__ = [
    "RelaxationScenario",
    "GridKind",
    "GridSpec",
    "SampledCurve",
    "stress_relaxation",
    "stress_relaxation_nu1",
    "asymptotic_stress",
    "classical_fractional_maxwell",
    "sample_curve",
]


@dataclass(frozen=True)
class RelaxationScenario:
    """Operator parameters plus the stress scale and held strain."""

    p: OperatorParams
    sigma0: float = 1.0
    epsilon0: float = 1.0

    def __post_init__(self):
        if not self.sigma0 > 0.0:
            raise DomainError(f"sigma0 must be > 0, got {self.sigma0}")


class GridKind(Enum):
    LINEAR = "linear"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class GridSpec:
    kind: GridKind
    t_min: float
    t_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise GridError(f"n_points must be >= 2, got {self.n_points}")
        if not self.t_min < self.t_max:
            raise GridError(f"need t_min < t_max, got [{self.t_min}, {self.t_max}]")
        if self.kind is GridKind.LOGARITHMIC and self.t_min <= 0.0:
            raise GridError(f"logarithmic grid needs t_min > 0, got {self.t_min}")

    def points(self) -> np.ndarray:
        if self.kind is GridKind.LINEAR:
            return np.linspace(self.t_min, self.t_max, self.n_points)
        return np.geomspace(self.t_min, self.t_max, self.n_points)


@dataclass(frozen=True)
class SampledCurve:
    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise GridError("times and values must have equal length")
        if np.any(np.diff(self.times) <= 0.0):
            raise GridError("times must be strictly increasing")


def _transformed_argument(t, nu: float, p: OperatorParams):
    s = to_transformed_time(t, p)
    return -np.power(s, nu)


def stress_relaxation(t, nu: float, sc: RelaxationScenario):
    """Relaxing stress sigma0 * E_{nu,1}(-((E/theta) ln(eta0+theta t))^nu).

    Accepts a scalar or array of times, all >= t_start; equals sigma0
    exactly at t_start.  nu must lie in (0, 1].
    """
    if not 0.0 < nu <= 1.0:
        raise DomainError(f"nu must be in (0, 1], got {nu}")
    x = _transformed_argument(t, nu, sc.p)
    if np.isscalar(t):
        return sc.sigma0 * ml_eval(MLQuery(alpha=nu, x=float(x))).value
    return sc.sigma0 * np.array(
        [ml_eval(MLQuery(alpha=nu, x=float(xi))).value for xi in np.atleast_1d(x)]
    )


def stress_relaxation_nu1(t, sc: RelaxationScenario):
    """Order-1 closed form sigma0 * (eta0 + theta*t)^(-E/theta)."""
    p = sc.p
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < p.t_start):
        raise DomainError(f"t must be >= t_start = {p.t_start}, got {t}")
    out = sc.sigma0 * (p.eta0 + p.theta * t_arr) ** (-p.E / p.theta)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def asymptotic_stress(t, nu: float, sc: RelaxationScenario):
    """First-term large-time tail sigma0 / (Gamma(1-nu) * s^nu).

    Here s = (E/theta)*ln(eta0+theta*t) must be strictly positive, so t
    must exceed t_start; nu must be strictly below 1, where Gamma(1-nu)
    diverges and the tail amplitude collapses to zero.
    """
    if not 0.0 < nu < 1.0:
        raise DomainError(f"asymptotic tail requires nu in (0, 1), got {nu}")
    p = sc.p
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= p.t_start):
        raise DomainError(f"t must be > t_start = {p.t_start}, got {t}")
    s = (p.E / p.theta) * np.log(p.eta0 + p.theta * t_arr)
    out = sc.sigma0 / (math.gamma(1.0 - nu) * np.power(s, nu))
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def classical_fractional_maxwell(t, nu: float):
    """Comparison response E_{nu,1}(-t^nu) of the power-law-kernel model."""
    if not 0.0 < nu <= 1.0:
        raise DomainError(f"nu must be in (0, 1], got {nu}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise DomainError(f"t must be >= 0, got {t}")
    x = -np.power(t_arr, nu)
    if np.isscalar(t) or t_arr.ndim == 0:
        return ml_eval(MLQuery(alpha=nu, x=float(x))).value
    return np.array([ml_eval(MLQuery(alpha=nu, x=float(xi))).value for xi in x])


def sample_curve(model: Callable, g: GridSpec, meta: dict | None = None) -> SampledCurve:
    """Evaluate a scalar model over the grid, one value per node.

    ``model`` maps a time array (or scalar) to values; any model error
    propagates immediately.  The result records the grid descriptor in
    ``meta`` alongside caller-supplied entries.
    """
    t = g.points()
    try:
        values = np.asarray(model(t), dtype=float)
        if values.shape != t.shape:
            raise TypeError
    except TypeError:  # scalar-only model
        values = np.array([float(model(ti)) for ti in t])
    info = {"kind": g.kind.value, "t_min": g.t_min, "t_max": g.t_max,
            "n_points": g.n_points}
    if meta:
        info.update(meta)
    return SampledCurve(times=t, values=values, meta=info)
