"""Least-squares fitting of the relaxation model to observed (t, stress) data.

Free parameters among {nu, E, theta, eta0, sigma0} are estimated with a
bounded derivative-free simplex descent; the order derivative of the
Mittag-Leffler function is not available, so gradient methods are out.
E, theta and eta0 enter the response only through (E/theta)^nu *
ln^nu(eta0 + theta*t), so freeing all three at once is refused unless the
caller overrides the identifiability guard.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .errors import (
    DomainError,
    NonConvergentError,
    ParseError,
    QuadratureFailure,
    ValidationError,
)
from .hadamard import OperatorParams
from .models import RelaxationScenario, stress_relaxation

__all__ = [
    "Dataset",
    "FitConfig",
    "FitResult",
    "PARAM_NAMES",
    "DEFAULT_BOUNDS",
    "load_dataset",
    "fit_relaxation",
]

PARAM_NAMES = ("nu", "E", "theta", "eta0", "sigma0")

DEFAULT_BOUNDS: dict[str, tuple[float, float]] = {
    "nu": (1e-3, 1.0),
    "E": (1e-6, 1e6),
    "theta": (1e-6, 1e6),
    "eta0": (0.0, 1e6),
    "sigma0": (1e-6, 1e6),
}

DEFAULT_START: dict[str, float] = {
    "nu": 0.5,
    "E": 1.0,
    "theta": 1.0,
    "eta0": 1.0,
    "sigma0": 1.0,
}

MIN_SAMPLES = 5


@dataclass(frozen=True)
class Dataset:
    """Observed relaxation samples: times (non-decreasing) and stresses (> 0)."""

    samples: tuple[tuple[float, float], ...]
    source: str = "<memory>"

    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    def stresses(self) -> np.ndarray:
        return np.array([s for _, s in self.samples])


@dataclass(frozen=True)
class FitConfig:
    """Which parameters move, where they may go, and when to stop.

    ``bounds`` and ``initial`` override the per-parameter defaults;
    ``tol`` applies to the relative change of the residual, and the fit
    is converged once that change stays below tol for 3 consecutive
    accepted steps.  ``allow_degenerate`` unlocks fitting E, theta and
    eta0 simultaneously despite their partial redundancy.
    """

    free_params: tuple[str, ...] = ("nu",)
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    initial: dict[str, float] = field(default_factory=dict)
    max_iters: int = 500
    tol: float = 1e-10
    allow_degenerate: bool = False

    def __post_init__(self):
        for name in self.free_params:
            if name not in PARAM_NAMES:
                raise ValidationError(f"unknown parameter {name!r}")
        if len(set(self.free_params)) != len(self.free_params):
            raise ValidationError("free_params contains duplicates")
        for name, (lo, hi) in self.bounds.items():
            if name not in PARAM_NAMES:
                raise ValidationError(f"bounds given for unknown parameter {name!r}")
            dlo, dhi = DEFAULT_BOUNDS[name]
            if not (dlo <= lo < hi <= dhi):
                raise ValidationError(
                    f"bounds for {name} must satisfy {dlo} <= lo < hi <= {dhi}, "
                    f"got ({lo}, {hi})"
                )
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.tol > 0.0:
            raise ValidationError(f"tol must be > 0, got {self.tol}")


@dataclass(frozen=True)
class FitResult:
    estimates: dict[str, float]
    residual: float
    iterations: int
    converged: bool


def _parse_row(parts: list[str], line_no: int) -> tuple[float, float]:
    if len(parts) != 2:
        raise ParseError(f"expected 2 columns, got {len(parts)}", line_no)
    try:
        t, sigma = float(parts[0]), float(parts[1])
    except ValueError:
        raise ParseError(f"non-numeric row {parts!r}", line_no) from None
    if not (math.isfinite(t) and math.isfinite(sigma)):
        raise ValidationError(f"line {line_no}: non-finite value in {parts!r}")
    return t, sigma


def load_dataset(source: str | Path | TextIO, delimiter: str | None = None) -> Dataset:
    """Read a two-column (t, sigma) table from a file path or stream.

    Fields may be separated by commas or whitespace (auto-detected per
    line unless ``delimiter`` is given); one optional header line is
    skipped.  Raises ParseError with the 1-based line number for a
    malformed row, ValidationError for non-finite values, sigma <= 0, or
    decreasing times.
    """
    if isinstance(source, (str, Path)):
        name = str(source)
        with open(source, "r") as fh:
            lines = fh.readlines()
    else:
        name = getattr(source, "name", "<stream>")
        lines = source.readlines()

    samples: list[tuple[float, float]] = []
    prev_t = -math.inf
    for idx, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(delimiter) if delimiter else line.replace(",", " ").split()
        if not samples and idx == 1:
            try:
                float(parts[0])
            except ValueError:
                continue  # header line
        t, sigma = _parse_row(parts, idx)
        if sigma <= 0.0:
            raise ValidationError(f"line {idx}: stress must be > 0, got {sigma}")
        if t < prev_t:
            raise ValidationError(f"line {idx}: times must be non-decreasing, got {t}")
        prev_t = t
        samples.append((t, sigma))

    if not samples:
        raise ValidationError(f"{name}: no data rows found")
    return Dataset(samples=tuple(samples), source=name)


def _model_stresses(t: np.ndarray, params: dict[str, float]) -> np.ndarray:
    p = OperatorParams(
        nu=params["nu"], E=params["E"], theta=params["theta"], eta0=params["eta0"]
    )
    sc = RelaxationScenario(p=p, sigma0=params["sigma0"])
    return stress_relaxation(t, params["nu"], sc)


def _nelder_mead(objective, x0, lo, hi, max_iters, tol, f_floor=0.0):
    """Bounded simplex descent.

    Candidate vertices are clipped to [lo, hi] before evaluation.
    Returns (best_x, best_f, iterations, converged, history); converged
    means that for 3 consecutive iterations the best value dropped by
    less than tol in relative terms AND the simplex residual spread was
    below tol (the spread condition keeps exploration plateaus, where
    only the worst vertex moves, from counting as convergence).
    ``f_floor`` is an absolute scale floor so noiseless fits with
    residual -> 0 can still converge.  ``history`` records the best
    value after each iteration (non-increasing).
    """
    dim = len(x0)
    pts = [np.clip(x0, lo, hi)]
    for i in range(dim):
        step = np.zeros(dim)
        span = hi[i] - lo[i]
        step[i] = min(0.1 * max(abs(x0[i]), 0.1), 0.25 * span)
        if x0[i] + step[i] > hi[i]:
            step[i] = -step[i]
        pts.append(np.clip(x0 + step, lo, hi))
    vals = [objective(p) for p in pts]

    history: list[float] = []
    streak = 0
    iters = 0
    for iters in range(1, max_iters + 1):
        order = np.argsort(vals)
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        prev_best = vals[0]

        centroid = np.mean(pts[:-1], axis=0)
        refl = np.clip(centroid + (centroid - pts[-1]), lo, hi)
        f_refl = objective(refl)
        if f_refl < vals[0]:
            exp_pt = np.clip(centroid + 2.0 * (centroid - pts[-1]), lo, hi)
            f_exp = objective(exp_pt)
            if f_exp < f_refl:
                pts[-1], vals[-1] = exp_pt, f_exp
            else:
                pts[-1], vals[-1] = refl, f_refl
        elif f_refl < vals[-2]:
            pts[-1], vals[-1] = refl, f_refl
        else:
            contr = np.clip(centroid + 0.5 * (pts[-1] - centroid), lo, hi)
            f_contr = objective(contr)
            if f_contr < vals[-1]:
                pts[-1], vals[-1] = contr, f_contr
            else:
                for i in range(1, dim + 1):
                    pts[i] = np.clip(pts[0] + 0.5 * (pts[i] - pts[0]), lo, hi)
                    vals[i] = objective(pts[i])

        best = min(vals)
        worst = max(vals)
        history.append(best)
        scale = max(abs(best), f_floor, 1e-300)
        drop_ok = (prev_best - best) <= tol * max(abs(prev_best), f_floor, 1e-300)
        spread_ok = math.isfinite(worst) and (worst - best) <= tol * scale
        if drop_ok and spread_ok:
            streak += 1
            if streak >= 3:
                i_best = int(np.argmin(vals))
                return pts[i_best], vals[i_best], iters, True, history
        else:
            streak = 0

    i_best = int(np.argmin(vals))
    return pts[i_best], vals[i_best], iters, False, history


def fit_relaxation(d: Dataset, c: FitConfig) -> FitResult:
    """Estimate free parameters by minimizing the sum of squared misfits.

    Returns the estimates, the root-mean-square residual, the iteration
    count, and whether the convergence criterion was met before
    max_iters; hitting the budget returns the best point found with
    ``converged=False`` rather than raising.
    """
    if len(d.samples) < MIN_SAMPLES:
        raise ValidationError(
            f"need at least {MIN_SAMPLES} samples for a fit, got {len(d.samples)}"
        )
    if {"E", "theta", "eta0"} <= set(c.free_params) and not c.allow_degenerate:
        raise ValidationError(
            "E, theta and eta0 are jointly unidentifiable (they enter only "
            "through one composite scale); free at most two of them, or set "
            "allow_degenerate=True"
        )

    fixed = dict(DEFAULT_START)
    fixed.update({k: v for k, v in c.initial.items() if k not in c.free_params})
    free = list(c.free_params)
    lo = np.array([c.bounds.get(k, DEFAULT_BOUNDS[k])[0] for k in free])
    hi = np.array([c.bounds.get(k, DEFAULT_BOUNDS[k])[1] for k in free])
    x0 = np.array([c.initial.get(k, DEFAULT_START[k]) for k in free])
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise ValidationError(f"initial guess {x0.tolist()} outside bounds")

    t = d.times()
    sigma = d.stresses()

    def objective(x: np.ndarray) -> float:
        params = dict(fixed)
        params.update(zip(free, x))
        if params["nu"] <= 0.0 or params["nu"] > 1.0:
            return math.inf
        try:
            model = _model_stresses(t, params)
        except (DomainError, ValueError, NonConvergentError, QuadratureFailure):
            return math.inf
        return float(np.sum((model - sigma) ** 2))

    x_best, f_best, iters, converged, _ = _nelder_mead(
        objective, x0, lo, hi, c.max_iters, c.tol,
        f_floor=1e-12 * float(np.sum(sigma**2)),
    )
    estimates = dict(zip(free, (float(v) for v in x_best)))
    rms = math.sqrt(f_best / len(d.samples)) if math.isfinite(f_best) else math.inf
    return FitResult(
        estimates=estimates, residual=rms, iterations=iters, converged=converged
    )
