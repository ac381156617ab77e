"""Diagnostics for the relaxation responses.

Complete-monotonicity probing via finite-difference sign alternation,
exact-versus-asymptotic matching tables for the large-time tail, and a
probe of the amplitude blow-up of the tail as the order approaches 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, GridError
from .models import GridKind, GridSpec, RelaxationScenario, asymptotic_stress, stress_relaxation

__all__ = [
    "CMReport",
    "MatchRow",
    "MatchTable",
    "ProbeRow",
    "check_complete_monotonicity",
    "asymptotic_matching",
    "singular_limit_probe",
]

MAX_CM_ORDER = 6


@dataclass(frozen=True)
class CMReport:
    """Outcome of the sign-alternation test, indexed by difference order.

    ``passed[m-1]`` and ``worst_violation[m-1]`` describe order m; a
    violation is the magnitude of the largest wrong-signed m-th forward
    difference (0 when all differences carry the expected sign).
    """

    max_order_checked: int
    passed: tuple[bool, ...]
    worst_violation: tuple[float, ...]

    def all_passed(self) -> bool:
        return all(self.passed)


class MatchRow(NamedTuple):
    t: float
    exact: float
    asymptotic: float
    rel_error: float


@dataclass(frozen=True)
class MatchTable:
    rows: tuple[MatchRow, ...]

    def rel_errors(self) -> np.ndarray:
        return np.array([r.rel_error for r in self.rows])


class ProbeRow(NamedTuple):
    nu: float
    exact: float
    asymptotic: float


def check_complete_monotonicity(
    curve_fn: Callable,
    g: GridSpec,
    max_order: int = 4,
    tol: float = 1e-10,
) -> CMReport:
    """Test that m-th forward differences of curve_fn alternate in sign.

    A completely monotone function sampled on a uniform grid has m-th
    forward differences with sign (-1)^m; this checks orders 1..max_order
    and reports the worst wrong-signed magnitude per order, passing an
    order when that magnitude is <= tol.

    Parameters
    ----------
    curve_fn : callable
        Maps a time array (or scalar) to values.
    g : GridSpec
        Must be LINEAR (uniform spacing) with n_points >= max_order + 2.
    max_order : int
        Highest difference order, capped at 6: beyond that rounding noise
        in double precision swamps the alternation signal.
    tol : float
        Sign violations up to this magnitude are ignored.
    """
    if not 1 <= max_order <= MAX_CM_ORDER:
        raise DomainError(f"max_order must be in [1, {MAX_CM_ORDER}], got {max_order}")
    if g.kind is not GridKind.LINEAR:
        raise GridError("complete-monotonicity check requires a uniform (linear) grid")
    if g.n_points < max_order + 2:
        raise GridError(
            f"grid too small: need n_points >= {max_order + 2}, got {g.n_points}"
        )
    t = g.points()
    values = np.asarray(curve_fn(t), dtype=float)
    if values.shape != t.shape:
        values = np.array([float(curve_fn(ti)) for ti in t])

    passed: list[bool] = []
    worst: list[float] = []
    d = values
    for m in range(1, max_order + 1):
        d = np.diff(d)
        wrong = np.maximum(0.0, -d if m % 2 == 0 else d)
        v = float(wrong.max())
        worst.append(v)
        passed.append(v <= tol)
    return CMReport(
        max_order_checked=max_order,
        passed=tuple(passed),
        worst_violation=tuple(worst),
    )


def asymptotic_matching(
    nu: float,
    sc: RelaxationScenario,
    t_points: Sequence[float],
) -> MatchTable:
    """Tabulate exact stress against its first asymptotic term.

    Rows are sorted by increasing t; each carries the exact value, the
    tail approximation, and |exact - tail| / exact.
    """
    rows = []
    for t in sorted(float(t) for t in t_points):
        exact = stress_relaxation(t, nu, sc)
        asym = asymptotic_stress(t, nu, sc)
        rows.append(MatchRow(t, exact, asym, abs(exact - asym) / abs(exact)))
    return MatchTable(rows=tuple(rows))


def singular_limit_probe(
    nu_list: Sequence[float],
    t: float,
    sc: RelaxationScenario,
) -> list[ProbeRow]:
    """Probe the order -> 1 limit at a fixed time.

    The exact stress varies continuously in nu and stays in (0, sigma0],
    while the tail amplitude 1/Gamma(1-nu) collapses to zero as nu -> 1
    (Gamma(1-nu) diverges), so the first-term tail stops representing the
    response.  Each row pairs the exact and asymptotic values at one nu.
    """
    rows = []
    for nu in nu_list:
        if not 0.0 < nu < 1.0:
            raise DomainError(f"probe orders must be in (0, 1), got {nu}")
        rows.append(
            ProbeRow(
                nu=float(nu),
                exact=stress_relaxation(t, nu, sc),
                asymptotic=asymptotic_stress(t, nu, sc),
            )
        )
    return rows
