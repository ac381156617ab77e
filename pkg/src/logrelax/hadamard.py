"""Fractional differential operator with a logarithmic kernel.

The operator of order nu acts on functions of physical time t.  Changing
variables to s = (E/theta) * ln(eta0 + theta*t) turns it into the Caputo
derivative of order nu of g(s) = f(t(s)), which is discretized here with
the L1 product-integration scheme on a uniform s-grid.  The closed-form
action on powers of ln(eta0 + theta*t) is provided as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, QuadratureFailure
from .mlf import QuadratureConfig

__all__ = [
    "OperatorParams",
    "QuadratureConfig",
    "to_transformed_time",
    "from_transformed_time",
    "apply_operator",
    "apply_to_log_power",
]


@dataclass(frozen=True)
class OperatorParams:
    """Order and material constants of the operator.

    ``t_start = (1 - eta0)/theta`` is where ``eta0 + theta*t = 1``; the
    operator integrates from there, so ln(eta0 + theta*t) >= 0 on the
    evaluation domain.
    """

    nu: float
    E: float = 1.0
    theta: float = 1.0
    eta0: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise DomainError(f"nu must be in (0, 1], got {self.nu}")
        if not self.E > 0.0:
            raise DomainError(f"E must be > 0, got {self.E}")
        if not self.theta > 0.0:
            raise DomainError(f"theta must be > 0, got {self.theta}")
        if self.eta0 < 0.0:
            raise DomainError(f"eta0 must be >= 0, got {self.eta0}")

    @property
    def t_start(self) -> float:
        return (1.0 - self.eta0) / self.theta


def to_transformed_time(t, p: OperatorParams):
    """Map physical time to transformed time s = (E/theta)*ln(eta0 + theta*t).

    Accepts a scalar or an array; s is >= 0 and strictly increasing on the
    domain t >= t_start.  Raises DomainError below t_start.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < p.t_start):
        raise DomainError(f"t must be >= t_start = {p.t_start}, got {t}")
    s = (p.E / p.theta) * np.log(p.eta0 + p.theta * t_arr)
    return float(s) if np.isscalar(t) or t_arr.ndim == 0 else s


def from_transformed_time(s, p: OperatorParams):
    """Inverse map t = (exp(s*theta/E) - eta0)/theta; accepts scalar or array."""
    s_arr = np.asarray(s, dtype=float)
    t = (np.exp(s_arr * p.theta / p.E) - p.eta0) / p.theta
    return float(t) if np.isscalar(s) or s_arr.ndim == 0 else t


def _sample(f: Callable, t: np.ndarray) -> np.ndarray:
    """Evaluate f on an array, falling back to a scalar loop."""
    try:
        vals = np.asarray(f(t), dtype=float)
        if vals.shape == t.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(f(ti)) for ti in t])


def _l1_caputo(g: np.ndarray, h: float, nu: float) -> float:
    # D^nu g(s_n) ~ h^{-nu}/Gamma(2-nu) * sum_j b_{n-1-j} (g_{j+1} - g_j),
    # b_k = (k+1)^{1-nu} - k^{1-nu}
    n = len(g) - 1
    k = np.arange(n, dtype=float)
    b = (k + 1.0) ** (1.0 - nu) - k ** (1.0 - nu)
    return float(np.dot(b[::-1], np.diff(g))) / (h**nu * math.gamma(2.0 - nu))


def apply_operator(
    f: Callable[[float], float],
    t_eval: float,
    p: OperatorParams,
    q: QuadratureConfig | None = None,
) -> float:
    """Apply the order-nu operator to f at time t_eval.

    For nu < 1, samples g(s) = f(t(s)) on a uniform grid over [0, s_eval]
    and evaluates the Caputo derivative with the L1 scheme, doubling the
    grid per refinement level until two successive levels agree within
    ``q.tol`` relative accuracy.  For nu = 1 the operator reduces to
    ((eta0 + theta*t)/E) * f'(t), computed with second-order finite
    differences.

    Parameters
    ----------
    f : callable
        Function of physical time, defined on [t_start, t_eval].  Called
        with a numpy array when possible, otherwise point by point.
    t_eval : float
        Evaluation time, >= t_start.  Exactly t_start returns 0.
    p : OperatorParams
        Order and material constants.
    q : QuadratureConfig, optional
        Transformed-grid size, refinement levels, relative tolerance.

    Raises
    ------
    DomainError
        If t_eval < t_start.
    QuadratureFailure
        If successive refinement levels never agree within tol
        (only possible when refinement_levels >= 2).
    """
    if q is None:
        q = QuadratureConfig()
    if t_eval < p.t_start:
        raise DomainError(f"t_eval must be >= t_start = {p.t_start}, got {t_eval}")
    if t_eval == p.t_start:
        return 0.0

    if p.nu == 1.0:
        # ((eta0 + theta*t)/E) * f'(t); central difference, shifted one-sided
        # when t - h would leave the domain
        scale = max(abs(t_eval), 1.0)
        h = scale * 6.0e-6
        if t_eval - h >= p.t_start:
            deriv = (float(f(t_eval + h)) - float(f(t_eval - h))) / (2.0 * h)
        else:
            deriv = (
                -3.0 * float(f(t_eval))
                + 4.0 * float(f(t_eval + h))
                - float(f(t_eval + 2.0 * h))
            ) / (2.0 * h)
        return (p.eta0 + p.theta * t_eval) / p.E * deriv

    s_eval = to_transformed_time(t_eval, p)
    n = q.n_nodes
    s = np.linspace(0.0, s_eval, n + 1)
    g = _sample(f, from_transformed_time(s, p))
    value = _l1_caputo(g, s_eval / n, p.nu)
    if q.refinement_levels == 1:
        return value

    g_scale = float(np.max(np.abs(g)))
    for _ in range(q.refinement_levels - 1):
        n *= 2
        s = np.linspace(0.0, s_eval, n + 1)
        g = _sample(f, from_transformed_time(s, p))
        refined = _l1_caputo(g, s_eval / n, p.nu)
        if abs(refined - value) <= q.tol * max(abs(refined), q.tol * g_scale):
            return refined
        value = refined
    raise QuadratureFailure(
        f"L1 refinement did not stabilize within tol={q.tol} at {n} nodes "
        f"(t_eval={t_eval}, nu={p.nu})"
    )


def apply_to_log_power(beta: float, t: float, p: OperatorParams) -> float:
    """Closed-form action on ln^beta(eta0 + theta*t).

    Returns (E/theta)^(-nu) * Gamma(beta+1)/Gamma(beta+1-nu) *
    ln^(beta-nu)(eta0 + theta*t), the exact image of the log-power under
    the operator; used as the oracle for apply_operator.

    Requires t > t_start (the log vanishes at t_start), beta > -1 and
    beta != 0, and beta+1-nu away from the poles of Gamma.
    """
    if beta <= -1.0 or beta == 0.0:
        raise DomainError(f"beta must be > -1 and nonzero, got {beta}")
    if t <= p.t_start:
        raise DomainError(f"t must be > t_start = {p.t_start}, got {t}")
    z = beta + 1.0 - p.nu
    if z <= 0.0 and z == round(z):
        raise DomainError(f"beta+1-nu = {z} hits a Gamma pole")
    log_t = math.log(p.eta0 + p.theta * t)
    if z > 0.0:
        ratio = math.exp(math.lgamma(beta + 1.0) - math.lgamma(z))
    else:
        ratio = math.gamma(beta + 1.0) / math.gamma(z)
    return (p.E / p.theta) ** (-p.nu) * ratio * log_t ** (beta - p.nu)
