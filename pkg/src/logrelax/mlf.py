"""Two-parameter Mittag-Leffler function E_{alpha,beta}(x) on the real line.

Evaluation targets the completely monotone branch: x <= 0 with
alpha in (0, 1] and beta > 0.  Three routes cover the argument range,

* power series (small |x|),
* spectral integral of the relaxation density (moderate |x|, beta = 1),
* divergent asymptotic series in 1/|x| (large |x|, beta = 1),

and :func:`ml_eval` dispatches between them so that the returned error
estimate stays below the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError, NonConvergentError, QuadratureFailure

EPS = 2.220446049250313e-16

# Default divide between the spectral and asymptotic routes.  The series /
# spectral divide is tolerance- and order-dependent, see series_cutoff().
X_HI_DEFAULT = 50.0
X_LO_CAP = 5.0


class Regime(Enum):
    SERIES = "series"
    SPECTRAL = "spectral"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class MLQuery:
    """A single evaluation request for E_{alpha,beta}(x)."""

    alpha: float
    x: float
    beta: float = 1.0
    tol: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must be in (0, 1], got {self.alpha}")
        if not self.beta > 0.0:
            raise DomainError(f"beta must be > 0, got {self.beta}")
        if not self.tol > 0.0:
            raise DomainError(f"tol must be > 0, got {self.tol}")


@dataclass(frozen=True)
class MLResult:
    value: float
    regime: Regime
    est_error: float


@dataclass(frozen=True)
class QuadratureConfig:
    """Grid resolution and refinement controls for quadrature-type schemes.

    ``n_nodes`` doubles on every refinement level; ``tol`` is the target
    relative accuracy judged from the difference of successive levels.
    """

    n_nodes: int = 2048
    refinement_levels: int = 2
    tol: float = 1e-3

    def __post_init__(self):
        if self.n_nodes < 8:
            raise DomainError(f"n_nodes must be >= 8, got {self.n_nodes}")
        if self.refinement_levels < 1:
            raise DomainError(
                f"refinement_levels must be >= 1, got {self.refinement_levels}"
            )
        if not self.tol > 0.0:
            raise DomainError(f"tol must be > 0, got {self.tol}")


def reciprocal_gamma(z: float) -> float:
    """1 / Gamma(z), finite for every real z (zero at the poles).

    Uses the reflection formula for z <= 0.5 so that negative non-integer
    arguments, needed by the asymptotic series, are handled without
    overflow near the poles of Gamma.
    """
    if z > 0.5:
        if z > 171.6:  # Gamma overflows double precision; 1/Gamma underflows
            return 0.0
        return 1.0 / math.gamma(z)
    if z == math.floor(z):  # pole of Gamma at 0, -1, -2, ...
        return 0.0
    s = math.sin(math.pi * z)
    if s == 0.0:
        return 0.0
    w = 1.0 - z
    if w > 171.6:
        return math.inf if s > 0 else -math.inf
    return s * math.gamma(w) / math.pi


def series_cutoff(alpha: float, tol: float) -> float:
    """Largest |x| the power series can handle in double precision.

    The summed terms grow to about exp(|x|**(1/alpha)) before decaying, so
    round-off leaves an absolute error near EPS * exp(|x|**(1/alpha)).
    Solving for the |x| where that error stays a comfortable fraction of
    ``tol`` gives the cutoff, capped at 5 where the series is fine anyway.
    """
    y_star = math.log(tol / (50.0 * EPS))
    y_star = min(max(y_star, 2.0), 33.0)
    return min(X_LO_CAP, y_star**alpha)


def ml_series(q: MLQuery, max_terms: int = 800) -> MLResult:
    """Sum the defining power series sum_k x^k / Gamma(alpha*k + beta).

    Terms are accumulated with Kahan compensation; summation stops once the
    next term is below half the requested tolerance and the tail is
    decreasing.  The error estimate combines the first omitted term with a
    round-off bound tracking the accumulated term magnitudes, which is what
    limits accuracy for alternating sums at larger |x|.

    Raises NonConvergentError if ``max_terms`` is exhausted first.
    """
    alpha, beta, x, tol = q.alpha, q.beta, q.x, q.tol

    total = reciprocal_gamma(beta)  # k = 0
    if x == 0.0:
        return MLResult(total, Regime.SERIES, EPS * abs(total))

    comp = 0.0
    abs_sum = abs(total)
    prev_mag = abs(total)
    log_ax = math.log(abs(x))
    negative = x < 0.0

    for k in range(1, max_terms + 1):
        mag = math.exp(k * log_ax - math.lgamma(alpha * k + beta))
        if mag < 0.5 * tol and mag <= prev_mag:
            est = mag + EPS * (abs_sum + abs(total))
            return MLResult(total, Regime.SERIES, est)
        term = -mag if (negative and k % 2 == 1) else mag
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        abs_sum += mag
        prev_mag = mag

    raise NonConvergentError(
        f"series for E_{{{alpha},{beta}}}({x}) did not reach tol={tol} "
        f"within {max_terms} terms"
    )


def _spectral_integrand(alpha: float, big_x: float) -> Callable[[np.ndarray], np.ndarray]:
    # After r = exp(u) the integrand is C * w * exp(-big_x * e^u) / (w^2 + 2cw + 1)
    # with w = exp(alpha*u); it decays like e^{alpha*u} on the left and
    # e^{-alpha*u} on the right, so trapezoid sums converge geometrically.
    c = math.cos(math.pi * alpha)
    front = math.sin(math.pi * alpha) / math.pi
    log_big_x = math.log(big_x) if big_x > 0.0 else None

    def psi(u: np.ndarray) -> np.ndarray:
        w = np.exp(alpha * u)
        decay = np.exp(-np.exp(u + log_big_x)) if log_big_x is not None else 1.0
        return front * w * decay / (w * w + 2.0 * c * w + 1.0)

    return psi


def ml_spectral(alpha: float, x: float, quad: QuadratureConfig | None = None) -> MLResult:
    """Evaluate E_alpha(x) for x <= 0 from its relaxation spectral density.

    Integrates exp(-r*|x|**(1/alpha)) against the nonnegative density
    K_alpha(r) = sin(pi*alpha)/pi * r^(alpha-1) /
    (r^(2*alpha) + 2*r^alpha*cos(pi*alpha) + 1) over r in (0, inf), using the
    substitution r = exp(u) and trapezoid sums doubled until two successive
    levels agree within tolerance.

    Parameters
    ----------
    alpha : float
        Order, strictly inside (0, 1); the representation degenerates at 1.
    x : float
        Argument, <= 0.
    quad : QuadratureConfig, optional
        Initial node count, number of doublings allowed, and target accuracy
        (interpreted here as absolute, matching MLQuery.tol semantics).

    Raises
    ------
    QuadratureFailure
        If doubling the grid never brings successive levels within tolerance.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"spectral route requires alpha in (0, 1), got {alpha}")
    if x > 0.0:
        raise DomainError(f"spectral route requires x <= 0, got {x}")
    if quad is None:
        quad = QuadratureConfig(n_nodes=256, refinement_levels=12, tol=1e-12)
    tol = quad.tol

    big_x = abs(x) ** (1.0 / alpha) if x != 0.0 else 0.0
    front = math.sin(math.pi * alpha) / math.pi

    # Truncation: left tail mass ~ (front/alpha) * e^{alpha*u_min}; right tail
    # bounded by (front/alpha) * e^{-alpha*u_max} and the exp(-big_x*e^u) factor.
    tail = 0.05 * tol
    u_min = math.log(tail * alpha / front) / alpha - 1.0
    u_max = 45.0 / alpha
    if big_x > 0.0:
        u_max = min(u_max, math.log(45.0 / big_x) + 1.0)
    if u_max <= u_min:  # pathological tolerance; keep a sane window
        u_min, u_max = -45.0 / alpha, 45.0 / alpha

    # As alpha -> 1 the density sharpens into a peak of width ~ pi*(1-alpha)
    # around u = 0 (poles at alpha*u = +/- i*pi*(1-alpha)).  Successive coarse
    # grids can agree while both miss the peak, so refuse to accept a level
    # until the spacing resolves that scale, and start fine enough that the
    # refinement budget is spent on accuracy rather than peak discovery.
    peak = math.pi * (1.0 - alpha) / alpha if alpha > 0.5 else math.inf
    n = quad.n_nodes
    if peak < math.inf:
        n_resolve = int(math.ceil(4.0 * (u_max - u_min) / peak))
        n = max(n, min(n_resolve, 1 << 22))

    psi = _spectral_integrand(alpha, big_x)

    u = np.linspace(u_min, u_max, n + 1)
    h = (u_max - u_min) / n
    vals = psi(u)
    estimate = h * (0.5 * vals[0] + vals[1:-1].sum() + 0.5 * vals[-1])

    prev = math.inf
    for _ in range(quad.refinement_levels - 1):
        diff = abs(estimate - prev)
        if diff <= 0.4 * tol and h <= peak:
            return MLResult(float(estimate), Regime.SPECTRAL, diff + 2.0 * tail)
        prev = estimate
        mid = u[:-1] + 0.5 * h
        estimate = 0.5 * estimate + 0.5 * h * psi(mid).sum()
        h *= 0.5
        u = np.linspace(u_min, u_max, 2 * (len(u) - 1) + 1)

    diff = abs(estimate - prev)
    if diff <= 0.4 * tol and h <= peak:
        return MLResult(float(estimate), Regime.SPECTRAL, diff + 2.0 * tail)
    raise QuadratureFailure(
        f"spectral quadrature for E_{alpha}({x}) stalled at level diff {diff:.3e} "
        f"(target {tol:.3e})"
    )


def ml_asymptotic(alpha: float, x: float, n_terms: int = 60) -> MLResult:
    """Truncated large-argument expansion of E_alpha(x) for x < 0.

    Sums (-1)^(n-1) |x|^(-n) / Gamma(1 - alpha*n) for n = 1..n_terms,
    skipping the pole terms where 1/Gamma vanishes, and truncating at the
    smallest term if the divergent tail starts growing first.  The error
    estimate is the magnitude of the first omitted term plus a round-off
    allowance proportional to the accumulated term magnitudes.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"asymptotic route requires alpha in (0, 1), got {alpha}")
    if abs(x) < 1.0:
        raise DomainError(f"asymptotic route requires |x| >= 1, got {x}")
    if n_terms < 1:
        raise DomainError(f"n_terms must be >= 1, got {n_terms}")
    ax = abs(x)

    def term(n: int) -> float:
        return ((-1.0) ** (n - 1)) * ax ** (-n) * reciprocal_gamma(1.0 - alpha * n)

    total = 0.0
    abs_sum = 0.0
    last_mag = math.inf
    for n in range(1, n_terms + 1):
        t = term(n)
        mag = abs(t)
        if mag == 0.0:  # 1/Gamma pole: zero contribution, keep going
            continue
        if mag >= last_mag:  # divergent tail reached; truncate at smallest term
            return MLResult(total, Regime.ASYMPTOTIC, mag + EPS * abs_sum)
        total += t
        abs_sum += mag
        last_mag = mag

    # budget exhausted: estimate from the next non-vanishing term
    est = 0.0
    for n in range(n_terms + 1, n_terms + 1 + math.ceil(1.0 / alpha) + 1):
        est = abs(term(n))
        if est > 0.0:
            break
    return MLResult(total, Regime.ASYMPTOTIC, est + EPS * abs_sum)


def ml_eval(
    q: MLQuery,
    *,
    x_lo: float | None = None,
    x_hi: float = X_HI_DEFAULT,
    quad: QuadratureConfig | None = None,
    max_terms: int = 800,
) -> MLResult:
    """Evaluate E_{alpha,beta}(x) for x <= 0, dispatching between routes.

    The series handles |x| <= x_lo (default: accuracy-driven cutoff from
    :func:`series_cutoff`), the spectral integral the mid range, and the
    asymptotic expansion |x| >= x_hi.  Near x_hi the truncated asymptotic
    series may not reach a tight tol, in which case the spectral route is
    used instead so est_error <= tol holds on every successful return.
    alpha = 1 with beta = 1 short-circuits to exp(x).  beta != 1 is only
    available on the series route.
    """
    if q.x > 0.0:
        raise DomainError(f"ml_eval requires x <= 0, got {q.x}")

    if q.alpha == 1.0 and q.beta == 1.0:
        value = math.exp(q.x)
        return MLResult(value, Regime.SERIES, 2.0 * EPS * abs(value))

    if x_lo is None:
        x_lo = series_cutoff(q.alpha, q.tol)
    ax = abs(q.x)

    if q.beta != 1.0:
        if ax <= x_lo:
            return ml_series(q, max_terms=max_terms)
        raise DomainError(
            f"beta != 1 is supported only on the series route (|x| <= {x_lo:.3g}), "
            f"got x={q.x}, beta={q.beta}"
        )

    if quad is None:
        quad = QuadratureConfig(n_nodes=256, refinement_levels=12, tol=q.tol)
    if ax <= x_lo:
        try:
            return ml_series(q, max_terms=max_terms)
        except NonConvergentError:
            # tiny alpha with |x| near 1: term decay is slowly geometric and
            # the budget runs out; the spectral route has no such weakness
            return ml_spectral(q.alpha, q.x, quad)
    if ax < x_hi:
        return ml_spectral(q.alpha, q.x, quad)
    result = ml_asymptotic(q.alpha, q.x)
    if result.est_error <= q.tol:
        return result
    return ml_spectral(q.alpha, q.x, quad)
