import math

import numpy as np
import pytest

from logrelax.errors import DomainError, QuadratureFailure
from logrelax.hadamard import (
    OperatorParams,
    QuadratureConfig,
    apply_operator,
    apply_to_log_power,
    from_transformed_time,
    to_transformed_time,
)

from _reference import GAMMA_15, LOGPOW_B2_NU025, TWO_OVER_SQRT_PI


def const_fn(c):
    return lambda t: np.full_like(np.asarray(t, dtype=float), c)


def logpow_fn(beta, p):
    return lambda t: np.log(p.eta0 + p.theta * np.asarray(t, dtype=float)) ** beta


class TestOperatorParams:
    def test_t_start(self):
        assert OperatorParams(nu=0.5).t_start == 0.0
        assert OperatorParams(nu=0.5, eta0=0.0, theta=2.0).t_start == 0.5
        assert OperatorParams(nu=0.5, eta0=3.0).t_start == -2.0

    def test_validation(self):
        with pytest.raises(DomainError):
            OperatorParams(nu=0.0)
        with pytest.raises(DomainError):
            OperatorParams(nu=1.5)
        with pytest.raises(DomainError):
            OperatorParams(nu=0.5, E=0.0)
        with pytest.raises(DomainError):
            OperatorParams(nu=0.5, theta=-1.0)
        with pytest.raises(DomainError):
            OperatorParams(nu=0.5, eta0=-0.1)


class TestTimeChange:
    def test_known_points(self):
        p = OperatorParams(nu=0.5)
        assert to_transformed_time(p.t_start, p) == 0.0
        assert to_transformed_time(1.0, p) == pytest.approx(math.log(2.0), rel=1e-15)
        assert to_transformed_time(math.e - 1.0, p) == pytest.approx(1.0, rel=1e-15)

    def test_inverse_known_points(self):
        p = OperatorParams(nu=0.5)
        assert from_transformed_time(0.0, p) == p.t_start
        assert from_transformed_time(math.log(2.0), p) == pytest.approx(1.0, rel=1e-15)
        assert from_transformed_time(5.0, p) == pytest.approx(math.e**5 - 1.0, rel=1e-15)

    def test_round_trip(self):
        p = OperatorParams(nu=0.3, E=2.5, theta=0.7, eta0=0.2)
        t = np.linspace(p.t_start + 0.01, 50.0, 40)
        back = from_transformed_time(to_transformed_time(t, p), p)
        assert np.max(np.abs(back - t) / np.abs(t)) < 1e-12

    def test_monotone_and_nonnegative(self):
        p = OperatorParams(nu=0.5, E=3.0, theta=0.5, eta0=0.4)
        t = np.linspace(p.t_start, 20.0, 50)
        s = to_transformed_time(t, p)
        assert np.all(s >= 0.0)
        assert np.all(np.diff(s) > 0.0)

    def test_below_start_rejected(self):
        p = OperatorParams(nu=0.5, eta0=0.0)  # t_start = 1
        with pytest.raises(DomainError):
            to_transformed_time(0.5, p)


class TestApplyOperator:
    def test_annihilates_constants(self):
        for nu in (0.25, 0.5, 0.9, 1.0):
            p = OperatorParams(nu=nu)
            for c in (1.0, 7.3, -2.0):
                v = apply_operator(const_fn(c), 2.0, p,
                                   QuadratureConfig(n_nodes=64, refinement_levels=1))
                assert abs(v) < 1e-12 * abs(c)

    def test_at_start_returns_zero(self):
        p = OperatorParams(nu=0.5)
        assert apply_operator(logpow_fn(1.0, p), p.t_start, p) == 0.0

    def test_below_start_rejected(self):
        p = OperatorParams(nu=0.5)
        with pytest.raises(DomainError):
            apply_operator(const_fn(1.0), -0.5, p)

    def test_log_power_oracle(self):
        q = QuadratureConfig(n_nodes=1024, refinement_levels=1)
        for beta in (0.5, 1.0, 2.0):
            for nu in (0.25, 0.5, 0.75):
                p = OperatorParams(nu=nu)
                for t in (1.0, math.e - 1.0, 10.0):
                    num = apply_operator(logpow_fn(beta, p), t, p, q)
                    exact = apply_to_log_power(beta, t, p)
                    assert abs(num - exact) / abs(exact) < 1e-3, (beta, nu, t)

    def test_linearity(self):
        p = OperatorParams(nu=0.6)
        q = QuadratureConfig(n_nodes=512, refinement_levels=1)
        f = logpow_fn(1.0, p)
        g = logpow_fn(2.0, p)
        combo = lambda t: 2.0 * f(t) - 0.5 * g(t)
        lhs = apply_operator(combo, 4.0, p, q)
        rhs = 2.0 * apply_operator(f, 4.0, p, q) - 0.5 * apply_operator(g, 4.0, p, q)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_general_parameters(self):
        p = OperatorParams(nu=0.5, E=2.0, theta=0.5, eta0=0.3)
        q = QuadratureConfig(n_nodes=2048, refinement_levels=1)
        t = 6.0
        num = apply_operator(logpow_fn(1.0, p), t, p, q)
        exact = apply_to_log_power(1.0, t, p)
        assert num == pytest.approx(exact, rel=1e-4)

    def test_nu1_reduction(self):
        # order 1: ((eta0 + theta t)/E) f'(t); for f = ln(1+t) this is 1
        p = OperatorParams(nu=1.0)
        v = apply_operator(lambda t: np.log(1.0 + np.asarray(t, dtype=float)), 3.0, p)
        assert v == pytest.approx(1.0, abs=1e-8)
        # f = (1+t)^-1 gives -(1+t)^-1
        v = apply_operator(lambda t: 1.0 / (1.0 + np.asarray(t, dtype=float)), 3.0, p)
        assert v == pytest.approx(-0.25, abs=1e-8)

    def test_refinement_converges(self):
        p = OperatorParams(nu=0.5)
        exact = apply_to_log_power(1.5, 5.0, p)
        v = apply_operator(logpow_fn(1.5, p), 5.0, p,
                           QuadratureConfig(n_nodes=256, refinement_levels=6, tol=1e-5))
        assert v == pytest.approx(exact, rel=1e-4)

    def test_refinement_failure(self):
        p = OperatorParams(nu=0.5)
        with pytest.raises(QuadratureFailure):
            apply_operator(logpow_fn(1.5, p), 5.0, p,
                           QuadratureConfig(n_nodes=8, refinement_levels=2, tol=1e-14))

    def test_scalar_only_function_supported(self):
        p = OperatorParams(nu=0.5)
        q = QuadratureConfig(n_nodes=512, refinement_levels=1)
        scalar_f = lambda t: math.log(1.0 + t)  # rejects arrays
        vec_f = logpow_fn(1.0, p)
        a = apply_operator(scalar_f, 2.0, p, q)
        b = apply_operator(vec_f, 2.0, p, q)
        assert a == pytest.approx(b, rel=1e-13)

    def test_convergence_rate(self):
        # smooth transformed data: errors shrink like h^(2-nu)
        for nu in (0.25, 0.5, 0.75):
            p = OperatorParams(nu=nu)
            t = math.e - 1.0
            exact = apply_to_log_power(2.0, t, p)
            errs = []
            for n in (256, 512):
                num = apply_operator(logpow_fn(2.0, p), t, p,
                                     QuadratureConfig(n_nodes=n, refinement_levels=1))
                errs.append(abs(num - exact))
            rate = math.log2(errs[0] / errs[1])
            assert abs(rate - (2.0 - nu)) <= 0.3, (nu, rate)


class TestLogPowerClosedForm:
    def test_known_values(self):
        p = OperatorParams(nu=0.5)
        assert apply_to_log_power(1.0, math.e - 1.0, p) == pytest.approx(
            TWO_OVER_SQRT_PI, rel=1e-14
        )
        assert 1.0 / GAMMA_15 == pytest.approx(TWO_OVER_SQRT_PI, rel=1e-14)
        p = OperatorParams(nu=0.25)
        assert apply_to_log_power(2.0, math.e**2 - 1.0, p) == pytest.approx(
            LOGPOW_B2_NU025, rel=1e-13
        )

    def test_beta_equal_nu_is_constant(self):
        p = OperatorParams(nu=0.5)
        a = apply_to_log_power(0.5, 3.0, p)
        b = apply_to_log_power(0.5, 300.0, p)
        assert a == pytest.approx(math.gamma(1.5), rel=1e-14)
        assert a == pytest.approx(b, rel=1e-14)

    def test_domain_errors(self):
        p = OperatorParams(nu=0.5)
        with pytest.raises(DomainError):
            apply_to_log_power(0.0, 1.0, p)
        with pytest.raises(DomainError):
            apply_to_log_power(-1.5, 1.0, p)
        with pytest.raises(DomainError):
            apply_to_log_power(1.0, 0.0, p)  # t == t_start
        with pytest.raises(DomainError):
            apply_to_log_power(-0.5, 1.0, p)  # beta+1-nu == 0
