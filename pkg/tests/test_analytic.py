import math

import numpy as np
import pytest

from aoiq.analytic import (
    GammaParam,
    ServerLoad,
    SystemConfig,
    approx_mean_n,
    approx_mean_two,
    exact_mean,
    exact_mean_two_printed,
    gamma_approx_error,
    gamma_tail,
    single_server_mean,
    single_server_tail,
    theta_of,
)
from aoiq.exppoly import evaluate, integrate

from oracles import mm1_mean, quad_expsum, quad_tail_product


class TestServerLoad:
    def test_rejects_unstable(self):
        with pytest.raises(ValueError):
            ServerLoad(rho=1.0, mu=1.0)
        with pytest.raises(ValueError):
            ServerLoad(rho=0.0, mu=1.0)
        with pytest.raises(ValueError):
            ServerLoad(rho=0.5, mu=0.0)

    def test_derived_fields(self):
        load = ServerLoad(rho=0.25, mu=8.0)
        assert load.rho_bar == pytest.approx(0.75)
        assert load.arrival_rate == pytest.approx(2.0)


class TestSystemConfig:
    def test_alpha_sum_enforced(self):
        with pytest.raises(ValueError, match="sum"):
            SystemConfig(1.0, (0.5, 0.6), (2.0, 2.0))

    def test_per_queue_stability_via_loads(self):
        cfg = SystemConfig(10.0, (0.9, 0.1), (5.0, 5.0))
        assert not cfg.is_stable()
        with pytest.raises(ValueError):
            cfg.active_loads()

    def test_zero_alpha_servers_dropped(self):
        cfg = SystemConfig(2.0, (1.0, 0.0), (5.0, 1.0))
        loads = cfg.active_loads()
        assert len(loads) == 1
        assert loads[0].mu == 5.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length"):
            SystemConfig(1.0, (0.5, 0.5), (2.0, 2.0, 2.0))


class TestSingleServerMean:
    def test_direct_value(self):
        assert single_server_mean(ServerLoad(0.5, 20.0)) == pytest.approx(0.175)

    def test_mu_scaling(self):
        for k in (0.5, 2.0, 7.0):
            base = single_server_mean(ServerLoad(0.3, 1.0))
            assert single_server_mean(ServerLoad(0.3, k)) == pytest.approx(base / k)

    def test_value_at_optimum(self):
        val = single_server_mean(ServerLoad(0.531010, 1.0))
        assert val == pytest.approx(3.48444, abs=1e-3)
        # consistent with the reference curve's first point
        assert val == pytest.approx(3.48453, abs=1e-3)


class TestSingleServerTail:
    def test_is_one_at_origin(self):
        tail = single_server_tail(ServerLoad(0.53, 1.0))
        assert evaluate(tail, 0.0) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("rho", [0.1, 0.3, 0.531, 0.7, 0.9])
    @pytest.mark.parametrize("mu", [0.5, 1.0, 20.0])
    def test_integral_equals_mean(self, rho, mu):
        load = ServerLoad(rho, mu)
        assert integrate(single_server_tail(load)) == pytest.approx(
            single_server_mean(load), rel=1e-9
        )

    def test_nonincreasing(self):
        tail = single_server_tail(ServerLoad(0.4, 2.0))
        xs = np.linspace(0.0, 20.0, 400)
        vals = [evaluate(tail, x) for x in xs]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


class TestExactMean:
    def test_single_server_reduces(self):
        load = ServerLoad(0.5, 20.0)
        assert exact_mean([load]) == pytest.approx(0.175)

    def test_two_symmetric(self):
        load = ServerLoad(0.53, 1.0)
        assert exact_mean([load, load]) == pytest.approx(2.2210502345, abs=1e-5)

    def test_table_row(self):
        l1 = ServerLoad(14.735 / 25.0, 25.0)
        l2 = ServerLoad(6.465 / 15.0, 15.0)
        assert exact_mean([l1, l2]) == pytest.approx(0.1114, abs=0.002)

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="no active servers"):
            exact_mean([])

    def test_matches_quadrature_of_tail_product(self):
        pairs = [(0.4, 2.0), (0.6, 1.0)]
        closed = exact_mean([ServerLoad(r, m) for r, m in pairs])
        assert closed == pytest.approx(quad_tail_product(pairs), rel=1e-6)

    def test_adding_server_never_increases(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            loads = [
                ServerLoad(rng.uniform(0.1, 0.9), rng.uniform(0.5, 5.0))
                for _ in range(rng.integers(1, 4))
            ]
            extra = ServerLoad(rng.uniform(0.1, 0.9), rng.uniform(0.5, 5.0))
            assert exact_mean(loads + [extra]) <= exact_mean(loads) + 1e-12


class TestPrintedTwoServerForm:
    def test_documented_discrepancy(self):
        # the literal published rational expression exceeds the
        # single-server mean at symmetric loads, which the minimum of two
        # ages cannot; the tail-product value matches quadrature instead
        load = ServerLoad(0.53, 1.0)
        printed = exact_mean_two_printed(load, load)
        single = single_server_mean(load)
        product = exact_mean([load, load])
        oracle = quad_tail_product([(0.53, 1.0), (0.53, 1.0)])
        assert printed > single
        assert product < single
        assert product == pytest.approx(oracle, rel=1e-9)
        assert abs(printed - oracle) > 1.0


class TestGammaTail:
    def test_one_at_origin(self):
        assert evaluate(gamma_tail(GammaParam(0.7)), 0.0) == pytest.approx(1.0)

    def test_integral_is_twice_theta(self):
        for theta in (0.1, 1.0, 5.5):
            assert integrate(gamma_tail(GammaParam(theta))) == pytest.approx(2 * theta)

    def test_monotone_in_theta(self):
        xs = np.linspace(0.0, 30.0, 1000)
        t_hi, t_lo = gamma_tail(GammaParam(2.0)), gamma_tail(GammaParam(1.0))
        for x in xs:
            assert evaluate(t_hi, x) >= evaluate(t_lo, x) - 1e-15

    def test_rejects_bad_theta(self):
        with pytest.raises(ValueError):
            GammaParam(0.0)


class TestApproxMean:
    def test_five_fourths_theta(self):
        for theta in (0.1, 0.0875, 3.0):
            p = GammaParam(theta)
            assert approx_mean_two(p, p) == pytest.approx(1.25 * theta, rel=1e-15)

    def test_symmetric_table_value(self):
        p = GammaParam(0.0875)
        assert approx_mean_two(p, p) == pytest.approx(0.109375, abs=1e-12)

    def test_asymmetric_table_value(self):
        val = approx_mean_two(GammaParam(0.069690), GammaParam(0.116148))
        assert val == pytest.approx(0.10752, abs=1e-4)

    def test_symmetric_in_arguments(self):
        a, b = GammaParam(0.3), GammaParam(1.1)
        assert approx_mean_two(a, b) == pytest.approx(approx_mean_two(b, a), rel=1e-15)

    def test_homogeneous_degree_one(self):
        a, b, k = 0.3, 1.1, 4.5
        assert approx_mean_two(GammaParam(k * a), GammaParam(k * b)) == pytest.approx(
            k * approx_mean_two(GammaParam(a), GammaParam(b)), rel=1e-12
        )

    def test_n_equals_one(self):
        assert approx_mean_n([GammaParam(0.4)]) == pytest.approx(0.8)

    def test_n_two_matches_pairwise(self):
        p = GammaParam(0.0875)
        assert approx_mean_n([p, p]) == pytest.approx(approx_mean_two(p, p), rel=1e-12)

    def test_n_three_against_quadrature(self):
        # (1+x)^3 e^{-3x} integrated numerically
        expected = quad_expsum(lambda x: (1 + x) ** 3 * math.exp(-3 * x), 60.0)
        assert approx_mean_n([GammaParam(1.0)] * 3) == pytest.approx(expected, rel=1e-9)


class TestThetaOf:
    def test_half_mean(self):
        assert theta_of(ServerLoad(0.5, 20.0)).theta == pytest.approx(0.0875)

    def test_scales_inverse_mu(self):
        t1 = theta_of(ServerLoad(0.4, 1.0)).theta
        t3 = theta_of(ServerLoad(0.4, 3.0)).theta
        assert t3 == pytest.approx(t1 / 3.0)

    def test_table_input(self):
        assert theta_of(ServerLoad(0.5294, 25.0)).theta == pytest.approx(
            0.069690, abs=1e-6
        )


class TestGammaApproxError:
    def test_zero_at_origin(self):
        load = ServerLoad(0.5, 10.0)
        exact = single_server_tail(load)
        gamma = gamma_tail(theta_of(load))
        assert abs(evaluate(exact, 0.0) - evaluate(gamma, 0.0)) < 1e-12

    def test_small_near_half_utilization(self):
        assert gamma_approx_error(ServerLoad(0.5, 10.0)) <= 0.03

    def test_worse_at_skewed_utilization(self):
        assert gamma_approx_error(ServerLoad(0.1, 10.0)) > gamma_approx_error(
            ServerLoad(0.5, 10.0)
        )


def test_tail_factorization_against_quadrature():
    rng = np.random.default_rng(5)
    for _ in range(5):
        pairs = [
            (rng.uniform(0.15, 0.85), rng.uniform(0.5, 5.0)) for _ in range(2)
        ]
        closed = exact_mean([ServerLoad(r, m) for r, m in pairs])
        assert closed == pytest.approx(quad_tail_product(pairs), rel=1e-6)


@pytest.mark.parametrize("rho", [0.2, 0.4, 0.531, 0.75])
@pytest.mark.parametrize("mu", [0.5, 1.0, 4.0, 20.0, 100.0])
def test_mean_formula_matches_oracle(rho, mu):
    assert single_server_mean(ServerLoad(rho, mu)) == pytest.approx(
        mm1_mean(rho, mu), rel=1e-12
    )
