import math

import numpy as np
import pytest
from scipy import integrate

from fasmrc import analytic, montecarlo
from fasmrc.analytic import (QuadratureConfig, SeriesTruncation, branch_lt,
                             lambda_conditional, laplace_numeric,
                             lt_closed_form_g, lt_closed_form_p, lt_power_k,
                             outage_gc, phi_exact, psi_exact,
                             selection_multiplicity)
from fasmrc.channel import (DerivedParams, SystemConfig, derive_params,
                            port_cdf_conditional, port_pdf_conditional)
from fasmrc.errors import (TermExplosion, TruncationFailure,
                           UnsupportedConfiguration)
from fasmrc.montecarlo import McConfig, chunk_rng

import oracles


class TestClosedFormTransforms:
    def test_g_plain_exponential(self):
        assert lt_closed_form_g(0, 1.0, 0.0, 0.5) == pytest.approx(
            1.0 / 1.5, rel=1e-14)

    def test_g_first_moment(self):
        assert lt_closed_form_g(1, 1.0, 0.0, 1.0) == pytest.approx(
            0.25, rel=1e-14)

    def test_p_plain_exponential(self):
        assert lt_closed_form_p(1, 0.0, 1.0, 0.5) == pytest.approx(
            1.0 / 1.5, rel=1e-14)

    def test_p_gamma_normalization(self):
        assert lt_closed_form_p(2, 0.0, 1.0, 0.0) == pytest.approx(
            1.0, rel=1e-14)

    def test_reject_s_at_or_below_minus_b(self):
        with pytest.raises(ValueError):
            lt_closed_form_g(1, 1.0, 0.0, -1.0)
        with pytest.raises(ValueError):
            lt_closed_form_p(2, 0.5, 1.0, -1.5)

    def test_g_vs_quadrature(self):
        a, b, v, s = 2, 0.7, 0.9, 0.3
        num = laplace_numeric(lambda x: x ** a * math.exp(-b * x) * (x >= v),
                              s, points=[v])
        assert lt_closed_form_g(a, b, v, s) == pytest.approx(num, rel=1e-8)

    def test_p_vs_quadrature(self):
        K, a, b, s = 3, 0.5, 1.0, 0.2
        num = laplace_numeric(
            lambda x: (x - a) ** (K - 1) * math.exp(-b * x) * (x >= a),
            s, points=[a])
        assert lt_closed_form_p(K, a, b, s) == pytest.approx(num, rel=1e-8)


class TestLaplaceNumeric:
    def test_exponential(self):
        assert laplace_numeric(lambda x: math.exp(-x), 1.0) == pytest.approx(
            0.5, rel=1e-9)

    @pytest.mark.filterwarnings("ignore::UserWarning")
    @pytest.mark.filterwarnings(
        "ignore::scipy.integrate.IntegrationWarning")
    def test_nonconvergence_raises(self):
        from fasmrc.errors import QuadratureNonconvergence
        with pytest.raises(QuadratureNonconvergence):
            laplace_numeric(lambda x: math.cos(x ** 3), 1e-6)


class TestPsiExact:
    def test_empty_product(self, params_unit):
        assert psi_exact(1.0, 1.0, 0, params_unit) == 1.0

    def test_zero_threshold(self, params_unit):
        assert psi_exact(0.0, 1.0, 3, params_unit) == 0.0

    def test_is_cdf_power(self, params_unit):
        cdf = port_cdf_conditional(1.3, 0.8, params_unit)
        assert psi_exact(1.3, 0.8, 4, params_unit) == pytest.approx(
            cdf ** 4, rel=1e-12)

    def test_vs_conditional_mc(self, params_unit):
        est = montecarlo.estimate_psi_mc(1.0, 1.0, 3, params_unit,
                                         McConfig(samples=1_000_000, seed=17))
        exact = psi_exact(1.0, 1.0, 3, params_unit)
        assert abs(exact - est.value) <= 3.0 * est.half_width

    def test_monotonicity(self, params_unit):
        vs = np.linspace(0.1, 6.0, 25)
        vals = [psi_exact(float(v), 1.0, 3, params_unit) for v in vs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        x0s = np.linspace(0.0, 6.0, 25)
        vals = [psi_exact(1.0, float(x0), 3, params_unit) for x0 in x0s]
        assert all(b <= a for a, b in zip(vals, vals[1:]))


class TestBranchLt:
    def test_single_term_at_zero_order(self, params_unit):
        br = branch_lt(SeriesTruncation(n_max=0), 0.0, params_unit)
        assert set(br.terms) == {(0, 0, 1)}
        assert br.terms[(0, 0, 1)].to_float() == pytest.approx(1.0)  # omega
        # evaluates to omega/(s+omega) times the prefactor
        val = br.evaluate(s=1.0, x0=0.0, p=params_unit)
        assert val == pytest.approx(0.5, rel=1e-12)

    def test_invariant_inverse_power_at_least_one(self, params_unit):
        br = branch_lt(SeriesTruncation(n_max=12), 0.3, params_unit)
        assert all(c >= 1 for (_, _, c) in br.terms)
        assert all(l <= m for (m, l, _) in br.terms)

    def test_matches_numeric_restricted_transform(self, params_unit):
        br = branch_lt(SeriesTruncation(n_max=40), 0.5, params_unit)
        val = br.evaluate(s=1.0, x0=1.0, p=params_unit,
                          trunc=SeriesTruncation(n_max=40))
        num, _ = integrate.quad(
            lambda x: port_pdf_conditional(x, 1.0, params_unit) * math.exp(-x),
            0.5, np.inf, limit=300, epsabs=1e-13, epsrel=1e-12)
        assert val == pytest.approx(num, rel=1e-7)

    def test_self_convergence_in_order(self, params_unit):
        lo = branch_lt(SeriesTruncation(n_max=20), 0.5, params_unit).evaluate(
            s=1.0, x0=1.0, p=params_unit)
        hi = branch_lt(SeriesTruncation(n_max=40), 0.5, params_unit).evaluate(
            s=1.0, x0=1.0, p=params_unit)
        assert abs(hi - lo) / hi < 1e-8

    def test_tail_failure_when_order_too_low(self, params_unit):
        br = branch_lt(SeriesTruncation(n_max=2), 0.0, params_unit)
        with pytest.raises(TruncationFailure):
            br.evaluate(s=0.1, x0=50.0, p=params_unit,
                        trunc=SeriesTruncation(n_max=2, tail_tol=1e-10))


class TestLtPowerK:
    def test_identity_at_k_one(self, params_unit):
        trunc = SeriesTruncation(n_max=6)
        br = branch_lt(trunc, 0.2, params_unit)
        sq = lt_power_k(br, 1, trunc)
        assert sq.terms.keys() == br.terms.keys()
        assert sq.v_exp_scale == 1 and sq.x0_exp_scale == 1

    def test_central_square(self, params_unit):
        trunc = SeriesTruncation(n_max=0)
        br = branch_lt(trunc, 0.0, params_unit)
        sq = lt_power_k(br, 2, trunc)
        assert set(sq.terms) == {(0, 0, 2)}
        assert sq.terms[(0, 0, 2)].to_float() == pytest.approx(1.0)
        assert sq.v_exp_scale == 2 and sq.x0_exp_scale == 2

    @pytest.mark.parametrize("K,n_max", [(2, 3), (3, 2)])
    def test_matches_multi_index_enumeration(self, K, n_max):
        omega, mu = 0.8, 0.35
        p = DerivedParams(mu=mu, omega=omega, z=0.0, T=0)
        trunc = SeriesTruncation(n_max=n_max)
        poly = lt_power_k(branch_lt(trunc, 0.0, p), K, trunc)
        brute = oracles.kfold_multi_index_terms(K, n_max, omega, mu)
        brute = {k: v for k, v in brute.items() if v != 0.0}
        assert set(poly.terms) == set(brute)
        for key, expected in brute.items():
            assert poly.terms[key].to_float() == pytest.approx(
                expected, rel=1e-11), key

    def test_term_explosion_cap(self, params_unit):
        trunc = SeriesTruncation(n_max=40, term_cap=100)
        br = branch_lt(trunc, 0.0, params_unit)
        with pytest.raises(TermExplosion):
            lt_power_k(br, 2, trunc)


class TestPhiExact:
    def test_zero_when_threshold_unreachable(self, params_unit):
        assert phi_exact(1.0, 0.6, 1.0, 2, params_unit) == 0.0
        assert phi_exact(1.2, 0.6, 1.0, 2, params_unit) == 0.0  # z = K v

    def test_central_exponential_cdf(self):
        p = DerivedParams(mu=0.0, omega=1.0, z=0.0, T=0)
        assert phi_exact(3.0, 0.0, 0.0, 1, p) == pytest.approx(
            -math.expm1(-3.0), rel=1e-12)

    def test_k_one_is_cdf_difference(self, params_unit):
        # independent route: Phi(z, v, x0, K=1) = F(z|x0) - F(v|x0)
        z, v, x0 = 5.0, 0.7, 1.3
        expected = port_cdf_conditional(z, x0, params_unit) \
            - port_cdf_conditional(v, x0, params_unit)
        assert phi_exact(z, v, x0, 1, params_unit) == pytest.approx(
            expected, rel=1e-9)

    @pytest.mark.parametrize("K,v,x0", [(2, 2.0, 1.0), (3, 0.5, 1.0)])
    def test_vs_conditional_mc(self, K, v, x0):
        cfg = SystemConfig(M=6, K=K, W=5.0, R=5.0, phi=10.0)
        p = derive_params(cfg)
        est = montecarlo.estimate_phi_mc(p.z, v, x0, K, p,
                                         McConfig(samples=400_000, seed=23))
        exact = phi_exact(p.z, v, x0, K, p)
        assert abs(exact - est.value) <= 3.0 * est.half_width

    def test_monotone_in_z_and_v(self, params_unit):
        zs = np.linspace(2.1, 12.0, 20)
        vals = [phi_exact(float(z), 1.0, 0.7, 2, params_unit) for z in zs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        vs = np.linspace(0.0, 2.0, 20)
        vals = [phi_exact(5.0, float(v), 0.7, 2, params_unit) for v in vs]
        assert all(b <= a for a, b in zip(vals, vals[1:]))


class TestLambdaConditional:
    def test_combinatorial_prefactor(self):
        assert selection_multiplicity(5, 2) == 30

    def test_zero_threshold(self):
        cfg = SystemConfig(M=4, K=2, W=5.0, R=5.0, phi=10.0)
        p = derive_params(cfg)
        assert lambda_conditional(0.0, 1.0, cfg, p) == 0.0

    def test_rejects_k_equals_m(self):
        cfg = SystemConfig(M=2, K=2, W=5.0, R=5.0, phi=10.0)
        p = derive_params(cfg)
        with pytest.raises(UnsupportedConfiguration):
            lambda_conditional(31.0, 1.0, cfg, p)

    def test_vs_conditional_mc(self):
        # simulate best-K MRC with the reference draw pinned at x0
        cfg = SystemConfig(M=4, K=2, W=5.0, R=5.0, phi=10.0)
        p = derive_params(cfg)
        x0 = 1.0
        n = 400_000
        rng = chunk_rng(51, 0)
        draws = montecarlo._conditional_branch_snrs(rng, n, cfg.M, x0, p)
        top2 = np.partition(draws, cfg.M - cfg.K, axis=1)[:, cfg.M - cfg.K:]
        hits = int(np.count_nonzero(top2.sum(axis=1) <= p.z))
        est = hits / n
        sigma = math.sqrt(est * (1 - est) / n)
        exact = lambda_conditional(p.z, x0, cfg, p)
        assert abs(exact - est) <= 3.0 * 1.96 * sigma


class TestOutageGc:
    def test_rejects_k_equals_m(self):
        cfg = SystemConfig(M=3, K=3, W=5.0, R=5.0, phi=10.0)
        with pytest.raises(UnsupportedConfiguration):
            outage_gc(cfg)

    def test_vs_monte_carlo(self):
        cfg = SystemConfig(M=4, K=2, W=5.0, R=5.0, phi=10.0)
        est = montecarlo.estimate_outage(cfg, McConfig(samples=1_000_000,
                                                       seed=99))
        gc = outage_gc(cfg)
        assert abs(gc.value - est.value) <= max(0.05 * est.value,
                                                3.0 * est.half_width)

    def test_h_sufficiency(self):
        # Richardson-extrapolate the outer rule (second-order in u_p) so the
        # comparison isolates the tail mass beyond H from node placement
        cfg = SystemConfig(M=4, K=2, W=5.0, R=5.0, phi=10.0)
        h0 = QuadratureConfig().resolve_h(cfg.phi)

        def extrapolated(h, u):
            a = outage_gc(cfg, quad=QuadratureConfig(h=h, u_p=u, u_l=100)).value
            b = outage_gc(cfg, quad=QuadratureConfig(h=h, u_p=2 * u, u_l=100)).value
            return (4.0 * b - a) / 3.0

        base = extrapolated(h0, 400)
        doubled = extrapolated(2.0 * h0, 800)
        assert abs(doubled - base) / base < 1e-6

    def test_node_doubling_converged(self):
        cfg = SystemConfig(M=4, K=2, W=5.0, R=5.0, phi=10.0)
        base = outage_gc(cfg).value
        fine = outage_gc(cfg, quad=QuadratureConfig(u_p=800, u_l=200)).value
        assert abs(fine - base) / base < 1e-4

    def test_deterministic_and_diagnostics(self):
        cfg = SystemConfig(M=5, K=1, W=5.0, R=5.0, phi=10.0)
        a = outage_gc(cfg)
        b = outage_gc(cfg)
        assert a.value == b.value
        assert a.method == "gc"
        assert a.samples_or_nodes == 400 * 100
        assert a.diagnostics["tail_max"] <= SeriesTruncation().tail_tol
