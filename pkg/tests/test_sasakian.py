import math

import numpy as np
import pytest

from lqdistortion.closed_forms import beta_two_column_k2zero, sin_ratio
from lqdistortion.compare import beta_from_profile
from lqdistortion.heisenberg import HeisenbergCovector, HeisenbergWeight, heisenberg_profile
from lqdistortion.riccati import bakry_emery_transform
from lqdistortion.sasakian import (THREE_SASAKIAN_K_THRESHOLD, SasakianData,
                                   ThreeSasakianData, sasakian_be_ricci, sasakian_ricci,
                                   sasakian_sharp_bound, three_sasakian_kappas,
                                   three_sasakian_mcp_condition, three_sasakian_ricci)


class TestSasakianRicci:
    def test_heisenberg_inputs(self):
        a, b, c = sasakian_ricci(SasakianData(d=1, h0=2.0))
        assert (a, b) == (0.0, 4.0)
        assert c is None

    def test_all_zero(self):
        a, b, c = sasakian_ricci(SasakianData(d=2, h0=0.0))
        assert (a, b, c) == (0.0, 0.0, 0.0)

    def test_d2_reference(self):
        a, b, c = sasakian_ricci(SasakianData(d=2, h0=2.0, r_term=1.0, ric_term=3.0))
        assert a == 0.0
        assert b == pytest.approx(1.0 + 4.0)
        assert c == pytest.approx((3.0 - 1.0) + 4.0 * (2 * 2 - 2) / 4)

    def test_invalid_d(self):
        with pytest.raises(ValueError):
            SasakianData(d=0, h0=0.0)


class TestSasakianBakryEmery:
    def test_reduces_without_weight(self):
        data = SasakianData(d=2, h0=1.5, r_term=0.3, ric_term=1.1)
        assert sasakian_be_ricci(data, N=7.0) == sasakian_ricci(data)

    def test_reference_value(self):
        data = SasakianData(d=1, h0=0.0, grad_dot=1.0)
        _, b, _ = sasakian_be_ricci(data, N=6.0)
        assert b == pytest.approx(-0.25, rel=1e-14)

    def test_requires_large_n(self):
        with pytest.raises(ValueError):
            sasakian_be_ricci(SasakianData(d=1, h0=0.0), N=3.0)

    def test_matches_riccati_transform_on_heisenberg(self):
        # the traced first-column value of the transformed curvature equals
        # the displayed Bakry-Emery formula along a weighted geodesic
        weight = HeisenbergWeight.quadratic()
        cov = HeisenbergCovector(math.cos(0.2), math.sin(0.2), 1.2)
        prof = heisenberg_profile(cov, weight=weight)
        N = 6.0
        tr = bakry_emery_transform(prof, N)
        for t in (0.2, 0.5, 0.8):
            Rbar = tr.curvature_bar(t)
            # rho = -g(grad psi, gdot) and rho_dot = -Hess - h0 g(grad psi, J gdot),
            # so hess_dot + h0 grad_J = -rho_dot and the displayed b-formula
            # becomes h0^2 - rho_dot/2 - (3/(N-3)) rho^2/4
            _, b_formula, _ = sasakian_be_ricci(
                SasakianData(d=1, h0=cov.h0, grad_dot=-prof.rho(t),
                             hess_dot=-prof.rho_dot(t), grad_J=0.0), N)
            expect = cov.h0 ** 2 - prof.rho_dot(t) / 2 - (3 / (N - 3)) * prof.rho(t) ** 2 / 4
            assert b_formula == pytest.approx(expect, rel=1e-12)
            assert Rbar[0, 0] == pytest.approx(expect, rel=1e-12)


class TestSharpBound:
    def test_flat_exponent(self):
        d, N = 2, 6.0
        expo = 1 / (N - 1) + (2 * d - 2) / (2 * d) + 4 / (2 * d)
        for t in (0.3, 0.7):
            assert sasakian_sharp_bound(d, N, 0.0, 0.0, t) == pytest.approx(
                t ** expo, rel=1e-12)

    def test_d1_drops_c_factor(self):
        t, N = 0.5, 4.0
        val = sasakian_sharp_bound(1, N, 1.0, 123.0, t)  # kappa_c ignored at d=1
        expect = t ** (1 / (N - 1)) * beta_two_column_k2zero(1.0, t) ** 0.5
        assert val == pytest.approx(expect, rel=1e-13)

    def test_general_composition(self):
        d, N, kb, kc, t = 2, 8.0, 0.5, 0.2, 0.6
        expect = (t ** (1 / (N - 1)) * sin_ratio(kc, t) ** ((2 * d - 2) / (2 * d))
                  * beta_two_column_k2zero(kb, t) ** (1 / (2 * d)))
        assert sasakian_sharp_bound(d, N, kb, kc, t) == pytest.approx(expect, rel=1e-13)

    def test_dominated_by_exact_model(self):
        # unweighted Heisenberg: measured beta^{1/(N-1)} >= the bound with
        # kappa_b = 2 h0^2 / (N-1)
        cov = HeisenbergCovector(1.0, 0.0, 1.0)
        prof = heisenberg_profile(cov)
        ts = np.linspace(0.01, 1.0, 50)
        for N in (4.0, 10.0):
            beta = beta_from_profile(prof, ts, steps=2048).beta
            kb = 2 * cov.h0 ** 2 / (N - 1)
            rhs = np.array([sasakian_sharp_bound(1, N, kb, 0.0, t) for t in ts])
            assert np.min(beta ** (1 / (N - 1)) - rhs) >= -1e-9


class TestThreeSasakian:
    def test_zero_vertical(self):
        for d in (1, 2):
            a, b, c = three_sasakian_ricci(ThreeSasakianData(d=d, v=(0.0, 0.0, 0.0)))
            assert (a, b, c) == (0.0, 12.0, 4.0 * d - 4.0)

    def test_reference_triple(self):
        K = -9.0
        data = ThreeSasakianData(d=1, v=(1.0, 0.0, 0.0), varrho=2 * K)
        a, b, c = three_sasakian_ricci(data)
        assert a == pytest.approx(3 * (0.75 * (-18.0) - 3.5 - 1.875))
        assert b == pytest.approx(27.0)
        assert c == 0.0

    def test_kappa_bounds_consistent(self):
        # with varrho = 2 K s the normalized a-bound matches the Ricci value
        K, s = -5.0, 0.8
        data = ThreeSasakianData(d=1, v=(math.sqrt(s), 0.0, 0.0), varrho=2 * K * s)
        a, b, _ = three_sasakian_ricci(data)
        ka, kb, kc = three_sasakian_kappas(s, K)
        assert a / 3 == pytest.approx(ka, rel=1e-12)
        assert b / 3 == pytest.approx(kb, rel=1e-12)
        assert kc == 0.0

    def test_two_column_condition_quadratic(self):
        # 4 kappa_a + kappa_b^2 must equal (35/2) s^2 + (26 + 6K) s + 16
        rng = np.random.default_rng(8)
        for _ in range(50):
            K = rng.uniform(-12, 2)
            s = rng.uniform(0, 3)
            ka, kb, _ = three_sasakian_kappas(s, K)
            quad = 17.5 * s * s + (26 + 6 * K) * s + 16
            assert 4 * ka + kb ** 2 == pytest.approx(quad, rel=1e-11)

    def test_mcp_condition_values(self):
        assert three_sasakian_mcp_condition(-9.0)
        assert three_sasakian_mcp_condition(THREE_SASAKIAN_K_THRESHOLD)
        assert not three_sasakian_mcp_condition(-10.0)

    def test_threshold_is_quadratic_root(self):
        # at the threshold the quadratic's minimum over s >= 0 is zero
        K = THREE_SASAKIAN_K_THRESHOLD
        disc = (26 + 6 * K) ** 2 - 4 * 17.5 * 16
        assert disc == pytest.approx(0.0, abs=1e-9)

    def test_threshold_flip_location(self):
        lo, hi = -10.5, -9.5
        for _ in range(60):
            mid = (lo + hi) / 2
            if three_sasakian_mcp_condition(mid):
                hi = mid
            else:
                lo = mid
        assert hi == pytest.approx(THREE_SASAKIAN_K_THRESHOLD, abs=1e-9)
