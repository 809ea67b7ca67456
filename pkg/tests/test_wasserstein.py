import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, special

from sortnet_stein import kernels
from sortnet_stein import wasserstein as ws
from sortnet_stein.continuous import BETA_3_2, SEMICIRCLE, ContinuousLaw


def coupling_oracle(locs, masses, a, b, scale=1.0, shift=0.0):
    """E|x_I - T| under the monotone coupling with T = scale * Beta(a, b) + shift.

    The i-th atom is matched with the quantile band (q_{i-1}, q_i] of the
    target; this never touches CDF antiderivatives or crossing search.
    """
    cum = np.cumsum([float(m) for m in masses])
    q = special.betaincinv(a, b, np.clip(np.concatenate([[0.0], cum]), 0, 1))
    q[0], q[-1] = 0.0, 1.0
    norm = math.exp(special.betaln(a, b))
    total = 0.0
    for i, x in enumerate(locs):
        z = (x - shift) / scale
        lo, hi = q[i], q[i + 1]

        def integrand(t):
            return abs(z - t) * t ** (a - 1) * (1 - t) ** (b - 1) / norm

        pts = [z] if lo < z < hi else None
        total += integrate.quad(integrand, lo, hi, points=pts, epsabs=1e-14, epsrel=0, limit=200)[0]
    return scale * total


class TestWasserstein1D:
    def test_n2_closed_form(self):
        d, err = ws.wasserstein_1d(ws.DiscreteAtomLaw.first_letter(2), BETA_3_2)
        assert abs(d - 2 / (3 * math.pi)) <= 1e-10
        assert err <= 1e-10

    def test_median_point_mass(self):
        mu = ws.DiscreteAtomLaw((0.5,), (Fraction(1),))
        assert abs(ws.wasserstein_1d(mu, BETA_3_2)[0] - 2 / (3 * math.pi)) <= 1e-10
        mu0 = ws.DiscreteAtomLaw((0.0,), (Fraction(1),))
        # E|S| for the semicircle is 4/(3 pi)
        assert abs(ws.wasserstein_1d(mu0, SEMICIRCLE)[0] - 4 / (3 * math.pi)) <= 1e-10

    @pytest.mark.parametrize("n", [3, 4, 5, 8, 13, 25])
    def test_matches_coupling_oracle(self, n):
        mu = ws.DiscreteAtomLaw.first_letter(n)
        d, err = ws.wasserstein_1d(mu, BETA_3_2)
        assert abs(d - coupling_oracle(mu.locations, mu.masses, 1.5, 1.5)) <= 1e-11
        semi = ws.DiscreteAtomLaw.first_letter(n, 2.0, -1.0)
        ds, _ = ws.wasserstein_1d(semi, SEMICIRCLE)
        assert abs(ds - coupling_oracle(semi.locations, semi.masses, 1.5, 1.5, 2.0, -1.0)) <= 1e-11

    def test_general_beta_against_oracle(self):
        law = ContinuousLaw.beta_law(2.0, 3.0)
        mu = ws.DiscreteAtomLaw.first_letter(9)
        d, _ = ws.wasserstein_1d(mu, law)
        assert abs(d - coupling_oracle(mu.locations, mu.masses, 2.0, 3.0)) <= 1e-11

    def test_atoms_outside_support(self):
        mu = ws.DiscreteAtomLaw((-0.5, 0.3, 1.5), (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)))
        d, _ = ws.wasserstein_1d(mu, BETA_3_2)
        assert abs(d - coupling_oracle(mu.locations, mu.masses, 1.5, 1.5)) <= 1e-11

    @pytest.mark.parametrize("n", [2, 7, 40])
    def test_quadrature_route_agrees(self, n):
        mu = ws.DiscreteAtomLaw.first_letter(n)
        d1, e1 = ws.wasserstein_1d(mu, BETA_3_2)
        d2, e2 = ws.wasserstein_1d(mu, BETA_3_2, method="quadrature")
        assert abs(d1 - d2) <= e1 + e2 + 1e-13

    @pytest.mark.parametrize("n", [5, 100, 1000])
    def test_refinement_within_error_bound(self, n):
        mu = ws.DiscreteAtomLaw.first_letter(n)
        d60, err = ws.wasserstein_1d(mu, BETA_3_2, iters=60)
        d120, _ = ws.wasserstein_1d(mu, BETA_3_2, iters=120)
        assert abs(d60 - d120) < err
        assert err <= 1e-10

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            ws.wasserstein_1d(ws.DiscreteAtomLaw.first_letter(3), BETA_3_2, method="mc")

    @pytest.mark.parametrize("locs,masses", [
        ((0.5, 0.2), (Fraction(1, 2), Fraction(1, 2))),
        ((0.2, 0.2), (Fraction(1, 2), Fraction(1, 2))),
        ((0.2, 0.5), (Fraction(1, 2), Fraction(1, 3))),
        ((0.2, 0.5), (Fraction(1), Fraction(0))),
    ])
    def test_invalid_atoms(self, locs, masses):
        with pytest.raises(ValueError):
            ws.DiscreteAtomLaw(locs, masses)


class TestCrossingKernels:
    def test_numba_and_numpy_agree(self):
        rng = np.random.default_rng(0)
        levels = np.sort(rng.uniform(size=500))
        lo = np.zeros(500)
        hi = np.ones(500)
        a = kernels.semicircle_crossings_numba(levels, lo, hi, 2.0, -1.0)
        b = kernels.semicircle_crossings_numpy(levels, lo, hi, 2.0, -1.0)
        assert np.max(np.abs(a - b)) <= 1e-15
        # and the crossings really invert the CDF
        F = kernels.semicircle_cdf_array(2 * a - 1)
        assert np.max(np.abs(F - levels)) <= 1e-14

    def test_level_outside_range_clamps(self):
        out = kernels.semicircle_crossings_numpy(np.array([0.0, 1.0]), np.array([0.1, 0.1]),
                                                 np.array([0.2, 0.2]))
        assert out[0] == pytest.approx(0.1) and out[1] == pytest.approx(0.2)


class TestReports:
    def test_witness_values(self):
        assert ws.lower_bound_witness(4) == Fraction(3, 256)
        assert ws.lower_bound_witness(2) == Fraction(1, 32)
        for n in range(2, 120):
            assert ws.lower_bound_witness(n) == Fraction(2 + n, 32 * n * n)
        ratios = [ws.lower_bound_witness(n) * 32 * n for n in (10, 100, 1000)]
        assert all(r > 1 for r in ratios) and ratios == sorted(ratios, reverse=True)

    def test_report_n4(self):
        r = ws.distance_report(4)
        assert r.lower_witness == 3 / 256

    def test_report_n10(self):
        r = ws.distance_report(10)
        assert r.lower_paper == 1 / 320 and r.upper_paper == 59 / 20
        assert r.passed and r.witness_ok

    def test_report_n2(self):
        r = ws.distance_report(2)
        assert abs(r.distance - 2 / (3 * math.pi)) <= 1e-10
        assert (r.lower_paper, r.upper_paper) == (1 / 64, 59 / 4)
        assert r.passed

    def test_scaled_n2(self):
        r = ws.scaled_distance_report(2)
        assert abs(r.distance - 4 / (3 * math.pi)) <= 1e-10
        assert r.scaling_ok

    def test_scaled_n16(self):
        r = ws.scaled_distance_report(16)
        assert (r.lower_paper, r.upper_paper) == (1 / 256, 59 / 16)
        assert r.lower_paper <= r.distance <= r.upper_paper

    def test_sweep_to_200(self):
        for beta, semi in ws.paired_sweep(range(2, 201)):
            assert beta.passed and beta.witness_ok
            assert semi.passed and semi.scaling_ok
            assert abs(semi.distance / beta.distance - 2) <= 1e-9
            assert 1 / 32 <= beta.n_times_distance <= 59 / 2

    def test_pass_flag_follows_bounds(self):
        r = ws._report(5, "beta", 10.0, 1e-12, 0.1, 0.1, 1.0)
        assert not r.passed
        r = ws._report(5, "beta", 0.05, 1e-12, 0.1, 0.1, 1.0)
        assert not r.passed and not r.witness_ok
        r = ws._report(5, "beta", 0.1 - 5e-10, 1e-12, 0.1, 0.1, 1.0)
        assert r.passed

    def test_sweep_csv(self):
        text = ws.sweep_csv(ws.bounds_sweep(range(2, 6)))
        rows = list(csv.DictReader(io.StringIO(text)))
        assert list(rows[0]) == list(ws.SWEEP_COLUMNS)
        assert [int(r["n"]) for r in rows] == [2, 3, 4, 5]
        r4 = ws.distance_report(4)
        assert float(rows[2]["distance"]) == r4.distance
        assert rows[2]["pass"] == "true"

    def test_bad_n(self):
        from sortnet_stein.exact import DomainError

        with pytest.raises(DomainError):
            ws.distance_report(1)
