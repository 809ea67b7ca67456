import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from sortnet_stein import continuous as cl
from sortnet_stein.exact import DomainError

# F_S(1/2) by 40-digit quadrature of the density; equals 2/3 + sqrt(3)/(4 pi)
SEMICIRCLE_CDF_HALF = 0.804498890522114679


class TestSemicircle:
    def test_pdf_values(self):
        assert cl.semicircle_pdf(0.0) == pytest.approx(2 / math.pi, abs=1e-15)
        assert cl.semicircle_pdf(1.0) == 0.0
        assert cl.semicircle_pdf(-1.0) == 0.0
        assert cl.semicircle_pdf(3.0) == 0.0

    def test_pdf_normalized(self):
        val, _ = integrate.quad(cl.semicircle_pdf, -1, 1, epsabs=1e-13, limit=200)
        assert abs(val - 1) <= 1e-12

    def test_cdf_values(self):
        assert cl.semicircle_cdf(0.0) == pytest.approx(0.5, abs=1e-16)
        assert cl.semicircle_cdf(1.0) == 1.0
        assert cl.semicircle_cdf(-1.0) == 0.0
        assert cl.semicircle_cdf(-4.0) == 0.0 and cl.semicircle_cdf(4.0) == 1.0
        assert abs(cl.semicircle_cdf(0.5) - SEMICIRCLE_CDF_HALF) <= 1e-15

    def test_cdf_monotone_and_derivative(self):
        s = np.linspace(-0.99, 0.99, 2001)
        F = cl.semicircle_cdf(s)
        assert np.all(np.diff(F) > 0)
        h = 1e-5
        dF = (cl.semicircle_cdf(s + h) - cl.semicircle_cdf(s - h)) / (2 * h)
        assert np.max(np.abs(dF - cl.semicircle_pdf(s))) <= 1e-6

    def test_edge_series_continuity(self):
        # both branches against 30-digit quadrature of the edge mass
        with mp.workdps(30):
            for u in (0.5e-8, 0.999e-8, 1.001e-8, 1e-7):
                mass = mp.quad(lambda t: 2 / mp.pi * mp.sqrt(t * (2 - t)), [0, u])
                # the series branch is relatively accurate, the closed form absolutely
                rel = 1e-9 if u < 1e-8 else 0.0
                assert cl.semicircle_cdf(-1.0 + u) == pytest.approx(float(mass), rel=rel, abs=1e-16)
                tail = 1.0 - cl.semicircle_cdf(1.0 - u)
                assert tail == pytest.approx(float(mass), abs=2e-16)

    def test_scalar_and_array_agree(self):
        s = np.linspace(-1.2, 1.2, 501)
        assert np.allclose(cl.semicircle_cdf(s), [cl.semicircle_cdf(float(x)) for x in s],
                           atol=4e-16, rtol=0)

    def test_antiderivative_matches_quadrature(self):
        F = lambda t: mp.mpf(1) / 2 + (t * mp.sqrt(1 - t * t) + mp.asin(t)) / mp.pi  # noqa: E731
        with mp.workdps(30):
            for s in np.linspace(-1.0, 1.0, 41):
                q = float(mp.quad(F, [-1, float(s)]))
                assert abs(cl.semicircle_cdf_antiderivative(s) - q) <= 1e-12
        assert cl.semicircle_cdf_antiderivative(-3.0) == 0.0
        assert cl.semicircle_cdf_antiderivative(2.5) == pytest.approx(2.5, abs=1e-15)


class TestBeta:
    def test_pdf_at_half(self):
        assert cl.beta_pdf(0.5, 1.5, 1.5) == pytest.approx(4 / math.pi, rel=1e-14)

    def test_pdf_normalized(self):
        val = integrate.quad(lambda z: cl.beta_pdf(z, 1.5, 1.5), 0, 1, epsabs=1e-13)[0]
        assert abs(val - 1) <= 1e-12

    def test_cdf_half(self):
        assert cl.beta_cdf(0.5, 1.5, 1.5) == pytest.approx(0.5, abs=1e-15)

    def test_cdf_identity_with_semicircle(self):
        z = np.linspace(0, 1, 1001)
        assert np.max(np.abs(cl.beta_cdf(z, 1.5, 1.5) - cl.semicircle_cdf(2 * z - 1))) <= 1e-12

    @pytest.mark.parametrize("params", [(0, 1), (1, -2), (-1, -1)])
    def test_bad_parameters(self, params):
        with pytest.raises(DomainError):
            cl.beta_pdf(0.5, *params)
        with pytest.raises(DomainError):
            cl.beta_moments(*params)

    def test_moments(self):
        mean, second = cl.beta_moments(1.5, 1.5)
        assert mean == 0.5
        assert second / 2 == pytest.approx(5 / 32, abs=1e-16)
        assert cl.beta_moments(1, 1)[1] == pytest.approx(1 / 3)

    @pytest.mark.parametrize("a,b", [(1.5, 1.5), (2.0, 3.0), (0.7, 1.3)])
    def test_moments_by_quadrature(self, a, b):
        m1 = cl.beta_expectation(lambda z: z, a, b)
        m2 = cl.beta_expectation(lambda z: z * z, a, b)
        assert (m1, m2) == pytest.approx(cl.beta_moments(a, b), abs=1e-12)

    @pytest.mark.parametrize("a,b", [(1.5, 1.5), (2.0, 3.0), (0.7, 1.3)])
    def test_antiderivative_matches_quadrature(self, a, b):
        with mp.workdps(30):
            for z in np.linspace(0, 1, 21):
                q = float(mp.quad(lambda t: mp.betainc(a, b, 0, t, regularized=True), [0, float(z)]))
                assert abs(cl.beta_cdf_antiderivative(z, a, b) - q) <= 1e-12

    def test_three_halves_closed_form_antiderivative(self):
        z = np.linspace(-0.5, 1.5, 201)
        assert np.allclose(cl.BETA_3_2.cdf_antiderivative(z),
                           cl.beta_cdf_antiderivative(z, 1.5, 1.5), atol=1e-14, rtol=0)


class TestLawDescriptor:
    def test_json_round_trip(self):
        for law in (cl.SEMICIRCLE, cl.BETA_3_2, cl.ContinuousLaw.beta_law(2, 5)):
            assert cl.ContinuousLaw.from_json(law.to_json()) == law

    def test_json_shape(self):
        import json

        assert json.loads(cl.BETA_3_2.to_json()) == {"kind": "beta", "alpha": 1.5, "beta": 1.5}

    def test_invalid(self):
        with pytest.raises(DomainError):
            cl.ContinuousLaw("gauss")
        with pytest.raises(DomainError):
            cl.ContinuousLaw("beta", 1.0, None)

    @pytest.mark.parametrize("law", [cl.SEMICIRCLE, cl.BETA_3_2, cl.ContinuousLaw.beta_law(2, 3)])
    def test_cdf_endpoints(self, law):
        lo, hi = law.support
        assert law.cdf(lo) == 0.0 and law.cdf(hi) == 1.0


class TestSteinSolver:
    def test_constant_h(self):
        sol = cl.solve_stein_equation(lambda w: 3.0)
        assert np.max(np.abs(sol.f)) <= 1e-13

    def test_identity_h_has_constant_solution(self):
        # w(1-w) f' + (3/2)(1-2w) f = w - 1/2 is solved by f = -1/3
        sol = cl.solve_stein_equation(lambda w: w)
        assert np.max(np.abs(sol.f + 1 / 3)) <= 1e-12
        assert sol.sup_f <= 2 / 3 and sol.sup_fprime <= 8

    def test_half_square_has_linear_solution(self):
        # f = -5/48 - w/8 solves the equation for h = w^2/2
        sol = cl.solve_stein_equation(lambda w: w * w / 2)
        assert np.max(np.abs(sol.f - (-5 / 48 - sol.grid / 8))) <= 1e-12
        assert np.max(np.abs(sol.fprime[1:-1] + 1 / 8)) <= 1e-9
        assert sol.max_residual <= 1e-8
        assert sol.sup_f <= 2 / 3 and sol.sup_fprime <= 8

    def test_bounds_on_family(self):
        fam = cl.lipschitz_family()
        assert len(fam) == 20
        for name, h in fam.items():
            sol = cl.solve_stein_equation(h)
            assert sol.sup_f <= 2 / 3 + 1e-6, name
            assert sol.sup_fprime <= 8 + 1e-4, name
            assert sol.max_residual <= 1e-8, name

    def test_family_is_one_lipschitz(self):
        w = np.linspace(0, 1, 20001)
        for name, h in cl.lipschitz_family().items():
            v = np.array([h(x) for x in w])
            assert np.max(np.abs(np.diff(v))) / (w[1] - w[0]) <= 1 + 1e-9, name

    def test_other_beta_parameters(self):
        sol = cl.solve_stein_equation(math.sin, 2.0, 3.0, grid_size=201)
        assert sol.max_residual <= 1e-8

    def test_extended_by_zero(self):
        sol = cl.solve_stein_equation(lambda w: w)
        assert sol(-0.1) == 0.0 and sol(1.2) == 0.0
        assert sol(0.3) == pytest.approx(-1 / 3, abs=1e-12)

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            cl.solve_stein_equation(lambda w: w, grid_size=50)
        with pytest.raises(DomainError):
            cl.solve_stein_equation(lambda w: math.inf if w > 0.5 else 0.0)

    def test_csv_dump(self):
        sol = cl.solve_stein_equation(lambda w: w, grid_size=101)
        lines = sol.to_csv().splitlines()
        assert lines[0] == "w,f,fprime,residual"
        assert len(lines) == 102
        w, f, *_ = map(float, lines[50].split(","))
        assert w == sol.grid[49] and f == sol.f[49]


class TestBetaCharacterization:
    def test_constant(self):
        assert abs(cl.check_beta_stein_characterization(lambda w: 1.0, fprime=lambda w: 0.0)) <= 1e-10

    def test_identity(self):
        # E Z(1-Z) + (3/2) EZ - 3 EZ^2 = 3/16 + 3/4 - 15/16
        assert 3 / 16 + 3 / 4 - 15 / 16 == 0
        assert abs(cl.check_beta_stein_characterization(lambda w: w, fprime=lambda w: 1.0)) <= 1e-10

    def test_sine_numeric_derivative(self):
        val = cl.check_beta_stein_characterization(lambda w: math.sin(math.pi * w))
        assert abs(val) <= 1e-10

    def test_random_smooth(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            c = rng.normal(size=4)
            k = rng.uniform(0.5, 4.0, size=4)

            def f(w, c=c, k=k):
                return sum(ci * math.sin(ki * w + ci) for ci, ki in zip(c, k))

            def fp(w, c=c, k=k):
                return sum(ci * ki * math.cos(ki * w + ci) for ci, ki in zip(c, k))

            assert abs(cl.check_beta_stein_characterization(f, 1.5, 1.5, fp)) <= 1e-10
