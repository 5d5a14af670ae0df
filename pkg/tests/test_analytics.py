import math

import numpy as np
import pytest
from scipy import integrate

from pulsefid import analytics
from pulsefid.analytics import QuadratureSpec
from pulsefid.exceptions import ConvergenceError, DomainError
from pulsefid.noise import NoiseModel
from tests.utils import random_angles


class TestFidelityFormulas:
    @pytest.mark.parametrize(
        ("epsilon", "theta", "phi", "expected"),
        [
            (0.0, 1.2, 0.4, 1.0),
            (math.pi, 0.0, 0.0, 0.0),
            (math.pi, math.pi / 2, 0.0, 1.0),
            (math.pi, math.pi / 2, math.pi / 2, 0.0),
            (math.pi / 2, math.pi / 2, math.pi / 4, 0.75),
        ],
    )
    def test_amplitude(self, epsilon, theta, phi, expected):
        assert analytics.fidelity_amplitude(epsilon, theta, phi) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize(
        ("epsilon", "theta", "expected"),
        [
            (0.0, 1.0, 1.0),
            (math.pi, 0.0, 1.0),
            (math.pi, math.pi / 2, 0.0),
            (math.pi / 2, math.pi / 4, 0.75),
        ],
    )
    def test_phase(self, epsilon, theta, expected):
        assert analytics.fidelity_phase(epsilon, theta) == pytest.approx(expected, abs=1e-15)

    def test_range(self):
        rng = np.random.default_rng(20)
        theta, phi = random_angles(rng, 10_000)
        eps = rng.uniform(-1e3, 1e3, 10_000)
        for values in (analytics.fidelity_amplitude(eps, theta, phi), analytics.fidelity_phase(eps, theta)):
            assert np.all((values >= 0) & (values <= 1))

    def test_scalar_returns_float(self):
        assert isinstance(analytics.fidelity_amplitude(0.1, 0.2, 0.3), float)
        assert isinstance(analytics.minimum_fidelity(0.1), float)

    def test_phase_is_amplitude_reparametrized(self):
        rng = np.random.default_rng(21)
        eps = rng.uniform(-6, 6, 1000)
        theta = rng.uniform(0, math.pi / 2, 1000)
        # sin(theta') cos(0) == cos(theta)
        assert np.allclose(
            analytics.fidelity_phase(eps, theta),
            analytics.fidelity_amplitude(eps, math.pi / 2 - theta, 0.0),
            atol=1e-10,
        )

    def test_minimum_fidelity_is_a_lower_bound(self):
        rng = np.random.default_rng(22)
        theta, phi = random_angles(rng, 1000)
        eps = rng.uniform(-6, 6, 1000)
        assert np.all(analytics.fidelity_amplitude(eps, theta, phi) >= analytics.minimum_fidelity(eps) - 1e-15)
        assert analytics.minimum_fidelity(0.4) == pytest.approx(analytics.fidelity_amplitude(0.4, 0.0, 0.0))

    def test_free_evolution(self):
        assert analytics.free_evolution_fidelity(1.0, 0.3, math.pi / 2) == pytest.approx(math.cos(0.3) ** 2)
        assert analytics.free_evolution_fidelity(1.0, 0.3, 0.0) == pytest.approx(1.0)


class TestMeanFidelity:
    @pytest.mark.parametrize(
        ("n_delta_sq", "expected"),
        [(0.1, 0.968), (1.0, 0.789), (10.0, 0.667)],
    )
    def test_amplitude(self, n_delta_sq, expected):
        n = 100
        model = NoiseModel.amplitude(math.sqrt(n_delta_sq / n))
        assert analytics.mean_fidelity(n, model) == pytest.approx(expected, abs=5e-4)

    def test_noiseless(self):
        assert analytics.mean_fidelity(1000, NoiseModel.amplitude(0.0)) == 1.0
        assert analytics.worst_case_mean_fidelity(1000, NoiseModel.phase(0.0)) == 1.0

    def test_phase_is_amplitude_with_four_times_the_cycles(self):
        for n in (1, 10, 250):
            assert analytics.mean_fidelity(n, NoiseModel.phase(0.03)) == analytics.mean_fidelity(
                4 * n, NoiseModel.amplitude(0.03)
            )

    def test_decreasing_towards_two_thirds(self):
        model = NoiseModel.amplitude(0.05)
        values = [analytics.mean_fidelity(n, model) for n in range(1, 10_000, 97)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] > 2 / 3
        assert values[-1] == pytest.approx(2 / 3, abs=1e-10)

    @pytest.mark.parametrize(
        ("n_delta_sq", "expected"),
        [(0.1, 0.9524), (1.0, 0.6839), (10.0, 0.5000)],
    )
    def test_worst_case(self, n_delta_sq, expected):
        model = NoiseModel.amplitude(math.sqrt(n_delta_sq / 400))
        assert analytics.worst_case_mean_fidelity(400, model) == pytest.approx(expected, abs=5e-5)

    def test_zero_cycles(self):
        with pytest.raises(DomainError):
            analytics.mean_fidelity(0, NoiseModel.amplitude(0.1))

    def test_effective_n_delta_sq(self):
        assert analytics.effective_n_delta_sq(100, NoiseModel.amplitude(0.1)) == pytest.approx(1.0)
        assert analytics.effective_n_delta_sq(100, NoiseModel.phase(0.1)) == pytest.approx(4.0)

    def test_uniform_average_of_closed_form(self):
        n_delta_sq = 0.7
        sigma = math.sqrt(2 * n_delta_sq)

        # E over eps ~ N(0, 2 N delta^2) of cos^2(eps/2), then the sphere average 1/3 of the sin^2 term
        def averaged(eps):
            weight = math.exp(-(eps**2) / (2 * sigma**2)) / (sigma * math.sqrt(2 * math.pi))
            s = math.sin(eps / 2) ** 2
            return weight * (1 - s + s / 3)

        value, _ = integrate.quad(averaged, -12 * sigma, 12 * sigma, epsabs=1e-13)
        model = NoiseModel.amplitude(math.sqrt(n_delta_sq / 50))
        assert value == pytest.approx(analytics.mean_fidelity(50, model), abs=1e-8)


class TestBounds:
    def test_max_cycles(self):
        assert analytics.max_cycles(0.01) == pytest.approx(1e4)
        assert analytics.max_cycles(0.1) == pytest.approx(100)

    def test_max_protection_time(self):
        assert analytics.max_protection_time(1e-6, 0.01) == pytest.approx(1e-2)
        assert analytics.max_protection_time(2.5, 1.0) == pytest.approx(2.5)
        assert 0.9e9 <= analytics.max_protection_time(1.0, math.pi * 1e-5) <= 1.1e9

    @pytest.mark.parametrize("delta", [0.0, -0.1, math.nan])
    def test_domain(self, delta):
        with pytest.raises(DomainError):
            analytics.max_cycles(delta)
        with pytest.raises(DomainError):
            analytics.max_protection_time(1.0, delta)
        with pytest.raises(DomainError):
            analytics.max_protection_time(delta, 0.1)


class TestFidelityPdf:
    @pytest.mark.parametrize("n_delta_sq", [0.1, 1.0, 10.0])
    def test_normalized(self, n_delta_sq):
        assert analytics.pdf_grid(n_delta_sq).normalization() == pytest.approx(1.0, abs=2e-3)

    @pytest.mark.parametrize("n_delta_sq", [0.1, 1.0, 10.0])
    def test_mean_matches_closed_form(self, n_delta_sq):
        expected = 2 / 3 + math.exp(-n_delta_sq) / 3
        assert analytics.pdf_grid(n_delta_sq).mean() == pytest.approx(expected, abs=2e-3)

    def test_positive(self):
        grid = analytics.pdf_grid(1.0, grid_size=301)
        assert np.all(grid.densities > 0)

    def test_diverges_at_one(self):
        # P(F) sqrt(1 - F) settles to a constant
        scaled = [
            analytics.fidelity_pdf(1 - d, 0.1) * math.sqrt(d) for d in (1e-4, 1e-5, 1e-6)
        ]
        assert scaled[1] == pytest.approx(scaled[2], rel=1e-2)
        assert scaled[0] == pytest.approx(scaled[2], rel=5e-2)

    def test_increasing_in_last_decade(self):
        f = 1 - np.logspace(-1, -6, 50)
        assert np.all(np.diff(analytics.fidelity_pdf_many(f, 1.0)) > 0)

    @pytest.mark.parametrize("fidelity", [0.0, 1.0, -0.1, 1.2])
    def test_domain(self, fidelity):
        with pytest.raises(DomainError):
            analytics.fidelity_pdf(fidelity, 1.0)

    @pytest.mark.parametrize("n_delta_sq", [0.0, -1.0])
    def test_n_delta_sq_domain(self, n_delta_sq):
        with pytest.raises(DomainError):
            analytics.fidelity_pdf(0.5, n_delta_sq)

    def test_convergence_error(self):
        with pytest.raises(ConvergenceError):
            analytics.fidelity_pdf(0.5, 10.0, QuadratureSpec(n_term_cap=1))

    def test_scalar_matches_batch(self):
        f = np.array([0.2, 0.5, 0.9])
        many = analytics.fidelity_pdf_many(f, 1.0)
        assert [analytics.fidelity_pdf(x, 1.0) for x in f] == pytest.approx(many.tolist(), rel=1e-13)

    def test_order_independent(self):
        f = np.linspace(0.01, 0.99, 64)
        shuffled = np.random.default_rng(23).permutation(64)
        forward = analytics.fidelity_pdf_many(f, 1.0)
        assert np.allclose(analytics.fidelity_pdf_many(f[shuffled], 1.0), forward[shuffled], rtol=1e-14, atol=0)

    def test_more_nodes_agree(self):
        f = np.array([0.1, 0.5, 0.99])
        coarse = analytics.fidelity_pdf_many(f, 0.1, QuadratureSpec(n_points=128))
        fine = analytics.fidelity_pdf_many(f, 0.1, QuadratureSpec(n_points=512))
        assert np.allclose(coarse, fine, rtol=1e-6)

    @pytest.mark.parametrize(
        "kwargs",
        [{"n_points": 8}, {"n_term_cap": 0}, {"term_tol": 0.0}],
    )
    def test_quadrature_spec_domain(self, kwargs):
        with pytest.raises(DomainError):
            QuadratureSpec(**kwargs)


class TestPdfGrid:
    def test_grid_layout(self):
        grid = analytics.pdf_grid(1.0, grid_size=11, edge=1e-4)
        assert grid.fidelity_points[0] == pytest.approx(1e-4)
        assert grid.fidelity_points[-1] == pytest.approx(1 - 1e-4)
        assert np.all(np.diff(grid.fidelity_points) > 0)

    @pytest.mark.parametrize(
        "kwargs",
        [{"grid_size": 1}, {"edge": 0.0}, {"edge": 0.5}],
    )
    def test_domain(self, kwargs):
        with pytest.raises(DomainError):
            analytics.pdf_grid(1.0, **kwargs)

    def test_validation(self):
        with pytest.raises(DomainError):
            analytics.PdfGrid(np.array([0.5, 0.2]), np.array([1.0, 1.0]))
        with pytest.raises(DomainError):
            analytics.PdfGrid(np.array([0.2, 0.5]), np.array([1.0, -1.0]))
        with pytest.raises(DomainError):
            analytics.PdfGrid(np.array([0.2, 0.5]), np.array([1.0]))

    def test_integrates_uniform_density(self):
        f = 1 - np.linspace(math.sqrt(1 - 1e-6), math.sqrt(1e-6), 2001) ** 2
        grid = analytics.PdfGrid(f, np.ones_like(f))
        assert grid.normalization() == pytest.approx(1.0, abs=1e-5)
        assert grid.mean() == pytest.approx(0.5, abs=1e-5)


class TestBinProbabilities:
    @pytest.mark.parametrize("n_delta_sq", [0.1, 1.0, 10.0])
    def test_sum_to_one(self, n_delta_sq):
        probabilities = analytics.bin_probabilities(np.linspace(0, 1, 101), n_delta_sq)
        assert np.all(probabilities > 0)
        assert probabilities.sum() == pytest.approx(1.0, abs=2e-3)

    def test_agrees_with_grid(self):
        grid = analytics.pdf_grid(1.0)
        probabilities = analytics.bin_probabilities(np.array([0.0, 0.5, 1.0]), 1.0)
        assert probabilities[0] + probabilities[1] == pytest.approx(grid.normalization(), abs=2e-3)

    def test_domain(self):
        with pytest.raises(DomainError):
            analytics.bin_probabilities(np.array([0.0, 0.5, 0.4]), 1.0)
        with pytest.raises(DomainError):
            analytics.bin_probabilities(np.array([0.0, 1.5]), 1.0)
