"""
Tests for cut-off statistics, the bound suite, mixing times, family scans
and shape profiles.
"""

import math

import numpy as np
import pytest

from conftest import random_monotone_chain
from models.errors import InvalidParams, TooFewPoints
from models.report_models import CutoffStats, FamilySpec, ScanThresholds
from services import cutoff_service as cs
from services import family_service
from services.hitting_time_service import sep_continuous, sep_discrete
from services.spectral_service import eigenvalues, spectrum_from_values

BOUND_GRID = (0.1, 0.25, 0.5, 1.0, 2.0)


@pytest.fixture
def toy_stats():
    return CutoffStats(gap=1.0, mean_hit=4.0, window=2.0, product=4.0, theta2=4.0)


def family_points(kind, sizes, key, **fixed):
    return [FamilySpec(kind, {**fixed, key: size}) for size in sizes]


class TestCutoffStats:

    def test_simple_walk(self):
        n = 10
        stats = cs.cutoff_stats(eigenvalues(family_service.srw(n)))
        gap = 1 - math.cos(math.pi / (n + 1))
        assert stats.gap == pytest.approx(gap, abs=1e-13)
        assert stats.mean_hit == pytest.approx(n * (n + 2) / 3, rel=1e-10)
        assert stats.product == pytest.approx(gap * n * (n + 2) / 3, rel=1e-10)
        assert stats.theta2 >= 1.0

    def test_bernoulli_laplace_on_four_states(self):
        stats = cs.cutoff_stats(eigenvalues(family_service.bernoulli_laplace(4, 2)))
        assert stats.gap == pytest.approx(1.0, abs=1e-13)
        assert stats.mean_hit == pytest.approx(5 / 3, rel=1e-12)
        assert stats.window == pytest.approx(math.sqrt(13) / 3, rel=1e-12)
        assert stats.product == pytest.approx(5 / 3, rel=1e-12)

    def test_periodic_hamming(self):
        # spectrum {2/3, 4/3, 2}
        stats = cs.cutoff_stats(eigenvalues(family_service.hamming(2, 3)))
        assert stats.gap == pytest.approx(2 / 3, abs=1e-13)
        assert stats.mean_hit == pytest.approx(11 / 4, rel=1e-12)

    def test_window_is_dominated_by_mean(self, rng):
        for m in (2, 15, 80):
            for spectrum in (eigenvalues(random_monotone_chain(rng, m)),
                             eigenvalues(family_service.biased_walk(0.8, m))):
                stats = cs.cutoff_stats(spectrum)
                assert stats.window <= stats.mean_hit / math.sqrt(stats.product) * (1 + 1e-12)
                assert stats.window <= stats.mean_hit * (1 + 1e-12)

    def test_window_from_variance(self):
        stats = cs.cutoff_stats(spectrum_from_values([0.5, 2.0]))
        assert stats.window == pytest.approx(math.sqrt(4.25))
        assert stats.theta2 == pytest.approx(1.0 + 0.25 ** 2)


class TestBounds:

    def test_chebyshev_closed_values(self, toy_stats):
        bounds = cs.chebyshev_bounds(toy_stats, 1.0)
        assert bounds.upper == pytest.approx(0.2)
        assert bounds.lower == pytest.approx(0.8)

    def test_chebyshev_at_product_three(self):
        stats = CutoffStats(gap=1.0, mean_hit=3.0, window=1.0, product=3.0, theta2=1.0)
        bounds = cs.chebyshev_bounds(stats, 1.0)
        assert bounds.upper == pytest.approx(0.25)
        assert bounds.lower == pytest.approx(0.75)

    def test_window_floor_on_simple_walk(self):
        spectrum = eigenvalues(family_service.srw(50))
        stats = cs.cutoff_stats(spectrum)
        value = sep_continuous(spectrum, stats.mean_hit + stats.window)
        assert value > 0.01
        assert value >= cs.window_lower_bound(stats, 1.0)

    def test_exponential_closed_values(self, toy_stats):
        bounds = cs.exponential_bounds(toy_stats, 1.0)
        assert bounds.upper == pytest.approx(math.exp(-0.75))
        assert bounds.lower == pytest.approx(1 - math.exp(-0.75))

    def test_exponential_saturates_for_small_c(self, toy_stats):
        assert cs.exponential_bounds(toy_stats, 0.01).upper == 1.0

    def test_window_lower_closed_value(self, toy_stats):
        assert cs.window_lower_bound(toy_stats, 0.0) == pytest.approx(0.5 * math.exp(-3.0))

    def test_tau_chebyshev(self, toy_stats):
        shrink = 1 / (1 + math.sqrt(3))
        bounds = cs.tau_chebyshev_bounds(toy_stats, 1.0, 0.25, tau=4.0)
        assert bounds.upper == pytest.approx(1 / (1 + shrink * 4.0))

    @pytest.mark.parametrize("c", [0.0, -0.5])
    def test_non_positive_c(self, toy_stats, c):
        with pytest.raises(InvalidParams):
            cs.chebyshev_bounds(toy_stats, c)
        with pytest.raises(InvalidParams):
            cs.exponential_bounds(toy_stats, c)

    def test_window_lower_rejects_negative_c(self, toy_stats):
        with pytest.raises(InvalidParams):
            cs.window_lower_bound(toy_stats, -1.0)

    @pytest.mark.parametrize("chain_factory", [
        lambda rng: random_monotone_chain(rng, 30),
        lambda rng: family_service.bernoulli_laplace(60, 20),
        lambda rng: family_service.biased_walk(0.7, 40),
    ])
    def test_bounds_hold_against_exact_separation(self, rng, chain_factory):
        spectrum = eigenvalues(chain_factory(rng))
        stats = cs.cutoff_stats(spectrum)
        t, sigma = stats.mean_hit, stats.window
        for c in BOUND_GRID:
            after = sep_continuous(spectrum, (1 + c) * t)
            chebyshev = cs.chebyshev_bounds(stats, c)
            exponential = cs.exponential_bounds(stats, c)
            assert after <= chebyshev.upper + 1e-12
            assert after <= exponential.upper + 1e-12
            if c < 1:
                before = sep_continuous(spectrum, (1 - c) * t)
                assert before >= chebyshev.lower - 1e-12
                assert before >= exponential.lower - 1e-12
            assert sep_continuous(spectrum, t + c * sigma) >= cs.window_lower_bound(stats, c) - 1e-12


class TestMixingTime:

    def test_bracket_values(self, toy_stats):
        bracket = cs.mixing_bracket(toy_stats, 0.25)
        assert bracket.low == pytest.approx(4 - 2 / math.sqrt(3))
        assert bracket.high == pytest.approx(4 + 2 * math.sqrt(3))

    @pytest.mark.parametrize("eps", [0.05, 0.25, 0.5, 0.9])
    def test_root_inside_bracket(self, eps):
        spectrum = eigenvalues(family_service.bernoulli_laplace(40, 15))
        tau = cs.mixing_time(spectrum, eps)
        assert sep_continuous(spectrum, tau) == pytest.approx(eps, abs=1e-8)
        assert cs.mixing_bracket(cs.cutoff_stats(spectrum), eps).contains(tau)

    def test_single_phase(self):
        assert cs.mixing_time(spectrum_from_values([1.0]), 0.25) == pytest.approx(math.log(4), rel=1e-8)

    def test_two_phases(self):
        # sep(t) = 2 e^-t - e^-2t
        assert cs.mixing_time(spectrum_from_values([1.0, 2.0]), 0.75) == pytest.approx(math.log(2), rel=1e-8)

    def test_discrete_geometric(self):
        spectrum = spectrum_from_values([0.5])
        assert cs.mixing_time_discrete(spectrum, 0.2) == 3
        assert cs.mixing_time_discrete(spectrum, 0.3) == 2

    def test_discrete_is_first_crossing(self, rng):
        spectrum = eigenvalues(random_monotone_chain(rng, 12))
        k = cs.mixing_time_discrete(spectrum, 0.25)
        assert sep_discrete(spectrum, k) <= 0.25 < sep_discrete(spectrum, k - 1)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
    def test_eps_range(self, eps):
        spectrum = spectrum_from_values([0.5])
        with pytest.raises(InvalidParams):
            cs.mixing_time(spectrum, eps)
        with pytest.raises(InvalidParams):
            cs.mixing_time_discrete(spectrum, eps)


class TestScan:

    def test_bernoulli_laplace_has_cutoff(self):
        points = [FamilySpec("bernoulli_laplace", {"r": r, "n": r * r}) for r in (5, 10, 20, 40, 80)]
        verdict = cs.scan_family(points)
        assert verdict.verdict == "cutoff"
        assert verdict.shape == "non-gaussian"
        assert verdict.trend == sorted(verdict.trend)
        assert cs.PRECUTOFF_NOTE in verdict.notes

    def test_simple_walk_has_no_cutoff(self):
        verdict = cs.scan_family(family_points("srw", [10, 20, 40, 80], "n"))
        assert verdict.verdict == "no-cutoff"
        assert verdict.shape == "n/a"
        assert max(verdict.trend) < math.pi ** 2 / 6

    def test_biased_walk_is_gaussian(self):
        verdict = cs.scan_family(family_points("biased_walk", [25, 50, 100, 200], "n", p=0.75))
        assert verdict.verdict == "cutoff"
        assert verdict.shape == "gaussian"

    def test_discrete_scan_needs_monotone_chains(self):
        points = family_points("hamming", [4, 8, 16], "r", n=2)
        verdict = cs.scan_family(points, mode="discrete")
        assert verdict.verdict == "inconclusive"
        assert any("monotone" in note for note in verdict.notes)
        assert not any(point.monotone for point in verdict.family_points)

    def test_thresholds_drive_the_verdict(self):
        points = family_points("srw", [10, 20, 40], "n")
        strict = ScanThresholds(bounded_ratio=1.001)
        assert cs.scan_family(points, thresholds=strict).verdict == "inconclusive"

    def test_parallel_scan_matches_serial(self):
        points = family_points("biased_walk", [20, 40, 80], "n", p=0.7)
        serial = cs.scan_family(points)
        parallel = cs.scan_family(points, jobs=3)
        assert parallel.trend == serial.trend
        assert parallel.verdict == serial.verdict

    def test_progress_callback(self):
        seen = []
        cs.scan_family(family_points("srw", [5, 6, 7], "n"), on_point=seen.append)
        assert sorted(point.param for point in seen) == [5.0, 6.0, 7.0]

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            cs.scan_family(family_points("srw", [5, 10], "n"))

    def test_sizes_must_increase(self):
        with pytest.raises(InvalidParams):
            cs.scan_family(family_points("srw", [10, 5, 20], "n"))

    def test_unknown_mode(self):
        with pytest.raises(InvalidParams):
            cs.scan_family(family_points("srw", [5, 10, 20], "n"), mode="lazy")

    def test_point_rows(self):
        verdict = cs.scan_family(family_points("srw", [5, 10, 20], "n"))
        row = verdict.to_dict()["points"][0]
        assert row["param"] == 5.0 and row["m"] == 5
        assert set(row["theta"]) == {str(k) for k in range(2, 9)}


class TestShapeProfile:

    def test_gumbel_limit_of_linear_spectrum(self):
        # T is r times the maximum of r standard exponentials
        r = 500
        spectrum = spectrum_from_values(np.arange(1, r + 1) / r)
        profile = cs.shape_profile(spectrum, np.linspace(-3, 4, 29))
        assert profile.sup_deviation_gumbel < 0.01
        assert profile.gumbel_centering["scale"] == pytest.approx(r)
        assert profile.sup_deviation_gumbel < profile.sup_deviation_gaussian

    def test_biased_walk_prefers_gaussian(self):
        spectrum = eigenvalues(family_service.biased_walk(0.75, 200))
        profile = cs.shape_profile(spectrum, np.linspace(-3, 3, 25))
        assert profile.sup_deviation_gaussian < profile.sup_deviation_gumbel

    def test_log_centering(self):
        spectrum = spectrum_from_values(np.arange(1, 51) / 50)
        profile = cs.shape_profile(spectrum, [-1.0, 0.0, 1.0], centering="log")
        assert profile.gumbel_centering["method"] == "log"
        assert profile.gumbel_centering["center"] == pytest.approx(50 * math.log(50))

    def test_rows_and_summary(self):
        profile = cs.shape_profile(spectrum_from_values([0.5, 1.0, 1.5]), [1.0, -1.0, 0.0])
        rows = profile.to_rows()
        assert [row["c"] for row in rows] == [-1.0, 0.0, 1.0]
        assert set(rows[0]) == {"c", "sep", "gaussian_ref", "gumbel_ref", "sep_gumbel"}
        assert set(profile.summary()) == {"sup_deviation_gaussian", "sup_deviation_gumbel",
                                          "gaussian_centering", "gumbel_centering"}

    @pytest.mark.parametrize("grid", [[], [-7.0, 0.0], [0.0, 6.5]])
    def test_grid_range(self, grid):
        with pytest.raises(InvalidParams):
            cs.shape_profile(spectrum_from_values([0.5, 1.0]), grid)

    def test_unknown_centering(self):
        with pytest.raises(InvalidParams):
            cs.shape_profile(spectrum_from_values([0.5, 1.0]), [0.0], centering="median")
