"""
Tests for chain construction, validation, stationary laws and symmetrization.
"""

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.sparse import issparse

from conftest import dense_continuous_law, dense_nonzero_eigenvalues, random_monotone_chain
from models.errors import (
    ChainAnalysisError,
    InvalidParams,
    NotStochastic,
    OutOfRange,
    Reducible,
    StationaryOverflow,
)
from services.chain_service import (
    build_chain,
    chain_from_dict,
    from_generator_rates,
    is_monotone,
    stationary,
    symmetrize,
    transition_matrix,
)
from services.distance_service import evolve_continuous
from services.family_service import bernoulli_laplace


class TestBuildChain:
    """Validation order: range, row sums, irreducibility"""

    def test_lazy_pair_is_valid(self, lazy_pair):
        assert lazy_pair.m == 1
        assert lazy_pair.size == 2
        np.testing.assert_array_equal(lazy_pair.r, [0.5, 0.5])

    def test_srw_on_four_states(self, srw3):
        assert srw3.m == 3
        np.testing.assert_array_equal(srw3.p, [0.5, 0.5, 0.5])

    def test_zero_down_rate_is_reducible(self):
        with pytest.raises(Reducible):
            build_chain([0.5], [0.0], [0.5, 1.0])

    def test_zero_up_rate_is_reducible(self):
        with pytest.raises(Reducible):
            build_chain([0.0, 0.5], [0.5, 0.5], [1.0, 0.0, 0.5])

    def test_entry_above_one(self):
        with pytest.raises(OutOfRange):
            build_chain([1.5], [0.5], [-0.5, 0.5])

    def test_negative_holding(self):
        with pytest.raises(OutOfRange):
            build_chain([0.6, 0.5], [0.5, 0.5], [0.4, -0.1, 0.5])

    def test_range_checked_before_row_sums(self):
        with pytest.raises(OutOfRange):
            build_chain([1.2], [0.5], [0.5, 0.5])

    def test_row_sum_off(self):
        with pytest.raises(NotStochastic):
            build_chain([0.5], [0.5], [0.5, 0.499])

    def test_rows_within_tolerance_are_renormalized(self):
        chain = build_chain([0.5], [0.5], [0.5 + 4e-13, 0.5])
        sums = np.array([chain.r[0] + chain.p[0], chain.q[0] + chain.r[1]])
        np.testing.assert_allclose(sums, 1.0, rtol=0, atol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(InvalidParams):
            build_chain([0.5, 0.5], [0.5], [0.5, 0.5])

    def test_errors_share_one_base(self):
        with pytest.raises(ChainAnalysisError):
            build_chain([0.5], [0.0], [0.5, 1.0])

    def test_rates_are_read_only(self, srw3):
        with pytest.raises(ValueError):
            srw3.p[0] = 0.1


class TestChainFromDict:

    def test_round_trip_through_dict(self, srw3):
        chain = chain_from_dict(srw3.to_dict())
        np.testing.assert_array_equal(chain.r, srw3.r)

    def test_declared_size_must_match(self):
        with pytest.raises(InvalidParams):
            chain_from_dict({"m": 2, "p": [0.5], "q": [0.5], "r": [0.5, 0.5]})

    def test_missing_field(self):
        with pytest.raises(InvalidParams):
            chain_from_dict({"p": [0.5], "q": [0.5]})


class TestStationary:

    def test_lazy_pair_is_uniform(self, lazy_pair):
        np.testing.assert_allclose(stationary(lazy_pair).nu, [0.5, 0.5], atol=1e-15)

    def test_two_state_against_linear_solve(self):
        chain = build_chain([2 / 3], [1 / 3], [1 / 3, 2 / 3])
        K = transition_matrix(chain, dense=True)
        # nu (K - I) = 0 with sum(nu) = 1
        system = np.vstack([(K - np.eye(2)).T, np.ones(2)])
        oracle = np.linalg.lstsq(system, np.array([0.0, 0.0, 1.0]), rcond=None)[0]
        np.testing.assert_allclose(stationary(chain).nu, oracle, atol=1e-14)
        np.testing.assert_allclose(stationary(chain).nu, [1 / 3, 2 / 3], atol=1e-14)

    def test_bernoulli_laplace_hypergeometric(self):
        nu = stationary(bernoulli_laplace(4, 2)).nu
        np.testing.assert_allclose(nu, [1 / 6, 4 / 6, 1 / 6], atol=1e-14)

    def test_detailed_balance_and_invariance(self, rng):
        for m in (1, 5, 20, 50):
            chain = random_monotone_chain(rng, m)
            nu = stationary(chain).nu
            np.testing.assert_allclose(nu[:-1] * chain.p, nu[1:] * chain.q, rtol=1e-10)
            K = transition_matrix(chain, dense=True)
            np.testing.assert_allclose(nu @ K, nu, atol=1e-10)
            assert nu.sum() == pytest.approx(1.0, abs=1e-14)

    def test_log_weights_are_normalized(self, rng):
        law = stationary(random_monotone_chain(rng, 10))
        np.testing.assert_allclose(np.exp(law.log_nu), law.nu, rtol=1e-12)

    def test_cached_on_chain(self, srw3):
        assert stationary(srw3) is stationary(srw3)

    def test_extreme_drift_overflows(self):
        m = 2000
        p = np.full(m, 1e-3)
        q = np.full(m, 0.9)
        r = np.ones(m + 1)
        r[:-1] -= p
        r[1:] -= q
        with pytest.raises(StationaryOverflow):
            stationary(build_chain(p, q, r))


class TestMonotone:

    def test_simple_walk_is_monotone(self, srw3):
        assert is_monotone(srw3)

    def test_large_cross_sum(self):
        chain = build_chain([0.9, 0.05], [0.9, 0.05], [0.1, 0.05, 0.95])
        assert not is_monotone(chain)


class TestSymmetrize:

    def test_two_state_entries(self):
        matrix = symmetrize(build_chain([2 / 3], [1 / 3], [1 / 3, 2 / 3]))
        np.testing.assert_allclose(matrix.diagonal, [2 / 3, 1 / 3], atol=1e-15)
        np.testing.assert_allclose(matrix.offdiagonal, [-np.sqrt(2) / 3], atol=1e-15)

    def test_three_state_entries(self):
        matrix = symmetrize(build_chain([0.5, 0.3], [0.4, 0.5], [0.5, 0.3, 0.5]))
        np.testing.assert_allclose(matrix.diagonal, [0.5, 0.7, 0.5], atol=1e-15)
        np.testing.assert_allclose(matrix.offdiagonal, [-np.sqrt(0.5 * 0.4), -np.sqrt(0.3 * 0.5)], atol=1e-15)

    def test_spectrum_preserved(self, rng):
        for m in (3, 10, 30, 50):
            chain = random_monotone_chain(rng, m)
            symmetric = np.linalg.eigvalsh(symmetrize(chain).to_dense())
            np.testing.assert_allclose(symmetric[1:], dense_nonzero_eigenvalues(chain), atol=1e-10)
            assert abs(symmetric[0]) < 1e-12


class TestTransitionMatrix:

    def test_sparse_rows_sum_to_one(self, srw3):
        K = transition_matrix(srw3)
        assert issparse(K)
        np.testing.assert_allclose(np.asarray(K.sum(axis=1)).ravel(), 1.0)

    def test_dense_layout(self, srw3):
        K = transition_matrix(srw3, dense=True)
        assert K[0, 1] == 0.5 and K[1, 0] == 0.5 and K[0, 0] == 0.5 and K[1, 1] == 0.0


class TestGeneratorRates:

    def test_uniformized_chain_rates(self):
        chain, rate = from_generator_rates([2.0, 1.0], [1.0, 3.0])
        assert rate == 3.0
        np.testing.assert_allclose(chain.p, [2 / 3, 1 / 3])
        np.testing.assert_allclose(chain.q, [1 / 3, 1.0])
        np.testing.assert_allclose(chain.r, [1 / 3, 1 / 3, 0.0], atol=1e-15)

    def test_generator_law_matches_matrix_exponential(self):
        birth, death = [2.0, 1.0], [1.0, 3.0]
        chain, rate = from_generator_rates(birth, death)
        Q = np.array([[-2.0, 2.0, 0.0], [1.0, -2.0, 1.0], [0.0, 3.0, -3.0]])
        for t in (0.1, 0.7, 2.5):
            oracle = expm(t * Q)[0]
            np.testing.assert_allclose(evolve_continuous(chain, rate * t).probs, oracle, atol=1e-10)
            np.testing.assert_allclose(dense_continuous_law(chain, rate * t), oracle, atol=1e-10)

    def test_rate_below_exit_rate(self):
        with pytest.raises(InvalidParams):
            from_generator_rates([2.0], [1.0], rate=1.5)

    def test_negative_rate(self):
        with pytest.raises(OutOfRange):
            from_generator_rates([-1.0], [1.0])
