"""
Shared fixtures and dense oracles for the test suite.

The oracles here use full matrices (numpy/scipy.linalg) and exact rational
arithmetic; the services never fall back to them.
"""

from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import eigvals, expm

from services.chain_service import build_chain, transition_matrix

REPO_ROOT = Path(__file__).resolve().parent.parent
JSON_DIR = REPO_ROOT / "json"


def random_monotone_chain(rng: np.random.Generator, m: int, low: float = 0.25, high: float = 0.5):
    """Chain with p, q drawn from [low, high); high <= 0.5 keeps it monotone"""
    p = rng.uniform(low, high, m)
    q = rng.uniform(low, high, m)
    r = np.ones(m + 1)
    r[:-1] -= p
    r[1:] -= q
    return build_chain(p, q, r)


def dense_nonzero_eigenvalues(chain) -> np.ndarray:
    """Nonzero eigenvalues of I - K from a general dense eigensolver"""
    K = transition_matrix(chain, dense=True)
    values = np.sort(eigvals(np.eye(chain.size) - K).real)
    return values[1:]


def dense_continuous_law(chain, t: float, start: int = 0) -> np.ndarray:
    K = transition_matrix(chain, dense=True)
    return expm(t * (K - np.eye(chain.size)))[start]


def dense_discrete_law(chain, k: int, start: int = 0) -> np.ndarray:
    K = transition_matrix(chain, dense=True)
    return np.linalg.matrix_power(K, k)[start]


def exact_discrete_tail(lambdas, k: int) -> Fraction:
    """P(T > k) from the generating function prod l s / (1 - (1 - l) s), in rationals"""
    coefficients = [Fraction(1)]
    for lam in lambdas:
        lam = Fraction(lam)
        phase = [Fraction(0)] + [lam * (1 - lam) ** (d - 1) for d in range(1, k + 1)]
        product = [Fraction(0)] * (k + 1)
        for i, a in enumerate(coefficients):
            for j, b in enumerate(phase):
                if i + j <= k:
                    product[i + j] += a * b
        coefficients = product
    return 1 - sum(coefficients[:k + 1])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def srw3():
    """Simple walk on {0..3} with holding 1/2 at both ends"""
    return build_chain([0.5, 0.5, 0.5], [0.5, 0.5, 0.5], [0.5, 0.0, 0.0, 0.5])


@pytest.fixture
def lazy_pair():
    """Symmetric 2-state lazy walk"""
    return build_chain([0.5], [0.5], [0.5, 0.5])


@pytest.fixture
def json_dir():
    return JSON_DIR
