import math

import numpy as np
import pytest

from maverick import (
    DiagonalObservable,
    NegativeEigenvalue,
    NonpositiveThreshold,
    ProductState,
    ShapeMismatch,
    SiteDistribution,
    StateVector,
    TailQuery,
    bruteforce_maverick_norm,
    chebyshev_check,
    entropy_rate,
    hoeffding_bound,
    iid,
    make_qubit,
    markov_check,
    product_chebyshev_bound,
    random_site,
)
from maverick.bounds import (
    chebyshev_direct,
    frequency_chebyshev_bound,
    log_weight_observable,
    run_chebyshev_suite,
    run_markov_suite,
)
from maverick.tails import Mode

from conftest import qubit, random_product_state

HALF = StateVector(np.full(2, 2**-0.5), 1)
VAR_025 = 0.4710198991297989392


def test_hoeffding_values():
    assert hoeffding_bound(100, 0.1) == pytest.approx(0.27067056647322538379, rel=1e-15)
    assert hoeffding_bound(10**4, 0.1) == pytest.approx(2.767793053473475061e-87, rel=1e-13)
    assert hoeffding_bound(1, 1e-9) == pytest.approx(2.0)


def test_markov_examples():
    r = markov_check(HALF, DiagonalObservable([1.0, 1.0]), 1.0)
    assert (r.lhs, r.rhs, r.holds) == (0.0, pytest.approx(1.0), True)
    r = markov_check(HALF, DiagonalObservable([0.0, 4.0]), 1.0)
    assert r.lhs == pytest.approx(0.5) and r.rhs == pytest.approx(2.0) and r.holds
    assert r.slack == pytest.approx(1.5)


def test_markov_errors():
    with pytest.raises(NegativeEigenvalue):
        markov_check(HALF, DiagonalObservable([1.0, -1e-300]), 1.0)
    with pytest.raises(NonpositiveThreshold):
        markov_check(HALF, DiagonalObservable([1.0, 1.0]), 0.0)
    with pytest.raises(ShapeMismatch):
        markov_check(HALF, DiagonalObservable([1.0, 1.0, 1.0]), 1.0)
    with pytest.raises(ValueError):
        DiagonalObservable([1.0, np.inf])


def test_chebyshev_examples():
    r = chebyshev_check(HALF, DiagonalObservable([3.0, 3.0]), 0.1)
    assert r.lhs == 0.0 and r.variance == 0.0
    r = chebyshev_check(HALF, DiagonalObservable([0.0, 2.0]), 0.5)
    assert r.mean == pytest.approx(1.0) and r.variance == pytest.approx(1.0)
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(4.0) and r.holds


@pytest.mark.parametrize("seed", range(25))
def test_chebyshev_is_the_markov_reduction(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 11))
    z = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    psi = StateVector(z / np.linalg.norm(z), n)
    Y = DiagonalObservable(rng.normal(size=2**n))
    eps = float(rng.uniform(0.05, 1.5))
    a, b = chebyshev_check(psi, Y, eps), chebyshev_direct(psi, Y, eps)
    assert abs(a.lhs - b.lhs) <= 1e-12 and abs(a.rhs - b.rhs) <= 1e-12
    assert a.holds and b.holds


def test_product_state_and_raw_amplitudes_accepted():
    state = iid(qubit(0.25), 3)
    f = DiagonalObservable(np.arange(8.0))
    a = markov_check(state, f, 2.0)
    b = markov_check(np.sqrt(state.probabilities()), f, 2.0)
    assert a.lhs == b.lhs and a.rhs == pytest.approx(b.rhs, rel=1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_log_weight_mean_is_entropy_rate(seed):
    state = random_product_state(np.random.default_rng(seed), max_sites=12, max_total=2**16)
    r = chebyshev_check(state, log_weight_observable(state), 0.1)
    assert r.mean == pytest.approx(entropy_rate(state), abs=1e-10)


def test_product_chebyshev_examples():
    assert product_chebyshev_bound(iid(make_qubit(2**-0.5, 2**-0.5), 50), 0.1) == (0.0, 0.0)
    s, u = product_chebyshev_bound(iid(qubit(0.25), 100), 0.1)
    assert s == pytest.approx(VAR_025, rel=1e-13)
    assert u == pytest.approx(VAR_025, rel=1e-13)


@pytest.mark.parametrize("seed", range(15))
def test_product_chebyshev_dominates_exact(seed):
    rng = np.random.default_rng(100 + seed)
    state = random_product_state(rng, max_sites=14, max_total=2**18)
    for eps in (0.05, 0.2, 0.5):
        exact = bruteforce_maverick_norm(state, TailQuery(Mode.ENTROPY_RATE, eps))
        s, u = product_chebyshev_bound(state, eps)
        assert s <= u * (1 + 1e-15)
        assert exact <= s + 1e-12


def test_product_chebyshev_matches_log_weight_variance():
    rng = np.random.default_rng(7)
    state = ProductState(tuple(random_site(rng, d) for d in (2, 3, 4, 2, 3)))
    eps = 0.2
    r = chebyshev_direct(state, log_weight_observable(state), eps)
    assert r.rhs == pytest.approx(product_chebyshev_bound(state, eps)[0], rel=1e-10)


def test_frequency_chebyshev_bound():
    s, u = frequency_chebyshev_bound(iid(qubit(0.3), 100), 0.05)
    assert s == pytest.approx(0.21 / (100 * 0.0025)) and u == pytest.approx(s)


def test_suites_are_deterministic_and_hold():
    a, b = run_markov_suite(5, 50, 6), run_markov_suite(5, 50, 6)
    assert a == b and a.ok
    c = run_chebyshev_suite(5, 50, 6)
    assert c.ok and c.worst_slack >= -1e-12
    assert a.line().startswith("markov: PASS trials=50 failures=0 worst_slack=")
