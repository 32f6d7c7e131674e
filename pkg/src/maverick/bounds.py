"""Concentration inequalities as checkable statements about projected norms.

All observables are diagonal in the computational basis, so a check reduces
to weighted sums over basis strings. ``markov_check`` and ``chebyshev_check``
return both sides of the inequality rather than a bare boolean; a failing
``holds`` indicates an implementation bug, not a physical effect.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .circuit import StateVector
from .errors import NegativeEigenvalue, NonpositiveThreshold, ShapeMismatch, TooLarge
from .state import ProductState, site_log_variance

HOLDS_SLACK = 1e-12
CHECK_LIMIT = 2**20

__all__ = [
    "DiagonalObservable",
    "BoundCheckResult",
    "SuiteReport",
    "hoeffding_bound",
    "markov_check",
    "chebyshev_check",
    "chebyshev_direct",
    "product_chebyshev_bound",
    "frequency_chebyshev_bound",
    "log_weight_observable",
    "run_markov_suite",
    "run_chebyshev_suite",
]


@dataclass(frozen=True, eq=False)
class DiagonalObservable:
    """Eigenvalue table of an operator diagonal in the computational basis."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("observable eigenvalues must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class BoundCheckResult:
    lhs: float
    rhs: float
    holds: bool
    slack: float
    mean: float = field(default=math.nan)
    variance: float = field(default=math.nan)

    @classmethod
    def of(cls, lhs, rhs, **extra):
        return cls(lhs, rhs, lhs <= rhs + HOLDS_SLACK, rhs - lhs, **extra)


State = Union[StateVector, ProductState, np.ndarray]


def _weights(psi: State) -> np.ndarray:
    if isinstance(psi, StateVector):
        w = psi.probabilities
    elif isinstance(psi, ProductState):
        if psi.total_dimension > CHECK_LIMIT:
            raise TooLarge(f"state space of size {psi.total_dimension} exceeds {CHECK_LIMIT}")
        w = psi.probabilities()
    else:
        a = np.asarray(psi)
        w = (a.real**2 + a.imag**2) if np.iscomplexobj(a) else a.astype(float) ** 2
    if w.size > CHECK_LIMIT:
        raise TooLarge(f"state space of size {w.size} exceeds {CHECK_LIMIT}")
    return w


def _aligned(psi: State, obs: DiagonalObservable) -> np.ndarray:
    w = _weights(psi)
    if w.size != obs.values.size:
        raise ShapeMismatch(f"{obs.values.size} eigenvalues for a space of size {w.size}")
    return w


def hoeffding_bound(N: int, epsilon: float) -> float:
    """``2 exp(-2 eps^2 N)``, unclamped."""
    return 2.0 * math.exp(-2.0 * epsilon * epsilon * N)


def _mean(w, y):
    # normalized so a constant observable has its own value as mean
    return math.fsum(w * y) / math.fsum(w)


def markov_check(psi: State, f: DiagonalObservable, a: float) -> BoundCheckResult:
    """``||P_{f>a} psi||^2 <= <psi|f|psi> / a`` for non-negative diagonal ``f``."""
    if not a > 0:
        raise NonpositiveThreshold(f"threshold must be positive, got {a!r}")
    return _markov(_aligned(psi, f), f.values, a)


def _markov(w, fv, a):
    if np.any(fv < 0):
        raise NegativeEigenvalue(f"minimum eigenvalue {fv.min()!r} is negative")
    lhs = math.fsum(w[fv > a])
    rhs = math.fsum(w * fv) / a
    return BoundCheckResult.of(lhs, rhs)


def chebyshev_check(psi: State, Y: DiagonalObservable, epsilon: float) -> BoundCheckResult:
    """``||P_{|Y-mu|>eps} psi||^2 <= Var(Y) / eps^2`` via a Markov reduction.

    The projector is realized as ``P_{f > eps^2}`` with ``f = (Y - mu)^2``.
    """
    if not epsilon > 0:
        raise NonpositiveThreshold(f"epsilon must be positive, got {epsilon!r}")
    w = _aligned(psi, Y)
    mu = _mean(w, Y.values)
    r = _markov(w, (Y.values - mu) ** 2, epsilon * epsilon)
    var = r.rhs * epsilon * epsilon
    return BoundCheckResult(r.lhs, r.rhs, r.holds, r.slack, mu, var)


def chebyshev_direct(psi: State, Y: DiagonalObservable, epsilon: float) -> BoundCheckResult:
    """Chebyshev's inequality evaluated without the Markov detour."""
    w = _aligned(psi, Y)
    y = Y.values
    mu = _mean(w, y)
    dev = y - mu
    lhs = math.fsum(w[np.abs(dev) > epsilon])
    var = math.fsum(w * dev * dev)
    return BoundCheckResult.of(lhs, var / (epsilon * epsilon), mean=mu, variance=var)


def log_weight_observable(state: ProductState) -> DiagonalObservable:
    """``Y = -(1/N) log2 |c_x|^2``; zero-weight strings carry the value 0."""
    L = state.log_probabilities()
    return DiagonalObservable(np.where(np.isfinite(L), L, 0.0) / state.N)


def product_chebyshev_bound(state: ProductState, epsilon: float) -> tuple:
    """``(sum Var_i / (N eps)^2, M / (N eps^2))`` with ``M = max_i Var_i``."""
    variances = [site_log_variance(s) for s in state.sites]
    N = state.N
    e2 = epsilon * epsilon
    return math.fsum(variances) / (N * N * e2), max(variances) / (N * e2)


def frequency_chebyshev_bound(state: ProductState, epsilon: float) -> tuple:
    """The same pair for ``Y = xbar``, whose site variances are ``p_i (1 - p_i)``."""
    variances = [float(s.probabilities[1] * (1 - s.probabilities[1])) for s in state.sites]
    N = state.N
    e2 = epsilon * epsilon
    return math.fsum(variances) / (N * N * e2), max(variances) / (N * e2)


# --------------------------------------------------------------------------
# randomized suites


@dataclass
class SuiteReport:
    name: str
    trials: int
    failures: int
    worst_slack: float

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return (f"{self.name}: {verdict} trials={self.trials} failures={self.failures} "
                f"worst_slack={self.worst_slack:.6g}")


def _random_state(rng, max_qubits):
    n = int(rng.integers(1, max_qubits + 1))
    z = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return StateVector(z / np.linalg.norm(z), n)


def run_markov_suite(seed: int, trials: int, max_qubits: int = 10) -> SuiteReport:
    """Random states, non-negative observables and thresholds near the mean."""
    failures, worst = 0, math.inf
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        psi = _random_state(rng, max_qubits)
        f = DiagonalObservable(rng.exponential(size=psi.amplitudes.size)
                               * (rng.random(psi.amplitudes.size) < rng.random()))
        a = float(rng.uniform(1e-3, 3.0))
        r = markov_check(psi, f, a)
        failures += not r.holds
        worst = min(worst, r.slack)
    return SuiteReport("markov", trials, failures, worst)


def run_chebyshev_suite(seed: int, trials: int, max_qubits: int = 10) -> SuiteReport:
    failures, worst = 0, math.inf
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        psi = _random_state(rng, max_qubits)
        Y = DiagonalObservable(rng.normal(size=psi.amplitudes.size) * rng.uniform(0.1, 3))
        eps = float(rng.uniform(0.05, 2.0))
        r = chebyshev_check(psi, Y, eps)
        failures += not r.holds
        worst = min(worst, r.slack)
    return SuiteReport("chebyshev", trials, failures, worst)
