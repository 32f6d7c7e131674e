"""Product-state algebra.

A product state ``|phi_1>|phi_2>...|phi_N>`` is stored site by site. Every
quantity downstream (branch weights, entropy rate, log-weight variances) is
derived from the per-site squared amplitudes, so nothing here ever builds the
``prod d_i`` dimensional vector unless explicitly asked to enumerate.

Conventions
-----------
* Logarithms are base 2 throughout; ``-log2 |c|^2`` is measured in bits.
* Outcomes with zero weight are outside the support: they contribute
  ``0 * log 0 = 0`` to entropies, ``+inf`` to :func:`log_probability`, and are
  skipped by :func:`log_weight_summary` and :func:`site_log_variance`.
* Enumeration order puts site 1 in the fastest-varying (least significant)
  position, matching the statevector layout of :mod:`maverick.circuit`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import NotNormalized, ShapeMismatch, TooLarge

NORM_TOL = 1e-12
QUBIT_TOL = 1e-10
ENUMERATION_LIMIT = 2**25

__all__ = [
    "SiteDistribution",
    "ProductState",
    "LogWeightSummary",
    "make_qubit",
    "iid",
    "random_site",
    "log_probability",
    "entropy_rate",
    "site_entropy",
    "log_weight_summary",
    "site_log_variance",
    "enumerate_strings",
    "ENUMERATION_LIMIT",
]


@dataclass(frozen=True, eq=False)
class SiteDistribution:
    """Outcome amplitudes ``c(k)`` of one subsystem, ``k = 0 .. d-1``."""

    amplitudes: np.ndarray
    weights: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size < 1:
            raise ShapeMismatch("a site needs at least one outcome")
        if not np.all(np.isfinite(amps)):
            raise NotNormalized("amplitudes must be finite")
        total = math.fsum(np.abs(amps) ** 2)
        if abs(total - 1.0) > NORM_TOL:
            raise NotNormalized(f"sum of |c(k)|^2 is {total!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        # Probabilities given directly are kept as given: sqrt(p)**2 is not p.
        w = amps.real**2 + amps.imag**2 if self.weights is None else np.array(self.weights, float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_probabilities(cls, probs: Sequence[float]) -> "SiteDistribution":
        """Site with real non-negative amplitudes ``sqrt(p_k)``.

        The probabilities are renormalized, so inputs only need to sum to one
        to within ``1e-10``.
        """
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise ShapeMismatch("probabilities must be a non-empty 1-d sequence")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise NotNormalized("probabilities must be finite and non-negative")
        total = math.fsum(p)
        if abs(total - 1.0) > QUBIT_TOL:
            raise NotNormalized(f"probabilities sum to {total!r}, expected 1")
        if total != 1.0:
            p = p / total
        return cls(np.sqrt(p), p)

    @property
    def d(self) -> int:
        return self.amplitudes.size

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights

    def key(self) -> bytes:
        """Hashable fingerprint of the outcome weights (phases ignored)."""
        return self.probabilities.tobytes()

    def __repr__(self):
        return f"SiteDistribution(probabilities={self.probabilities.tolist()})"


@dataclass(frozen=True, eq=False)
class ProductState:
    """Ordered sequence of independent sites."""

    sites: tuple

    def __post_init__(self):
        sites = tuple(self.sites)
        if len(sites) < 1:
            raise ShapeMismatch("a product state needs N >= 1 sites")
        for s in sites:
            if not isinstance(s, SiteDistribution):
                raise TypeError(f"expected SiteDistribution, got {type(s).__name__}")
        object.__setattr__(self, "sites", sites)

    @property
    def N(self) -> int:
        return len(self.sites)

    @property
    def dims(self) -> tuple:
        return tuple(s.d for s in self.sites)

    @property
    def total_dimension(self) -> int:
        return math.prod(self.dims)

    @property
    def is_qubit_state(self) -> bool:
        return all(d == 2 for d in self.dims)

    def probabilities(self) -> np.ndarray:
        """Weight ``|c_x|^2`` of every basis string, in enumeration order."""
        self._check_enumerable()
        out = np.ones(1)
        for site in reversed(self.sites):
            out = np.kron(out, site.probabilities)
        return out

    def log_probabilities(self) -> np.ndarray:
        """``-log2 |c_x|^2`` of every basis string (``inf`` off the support)."""
        self._check_enumerable()
        out = np.zeros(1)
        for site in reversed(self.sites):
            out = np.add.outer(out, _neglog2(site.probabilities)).ravel()
        return out

    def _check_enumerable(self, limit=ENUMERATION_LIMIT):
        if self.total_dimension > limit:
            raise TooLarge(
                f"state space of size {self.total_dimension} exceeds {limit}"
            )


@dataclass(frozen=True, eq=False)
class LogWeightSummary:
    """Per-site ``(value, weight)`` tables with ``value = -log2 weight``.

    ``values[i]`` and ``weights[i]`` are aligned 1-d arrays for site ``i``;
    zero-weight outcomes are omitted.
    """

    values: tuple
    weights: tuple

    @property
    def N(self) -> int:
        return len(self.values)

    def pairs(self, i: int) -> list:
        return list(zip(self.values[i].tolist(), self.weights[i].tolist()))


def _neglog2(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return -np.log2(p)


def make_qubit(alpha: complex, beta: complex) -> SiteDistribution:
    """Qubit ``alpha|1> + beta|0>``: ``c(1) = alpha``, ``c(0) = beta``."""
    alpha, beta = complex(alpha), complex(beta)
    total = abs(alpha) ** 2 + abs(beta) ** 2
    if not math.isfinite(total) or abs(total - 1.0) > QUBIT_TOL:
        raise NotNormalized(f"|alpha|^2 + |beta|^2 = {total!r}, expected 1")
    amps = np.array([beta, alpha])
    if total != 1.0:
        amps = amps / math.sqrt(total)
    return SiteDistribution(amps)


def iid(site: SiteDistribution, N: int) -> ProductState:
    """``N`` identical copies of ``site``."""
    return ProductState((site,) * int(N))


def random_site(rng: np.random.Generator, d: int) -> SiteDistribution:
    """Site whose amplitudes are normalized standard complex Gaussians."""
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return SiteDistribution(z / np.linalg.norm(z))


def log_probability(state: ProductState, s: Sequence[int]) -> float:
    """``-log2 |c_{x_1...x_N}|^2`` in bits, ``inf`` if the branch has no weight.

    Evaluated as a sum of per-site logs so that long strings never underflow.
    """
    s = tuple(int(x) for x in s)
    if len(s) != state.N:
        raise ShapeMismatch(f"string of length {len(s)} for a state with N={state.N}")
    terms = []
    for site, x in zip(state.sites, s):
        if not 0 <= x < site.d:
            raise ShapeMismatch(f"outcome {x} out of range for a site with d={site.d}")
        p = site.probabilities[x]
        if p == 0.0:
            return math.inf
        terms.append(-math.log2(p))
    return math.fsum(terms)


def site_entropy(site: SiteDistribution) -> float:
    p = site.probabilities
    p = p[p > 0]
    return math.fsum(-p * np.log2(p)) + 0.0


def _site_counts(state: ProductState) -> dict:
    counts = {}
    for site in state.sites:
        entry = counts.setdefault(id(site), [site, 0])
        entry[1] += 1
    return counts


def entropy_rate(state: ProductState) -> float:
    """Mean per-site Shannon entropy in bits, i.e. ``E[-log2 p] / N``."""
    terms = [n * site_entropy(site) for site, n in _site_counts(state).values()]
    return math.fsum(terms) / state.N


def log_weight_summary(state: ProductState) -> LogWeightSummary:
    tables = {}
    for site, _ in _site_counts(state).values():
        p = site.probabilities
        p = p[p > 0]
        tables[id(site)] = (-np.log2(p) + 0.0, p)
    rows = [tables[id(site)] for site in state.sites]
    return LogWeightSummary(tuple(r[0] for r in rows), tuple(r[1] for r in rows))


def site_log_variance(site: SiteDistribution) -> float:
    """Variance of ``-log2 |c(k)|^2`` under the site's own weights (bits^2)."""
    p = site.probabilities
    p = p[p > 0]
    v = -np.log2(p)
    mean = math.fsum(p * v)
    # Outcomes sharing one weight must give exactly zero.
    if np.all(p == p[0]):
        return 0.0
    return math.fsum(p * (v - mean) ** 2)


def enumerate_strings(
    state: ProductState, block_size: int = 2**18, limit: int = ENUMERATION_LIMIT
) -> Iterator[tuple]:
    """Walk every basis string of ``state`` in blocks.

    Yields ``(weights, neglog, ones)`` arrays per block: the branch weight
    formed as a product of site probabilities, ``-log2`` of the weight formed
    as a sum of site logs, and the number of outcomes equal to 1. Blocks come
    in enumeration order, so concatenating them reproduces
    :meth:`ProductState.probabilities`.
    """
    state._check_enumerable(limit)
    tables = []
    for site in state.sites:
        p = site.probabilities
        tables.append((p, _neglog2(p), (np.arange(site.d) == 1).astype(np.int64)))

    head = 0
    size = 1
    while head < state.N and size * state.sites[head].d <= max(block_size, 1):
        size *= state.sites[head].d
        head += 1
    if head == 0:
        head, size = 1, state.sites[0].d

    w = np.ones(1)
    lg = np.zeros(1)
    ones = np.zeros(1, dtype=np.int64)
    for p, nl, o in reversed(tables[:head]):
        w = np.multiply.outer(w, p).ravel()
        lg = np.add.outer(lg, nl).ravel()
        ones = np.add.outer(ones, o).ravel()

    tail = tables[head:]
    ranges = [range(len(t[0])) for t in reversed(tail)]
    for combo in itertools.product(*ranges):
        tw, tl, to = 1.0, 0.0, 0
        for (p, nl, o), x in zip(reversed(tail), combo):
            tw *= p[x]
            tl += nl[x]
            to += o[x]
        yield w * tw, lg + tl, ones + to
