"""Maverick-branch norms.

A branch (basis string) is *maverick* when its empirical statistics stray
from the Born expectation by more than ``epsilon``:

* frequency mode: ``|xbar - pbar| > epsilon`` where ``xbar`` is the fraction
  of outcomes equal to 1 and ``pbar`` the mean per-site ``|c_i(1)|^2``;
* entropy-rate mode: ``|-(1/N) log2 p(x) - H| > epsilon``.

Boundaries are strict for maverick and inclusive for typical, so the two sets
partition the supported strings. Zero-weight strings belong to neither.

Three routes compute the maverick norm^2: closed-form binomial tails for
identical qubits, brute-force enumeration (the defining oracle), and a binned
convolution over log-weights that returns a certified bracket and scales to
millions of sites.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import ModeUnsupported, NotAWorld, TooLarge
from .state import (
    ENUMERATION_LIMIT,
    ProductState,
    SiteDistribution,
    entropy_rate,
    enumerate_strings,
    log_probability,
    log_weight_summary,
)

__all__ = [
    "Mode",
    "World",
    "TailQuery",
    "NormBracket",
    "frequency_cutoffs",
    "binom_logpmf",
    "binomial_maverick_norm",
    "poisson_binomial_maverick_norm",
    "bruteforce_partition",
    "bruteforce_maverick_norm",
    "dp_entropy_tail_bracket",
    "world_statistics",
    "classify_world",
    "compositions",
    "repeated_state_minimum",
    "frequency_to_entropy_epsilon",
]

_EPS = np.finfo(float).eps
_TINY = 5e-324


class Mode(enum.Enum):
    FREQUENCY = "frequency"
    ENTROPY_RATE = "entropy-rate"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-")
        aliases = {"frequency": cls.FREQUENCY, "entropy-rate": cls.ENTROPY_RATE,
                   "entropy": cls.ENTROPY_RATE, "entropyrate": cls.ENTROPY_RATE}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown mode {text!r}") from None


class World(enum.Enum):
    TYPICAL = "typical"
    MAVERICK = "maverick"


@dataclass(frozen=True)
class TailQuery:
    mode: Mode
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon!r}")


@dataclass(frozen=True)
class NormBracket:
    """Enclosure ``lo <= exact maverick norm^2 <= hi``."""

    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"invalid bracket [{self.lo!r}, {self.hi!r}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


# --------------------------------------------------------------------------
# frequency mode


def frequency_cutoffs(N: int, p: float, epsilon: float) -> tuple:
    """Integer cutoffs ``(n_low, n_high)`` of the frequency criterion.

    A count ``n`` of ones is maverick iff ``n < n_low`` or ``n > n_high``.
    The comparison ``|n/N - p| > epsilon`` is decided in exact rational
    arithmetic on the given floats, so no count is misfiled by rounding.
    """
    N = int(N)
    p, eps = Fraction(p), Fraction(epsilon)
    low = N * (p - eps)
    high = N * (p + eps)
    return math.ceil(low), math.floor(high)


def _stirlerr(n):
    """``log(n!) - log(sqrt(2 pi n) (n/e)^n)`` for integer arrays ``n >= 1``."""
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    small = n <= 15
    ns = n[small]
    out[small] = gammaln(ns + 1) - (ns + 0.5) * np.log(ns) + ns - 0.5 * math.log(2 * math.pi)
    nl = n[~small]
    nn = nl * nl
    s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
    out[~small] = (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / nl
    return out


def _bd0(x, M):
    """Deviance term ``x log(x/M) + M - x``, accurate when ``x`` is near ``M``."""
    x = np.asarray(x, dtype=float)
    M = np.broadcast_to(np.asarray(M, dtype=float), x.shape)
    d = x - M
    s = x + M
    out = np.empty_like(x)
    close = np.abs(d) < 0.1 * s
    far = ~close
    with np.errstate(divide="ignore", invalid="ignore"):
        out[far] = xlogy(x[far], x[far] / M[far]) + M[far] - x[far]
    v = d[close] / s[close]
    acc = d[close] * v
    ej = 2 * x[close] * v
    v2 = v * v
    for j in range(1, 40):
        ej = ej * v2
        acc = acc + ej / (2 * j + 1)
    out[close] = acc
    return out


def binom_logpmf(n, N: int, p: float) -> np.ndarray:
    """Natural log of the binomial pmf via the saddle-point decomposition.

    Avoids the cancellation between ``lgamma`` terms that costs about
    ``log10(N log N)`` digits at large ``N``.
    """
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    q = 1.0 - p
    out = np.full(n.shape, -np.inf)
    if p == 0.0 or q == 0.0:
        out[n == (N if p == 1.0 else 0)] = 0.0
        return out
    edge0 = n == 0
    edgeN = n == N
    out[edge0] = N * math.log1p(-p)
    out[edgeN] = N * math.log(p)
    mid = (n > 0) & (n < N)
    k = n[mid].astype(float)
    lc = _stirlerr(np.array([N]))[0] - _stirlerr(k) - _stirlerr(N - k)
    lc -= _bd0(k, N * p) + _bd0(N - k, N * q)
    out[mid] = lc + 0.5 * np.log(N / (2 * math.pi * k * (N - k)))
    return out


def _bernoulli_counts_pmf(N: int, p: float) -> np.ndarray:
    return np.exp(binom_logpmf(np.arange(N + 1), N, p))


def binomial_maverick_norm(p: float, N: int, epsilon: float) -> float:
    """Norm^2 of the maverick branches of ``N`` identical qubits.

    Exact tail ``sum_{|n/N - p| > eps} C(N, n) p^n (1-p)^(N-n)``, terms taken
    in log space and summed with correct rounding.
    """
    N = int(N)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    n_low, n_high = frequency_cutoffs(N, p, epsilon)
    n = np.concatenate([np.arange(0, min(n_low, N + 1)),
                        np.arange(max(n_high + 1, 0), N + 1)])
    if n.size == 0:
        return 0.0
    return min(1.0, math.fsum(np.exp(binom_logpmf(n, N, p))))


def poisson_binomial_maverick_norm(state: ProductState, epsilon: float) -> float:
    """Frequency-mode maverick norm^2 of independent, non-identical qubits.

    Sites sharing one weight table are pooled into a binomial; the pools are
    convolved exactly over the count axis.
    """
    if not state.is_qubit_state:
        raise ModeUnsupported("frequency mode needs every site to be a qubit")
    pools = {}
    for site in state.sites:
        p1 = float(site.probabilities[1])
        pools[p1] = pools.get(p1, 0) + 1
    pmf = np.ones(1)
    for p1, count in pools.items():
        pmf = np.convolve(pmf, _bernoulli_counts_pmf(count, p1))
    pbar = math.fsum(float(s.probabilities[1]) for s in state.sites) / state.N
    n_low, n_high = frequency_cutoffs(state.N, pbar, epsilon)
    tail = np.concatenate([pmf[: max(min(n_low, state.N + 1), 0)],
                           pmf[max(n_high + 1, 0):]])
    return min(1.0, math.fsum(np.clip(tail, 0.0, None)))


# --------------------------------------------------------------------------
# enumeration oracle


def bruteforce_partition(state: ProductState, query: TailQuery,
                         limit: int = ENUMERATION_LIMIT) -> tuple:
    """``(maverick norm^2, typical norm^2)`` by walking every basis string."""
    if state.total_dimension > limit:
        raise TooLarge(f"state space of size {state.total_dimension} exceeds {limit}")
    N = state.N
    if query.mode is Mode.FREQUENCY:
        if not state.is_qubit_state:
            raise ModeUnsupported("frequency mode needs every site to be a qubit")
        pbar = math.fsum(float(s.probabilities[1]) for s in state.sites) / N
        n_low, n_high = frequency_cutoffs(N, pbar, query.epsilon)
    else:
        H = entropy_rate(state)
    mav, typ = [], []
    for w, neglog, ones in enumerate_strings(state, limit=limit):
        if query.mode is Mode.FREQUENCY:
            bad = (ones < n_low) | (ones > n_high)
        else:
            with np.errstate(invalid="ignore"):
                bad = np.abs(neglog / N - H) > query.epsilon
        live = w > 0
        mav.append(math.fsum(w[bad & live]))
        typ.append(math.fsum(w[~bad & live]))
    # Site normalization is exact only to rounding; a projected norm^2 of a
    # unit vector never exceeds 1.
    return min(1.0, math.fsum(mav)), min(1.0, math.fsum(typ))


def bruteforce_maverick_norm(state: ProductState, query: TailQuery,
                             limit: int = ENUMERATION_LIMIT) -> float:
    return bruteforce_partition(state, query, limit)[0]


# --------------------------------------------------------------------------
# binned convolution


def compositions(n: int, d: int) -> np.ndarray:
    """All count vectors of length ``d`` summing to ``n``, lexicographic order."""
    if d == 1:
        return np.array([[n]], dtype=np.int64)
    if d == 2:
        k = np.arange(n + 1, dtype=np.int64)
        return np.column_stack([k, n - k])
    blocks = []
    for first in range(n + 1):
        rest = compositions(n - first, d - 1)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


def _n_compositions(n: int, d: int) -> int:
    return math.comb(n + d - 1, d - 1)


PRODUCT_CAP = 2**22


def _merge(L, U, mass):
    """Sum masses sharing one ``(L, U)`` key; also the largest group size."""
    if L.size <= 1:
        return L, U, mass, 1
    lo = L.min()
    W = U - L
    span, wspan = int(L.max() - lo) + 1, int(W.max()) + 1
    if span * wspan <= 2 * L.size + 2**16:
        key = (L - lo) * wspan + W
        counts = np.bincount(key)
        sums = np.bincount(key, weights=mass)
        idx = np.flatnonzero(counts)
        Lk = idx // wspan + lo
        return Lk, Lk + idx % wspan, sums[idx], int(counts.max())
    order = np.lexsort((U, L))
    L, U, mass = L[order], U[order], mass[order]
    start = np.empty(L.size, dtype=bool)
    start[0] = True
    start[1:] = (L[1:] != L[:-1]) | (U[1:] != U[:-1])
    idx = np.flatnonzero(start)
    groups = int(np.diff(np.append(idx, L.size)).max())
    return L[idx], U[idx], np.add.reduceat(mass, idx), groups


@dataclass
class _Dist:
    """Law of a block of sites on the bin grid.

    Entry ``i`` carries mass ``m[i]`` (relative error at most ``r``) of
    strings whose summed bin offset lies in ``[L[i], U[i]]``. ``g`` is the
    coarsening level reached so far.
    """

    L: np.ndarray
    U: np.ndarray
    m: np.ndarray
    r: float = 0.0
    g: int = 1

    @property
    def size(self):
        return self.m.size

    def coarsened(self, g):
        # Widening every interval to the coarser grid keeps the enclosure.
        L, U, m, k = _merge((self.L // g) * g, -((-self.U) // g) * g, self.m)
        return _Dist(L, U, m, self.r + _EPS * k, g)

    def keep(self, mask):
        return _Dist(self.L[mask], self.U[mask], self.m[mask], self.r, self.g)


def _convolve(x: _Dist, y: _Dist, cap: int = PRODUCT_CAP) -> _Dist:
    # Coarsen the finer operand first so both end on comparable grids.
    while x.size * y.size > cap:
        if y.size > 1 and (x.size == 1 or (y.g, -y.size) < (x.g, -x.size)):
            y = y.coarsened(2 * y.g)
        else:
            x = x.coarsened(2 * x.g)
    L = (x.L[:, None] + y.L[None, :]).ravel()
    U = (x.U[:, None] + y.U[None, :]).ravel()
    m = (x.m[:, None] * y.m[None, :]).ravel()
    L, U, m, k = _merge(L, U, m)
    return _Dist(L, U, m, x.r + y.r + x.r * y.r + _EPS * (k + 1), max(x.g, y.g))


def _round_down(x: float, bits: int = 30) -> float:
    if x <= 0.0:
        return 0.0
    m, e = math.frexp(x)
    return math.ldexp(math.floor(math.ldexp(m, bits)), e - bits)


def _round_up(x: float, bits: int = 30) -> float:
    if x <= 0.0:
        return 0.0
    m, e = math.frexp(x)
    return math.ldexp(math.ceil(math.ldexp(m, bits)), e - bits)


def dp_entropy_tail_bracket(state: ProductState, epsilon: float, bin_width: float,
                            composition_limit: int = 2**20,
                            drop_below: float = 1e-290,
                            product_cap: int = PRODUCT_CAP) -> NormBracket:
    """Certified bracket on the entropy-rate maverick norm^2.

    Each site's log-values are shifted by the site minimum. For a block of
    identical sites the summed offset of every outcome-count vector is exact;
    it is placed in the interval ``[floor, ceil]`` of bin indices on a grid
    of spacing ``bin_width``, and intervals add under convolution. Intervals
    on a refined grid nest inside the coarse ones, so the bracket never
    widens as ``bin_width`` shrinks as long as no coarsening happens.

    Identical sites are pooled and their joint law taken from the multinomial
    over outcome counts; pools too large to enumerate are built by repeated
    squaring. Whenever a convolution would exceed ``product_cap`` entries the
    larger operand is moved to a grid twice as coarse, which only widens the
    intervals. Entries of mass below ``drop_below`` are discarded and charged
    to the upper end if they could still be maverick. Mass whose fate is
    already sealed, given the range the remaining sites can add, is settled
    early.
    """
    if not bin_width > 0:
        raise ValueError(f"bin_width must be positive, got {bin_width!r}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    w = float(bin_width)
    N = state.N
    H = entropy_rate(state)
    summary = log_weight_summary(state)

    pools = {}
    for site, v, p in zip(state.sites, summary.values, summary.weights):
        key = site.key()
        if key in pools:
            pools[key][2] += 1
        else:
            pools[key] = [v, p, 1]

    prepared = []
    base_terms = []
    vmax_total = 0.0
    for v, p, count in pools.values():
        vmin = float(v.min())
        off = v - vmin
        base_terms.append(count * vmin)
        vmax_total += count * float(v.max())
        if off.max() > 0:
            prepared.append((off, p, count))
    base = math.fsum(base_terms)

    slack = 4 * _EPS * (N + 2) * (vmax_total + N * abs(H) + N * epsilon + 1.0)
    b_lo = N * (H - epsilon)
    b_hi = N * (H + epsilon)

    unresolved = []  # mass dropped while it could still be maverick
    settled = []  # mass certainly maverick

    def classify(lo_bins, hi_bins):
        """(possibly maverick, certainly maverick, certainly typical)."""
        lo_end = base + lo_bins * w - slack
        hi_end = base + hi_bins * w + slack
        possible = (lo_end < b_lo) | (hi_end > b_hi)
        certain = (hi_end < b_lo) | (lo_end > b_hi)
        return possible, certain, ~possible

    # Bin range still addable by sites not yet absorbed.
    rest_lo = 0
    rest_hi = sum(count * math.ceil(off.max() / w) for off, _, count in prepared)

    def drop_tiny(d: _Dist, lo_reach, hi_reach) -> _Dist:
        tiny = d.m < drop_below
        if not tiny.any():
            return d
        possible, _, _ = classify(d.L[tiny] + lo_reach, d.U[tiny] + hi_reach)
        unresolved.append(math.fsum(np.maximum(d.m[tiny][possible], _TINY)))
        return d.keep(~tiny)

    def multinomial(off, p, size) -> _Dist:
        # The summed offset of a count vector is known exactly, so a whole
        # block of identical sites costs one bin of uncertainty.
        logp = np.log(p)
        comp = compositions(size, off.size)
        logm = gammaln(size + 1) - gammaln(comp + 1).sum(axis=1) + comp @ logp
        V = (comp @ off) / w
        L, U, m, k = _merge(np.floor(V).astype(np.int64), np.ceil(V).astype(np.int64),
                            np.exp(logm))
        err = 16 * _EPS * (gammaln(size + 1) + size * float(np.abs(logp).max()) + off.size)
        return _Dist(L, U, m, err + _EPS * k)

    cur = _Dist(np.zeros(1, np.int64), np.zeros(1, np.int64), np.ones(1))

    def absorb(piece: _Dist, lo_bins, hi_bins):
        nonlocal cur, rest_lo, rest_hi
        rest_lo -= lo_bins
        rest_hi -= hi_bins
        if cur.size == 0:
            return
        piece = drop_tiny(piece, int(cur.L.min()) + rest_lo, int(cur.U.max()) + rest_hi)
        cur = _convolve(cur, piece, product_cap)
        possible, certain, typical = classify(cur.L + rest_lo, cur.U + rest_hi)
        settled.append(math.fsum(cur.m[certain]))
        tiny = cur.m < drop_below
        unresolved.append(math.fsum(np.maximum(cur.m[tiny & possible & ~certain], _TINY)))
        cur = cur.keep(~(certain | typical | tiny))

    total_lo, total_hi = rest_lo, rest_hi
    for off, p, count in prepared:
        if cur.size == 0:
            break
        chunk = count
        while chunk > 1 and _n_compositions(chunk, off.size) > composition_limit:
            chunk //= 2
        reps, rem = divmod(count, chunk)
        lo1, hi1 = 0, math.ceil(off.max() / w)
        if rem:
            absorb(multinomial(off, p, rem), rem * lo1, rem * hi1)
        piece, size = multinomial(off, p, chunk), chunk
        while reps:
            if reps & 1:
                absorb(piece, size * lo1, size * hi1)
            reps >>= 1
            if reps:
                piece = _convolve(piece, piece, product_cap)
                size *= 2
                piece = drop_tiny(piece, total_lo - size * lo1, total_hi - size * hi1)

    rel = 2 * cur.r + 4 * _EPS
    possible, certain, _ = classify(cur.L, cur.U)
    c_mass = math.fsum(settled + [math.fsum(cur.m[certain])])
    p_mass = math.fsum(settled + [math.fsum(cur.m[possible])])

    lo = _round_down(c_mass * (1.0 - rel))
    u_mass = math.fsum(unresolved)
    hi = _round_up((p_mass + u_mass) * (1.0 + rel)) if (p_mass or u_mass) else 0.0
    return NormBracket(min(lo, 1.0), min(hi, 1.0))


# --------------------------------------------------------------------------
# single worlds


def world_statistics(state: ProductState, s) -> tuple:
    """``(rate, H, deviation)`` of one supported basis string."""
    L = log_probability(state, s)
    if math.isinf(L):
        raise NotAWorld("string has zero amplitude: not a world")
    rate = L / state.N
    H = entropy_rate(state)
    return rate, H, abs(rate - H)


def classify_world(state: ProductState, s, epsilon: float) -> World:
    _, _, dev = world_statistics(state, s)
    return World.TYPICAL if dev <= epsilon else World.MAVERICK


def repeated_state_minimum(c: SiteDistribution, N: int, limit: int = 10**6) -> tuple:
    """Outcome counts minimizing the typicality gap for ``N`` copies of ``c``.

    The gap is ``|sum_k n_k log2 p_k - N sum_k p_k log2 p_k|``; it is
    evaluated as ``|sum_k (n_k - N p_k) (log2 p_k - min_j log2 p_j)|`` with
    count offsets at the rounding level snapped to zero, so integer ``N p_k``
    and uniform sites give an exact 0.
    Returns ``(counts, minimum)``; ties go to the lexicographically smallest
    count vector.
    """
    N, d = int(N), c.d
    if _n_compositions(N, d) > limit:
        raise TooLarge(f"{_n_compositions(N, d)} count vectors exceed {limit}")
    p = c.probabilities
    comp = compositions(N, d)
    support = p > 0
    offsets = comp[:, support] - N * p[support]
    offsets[np.abs(offsets) <= 8 * _EPS * max(N, 1)] = 0.0
    # Offsets sum to zero, so shifting the log-weights changes nothing in exact
    # arithmetic; it makes constant log-weights give an exact 0.
    logs = np.log2(p[support])
    gap = np.abs((offsets * (logs - logs.min())).sum(axis=1))
    # Counts on zero-weight outcomes make the branch vanish.
    gap[(comp[:, ~support] > 0).any(axis=1)] = np.inf
    best = int(np.argmin(gap))
    return tuple(int(x) for x in comp[best]), float(gap[best])


def frequency_to_entropy_epsilon(epsilon: float, p: float) -> float:
    """Entropy-rate deviation implied by a frequency deviation for i.i.d. qubits.

    For identical qubits the rate is affine in ``xbar`` with slope
    ``log2((1-p)/p)``, so ``|xbar - p| > eps`` forces
    ``|rate - H| > eps * |log2((1-p)/p)|``.
    """
    return epsilon * abs(math.log2((1 - p) / p))
