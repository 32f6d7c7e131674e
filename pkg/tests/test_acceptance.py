"""Acceptance criteria, one test each. Every test records a PASS/FAIL line
that is printed in the terminal summary."""
import math
import time

import numpy as np

from maverick import (
    DiagonalObservable,
    ProductState,
    SiteDistribution,
    StateVector,
    TailQuery,
    binomial_maverick_norm,
    bruteforce_maverick_norm,
    build_counter_circuit,
    chebyshev_check,
    closed_form_counter_amplitude,
    counter_amplitudes,
    dp_entropy_tail_bracket,
    gate_level_n3,
    hoeffding_bound,
    iid,
    make_qubit,
    product_chebyshev_bound,
    random_site,
    repeated_state_minimum,
    run_counter,
)
from maverick.bounds import chebyshev_direct, run_chebyshev_suite, run_markov_suite
from maverick.circuit import permute_indices
from maverick.sweep import format_rows, parse_config, run_sweep
from maverick.tails import Mode

from conftest import random_product_state


def _random_qubit(rng):
    t = rng.uniform(0, math.pi / 2)
    return (math.sin(t) * np.exp(1j * rng.uniform(0, 2 * math.pi)),
            math.cos(t) * np.exp(1j * rng.uniform(0, 2 * math.pi)))


def test_1_counter_amplitudes(criterion):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        alpha, beta = _random_qubit(rng)
        site = make_qubit(alpha, beta)
        for N in range(1, 13):
            sim = counter_amplitudes(run_counter(build_counter_circuit(N), site))
            for n in range(N + 1):
                worst = max(worst, abs(sim[n] - closed_form_counter_amplitude(alpha, beta, N, n)))
    elapsed = time.perf_counter() - start
    criterion(1, "counter amplitudes match closed form", worst < 1e-9 and elapsed < 10,
              f"(max diff {worst:.2e}, {elapsed:.1f} s)")


def test_2_circuit_correctness(criterion):
    bad = 0
    for N in range(1, 13):
        c = build_counter_circuit(N)
        out = permute_indices(c, np.arange(2**N))
        weights = np.array([bin(x).count("1") for x in range(2**N)])
        bad += int(np.count_nonzero((out >> N) != weights))
        bad += int(np.count_nonzero((out & (2**N - 1)) != np.arange(2**N)))
    gate, perm = gate_level_n3(), build_counter_circuit(3)
    gate_bad = 0
    for i in range(32):
        e = np.zeros(32)
        e[i] = 1
        sv = StateVector(e, 3, 2)
        gate_bad += not np.array_equal(gate(sv).amplitudes, perm.apply(sv).amplitudes)
    criterion(2, "circuit Hamming weights and gate-level N=3", bad == 0 and gate_bad == 0,
              f"(weight mismatches {bad}, gate mismatches {gate_bad}/32)")


def test_3_hoeffding_dominance_and_decay(criterion):
    start = time.perf_counter()
    violations = []
    for p in np.round(np.arange(1, 10) / 10, 1):
        for eps in (0.01, 0.05, 0.1):
            for N in (10**k for k in range(1, 7)):
                v = binomial_maverick_norm(float(p), N, eps)
                if v > hoeffding_bound(N, eps):
                    violations.append((p, eps, N))
    decayed = binomial_maverick_norm(0.3, 10**4, 0.05)
    elapsed = time.perf_counter() - start
    ok = not violations and decayed < 1e-6 and elapsed < 60
    criterion(3, "Hoeffding dominance and decay", ok,
              f"(violations {len(violations)}, value at N=1e4 {decayed:.3e}, {elapsed:.1f} s)")


def test_4_bracket_encloses_oracle(criterion):
    rng = np.random.default_rng(4)
    misses = nonmonotone = 0
    for _ in range(200):
        state = random_product_state(rng, max_sites=16, dims=(2, 4), max_total=2**20)
        for eps in (0.05, 0.1, 0.3):
            exact = bruteforce_maverick_norm(state, TailQuery(Mode.ENTROPY_RATE, eps))
            widths = []
            for w in (1e-3, 1e-4, 1e-5):
                b = dp_entropy_tail_bracket(state, eps, w)
                misses += exact not in b
                widths.append(b.width)
            nonmonotone += not (widths[0] >= widths[1] >= widths[2])
    criterion(4, "DP bracket encloses enumeration, width monotone",
              misses == 0 and nonmonotone == 0,
              f"(misses {misses}, non-monotone {nonmonotone}, 200 states x 3 eps)")


def test_5_chebyshev_chain(criterion):
    rng = np.random.default_rng(5)
    failures = 0
    for _ in range(100):
        state = random_product_state(rng, max_sites=14, dims=(1, 4), max_total=2**18)
        for eps in (0.02, 0.1, 0.3):
            exact = bruteforce_maverick_norm(state, TailQuery(Mode.ENTROPY_RATE, eps))
            failures += exact > product_chebyshev_bound(state, eps)[0] + 1e-12
    site = SiteDistribution.from_probabilities([0.5, 0.3, 0.2])
    scaled = [product_chebyshev_bound(iid(site, N), 0.1)[1] * N for N in (10**2, 10**3, 10**4)]
    spread = (max(scaled) - min(scaled)) / min(scaled)
    criterion(5, "Chebyshev chain dominance and 1/N scaling",
              failures == 0 and spread < 1e-12,
              f"(dominance failures {failures}, relative variation {spread:.1e})")


def test_6_markov_and_chebyshev_suites(criterion):
    markov = run_markov_suite(6, 10**4, 10)
    cheb = run_chebyshev_suite(6, 10**4, 10)
    worst_twin = 0.0
    for t in range(10**4):
        rng = np.random.default_rng(60 + t)
        n = int(rng.integers(1, 11))
        z = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        psi = StateVector(z / np.linalg.norm(z), n)
        Y = DiagonalObservable(rng.normal(size=2**n) * rng.uniform(0.1, 3))
        eps = float(rng.uniform(0.05, 2.0))
        a, b = chebyshev_check(psi, Y, eps), chebyshev_direct(psi, Y, eps)
        worst_twin = max(worst_twin, abs(a.lhs - b.lhs), abs(a.rhs - b.rhs))
    ok = markov.ok and cheb.ok and worst_twin <= 1e-12
    criterion(6, "Markov and Chebyshev inequalities hold", ok,
              f"(markov failures {markov.failures}, chebyshev failures {cheb.failures}, "
              f"twin diff {worst_twin:.1e})")


def test_7_repeated_state_minimum(criterion):
    rng = np.random.default_rng(7)
    off = 0
    for _ in range(100):
        p1 = float(rng.uniform(0.01, 0.99))
        if abs(p1 - 0.5) < 1e-9:
            p1 = 0.25
        N = int(rng.integers(1, 31))
        counts, _ = repeated_state_minimum(SiteDistribution.from_probabilities([1 - p1, p1]), N)
        off += any(abs(n - N * q) > 1 for n, q in zip(counts, (1 - p1, p1)))
    nonzero = 0
    for N in range(1, 31):
        for j in range(N + 1):
            site = SiteDistribution.from_probabilities([1 - j / N, j / N])
            counts, gap = repeated_state_minimum(site, N)
            nonzero += gap != 0.0
    criterion(7, "repeated-state minimum near N|c_k|^2", off == 0 and nonzero == 0,
              f"(off by more than 1: {off}/100, nonzero integer-case minima {nonzero})")


def test_8_sweep_determinism(criterion, tmp_path):
    text = ("mode = entropy-rate\nstate = random\nseed = 8\ndim_min = 2\ndim_max = 3\n"
            "count = 5\nn_grid = 6, 12, 40\nepsilon_grid = 0.05, 0.2\nworkers = 3\n")
    first = format_rows(run_sweep(parse_config(text)))
    second = format_rows(run_sweep(parse_config(text)))
    freq = ("mode = frequency\nstate = random\nseed = 8\ncount = 3\n"
            "n_grid = 10, 1000\nepsilon_grid = 0.1\nworkers = 2\n")
    same_freq = format_rows(run_sweep(parse_config(freq))) == format_rows(run_sweep(parse_config(freq)))
    methods = {line.rsplit(",", 1)[1] for line in first.splitlines()[1:]}
    ok = first.encode() == second.encode() and same_freq and methods == {"exact", "bracket"}
    criterion(8, "sweep CSV byte-identical across runs", ok,
              f"({len(first.splitlines()) - 1} rows, methods {sorted(methods)})")
