"""Maverick-branch norms of product quantum states.

Simulates the unitary counting circuit, computes exact and certified
maverick-projection norms under the frequency and entropy-rate criteria, and
checks them against Hoeffding, Markov and Chebyshev bounds.
"""
from .errors import *  # noqa: F401,F403
from .state import (
    ENUMERATION_LIMIT,
    LogWeightSummary,
    ProductState,
    SiteDistribution,
    entropy_rate,
    enumerate_strings,
    iid,
    log_probability,
    log_weight_summary,
    make_qubit,
    random_site,
    site_entropy,
    site_log_variance,
)
from .circuit import (
    CounterCircuit,
    StateVector,
    build_counter_circuit,
    closed_form_counter_amplitude,
    closed_form_counter_amplitudes,
    counter_amplitudes,
    gate_level_n3,
    read_dump,
    run_counter,
    write_dump,
)
from .tails import (
    Mode,
    NormBracket,
    TailQuery,
    World,
    binomial_maverick_norm,
    bruteforce_maverick_norm,
    bruteforce_partition,
    classify_world,
    dp_entropy_tail_bracket,
    poisson_binomial_maverick_norm,
    repeated_state_minimum,
)
from .bounds import (
    BoundCheckResult,
    DiagonalObservable,
    chebyshev_check,
    hoeffding_bound,
    markov_check,
    product_chebyshev_bound,
)
from .sweep import SweepConfig, load_config, parse_config, run_sweep

__version__ = "0.1.0"
