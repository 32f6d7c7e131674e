"""
Counting ones with a reversible circuit
=======================================

N copies of a qubit a|1> + b|0> feed a counter register. Each data qubit
adds one to the counter when it is set, so after N increments the counter
holds the Hamming weight of the branch.
"""

import math

import numpy as np

from maverick import (
    build_counter_circuit,
    closed_form_counter_amplitudes,
    counter_amplitudes,
    make_qubit,
    run_counter,
)

alpha, beta = math.sqrt(0.3), math.sqrt(0.7)
N = 10

circ = build_counter_circuit(N)
print(f"{N} data qubits, counter width {circ.m}, {len(circ.gates)} increments")

sv = run_counter(circ, make_qubit(alpha, beta))
sim = counter_amplitudes(sv)
closed = closed_form_counter_amplitudes(alpha, beta, N)

for n in range(N + 1):
    bar = "#" * int(60 * sim[n] ** 2)
    print(f"n={n:2d}  {sim[n]:.6f}  {closed[n]:.6f}  {bar}")

print("max |simulated - closed form| =", np.max(np.abs(sim[: N + 1] - closed)))

# The closed form keeps going long after the statevector would not fit in
# memory. The peak stays next to N * |alpha|^2.
for N in (100, 10**4, 10**6):
    a = closed_form_counter_amplitudes(alpha, beta, N)
    print(f"N={N:>7}: peak at n={int(np.argmax(a))}, N|alpha|^2={0.3 * N:.0f}")
