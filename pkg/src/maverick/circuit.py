"""Unitary Hamming-weight counter.

``N`` data qubits feed a chain of controlled ``[+1]`` gates acting on an
``m``-qubit counter register that starts in ``|0...0>``. Each gate is applied
as a basis permutation: when its control bit is set, the counter value is
incremented modulo ``2**m``. Because ``m = ceil(log2(N + 1))`` the counter
never wraps for a counter initialized to zero.

Basis index layout: data qubit ``i`` (1-based) is bit ``i - 1``; the counter
value occupies the ``m`` most significant bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, TextIO

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatch, NotNormalized, OutOfRange, TooLarge
from .state import QUBIT_TOL, SiteDistribution

MAX_COUNTER_N = 25
MAX_AMPLITUDES = 2**28

__all__ = [
    "StateVector",
    "IncrementGate",
    "CounterCircuit",
    "build_counter_circuit",
    "counter_width",
    "initial_state",
    "run_counter",
    "counter_amplitudes",
    "closed_form_counter_amplitude",
    "closed_form_counter_amplitudes",
    "permute_indices",
    "gate_level_n3",
    "N3_GATES",
    "write_dump",
    "read_dump",
]


@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense amplitudes over ``n_data`` data qubits and ``n_counter`` counter qubits."""

    amplitudes: np.ndarray
    n_data: int
    n_counter: int = 0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size != 2 ** (self.n_data + self.n_counter):
            raise DimensionMismatch(
                f"{amps.size} amplitudes for {self.n_data}+{self.n_counter} qubits"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-9:
            raise NotNormalized(f"statevector norm^2 is {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_counter

    @property
    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real**2 + a.imag**2

    def norm(self) -> float:
        return math.sqrt(math.fsum(self.probabilities))


@dataclass(frozen=True)
class IncrementGate:
    """Controlled ``[+1]`` on the counter, conditioned on one data qubit."""

    control: int  # 0-based data qubit
    span: tuple  # bit positions of the counter, low to high


@dataclass(frozen=True)
class CounterCircuit:
    N: int
    m: int
    gates: tuple

    @property
    def n_qubits(self) -> int:
        return self.N + self.m

    def apply(self, sv: StateVector) -> StateVector:
        if sv.n_data != self.N or sv.n_counter != self.m:
            raise DimensionMismatch(
                f"circuit expects {self.N}+{self.m} qubits, got "
                f"{sv.n_data}+{sv.n_counter}"
            )
        out = np.empty_like(sv.amplitudes)
        out[permute_indices(self, np.arange(sv.amplitudes.size))] = sv.amplitudes
        return StateVector(out, self.N, self.m)


def counter_width(N: int) -> int:
    return max(1, math.ceil(math.log2(N + 1)))


def build_counter_circuit(N: int) -> CounterCircuit:
    N = int(N)
    if N < 1:
        raise OutOfRange(f"N must be positive, got {N}")
    if N > MAX_COUNTER_N:
        raise TooLarge(f"N={N} exceeds the enumeration bound {MAX_COUNTER_N}")
    m = counter_width(N)
    span = tuple(range(N, N + m))
    return CounterCircuit(N, m, tuple(IncrementGate(i, span) for i in range(N)))


def permute_indices(circuit: CounterCircuit, idx: np.ndarray) -> np.ndarray:
    """Image of computational basis indices under the whole circuit."""
    idx = np.asarray(idx, dtype=np.int64)
    low_mask = (1 << circuit.N) - 1
    size = 1 << circuit.m
    # Every gate shares the same span, so the increments compose into one add.
    counter = idx >> circuit.N
    fired = np.zeros_like(idx)
    for gate in circuit.gates:
        fired += (idx >> gate.control) & 1
    return (idx & low_mask) | (((counter + fired) % size) << circuit.N)


def initial_state(N: int, site: SiteDistribution, m: int) -> StateVector:
    """``site^{(x)N} (x) |0>_counter`` in the documented layout."""
    amps = np.ones(1, dtype=np.complex128)
    for _ in range(N):
        amps = np.kron(site.amplitudes, amps)
    full = np.zeros(2 ** (N + m), dtype=np.complex128)
    full[: amps.size] = amps
    return StateVector(full, N, m)


def _apply_increment(amps: np.ndarray, gate: IncrementGate, N: int, m: int) -> np.ndarray:
    idx = np.arange(amps.size, dtype=np.int64)
    size = 1 << m
    counter = idx >> N
    bumped = (idx & ((1 << N) - 1)) | (((counter + 1) % size) << N)
    target = np.where((idx >> gate.control) & 1, bumped, idx)
    out = np.empty_like(amps)
    out[target] = amps
    return out


def run_counter(circuit: CounterCircuit, site: SiteDistribution) -> StateVector:
    """Feed ``N`` copies of a qubit through the counter, one gate at a time."""
    if site.d != 2:
        raise DimensionMismatch(f"the counter needs qubit inputs, got d={site.d}")
    if 2**circuit.n_qubits > MAX_AMPLITUDES:
        raise TooLarge(f"{circuit.n_qubits} qubits exceed the simulation bound")
    sv = initial_state(circuit.N, site, circuit.m)
    amps = sv.amplitudes
    for gate in circuit.gates:
        amps = _apply_increment(amps, gate, circuit.N, circuit.m)
    return StateVector(amps, circuit.N, circuit.m)


def counter_amplitudes(sv: StateVector) -> np.ndarray:
    """``|<n|Psi>|`` for every counter value ``n`` (data qubits traced out)."""
    p = sv.probabilities.reshape(2**sv.n_counter, 2**sv.n_data)
    return np.sqrt(p.sum(axis=1))


def _log_abs2(z: complex) -> float:
    a2 = abs(complex(z)) ** 2
    return math.log(a2) if a2 > 0 else -math.inf


def closed_form_counter_amplitude(alpha: complex, beta: complex, N: int, n: int) -> float:
    """``sqrt(|alpha|^{2n} |beta|^{2(N-n)} C(N, n))`` evaluated in log space."""
    N, n = int(N), int(n)
    if not 0 <= n <= N:
        raise OutOfRange(f"n={n} outside 0..{N}")
    total = abs(complex(alpha)) ** 2 + abs(complex(beta)) ** 2
    if abs(total - 1.0) > QUBIT_TOL:
        raise NotNormalized(f"|alpha|^2 + |beta|^2 = {total!r}, expected 1")
    # Renormalize within the accepted tolerance.
    la = _log_abs2(alpha) - math.log(total)
    lb = _log_abs2(beta) - math.log(total)
    # 0 * log 0 = 0: an absent factor contributes nothing.
    log_w = math.lgamma(N + 1) - math.lgamma(n + 1) - math.lgamma(N - n + 1)
    if n:
        log_w += n * la
    if N - n:
        log_w += (N - n) * lb
    if log_w == -math.inf:
        return 0.0
    return math.exp(0.5 * log_w)


def closed_form_counter_amplitudes(alpha: complex, beta: complex, N: int) -> np.ndarray:
    """Vectorized :func:`closed_form_counter_amplitude` over ``n = 0..N``."""
    n = np.arange(N + 1)
    total = abs(complex(alpha)) ** 2 + abs(complex(beta)) ** 2
    la = _log_abs2(alpha) - math.log(total)
    lb = _log_abs2(beta) - math.log(total)
    with np.errstate(invalid="ignore"):
        log_w = gammaln(N + 1) - gammaln(n + 1) - gammaln(N - n + 1)
        log_w = log_w + np.where(n > 0, n * la, 0.0) + np.where(N - n > 0, (N - n) * lb, 0.0)
    return np.exp(0.5 * log_w)


# Elementary gate list of the N=3 counter: (controls, target) pairs over the
# bit positions 0..2 (data) and 3 (counter low), 4 (counter high). Each [+1]
# block is a Toffoli onto the high bit followed by a CNOT onto the low bit.
N3_GATES = (
    ((0, 3), 4),
    ((0,), 3),
    ((1, 3), 4),
    ((1,), 3),
    ((2, 3), 4),
    ((2,), 3),
)


def _mcx_permutation(idx: np.ndarray, controls: Iterable[int], target: int) -> np.ndarray:
    mask = 0
    for c in controls:
        mask |= 1 << c
    fire = (idx & mask) == mask
    return np.where(fire, idx ^ (1 << target), idx)


def gate_level_n3() -> Callable[[StateVector], StateVector]:
    """The N=3 counter as CNOT/Toffoli gates; returns a statevector map."""

    def transform(sv: StateVector) -> StateVector:
        if sv.n_data != 3 or sv.n_counter != 2:
            raise DimensionMismatch("the gate-level circuit acts on 3+2 qubits")
        amps = sv.amplitudes
        idx = np.arange(amps.size, dtype=np.int64)
        for controls, target in N3_GATES:
            out = np.empty_like(amps)
            out[_mcx_permutation(idx, controls, target)] = amps
            amps = out
        return StateVector(amps, 3, 2)

    return transform


def write_dump(sv: StateVector, fh: TextIO) -> None:
    """One ``index<TAB>re<TAB>im`` line per nonzero amplitude, index in hex."""
    amps = sv.amplitudes
    for i in np.flatnonzero(amps):
        z = amps[i]
        fh.write(f"{int(i):x}\t{z.real:.17g}\t{z.imag:.17g}\n")


def read_dump(fh: TextIO, n_data: int, n_counter: int) -> StateVector:
    amps = np.zeros(2 ** (n_data + n_counter), dtype=np.complex128)
    for line in fh:
        line = line.strip()
        if not line:
            continue
        idx, re, im = line.split("\t")
        amps[int(idx, 16)] = complex(float(re), float(im))
    return StateVector(amps, n_data, n_counter)
