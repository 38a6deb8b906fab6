"""State-overlap metrics: Uhlmann fidelity and teleportation mean fidelity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ControlSet, TimeGrid, interval_propagators, unvec, vec
from .errors import DimensionMismatchError
from .linalg import hermitian_sqrt
from .models import NoiseChannel, ProtocolSpec


def uhlmann_fidelity(rho: np.ndarray, chi: np.ndarray) -> float:
    """Fidelity ``(Tr sqrt(sqrt(chi) rho sqrt(chi)))^2`` of two density matrices.

    For a pure ``chi = |c><c|`` this reduces to the overlap ``<c|rho|c>``.
    """
    if rho.shape != chi.shape:
        raise DimensionMismatchError(f"shape mismatch {rho.shape} vs {chi.shape}")
    s = hermitian_sqrt(chi)
    inner = hermitian_sqrt(s @ rho @ s)
    f = float(np.trace(inner).real ** 2)
    return max(f, 0.0)


@dataclass(frozen=True)
class RandomQubitState:
    """Haar-random single-qubit amplitudes, unit-normalized."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"amplitudes not normalized: |a|^2+|b|^2 = {norm2}")


def sample_random_state(rng: np.random.Generator) -> RandomQubitState:
    """Draw a Haar-uniform qubit state.

    Four independent standard normals form Re/Im of the two amplitudes;
    normalization then yields the Haar measure on the Bloch sphere.
    Degenerate draws (norm < 1e-12) are redrawn.
    """
    while True:
        x = rng.standard_normal(4)
        norm = np.sqrt(np.sum(x * x))
        if norm >= 1e-12:
            break
    alpha = complex(x[0], x[1]) / norm
    beta = complex(x[2], x[3]) / norm
    return RandomQubitState(alpha, beta)


def swap_operator(q_a: int, q_b: int, n_qubits: int) -> np.ndarray:
    """Permutation matrix exchanging two qubit labels (1-based, from the left)."""
    if q_a == q_b:
        raise ValueError("swap requires two distinct qubits")
    for q in (q_a, q_b):
        if not 1 <= q <= n_qubits:
            raise IndexError(f"qubit index {q} outside 1..{n_qubits}")
    dim = 2 ** n_qubits
    # bit position counted from the most significant bit (qubit 1 = leftmost)
    pa, pb = n_qubits - q_a, n_qubits - q_b
    perm = np.empty(dim, dtype=int)
    for i in range(dim):
        ba = (i >> pa) & 1
        bb = (i >> pb) & 1
        j = i & ~(1 << pa) & ~(1 << pb)
        j |= bb << pa
        j |= ba << pb
        perm[i] = j
    op = np.zeros((dim, dim), dtype=complex)
    op[perm, np.arange(dim)] = 1.0
    return op


def _bell_pair() -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1.0 / np.sqrt(2.0)
    return v


def teleport_input_state(alpha: complex, beta: complex) -> np.ndarray:
    """Three-qubit input ``(alpha|0> + beta|1>) tensor Bell(2,3)``."""
    return np.kron(np.array([alpha, beta], dtype=complex), _bell_pair())


def single_state_teleport_fidelity(total_propagator: np.ndarray,
                                   alpha: complex, beta: complex) -> float:
    """Teleportation fidelity of one input state under a fixed evolution.

    The figure of merit is the overlap of the evolved state with the
    swapped input: ``<O psi| rho(T) |O psi>`` where O exchanges qubits
    1 and 3.
    """
    psi = teleport_input_state(alpha, beta)
    rho0 = np.outer(psi, psi.conj())
    rho_t = unvec(total_propagator @ vec(rho0))
    target = swap_operator(1, 3, 3) @ psi
    return float(np.real(target.conj() @ rho_t @ target))


def compose_total_propagator(spec: ProtocolSpec, controls: ControlSet,
                             grid: TimeGrid, channel: NoiseChannel) -> np.ndarray:
    """Product of all interval propagators, mapping vec(rho(0)) to vec(rho(T))."""
    props = interval_propagators(spec, controls, grid, channel)
    total = props[0]
    for p in props[1:]:
        total = p @ total
    return total


def mean_teleport_fidelity(spec: ProtocolSpec, controls: ControlSet,
                           grid: TimeGrid, channel: NoiseChannel,
                           n_samples: int, seed: int) -> float:
    """Monte-Carlo average teleportation fidelity over Haar-random inputs.

    The controls stay fixed for every sample (they are optimized once,
    for the canonical initial state); only the input qubit state varies.
    """
    if spec.n_qubits != 3:
        raise DimensionMismatchError("teleportation fidelity requires a 3-qubit protocol")
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    total = compose_total_propagator(spec, controls, grid, channel)
    rng = np.random.default_rng(seed)
    acc = 0.0
    for _ in range(n_samples):
        s = sample_random_state(rng)
        acc += single_state_teleport_fidelity(total, s.alpha, s.beta)
    return acc / n_samples
