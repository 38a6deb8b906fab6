"""Protocol Hamiltonians, initial/target states, and Lindblad noise channels.

Conventions fixed here and relied on everywhere else:

* qubit basis ordered ``|0>``, ``|1>`` with ``sigma_z|0> = +|0>``;
* multi-qubit basis lexicographic (``|00...0>`` first), qubits numbered
  from 1 = leftmost tensor factor;
* natural units ``hbar = omega_0 = 1``: Hamiltonians are dimensionless,
  decay rates and time carry units of ``omega_0`` and ``1/omega_0``.

The lowering operator follows the ``sigma_minus = |1><0|`` convention, so
``|1>`` is the state amplitude damping decays into.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BadLabelError, DimensionMismatchError, NegativeRateError

PAULI_DIRECTIONS = ("x", "y", "z", "minus")

_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    # |1><0|: (sigma_x - i sigma_y)/2 in the fixed basis
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
}


def pauli(direction: str) -> np.ndarray:
    """Single-qubit Pauli matrix (or the lowering operator ``minus``)."""
    try:
        return _SIGMA[direction].copy()
    except KeyError:
        raise ValueError(f"unknown direction {direction!r}; expected one of {PAULI_DIRECTIONS}")


def embed(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Embed a 2x2 operator on the given qubit (1-based) of an n-qubit register."""
    op = linalg.as_complex(op)
    if op.shape != (2, 2):
        raise DimensionMismatchError(f"expected a 2x2 operator, got {op.shape}")
    if not 1 <= qubit <= n_qubits:
        raise IndexError(f"qubit index {qubit} outside 1..{n_qubits}")
    factors = [np.eye(2, dtype=complex)] * n_qubits
    factors[qubit - 1] = op
    return linalg.kron_all(*factors)


def basis_ket(label: str) -> np.ndarray:
    """Computational basis vector for a bit-string label like ``"011"``."""
    if not label or any(c not in "01" for c in label):
        raise BadLabelError(f"label {label!r} is not a non-empty bit string")
    dim = 2 ** len(label)
    ket = np.zeros(dim, dtype=complex)
    ket[int(label, 2)] = 1.0
    return ket


def basis_labels(n_qubits: int) -> list[str]:
    return [format(i, f"0{n_qubits}b") for i in range(2 ** n_qubits)]


def pure_density(ket: np.ndarray) -> np.ndarray:
    ket = linalg.normalize_state(ket)
    return np.outer(ket, ket.conj())


@dataclass(frozen=True)
class ProtocolSpec:
    """Bundle of time-independent Hamiltonians with boundary states.

    The evolving Hamiltonian is ``sum_k eps_k(t) * hamiltonians[k]``; the
    goal is to steer ``initial_state`` to ``target_state`` at final time.
    """

    n_qubits: int
    hamiltonians: tuple[np.ndarray, ...]
    initial_state: np.ndarray
    target_state: np.ndarray
    label: str = ""

    def __post_init__(self):
        dim = 2 ** self.n_qubits
        for h in self.hamiltonians:
            if h.shape != (dim, dim):
                raise DimensionMismatchError(
                    f"Hamiltonian shape {h.shape} does not match dim {dim}")
            if not linalg.is_hermitian(h, tol=1e-12):
                raise DimensionMismatchError("Hamiltonian is not Hermitian")
        for rho in (self.initial_state, self.target_state):
            if rho.shape != (dim, dim):
                raise DimensionMismatchError(
                    f"state shape {rho.shape} does not match dim {dim}")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def n_controls(self) -> int:
        return len(self.hamiltonians)


@dataclass(frozen=True)
class NoiseChannel:
    """Per-qubit Lindblad operators with a common decay-rate list."""

    kind: str
    lindblad_ops: tuple[np.ndarray, ...]
    rates: tuple[float, ...]

    def __post_init__(self):
        if len(self.lindblad_ops) != len(self.rates):
            raise DimensionMismatchError("one rate per Lindblad operator required")
        if any(g < 0 for g in self.rates):
            raise NegativeRateError(f"negative rate in {self.rates}")

    @property
    def is_trivial(self) -> bool:
        return all(g == 0 for g in self.rates) or not self.lindblad_ops

    def scaled(self, gamma: float) -> "NoiseChannel":
        """Same operators with every rate replaced by ``gamma``."""
        if gamma < 0:
            raise NegativeRateError(f"negative rate {gamma}")
        return NoiseChannel(self.kind, self.lindblad_ops, (gamma,) * len(self.lindblad_ops))


def build_channel(kind: str, n_qubits: int, gamma: float) -> NoiseChannel:
    """Uniform single-qubit noise: one embedded operator per qubit.

    ``dephasing`` uses ``sigma_z``; ``amplitude_damping`` uses
    ``sigma_minus = |1><0|``. All qubits share the same rate.
    """
    if kind == "dephasing":
        s = pauli("z")
    elif kind == "amplitude_damping":
        s = pauli("minus")
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    if gamma < 0:
        raise NegativeRateError(f"negative rate {gamma}")
    ops = tuple(embed(s, q, n_qubits) for q in range(1, n_qubits + 1))
    return NoiseChannel(kind, ops, (float(gamma),) * n_qubits)


def build_aep() -> ProtocolSpec:
    """Two-qubit entanglement protocol.

    Driving Hamiltonian ``Z1 + Z2`` with ground state ``|11>``; problem
    Hamiltonian ``Y1 Y2 - Z1 Z2`` with ground state the Bell state
    ``(|00> + |11>)/sqrt(2)``.
    """
    sz, sy = pauli("z"), pauli("y")
    h1 = embed(sz, 1, 2) + embed(sz, 2, 2)
    h2 = embed(sy, 1, 2) @ embed(sy, 2, 2) - embed(sz, 1, 2) @ embed(sz, 2, 2)
    initial = pure_density(basis_ket("11"))
    target = pure_density(basis_ket("00") + basis_ket("11"))
    return ProtocolSpec(2, (h1, h2), initial, target, label="aep")


def build_atp(local_field: tuple[str, int] | None = None) -> ProtocolSpec:
    """Three-qubit teleportation protocol (first qubit -> third qubit).

    Driving Hamiltonian ``-(X2 X3 + Z2 Z3)`` and problem Hamiltonian
    ``-(X1 X2 + Z1 Z2)``, each with a twofold-degenerate ground space.
    The canonical initial state is ``(|0>+|1>)(|00>+|11>)/2`` and the
    target is ``(|00>+|11>)(|0>+|1>)/2``.

    Args:
        local_field: optional ``(direction, qubit)`` adding a third
            control Hamiltonian ``sigma_direction`` on that qubit.
    """
    sx, sz = pauli("x"), pauli("z")
    h1 = -(embed(sx, 2, 3) @ embed(sx, 3, 3) + embed(sz, 2, 3) @ embed(sz, 3, 3))
    h2 = -(embed(sx, 1, 3) @ embed(sx, 2, 3) + embed(sz, 1, 3) @ embed(sz, 2, 3))
    hams = [h1, h2]
    label = "atp2"
    if local_field is not None:
        direction, qubit = local_field
        if direction not in ("x", "y", "z"):
            raise ValueError(f"local field direction must be x, y or z, got {direction!r}")
        if not 1 <= qubit <= 3:
            raise IndexError(f"local field qubit {qubit} outside 1..3")
        hams.append(embed(pauli(direction), qubit, 3))
        label = f"atp3-{direction}{qubit}"
    single_plus = basis_ket("0") + basis_ket("1")
    bell = basis_ket("00") + basis_ket("11")
    initial = pure_density(np.kron(single_plus, bell))
    target = pure_density(np.kron(bell, single_plus))
    return ProtocolSpec(3, tuple(hams), initial, target, label=label)
