"""Lindblad master-equation propagation with piecewise-constant controls.

States are propagated in Liouville space: density matrices are
column-stacked into vectors and each control interval applies the exact
superoperator exponential ``exp(L dt)``.  For a Hamiltonian ``H`` and
Lindblad operators ``L_j`` with rates ``gamma_j`` the generator is

    drho/dt = -i[H, rho]
              + 1/2 sum_j gamma_j (2 L_j rho L_j^dag
                                   - L_j^dag L_j rho - rho L_j^dag L_j)

which in column-stacking convention (``vec(AXB) = (B^T kron A) vec(X)``)
becomes the matrix

    L = -i(I kron H - H^T kron I)
        + 1/2 sum_j gamma_j (2 conj(L_j) kron L_j
                             - I kron L_j^dag L_j - (L_j^dag L_j)^T kron I)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadLabelError, DimensionMismatchError, InvariantViolationError
from .linalg import is_hermitian, matrix_exp
from .models import NoiseChannel, ProtocolSpec

TRACE_DRIFT_ABORT = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, T] with n_steps intervals."""

    horizon: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 2:
            raise ValueError("n_steps must be at least 2")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    @property
    def times(self) -> np.ndarray:
        """All n_steps + 1 grid points, 0 .. T."""
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    @property
    def interval_starts(self) -> np.ndarray:
        """Left endpoints of the n_steps control intervals."""
        return self.times[:-1]

    def refined(self, factor: int) -> "TimeGrid":
        return TimeGrid(self.horizon, self.n_steps * factor)


@dataclass(frozen=True)
class ControlSet:
    """Per-control samples on the interval grid (left-endpoint convention)."""

    samples: np.ndarray  # shape (n_controls, n_steps)

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 2:
            raise DimensionMismatchError("control samples must be a 2-D array")
        if not np.all(np.isfinite(arr)):
            raise InvariantViolationError("control samples contain NaN/Inf")
        object.__setattr__(self, "samples", arr)

    @property
    def n_controls(self) -> int:
        return self.samples.shape[0]

    @property
    def n_steps(self) -> int:
        return self.samples.shape[1]

    def refined(self, factor: int) -> "ControlSet":
        """Same piecewise-constant functions on a grid refined by ``factor``."""
        return ControlSet(np.repeat(self.samples, factor, axis=1))


@dataclass(frozen=True)
class Trajectory:
    """Density matrices at every grid point of a propagation run."""

    times: np.ndarray    # (n_steps + 1,)
    states: np.ndarray   # (n_steps + 1, dim, dim)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return v.reshape((d, d), order="F")


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-10,
                         trace_tol: float = 1e-10, eig_tol: float = -1e-8) -> None:
    """Raise InvariantViolationError unless rho is a valid density matrix."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvariantViolationError(f"density matrix must be square, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise InvariantViolationError(f"Hermiticity residual {herm:.3e} > {herm_tol:g}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise InvariantViolationError(f"trace {tr} deviates from 1 by more than {trace_tol:g}")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w[0] < eig_tol:
        raise InvariantViolationError(f"negative eigenvalue {w[0]:.3e} below {eig_tol:g}")


def hamiltonian_liouvillian(h: np.ndarray) -> np.ndarray:
    """Coherent part ``-i(I kron H - H^T kron I)`` acting on vec(rho)."""
    if not is_hermitian(h):
        raise DimensionMismatchError("Hamiltonian must be Hermitian")
    ident = np.eye(h.shape[0], dtype=complex)
    return -1j * (np.kron(ident, h) - np.kron(h.T, ident))


def dissipator_liouvillian(channel: NoiseChannel, dim: int) -> np.ndarray:
    """Dissipative part of the generator for all channel operators."""
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    ident = np.eye(dim, dtype=complex)
    for op, gamma in zip(channel.lindblad_ops, channel.rates):
        if op.shape != (dim, dim):
            raise DimensionMismatchError(
                f"Lindblad operator shape {op.shape} does not match dim {dim}")
        if gamma == 0.0:
            continue
        ldl = op.conj().T @ op
        out += 0.5 * gamma * (2.0 * np.kron(op.conj(), op)
                              - np.kron(ident, ldl) - np.kron(ldl.T, ident))
    return out


def liouvillian(h: np.ndarray, channel: NoiseChannel) -> np.ndarray:
    """Full generator matrix for Hamiltonian ``h`` and a noise channel."""
    return hamiltonian_liouvillian(h) + dissipator_liouvillian(channel, h.shape[0])


class LiouvilleCache:
    """Control-independent pieces of the generator, for fast per-interval assembly.

    ``generator(eps)`` returns ``sum_k eps_k * L_Hk + L_diss`` without
    rebuilding the Kronecker products each call.
    """

    def __init__(self, spec: ProtocolSpec, channel: NoiseChannel):
        self.dim = spec.dim
        self.ham_parts = [hamiltonian_liouvillian(h) for h in spec.hamiltonians]
        self.dissipator = dissipator_liouvillian(channel, spec.dim)

    def generator(self, eps: np.ndarray) -> np.ndarray:
        out = self.dissipator.copy()
        for e, part in zip(eps, self.ham_parts):
            if e != 0.0:
                out += e * part
        return out

    def step_propagator(self, eps: np.ndarray, dt: float) -> np.ndarray:
        return matrix_exp(self.generator(eps) * dt)


def interval_propagators(spec: ProtocolSpec, controls: ControlSet,
                         grid: TimeGrid, channel: NoiseChannel) -> np.ndarray:
    """exp(L_n dt) for every interval, shape (n_steps, d^2, d^2)."""
    cache = LiouvilleCache(spec, channel)
    dt = grid.dt
    return np.array([cache.step_propagator(controls.samples[:, n], dt)
                     for n in range(grid.n_steps)])


def propagate(rho0: np.ndarray, spec: ProtocolSpec, controls: ControlSet,
              grid: TimeGrid, channel: NoiseChannel) -> Trajectory:
    """Evolve ``rho0`` across the grid, returning all intermediate states.

    Raises:
        InvariantViolationError: if the trace drifts beyond 1e-6 (an
            integrator bug, never silently renormalized).
    """
    if controls.n_controls != spec.n_controls:
        raise DimensionMismatchError(
            f"{controls.n_controls} controls supplied for {spec.n_controls} Hamiltonians")
    if controls.n_steps != grid.n_steps:
        raise DimensionMismatchError(
            f"controls have {controls.n_steps} samples for {grid.n_steps} intervals")
    check_density_matrix(rho0)

    cache = LiouvilleCache(spec, channel)
    dt = grid.dt
    states = np.empty((grid.n_steps + 1, spec.dim, spec.dim), dtype=complex)
    states[0] = rho0
    v = vec(rho0.astype(complex))
    for n in range(grid.n_steps):
        v = cache.step_propagator(controls.samples[:, n], dt) @ v
        rho = unvec(v)
        drift = abs(np.trace(rho) - 1.0)
        if drift > TRACE_DRIFT_ABORT:
            raise InvariantViolationError(
                f"trace drift {drift:.3e} at step {n + 1} exceeds {TRACE_DRIFT_ABORT:g}")
        states[n + 1] = rho
    return Trajectory(times=grid.times, states=states)


def populations(traj: Trajectory, labels: list[str]) -> dict[str, np.ndarray]:
    """Diagonal occupations ``<b|rho(t)|b>`` for the requested basis labels."""
    dim = traj.states.shape[1]
    n_qubits = int(round(np.log2(dim)))
    out = {}
    for label in labels:
        if len(label) != n_qubits or any(c not in "01" for c in label):
            raise BadLabelError(
                f"label {label!r} is not a {n_qubits}-bit string")
        idx = int(label, 2)
        out[label] = traj.states[:, idx, idx].real.copy()
    return out
