"""Krotov's method for open and closed systems.

Each iteration runs three sweeps over the time grid:

1. backward: the co-state is propagated from the target boundary
   condition at final time under the adjoint generator;
2. forward-with-update: walking forward interval by interval, every
   control sample is incremented by the first-order Krotov rule

       eps_new = eps_old + S(t)/lambda * Im Tr{costate^dag [H_k, rho_new]}

   where ``rho_new`` has already been propagated with the updated
   controls of the earlier intervals (immediate feedback);
3. objective bookkeeping on J = Tr(target rho(T)).

The shape S(t) and weight lambda control the update aggressiveness; for
sufficiently large lambda the objective increases monotonically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (ControlSet, LiouvilleCache, TimeGrid, Trajectory,
                       propagate, unvec, vec)
from .errors import NonFiniteUpdateError
from .fidelity import uhlmann_fidelity
from .models import NoiseChannel, ProtocolSpec

MODES = ("unitary", "non_unitary")
SHAPES = ("sin2", "flat")

# consecutive tiny-|dJ| iterations after which a non-stationary run is
# declared stalled and stopped early
STALL_ITERS = 25


@dataclass(frozen=True)
class KrotovOptions:
    """Tuning knobs for one optimization run.

    ``lam`` is the inverse step size: larger values give smaller, safer
    updates. ``shape`` is the update shape S(t) in [0, 1]: the name
    "sin2" (zero at both endpoints) or "flat" (S = 1 everywhere).
    ``mode`` selects whether the optimization itself sees the noise:
    "unitary" zeroes all decay rates inside the loop regardless of the
    channel passed in.
    """

    lam: float = 1.0
    shape: str = "sin2"
    max_iters: int = 500
    objective_tol: float = 1e-6
    amplitude_bound: float | None = None
    mode: str = "non_unitary"

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda weight must be positive")
        if isinstance(self.shape, str) and self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES} or a callable")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class OptimizationResult:
    controls: ControlSet
    objective_trace: np.ndarray
    final_fidelity: float
    iterations_used: int
    converged: bool
    max_last_update: float = math.nan


def shape_samples(options: KrotovOptions, grid: TimeGrid) -> np.ndarray:
    """S(t) evaluated at the interval left endpoints."""
    t = grid.interval_starts
    if callable(options.shape):
        s = np.array([float(options.shape(ti)) for ti in t])
    elif options.shape == "flat":
        s = np.ones_like(t)
    else:
        s = np.sin(np.pi * t / grid.horizon) ** 2
    if np.any(s < 0) or np.any(s > 1 + 1e-12):
        raise ValueError("shape values must lie in [0, 1]")
    return s


def initial_guess(grid: TimeGrid, n_controls: int) -> ControlSet:
    """Adiabatic ramp guess: eps1 = 1 - t/T, eps2 = t/T, extra controls zero."""
    if n_controls < 2:
        raise ValueError("at least two controls expected")
    t = grid.interval_starts / grid.horizon
    samples = np.zeros((n_controls, grid.n_steps))
    samples[0] = 1.0 - t
    samples[1] = t
    return ControlSet(samples)


def _step_propagators(spec: ProtocolSpec, controls: ControlSet,
                      grid: TimeGrid, cache: LiouvilleCache) -> np.ndarray:
    dt = grid.dt
    return np.array([cache.step_propagator(controls.samples[:, n], dt)
                     for n in range(grid.n_steps)])


def _forward_states(rho0: np.ndarray, props: np.ndarray, dim: int) -> np.ndarray:
    states = np.empty((len(props) + 1, dim, dim), dtype=complex)
    states[0] = rho0
    v = vec(rho0.astype(complex))
    for n, p in enumerate(props):
        v = p @ v
        states[n + 1] = unvec(v)
    return states


def _backward_costates(target: np.ndarray, props: np.ndarray, dim: int) -> np.ndarray:
    """Co-state at every grid point from the final-time boundary condition.

    The adjoint of each interval propagator is its conjugate transpose in
    the vectorized (Hilbert-Schmidt) representation, so no extra matrix
    exponentials are needed.
    """
    costates = np.empty((len(props) + 1, dim, dim), dtype=complex)
    costates[-1] = target
    v = vec(target.astype(complex))
    for n in range(len(props) - 1, -1, -1):
        v = props[n].conj().T @ v
        costates[n] = unvec(v)
    return costates


def backward_costate(spec: ProtocolSpec, controls: ControlSet,
                     channel: NoiseChannel, grid: TimeGrid,
                     target: np.ndarray) -> np.ndarray:
    """Backward-propagated co-state trajectory, shape (n_steps + 1, d, d).

    Solves d(costate)/dt = -i[H, costate]
                           - 1/2 sum_j gamma_j (2 L_j^dag costate L_j
                             - L_j^dag L_j costate - costate L_j^dag L_j)
    from costate(T) = target, i.e. the Hilbert-Schmidt adjoint flow: the
    pairing Tr(costate^dag rho) stays constant along any trajectory of
    the forward equation with the same controls.
    """
    cache = LiouvilleCache(spec, channel)
    props = _step_propagators(spec, controls, grid, cache)
    return _backward_costates(target, props, spec.dim)


def _objective(target: np.ndarray, rho_final: np.ndarray) -> float:
    return float(np.trace(target @ rho_final).real)


def _update_sweep(spec: ProtocolSpec, cache: LiouvilleCache, grid: TimeGrid,
                  controls: ControlSet, costates: np.ndarray,
                  shape: np.ndarray, options: KrotovOptions,
                  rho0: np.ndarray):
    """One sequential Krotov sweep; returns new controls, states, propagators.

    Controls on interval n are updated using the co-state of the previous
    iteration at t_n and the state re-propagated under the new controls of
    intervals 0..n-1, then the interval is traversed with the new values.
    """
    dt = grid.dt
    n_steps = grid.n_steps
    hams = spec.hamiltonians
    new = controls.samples.copy()
    states = np.empty((n_steps + 1, spec.dim, spec.dim), dtype=complex)
    states[0] = rho0
    props = np.empty((n_steps, spec.dim ** 2, spec.dim ** 2), dtype=complex)
    v = vec(rho0.astype(complex))
    max_update = 0.0
    bound = options.amplitude_bound
    for n in range(n_steps):
        rho = states[n]
        if shape[n] != 0.0:
            coeff = shape[n] / options.lam
            lam_dag = costates[n].conj().T
            for k, h in enumerate(hams):
                comm = h @ rho - rho @ h
                inc = coeff * float(np.trace(lam_dag @ comm).imag)
                if not math.isfinite(inc):
                    raise NonFiniteUpdateError(
                        f"non-finite update for control {k} at interval {n}")
                val = new[k, n] + inc
                if bound is not None:
                    val = min(max(val, -bound), bound)
                max_update = max(max_update, abs(val - new[k, n]))
                new[k, n] = val
        props[n] = cache.step_propagator(new[:, n], dt)
        v = props[n] @ v
        states[n + 1] = unvec(v)
    return ControlSet(new), states, props, max_update


def krotov_update(forward: Trajectory, costates: np.ndarray, spec: ProtocolSpec,
                  controls: ControlSet, options: KrotovOptions,
                  grid: TimeGrid, channel: NoiseChannel) -> ControlSet:
    """Single sequential control update (immediate-feedback scheme)."""
    opt_channel = channel.scaled(0.0) if options.mode == "unitary" else channel
    cache = LiouvilleCache(spec, opt_channel)
    shape = shape_samples(options, grid)
    new, _, _, _ = _update_sweep(spec, cache, grid, controls, costates,
                                 shape, options, forward.states[0])
    return new


def optimize(spec: ProtocolSpec, channel: NoiseChannel, grid: TimeGrid,
             options: KrotovOptions,
             guess: ControlSet | None = None) -> OptimizationResult:
    """Iterate Krotov sweeps until the objective stalls or stationarity.

    The run is declared converged only when both the objective change and
    the largest control update drop below tolerance (|dJ| < tol and
    max update < 10 tol); a run that merely stops improving is stopped
    after a stall window with ``converged=False``.

    ``final_fidelity`` is always evaluated under the channel that was
    passed in, so unitary-mode results report the fidelity the optimized
    fields achieve in the presence of the actual noise.
    """
    opt_channel = channel.scaled(0.0) if options.mode == "unitary" else channel
    cache = LiouvilleCache(spec, opt_channel)
    shape = shape_samples(options, grid)
    controls = guess if guess is not None else initial_guess(grid, spec.n_controls)
    rho0 = spec.initial_state
    target = spec.target_state

    props = _step_propagators(spec, controls, grid, cache)
    states = _forward_states(rho0, props, spec.dim)
    trace = [_objective(target, states[-1])]

    converged = False
    stall = 0
    max_update = math.nan
    iterations = 0
    for iterations in range(1, options.max_iters + 1):
        costates = _backward_costates(target, props, spec.dim)
        controls, states, props, max_update = _update_sweep(
            spec, cache, grid, controls, costates, shape, options, rho0)
        trace.append(_objective(target, states[-1]))
        delta = abs(trace[-1] - trace[-2])
        if delta < options.objective_tol:
            if max_update < 10.0 * options.objective_tol:
                converged = True
                break
            stall += 1
            if stall >= STALL_ITERS:
                break
        else:
            stall = 0

    if options.mode == "unitary" and not channel.is_trivial:
        final = propagate(rho0, spec, controls, grid, channel).final_state
    else:
        final = states[-1]
    fidelity = uhlmann_fidelity(final, target)
    return OptimizationResult(
        controls=controls,
        objective_trace=np.array(trace),
        final_fidelity=fidelity,
        iterations_used=iterations,
        converged=converged,
        max_last_update=max_update,
    )
