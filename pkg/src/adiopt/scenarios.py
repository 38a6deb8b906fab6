"""Declarative scenario runs: sweeps, local-field scans, population dumps.

A ScenarioConfig bundles everything one run needs.  Per-protocol presets
fill in grid and optimizer defaults that were calibrated for the shipped
scenarios; every value can be overridden by config file or CLI flag.

All CSV output is deterministic: a given config + seed produces
byte-identical files (timings are reported in-process only, never
written), and parallel execution never changes file contents because a
single collector writes after all workers finish.
"""
from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dynamics import ControlSet, TimeGrid, populations, propagate
from .errors import ConfigError
from .fidelity import mean_teleport_fidelity, uhlmann_fidelity
from .krotov import KrotovOptions, OptimizationResult, initial_guess, optimize
from .models import NoiseChannel, ProtocolSpec, build_atp, build_aep, build_channel

PROTOCOLS = ("aep", "atp2", "atp3")
NOISE_KINDS = ("dephasing", "amplitude_damping")

DEFAULT_GAMMAS = tuple(round(0.01 * i, 10) for i in range(11))

# Calibrated per-protocol defaults. The horizon for the teleportation
# scenarios is short: the local-field fidelity levels and the relative
# three-control gains match the published working point near
# gamma * T ~ 0.1.
PRESETS = {
    "aep": dict(horizon=5.0, n_steps=500, lam=0.1, max_iters=800),
    "atp2": dict(horizon=1.2, n_steps=120, lam=0.05, max_iters=600),
    "atp3": dict(horizon=1.2, n_steps=120, lam=0.05, max_iters=600),
}

# Constant starting value for the local-field control of atp3 runs.
# The teleportation Hamiltonians, boundary states and both noise
# channels commute with the global parity X1 X2 X3 while sigma_z /
# sigma_y local fields anticommute with it, so the first-order update
# for the third control vanishes identically on the unbiased
# eps3 = 0 manifold; a finite seed is required to leave it.
LOCAL_FIELD_SEED = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    protocol: str = "aep"
    noise: str = "dephasing"
    local_field: tuple[str, int] | None = None
    gamma_values: tuple[float, ...] = DEFAULT_GAMMAS
    horizon: float | None = None
    n_steps: int | None = None
    lam: float | None = None
    shape: str = "sin2"
    max_iters: int | None = None
    objective_tol: float = 1e-6
    amplitude_bound: float | None = None
    seed: int = 1234
    n_samples: int = 2000
    local_field_seed: float = LOCAL_FIELD_SEED
    unitary_only: bool = False
    output_dir: Path = Path(".")
    jobs: int = 1

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.noise not in NOISE_KINDS:
            raise ConfigError(f"unknown noise kind {self.noise!r}")
        if any(g < 0 for g in self.gamma_values):
            raise ConfigError("gamma values must be non-negative")
        if not self.gamma_values:
            raise ConfigError("at least one gamma value required")
        if self.protocol == "atp3" and self.local_field is None:
            raise ConfigError("atp3 requires a local_field (direction, qubit)")
        if self.n_samples < 1:
            raise ConfigError("n_samples must be positive")
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    def _preset(self, key: str):
        return PRESETS[self.protocol][key]

    @property
    def resolved_horizon(self) -> float:
        return self.horizon if self.horizon is not None else self._preset("horizon")

    @property
    def resolved_n_steps(self) -> int:
        return self.n_steps if self.n_steps is not None else self._preset("n_steps")

    @property
    def resolved_lam(self) -> float:
        return self.lam if self.lam is not None else self._preset("lam")

    @property
    def resolved_max_iters(self) -> int:
        return self.max_iters if self.max_iters is not None else self._preset("max_iters")

    @property
    def n_qubits(self) -> int:
        return 2 if self.protocol == "aep" else 3

    def grid(self) -> TimeGrid:
        return TimeGrid(self.resolved_horizon, self.resolved_n_steps)

    def build_spec(self, local_field: tuple[str, int] | None = None) -> ProtocolSpec:
        if self.protocol == "aep":
            return build_aep()
        if self.protocol == "atp2":
            return build_atp()
        return build_atp(local_field if local_field is not None else self.local_field)

    def channel(self, gamma: float) -> NoiseChannel:
        return build_channel(self.noise, self.n_qubits, gamma)

    def krotov_options(self, mode: str) -> KrotovOptions:
        return KrotovOptions(
            lam=self.resolved_lam,
            shape=self.shape,
            max_iters=self.resolved_max_iters,
            objective_tol=self.objective_tol,
            amplitude_bound=self.amplitude_bound,
            mode=mode,
        )

    def guess(self, spec: ProtocolSpec, grid: TimeGrid) -> ControlSet:
        g = initial_guess(grid, spec.n_controls)
        if spec.n_controls >= 3 and self.local_field_seed != 0.0:
            samples = g.samples.copy()
            samples[2, :] = self.local_field_seed
            g = ControlSet(samples)
        return g

    def canonical_string(self) -> str:
        parts = []
        for key in ("protocol", "noise", "local_field", "gamma_values",
                    "horizon", "n_steps", "lam", "shape", "max_iters",
                    "objective_tol", "amplitude_bound", "seed", "n_samples",
                    "local_field_seed", "unitary_only"):
            parts.append(f"{key}={getattr(self, key)!r}")
        return ";".join(parts)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_string().encode()).hexdigest()[:12]


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    fidelity_unitary_opt: float
    fidelity_nonunitary_opt: float
    iterations: int
    wall_time: float
    converged: bool = False


@dataclass(frozen=True)
class ScanRecord:
    direction: str
    qubit: int
    fidelity: float
    iterations: int
    converged: bool = False


@dataclass(frozen=True)
class MeanFidelityRecord:
    gamma: float
    mean_fidelity: float
    n_samples: int
    converged: bool = False


@dataclass(frozen=True)
class PopulationsRun:
    populations: dict[str, np.ndarray]
    csv_path: Path
    controls_path: Path
    converged: bool = False


def _optimize_for(config: ScenarioConfig, gamma: float, mode: str,
                  local_field: tuple[str, int] | None = None) -> OptimizationResult:
    spec = config.build_spec(local_field)
    grid = config.grid()
    return optimize(spec, config.channel(gamma), grid,
                    config.krotov_options(mode), guess=config.guess(spec, grid))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _base_metadata(config: ScenarioConfig, op: str) -> dict:
    meta = {
        "tool": "adiopt",
        "op": op,
        "config_hash": config.config_hash(),
        "protocol": config.protocol,
        "noise": config.noise,
        "horizon": _fmt(config.resolved_horizon),
        "n_steps": config.resolved_n_steps,
        "lambda": _fmt(config.resolved_lam),
        "shape": config.shape,
        "max_iters": config.resolved_max_iters,
        "seed": config.seed,
    }
    if config.local_field is not None:
        meta["local_field"] = "".join(map(str, config.local_field))
    return meta


def write_csv(path: Path, metadata: dict, header: list[str], rows: list[tuple]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {k} = {v}" for k, v in metadata.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _run_parallel(worker, jobs_args, n_workers: int):
    if n_workers <= 1 or len(jobs_args) <= 1:
        return [worker(a) for a in jobs_args]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(worker, jobs_args))


# --- gamma sweep ------------------------------------------------------------

def _sweep_worker(args) -> SweepRecord:
    config, gamma, unitary_samples, unitary_converged = args
    spec = config.build_spec()
    grid = config.grid()
    channel = config.channel(gamma)
    traj = propagate(spec.initial_state, spec, ControlSet(unitary_samples),
                     grid, channel)
    f_unitary = uhlmann_fidelity(traj.final_state, spec.target_state)
    if config.unitary_only:
        return SweepRecord(gamma, f_unitary, float("nan"), 0, 0.0,
                           unitary_converged)
    t0 = time.perf_counter()
    res = _optimize_for(config, gamma, "non_unitary")
    return SweepRecord(gamma, f_unitary, res.final_fidelity,
                       res.iterations_used, time.perf_counter() - t0,
                       res.converged and unitary_converged)


def run_sweep(config: ScenarioConfig) -> tuple[list[SweepRecord], Path]:
    """Fidelity-vs-gamma sweep comparing unitary and noise-aware optimization.

    The unitary optimization runs exactly once (its result cannot depend
    on gamma); its fields are then re-evaluated under each noise level,
    next to a fresh noise-aware optimization per gamma.
    """
    unitary = _optimize_for(config, 0.0, "unitary")
    args = [(config, g, unitary.controls.samples, unitary.converged)
            for g in config.gamma_values]
    records = _run_parallel(_sweep_worker, args, config.jobs)
    meta = _base_metadata(config, "sweep")
    meta["gamma_values"] = " ".join(_fmt(g) for g in config.gamma_values)
    if config.unitary_only:
        header = ["gamma", "fidelity_unitary_opt"]
        rows = [(r.gamma, r.fidelity_unitary_opt) for r in records]
    else:
        header = ["gamma", "fidelity_unitary_opt", "fidelity_nonunitary_opt",
                  "iterations"]
        rows = [(r.gamma, r.fidelity_unitary_opt, r.fidelity_nonunitary_opt,
                 r.iterations) for r in records]
    name = f"sweep_{config.protocol}_{config.noise}.csv"
    path = write_csv(config.output_dir / name, meta, header, rows)
    return records, path


# --- local-field scan -------------------------------------------------------

def _scan_worker(args) -> ScanRecord:
    config, gamma, direction, qubit = args
    res = _optimize_for(config, gamma, "non_unitary", local_field=(direction, qubit))
    return ScanRecord(direction, qubit, res.final_fidelity,
                      res.iterations_used, res.converged)


def run_local_field_scan(config: ScenarioConfig,
                         gamma: float) -> tuple[list[ScanRecord], Path]:
    """Optimize every local-field choice (3 directions x 3 qubits).

    Rows come back sorted by fidelity, best first.
    """
    scan_config = replace(config, protocol="atp3", local_field=("z", 1))
    args = [(scan_config, gamma, d, q)
            for d in ("x", "y", "z") for q in (1, 2, 3)]
    records = _run_parallel(_scan_worker, args, config.jobs)
    records.sort(key=lambda r: (-r.fidelity, r.direction, r.qubit))
    meta = _base_metadata(scan_config, "scan-local-field")
    del meta["local_field"]
    meta["gamma"] = _fmt(gamma)
    rows = [(r.direction, r.qubit, r.fidelity, r.iterations) for r in records]
    name = f"scan_local_field_{config.noise}_g{_fmt(gamma)}.csv"
    path = write_csv(config.output_dir / name, meta,
                     ["direction", "qubit", "fidelity", "iterations"], rows)
    return records, path


# --- population time series -------------------------------------------------

def run_populations(config: ScenarioConfig, gamma: float) -> PopulationsRun:
    """Propagate the optimized scenario and dump basis-state populations.

    Runs the unitary optimization for gamma = 0 (or when unitary_only is
    set) and the noise-aware one otherwise, then evolves under the actual
    channel.  Two files are written: the population time series (columns
    for every basis state whose population ever exceeds 0.01) and the
    optimized control fields, both against t/T.
    """
    mode = "unitary" if (gamma == 0.0 or config.unitary_only) else "non_unitary"
    res = _optimize_for(config, gamma, mode)
    spec = config.build_spec()
    grid = config.grid()
    traj = propagate(spec.initial_state, spec, res.controls, grid,
                     config.channel(gamma))
    labels = [format(i, f"0{spec.n_qubits}b") for i in range(spec.dim)]
    pops = populations(traj, labels)
    visible = [l for l in labels if pops[l].max() > 0.01]

    meta = _base_metadata(config, "populations")
    meta["gamma"] = _fmt(gamma)
    meta["mode"] = mode
    t_over_t = traj.times / grid.horizon
    rows = [tuple([t_over_t[i]] + [pops[l][i] for l in visible])
            for i in range(len(t_over_t))]
    stem = f"{config.protocol}_{config.noise}_g{_fmt(gamma)}"
    pop_path = write_csv(config.output_dir / f"populations_{stem}.csv", meta,
                         ["t_over_T"] + [f"p_{l}" for l in visible], rows)

    ctrl_meta = dict(meta)
    ctrl_meta["op"] = "controls"
    starts = grid.interval_starts / grid.horizon
    ctrl_header = ["t_over_T"] + [f"eps_{k + 1}" for k in range(res.controls.n_controls)]
    ctrl_rows = [tuple([starts[n]] + list(res.controls.samples[:, n]))
                 for n in range(grid.n_steps)]
    ctrl_path = write_csv(config.output_dir / f"controls_{stem}.csv",
                          ctrl_meta, ctrl_header, ctrl_rows)
    return PopulationsRun(pops, pop_path, ctrl_path, res.converged)


# --- Monte-Carlo mean teleportation fidelity --------------------------------

def _mean_fidelity_worker(args) -> MeanFidelityRecord:
    config, idx, gamma, n_samples = args
    spec = config.build_spec()
    grid = config.grid()
    channel = config.channel(gamma)
    res = _optimize_for(config, gamma, "non_unitary")
    mean = mean_teleport_fidelity(spec, res.controls, grid, channel,
                                  n_samples, seed=_substream_seed(config.seed, idx))
    return MeanFidelityRecord(gamma, mean, n_samples, res.converged)


def _substream_seed(seed: int, idx: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(idx,)).generate_state(1)[0])


def run_mean_fidelity(config: ScenarioConfig,
                      n_samples: int | None = None) -> tuple[list[MeanFidelityRecord], Path]:
    """Haar-averaged teleportation fidelity per gamma, fixed canonical controls.

    For each gamma the controls come from one noise-aware optimization of
    the canonical initial state; the Monte-Carlo average then varies only
    the input qubit state.  Each gamma gets its own deterministic RNG
    substream, so results are independent of execution order.
    """
    if config.protocol == "aep":
        raise ConfigError("mean fidelity applies to the teleportation protocols only")
    n = n_samples if n_samples is not None else config.n_samples
    args = [(config, i, g, n) for i, g in enumerate(config.gamma_values)]
    records = _run_parallel(_mean_fidelity_worker, args, config.jobs)
    meta = _base_metadata(config, "mean-fidelity")
    meta["samples"] = n
    rows = [(r.gamma, r.mean_fidelity) for r in records]
    name = f"mean_fidelity_{config.protocol}_{config.noise}.csv"
    path = write_csv(config.output_dir / name, meta,
                     ["gamma", "mean_fidelity"], rows)
    return records, path
