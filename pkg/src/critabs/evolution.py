"""Explicit time integration in physical and self-similar variables.

Physical mode advances u_t = div(|u_r|^{p-2} u_r) - lam |u_r|^q.  The
rescaled modes advance w(s, y) with s = log(e + t); ``rescaled_full`` keeps
the 1/s correction terms, ``rescaled_autonomous`` drops them (the Barenblatt
profiles are then steady states).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from . import _kernels
from .config import RunConfig
from .diagnostics import TrajectoryRecord, record
from .profiles import Params, barenblatt_value
from .radial import RadialField, RadialGrid, support_index, support_threshold

DOMAIN_GUARD_CELLS = 3


class DomainError(RuntimeError):
    """The support came too close to the outer boundary of the grid."""


class Mode(str, Enum):
    PHYSICAL = "physical"
    RESCALED_FULL = "rescaled_full"
    RESCALED_AUTONOMOUS = "rescaled_autonomous"

    @property
    def code(self) -> int:
        return {
            Mode.PHYSICAL: _kernels.PHYSICAL,
            Mode.RESCALED_FULL: _kernels.RESCALED_FULL,
            Mode.RESCALED_AUTONOMOUS: _kernels.RESCALED_AUTONOMOUS,
        }[self]

    @property
    def rescaled(self) -> bool:
        return self is not Mode.PHYSICAL


@dataclass(frozen=True)
class EvolutionMode:
    kind: Mode = Mode.PHYSICAL
    absorption: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Mode(self.kind))
        if self.absorption not in (0.0, 1.0):
            raise ValueError("absorption coefficient must be 0 or 1")


@dataclass
class RunState:
    field: RadialField
    time: float
    params: Params
    mode: EvolutionMode
    step_count: int = 0

    def __post_init__(self) -> None:
        if self.mode.kind.rescaled and self.time < 1:
            raise ValueError("rescaled runs are posed for s >= 1")
        if self.field.grid.N != self.params.N:
            raise ValueError("grid dimension does not match params.N")


def _kernel_args(state: RunState) -> tuple:
    grid = state.field.grid
    prm = state.params
    return (grid.dr, grid.faces, grid.volumes, grid.areas, grid.centers,
            prm.p, prm.q, prm.eta, float(prm.N), state.mode.absorption, state.mode.kind.code)


def stable_dt(state: RunState, safety: float = 0.4) -> float:
    if not 0 < safety <= 1:
        raise ValueError("safety must lie in (0, 1]")
    grid = state.field.grid
    prm = state.params
    gmax = _kernels.max_face_gradient(state.field.values, grid.dr)
    return float(_kernels.stable_dt(gmax, grid.dr, grid.r_max, float(prm.N), prm.p, prm.q, prm.eta,
                                    state.mode.absorption, state.mode.kind.code, state.time, safety))


def step(state: RunState, dt: float, cutoff: float | None = None) -> RunState:
    """Advance one forward-Euler step; returns a new state.

    ``cutoff`` fixes the flush threshold (used when two runs must share it,
    as in order-preservation checks); by default it is relative to the new
    maximum.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    limit = stable_dt(state, 1.0)
    if dt > limit * (1 + 1e-12):
        raise ValueError(f"dt={dt:.3e} exceeds the stability bound {limit:.3e}")
    dr, faces, vols, areas, centers, p, q, eta, N, lam, code = _kernel_args(state)
    out = np.empty_like(state.field.values)
    last, _ = _kernels.step_into(state.field.values, out, dt, dr, faces, vols, areas, centers,
                                 p, q, eta, N, lam, code, state.time, cutoff or 0.0)
    m = state.field.grid.m
    if last >= m - DOMAIN_GUARD_CELLS:
        raise DomainError(f"support reached cell {last} of {m}; enlarge r_max")
    return RunState(RadialField(state.field.grid, out), state.time + dt, state.params,
                    state.mode, state.step_count + 1)


def advance_to(state: RunState, t_target: float, safety: float = 0.4,
               max_steps: int = 10**9) -> RunState:
    """Step repeatedly (compiled loop) until ``t_target`` is reached exactly."""
    if t_target < state.time:
        raise ValueError("cannot integrate backwards in time")
    if t_target == state.time:
        return state
    dr, faces, vols, areas, centers, p, q, eta, N, lam, code = _kernel_args(state)
    w = state.field.values.copy()
    t, n, status = _kernels.advance(w, state.time, t_target, safety, dr, state.field.grid.r_max,
                                    faces, vols, areas, centers, p, q, eta, N, lam, code,
                                    0.0, max_steps, DOMAIN_GUARD_CELLS)
    if status == 1:
        raise DomainError(f"support reached the outer boundary at time {t:.6g}; enlarge r_max")
    if status == 2:
        raise RuntimeError(f"step budget {max_steps} exhausted at time {t:.6g}")
    return RunState(RadialField(state.field.grid, w), t, state.params, state.mode, state.step_count + n)


# ---------------------------------------------------------------------------
# initial data


def initial_values(config: RunConfig, grid: RadialGrid, params: Params) -> RadialField:
    d = config.initial
    r = grid.centers
    if d.family == "barenblatt":
        vals = barenblatt_value(d.A, r, params)
    elif d.family == "gaussian":
        floor = math.exp(-(d.radius**2) / (2 * d.width**2))
        vals = d.amplitude * np.maximum(np.exp(-(r**2) / (2 * d.width**2)) - floor, 0.0) / (1 - floor)
    elif d.family == "plateau":
        ramp = (d.outer - r) / (d.outer - d.radius)
        vals = d.amplitude * np.clip(ramp, 0.0, 1.0)
    elif d.family == "annulus":
        x = (r - d.inner) / (d.outer - d.inner)
        vals = np.where((x > 0) & (x < 1), d.amplitude * np.sin(np.pi * x) ** 2, 0.0)
    elif d.family == "table":
        table = np.loadtxt(d.path, delimiter=",", ndmin=2, comments="#")
        vals = np.interp(r, table[:, 0], table[:, 1], right=0.0)
    else:
        raise ValueError(f"unknown initial data family {d.family!r}")
    field_ = RadialField(grid, np.maximum(vals, 0.0))
    idx = support_index(field_.values, support_threshold(field_.values))
    if idx >= grid.m - DOMAIN_GUARD_CELLS:
        raise DomainError("initial data is not supported well inside [0, r_max)")
    return field_


def snapshot_times(t0: float, t_end: float, count: int, log_spaced: bool = True) -> np.ndarray:
    if t_end < t0:
        raise ValueError("t_end precedes the start time")
    if t_end == t0 or count <= 1:
        return np.array([t0]) if t_end == t0 else np.array([t0, t_end])
    if not log_spaced:
        times = np.linspace(t0, t_end, count)
    elif t0 > 0:
        times = np.geomspace(t0, t_end, count)
    else:
        times = np.concatenate(([t0], np.geomspace(t_end * 1e-4, t_end, count - 1)))
    times[0], times[-1] = t0, t_end
    if np.any(np.diff(times) <= 0):
        raise ValueError("snapshot times must be strictly increasing")
    return times


@dataclass
class Trajectory:
    params: Params
    mode: EvolutionMode
    grid: RadialGrid
    records: list[TrajectoryRecord] = field(default_factory=list)
    fields: list[np.ndarray] = field(default_factory=list)
    steps: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([r.time for r in self.records])

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in self.records])


def make_state(config: RunConfig) -> RunState:
    params = config.params
    grid = RadialGrid(config.r_max, config.m, params.N)
    mode = EvolutionMode(Mode(config.mode), config.absorption)
    return RunState(initial_values(config, grid, params), config.start_time, params, mode)


def run(config: RunConfig, keep_fields: bool = False, extra_times: Sequence[float] = (),
        initial: RadialField | None = None) -> Trajectory:
    """Integrate ``config`` and record diagnostics at every snapshot time.

    ``extra_times`` are merged into the configured cadence; ``initial``
    replaces the data family of the config (the grid must match).
    """
    state = make_state(config)
    if initial is not None:
        if initial.grid != state.field.grid:
            raise ValueError("initial field lives on a different grid")
        state = replace(state, field=initial.copy())
    times = snapshot_times(state.time, config.t_end, config.snapshots, config.log_spaced)
    extra = [t for t in extra_times if state.time <= t <= config.t_end]
    if extra:
        times = np.unique(np.concatenate((times, extra)))
    traj = Trajectory(state.params, state.mode, state.field.grid)
    for target in times:
        state = advance_to(state, float(target), config.safety, config.max_steps)
        rec = record(state)
        if traj.records and rec.time <= traj.records[-1].time:
            raise RuntimeError("snapshot times must increase")
        traj.records.append(rec)
        if keep_fields:
            traj.fields.append(state.field.values.copy())
    traj.steps = state.step_count
    return traj


def run_ordered_pair(lower: RunState, upper: RunState, times: Sequence[float], safety: float = 0.4,
                     cutoff: float = 1e-12) -> list[tuple[RadialField, RadialField]]:
    """Advance two states in lockstep with a common dt and flush threshold.

    Returns the pair of fields at each requested time; used to check the
    discrete comparison principle.
    """
    if lower.mode != upper.mode or lower.params != upper.params:
        raise ValueError("paired runs must share mode and params")
    out = []
    for target in times:
        while lower.time < target:
            dt = min(stable_dt(lower, safety), stable_dt(upper, safety), target - lower.time)
            lower = step(lower, dt, cutoff)
            upper = step(upper, dt, cutoff)
            if target - lower.time < 1e-14 * max(1.0, target):
                lower = replace(lower, time=float(target))
                upper = replace(upper, time=float(target))
        out.append((lower.field, upper.field))
    return out


# ---------------------------------------------------------------------------
# change of variables


def _scales(t: float, params: Params) -> tuple[float, float, float]:
    """(s, space stretch x/y, amplitude factor w/u) at physical time t."""
    if t < 0:
        raise ValueError("t must be non-negative")
    N, p, eta = params.N, params.p, params.eta
    et = math.e + t
    s = math.log(et)
    stretch = et**eta * s ** (-(p - 2) * (N + 1) * eta)
    amp = et ** (N * eta) * s ** (p * eta * (N + 1))
    return s, stretch, amp


def physical_to_rescaled(u_field: RadialField, t: float, params: Params,
                         grid: RadialGrid | None = None) -> tuple[float, RadialField]:
    s, stretch, amp = _scales(t, params)
    grid = grid or u_field.grid
    w = amp * np.interp(grid.centers * stretch, u_field.grid.centers, u_field.values, right=0.0)
    return s, RadialField(grid, w)


def rescaled_to_physical(w_field: RadialField, s: float, params: Params,
                         grid: RadialGrid | None = None) -> tuple[float, RadialField]:
    t = math.exp(s) - math.e
    _, stretch, amp = _scales(max(t, 0.0), params)
    grid = grid or w_field.grid
    u = np.interp(grid.centers / stretch, w_field.grid.centers, w_field.values, right=0.0) / amp
    return t, RadialField(grid, u)
