"""Cell-centred radial finite-volume grid and the discrete operators on it.

Cells are [i dr, (i+1) dr] for i = 0..m-1; faces sit at j dr for j = 0..m.
The space dimension only enters through cell volumes and face areas, so a
radial field on this grid stands for a radially symmetric function on R^N.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .profiles import Params, barenblatt_value, unit_ball_volume

SUPPORT_ABS = 1e-10
SUPPORT_REL = 1e-8


@dataclass(frozen=True)
class RadialGrid:
    r_max: float
    m: int
    N: int = 1
    centers: np.ndarray = field(init=False, repr=False, compare=False)
    faces: np.ndarray = field(init=False, repr=False, compare=False)
    volumes: np.ndarray = field(init=False, repr=False, compare=False)
    areas: np.ndarray = field(init=False, repr=False, compare=False)
    face_volumes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if int(self.m) != self.m or self.m < 16:
            raise ValueError("m must be an integer >= 16")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "N", int(self.N))
        dr = self.dr
        N = self.N
        omega = unit_ball_volume(N)
        faces = np.arange(self.m + 1) * dr
        faces[-1] = self.r_max
        centers = (np.arange(self.m) + 0.5) * dr
        # dual cells around faces: [c_{j-1}, c_j], clipped to [0, r_max]
        dual = np.concatenate(([0.0], centers, [self.r_max]))
        for name, value in (
            ("faces", faces),
            ("centers", centers),
            ("volumes", omega * np.diff(faces**N)),
            ("areas", N * omega * faces ** (N - 1)),
            ("face_volumes", omega * np.diff(dual**N)),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def dr(self) -> float:
        return self.r_max / self.m

    @property
    def omega(self) -> float:
        return unit_ball_volume(self.N)

    def refined(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.r_max, self.m * factor, self.N)


@dataclass
class RadialField:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.m,):
            raise ValueError(f"expected {self.grid.m} values, got shape {self.values.shape}")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite and non-negative")

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.values.copy())


class Norms(NamedTuple):
    l1: float
    linf: float
    grad_linf: float
    grad_lq_q: float


def sample(grid: RadialGrid, func) -> RadialField:
    """Point-sample ``func(r)`` at cell centres (negative values clipped)."""
    return RadialField(grid, np.maximum(np.asarray(func(grid.centers), dtype=float), 0.0))


def sample_profile(grid: RadialGrid, A: float, params: Params) -> RadialField:
    return RadialField(grid, barenblatt_value(A, grid.centers, params))


def face_gradients(field: RadialField) -> np.ndarray:
    """Face gradients; zero at the origin, ghost value 0 beyond r_max."""
    w = field.values
    g = np.empty(w.size + 1)
    g[0] = 0.0
    g[1:-1] = np.diff(w) / field.grid.dr
    g[-1] = -w[-1] / field.grid.dr
    return g


def p_laplacian_divergence(field: RadialField, p: float) -> np.ndarray:
    grid = field.grid
    g = face_gradients(field)
    flux = np.abs(g) ** (p - 2) * g * grid.areas
    return np.diff(flux) / grid.volumes


def godunov_gradient_magnitude(field: RadialField) -> np.ndarray:
    """Monotone upwind |u_r| for a Hamiltonian increasing in |grad u|."""
    g = face_gradients(field)
    # backward difference of cell i is g[i] (g[0] = 0 by symmetry), forward is g[i+1]
    return np.maximum(np.maximum(g[:-1], 0.0), np.maximum(-g[1:], 0.0))


def norms(field: RadialField, q: float) -> Norms:
    if q <= 1:
        raise ValueError("q must be > 1")
    grid = field.grid
    g = np.abs(face_gradients(field))
    return Norms(
        l1=float(np.dot(grid.volumes, field.values)),
        linf=float(field.values.max(initial=0.0)),
        grad_linf=float(g.max()),
        grad_lq_q=float(np.dot(grid.face_volumes, g**q)),
    )


def support_threshold(values: np.ndarray, rel: float = SUPPORT_REL, abs_: float = SUPPORT_ABS) -> float:
    return max(abs_, rel * float(np.max(values, initial=0.0)))


def support_index(values: np.ndarray, threshold: float) -> int:
    """Index of the last cell above ``threshold``; -1 if there is none."""
    above = np.flatnonzero(values > threshold)
    return int(above[-1]) if above.size else -1


def support_radius(field: RadialField, rel: float = SUPPORT_REL, abs_: float = SUPPORT_ABS) -> float:
    idx = support_index(field.values, support_threshold(field.values, rel, abs_))
    return 0.0 if idx < 0 else float(field.grid.faces[idx + 1])
