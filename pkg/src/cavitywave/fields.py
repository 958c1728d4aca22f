"""Rectangular grids, sampled scalar fields, and weighted energies.

The computational domain is a closed axis-aligned rectangle discretized by
an ``nx`` x ``ny`` node lattice.  Every volume integral uses trapezoidal
quadrature (weight 1 interior, 1/2 on faces, 1/4 at corners, times hx*hy) and
carries the ``1/c^2`` weight under which ``c^2 * Laplacian`` is formally
self-adjoint.  The metric is the Euclidean identity; all heterogeneity lives
in the speed ``c(x)`` and the potential ``q(x)``.

All types are immutable after construction and every operation here is a
pure function, so shared instances are safe to use from multiple threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "Grid2D",
    "ScalarField",
    "MediumParams",
    "TimeAxis",
    "CauchyPair",
    "inner_omega",
    "energy",
    "hr_norm",
]


@dataclass(frozen=True)
class Grid2D:
    """Axis-aligned rectangular node lattice.

    ``nx, ny`` are node counts per axis (at least 3 so every face has an
    interior node), ``hx, hy`` the spacings, ``origin`` the coordinates of
    node (0, 0).  Boundary nodes are exactly those with an index on a face.
    """

    nx: int
    ny: int
    hx: float
    hy: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs nx, ny >= 3, got {self.nx} x {self.ny}")
        if not (self.hx > 0.0 and self.hy > 0.0):
            raise ValueError(f"grid spacings must be positive, got {self.hx}, {self.hy}")

    @property
    def n_nodes(self) -> int:
        return self.nx * self.ny

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape used for sampled values: (ny, nx), row-major, y outer."""
        return (self.ny, self.nx)

    @property
    def extent(self) -> tuple[float, float]:
        return ((self.nx - 1) * self.hx, (self.ny - 1) * self.hy)

    @property
    def diameter(self) -> float:
        lx, ly = self.extent
        return float(np.hypot(lx, ly))

    @cached_property
    def xs(self) -> np.ndarray:
        return self.origin[0] + self.hx * np.arange(self.nx)

    @cached_property
    def ys(self) -> np.ndarray:
        return self.origin[1] + self.hy * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) coordinate arrays of shape (ny, nx)."""
        return np.meshgrid(self.xs, self.ys)

    @cached_property
    def area_weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights, shape (ny, nx); sums to the area."""
        wx = np.full(self.nx, self.hx)
        wx[0] = wx[-1] = 0.5 * self.hx
        wy = np.full(self.ny, self.hy)
        wy[0] = wy[-1] = 0.5 * self.hy
        w = np.outer(wy, wx)
        w.flags.writeable = False
        return w

    def refined(self, factor: int = 2) -> "Grid2D":
        """Grid with ``factor``-times finer spacing and the same extent.

        Nodes of the coarse grid coincide with every ``factor``-th node of
        the fine grid, which keeps restriction exact.
        """
        if factor < 1:
            raise ValueError("refinement factor must be >= 1")
        return Grid2D(
            nx=factor * (self.nx - 1) + 1,
            ny=factor * (self.ny - 1) + 1,
            hx=self.hx / factor,
            hy=self.hy / factor,
            origin=self.origin,
        )


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real-valued function sampled at every grid node.

    ``values`` has shape (ny, nx); a flat array of length nx*ny is accepted
    and reshaped.  Entries must be finite.  The array is copied and frozen.
    """

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.size != self.grid.n_nodes:
            raise DimensionMismatchError(
                f"field has {arr.size} values for a {self.grid.nx} x {self.grid.ny} grid"
            )
        arr = arr.reshape(self.grid.shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, grid: Grid2D) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid2D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "ScalarField":
        x, y = grid.mesh()
        return cls(grid, np.asarray(fn(x, y), dtype=float))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        _require_same_grid(self.grid, other.grid)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        _require_same_grid(self.grid, other.grid)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class MediumParams:
    """Wave speed and potential on a shared grid.

    Requires ``min(c) > 0`` and ``min(q) >= 0``; the latter keeps the
    Dirichlet energy a (semi)norm.  The metric is fixed to the Euclidean
    identity, so the volume weight reduces to ``1/c^2``.
    """

    c: ScalarField
    q: ScalarField

    #: The only supported metric; variable speed carries all heterogeneity.
    metric: str = "identity"

    def __post_init__(self) -> None:
        _require_same_grid(self.c.grid, self.q.grid)
        if self.metric != "identity":
            raise ValueError("only the identity metric is supported")
        if self.c.values.min() <= 0.0:
            raise ValueError("wave speed must be positive everywhere")
        if self.q.values.min() < 0.0:
            raise ValueError("potential must be non-negative everywhere")

    @classmethod
    def constant(cls, grid: Grid2D, c: float = 1.0, q: float = 0.0) -> "MediumParams":
        return cls(ScalarField(grid, np.full(grid.shape, float(c))),
                   ScalarField(grid, np.full(grid.shape, float(q))))

    @property
    def grid(self) -> Grid2D:
        return self.c.grid

    @cached_property
    def c_squared(self) -> np.ndarray:
        a = self.c.values ** 2
        a.flags.writeable = False
        return a

    @cached_property
    def inv_c_squared(self) -> np.ndarray:
        a = 1.0 / self.c_squared
        a.flags.writeable = False
        return a

    @property
    def c_max(self) -> float:
        return float(self.c.values.max())

    @property
    def q_is_zero(self) -> bool:
        return bool(np.all(self.q.values == 0.0))


@dataclass(frozen=True)
class TimeAxis:
    """Uniform time discretization of the observation window [0, tau]."""

    dt: float
    nt: int

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError("time step must be positive")
        if self.nt < 1:
            raise ValueError("need at least one time step")

    @property
    def tau(self) -> float:
        return self.nt * self.dt

    @property
    def n_levels(self) -> int:
        return self.nt + 1

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.nt + 1)

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoidal time-quadrature weights, length nt+1; sums to tau."""
        w = np.full(self.nt + 1, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        w.flags.writeable = False
        return w


@dataclass(frozen=True, eq=False)
class CauchyPair:
    """A (field, velocity field) state of the second-order evolution."""

    u: ScalarField
    ut: ScalarField

    def __post_init__(self) -> None:
        _require_same_grid(self.u.grid, self.ut.grid)

    @classmethod
    def rest(cls, u0: ScalarField) -> "CauchyPair":
        """State (u0, 0): an initial pressure released from rest."""
        return cls(u0, ScalarField.zeros(u0.grid))

    @property
    def grid(self) -> Grid2D:
        return self.u.grid


def _require_same_grid(a: Grid2D, b: Grid2D) -> None:
    if a != b:
        raise DimensionMismatchError(f"grids differ: {a} vs {b}")


def inner_omega(f: ScalarField, g: ScalarField, med: MediumParams) -> float:
    """Weighted volume inner product  sum f*g/c^2 * quadrature weight.

    Symmetric, bilinear, and positive definite (all weights are positive).
    """
    _require_same_grid(f.grid, g.grid)
    _require_same_grid(f.grid, med.grid)
    w = f.grid.area_weights
    return float(np.sum(f.values * g.values * med.inv_c_squared * w))


def _grad_quadratic(u: ScalarField, med: MediumParams) -> float:
    """sum (|grad u|^2 + q u^2 / c^2) * weight, centered differences inside,
    second-order one-sided at the faces."""
    g = u.grid
    duy, dux = np.gradient(u.values, g.hy, g.hx)
    dens = dux**2 + duy**2 + med.inv_c_squared * med.q.values * u.values**2
    return float(np.sum(dens * g.area_weights))


def hr_norm(u0: ScalarField, med: MediumParams) -> float:
    """Dirichlet (semi)norm  sqrt(1/2 * integral |grad u0|^2 + q|u0|^2/c^2).

    Vanishes on constants when q == 0; equals sqrt(energy((u0, 0), med)).
    """
    _require_same_grid(u0.grid, med.grid)
    return float(np.sqrt(0.5 * _grad_quadratic(u0, med)))


def energy(state: CauchyPair, med: MediumParams) -> float:
    """Total wave energy 1/2 * integral |grad u|^2 + q|u|^2/c^2 + |ut|^2/c^2.

    Computed exactly as hr_norm(u)^2 + 1/2 <ut, ut> so the decomposition into
    Dirichlet and kinetic parts holds to the last bit.
    """
    _require_same_grid(state.grid, med.grid)
    return hr_norm(state.u, med) ** 2 + 0.5 * inner_omega(state.ut, state.ut, med)
