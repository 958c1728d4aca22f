"""Boundary enumeration, impedance data, and space-time boundary traces.

Boundary nodes are enumerated once each by a counterclockwise perimeter walk
starting at the origin corner: bottom face left-to-right, right face
bottom-to-top, top face right-to-left, left face top-to-bottom.  Arc-length
quadrature weights are trapezoidal per face; a corner collects (hx+hy)/4
from each of its two faces, so the full-perimeter integral of a constant is
exact.

The observed subset ``gamma`` is a node mask; the impedance ``lam`` must be
non-negative and may only be positive inside ``gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import DegenerateShiftError, DimensionMismatchError
from .fields import CauchyPair, Grid2D, MediumParams, ScalarField, TimeAxis, inner_omega

__all__ = [
    "FACE_NAMES",
    "BoundarySpec",
    "BoundaryTrace",
    "inner_trace",
    "robin_functional",
    "compatibility_shift",
    "parse_lambda_spec",
    "parse_gamma_spec",
]

#: Face identifiers in walk order.
FACE_NAMES = ("bottom", "right", "top", "left")
_FACE_ID = {name: k for k, name in enumerate(FACE_NAMES)}


@dataclass(frozen=True)
class _Walk:
    """Geometry of the perimeter walk for one grid (no physics attached)."""

    ii: np.ndarray          # x index per node
    jj: np.ndarray          # y index per node
    face: np.ndarray        # walk-segment face id per node
    ds: np.ndarray          # arc-length quadrature weight per node
    on_face: np.ndarray     # (4, M) bool: geometric membership incl. corners
    flat: np.ndarray        # j*nx + i
    normal: np.ndarray      # (M, 2) outward unit normal (corner: diagonal mean)


@lru_cache(maxsize=None)
def _walk(grid: Grid2D) -> _Walk:
    nx, ny, hx, hy = grid.nx, grid.ny, grid.hx, grid.hy
    ii, jj, face = [], [], []
    for i in range(nx):                      # bottom
        ii.append(i); jj.append(0); face.append(0)
    for j in range(1, ny):                   # right
        ii.append(nx - 1); jj.append(j); face.append(1)
    for i in range(nx - 2, -1, -1):          # top
        ii.append(i); jj.append(ny - 1); face.append(2)
    for j in range(ny - 2, 0, -1):           # left
        ii.append(0); jj.append(j); face.append(3)
    ii = np.asarray(ii); jj = np.asarray(jj); face = np.asarray(face)

    on_face = np.stack([
        jj == 0,
        ii == nx - 1,
        jj == ny - 1,
        ii == 0,
    ])
    n_faces = on_face.sum(axis=0)            # 1 on face interiors, 2 at corners

    ds = np.where(on_face[0] | on_face[2], hx, hy).astype(float)
    corner = n_faces == 2
    ds[corner] = 0.5 * (hx + hy)             # (hx+hy)/4 from each adjacent face

    nrm = np.zeros((ii.size, 2))
    nrm[:, 0] = np.where(on_face[1], 1.0, 0.0) - np.where(on_face[3], 1.0, 0.0)
    nrm[:, 1] = np.where(on_face[2], 1.0, 0.0) - np.where(on_face[0], 1.0, 0.0)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)

    for a in (ii, jj, face, ds, on_face, nrm):
        a.flags.writeable = False
    flat = jj * nx + ii
    flat.flags.writeable = False
    return _Walk(ii=ii, jj=jj, face=face, ds=ds, on_face=on_face, flat=flat, normal=nrm)


@dataclass(frozen=True, eq=False)
class BoundarySpec:
    """Boundary nodes with impedance values and the observed-subset mask.

    ``lam`` and ``gamma`` are per-node arrays in walk order.  Invariants:
    ``lam >= 0`` everywhere and ``lam > 0`` only where ``gamma`` is set.
    """

    grid: Grid2D
    lam: np.ndarray
    gamma: np.ndarray

    def __post_init__(self) -> None:
        walk = _walk(self.grid)
        lam = np.array(self.lam, dtype=float, copy=True)
        gamma = np.array(self.gamma, dtype=bool, copy=True)
        if lam.shape != walk.ii.shape or gamma.shape != walk.ii.shape:
            raise DimensionMismatchError(
                f"boundary arrays must have length {walk.ii.size} for this grid"
            )
        if lam.min() < 0.0:
            raise ValueError("impedance must be non-negative")
        if np.any((lam > 0.0) & ~gamma):
            raise ValueError("impedance may be positive only inside the observed set")
        lam.flags.writeable = False
        gamma.flags.writeable = False
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "gamma", gamma)

    # -- constructors ---------------------------------------------------

    @classmethod
    def uniform(cls, grid: Grid2D, lam: float = 1.0, observe_all: bool = True) -> "BoundarySpec":
        m = _walk(grid).ii.size
        if lam > 0.0 and not observe_all:
            raise ValueError("positive impedance requires the full boundary to be observed")
        return cls(grid, np.full(m, float(lam)), np.full(m, observe_all))

    @classmethod
    def from_specs(cls, grid: Grid2D, lambda_spec: str, gamma_spec: str | None = None) -> "BoundarySpec":
        """Build from the textual mini-language (see parse_lambda_spec)."""
        lam = parse_lambda_spec(grid, lambda_spec)
        gamma = lam > 0.0 if gamma_spec is None else parse_gamma_spec(grid, gamma_spec)
        return cls(grid, lam, gamma)

    # -- geometry passthrough -------------------------------------------

    @property
    def walk(self) -> _Walk:
        return _walk(self.grid)

    @property
    def n_nodes(self) -> int:
        return self.walk.ii.size

    @property
    def ii(self) -> np.ndarray:
        return self.walk.ii

    @property
    def jj(self) -> np.ndarray:
        return self.walk.jj

    @property
    def faces(self) -> np.ndarray:
        return self.walk.face

    @property
    def ds(self) -> np.ndarray:
        return self.walk.ds

    @property
    def flat_indices(self) -> np.ndarray:
        return self.walk.flat

    @property
    def normals(self) -> np.ndarray:
        return self.walk.normal

    @cached_property
    def positions(self) -> np.ndarray:
        """(M, 2) node coordinates in walk order."""
        g = self.grid
        pos = np.stack([g.origin[0] + g.hx * self.ii, g.origin[1] + g.hy * self.jj], axis=1)
        pos.flags.writeable = False
        return pos

    @cached_property
    def node_position_index(self) -> dict[tuple[int, int], int]:
        """(i, j) -> walk position, for restriction and ray lookups."""
        return {(int(i), int(j)): k for k, (i, j) in enumerate(zip(self.ii, self.jj))}

    @property
    def perimeter(self) -> float:
        return float(self.ds.sum())

    @property
    def lambda_ds(self) -> float:
        """Boundary integral of the impedance (plain arc length measure)."""
        return float(np.sum(self.lam * self.ds))

    def same_geometry(self, other: "BoundarySpec") -> bool:
        return self.grid == other.grid

    def compatible(self, other: "BoundarySpec") -> bool:
        return (self.grid == other.grid
                and np.array_equal(self.lam, other.lam)
                and np.array_equal(self.gamma, other.gamma))


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Space-time samples on the boundary: shape (nt+1, n_nodes).

    A trace is called gamma-supported when it vanishes identically outside
    the observed node set.
    """

    boundary: BoundarySpec
    times: TimeAxis
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True)
        want = (self.times.n_levels, self.boundary.n_nodes)
        if arr.shape != want:
            raise DimensionMismatchError(f"trace values must have shape {want}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("trace values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, boundary: BoundarySpec, times: TimeAxis) -> "BoundaryTrace":
        return cls(boundary, times, np.zeros((times.n_levels, boundary.n_nodes)))

    @property
    def gamma_supported(self) -> bool:
        return bool(np.all(self.values[:, ~self.boundary.gamma] == 0.0))

    def restricted_to_gamma(self) -> "BoundaryTrace":
        vals = self.values.copy()
        vals[:, ~self.boundary.gamma] = 0.0
        return BoundaryTrace(self.boundary, self.times, vals)

    def __add__(self, other: "BoundaryTrace") -> "BoundaryTrace":
        _require_same_axes(self, other)
        return BoundaryTrace(self.boundary, self.times, self.values + other.values)

    def __sub__(self, other: "BoundaryTrace") -> "BoundaryTrace":
        _require_same_axes(self, other)
        return BoundaryTrace(self.boundary, self.times, self.values - other.values)

    def __mul__(self, scalar: float) -> "BoundaryTrace":
        return BoundaryTrace(self.boundary, self.times, self.values * float(scalar))

    __rmul__ = __mul__


def _require_same_axes(a: BoundaryTrace, b: BoundaryTrace) -> None:
    if a.times != b.times or not a.boundary.compatible(b.boundary):
        raise DimensionMismatchError("traces live on different boundaries or time axes")


def inner_trace(a: BoundaryTrace, b: BoundaryTrace, med: MediumParams) -> float:
    """Space-time inner product with the 1/c^2 weight and arc-length measure.

    Trapezoidal end-weights in time; symmetric and bilinear.
    """
    _require_same_axes(a, b)
    if med.grid != a.boundary.grid:
        raise DimensionMismatchError("medium lives on a different grid")
    bnd = a.boundary
    inv_c2 = med.inv_c_squared.reshape(-1)[bnd.flat_indices]
    node_w = inv_c2 * bnd.ds
    wt = a.times.weights
    return float(np.sum((a.values * b.values) @ node_w * wt))


def trace_norm(a: BoundaryTrace, med: MediumParams) -> float:
    return float(np.sqrt(max(inner_trace(a, a, med), 0.0)))


def robin_functional(state: CauchyPair, bnd: BoundarySpec, med: MediumParams) -> float:
    """The conserved quantity of the zero-potential Robin evolution:
    weighted mean of the velocity plus the impedance-weighted boundary mean,

        integral ut / c^2 dV  +  integral lam * u dS.

    Constant in time along solutions when q == 0.
    """
    if state.grid != bnd.grid or state.grid != med.grid:
        raise DimensionMismatchError("state, boundary and medium must share a grid")
    one = ScalarField(state.grid, np.ones(state.grid.shape))
    vol = inner_omega(state.ut, one, med)
    u_b = state.u.flat[bnd.flat_indices]
    return vol + float(np.sum(bnd.lam * u_b * bnd.ds))


def compatibility_shift(state: CauchyPair, bnd: BoundarySpec, med: MediumParams) -> CauchyPair:
    """Shift ``u`` by a constant so the Robin functional of the state vanishes.

    Intended for the zero-potential case, where constants are invisible to
    the Dirichlet norm and this shift pins them down.  The velocity field is
    unchanged.  Raises if the impedance integral is zero (nothing to divide
    by; with a nonzero potential no shift is needed in the first place).
    """
    denom = bnd.lambda_ds
    if denom <= 0.0:
        raise DegenerateShiftError("impedance integrates to zero on the boundary")
    kappa = robin_functional(state, bnd, med) / denom
    shifted = ScalarField(state.grid, state.u.values - kappa)
    return CauchyPair(shifted, state.ut)


# ---------------------------------------------------------------------------
# Textual boundary specifications
#
#   lambda:  "full:V" | "faces:right,top:V" | "arc:right,0.25,0.75:V"
#   gamma:   same selectors without the trailing value
#
# Segments separated by ';' apply in order (later segments overwrite lambda,
# gamma segments accumulate as a union).  Arc bounds are fractions of the
# face length measured along the axis from the low corner; both endpoints
# are inclusive.
# ---------------------------------------------------------------------------


def _face_fraction(walk: _Walk, grid: Grid2D, face_id: int) -> np.ndarray:
    sel = walk.on_face[face_id]
    if face_id in (0, 2):
        frac = walk.ii / (grid.nx - 1)
    else:
        frac = walk.jj / (grid.ny - 1)
    return np.where(sel, frac, np.nan)


def _select(grid: Grid2D, selector: str) -> np.ndarray:
    walk = _walk(grid)
    m = walk.ii.size
    parts = selector.split(":")
    kind = parts[0].strip().lower()
    if kind == "full":
        if len(parts) != 1:
            raise ValueError(f"malformed selector {selector!r}")
        return np.ones(m, dtype=bool)
    if kind == "faces":
        if len(parts) != 2:
            raise ValueError(f"malformed selector {selector!r}")
        mask = np.zeros(m, dtype=bool)
        for name in parts[1].split(","):
            name = name.strip().lower()
            if name not in _FACE_ID:
                raise ValueError(f"unknown face {name!r}; expected one of {FACE_NAMES}")
            mask |= walk.on_face[_FACE_ID[name]]
        return mask
    if kind == "arc":
        if len(parts) != 2:
            raise ValueError(f"malformed selector {selector!r}")
        try:
            name, lo, hi = parts[1].split(",")
            lo_f, hi_f = float(lo), float(hi)
        except ValueError as exc:
            raise ValueError(f"malformed arc selector {selector!r}") from exc
        if name.strip().lower() not in _FACE_ID:
            raise ValueError(f"unknown face {name!r}")
        if not (0.0 <= lo_f <= hi_f <= 1.0):
            raise ValueError("arc bounds must satisfy 0 <= start <= end <= 1")
        frac = _face_fraction(walk, grid, _FACE_ID[name.strip().lower()])
        with np.errstate(invalid="ignore"):
            return (frac >= lo_f - 1e-12) & (frac <= hi_f + 1e-12)
    raise ValueError(f"unknown selector kind {kind!r}")


def _split_value(segment: str) -> tuple[str, float]:
    head, _, tail = segment.rpartition(":")
    if not head:
        raise ValueError(f"impedance segment {segment!r} is missing a value")
    try:
        return head, float(tail)
    except ValueError as exc:
        raise ValueError(f"impedance segment {segment!r} has a non-numeric value") from exc


def parse_lambda_spec(grid: Grid2D, spec: str) -> np.ndarray:
    """Per-node impedance from a textual spec; see module comment for syntax."""
    lam = np.zeros(_walk(grid).ii.size)
    for segment in spec.split(";"):
        segment = segment.strip()
        if not segment:
            continue
        selector, value = _split_value(segment)
        if value < 0.0:
            raise ValueError("impedance values must be non-negative")
        lam[_select(grid, selector)] = value
    return lam


def parse_gamma_spec(grid: Grid2D, spec: str) -> np.ndarray:
    """Observed-node mask from a textual spec (union of selectors)."""
    gamma = np.zeros(_walk(grid).ii.size, dtype=bool)
    for segment in spec.split(";"):
        segment = segment.strip()
        if not segment:
            continue
        gamma |= _select(grid, segment)
    return gamma
