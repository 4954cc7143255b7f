"""Uniform Cartesian grids, ghosted conserved fields and boundary conditions."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .kinetics import GasModel

GHOST = 3
FACES = ("xlo", "xhi", "ylo", "yhi", "zlo", "zhi")


@dataclass(frozen=True)
class GridSpec:
    shape: tuple
    lo: tuple = (0.0, 0.0, 0.0)
    hi: tuple = (1.0, 1.0, 1.0)
    ghost: int = GHOST

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.shape) != 3 or min(self.shape) < 1:
            raise ValueError(f"bad grid shape {self.shape}")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("domain upper bounds must exceed lower bounds")

    @property
    def spacing(self):
        return tuple((h - l) / n for l, h, n in zip(self.lo, self.hi, self.shape))

    @property
    def cell_volume(self):
        dx, dy, dz = self.spacing
        return dx * dy * dz

    @property
    def ghosted_shape(self):
        return tuple(n + 2 * self.ghost for n in self.shape)

    def centers(self, axis: int, ghosts: bool = False):
        n = self.shape[axis]
        d = self.spacing[axis]
        g = self.ghost if ghosts else 0
        return self.lo[axis] + (np.arange(-g, n + g) + 0.5) * d

    def mesh(self):
        return np.meshgrid(*(self.centers(a) for a in range(3)), indexing="ij")

    @property
    def interior(self):
        g = self.ghost
        return (slice(None),) + tuple(slice(g, g + n) for n in self.shape)


class Field3D:
    """Cell-averaged conserved variables on a ghosted grid, shape (5, X, Y, Z)."""

    def __init__(self, grid: GridSpec, q=None, time: float = 0.0):
        self.grid = grid
        self.q = np.zeros((5,) + grid.ghosted_shape) if q is None else np.ascontiguousarray(q, dtype=float)
        if self.q.shape != (5,) + grid.ghosted_shape:
            raise ValueError(f"field shape {self.q.shape} does not match grid {grid.ghosted_shape}")
        self.time = float(time)

    @classmethod
    def from_interior(cls, grid: GridSpec, interior, time: float = 0.0):
        f = cls(grid, time=time)
        f.interior[...] = interior
        return f

    @property
    def interior(self):
        return self.q[self.grid.interior]

    def copy(self):
        return Field3D(self.grid, self.q.copy(), self.time)

    def totals(self):
        """Volume integrals of the five conserved variables (fixed-order sums)."""
        q = self.interior
        return np.array([np.sum(q[c], dtype=float) for c in range(5)]) * self.grid.cell_volume


# -- boundary conditions ---------------------------------------------------------


@dataclass(frozen=True)
class Periodic:
    kind: str = "periodic"


@dataclass(frozen=True)
class Symmetry:
    """Mirror with negated normal momentum.

    With ``hydrostatic=True`` and gravity along the face normal, the ghost
    pressure is extended linearly with slope ``rho * g`` instead of mirrored.
    """

    hydrostatic: bool = False
    kind: str = "symmetry"


@dataclass(frozen=True)
class Outflow:
    kind: str = "outflow"


@dataclass(frozen=True)
class IsothermalWall:
    velocity: tuple = (0.0, 0.0, 0.0)
    temperature: float = 1.0
    kind: str = "wall"


@dataclass
class BoundarySpec:
    faces: dict = dc_field(default_factory=lambda: {f: Periodic() for f in FACES})

    def __post_init__(self):
        missing = set(FACES) - set(self.faces)
        if missing:
            raise ValueError(f"boundary faces not specified: {sorted(missing)}")
        for a in "xyz":
            lo, hi = self.faces[a + "lo"], self.faces[a + "hi"]
            if isinstance(lo, Periodic) != isinstance(hi, Periodic):
                raise ValueError(f"periodic boundary on {a} must be set on both faces")

    @classmethod
    def uniform(cls, bc):
        return cls({f: bc for f in FACES})

    def periodic_axes(self):
        return tuple(isinstance(self.faces["xyz"[a] + "lo"], Periodic) for a in range(3))


def _sl(axis, s):
    idx = [slice(None)] * 4
    idx[axis + 1] = s
    return tuple(idx)


def _wall_ghost(src, bc, gas: GasModel):
    rho = src[0]
    vel = src[1:4] / rho
    kin = 0.5 * rho * (vel ** 2).sum(axis=0)
    p = (gas.gamma - 1.0) * (src[4] - kin)
    T = p / rho
    Tw = bc.temperature
    Tg = np.maximum(2.0 * Tw - T, 0.1 * Tw)
    rho_g = p / Tg
    vel_g = 2.0 * np.asarray(bc.velocity, dtype=float).reshape(3, *([1] * vel[0].ndim)) - vel
    out = np.empty_like(src)
    out[0] = rho_g
    out[1:4] = rho_g * vel_g
    out[4] = p / (gas.gamma - 1.0) + 0.5 * rho_g * (vel_g ** 2).sum(axis=0)
    return out


def _fill_side(q, axis, side, bc, grid: GridSpec, gas: GasModel, gravity):
    g = grid.ghost
    n = grid.shape[axis]
    if side == "lo":
        ghost_idx = [g - 1 - k for k in range(g)]   # nearest ghost first
        src_idx = [g + k for k in range(g)]
        sign = -1.0
    else:
        ghost_idx = [g + n + k for k in range(g)]
        src_idx = [g + n - 1 - k for k in range(g)]
        sign = 1.0

    if isinstance(bc, Periodic):
        if side == "lo":
            q[_sl(axis, slice(0, g))] = q[_sl(axis, slice(n, n + g))]
        else:
            q[_sl(axis, slice(g + n, 2 * g + n))] = q[_sl(axis, slice(g, 2 * g))]
        return
    if isinstance(bc, Outflow):
        for gi in ghost_idx:
            q[_sl(axis, gi)] = q[_sl(axis, src_idx[0])]
        return

    d = grid.spacing[axis]
    for k, (gi, si) in enumerate(zip(ghost_idx, src_idx)):
        src = q[_sl(axis, si)]
        if isinstance(bc, Symmetry):
            out = src.copy()
            out[1 + axis] = -src[1 + axis]
            if bc.hydrostatic and gravity is not None and gravity[axis] != 0.0:
                rho = src[0]
                kin = 0.5 * (src[1] ** 2 + src[2] ** 2 + src[3] ** 2) / rho
                p = (gas.gamma - 1.0) * (src[4] - kin)
                # ghost centre sits (2k+1) cells beyond the wall from its mirror
                p_g = p + rho * gravity[axis] * sign * (2 * k + 1) * d
                out[4] = p_g / (gas.gamma - 1.0) + kin
            q[_sl(axis, gi)] = out
        elif isinstance(bc, IsothermalWall):
            # edge ghosts of the other axes are still empty on the first pass
            with np.errstate(invalid="ignore", divide="ignore"):
                q[_sl(axis, gi)] = _wall_ghost(src, bc, gas)
        else:
            raise ValueError(f"unknown boundary condition {bc!r}")


MIN_CELLS = 5


def check_grid(grid: GridSpec, bc: BoundarySpec):
    """Non-periodic axes need enough cells for the mirrored stencils."""
    for axis, periodic in enumerate(bc.periodic_axes()):
        if not periodic and grid.shape[axis] < MIN_CELLS:
            raise ValueError(f"axis {'xyz'[axis]} has {grid.shape[axis]} cells; "
                             f"non-periodic boundaries need at least {MIN_CELLS}")


def fill_ghosts(field: Field3D, bc: BoundarySpec, gas: GasModel, gravity=None):
    """Fill all ghost layers, axis by axis so edges and corners are populated."""
    check_grid(field.grid, bc)
    for axis in range(3):
        a = "xyz"[axis]
        for side in ("lo", "hi"):
            _fill_side(field.q, axis, side, bc.faces[a + side], field.grid, gas, gravity)
    return field


def gravity_source(q, gravity, L=None):
    """Gravity source S = (0, rho g, m.g) and, given the operator L, its time derivative.

    ``q`` and ``L`` are (5, ...) arrays of conserved states and their rates
    (``L`` already including S).
    """
    g = np.asarray(gravity, dtype=float)
    S = np.zeros_like(q)
    for a in range(3):
        S[1 + a] = q[0] * g[a]
    S[4] = q[1] * g[0] + q[2] * g[1] + q[3] * g[2]
    if L is None:
        return S
    dS = np.zeros_like(q)
    for a in range(3):
        dS[1 + a] = L[0] * g[a]
    dS[4] = L[1] * g[0] + L[2] * g[1] + L[3] * g[2]
    return S, dS
