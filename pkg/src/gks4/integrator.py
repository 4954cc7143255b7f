"""Two-stage fourth-order time stepping on top of the gas-kinetic face fluxes.

Each face flux is evaluated as a linear function of time, F0 + F1 t, fitted
to its exact integrals over [0, dt] and [0, dt/2].  The semi-discrete
operator L and its time derivative follow by summing face contributions,
and the update is

    Q*    = Q + dt/2 L(Q) + dt^2/8 dL(Q)
    Q^n+1 = Q + dt L(Q) + dt^2/6 (dL(Q) + 2 dL(Q*)).
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .grid import BoundarySpec, Field3D, IsothermalWall, Symmetry, fill_ghosts, gravity_source
from .kinetics import GasModel, InvalidStateError, is_valid, pressure
from .flux import FaceFluxPair
from .reconstruction import AXIS_ORDER, ReconConfig, face_points, rotated_view, unrotate_faces

# faces x tangential lines processed per reconstruction batch
CHUNK_LINES = 40000


@dataclass
class Scheme:
    """Everything the step needs besides the field."""

    gas: GasModel
    bc: BoundarySpec
    recon: ReconConfig = field(default_factory=ReconConfig)
    cfl: float = 0.4
    gravity: tuple | None = None
    backend: str | None = None
    retry_half_dt: bool = False

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")


@dataclass
class SpatialOperator:
    L: np.ndarray
    dL: np.ndarray
    fallbacks: int = 0


@dataclass
class StepStats:
    dt: float
    rho_min: float
    rho_max: float
    p_min: float
    p_max: float
    fallbacks: int
    wall_time: float


def compute_dt(fld: Field3D, cfl: float, gas: GasModel) -> float:
    q = fld.interior
    if not np.all(np.isfinite(q)):
        raise InvalidStateError("non-finite state in field")
    rho = q[0]
    vel = q[1:4] / rho
    p = pressure(q, gas)
    c = np.sqrt(gas.gamma * p / rho)
    rate = np.zeros_like(rho)
    for a, d in enumerate(fld.grid.spacing):
        rate += (np.abs(vel[a]) + c) / d
    if gas.viscous:
        nu = gas.mu(p / rho) / rho
        rate += 2.0 * nu * sum(1.0 / d ** 2 for d in fld.grid.spacing)
    return float(cfl / np.max(rate))


def _flatten(a, lead):
    return np.ascontiguousarray(a.reshape(lead + (-1,)))


def _face_integrals(q, grid, axis: int, dt: float, scheme: Scheme):
    # yields (face offset, full, half, fallbacks) per chunk, Gauss-averaged, face frame
    sp = AXIS_ORDER[axis]
    rv = rotated_view(q, axis)
    widths = tuple(grid.spacing[a] for a in sp)
    n_f = grid.shape[axis] + 1
    n1, n2 = grid.shape[sp[1]], grid.shape[sp[2]]
    per = max(1, CHUNK_LINES // ((n1 + 4) * (n2 + 4)))
    force = None
    if scheme.gravity is not None and np.any(np.asarray(scheme.gravity) != 0.0):
        force = tuple(float(scheme.gravity[a]) for a in sp)
    for f0 in range(0, n_f, per):
        nf = min(per, n_f - f0)
        fp = face_points(rv, f0, nf, widths, scheme.recon, scheme.gas)
        full, half = backend.flux_batch(
            _flatten(fp.left, (5,)), _flatten(fp.left_slopes, (3, 5)),
            _flatten(fp.right, (5,)), _flatten(fp.right_slopes, (3, 5)),
            _flatten(fp.center_slopes, (3, 5)), dt, scheme.gas, scheme.backend, force)
        shape = (5, nf, n1, 2, n2, 2)
        # 2x2 Gauss rule, weights 1/4 each
        full = full.reshape(shape).mean(axis=(3, 5))
        half = half.reshape(shape).mean(axis=(3, 5))
        yield f0, full, half, int(np.count_nonzero(fp.fallback))


def face_flux_integrals(fld: Field3D, axis: int, dt: float, scheme: Scheme) -> FaceFluxPair:
    """Time integrals over [0, dt] and [0, dt/2] of the total flux through every face normal to ``axis``.

    Gauss-averaged and multiplied by the face area; global momentum order,
    shape (5, ...) with n+1 faces along ``axis``.  Ghosts must be filled.
    """
    grid = fld.grid
    sp = AXIS_ORDER[axis]
    area = grid.spacing[sp[1]] * grid.spacing[sp[2]]
    n_f = grid.shape[axis] + 1
    full = np.empty((5, n_f, grid.shape[sp[1]], grid.shape[sp[2]]))
    half = np.empty_like(full)
    for f0, fu, ha, _ in _face_integrals(fld.q, grid, axis, dt, scheme):
        full[:, f0:f0 + fu.shape[1]] = fu
        half[:, f0:f0 + ha.shape[1]] = ha
    return FaceFluxPair(area * unrotate_faces(full, axis), area * unrotate_faces(half, axis))


def face_flux_coefficients(q, grid, axis: int, dt: float, scheme: Scheme):
    """(F0, F1) per unit area on every face normal to ``axis`` (global components).

    Returns arrays of shape (5, ...) with the ``axis`` dimension of length
    n+1, plus the number of Gauss points that fell back to first order.
    """
    sp = AXIS_ORDER[axis]
    n_f = grid.shape[axis] + 1
    F0 = np.empty((5, n_f, grid.shape[sp[1]], grid.shape[sp[2]]))
    F1 = np.empty_like(F0)
    fallbacks = 0
    for f0, full, half, nfb in _face_integrals(q, grid, axis, dt, scheme):
        nf = full.shape[1]
        F0[:, f0:f0 + nf] = (4.0 * half - full) / dt
        F1[:, f0:f0 + nf] = 4.0 * (full - 2.0 * half) / (dt * dt)
        fallbacks += nfb
    return unrotate_faces(F0, axis), unrotate_faces(F1, axis), fallbacks


def _close_walls(F, axis: int, bc: BoundarySpec):
    """Impermeable boundary faces carry no mass flux.

    A symmetry face passes only normal momentum (mirror data gives exactly
    that, except where the body force breaks the mirror); a no-slip wall
    keeps its shear and heat fluxes.
    """
    for side, idx in (("lo", 0), ("hi", -1)):
        face = bc.faces["xyz"[axis] + side]
        sl = [slice(None)] * 4
        sl[axis + 1] = idx
        if isinstance(face, Symmetry):
            keep = F[1 + axis][tuple(sl[1:])].copy()
            F[tuple(sl)] = 0.0
            F[1 + axis][tuple(sl[1:])] = keep
        elif isinstance(face, IsothermalWall):
            F[0][tuple(sl[1:])] = 0.0


def spatial_operator(fld: Field3D, dt: float, scheme: Scheme) -> SpatialOperator:
    """L and dL/dt for every interior cell; ghosts must already be filled."""
    grid = fld.grid
    L = np.zeros((5,) + grid.shape)
    dL = np.zeros((5,) + grid.shape)
    fallbacks = 0
    for axis in range(3):
        F0, F1, nfb = face_flux_coefficients(fld.q, grid, axis, dt, scheme)
        fallbacks += nfb
        for F in (F0, F1):
            _close_walls(F, axis, scheme.bc)
        d = grid.spacing[axis]
        hi = [slice(None)] * 4
        lo = [slice(None)] * 4
        hi[axis + 1] = slice(1, None)
        lo[axis + 1] = slice(0, -1)
        L -= (F0[tuple(hi)] - F0[tuple(lo)]) / d
        dL -= (F1[tuple(hi)] - F1[tuple(lo)]) / d
    if scheme.gravity is not None and np.any(np.asarray(scheme.gravity) != 0.0):
        q = fld.interior
        S = gravity_source(q, scheme.gravity)
        L += S
        _, dS = gravity_source(q, scheme.gravity, L)
        dL += dS
    return SpatialOperator(L, dL, fallbacks)


def _checked(q, what):
    bad = ~is_valid(q)
    if np.any(bad):
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        raise InvalidStateError(f"{what} violates positivity at interior cell {idx}", idx)
    return q


def stage_mid(Qn, op: SpatialOperator, dt: float):
    return Qn + 0.5 * dt * op.L + 0.125 * dt * dt * op.dL


def stage_final(Qn, op_n: SpatialOperator, op_mid: SpatialOperator, dt: float):
    return Qn + dt * op_n.L + dt * dt / 6.0 * (op_n.dL + 2.0 * op_mid.dL)


def step(fld: Field3D, scheme: Scheme, dt: float | None = None):
    """Advance one S2O4 step in place; returns the field and its StepStats.

    With ``scheme.retry_half_dt`` a positivity failure is retried once as
    two steps of dt/2 before the error propagates.
    """
    t0 = _time.perf_counter()
    fill_ghosts(fld, scheme.bc, scheme.gas, scheme.gravity)
    if dt is None:
        dt = compute_dt(fld, scheme.cfl, scheme.gas)
    if not scheme.retry_half_dt:
        return _step(fld, scheme, dt, t0)
    saved = fld.copy()
    try:
        return _step(fld, scheme, dt, t0)
    except InvalidStateError:
        fld.q[...] = saved.q
        fld.time = saved.time
        _, first = _step(fld, scheme, 0.5 * dt, t0)
        fill_ghosts(fld, scheme.bc, scheme.gas, scheme.gravity)
        _, second = _step(fld, scheme, 0.5 * dt, t0)
        second.dt = dt
        second.fallbacks += first.fallbacks
        return fld, second


def _step(fld: Field3D, scheme: Scheme, dt: float, t0: float):
    gas = scheme.gas
    Qn = fld.interior.copy()
    op_n = spatial_operator(fld, dt, scheme)

    mid = fld.copy()
    mid.interior[...] = _checked(stage_mid(Qn, op_n, dt), "intermediate state")
    fill_ghosts(mid, scheme.bc, gas, scheme.gravity)
    op_mid = spatial_operator(mid, dt, scheme)

    fld.interior[...] = _checked(stage_final(Qn, op_n, op_mid, dt), "updated state")
    fld.time += dt
    q = fld.interior
    p = pressure(q, gas)
    stats = StepStats(dt, float(q[0].min()), float(q[0].max()), float(p.min()), float(p.max()),
                      op_n.fallbacks + op_mid.fallbacks, _time.perf_counter() - t0)
    return fld, stats


def advance(fld: Field3D, scheme: Scheme, t_end: float, max_steps: int | None = None, callback=None):
    """Step until ``t_end`` (last step clipped); returns the list of StepStats."""
    history = []
    while fld.time < t_end * (1 - 1e-14):
        if max_steps is not None and len(history) >= max_steps:
            break
        fill_ghosts(fld, scheme.bc, scheme.gas, scheme.gravity)
        dt = min(compute_dt(fld, scheme.cfl, scheme.gas), t_end - fld.time)
        _, st = step(fld, scheme, dt)
        history.append(st)
        if callback is not None:
            callback(fld, st)
    return history
