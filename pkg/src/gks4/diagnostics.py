"""Scalar time series and derived fields for turbulence and shock cases."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .grid import Field3D
from .kinetics import GasModel, pressure


@dataclass
class DiagnosticsRecord:
    time: float
    kinetic_energy: float
    dissipation: float
    rho_rms: float
    skewness: float
    rho_min: float
    rho_max: float
    p_min: float
    p_max: float

    def as_row(self):
        return asdict(self)


def _mean(a):
    # fixed-order reduction: numpy's pairwise sum over a contiguous copy
    return float(np.sum(np.ascontiguousarray(a), dtype=np.float64) / a.size)


def kinetic_energy(fld: Field3D, rho0: float = 1.0) -> float:
    """Volume average of rho |u|^2 / 2, divided by ``rho0``."""
    q = fld.interior
    return _mean(0.5 * (q[1] ** 2 + q[2] ** 2 + q[3] ** 2) / q[0]) / rho0


def dissipation_rate(times, energies):
    """-dE/dt by centred differences on (possibly uneven) samples, one-sided at the ends."""
    t = np.asarray(times, dtype=float)
    e = np.asarray(energies, dtype=float)
    if t.size < 3:
        raise ValueError("need at least 3 samples to differentiate")
    return -np.gradient(e, t, edge_order=2)


def density_rms(fld: Field3D) -> float:
    rho = fld.interior[0]
    return float(np.sqrt(_mean((rho - _mean(rho)) ** 2)))


def central_derivative(a, axis: int, h: float):
    """Fourth-order central difference of a periodic array along ``axis``."""
    return (8.0 * (np.roll(a, -1, axis) - np.roll(a, 1, axis))
            - (np.roll(a, -2, axis) - np.roll(a, 2, axis))) / (12.0 * h)


def velocity_gradient(fld: Field3D):
    """G[i, j] = d u_i / d x_j on interior cells (periodic differencing)."""
    q = fld.interior
    vel = q[1:4] / q[0]
    return np.array([[central_derivative(vel[i], j, fld.grid.spacing[j]) for j in range(3)]
                     for i in range(3)])


def skewness(fld: Field3D, averaged: bool = False) -> float:
    """Sum over i of <(du_i/dx_i)^3> / <(du_i/dx_i)^2>^{3/2}; ``averaged`` divides by 3."""
    q = fld.interior
    vel = q[1:4] / q[0]
    total = 0.0
    for i in range(3):
        d = central_derivative(vel[i], i, fld.grid.spacing[i])
        m2 = _mean(d * d)
        total += _mean(d ** 3) / m2 ** 1.5 if m2 > 0 else 0.0
    return total / 3.0 if averaged else total


def q_criterion(fld: Field3D):
    """Per-cell Q = (|Omega|^2 - |S|^2) / 2 and the velocity magnitude."""
    G = velocity_gradient(fld)
    S = 0.5 * (G + G.transpose(1, 0, 2, 3, 4))
    W = 0.5 * (G - G.transpose(1, 0, 2, 3, 4))
    Q = 0.5 * (np.sum(W * W, axis=(0, 1)) - np.sum(S * S, axis=(0, 1)))
    q = fld.interior
    speed = np.sqrt(q[1] ** 2 + q[2] ** 2 + q[3] ** 2) / q[0]
    return Q, speed


def line_cut(fld: Field3D, axis: int, fixed, gamma: float | None = None, gas=None):
    """(coordinate, rho, u_axis, p) along ``axis`` through the cells nearest to ``fixed``.

    ``fixed`` gives the two remaining coordinates in increasing axis order.
    """
    grid = fld.grid
    others = [a for a in range(3) if a != axis]
    idx = [slice(None)] * 3
    for a, x in zip(others, fixed):
        if not grid.lo[a] <= x <= grid.hi[a]:
            raise ValueError(f"cut coordinate {x} outside the domain on axis {a}")
        i = int(np.floor((x - grid.lo[a]) / grid.spacing[a]))
        idx[a] = min(max(i, 0), grid.shape[a] - 1)
    q = fld.interior[(slice(None),) + tuple(idx)]
    if gas is None:
        gas = GasModel(gamma=gamma or 1.4)
    return np.stack([grid.centers(axis), q[0], q[1 + axis] / q[0], pressure(q, gas)], axis=1)


def record(fld: Field3D, gas, rho0: float = 1.0, dissipation: float = float("nan"),
           averaged_skewness: bool = False) -> DiagnosticsRecord:
    """Snapshot of the scalar diagnostics; skewness assumes periodic differencing."""
    q = fld.interior
    p = pressure(q, gas)
    return DiagnosticsRecord(
        time=fld.time,
        kinetic_energy=kinetic_energy(fld, rho0),
        dissipation=dissipation,
        rho_rms=density_rms(fld),
        skewness=skewness(fld, averaged_skewness),
        rho_min=float(q[0].min()), rho_max=float(q[0].max()),
        p_min=float(p.min()), p_max=float(p.max()),
    )
