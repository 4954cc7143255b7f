"""Second-order time-dependent gas-kinetic flux at a face quadrature point.

Everything here works in the face-local frame: the first velocity component
is the face normal, slopes are stacked as (d/dn, d/dt1, d/dt2).  The
distribution at the interface is

    f = (1 - e) g0 + ((t + tau) e - tau) (abar . u) g0 + (t - tau + tau e) Abar g0
        + e * g_l [1 - (tau + t)(a_l . u) - tau A_l] H(u)
        + e * g_r [1 - (tau + t)(a_r . u) - tau A_r] (1 - H(u)),

with ``e = exp(-t / tau_num)``.  Its flux moments split into six time
weights times six velocity-space 5-vectors, so fluxes at any time, and
their exact time integrals, are cheap once the vectors are known.

The left state populates particles moving to the right (``u > 0``) and vice
versa; this is the physically consistent assignment of the two
half-Maxwellians.

An optional uniform body force per unit mass ``G`` (face frame) enters the
kinetic equation as ``G . grad_u f``.  It adds ``(0, G, U . G)`` to the
compatibility condition for every ``A`` and the term ``G . grad_u g`` next to
``a . u g`` in the first-order parts, so a state in hydrostatic balance
carries no flux evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinetics import (
    GasModel,
    InvalidStateError,
    PrimitiveState,
    contract,
    is_valid,
    moment_set,
    prim_from_cons,
    psi_moments,
    solve_micro_slope,
)

N_WEIGHTS = 6


@dataclass
class InterfaceData:
    """Point values (conserved, face frame) and gradients at one or many points."""

    left: np.ndarray
    left_slopes: np.ndarray
    right: np.ndarray
    right_slopes: np.ndarray
    center: np.ndarray
    center_slopes: np.ndarray


@dataclass
class AssembledInterface:
    data: InterfaceData
    prim_left: PrimitiveState
    prim_right: PrimitiveState
    prim_center: PrimitiveState
    slopes: dict
    time_slopes: dict
    moments: np.ndarray


@dataclass
class FaceFluxPair:
    full: np.ndarray
    half: np.ndarray


def collision_time(gas: GasModel, p_left, p_right, center: PrimitiveState, dt):
    """Physical and numerical collision times ``(tau, tau_num)``."""
    jump = np.abs(p_left - p_right) / (p_left + p_right)
    if not gas.viscous:
        tau = (gas.tau_eps + gas.tau_c * jump) * dt
        return tau, tau
    tau = gas.mu(center.temperature) / center.p
    return tau, tau + gas.tau_c * jump * dt


def interface_equilibrium(left, right, gas: GasModel):
    """Conserved state of ``g_l H(u) + g_r (1 - H(u))``."""
    pl = prim_from_cons(left, gas)
    pr = prim_from_cons(right, gas)
    w0 = (pl.rho * psi_moments(moment_set(pl, gas, +1), 0, 0, 0)
          + pr.rho * psi_moments(moment_set(pr, gas, -1), 0, 0, 0))
    if not np.all(is_valid(w0)):
        raise InvalidStateError("interface equilibrium violates positivity")
    return w0


def force_moments(prim, force):
    """<G . grad_u g psi> / rho with the sign of a source: (0, G, U . G)."""
    G = np.asarray(force, dtype=float)
    vel = np.asarray(prim.vel)
    zero = np.zeros_like(prim.rho)
    work = G[0] * vel[0] + G[1] * vel[1] + G[2] * vel[2]
    return np.stack([zero, zero + G[0], zero + G[1], zero + G[2], work])


def force_flux_moments(ms, force):
    """<G . grad_u (u psi)>, density-normalised; minus the normal flux of ``G . grad_u g``."""
    G = np.asarray(force, dtype=float)
    u, v, w = ms.u, ms.v, ms.w
    m1 = u[1] * v[0] * w[0]
    extra = np.stack([np.zeros_like(m1), G[0] * m1, G[1] * m1, G[2] * m1,
                      G[0] * u[2] * v[0] * w[0] + G[1] * u[1] * v[1] * w[0] + G[2] * u[1] * v[0] * w[1]])
    return G[0] * psi_moments(ms, 0, 0, 0) + extra


def _side_slopes(prim, slopes, ms, gas, force=None):
    a = [solve_micro_slope(prim, slopes[n] / prim.rho, gas) for n in range(3)]
    rhs = -(contract(ms, a[0], 1, 0, 0) + contract(ms, a[1], 0, 1, 0) + contract(ms, a[2], 0, 0, 1))
    if force is not None:
        rhs = rhs + force_moments(prim, force)
    A = solve_micro_slope(prim, rhs, gas)
    return a, A


def _flux_vectors(ms, rho, a, A, force=None):
    plain = rho * psi_moments(ms, 1, 0, 0)
    spatial = rho * (contract(ms, a[0], 2, 0, 0) + contract(ms, a[1], 1, 1, 0) + contract(ms, a[2], 1, 0, 1))
    if force is not None:
        spatial = spatial - rho * force_flux_moments(ms, force)
    temporal = rho * contract(ms, A, 1, 0, 0)
    return plain, spatial, temporal


def assemble_interface(left, left_slopes, right, right_slopes, center_slopes, gas: GasModel,
                       force=None):
    """Micro slopes and flux moment vectors at interface points.

    ``moments`` has shape (6, 5, ...): equilibrium, equilibrium-spatial,
    equilibrium-temporal, and the summed left/right free-transport parts
    (plain, spatial, temporal), matching the six time weights.  ``force`` is
    a uniform acceleration in the face frame.
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    pl = prim_from_cons(left, gas)
    pr = prim_from_cons(right, gas)
    ms_l = moment_set(pl, gas)
    ms_r = moment_set(pr, gas)
    hl = moment_set(pl, gas, +1)
    hr = moment_set(pr, gas, -1)
    w0 = pl.rho * psi_moments(hl, 0, 0, 0) + pr.rho * psi_moments(hr, 0, 0, 0)
    if not np.all(is_valid(w0)):
        raise InvalidStateError("interface equilibrium violates positivity")
    p0 = prim_from_cons(w0, gas)
    ms_0 = moment_set(p0, gas)

    if force is not None and not np.any(np.asarray(force) != 0.0):
        force = None
    a_l, A_l = _side_slopes(pl, np.asarray(left_slopes), ms_l, gas, force)
    a_r, A_r = _side_slopes(pr, np.asarray(right_slopes), ms_r, gas, force)
    a_0, A_0 = _side_slopes(p0, np.asarray(center_slopes), ms_0, gas, force)

    e0 = _flux_vectors(ms_0, p0.rho, a_0, A_0, force)
    lf = _flux_vectors(hl, pl.rho, a_l, A_l, force)
    rf = _flux_vectors(hr, pr.rho, a_r, A_r, force)
    moments = np.stack([e0[0], e0[1], e0[2], lf[0] + rf[0], lf[1] + rf[1], lf[2] + rf[2]])

    data = InterfaceData(left, np.asarray(left_slopes), right, np.asarray(right_slopes),
                         w0, np.asarray(center_slopes))
    return AssembledInterface(
        data, pl, pr, p0,
        slopes={"l": np.stack(a_l), "r": np.stack(a_r), "0": np.stack(a_0)},
        time_slopes={"l": A_l, "r": A_r, "0": A_0},
        moments=moments,
    )


# -- time dependence ---------------------------------------------------------


def _one_minus_exp_series(x):
    """1 - e^-x (1 + x), accurate for small x."""
    big = x > 0.1
    xs = np.where(big, 0.0, x)
    term = xs * xs / 2.0
    total = term.copy()
    for n in range(3, 12):
        term = -term * xs / n * (n - 1) / (n - 2)
        total += term
    with np.errstate(over="ignore"):
        direct = 1.0 - np.exp(-x) * (1.0 + x)
    return np.where(big, direct, total)


def _exp_minus_one_plus_x(x):
    """e^-x - 1 + x, accurate for small x."""
    return np.expm1(-x) + x if np.all(x > 0.1) else np.where(
        x > 0.1, np.expm1(-x) + x,
        x * x * (0.5 - x / 6.0 * (1.0 - x / 4.0 * (1.0 - x / 5.0 * (1.0 - x / 6.0 * (1.0 - x / 7.0 * (1.0 - x / 8.0)))))))


def time_weights(t, tau, tau_num):
    """The six instantaneous time factors of the interface distribution."""
    t, tau, tau_num = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, tau, tau_num)))
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.where(tau_num > 0, np.exp(-t / np.where(tau_num > 0, tau_num, 1.0)), 0.0)
    return np.stack([
        1.0 - e,
        (t + tau) * e - tau,
        t - tau + tau * e,
        e,
        -(t + tau) * e,
        -tau * e,
    ])


def integrated_time_weights(delta, tau, tau_num):
    """Exact integrals over [0, delta] of :func:`time_weights`."""
    delta, tau, tau_num = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (delta, tau, tau_num)))
    pos = tau_num > 0
    safe = np.where(pos, tau_num, 1.0)
    x = np.where(pos, delta / safe, 0.0)
    # int e, int t e, and delta - int e
    e1 = np.where(pos, -safe * np.expm1(-x), 0.0)
    et = np.where(pos, safe * safe * _one_minus_exp_series(x), 0.0)
    q1 = np.where(pos, safe * _exp_minus_one_plus_x(x), delta)
    return np.stack([
        q1,
        et - tau * q1,
        0.5 * delta * delta - tau * q1,
        e1,
        -(et + tau * e1),
        -tau * e1,
    ])


def _combine(weights, moments):
    return np.einsum("k...,kc...->c...", weights, moments)


def instantaneous_flux(asm: AssembledInterface, t, tau, tau_num):
    return _combine(time_weights(t, tau, tau_num), asm.moments)


def time_integrated_flux(asm: AssembledInterface, delta, tau, tau_num):
    return _combine(integrated_time_weights(delta, tau, tau_num), asm.moments)


def prandtl_correction(flux, equilibrium_flux, velocity, pr: float):
    """Rescale the kinetic heat flux by 1/Pr.

    ``equilibrium_flux`` is the part of ``flux`` carried by the evolving
    equilibrium ``g0 + t Abar g0`` (or its time integral); the rest is the
    non-equilibrium part whose heat flux, taken in the frame of
    ``velocity``, is amplified by ``1/pr - 1`` in the energy component.
    """
    flux = np.array(flux, dtype=float, copy=True)
    if pr == 1.0:
        return flux
    d = flux - np.asarray(equilibrium_flux)
    U, V, W = velocity
    q = d[4] - U * d[1] - V * d[2] - W * d[3] + 0.5 * (U * U + V * V + W * W) * d[0]
    flux[4] += (1.0 / pr - 1.0) * q
    return flux


def flux_time_coefficients(pair: FaceFluxPair, dt):
    """Linear-in-time flux (F0, dF/dt) matching the two integrals."""
    f0 = (4.0 * pair.half - pair.full) / dt
    f1 = 4.0 * (pair.full - 2.0 * pair.half) / (dt * dt)
    return f0, f1


def gks_flux_batch(wl, dl, wr, dr, d0, dt, gas: GasModel, force=None):
    """Time integrals of the flux over [0, dt] and [0, dt/2] at many points.

    Inputs are face-frame arrays: ``wl, wr`` of shape (5, N), slopes of
    shape (3, 5, N), ``force`` an optional face-frame acceleration.  This is
    the pure-numpy path; the compiled kernel has the same semantics.
    """
    asm = assemble_interface(wl, dl, wr, dr, d0, gas, force)
    tau, tau_num = collision_time(gas, asm.prim_left.p, asm.prim_right.p, asm.prim_center, dt)
    out = []
    for delta in (dt, 0.5 * dt):
        F = time_integrated_flux(asm, delta, tau, tau_num)
        if gas.viscous and gas.pr != 1.0:
            eq = delta * asm.moments[0] + 0.5 * delta * delta * asm.moments[2]
            F = prandtl_correction(F, eq, asm.prim_center.vel, gas.pr)
        out.append(F)
    return out[0], out[1]
