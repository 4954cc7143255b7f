"""Gas model, state conversions and Maxwellian moment calculus.

Conventions
-----------
Conserved states are arrays with the five components on the leading axis,
``q = (rho, rho*U, rho*V, rho*W, rho*E)``; any trailing shape is allowed and
every function here broadcasts over it.  The Maxwellian is parameterised by
``lam = rho / (2 p)`` so that ``p = rho / (2 lam)`` and the temperature used
throughout the package is ``T = p / rho = 1 / (2 lam)``.

Moments are normalised by density, ``<X> = (1/rho) * int X g dXi``.  A
``MomentSet`` stores the one-dimensional Gaussian moments of each velocity
axis (the first axis optionally restricted to a half space) together with
the internal-energy moments ``<xi^0>, <xi^2>, <xi^4>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

MAX_ORDER = 6


class InvalidStateError(ValueError):
    """A state with non-positive density or internal energy."""

    def __init__(self, message: str, where=None):
        self.where = where
        if where is not None:
            message = f"{message} at cell {tuple(int(i) for i in where)}"
        super().__init__(message)


@dataclass(frozen=True)
class GasModel:
    """Perfect gas with BGK relaxation parameters.

    ``viscosity`` is ``"inviscid"``, ``"constant"`` (``mu = mu0``) or
    ``"power"`` (``mu = mu0 * (T / t0) ** mu_exponent``).
    """

    gamma: float = 1.4
    pr: float = 1.0
    viscosity: str = "inviscid"
    mu0: float = 0.0
    t0: float = 1.0
    mu_exponent: float = 0.0
    tau_eps: float = 0.01
    tau_c: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.gamma <= 5.0 / 3.0 + 1e-12:
            raise ValueError(f"gamma must lie in (1, 5/3], got {self.gamma}")
        if self.pr <= 0:
            raise ValueError("Prandtl number must be positive")
        if self.viscosity not in ("inviscid", "constant", "power"):
            raise ValueError(f"unknown viscosity model {self.viscosity!r}")
        if self.mu0 < 0 or self.tau_eps < 0 or self.tau_c < 0:
            raise ValueError("mu0, tau_eps and tau_c must be non-negative")
        if self.t0 <= 0:
            raise ValueError("reference temperature must be positive")

    @property
    def K(self) -> float:
        """Internal degrees of freedom, (5 - 3 gamma) / (gamma - 1)."""
        # exact zero for the monatomic gas instead of a 1e-16 residue
        k = (5.0 - 3.0 * self.gamma) / (self.gamma - 1.0)
        return 0.0 if abs(k) < 1e-12 else k

    @property
    def viscous(self) -> bool:
        return self.viscosity != "inviscid"

    def mu(self, temperature):
        if self.viscosity == "inviscid":
            return np.zeros_like(np.asarray(temperature, dtype=float))
        if self.viscosity == "constant":
            return np.full_like(np.asarray(temperature, dtype=float), self.mu0)
        return self.mu0 * (np.asarray(temperature) / self.t0) ** self.mu_exponent


@dataclass
class PrimitiveState:
    """Density, velocity (leading axis of length 3) and ``lam = rho/(2p)``."""

    rho: np.ndarray
    vel: np.ndarray
    lam: np.ndarray

    @property
    def p(self):
        return self.rho / (2.0 * self.lam)

    @property
    def temperature(self):
        return 0.5 / self.lam

    def sound_speed(self, gas: GasModel):
        return np.sqrt(gas.gamma * self.p / self.rho)


@dataclass
class MomentSet:
    """Normalised Maxwellian moments; ``u`` may be a half-space set."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    xi: np.ndarray


def _bad_index(mask):
    idx = np.argwhere(mask)
    return idx[0] if idx.size else None


def prim_from_cons(q, gas: GasModel, *, check: bool = True) -> PrimitiveState:
    q = np.asarray(q, dtype=float)
    rho = q[0]
    vel = q[1:4] / rho
    internal = q[4] - 0.5 * (q[1] ** 2 + q[2] ** 2 + q[3] ** 2) / rho
    if check:
        bad = ~((rho > 0) & (internal > 0))
        if np.any(bad):
            where = _bad_index(bad) if np.ndim(bad) else None
            raise InvalidStateError("non-positive density or internal energy", where)
    lam = (gas.K + 3.0) * rho / (4.0 * internal)
    return PrimitiveState(rho, vel, lam)


def cons_from_prim(p: PrimitiveState, gas: GasModel):
    rho = np.asarray(p.rho, dtype=float)
    vel = np.asarray(p.vel, dtype=float)
    q = np.empty((5,) + np.broadcast(rho, vel[0]).shape)
    q[0] = rho
    q[1:4] = rho * vel
    q[4] = 0.5 * rho * (vel ** 2).sum(axis=0) + (gas.K + 3.0) * rho / (4.0 * p.lam)
    return q


def prim_from_rup(rho, vel, p) -> PrimitiveState:
    """Build a primitive state from density, velocity and pressure."""
    rho = np.asarray(rho, dtype=float)
    return PrimitiveState(rho, np.asarray(vel, dtype=float), rho / (2.0 * np.asarray(p)))


def pressure(q, gas: GasModel):
    q = np.asarray(q)
    return (gas.gamma - 1.0) * (q[4] - 0.5 * (q[1] ** 2 + q[2] ** 2 + q[3] ** 2) / q[0])


def is_valid(q):
    """Elementwise positivity of density and internal energy."""
    q = np.asarray(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        internal = q[4] - 0.5 * (q[1] ** 2 + q[2] ** 2 + q[3] ** 2) / q[0]
        return (q[0] > 0) & (internal > 0) & np.isfinite(internal)


# -- one-dimensional Gaussian moments ---------------------------------------


def full_moments(U, lam, max_order: int = MAX_ORDER):
    """<u^n> of the normalised Gaussian sqrt(lam/pi) exp(-lam (u-U)^2)."""
    if max_order > MAX_ORDER:
        raise ValueError(f"max_order must be <= {MAX_ORDER}")
    U = np.asarray(U, dtype=float)
    lam = np.asarray(lam, dtype=float)
    shape = np.broadcast(U, lam).shape
    m = np.empty((max_order + 1,) + shape)
    m[0] = 1.0
    if max_order >= 1:
        m[1] = U
    for n in range(max_order - 1):
        m[n + 2] = U * m[n + 1] + (n + 1) / (2.0 * lam) * m[n]
    return m


def half_moments(U, lam, sign: int, max_order: int = MAX_ORDER):
    """<u^n> restricted to u > 0 (``sign=+1``) or u < 0 (``sign=-1``)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    U = np.asarray(U, dtype=float)
    lam = np.asarray(lam, dtype=float)
    shape = np.broadcast(U, lam).shape
    m = np.empty((max_order + 1,) + shape)
    sl = np.sqrt(lam)
    m[0] = 0.5 * erfc(-sign * sl * U)
    if max_order >= 1:
        m[1] = U * m[0] + sign * 0.5 * np.exp(-lam * U * U) / np.sqrt(np.pi * lam)
    for n in range(max_order - 1):
        m[n + 2] = U * m[n + 1] + (n + 1) / (2.0 * lam) * m[n]
    return m


def internal_moments(lam, K: float):
    """<xi^0>, <xi^2>, <xi^4> for K internal degrees of freedom."""
    lam = np.asarray(lam, dtype=float)
    m = np.empty((3,) + lam.shape)
    m[0] = 1.0
    m[1] = K / (2.0 * lam)
    m[2] = (K * K + 2.0 * K) / (4.0 * lam * lam)
    return m


def moment_set(p: PrimitiveState, gas: GasModel, sign: int = 0) -> MomentSet:
    """Moments of the Maxwellian of ``p``; ``sign`` selects a half space in u."""
    vel = np.asarray(p.vel)
    u = full_moments(vel[0], p.lam) if sign == 0 else half_moments(vel[0], p.lam, sign)
    return MomentSet(u, full_moments(vel[1], p.lam), full_moments(vel[2], p.lam),
                     internal_moments(p.lam, gas.K))


# -- contractions ------------------------------------------------------------


def psi_moments(ms: MomentSet, i: int, j: int, k: int, xi_power: int = 0):
    """<u^i v^j w^k xi^(2 xi_power) psi> as a 5-vector."""
    u, v, w, xi = ms.u, ms.v, ms.w, ms.xi
    m = u[i] * v[j] * w[k]
    x0 = xi[xi_power]
    return np.stack([
        m * x0,
        u[i + 1] * v[j] * w[k] * x0,
        u[i] * v[j + 1] * w[k] * x0,
        u[i] * v[j] * w[k + 1] * x0,
        0.5 * ((u[i + 2] * v[j] * w[k] + u[i] * v[j + 2] * w[k] + u[i] * v[j] * w[k + 2]) * x0
               + m * xi[xi_power + 1]),
    ])


def contract(ms: MomentSet, c, i: int = 0, j: int = 0, k: int = 0):
    """<u^i v^j w^k a psi> for the micro slope ``a = c . (1, u, v, w, |u|^2/2 + xi^2/2)``."""
    c = np.asarray(c)
    return (c[0] * psi_moments(ms, i, j, k)
            + c[1] * psi_moments(ms, i + 1, j, k)
            + c[2] * psi_moments(ms, i, j + 1, k)
            + c[3] * psi_moments(ms, i, j, k + 1)
            + 0.5 * c[4] * (psi_moments(ms, i + 2, j, k) + psi_moments(ms, i, j + 2, k)
                            + psi_moments(ms, i, j, k + 2) + psi_moments(ms, i, j, k, 1)))


def moment_matrix(p: PrimitiveState, gas: GasModel):
    """M_ij = <psi_i psi_j> (density-normalised), shape (5, 5, ...)."""
    ms = moment_set(p, gas)
    shape = np.shape(p.lam)
    cols = []
    for n in range(5):
        e = np.zeros((5,) + shape)
        e[n] = 1.0
        cols.append(contract(ms, e))
    return np.stack(cols, axis=1)


def solve_micro_slope(p: PrimitiveState, b, gas: GasModel, *, generic: bool = False):
    """Coefficients ``c`` with ``<a psi> = b``, ``b`` being a density-scaled gradient.

    The default path is closed-form elimination: velocity rows first, the
    energy row reduced by them.  ``generic=True`` runs a 5x5 solve of the
    moment matrix instead; it serves as a cross-check.
    """
    b = np.asarray(b, dtype=float)
    if generic:
        M = moment_matrix(p, gas)
        Mt = np.moveaxis(M, (0, 1), (-2, -1))
        bt = np.moveaxis(b, 0, -1)[..., None]
        return np.moveaxis(np.linalg.solve(Mt, bt)[..., 0], -1, 0)
    U, V, W = p.vel
    lam = p.lam
    K = gas.K
    q2 = U * U + V * V + W * W + (K + 3.0) / (2.0 * lam)
    r1 = b[1] - U * b[0]
    r2 = b[2] - V * b[0]
    r3 = b[3] - W * b[0]
    r4 = 2.0 * b[4] - q2 * b[0]
    c = np.empty(np.broadcast(b, lam).shape)
    c[4] = 4.0 * lam * lam / (K + 3.0) * (r4 - 2.0 * U * r1 - 2.0 * V * r2 - 2.0 * W * r3)
    c[3] = 2.0 * lam * r3 - W * c[4]
    c[2] = 2.0 * lam * r2 - V * c[4]
    c[1] = 2.0 * lam * r1 - U * c[4]
    c[0] = b[0] - U * c[1] - V * c[2] - W * c[3] - 0.5 * c[4] * q2
    return c


# -- macroscopic fluxes and characteristics -----------------------------------


def _axis_perm(axis: int):
    # momentum slots (1..3) ordered normal, tangential-1, tangential-2
    return [1 + (axis + n) % 3 for n in range(3)]


def to_face_frame(q, axis: int):
    """Permute momentum components so the face normal comes first."""
    q = np.asarray(q)
    return q[[0] + _axis_perm(axis) + [4]]


def from_face_frame(q, axis: int):
    q = np.asarray(q)
    out = np.empty_like(q)
    out[0] = q[0]
    out[4] = q[4]
    for n, slot in enumerate(_axis_perm(axis)):
        out[slot] = q[1 + n]
    return out


def euler_flux(p: PrimitiveState, axis: int, gas: GasModel):
    """Inviscid flux through a face normal to ``axis``."""
    rho = np.asarray(p.rho, dtype=float)
    vel = np.asarray(p.vel, dtype=float)
    pr = p.p
    un = vel[axis]
    energy = 0.5 * rho * (vel ** 2).sum(axis=0) + pr / (gas.gamma - 1.0)
    f = np.empty((5,) + np.broadcast(rho, un).shape)
    f[0] = rho * un
    f[1:4] = rho * un * vel
    f[1 + axis] += pr
    f[4] = un * (energy + pr)
    return f


def eigen_decomposition(q_star, axis: int, gas: GasModel):
    """Left and right eigenvector matrices of the Euler flux Jacobian.

    Returns ``(left, right)`` of shape ``(5, 5, ...)`` with ``right @ left = I``
    and ``left @ J @ right = diag(Un - c, Un, Un, Un, Un + c)``.
    """
    q_star = np.asarray(q_star, dtype=float)
    bad = ~is_valid(q_star)
    if np.any(bad):
        raise InvalidStateError("invalid averaged state for characteristic projection",
                                _bad_index(bad) if np.ndim(bad) else None)
    qf = to_face_frame(q_star, axis)
    rho = qf[0]
    u, v, w = qf[1] / rho, qf[2] / rho, qf[3] / rho
    g = gas.gamma
    kin = 0.5 * (u * u + v * v + w * w)
    p = (g - 1.0) * (qf[4] - rho * kin)
    c = np.sqrt(g * p / rho)
    H = (qf[4] + p) / rho
    one, zero = np.ones_like(rho), np.zeros_like(rho)
    R = np.array([
        [one, one, zero, zero, one],
        [u - c, u, zero, zero, u + c],
        [v, v, one, zero, v],
        [w, w, zero, one, w],
        [H - u * c, kin, v, w, H + u * c],
    ])
    b1 = (g - 1.0) / (c * c)
    b2 = b1 * kin
    L = np.array([
        [0.5 * (b2 + u / c), 0.5 * (-b1 * u - 1.0 / c), -0.5 * b1 * v, -0.5 * b1 * w, 0.5 * b1],
        [1.0 - b2, b1 * u, b1 * v, b1 * w, -b1],
        [-v, zero, one, zero, zero],
        [-w, zero, zero, one, zero],
        [0.5 * (b2 - u / c), 0.5 * (-b1 * u + 1.0 / c), -0.5 * b1 * v, -0.5 * b1 * w, 0.5 * b1],
    ])
    # back to the global component order: rows of R / columns of L are
    # conserved components in the face frame
    perm = [0] + _axis_perm(axis) + [4]
    Rg = np.empty_like(R)
    Lg = np.empty_like(L)
    Rg[perm] = R
    Lg[:, perm] = L
    return Lg, Rg
