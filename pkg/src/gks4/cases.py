"""Initial conditions for the Cartesian benchmarks and the radial Sod reference solver."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .grid import (BoundarySpec, Field3D, GridSpec, IsothermalWall, Outflow, Periodic,
                   Symmetry)
from .kinetics import GasModel, InvalidStateError, is_valid, pressure
from .reconstruction import GAUSS_X, ReconConfig, _normal_step, line_points

CASES = ("sod3d", "rayleigh_taylor", "cavity", "hit", "tgv", "custom")


@dataclass
class CaseConfig:
    case: str = "tgv"
    n: tuple = (32, 32, 32)
    gamma: float | None = None
    re: float = 280.0
    mach: float = 0.1
    pr: float | None = None
    atwood: float = 1.0 / 3.0
    gravity: float = -0.1
    amplitude: float = 0.05
    interface_pressure: float = 2.4
    ramp_cells: float = 2.0
    a0: float = 1.3e-4
    k0: float = 8.0
    re_lambda: float = 72.0
    ma_t: float = 0.5
    seed: int = 0
    lid_mach: float = 0.15
    t_end: float = 1.0

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}")
        if np.isscalar(self.n):
            self.n = (int(self.n),) * 3
        self.n = tuple(int(v) for v in self.n)
        if not 0.0 < self.atwood < 1.0:
            raise ValueError("atwood number must lie in (0, 1)")
        if self.re <= 0 or self.mach <= 0 or self.lid_mach <= 0:
            raise ValueError("re, mach and lid_mach must be positive")


@dataclass
class CaseSetup:
    field: Field3D
    gas: GasModel
    bc: BoundarySpec
    recon: ReconConfig
    gravity: tuple | None = None
    meta: dict = field(default_factory=dict)


def _conserved(rho, vel, p, gamma):
    vel = [np.broadcast_to(v, np.shape(rho)) for v in vel]
    kin = 0.5 * rho * sum(v * v for v in vel)
    return np.stack([rho, rho * vel[0], rho * vel[1], rho * vel[2], p / (gamma - 1.0) + kin])


def _subcell_points(grid: GridSpec, offsets):
    """Cell-centre meshes shifted by every combination of ``offsets`` (fractions of a cell)."""
    X, Y, Z = grid.mesh()
    dx, dy, dz = grid.spacing
    for a in offsets:
        for b in offsets:
            for c in offsets:
                yield X + a * dx, Y + b * dy, Z + c * dz


# -- 3D Sod -----------------------------------------------------------------------


SOD_IN = (1.0, 1.0)      # (rho, p) inside the sphere
SOD_OUT = (0.125, 0.1)


def init_sod3d(grid: GridSpec, gamma: float = 1.4, radius: float = 0.5) -> Field3D:
    """Spherical Riemann problem; the indicator is averaged over 3^3 sub-points."""
    frac = np.zeros(grid.shape)
    for x, y, z in _subcell_points(grid, (-1 / 3, 0.0, 1 / 3)):
        frac += (x * x + y * y + z * z < radius * radius)
    frac /= 27.0
    rho = SOD_OUT[0] + (SOD_IN[0] - SOD_OUT[0]) * frac
    p = SOD_OUT[1] + (SOD_IN[1] - SOD_OUT[1]) * frac
    return Field3D.from_interior(grid, _conserved(rho, (0.0, 0.0, 0.0), p, gamma))


def sod3d_setup(cfg: CaseConfig) -> CaseSetup:
    grid = GridSpec(cfg.n, (0, 0, 0), (1, 1, 1))
    gamma = cfg.gamma or 1.4
    bc = BoundarySpec({"xlo": Symmetry(), "ylo": Symmetry(), "zlo": Symmetry(),
                       "xhi": Outflow(), "yhi": Outflow(), "zhi": Outflow()})
    return CaseSetup(init_sod3d(grid, gamma), GasModel(gamma=gamma), bc,
                     ReconConfig("weno5_js", "characteristic"))


# -- Rayleigh-Taylor ----------------------------------------------------------------


def rt_densities(atwood: float, rho_light: float = 1.0):
    return rho_light, rho_light * (1.0 + atwood) / (1.0 - atwood)


def rt_interface_height(x, y, width: float, amplitude: float = 0.05, z0: float = 0.5):
    return z0 + amplitude * width * (np.cos(2 * np.pi * x / width) + np.cos(2 * np.pi * y / width))


def _ramp_profile(s, half_width):
    """Heavy-fluid fraction for signed distance ``s`` above the interface (linear ramp)."""
    return np.clip(0.5 + 0.5 * s / half_width, 0.0, 1.0)


def _ramp_integral(s, half_width):
    """Integral of :func:`_ramp_profile` from 0 to ``s``."""
    w = half_width

    def prim(t):
        # antiderivative of the clipped ramp, zero at t = 0
        t = np.asarray(t, dtype=float)
        inner = np.clip(t, -w, w)
        val = 0.5 * inner + 0.25 * inner * inner / w
        return val + np.where(t > w, t - w, 0.0)

    return prim(s)


def init_rayleigh_taylor(grid: GridSpec, cfg: CaseConfig) -> Field3D:
    """Heavy over light fluid in hydrostatic balance with a single-mode interface."""
    gamma = cfg.gamma or 1.4
    rho_l, rho_h = rt_densities(cfg.atwood)
    width = grid.hi[0] - grid.lo[0]
    half = 0.5 * cfg.ramp_cells * grid.spacing[2]
    g = cfg.gravity
    nodes, weights = np.polynomial.legendre.leggauss(3)
    rho = np.zeros(grid.shape)
    energy = np.zeros(grid.shape)
    for (a, wa) in zip(nodes / 2, weights / 2):
        for (b, wb) in zip(nodes / 2, weights / 2):
            for (c, wc) in zip(nodes / 2, weights / 2):
                X, Y, Z = grid.mesh()
                X = X + a * grid.spacing[0]
                Y = Y + b * grid.spacing[1]
                Z = Z + c * grid.spacing[2]
                zi = rt_interface_height(X, Y, width, cfg.amplitude)
                s = Z - zi
                r = rho_l + (rho_h - rho_l) * _ramp_profile(s, half)
                # p(z) = p_i + g * int_{zi}^{z} rho
                p = cfg.interface_pressure + g * (rho_l * s + (rho_h - rho_l) * _ramp_integral(s, half))
                wt = wa * wb * wc
                rho += wt * r
                energy += wt * p / (gamma - 1.0)
    q = np.stack([rho, 0 * rho, 0 * rho, 0 * rho, energy])
    return Field3D.from_interior(grid, q)


def rayleigh_taylor_setup(cfg: CaseConfig) -> CaseSetup:
    grid = GridSpec(cfg.n, (0, 0, 0), (0.25, 0.25, 1.0))
    gamma = cfg.gamma or 1.4
    wall = Symmetry(hydrostatic=True)
    bc = BoundarySpec({"xlo": Symmetry(), "xhi": Symmetry(), "ylo": Symmetry(), "yhi": Symmetry(),
                       "zlo": wall, "zhi": wall})
    return CaseSetup(init_rayleigh_taylor(grid, cfg), GasModel(gamma=gamma), bc,
                     ReconConfig("weno5_js", "characteristic"), gravity=(0.0, 0.0, cfg.gravity),
                     meta={"rho_light": rt_densities(cfg.atwood)[0], "rho_heavy": rt_densities(cfg.atwood)[1]})


# -- lid-driven cavity --------------------------------------------------------------------

CAVITY_WALL_T = 1.0


def cavity_parameters(re: float, gamma: float = 5.0 / 3.0, lid_mach: float = 0.15):
    """(lid speed, viscosity, sound speed) for unit density, unit wall temperature and L = 1."""
    c = np.sqrt(gamma * CAVITY_WALL_T)
    u_lid = lid_mach * c
    return u_lid, u_lid / re, c


def init_cavity(grid: GridSpec, gamma: float = 5.0 / 3.0) -> Field3D:
    rho = np.ones(grid.shape)
    return Field3D.from_interior(grid, _conserved(rho, (0.0, 0.0, 0.0), rho * CAVITY_WALL_T, gamma))


def cavity_setup(cfg: CaseConfig) -> CaseSetup:
    """Unit cube [-1/2, 1/2]^3, y vertical, lid at y = +1/2 sliding along +x."""
    gamma = cfg.gamma or 5.0 / 3.0
    grid = GridSpec(cfg.n, (-0.5,) * 3, (0.5,) * 3)
    u_lid, mu, _ = cavity_parameters(cfg.re, gamma, cfg.lid_mach)
    still = IsothermalWall((0.0, 0.0, 0.0), CAVITY_WALL_T)
    lid = IsothermalWall((u_lid, 0.0, 0.0), CAVITY_WALL_T)
    bc = BoundarySpec({"xlo": still, "xhi": still, "ylo": still, "yhi": lid, "zlo": still, "zhi": still})
    gas = GasModel(gamma=gamma, pr=cfg.pr or 1.0, viscosity="constant", mu0=mu)
    return CaseSetup(init_cavity(grid, gamma), gas, bc, ReconConfig("linear5", "component"),
                     meta={"u_lid": u_lid, "mu": mu})


# -- Taylor-Green vortex ------------------------------------------------------------------


def tgv_parameters(re: float, mach: float = 0.1, gamma: float = 1.4):
    """(p0, mu0) for L = V0 = rho0 = 1."""
    c0 = 1.0 / mach
    return c0 * c0 / gamma, 1.0 / re


def tgv_fields(X, Y, Z, p0, gamma=1.4):
    u = np.sin(X) * np.cos(Y) * np.cos(Z)
    v = -np.cos(X) * np.sin(Y) * np.cos(Z)
    w = np.zeros_like(u)
    p = p0 + (np.cos(2 * X) + np.cos(2 * Y)) * (np.cos(2 * Z) + 2.0) / 16.0
    rho = p / p0          # uniform temperature T0 = p0 / rho0
    return rho, (u, v, w), p


def init_tgv(grid: GridSpec, cfg: CaseConfig) -> Field3D:
    """Point values at cell centres (their midpoint averages are spectrally accurate here)."""
    gamma = cfg.gamma or 1.4
    p0, _ = tgv_parameters(cfg.re, cfg.mach, gamma)
    rho, vel, p = tgv_fields(*grid.mesh(), p0, gamma)
    return Field3D.from_interior(grid, _conserved(rho, vel, p, gamma))


def tgv_setup(cfg: CaseConfig) -> CaseSetup:
    gamma = cfg.gamma or 1.4
    grid = GridSpec(cfg.n, (-np.pi,) * 3, (np.pi,) * 3)
    p0, mu0 = tgv_parameters(cfg.re, cfg.mach, gamma)
    gas = GasModel(gamma=gamma, pr=cfg.pr or 0.71, viscosity="constant", mu0=mu0)
    return CaseSetup(init_tgv(grid, cfg), gas, BoundarySpec.uniform(Periodic()),
                     ReconConfig("linear5", "component"), meta={"p0": p0, "t_c": 1.0})


# -- decaying isotropic turbulence ----------------------------------------------------------


def hit_parameters(a0=1.3e-4, k0=8.0, re_lambda=72.0, ma_t=0.5, gamma=1.4, rho0=1.0):
    """Derived constants of the turbulence case (unit mean density)."""
    K0 = 3.0 * a0 / 64.0 * np.sqrt(2.0 * np.pi) * k0 ** 5
    u_rms = np.sqrt(2.0 * K0 / 3.0)
    mu0 = (2.0 * np.pi) ** 0.25 / 4.0 * rho0 * np.sqrt(2.0 * a0) * k0 ** 1.5 / re_lambda
    T0 = 3.0 * u_rms ** 2 / (gamma * ma_t ** 2)
    eddy_time = np.sqrt(32.0 / a0) * (2.0 * np.pi) ** 0.25 * k0 ** -3.5
    return {"K0": K0, "u_rms": u_rms, "mu0": mu0, "T0": T0, "eddy_time": eddy_time}


def hit_spectrum(k, a0=1.3e-4, k0=8.0):
    return a0 * k ** 4 * np.exp(-2.0 * k * k / (k0 * k0))


def hit_velocity(n: int, seed: int = 0, a0=1.3e-4, k0=8.0):
    """Solenoidal random velocity on an n^3 periodic grid over [-pi, pi]^3.

    Returns (u (3, n, n, n), uhat (3, n, n, n) normalized DFT coefficients).
    Shell energies match E(k) on integer shells, the total is rescaled to K0.
    """
    if n % 2:
        raise ValueError("turbulence initializer needs an even cell count")
    if n // 2 < 2 * k0:
        raise ValueError(f"grid too coarse: max wavenumber {n // 2} < 2 k0 = {2 * k0}")
    rng = np.random.default_rng(seed)
    # real white noise keeps Hermitian symmetry automatic
    noise = rng.standard_normal((3, n, n, n))
    uh = np.fft.fftn(noise, axes=(1, 2, 3)) / n ** 3
    k1 = np.fft.fftfreq(n, 1.0 / n)
    KX, KY, KZ = np.meshgrid(k1, k1, k1, indexing="ij")
    kk = KX * KX + KY * KY + KZ * KZ
    kv = (KX, KY, KZ)
    with np.errstate(invalid="ignore", divide="ignore"):
        div = sum(kv[a] * uh[a] for a in range(3)) / np.where(kk > 0, kk, 1.0)
    for a in range(3):
        uh[a] -= kv[a] * div
    # the Nyquist planes carry no antisymmetric partner; drop them
    nyq = (np.abs(KX) == n // 2) | (np.abs(KY) == n // 2) | (np.abs(KZ) == n // 2)
    uh[:, nyq] = 0.0
    uh[:, kk == 0] = 0.0
    shell = np.rint(np.sqrt(kk)).astype(int)
    energy = 0.5 * np.sum(np.abs(uh) ** 2, axis=0)
    shell_e = np.bincount(shell.ravel(), weights=energy.ravel())
    target = hit_spectrum(np.arange(shell_e.size, dtype=float), a0, k0)
    scale = np.zeros_like(shell_e)
    good = shell_e > 0
    scale[good] = np.sqrt(target[good] / shell_e[good])
    uh *= scale[shell]
    K0 = hit_parameters(a0, k0)["K0"]
    realized = 0.5 * np.sum(np.abs(uh) ** 2)
    uh *= np.sqrt(K0 / realized)
    u = np.real(np.fft.ifftn(uh * n ** 3, axes=(1, 2, 3)))
    return u, uh


def shell_spectrum(uh):
    """Energy per integer wavenumber shell of normalized DFT coefficients (3, n, n, n)."""
    n = uh.shape[1]
    k1 = np.fft.fftfreq(n, 1.0 / n)
    KX, KY, KZ = np.meshgrid(k1, k1, k1, indexing="ij")
    shell = np.rint(np.sqrt(KX ** 2 + KY ** 2 + KZ ** 2)).astype(int)
    return np.bincount(shell.ravel(), weights=0.5 * np.sum(np.abs(uh) ** 2, axis=0).ravel())


def spectral_divergence(uh):
    """Max |k . uhat| relative to max |uhat|."""
    n = uh.shape[1]
    k1 = np.fft.fftfreq(n, 1.0 / n)
    KX, KY, KZ = np.meshgrid(k1, k1, k1, indexing="ij")
    d = KX * uh[0] + KY * uh[1] + KZ * uh[2]
    return float(np.max(np.abs(d)) / max(np.max(np.abs(uh)), 1e-300))


def init_hit(grid: GridSpec, cfg: CaseConfig, seed: int | None = None) -> Field3D:
    gamma = cfg.gamma or 1.4
    n = grid.shape[0]
    if grid.shape != (n, n, n):
        raise ValueError("turbulence initializer needs a cubic grid")
    u, _ = hit_velocity(n, cfg.seed if seed is None else seed, cfg.a0, cfg.k0)
    par = hit_parameters(cfg.a0, cfg.k0, cfg.re_lambda, cfg.ma_t, gamma)
    rho = np.ones(grid.shape)
    return Field3D.from_interior(grid, _conserved(rho, tuple(u), rho * par["T0"], gamma))


def hit_setup(cfg: CaseConfig) -> CaseSetup:
    gamma = cfg.gamma or 1.4
    grid = GridSpec(cfg.n, (-np.pi,) * 3, (np.pi,) * 3)
    par = hit_parameters(cfg.a0, cfg.k0, cfg.re_lambda, cfg.ma_t, gamma)
    gas = GasModel(gamma=gamma, pr=cfg.pr or 0.71, viscosity="power", mu0=par["mu0"], t0=par["T0"],
                   mu_exponent=0.76)
    return CaseSetup(init_hit(grid, cfg), gas, BoundarySpec.uniform(Periodic()),
                     ReconConfig("weno5_js", "component"), meta=par)


SETUPS = {
    "sod3d": sod3d_setup,
    "rayleigh_taylor": rayleigh_taylor_setup,
    "cavity": cavity_setup,
    "tgv": tgv_setup,
    "hit": hit_setup,
}


def build_case(cfg: CaseConfig) -> CaseSetup:
    if cfg.case not in SETUPS:
        raise ValueError(f"case {cfg.case!r} has no built-in initializer")
    return SETUPS[cfg.case](cfg)


# -- radial Sod reference ------------------------------------------------------------------


@dataclass
class RadialProfile:
    r: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    time: float

    def __post_init__(self):
        if np.any(np.diff(self.r) <= 0):
            raise ValueError("radii must increase")

    def sample(self, r):
        """Nearest-cell values (rho, u, p) at radii ``r``."""
        d = self.r[1] - self.r[0]
        idx = np.clip(np.floor((np.asarray(r) - (self.r[0] - 0.5 * d)) / d).astype(int), 0, self.r.size - 1)
        return self.rho[idx], self.u[idx], self.p[idx]


class RadialSolver:
    """S2O4 gas-kinetic solver for the 1D system with geometric source -(d-1)/r (...).

    State layout (5, n + 6): (rho, rho u, 0, 0, rho E) with 3 ghosts each side.
    Reflective at r = 0, zero-gradient outflow at r = r_max.
    """

    G = 3

    def __init__(self, n, dims=3, r_max=1.0, gas=None, recon=None, cfl=0.4):
        self.n = n
        self.dims = dims
        self.dr = r_max / n
        self.r = (np.arange(n) + 0.5) * self.dr
        self.gas = gas or GasModel(gamma=1.4)
        self.recon = recon or ReconConfig("weno5_js", "characteristic")
        self.cfl = cfl
        self.q = np.zeros((5, n + 2 * self.G))

    def set_riemann(self, left, right, r0=0.5):
        g = self.gas.gamma
        inside = self.r < r0
        rho = np.where(inside, left[0], right[0])
        u = np.where(inside, left[1], right[1])
        p = np.where(inside, left[2], right[2])
        self.interior[...] = _conserved(rho, (u, 0.0, 0.0), p, g)

    @property
    def interior(self):
        return self.q[:, self.G:self.G + self.n]

    def fill(self, q):
        G, n = self.G, self.n
        for k in range(G):
            q[:, G - 1 - k] = q[:, G + k]
            q[1, G - 1 - k] = -q[1, G + k]
            q[:, G + n + k] = q[:, G + n - 1]

    def operator(self, q, dt):
        G, n = self.G, self.n
        rv = q[:, :, None, None]
        (vl, gl), (vr, gr), (v0, g0) = _normal_step(rv, 0, n + 1, (0, 1), (0, 1), self.dr, self.recon, self.gas)
        wl, wr = vl[:, :, 0, 0], vr[:, :, 0, 0]
        bad = ~(is_valid(wl) & is_valid(wr))
        zeros = np.zeros((3, 5, n + 1))
        dl, dr, d0 = zeros.copy(), zeros.copy(), zeros.copy()
        dl[0], dr[0], d0[0] = gl[:, :, 0, 0], gr[:, :, 0, 0], g0[:, :, 0, 0]
        if np.any(bad):
            wl = np.where(bad, q[:, G - 1:G + n], wl)
            wr = np.where(bad, q[:, G:G + n + 1], wr)
            for d in (dl, dr, d0):
                d[:, :, bad] = 0.0
        full, half = backend.flux_batch(wl, dl, wr, dr, d0, dt, self.gas)
        F0 = (4.0 * half - full) / dt
        F1 = 4.0 * (full - 2.0 * half) / (dt * dt)
        # the kinetic time derivative only sees -dF/dr; add the source's share
        wf = 0.5 * (wl + wr)
        rf = np.arange(n + 1) * self.dr
        F1[:, 1:] += self.flux_jvp(wf[:, 1:], self.source(wf[:, 1:], rf[1:]))
        L = -(F0[:, 1:] - F0[:, :-1]) / self.dr
        dL = -(F1[:, 1:] - F1[:, :-1]) / self.dr
        # two-point Gauss average of the source over each cell
        Qg = self.gauss_states(q)
        rg = [self.r + x * self.dr for x in (-GAUSS_X, GAUSS_X)]
        L += 0.5 * sum(self.source(Qg[k], rg[k]) for k in range(2))
        dL += 0.5 * sum(self.source_jvp(Qg[k], L, rg[k]) for k in range(2))
        return L, dL

    def gauss_states(self, q):
        """Reconstructed states at the two Gauss points of every cell (cell averages where invalid)."""
        G, n = self.G, self.n
        vals, _ = line_points(q[:, :, None], G - 2, n, (-GAUSS_X, GAUSS_X), self.recon.mode == "weno5_js",
                              self.recon.weno_epsilon, derivative=False)
        Q = q[:, G:G + n]
        out = []
        for k in range(2):
            v = vals[:, :, k, 0]
            out.append(np.where(is_valid(v), v, Q))
        return out

    def source(self, Q, r=None):
        g = self.gas.gamma
        rho, m, E = Q[0], Q[1], Q[4]
        u = m / rho
        p = (g - 1.0) * (E - 0.5 * m * u)
        f = -(self.dims - 1) / (self.r if r is None else r)
        S = np.zeros_like(Q)
        S[0] = f * m
        S[1] = f * m * u
        S[4] = f * u * (E + p)
        return S

    def source_jvp(self, Q, dQ, r=None):
        g = self.gas.gamma
        rho, m, E = Q[0], Q[1], Q[4]
        u = m / rho
        du = (dQ[1] - u * dQ[0]) / rho
        h = g * E - 0.5 * (g - 1.0) * m * u          # E + p
        dh = g * dQ[4] - 0.5 * (g - 1.0) * (2.0 * u * dQ[1] - u * u * dQ[0])
        f = -(self.dims - 1) / (self.r if r is None else r)
        out = np.zeros_like(Q)
        out[0] = f * dQ[1]
        out[1] = f * (2.0 * u * dQ[1] - u * u * dQ[0])
        out[4] = f * (du * h + u * dh)
        return out

    def flux_jvp(self, Q, dQ):
        """Derivative of the radial Euler flux at ``Q`` along ``dQ``."""
        g = self.gas.gamma
        rho, m, E = Q[0], Q[1], Q[4]
        u = m / rho
        p = (g - 1.0) * (E - 0.5 * m * u)
        dp = (g - 1.0) * (dQ[4] - u * dQ[1] + 0.5 * u * u * dQ[0])
        du = (dQ[1] - u * dQ[0]) / rho
        out = np.zeros_like(Q)
        out[0] = dQ[1]
        out[1] = 2.0 * u * dQ[1] - u * u * dQ[0] + dp
        out[4] = du * (E + p) + u * (dQ[4] + dp)
        return out

    def compute_dt(self):
        Q = self.interior
        u = Q[1] / Q[0]
        p = pressure(Q, self.gas)
        c = np.sqrt(self.gas.gamma * p / Q[0])
        return float(self.cfl * self.dr / np.max(np.abs(u) + c))

    def step(self, dt):
        G, n = self.G, self.n
        self.fill(self.q)
        Qn = self.interior.copy()
        L, dL = self.operator(self.q, dt)
        mid = self.q.copy()
        mid[:, G:G + n] = Qn + 0.5 * dt * L + 0.125 * dt * dt * dL
        if not np.all(is_valid(mid[:, G:G + n])):
            raise InvalidStateError("radial solver intermediate state lost positivity")
        self.fill(mid)
        _, dLm = self.operator(mid, dt)
        self.interior[...] = Qn + dt * L + dt * dt / 6.0 * (dL + 2.0 * dLm)
        if not np.all(is_valid(self.interior)):
            raise InvalidStateError("radial solver state lost positivity")

    def run(self, t_end):
        t = 0.0
        while t < t_end * (1 - 1e-14):
            dt = min(self.compute_dt(), t_end - t)
            self.step(dt)
            t += dt
        return self.profile(t)

    def profile(self, t):
        Q = self.interior
        return RadialProfile(self.r.copy(), Q[0].copy(), Q[1] / Q[0], pressure(Q, self.gas), t)


def reference_sod_spherical(n_cells: int = 10000, t_end: float = 0.2, dims: int = 3,
                            recon: ReconConfig | None = None, gas: GasModel | None = None) -> RadialProfile:
    """Radial (dims=3), cylindrical (dims=2) or planar (dims=1) Sod problem on r in (0, 1]."""
    solver = RadialSolver(n_cells, dims, gas=gas, recon=recon)
    solver.set_riemann((SOD_IN[0], 0.0, SOD_IN[1]), (SOD_OUT[0], 0.0, SOD_OUT[1]))
    return solver.run(t_end)
