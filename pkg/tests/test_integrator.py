import numpy as np
import pytest

from gks4.grid import FACES, BoundarySpec, Field3D, GridSpec, Outflow, Periodic, fill_ghosts, gravity_source
from gks4.integrator import (
    Scheme, SpatialOperator, advance, compute_dt, face_flux_integrals, spatial_operator, stage_final,
    stage_mid, step,
)
from gks4.kinetics import GasModel, InvalidStateError, euler_flux, prim_from_cons
from gks4.reconstruction import ReconConfig

GAS = GasModel(gamma=1.4)
PERIODIC = BoundarySpec()


def conserved(rho, vel, p, gamma=1.4):
    vel = np.asarray(vel, dtype=float)
    return np.concatenate([[rho], rho * vel, [p / (gamma - 1) + 0.5 * rho * vel @ vel]])


def uniform_field(shape, state, lo=(0, 0, 0), hi=(1, 1, 1)):
    grid = GridSpec(shape, lo, hi)
    return Field3D.from_interior(grid, np.broadcast_to(np.asarray(state)[:, None, None, None], (5,) + shape))


def smooth_field(shape, seed=0):
    rng = np.random.default_rng(seed)
    grid = GridSpec(shape)
    X, Y, Z = grid.mesh()
    q = np.zeros((5,) + shape)
    ph = rng.uniform(0, 2 * np.pi, 6)
    rho = 1 + 0.2 * np.sin(2 * np.pi * X + ph[0]) * np.cos(2 * np.pi * Y + ph[1])
    u = 0.3 * np.sin(2 * np.pi * Z + ph[2])
    v = 0.2 * np.cos(2 * np.pi * X + ph[3])
    w = 0.1 * np.sin(2 * np.pi * Y + ph[4])
    p = 1 + 0.1 * np.cos(2 * np.pi * (X + Y + Z) + ph[5])
    q[0] = rho
    q[1], q[2], q[3] = rho * u, rho * v, rho * w
    q[4] = p / 0.4 + 0.5 * rho * (u * u + v * v + w * w)
    return Field3D.from_interior(grid, q)


# -- time step -------------------------------------------------------------------


def test_dt_static_gas():
    # c = 1 with rho = 1, p = 1/gamma; dx = 0.01
    fld = uniform_field((5, 5, 5), conserved(1.0, (0, 0, 0), 1 / 1.4), hi=(0.05, 0.05, 0.05))
    assert compute_dt(fld, 0.4, GAS) == pytest.approx(0.4 / 300, rel=1e-14)


def test_dt_halves_with_resolution():
    state = conserved(1.0, (0.3, -0.2, 0.1), 1.0)
    a = compute_dt(uniform_field((8, 8, 8), state), 0.4, GAS)
    b = compute_dt(uniform_field((16, 16, 16), state), 0.4, GAS)
    assert b == pytest.approx(a / 2, rel=1e-14)


def test_dt_viscous_scales_with_spacing_squared():
    state = conserved(1.0, (0, 0, 0), 1.0)
    for mu in (1.0, 10.0):
        gas = GasModel(gamma=1.4, viscosity="constant", mu0=mu)
        a = compute_dt(uniform_field((8, 8, 8), state), 0.4, gas)
        b = compute_dt(uniform_field((16, 16, 16), state), 0.4, gas)
        assert b / a == pytest.approx(0.25, rel=0.05)
    # and the viscous bound matches the formula when it dominates
    gas = GasModel(gamma=1.4, viscosity="constant", mu0=10.0)
    d = 1 / 8
    rate = 3 * np.sqrt(1.4) / d + 2 * 10.0 * 3 / d ** 2
    assert compute_dt(uniform_field((8, 8, 8), state), 0.4, gas) == pytest.approx(0.4 / rate, rel=1e-14)


def test_dt_rejects_non_finite():
    fld = uniform_field((5, 5, 5), conserved(1.0, (0, 0, 0), 1.0))
    fld.interior[0, 2, 2, 2] = np.nan
    with pytest.raises(InvalidStateError):
        compute_dt(fld, 0.4, GAS)


def test_scheme_validation():
    with pytest.raises(ValueError):
        Scheme(GAS, PERIODIC, cfl=1.5)
    with pytest.raises(ValueError):
        Scheme(GAS, PERIODIC, cfl=0.0)


# -- spatial operator --------------------------------------------------------------


@pytest.mark.parametrize("recon", [ReconConfig(), ReconConfig("linear5", "characteristic")])
def test_uniform_periodic_operator_vanishes(recon):
    fld = uniform_field((6, 5, 7), conserved(1.3, (0.4, -0.2, 0.3), 0.9))
    scheme = Scheme(GAS, PERIODIC, recon)
    fill_ghosts(fld, PERIODIC, GAS)
    op = spatial_operator(fld, 1e-3, scheme)
    assert np.abs(op.L).max() < 1e-13
    assert np.abs(op.dL).max() < 1e-10


def test_face_integrals_of_uniform_flow():
    state = conserved(1.3, (0.4, -0.2, 0.3), 0.9)
    fld = uniform_field((6, 5, 7), state)
    scheme = Scheme(GAS, PERIODIC)
    fill_ghosts(fld, PERIODIC, GAS)
    dt = 2e-3
    for axis in range(3):
        pair = face_flux_integrals(fld, axis, dt, scheme)
        sp = fld.grid.spacing
        area = np.prod(sp) / sp[axis]
        F = euler_flux(prim_from_cons(state, GAS), axis, GAS)
        np.testing.assert_allclose(pair.full / (dt * area), np.broadcast_to(F[:, None, None, None], pair.full.shape),
                                   rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(pair.half / (0.5 * dt * area), pair.full / (dt * area), rtol=1e-12, atol=1e-13)


def riemann_field(shape, axis=0):
    grid = GridSpec(shape)
    x = grid.mesh()[axis]
    left, right = conserved(1.0, (0, 0, 0), 1.0), conserved(0.125, (0, 0, 0), 0.1)
    q = np.where(x[None] < 0.5, left[:, None, None, None], right[:, None, None, None])
    return Field3D.from_interior(grid, q)


def test_riemann_plane_operator_uniform_across_plane():
    fld = riemann_field((16, 6, 6))
    bc = BoundarySpec({**{f: Periodic() for f in FACES}, "xlo": Outflow(), "xhi": Outflow()})
    scheme = Scheme(GAS, bc, ReconConfig("weno5_js", "characteristic"))
    fill_ghosts(fld, bc, GAS)
    op = spatial_operator(fld, 1e-3, scheme)
    for a in (op.L, op.dL):
        np.testing.assert_allclose(a, np.broadcast_to(a[:, :, :1, :1], a.shape), rtol=0, atol=1e-12 * np.abs(a).max())
    # only cells within the stencil reach of the jump see it
    far = np.r_[0:4, 12:16]
    assert np.abs(op.L[:, far]).max() < 1e-12
    assert np.abs(op.L[:, 7:9]).max() > 0.1
    # no tangential momentum is created
    assert np.abs(op.L[2:4]).max() < 1e-13


@pytest.mark.parametrize("recon", [ReconConfig(), ReconConfig("linear5")])
def test_periodic_operator_telescopes(recon):
    fld = smooth_field((8, 7, 6))
    scheme = Scheme(GasModel(gamma=1.4, viscosity="constant", mu0=1e-2, pr=0.71), PERIODIC, recon)
    fill_ghosts(fld, PERIODIC, scheme.gas)
    op = spatial_operator(fld, 1e-3, scheme)
    for a in (op.L, op.dL):
        total = a.sum(axis=(1, 2, 3))
        scale = np.abs(a).sum(axis=(1, 2, 3))
        assert np.all(np.abs(total) <= 1e-12 * scale)


# -- S2O4 stage algebra -------------------------------------------------------------


def linear_op(a, w):
    return SpatialOperator(np.array([a * w]), np.array([a * a * w]))


def test_stage_mid_zero_operator():
    Q = np.array([1.0, 2.0, 3.0])
    op = SpatialOperator(np.zeros(3), np.zeros(3))
    np.testing.assert_array_equal(stage_mid(Q, op, 0.1), Q)
    np.testing.assert_array_equal(stage_final(Q, op, op, 0.1), Q)


@pytest.mark.parametrize("z", [0.1, -0.3, 0.7])
def test_stage_mid_linear(z):
    a, dt, w = 2.0, z / 2.0, 1.7
    Qs = stage_mid(np.array([w]), linear_op(a, w), dt)
    assert Qs[0] / w == pytest.approx(1 + z / 2 + z * z / 8, rel=1e-15)


def test_linear_step_is_taylor_four():
    a, w, dt = 1.0, 1.0, 0.1
    Qn = np.array([w])
    Qs = stage_mid(Qn, linear_op(a, w), dt)
    Q1 = stage_final(Qn, linear_op(a, w), linear_op(a, Qs[0]), dt)
    assert Q1[0] == pytest.approx(1.1051708333333333, rel=0, abs=3e-16)
    z = -0.37
    Qs = stage_mid(Qn, linear_op(z, w), 1.0)
    Q1 = stage_final(Qn, linear_op(z, w), linear_op(z, Qs[0]), 1.0)
    assert Q1[0] == pytest.approx(1 + z + z ** 2 / 2 + z ** 3 / 6 + z ** 4 / 24, rel=1e-15)


def quadratic_op(w):
    return SpatialOperator(np.array([w * w]), np.array([2 * w ** 3]))


def integrate_quadratic(w0, t_end, n):
    dt = t_end / n
    w = np.array([w0])
    for _ in range(n):
        op = quadratic_op(w[0])
        ws = stage_mid(w, op, dt)
        w = stage_final(w, op, quadratic_op(ws[0]), dt)
    return w[0]


def test_nonlinear_order_four():
    w0, T = 1.0, 0.5
    exact = w0 / (1 - w0 * T)
    errs = [abs(integrate_quadratic(w0, T, n) - exact) for n in (40, 80, 160)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 4.0) < 0.1), orders


def test_mid_stage_third_order_local_error():
    # w* matches w(dt/2) to O(dt^3) for dw/dt = w^2
    w0 = 1.0
    errs = []
    for dt in (0.1, 0.05, 0.025):
        ws = stage_mid(np.array([w0]), quadratic_op(w0), dt)[0]
        errs.append(abs(ws - w0 / (1 - w0 * dt / 2)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 3.0) < 0.15), orders


# -- full steps --------------------------------------------------------------------


def test_uniform_field_unchanged_over_steps():
    state = conserved(1.1, (0.5, 0.2, -0.3), 0.8)
    fld = uniform_field((6, 6, 6), state)
    scheme = Scheme(GAS, PERIODIC)
    for _ in range(10):
        _, stats = step(fld, scheme)
        assert stats.dt > 0 and stats.fallbacks == 0
    np.testing.assert_allclose(fld.interior, np.broadcast_to(state[:, None, None, None], fld.interior.shape),
                               rtol=0, atol=1e-14 * np.abs(state).max())


def test_periodic_conservation_100_steps():
    fld = smooth_field((8, 8, 8), seed=2)
    scheme = Scheme(GAS, PERIODIC, ReconConfig("weno5_js"))
    before = fld.totals()
    for _ in range(100):
        step(fld, scheme)
    after = fld.totals()
    scale = np.abs(fld.interior).sum(axis=(1, 2, 3)) * fld.grid.cell_volume
    assert np.all(np.abs(after - before) <= 1e-12 * scale), (after - before) / scale


def test_periodic_gravity_budget():
    """Mass is conserved; momentum and energy change by the integrated source."""
    fld = smooth_field((8, 8, 8), seed=5)
    g = (0.0, 0.05, -0.1)
    scheme = Scheme(GAS, PERIODIC, ReconConfig("linear5"), gravity=g)
    vol = fld.grid.cell_volume
    for _ in range(5):
        fill_ghosts(fld, PERIODIC, GAS, g)
        dt = compute_dt(fld, 0.4, GAS)
        Qn = fld.interior.copy()
        op_n = spatial_operator(fld, dt, scheme)
        mid = fld.copy()
        mid.interior[...] = stage_mid(Qn, op_n, dt)
        fill_ghosts(mid, PERIODIC, GAS, g)
        op_m = spatial_operator(mid, dt, scheme)
        S, dS = gravity_source(Qn, g, op_n.L)
        _, dSm = gravity_source(mid.interior, g, op_m.L)
        expected = (dt * S + dt * dt / 6 * (dS + 2 * dSm)).sum(axis=(1, 2, 3)) * vol
        before = fld.totals()
        step(fld, scheme, dt)
        change = fld.totals() - before
        scale = np.abs(Qn).sum(axis=(1, 2, 3)) * vol
        assert np.all(np.abs(change - expected) <= 1e-12 * scale)
        assert abs(change[3]) > 1e-4


def test_axis_relabel_x_to_z():
    bcx = BoundarySpec({**{f: Periodic() for f in FACES}, "xlo": Outflow(), "xhi": Outflow()})
    bcz = BoundarySpec({**{f: Periodic() for f in FACES}, "zlo": Outflow(), "zhi": Outflow()})
    fx = riemann_field((20, 5, 5), axis=0)
    fz = riemann_field((5, 5, 20), axis=2)
    recon = ReconConfig("weno5_js", "characteristic")
    for _ in range(5):
        step(fx, Scheme(GAS, bcx, recon), 2e-3)
        step(fz, Scheme(GAS, bcz, recon), 2e-3)
    relabelled = np.transpose(fz.interior, (0, 3, 2, 1))[[0, 3, 2, 1, 4]]
    np.testing.assert_allclose(fx.interior, relabelled, rtol=0, atol=1e-12)


def test_cyclic_axis_relabel_of_3d_field():
    fld = smooth_field((6, 6, 6), seed=7)
    other = Field3D.from_interior(fld.grid, np.transpose(fld.interior, (0, 3, 1, 2))[[0, 3, 1, 2, 4]])
    scheme = Scheme(GAS, PERIODIC)
    for _ in range(3):
        step(fld, scheme, 1e-2)
        step(other, scheme, 1e-2)
    back = np.transpose(other.interior, (0, 2, 3, 1))[[0, 2, 3, 1, 4]]
    np.testing.assert_allclose(back, fld.interior, rtol=0, atol=1e-12)


def test_positivity_error_names_cell():
    fld = riemann_field((12, 5, 5))
    fld.interior[0] = np.where(fld.interior[0] < 0.5, 1e-6, 1.0)
    fld.interior[4] = np.where(fld.interior[0] < 0.5, 1e-6, 1e3)
    bc = BoundarySpec({**{f: Periodic() for f in FACES}, "xlo": Outflow(), "xhi": Outflow()})
    scheme = Scheme(GAS, bc, ReconConfig("linear5", positivity_fallback=False))
    with pytest.raises(InvalidStateError, match="interior cell"):
        step(fld, scheme, 5e-3)


def test_half_dt_retry():
    fld = riemann_field((12, 5, 5))
    low = fld.interior[0] < 0.5
    fld.interior[0] = np.where(low, 0.01, 1.0)
    fld.interior[4] = np.where(low, 0.01, 1.0) / 0.4
    bc = BoundarySpec({**{f: Periodic() for f in FACES}, "xlo": Outflow(), "xhi": Outflow()})
    scheme = Scheme(GAS, bc, ReconConfig("weno5_js", "characteristic"))
    fill_ghosts(fld, bc, GAS)
    # a step of 5 CFL-limited steps fails; two halves of it succeed
    big = 5 * compute_dt(fld, 0.4, GAS)
    with pytest.raises(InvalidStateError):
        step(fld.copy(), scheme, big)
    ref = fld.copy()
    step(ref, scheme, big / 2)
    step(ref, scheme, big / 2)
    scheme.retry_half_dt = True
    _, stats = step(fld, scheme, big)
    assert stats.dt == big and fld.time == pytest.approx(big)
    np.testing.assert_array_equal(fld.interior, ref.interior)


def test_advance_hits_end_time():
    fld = smooth_field((6, 6, 6))
    history = advance(fld, Scheme(GAS, PERIODIC), 0.05)
    assert fld.time == pytest.approx(0.05, rel=1e-13)
    assert all(h.dt > 0 for h in history)
    assert history[-1].rho_min > 0 and history[-1].p_min > 0
