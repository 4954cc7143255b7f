# cython: language_level=3
"""Compiled hot loops: the per-point gas-kinetic flux and 1D line reconstruction.

Semantics match ``gks4.flux.gks_flux_batch`` and
``gks4.reconstruction.line_points`` exactly; only the evaluation order differs.
"""

from cython.parallel cimport prange
from libc.math cimport erfc as c_erfc, exp, expm1, fabs, pow, sqrt, M_PI

import numpy as np

DEF NMOM = 7


cdef struct Moments:
    double u[NMOM]
    double v[NMOM]
    double w[NMOM]
    double xi[3]


cdef struct GasParams:
    double K
    int viscous
    double tau_eps
    double tau_c
    double mu0
    double t0
    double mu_exp
    double pr
    int forced
    double g[3]


cdef inline void gauss_moments(double U, double lam, double* m) noexcept nogil:
    cdef int n
    m[0] = 1.0
    m[1] = U
    for n in range(NMOM - 2):
        m[n + 2] = U * m[n + 1] + (n + 1) / (2.0 * lam) * m[n]


cdef inline void half_gauss_moments(double U, double lam, int sign, double* m) noexcept nogil:
    cdef int n
    m[0] = 0.5 * c_erfc(-sign * sqrt(lam) * U)
    m[1] = U * m[0] + sign * 0.5 * exp(-lam * U * U) / sqrt(M_PI * lam)
    for n in range(NMOM - 2):
        m[n + 2] = U * m[n + 1] + (n + 1) / (2.0 * lam) * m[n]


cdef inline void fill_moments(Moments* ms, double U, double V, double W, double lam,
                              double K, int sign) noexcept nogil:
    if sign == 0:
        gauss_moments(U, lam, ms.u)
    else:
        half_gauss_moments(U, lam, sign, ms.u)
    gauss_moments(V, lam, ms.v)
    gauss_moments(W, lam, ms.w)
    ms.xi[0] = 1.0
    ms.xi[1] = K / (2.0 * lam)
    ms.xi[2] = (K * K + 2.0 * K) / (4.0 * lam * lam)


cdef inline void psi_add(Moments* ms, int i, int j, int k, int xp, double s, double* out) noexcept nogil:
    # out += s * <u^i v^j w^k xi^(2 xp) psi>
    cdef double x0 = ms.xi[xp]
    cdef double vw = ms.v[j] * ms.w[k]
    cdef double m = ms.u[i] * vw
    cdef double sx = s * x0
    out[0] += sx * m
    out[1] += sx * ms.u[i + 1] * vw
    out[2] += sx * ms.u[i] * ms.v[j + 1] * ms.w[k]
    out[3] += sx * ms.u[i] * ms.v[j] * ms.w[k + 1]
    out[4] += 0.5 * s * ((ms.u[i + 2] * vw + ms.u[i] * ms.v[j + 2] * ms.w[k]
                          + ms.u[i] * ms.v[j] * ms.w[k + 2]) * x0 + m * ms.xi[xp + 1])


cdef inline void contract_add(Moments* ms, double* c, int i, int j, int k, double s,
                              double* out) noexcept nogil:
    psi_add(ms, i, j, k, 0, s * c[0], out)
    psi_add(ms, i + 1, j, k, 0, s * c[1], out)
    psi_add(ms, i, j + 1, k, 0, s * c[2], out)
    psi_add(ms, i, j, k + 1, 0, s * c[3], out)
    cdef double h = 0.5 * s * c[4]
    psi_add(ms, i + 2, j, k, 0, h, out)
    psi_add(ms, i, j + 2, k, 0, h, out)
    psi_add(ms, i, j, k + 2, 0, h, out)
    psi_add(ms, i, j, k, 1, h, out)


cdef inline void solve_slope(double U, double V, double W, double lam, double K,
                             double* b, double* c) noexcept nogil:
    cdef double q2 = U * U + V * V + W * W + (K + 3.0) / (2.0 * lam)
    cdef double r1 = b[1] - U * b[0]
    cdef double r2 = b[2] - V * b[0]
    cdef double r3 = b[3] - W * b[0]
    cdef double r4 = 2.0 * b[4] - q2 * b[0]
    c[4] = 4.0 * lam * lam / (K + 3.0) * (r4 - 2.0 * U * r1 - 2.0 * V * r2 - 2.0 * W * r3)
    c[3] = 2.0 * lam * r3 - W * c[4]
    c[2] = 2.0 * lam * r2 - V * c[4]
    c[1] = 2.0 * lam * r1 - U * c[4]
    c[0] = b[0] - U * c[1] - V * c[2] - W * c[3] - 0.5 * c[4] * q2


cdef inline void force_flux_add(Moments* ms, double* g, double s, double* out) noexcept nogil:
    # out += s * <G . grad_u (u psi)>
    cdef double m1 = ms.u[1] * ms.v[0] * ms.w[0]
    psi_add(ms, 0, 0, 0, 0, s * g[0], out)
    out[1] += s * g[0] * m1
    out[2] += s * g[1] * m1
    out[3] += s * g[2] * m1
    out[4] += s * (g[0] * ms.u[2] * ms.v[0] * ms.w[0] + g[1] * ms.u[1] * ms.v[1] * ms.w[0]
                   + g[2] * ms.u[1] * ms.v[0] * ms.w[1])


cdef inline void side_slopes(Moments* full, double* prim, double K, double* grad,
                             GasParams* gp, double* a, double* A) noexcept nogil:
    # prim = (rho, U, V, W, lam); grad = 3 x 5 conserved gradients
    cdef double b[5]
    cdef double rhs[5]
    cdef int n, c
    for n in range(3):
        for c in range(5):
            b[c] = grad[5 * n + c] / prim[0]
        solve_slope(prim[1], prim[2], prim[3], prim[4], K, b, &a[5 * n])
    for c in range(5):
        rhs[c] = 0.0
    contract_add(full, &a[0], 1, 0, 0, -1.0, rhs)
    contract_add(full, &a[5], 0, 1, 0, -1.0, rhs)
    contract_add(full, &a[10], 0, 0, 1, -1.0, rhs)
    if gp.forced:
        rhs[1] += gp.g[0]
        rhs[2] += gp.g[1]
        rhs[3] += gp.g[2]
        rhs[4] += prim[1] * gp.g[0] + prim[2] * gp.g[1] + prim[3] * gp.g[2]
    solve_slope(prim[1], prim[2], prim[3], prim[4], K, rhs, A)


cdef inline void to_prim(double* q, double K, double* prim) noexcept nogil:
    prim[0] = q[0]
    prim[1] = q[1] / q[0]
    prim[2] = q[2] / q[0]
    prim[3] = q[3] / q[0]
    prim[4] = (K + 3.0) * q[0] / (4.0 * (q[4] - 0.5 * (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) / q[0]))


cdef inline double one_minus_exp_series(double x) noexcept nogil:
    # 1 - e^-x (1 + x)
    cdef double term, total
    cdef int n
    if x > 0.1:
        return 1.0 - exp(-x) * (1.0 + x)
    term = 0.5 * x * x
    total = term
    for n in range(3, 12):
        term = -term * x / n * (n - 1) / (n - 2)
        total += term
    return total


cdef inline double exp_minus_one_plus_x(double x) noexcept nogil:
    if x > 0.1:
        return expm1(-x) + x
    return x * x * (0.5 - x / 6.0 * (1.0 - x / 4.0 * (1.0 - x / 5.0 * (1.0 - x / 6.0
                    * (1.0 - x / 7.0 * (1.0 - x / 8.0))))))


cdef inline void integrated_weights(double delta, double tau, double tau_num, double* q) noexcept nogil:
    cdef double x, e1, et, q1
    if tau_num > 0:
        x = delta / tau_num
        e1 = -tau_num * expm1(-x)
        et = tau_num * tau_num * one_minus_exp_series(x)
        q1 = tau_num * exp_minus_one_plus_x(x)
    else:
        e1 = 0.0
        et = 0.0
        q1 = delta
    q[0] = q1
    q[1] = et - tau * q1
    q[2] = 0.5 * delta * delta - tau * q1
    q[3] = e1
    q[4] = -(et + tau * e1)
    q[5] = -tau * e1


cdef void point_flux(double* wl, double* dl, double* wr, double* dr, double* d0,
                     double dt, GasParams* gp, double* out_full, double* out_half) noexcept nogil:
    cdef Moments fl, fr, hl, hr, f0
    cdef double pl[5]
    cdef double pr[5]
    cdef double p0[5]
    cdef double w0[5]
    cdef double al[15]
    cdef double ar[15]
    cdef double a0[15]
    cdef double Al[5]
    cdef double Ar[5]
    cdef double A0[5]
    cdef double C[30]
    cdef double q[6]
    cdef double F[5]
    cdef double K = gp.K
    cdef double press_l, press_r, press_0, jump, tau, tau_num, delta, d, heat
    cdef int c, k, pass_

    to_prim(wl, K, pl)
    to_prim(wr, K, pr)
    fill_moments(&fl, pl[1], pl[2], pl[3], pl[4], K, 0)
    fill_moments(&fr, pr[1], pr[2], pr[3], pr[4], K, 0)
    # half-space moments share the tangential and internal parts
    hl = fl
    hr = fr
    half_gauss_moments(pl[1], pl[4], 1, hl.u)
    half_gauss_moments(pr[1], pr[4], -1, hr.u)

    for c in range(5):
        w0[c] = 0.0
    psi_add(&hl, 0, 0, 0, 0, pl[0], w0)
    psi_add(&hr, 0, 0, 0, 0, pr[0], w0)
    to_prim(w0, K, p0)
    fill_moments(&f0, p0[1], p0[2], p0[3], p0[4], K, 0)

    side_slopes(&fl, pl, K, dl, gp, al, Al)
    side_slopes(&fr, pr, K, dr, gp, ar, Ar)
    side_slopes(&f0, p0, K, d0, gp, a0, A0)

    for c in range(30):
        C[c] = 0.0
    psi_add(&f0, 1, 0, 0, 0, p0[0], &C[0])
    contract_add(&f0, &a0[0], 2, 0, 0, p0[0], &C[5])
    contract_add(&f0, &a0[5], 1, 1, 0, p0[0], &C[5])
    contract_add(&f0, &a0[10], 1, 0, 1, p0[0], &C[5])
    contract_add(&f0, A0, 1, 0, 0, p0[0], &C[10])
    psi_add(&hl, 1, 0, 0, 0, pl[0], &C[15])
    psi_add(&hr, 1, 0, 0, 0, pr[0], &C[15])
    contract_add(&hl, &al[0], 2, 0, 0, pl[0], &C[20])
    contract_add(&hl, &al[5], 1, 1, 0, pl[0], &C[20])
    contract_add(&hl, &al[10], 1, 0, 1, pl[0], &C[20])
    contract_add(&hr, &ar[0], 2, 0, 0, pr[0], &C[20])
    contract_add(&hr, &ar[5], 1, 1, 0, pr[0], &C[20])
    contract_add(&hr, &ar[10], 1, 0, 1, pr[0], &C[20])
    if gp.forced:
        force_flux_add(&f0, gp.g, -p0[0], &C[5])
        force_flux_add(&hl, gp.g, -pl[0], &C[20])
        force_flux_add(&hr, gp.g, -pr[0], &C[20])
    contract_add(&hl, Al, 1, 0, 0, pl[0], &C[25])
    contract_add(&hr, Ar, 1, 0, 0, pr[0], &C[25])

    press_l = pl[0] / (2.0 * pl[4])
    press_r = pr[0] / (2.0 * pr[4])
    press_0 = p0[0] / (2.0 * p0[4])
    jump = fabs(press_l - press_r) / (press_l + press_r)
    if gp.viscous:
        tau = gp.mu0 * pow((0.5 / p0[4]) / gp.t0, gp.mu_exp) / press_0
        tau_num = tau + gp.tau_c * jump * dt
    else:
        tau = (gp.tau_eps + gp.tau_c * jump) * dt
        tau_num = tau

    for pass_ in range(2):
        delta = dt if pass_ == 0 else 0.5 * dt
        integrated_weights(delta, tau, tau_num, q)
        for c in range(5):
            F[c] = 0.0
            for k in range(6):
                F[c] += q[k] * C[5 * k + c]
        if gp.viscous and gp.pr != 1.0:
            # heat flux of the non-equilibrium part, frame of the interface velocity
            heat = 0.0
            for c in range(5):
                d = F[c] - delta * C[c] - 0.5 * delta * delta * C[10 + c]
                if c == 0:
                    heat += 0.5 * (p0[1] * p0[1] + p0[2] * p0[2] + p0[3] * p0[3]) * d
                elif c == 4:
                    heat += d
                else:
                    heat -= p0[c] * d
            F[4] += (1.0 / gp.pr - 1.0) * heat
        if pass_ == 0:
            for c in range(5):
                out_full[c] = F[c]
        else:
            for c in range(5):
                out_half[c] = F[c]


cdef void point_gather(double* wl, double* dl, double* wr, double* dr, double* d0,
                       Py_ssize_t n, Py_ssize_t p, double dt, GasParams* gp,
                       double* of, double* oh) noexcept nogil:
    cdef double bl[5]
    cdef double br[5]
    cdef double gl[15]
    cdef double gr[15]
    cdef double g0[15]
    cdef double rf[5]
    cdef double rh[5]
    cdef int c, s
    for c in range(5):
        bl[c] = wl[c * n + p]
        br[c] = wr[c * n + p]
        for s in range(3):
            gl[5 * s + c] = dl[(s * 5 + c) * n + p]
            gr[5 * s + c] = dr[(s * 5 + c) * n + p]
            g0[5 * s + c] = d0[(s * 5 + c) * n + p]
    point_flux(bl, gl, br, gr, g0, dt, gp, rf, rh)
    for c in range(5):
        of[c * n + p] = rf[c]
        oh[c * n + p] = rh[c]


def gks_flux_batch(double[:, ::1] wl, double[:, :, ::1] dl, double[:, ::1] wr,
                   double[:, :, ::1] dr, double[:, :, ::1] d0, double dt,
                   double K, int viscous, double tau_eps, double tau_c, double mu0,
                   double t0, double mu_exp, double pr, int num_threads=1,
                   double gn=0.0, double gt1=0.0, double gt2=0.0):
    """Time-integrated fluxes over [0, dt] and [0, dt/2] at N face-frame points.

    Array layouts: states (5, N), slopes (3, 5, N).  ``gn, gt1, gt2`` is a
    uniform body acceleration in the face frame.  Returns two (5, N) arrays.
    """
    cdef Py_ssize_t n = wl.shape[1]
    cdef Py_ssize_t p
    cdef GasParams gp
    gp.K = K
    gp.viscous = viscous
    gp.tau_eps = tau_eps
    gp.tau_c = tau_c
    gp.mu0 = mu0
    gp.t0 = t0
    gp.mu_exp = mu_exp
    gp.pr = pr
    gp.g[0] = gn
    gp.g[1] = gt1
    gp.g[2] = gt2
    gp.forced = gn != 0.0 or gt1 != 0.0 or gt2 != 0.0
    full = np.empty((5, n))
    half = np.empty((5, n))
    cdef double[:, ::1] of = full
    cdef double[:, ::1] oh = half
    with nogil:
        for p in prange(n, num_threads=num_threads, schedule="static"):
            point_gather(&wl[0, 0], &dl[0, 0, 0], &wr[0, 0], &dr[0, 0, 0], &d0[0, 0, 0],
                         n, p, dt, &gp, &of[0, 0], &oh[0, 0])
    return full, half


def erfc_c(double x):
    """The C library erfc used by the kernel (exposed for accuracy tests)."""
    return c_erfc(x)


# -- line reconstruction --------------------------------------------------------


def recon_lines(double[:, :, ::1] v, Py_ssize_t start, Py_ssize_t n,
                double[:, :, ::1] cv, double[:, :, ::1] cd, double[:, ::1] lin,
                double[:, ::1] q5v, double[:, ::1] q5d, int weno, double eps,
                int want_der, int num_threads=1):
    """Values (and slopes) at P points in each of ``n`` cells along axis 1 of ``v``.

    ``v`` has shape (A, S, B); output cell m uses the stencil
    ``v[:, start+m : start+m+5, :]``.  Tables: candidate weights ``cv, cd``
    (P, 3, 3), linear weights ``lin`` (P, 3), quartic weights ``q5v, q5d``
    (P, 5).  Returns arrays of shape (A, n, P, B); slopes per unit width.
    """
    cdef Py_ssize_t A = v.shape[0], B = v.shape[2], P = cv.shape[0]
    vals = np.empty((A, n, P, B))
    ders = np.empty((A, n, P, B)) if want_der else np.empty((1, 1, 1, 1))
    cdef double[:, :, :, ::1] ov = vals
    cdef double[:, :, :, ::1] od = ders
    cdef Py_ssize_t a, m, b, p, k, j, idx
    cdef double s[5]
    cdef double beta[3]
    cdef double w[3]
    cdef double hi, lo, e, tot, val, der
    with nogil:
        for idx in prange(A * n, num_threads=num_threads, schedule="static"):
            a = idx // n
            m = idx % n
            for b in range(B):
                for j in range(5):
                    s[j] = v[a, start + m + j, b]
                if weno:
                    beta[0] = 13.0 / 12.0 * (s[0] - 2 * s[1] + s[2]) ** 2 + 0.25 * (s[0] - 4 * s[1] + 3 * s[2]) ** 2
                    beta[1] = 13.0 / 12.0 * (s[1] - 2 * s[2] + s[3]) ** 2 + 0.25 * (s[1] - s[3]) ** 2
                    beta[2] = 13.0 / 12.0 * (s[2] - 2 * s[3] + s[4]) ** 2 + 0.25 * (3 * s[2] - 4 * s[3] + s[4]) ** 2
                    hi = s[0]
                    lo = s[0]
                    for j in range(1, 5):
                        if s[j] > hi:
                            hi = s[j]
                        if s[j] < lo:
                            lo = s[j]
                    e = eps * (hi - lo) * (hi - lo) + 1e-40
                    for k in range(3):
                        beta[k] = 1.0 / ((e + beta[k]) * (e + beta[k]))
                    for p in range(P):
                        tot = 0.0
                        for k in range(3):
                            w[k] = lin[p, k] * beta[k]
                            tot = tot + w[k]
                        val = 0.0
                        der = 0.0
                        for k in range(3):
                            val = val + w[k] / tot * (cv[p, k, 0] * s[k] + cv[p, k, 1] * s[k + 1] + cv[p, k, 2] * s[k + 2])
                            if want_der:
                                der = der + w[k] / tot * (cd[p, k, 0] * s[k] + cd[p, k, 1] * s[k + 1] + cd[p, k, 2] * s[k + 2])
                        ov[a, m, p, b] = val
                        if want_der:
                            od[a, m, p, b] = der
                else:
                    for p in range(P):
                        val = 0.0
                        der = 0.0
                        for j in range(5):
                            val = val + q5v[p, j] * s[j]
                            der = der + q5d[p, j] * s[j]
                        ov[a, m, p, b] = val
                        if want_der:
                            od[a, m, p, b] = der
    return vals, (ders if want_der else None)
