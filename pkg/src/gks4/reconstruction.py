"""WENO-JS and linear reconstruction of point values and gradients at face Gauss points.

One-dimensional building blocks work on cell averages of unit width with
the local coordinate ``x`` in [-1/2, 1/2] of the cell being reconstructed.
Coefficient tables come from exact integration of monomials over cells, so
any evaluation point can be requested.

The face pipeline works on a "rotated" view of the field: spatial axes are
ordered (normal, tangential-1, tangential-2) with the tangential axes the
cyclic successors of the normal, and the momentum components are permuted
the same way.  For every face it produces left, right and central states
plus their three derivatives at the 2x2 Gauss points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import backend
from .kinetics import GasModel, eigen_decomposition, is_valid

GAUSS_X = 0.5 / np.sqrt(3.0)
MODES = ("weno5_js", "linear5")
PROJECTIONS = ("component", "characteristic")
TINY = 1e-40


@dataclass(frozen=True)
class ReconConfig:
    mode: str = "weno5_js"
    projection: str = "component"
    weno_epsilon: float = 1e-6
    positivity_fallback: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown reconstruction mode {self.mode!r}")
        if self.projection not in PROJECTIONS:
            raise ValueError(f"unknown projection {self.projection!r}")
        if not self.weno_epsilon > 0:
            raise ValueError("weno_epsilon must be positive")


# -- coefficient tables ------------------------------------------------------


def _cell_integral_matrix(offsets, degree):
    """Row j: averages of x^0..x^degree over the unit cell centred at offsets[j]."""
    rows = []
    for o in offsets:
        hi, lo = o + 0.5, o - 0.5
        rows.append([(hi ** (m + 1) - lo ** (m + 1)) / (m + 1) for m in range(degree + 1)])
    return np.array(rows)


def _point_rows(x, degree):
    val = np.array([x ** m for m in range(degree + 1)])
    der = np.array([m * x ** (m - 1) if m else 0.0 for m in range(degree + 1)])
    return val, der


@lru_cache(maxsize=None)
def stencil_coefficients(offsets: tuple, x: float):
    """Weights on the cell averages giving value and derivative at ``x``.

    The interpolating polynomial has degree ``len(offsets) - 1``.
    """
    degree = len(offsets) - 1
    inv = np.linalg.inv(_cell_integral_matrix(offsets, degree))
    val, der = _point_rows(x, degree)
    return val @ inv, der @ inv


CANDIDATES = ((-2, -1, 0), (-1, 0, 1), (0, 1, 2))
FULL5 = (-2, -1, 0, 1, 2)


@lru_cache(maxsize=None)
def weno_tables(x: float):
    """Candidate value/derivative weights (3, 5) and the linear weights at ``x``."""
    cv = np.zeros((3, 5))
    cd = np.zeros((3, 5))
    for k, cand in enumerate(CANDIDATES):
        v, d = stencil_coefficients(cand, x)
        cv[k, k:k + 3] = v
        cd[k, k:k + 3] = d
    full_v, _ = stencil_coefficients(FULL5, x)
    lin, *_ = np.linalg.lstsq(cv.T, full_v, rcond=None)
    if np.max(np.abs(cv.T @ lin - full_v)) > 1e-12:
        raise RuntimeError(f"no consistent linear weights at x={x}")
    return cv, cd, lin


def smoothness_indicators(s):
    """Jiang-Shu indicators of the three quadratic candidates of a 5-cell stencil."""
    v0, v1, v2, v3, v4 = s
    b0 = 13.0 / 12.0 * (v0 - 2 * v1 + v2) ** 2 + 0.25 * (v0 - 4 * v1 + 3 * v2) ** 2
    b1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
    b2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (3 * v2 - 4 * v3 + v4) ** 2
    return b0, b1, b2


def _stencil_eps(s, eps):
    hi = np.maximum(np.maximum(np.maximum(s[0], s[1]), np.maximum(s[2], s[3])), s[4])
    lo = np.minimum(np.minimum(np.minimum(s[0], s[1]), np.minimum(s[2], s[3])), s[4])
    return eps * (hi - lo) ** 2 + TINY


def weno_weights(s, x: float, eps: float = 1e-6):
    """Nonlinear JS weights at point ``x`` for the 5-cell stencil ``s``."""
    _, _, lin = weno_tables(x)
    e = _stencil_eps(s, eps)
    alpha = [lin[k] / (e + b) ** 2 for k, b in enumerate(smoothness_indicators(s))]
    total = alpha[0] + alpha[1] + alpha[2]
    return [a / total for a in alpha]


def _dot(coef, s):
    out = coef[0] * s[0]
    for c, v in zip(coef[1:], s[1:]):
        if c != 0.0:
            out = out + c * v
    return out


def weno_points(s, xs, eps: float = 1e-6, derivative: bool = True):
    """WENO-JS value (and slope) at each point in ``xs`` from stencil ``s``.

    ``s`` is a sequence of 5 arrays (cells -2..2 around the target cell).
    Slopes are per unit cell width and use the value weights applied to
    the candidate derivatives.
    """
    betas = smoothness_indicators(s)
    e = _stencil_eps(s, eps)
    inv = [1.0 / (e + b) ** 2 for b in betas]
    cand_v = {}
    out = []
    for x in xs:
        cv, cd, lin = weno_tables(float(x))
        alpha = [lin[k] * inv[k] for k in range(3)]
        total = alpha[0] + alpha[1] + alpha[2]
        w = [a / total for a in alpha]
        val = sum(w[k] * _dot(cv[k, k:k + 3], s[k:k + 3]) for k in range(3))
        if derivative:
            key = float(x)
            if key not in cand_v:
                cand_v[key] = [_dot(cd[k, k:k + 3], s[k:k + 3]) for k in range(3)]
            der = sum(w[k] * cand_v[key][k] for k in range(3))
            out.append((val, der))
        else:
            out.append((val, None))
    return out


def linear_points(s, xs, derivative: bool = True):
    """Value (and slope) of the 5-cell quartic at each point in ``xs``."""
    out = []
    for x in xs:
        cv, cd = stencil_coefficients(FULL5, float(x))
        out.append((_dot(cv, s), _dot(cd, s) if derivative else None))
    return out


def weno5_value_slope(stencil, side: str, eps: float = 1e-6, width: float = 1.0):
    """Edge value and slope of the middle cell of a 5-cell stencil.

    ``side='left'`` gives the state just left of the right edge (x=+1/2),
    ``side='right'`` the state just right of the left edge (x=-1/2).
    """
    x = 0.5 if side == "left" else -0.5
    s = [np.asarray(v, dtype=float) for v in stencil]
    (val, der), = weno_points(s, (x,), eps)
    return val, der / width


def linear5_value_slope(stencil, side: str, width: float = 1.0):
    """Edge value and slope from the full-stencil polynomial.

    A 5-cell stencil gives the upwind-biased quartic of the middle cell; a
    6-cell stencil gives the central quintic evaluated at the face between
    its third and fourth cells (``side`` is then ignored).
    """
    s = [np.asarray(v, dtype=float) for v in stencil]
    if len(s) == 6:
        cv, cd = stencil_coefficients(CENTRAL6, 0.0)
        return _dot(cv, s), _dot(cd, s) / width
    x = 0.5 if side == "left" else -0.5
    (val, der), = linear_points(s, (x,))
    return val, der / width


# the central polynomial is centred on the face: cells at -5/2..5/2
CENTRAL6 = (-2.5, -1.5, -0.5, 0.5, 1.5, 2.5)


# -- characteristic projection -------------------------------------------------


def characteristic_matrices(q_star, gas: GasModel):
    """Face-frame (left, right) eigenvector matrices; identity where ``q_star`` is invalid.

    ``q_star`` is in the face frame (normal momentum first).  Returns the
    matrices and the mask of faces that fell back to component-wise.
    """
    bad = ~is_valid(q_star)
    safe = np.where(bad, np.array([1.0, 0.0, 0.0, 0.0, 2.5]).reshape((5,) + (1,) * (q_star.ndim - 1)), q_star)
    L, R = eigen_decomposition(safe, 0, gas)
    if np.any(bad):
        eye = np.eye(5).reshape((5, 5) + (1,) * (q_star.ndim - 1))
        L = np.where(bad, eye, L)
        R = np.where(bad, eye, R)
    return L, R, bad


def project(M, q):
    """Apply a field of 5x5 matrices (5, 5, ...) to a field of 5-vectors (5, ...)."""
    return np.einsum("ab...,b...->a...", M, q)


def characteristic_wrap(stencil, q_star, gas: GasModel, recon):
    """Reconstruct in characteristic variables of ``q_star`` and map back.

    ``stencil`` is a list of face-frame 5-vector arrays; ``recon`` maps a
    stencil to a tuple of linear outputs (values or slopes), each of which is
    back-projected.
    """
    L, R, _ = characteristic_matrices(np.asarray(q_star, dtype=float), gas)
    w = [project(L, np.asarray(v, dtype=float)) for v in stencil]
    return tuple(project(R, o) for o in recon(w))


# -- face pipeline ------------------------------------------------------------

AXIS_ORDER = {0: (0, 1, 2), 1: (1, 2, 0), 2: (2, 0, 1)}
GHOST = 3


def rotated_view(q, axis: int):
    """(5, X, Y, Z) -> (5, N, T1, T2) with momentum in (normal, t1, t2) order."""
    sp = AXIS_ORDER[axis]
    comps = [0] + [1 + a for a in sp] + [4]
    return np.transpose(q, (0,) + tuple(1 + a for a in sp))[comps]


def unrotate_faces(f, axis: int):
    """Inverse of :func:`rotated_view` for face arrays (5, N, T1, T2)."""
    sp = AXIS_ORDER[axis]
    out = np.empty_like(f)
    out[0] = f[0]
    out[4] = f[4]
    for n, a in enumerate(sp):
        out[1 + a] = f[1 + n]
    inv = np.argsort(sp)
    return np.transpose(out, (0,) + tuple(1 + a for a in inv))


@dataclass
class FacePoints:
    """Gauss-point data for a block of faces normal to one axis (face frame).

    Arrays have trailing shape (nf, n1, 2, n2, 2); slopes are stacked
    (d/dn, d/dt1, d/dt2) on a leading axis of length 3.
    """

    left: np.ndarray
    left_slopes: np.ndarray
    right: np.ndarray
    right_slopes: np.ndarray
    center: np.ndarray
    center_slopes: np.ndarray
    fallback: np.ndarray


def _take(a, axis, start, n):
    idx = [slice(None)] * a.ndim
    idx[axis] = slice(start, start + n)
    return a[tuple(idx)]


@lru_cache(maxsize=None)
def _kernel_tables(xs: tuple):
    cv = np.zeros((len(xs), 3, 3))
    cd = np.zeros((len(xs), 3, 3))
    lin = np.zeros((len(xs), 3))
    q5v = np.zeros((len(xs), 5))
    q5d = np.zeros((len(xs), 5))
    for p, x in enumerate(xs):
        tv, td, lw = weno_tables(x)
        for k in range(3):
            cv[p, k] = tv[k, k:k + 3]
            cd[p, k] = td[k, k:k + 3]
        lin[p] = lw
        q5v[p], q5d[p] = stencil_coefficients(FULL5, x)
    return cv, cd, lin, q5v, q5d


def line_points(v, start: int, n: int, xs, weno: bool, eps: float = 1e-6,
                derivative: bool = True, which: str | None = None):
    """Reconstruct along axis 1 of ``v`` (A, S, B) at points ``xs`` of cells start+2..start+n+1.

    Returns (values, slopes) shaped (A, n, P, B); slopes are per unit
    width, None unless requested.  Uses the compiled kernel when available.
    """
    xs = tuple(float(x) for x in xs)
    use = which or backend.NAME
    if use == "compiled":
        cv, cd, lin, q5v, q5d = _kernel_tables(xs)
        return backend._kernels.recon_lines(np.ascontiguousarray(v, dtype=float), start, n, cv, cd, lin,
                                            q5v, q5d, int(weno), eps, int(derivative),
                                            backend.get_threads())
    s = [v[:, start + j:start + j + n, :] for j in range(5)]
    res = weno_points(s, xs, eps, derivative) if weno else linear_points(s, xs, derivative)
    vals = np.stack([r[0] for r in res], axis=2)
    ders = np.stack([r[1] for r in res], axis=2) if derivative else None
    return vals, ders


def _tangential(values, axis, n, width, cfg: ReconConfig, derivative=False):
    """Gauss-point reconstruction along ``axis`` for interior cells.

    ``values`` holds line data with 2 extra cells on each side of the ``n``
    interior cells.  Returns (vals, ders) with a new Gauss axis (length 2,
    ordered -x, +x) inserted after ``axis``; ders is None unless requested.
    """
    shp = values.shape
    A = int(np.prod(shp[:axis]))
    B = int(np.prod(shp[axis + 1:]))
    v3 = np.ascontiguousarray(values).reshape(A, shp[axis], B)
    vals, ders = line_points(v3, 0, n, (-GAUSS_X, GAUSS_X), cfg.mode == "weno5_js",
                             cfg.weno_epsilon, derivative)
    out = shp[:axis] + (n, 2) + shp[axis + 1:]
    return vals.reshape(out), (ders.reshape(out) / width if derivative else None)


def _normal_step(rv, f0, nf, t1, t2, dn, cfg: ReconConfig, gas: GasModel):
    """Line-averaged left/right/central values and normal derivatives.

    ``rv``: rotated ghosted view.  Faces f0..f0+nf-1 (face f sits between
    interior cells f-1 and f), for tangential line ranges ``t1``, ``t2``.
    """
    blk = np.ascontiguousarray(rv[:, f0:f0 + nf + 5, t1[0]:t1[1], t2[0]:t2[1]])
    shape = (5, nf) + blk.shape[2:]
    s6 = [_take(blk, 1, k, nf) for k in range(6)]
    cv, cd = stencil_coefficients(CENTRAL6, 0.0)
    v0, d0 = _dot(cv, s6), _dot(cd, s6) / dn
    weno = cfg.mode == "weno5_js"

    if cfg.projection == "characteristic":
        L, R, _ = characteristic_matrices(0.5 * (s6[2] + s6[3]), gas)
        w = np.stack([project(L, v) for v in s6], axis=1).reshape(5, 6, -1)
        vl, gl = line_points(w, 0, 1, (0.5,), weno, cfg.weno_epsilon)
        vr, gr = line_points(w, 1, 1, (-0.5,), weno, cfg.weno_epsilon)
        vl, gl, vr, gr = (project(R, a.reshape(shape)) for a in (vl, gl, vr, gr))
    else:
        b3 = blk.reshape(5, nf + 5, -1)
        vl, gl = line_points(b3, 0, nf, (0.5,), weno, cfg.weno_epsilon)
        vr, gr = line_points(b3, 1, nf, (-0.5,), weno, cfg.weno_epsilon)
        vl, gl, vr, gr = (a.reshape(shape) for a in (vl, gl, vr, gr))
    return (vl, gl / dn), (vr, gr / dn), (v0, d0)


def face_points(rv, f0, nf, widths, cfg: ReconConfig, gas: GasModel) -> FacePoints:
    """Three-step reconstruction for faces f0..f0+nf-1 of a rotated view."""
    dn, d1, d2 = widths
    n1 = rv.shape[2] - 2 * GHOST
    n2 = rv.shape[3] - 2 * GHOST
    t1 = (GHOST - 2, GHOST + n1 + 2)
    t2 = (GHOST - 2, GHOST + n2 + 2)
    sides = _normal_step(rv, f0, nf, t1, t2, dn, cfg, gas)

    out = []
    for val, gn in sides:
        # along t1 (array axis 2)
        v1, g1 = _tangential(val, 2, n1, d1, cfg, derivative=True)
        gn1, _ = _tangential(gn, 2, n1, d1, cfg)
        # along t2 (array axis 4 after the inserted Gauss axis)
        v12, g2 = _tangential(v1, 4, n2, d2, cfg, derivative=True)
        gn12, _ = _tangential(gn1, 4, n2, d2, cfg)
        g12, _ = _tangential(g1, 4, n2, d2, cfg)
        out.append((v12, np.stack([gn12, g12, g2])))

    (wl, dl), (wr, dr), (w0, d0) = out
    fallback = np.zeros(wl.shape[1:], dtype=bool)
    if cfg.positivity_fallback:
        fallback = ~(is_valid(wl) & is_valid(wr))
        if np.any(fallback):
            ql = rv[:, f0 + 2:f0 + 2 + nf, GHOST:GHOST + n1, GHOST:GHOST + n2][:, :, :, None, :, None]
            qr = rv[:, f0 + 3:f0 + 3 + nf, GHOST:GHOST + n1, GHOST:GHOST + n2][:, :, :, None, :, None]
            wl = np.where(fallback, ql, wl)
            wr = np.where(fallback, qr, wr)
            dl = np.where(fallback, 0.0, dl)
            dr = np.where(fallback, 0.0, dr)
            d0 = np.where(fallback, 0.0, d0)
    return FacePoints(wl, dl, wr, dr, w0, d0, fallback)


def reconstruct_face(q, axis: int, index, widths, cfg: ReconConfig, gas: GasModel):
    """Gauss-point data of a single face.

    ``q`` is a ghosted (5, X, Y, Z) field; ``index`` = (i, j, k) of the cell
    on the high side of the face along ``axis`` in interior numbering.
    Returns a :class:`FacePoints` with trailing shape (2, 2) (t1, t2 Gauss
    points) in the face frame.
    """
    sp = AXIS_ORDER[axis]
    rv = rotated_view(q, axis)
    i_n, i_1, i_2 = (index[a] for a in sp)
    sub = rv[:, :, i_1:i_1 + 2 * GHOST + 1, i_2:i_2 + 2 * GHOST + 1]
    fp = face_points(sub, i_n, 1, tuple(widths[a] for a in sp), cfg, gas)
    pick = lambda a: a[..., 0, 0, :, 0, :]
    return FacePoints(pick(fp.left), pick(fp.left_slopes), pick(fp.right), pick(fp.right_slopes),
                      pick(fp.center), pick(fp.center_slopes), fp.fallback[0, 0, :, 0, :])
