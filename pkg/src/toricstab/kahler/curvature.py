"""Scalar curvature ``S(u) = -(1/2) sum_ij d_i d_j u^{ij}`` by finite differences.

The inverse Hessian field is differenced with central stencils at steps ``h``
and ``h/2`` and the two results are combined by Richardson extrapolation. The
step at ``x`` is ``fd_step * min_k l_k(x) / (margin * max_k |normal_k|_1)``:
equal to ``fd_step`` on the edge of the margin band and growing in proportion
to the distance to the boundary inside it, so the relative truncation error is
uniform and the stencil never leaves ``P``.
"""

from itertools import combinations

import numpy as np

from .. import kernels
from ..errors import SingularHessian, TooCloseToBoundary
from ..polytope import barycenter
from .potential import DEFAULT_GRID

CHUNK = 20000


def _stencil(n):
    """Offsets (in units of h) and the combination producing sum_ij d_i d_j U^ij."""
    offsets = [np.zeros(n)]
    terms = []  # (offset index, i, j, coefficient)
    terms.extend((0, i, i, -2.0) for i in range(n))
    for i in range(n):
        for s in (1.0, -1.0):
            e = np.zeros(n)
            e[i] = s
            offsets.append(e)
            terms.append((len(offsets) - 1, i, i, 1.0))
    for i, j in combinations(range(n), 2):
        for si in (1.0, -1.0):
            for sj in (1.0, -1.0):
                e = np.zeros(n)
                e[i], e[j] = si, sj
                offsets.append(e)
                # 2 * (cross difference / 4)
                terms.append((len(offsets) - 1, i, j, 0.5 * si * sj))
    return np.array(offsets), terms


def _second_difference_sum(u, x, h):
    n = x.shape[1]
    offsets, terms = _stencil(n)
    pts = x[:, None, :] + h[:, None, None] * offsets[None, :, :]
    flat = pts.reshape(-1, n)
    inv = kernels.sym_inverse(u.hessian(flat)).reshape(x.shape[0], len(offsets), n, n)
    total = np.zeros(x.shape[0])
    for k, i, j, c in terms:
        total += c * inv[:, k, i, j]
    return total / h**2


def _check_conditioning(u, x):
    eig = np.linalg.eigvalsh(u.hessian(x))
    bad = ~(eig[:, 0] > 1e-10 * np.abs(eig[:, -1]))
    if bad.any():
        k = int(np.argmax(bad))
        raise SingularHessian(f"Hessian is singular or indefinite at {x[k].tolist()}")


def abreu_scalar_batch(u, x, grid=DEFAULT_GRID, check_margin=True):
    """Scalar curvature at each row of ``x`` (shape (N, n))."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    ell = u.ell(x)
    m = ell.min(axis=1)
    if check_margin and not (m >= grid.margin * (1 - 1e-12)).all():
        k = int(np.argmin(m))
        raise TooCloseToBoundary(f"point {x[k].tolist()} is within the margin {grid.margin:g} of the boundary")
    if not (m > 0).all():
        raise TooCloseToBoundary("point outside the interior")
    scale = np.abs(u.normals).sum(axis=1).max()
    out = np.empty(x.shape[0])
    for s in range(0, x.shape[0], CHUNK):
        xs = x[s : s + CHUNK]
        _check_conditioning(u, xs)
        h = grid.fd_step * m[s : s + CHUNK] / (grid.margin * scale)
        coarse = _second_difference_sum(u, xs, h)
        fine = _second_difference_sum(u, xs, h / 2)
        out[s : s + CHUNK] = -0.5 * (4.0 * fine - coarse) / 3.0
    return out


def abreu_scalar(u, x, grid=DEFAULT_GRID):
    return float(abreu_scalar_batch(u, np.asarray([x], dtype=float), grid)[0])


def clamp_to_margin(P, x, ell, margin):
    """Pull points within ``margin`` of the boundary radially towards the barycenter.

    Returns the moved points; points already at least ``margin`` inside are kept.
    """
    c = np.array([float(v) for v in barycenter(P)])
    lc = np.array([float(f(barycenter(P))) for f in P.facets])
    if margin >= lc.min():
        raise TooCloseToBoundary("margin exceeds the inradius at the barycenter")
    x = np.array(x, dtype=float, copy=True)
    low = ell.min(axis=1) < margin
    if not low.any():
        return x
    el = ell[low]
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(el < margin, (lc - margin) / (lc - el), np.inf)
    theta = np.minimum(theta.min(axis=1), 1.0)
    x[low] = c + theta[:, None] * (x[low] - c)
    return x


def sample_interior(P, count, margin, rng):
    """Uniform samples from ``{x in P : min_k l_k(x) >= margin}`` by rejection."""
    verts = np.array([[float(c) for c in v] for v in P.vertices])
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    normals = np.array([f.normal for f in P.facets], dtype=float)
    offsets = np.array([float(f.offset) for f in P.facets])
    out = []
    while len(out) < count:
        cand = rng.uniform(lo, hi, size=(4 * count, P.dim))
        ok = (cand @ normals.T - offsets).min(axis=1) >= margin
        out.extend(cand[ok])
    return np.array(out[:count])


def grid_points(P, spacing, margin):
    """Points of the axis grid of the given spacing at least ``margin`` inside ``P``."""
    verts = np.array([[float(c) for c in v] for v in P.vertices])
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    axes = [np.arange(a, b + 0.5 * spacing, spacing) for a, b in zip(lo, hi)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.dim)
    normals = np.array([f.normal for f in P.facets], dtype=float)
    offsets = np.array([float(f.offset) for f in P.facets])
    return mesh[(mesh @ normals.T - offsets).min(axis=1) >= margin]
