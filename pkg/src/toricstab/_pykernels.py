"""Pure-Python/numpy implementations of the hot kernels.

``toricstab.kernels`` picks the compiled ``_ckernels`` module when it imports
and falls back to this one otherwise. Both must agree (tested).
"""

import numpy as np


def pivot(rows, r, c):
    """In-place exact pivot of a dense tableau (list of lists) on entry (r, c)."""
    row_r = rows[r]
    p = row_r[c]
    nz = [k for k, v in enumerate(row_r) if v]
    for k in nz:
        row_r[k] = row_r[k] / p
    for i, row_i in enumerate(rows):
        if i == r:
            continue
        f = row_i[c]
        if not f:
            continue
        for k in nz:
            row_i[k] = row_i[k] - f * row_r[k]


def guillemin_hessians(ell, normals):
    """Hessians of (1/2) sum_k l_k log l_k given facet values ``ell`` (N, m); shape (N, n, n)."""
    w = 0.5 / ell
    return np.einsum("pk,ki,kj->pij", w, normals, normals)


def guillemin_logdet(ell, subsets, subset_sq_dets):
    """log det of the Guillemin Hessian by the Cauchy-Binet expansion.

    All summands are positive, so the result stays accurate next to the
    boundary where the direct determinant cancels catastrophically.
    """
    n = len(subsets[0])
    inv = 1.0 / ell
    total = np.zeros(ell.shape[0])
    for subset, sq in zip(subsets, subset_sq_dets):
        if sq == 0.0:
            continue
        term = np.full(ell.shape[0], sq)
        for k in subset:
            term *= inv[:, k]
        total += term
    return np.log(total) + n * np.log(0.5)


def sym_inverse(h):
    """Batched inverse of symmetric positive definite matrices, shape (N, n, n)."""
    return np.linalg.inv(h)


def sym_logdet(h):
    """Batched log det of symmetric matrices; NaN where not positive definite."""
    sign, logdet = np.linalg.slogdet(h)
    return np.where(sign > 0, logdet, np.nan)
