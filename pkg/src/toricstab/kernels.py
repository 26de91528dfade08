"""Backend selection for the hot kernels.

The compiled extension ``toricstab._ckernels`` is used when it is importable;
set ``TORICSTAB_PURE=1`` to force the pure-Python fallback.
"""

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("TORICSTAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def pivot(rows, r, c):
    return _impl.pivot(rows, r, c)


def guillemin_hessians(ell, normals):
    return _impl.guillemin_hessians(np.ascontiguousarray(ell, dtype=float), np.ascontiguousarray(normals, dtype=float))


def guillemin_logdet(ell, subsets, subset_sq_dets):
    return _impl.guillemin_logdet(np.ascontiguousarray(ell, dtype=float), subsets, subset_sq_dets)


def sym_inverse(h):
    return _impl.sym_inverse(h)


def sym_logdet(h):
    return _impl.sym_logdet(h)
