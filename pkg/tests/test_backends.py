import json
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from toricstab import _pykernels, catalog, kernels
from toricstab.kahler import energy_M, guillemin
from toricstab.kahler.potential import _cauchy_binet_data

ckernels = pytest.importorskip("toricstab._ckernels")


def rows(seed):
    rng = np.random.default_rng(seed)
    return [[Fraction(int(v), int(d)) for v, d in zip(rng.integers(-5, 6, 6), rng.integers(1, 4, 6))] for _ in range(4)]


def test_pivot_agrees():
    for seed in range(20):
        a, b = rows(seed), rows(seed)
        r = next(i for i in range(4) if a[i][0] != 0)
        _pykernels.pivot(a, r, 0)
        ckernels.pivot(b, r, 0)
        assert a == b


@pytest.mark.parametrize("name", ["interval", "square", "hirzebruch_fano", "cube"])
def test_float_kernels_agree(name):
    P = catalog.lookup(name).polytope
    u = guillemin(P)
    rng = np.random.default_rng(0)
    verts = np.array([[float(c) for c in v] for v in P.vertices])
    w = rng.dirichlet(np.ones(len(verts)), size=500)
    x = w @ verts
    ell = np.ascontiguousarray(u.ell(x))
    normals = np.ascontiguousarray(u.normals)
    hp = _pykernels.guillemin_hessians(ell, normals)
    hc = ckernels.guillemin_hessians(ell, normals)
    assert np.allclose(hp, hc, rtol=1e-14, atol=0)
    subsets, sq = _cauchy_binet_data(P)
    assert np.allclose(_pykernels.guillemin_logdet(ell, subsets, sq), ckernels.guillemin_logdet(ell, subsets, sq), rtol=1e-14)
    assert np.allclose(_pykernels.sym_inverse(hp), ckernels.sym_inverse(hp), rtol=1e-12)
    assert np.allclose(_pykernels.sym_logdet(hp), ckernels.sym_logdet(hp), rtol=1e-13)


def test_logdet_nan_for_indefinite():
    h = np.array([[[1.0, 2.0], [2.0, 1.0]], [[2.0, 0.0], [0.0, 3.0]]])
    for impl in (_pykernels, ckernels):
        out = impl.sym_logdet(h)
        assert np.isnan(out[0]) and out[1] == pytest.approx(np.log(6.0))


def test_environment_forces_pure_backend():
    script = (
        "import json; from toricstab import kernels, catalog; from toricstab.kahler import energy_M, guillemin; "
        "P = catalog.square(); print(json.dumps([kernels.BACKEND, energy_M(P, guillemin(P)).VM]))"
    )
    env = dict(os.environ, TORICSTAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True, check=True)
    backend, vm = json.loads(out.stdout)
    assert backend == "python"
    forced = os.environ.get("TORICSTAB_PURE", "") in ("1", "true", "yes")
    assert kernels.BACKEND == ("python" if forced else "cython")
    P = catalog.square()
    assert vm == pytest.approx(energy_M(P, guillemin(P)).VM, rel=1e-13)
