from fractions import Fraction
import math

import mpmath
import numpy as np
import pytest

from toricstab import catalog, samples
from toricstab.errors import NotNormalized, SingularHessian
from toricstab.kahler import (
    GridSpec,
    L0,
    M0,
    Polynomial,
    energy_E,
    energy_M,
    guillemin,
    j_proxy,
    linear_functional,
    normalize,
    ray_energy,
    reference_curvature_mean,
)
from toricstab.plconvex import AffineFunction
from toricstab.stability import donaldson_L, simple_pl

mpmath.mp.dps = 20


def interval_oracle(c4):
    """VM of (1/2)(x log x + (1-x) log(1-x)) + c4 x^4 on [0, 1] by tanh-sinh quadrature."""
    u = lambda x: (x * mpmath.log(x) + (1 - x) * mpmath.log(1 - x)) / 2 + c4 * x**4  # noqa: E731
    upp = lambda x: 1 / (2 * x * (1 - x)) + 12 * c4 * x**2  # noqa: E731
    nonlinear = -mpmath.quad(lambda x: mpmath.log(upp(x)), [0, 1])
    linear = c4 - 2 * mpmath.quad(u, [0, 1])  # u(0) + u(1) = c4
    return float(nonlinear + linear)


def xlogx(t):
    return mpmath.mpf(0) if t == 0 else t * mpmath.log(t)


def square_oracle(a, b):
    """VM of the square Guillemin potential plus a x^2 y^2 + b x^4."""

    def hess(x, y):
        hxx = 1 / (2 * x) + 1 / (2 * (1 - x)) + 2 * a * y**2 + 12 * b * x**2
        hyy = 1 / (2 * y) + 1 / (2 * (1 - y)) + 2 * a * x**2
        hxy = 4 * a * x * y
        return hxx * hyy - hxy**2

    def u(x, y):
        g = sum(xlogx(t) for t in (x, y, 1 - x, 1 - y)) / 2
        return g + a * x**2 * y**2 + b * x**4

    nonlinear = -mpmath.quad(lambda x, y: mpmath.log(hess(x, y)), [0, 1], [0, 1])
    # boundary: each edge with unit lattice measure; interior weight S_hat = 4
    edges = mpmath.quad(lambda t: u(t, 0) + u(t, 1) + u(0, t) + u(1, t), [0, 1])
    linear = edges - 4 * mpmath.quad(u, [0, 1], [0, 1])
    return float(nonlinear + linear)


def test_closed_forms():
    I = catalog.interval()
    r = energy_M(I, guillemin(I))
    assert r.VM == pytest.approx(math.log(2) - 1.5, abs=1e-9)
    assert r.E == pytest.approx(0.25, abs=1e-10)
    S = catalog.square()
    assert energy_M(S, guillemin(S)).VM == pytest.approx(2 * (math.log(2) - 1.5), abs=1e-9)


def test_interval_with_polynomial_matches_mpmath():
    I = catalog.interval()
    for c4 in (Fraction(1, 2), Fraction(3)):
        r = energy_M(I, guillemin(I) + Polynomial.from_dict({(4,): c4}))
        assert r.VM == pytest.approx(interval_oracle(float(c4)), abs=1e-8)
        assert r.error_estimate < 1e-5


def test_square_with_polynomial_matches_mpmath():
    S = catalog.square()
    u = guillemin(S) + Polynomial.from_dict({(2, 2): 1, (4, 0): Fraction(1, 2)})
    assert energy_M(S, u).VM == pytest.approx(square_oracle(1, 0.5), abs=1e-6)


def test_report_consistency():
    P = catalog.hirzebruch_fano()
    r = energy_M(P, guillemin(P))
    assert r.VM == r.nonlinear_term + r.linear_term
    assert r.M == r.VM / r.volume and r.volume == 4.0
    assert set(r.to_json()) == {"E", "M", "VM", "nonlinear_term", "linear_term", "error_estimate", "volume", "nodes"}
    assert r.E == pytest.approx(energy_E(P, guillemin(P)), abs=1e-15)


@pytest.mark.parametrize("name", ["interval", "square", "hirzebruch_fano"])
def test_translation_identity(name):
    P = catalog.lookup(name).polytope
    u = guillemin(P)
    base = energy_M(P, u).VM
    rng = samples.rng_from_seed(12)
    for _ in range(20):
        ell = AffineFunction(tuple(Fraction(rng.randint(-6, 6), 3) for _ in range(P.dim)), Fraction(rng.randint(-6, 6), 3))
        assert abs(energy_M(P, u + ell).VM - base - float(donaldson_L(P, ell))) <= 1e-8


def test_linear_functional_agrees_with_exact_L():
    for name, f in (("interval", simple_pl((2,), 1)), ("square", simple_pl((1, 1), 1))):
        P = catalog.lookup(name).polytope
        assert linear_functional(P, f) == pytest.approx(float(donaldson_L(P, f)), abs=1e-3)


@pytest.mark.parametrize(
    "name,f",
    [
        ("interval", simple_pl((1,), Fraction(1, 2))),
        ("interval", simple_pl((2,), 1)),
        ("square", simple_pl((1, 1), 1)),
        ("simplex2", simple_pl((1, 0), Fraction(1, 3))),
    ],
)
def test_rays_are_linear_with_slope_L(name, f):
    P = catalog.lookup(name).polytope
    res = ray_energy(P, guillemin(P), f, [0, 1, 2, 4])
    L = float(donaldson_L(P, f))
    base = res.rows[0][1]
    assert max(abs(m - base - t * L) for t, m in res.rows) <= 1e-4
    assert res.slope == pytest.approx(L, abs=1e-5)
    assert res.to_json()["L"] == f"{res.L.numerator}/{res.L.denominator}"


def test_ray_rejects_negative_times():
    I = catalog.interval()
    with pytest.raises(ValueError):
        ray_energy(I, guillemin(I), simple_pl((1,), 0), [-1, 0])


def test_worker_count_does_not_change_bits():
    P = catalog.square()
    u = guillemin(P) + Polynomial.from_dict({(2, 1): 1})
    a = energy_M(P, u, workers=1)
    b = energy_M(P, u, workers=4)
    c = energy_M(P, u, workers=1)
    assert a.to_json() == b.to_json() == c.to_json()


def test_j_proxy():
    I = catalog.interval()
    with pytest.raises(NotNormalized):
        j_proxy(I, guillemin(I) + AffineFunction((1,), 0))
    u = normalize(guillemin(I))
    # (1/V) int u - u(1/2) for the symmetric interval potential
    assert j_proxy(I, u) == pytest.approx(-0.25 - 0.5 * math.log(0.5), abs=1e-10)


def test_singular_hessian_in_energy():
    I = catalog.interval()
    with pytest.raises(SingularHessian):
        energy_M(I, guillemin(I) + Polynomial.from_dict({(2,): -4}))


CONVEX = {
    1: [{(2,): 1}, {(4,): 1}, {(2,): 1, (4,): 2}, {(6,): 1}, {(2,): Fraction(1, 2), (3,): Fraction(1, 3)}],
    2: [{(2, 0): 1}, {(0, 2): 1}, {(2, 0): 1, (1, 1): 1, (0, 2): 1}, {(4, 0): 1, (0, 2): 1}, {(2, 2): 1, (2, 0): 1, (0, 2): 1}],
}


@pytest.mark.parametrize("name", ["interval", "square"])
def test_M0_is_minimized_at_reference(name):
    P = catalog.lookup(name).polytope
    u0 = guillemin(P)
    base = M0(P, u0, u0)
    for q in CONVEX[P.dim]:
        for eps in (Fraction(1, 10), Fraction(1, 1000)):
            assert M0(P, u0, u0 + Polynomial.from_dict(q).scale(eps)) >= base - 1e-6


def test_unit_weight_M0_is_not_minimized():
    # with the Guillemin coefficient 1/2 the first variation of -int log det is
    # -2 L0, so only the weight 2 on L0 makes u0 critical
    S = catalog.square()
    u0 = guillemin(S)
    q = Polynomial.from_dict({(2, 0): 1}).scale(Fraction(1, 100))
    assert M0(S, u0, u0 + q, linear_weight=1.0) < M0(S, u0, u0, linear_weight=1.0) - 1e-3


def test_L0_reduces_to_L_for_constant_curvature():
    S = catalog.square()
    u0 = guillemin(S)
    assert reference_curvature_mean(S, u0) == pytest.approx(4.0, abs=1e-6)
    f = simple_pl((1, 1), 1)
    assert L0(S, u0, f) == pytest.approx(float(donaldson_L(S, f)), abs=1e-4)
