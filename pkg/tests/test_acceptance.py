"""The twelve acceptance criteria, each at its stated tolerance and time limit.

Every test prints one ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary so they survive output capture.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from oracles import brute_force_lp
from toricstab import catalog, lp, samples
from toricstab.kahler import M0, Polynomial, abreu_scalar_batch, duality_residual, energy_M, guillemin, ray_energy, sample_interior
from toricstab.plconvex import AffineFunction, MaxAffinePL
from toricstab.polytope import boundary_area, check_delzant, mean_scalar, subdivide, transform, volume
from toricstab.stability import delta_on_subdivision, donaldson_L, futaki_character, j_norm, simple_pl

RESULTS = []


def criterion(number, name, limit):
    """Run the decorated body, time it, print the verdict line and assert."""

    def wrap(body):
        def test():
            start = time.perf_counter()
            failure, detail = None, ""
            try:
                detail = body()
            except AssertionError as exc:
                failure = str(exc) or "assertion failed"
            elapsed = time.perf_counter() - start
            if failure is None and elapsed >= limit:
                failure = f"took {elapsed:.1f}s, limit {limit}s"
            line = f"{'PASS' if failure is None else 'FAIL'} {number:>2} {name} ({elapsed:.2f}s < {limit}s): {failure or detail}"
            RESULTS.append(line)
            print(line)
            assert failure is None, line

        test.__name__ = body.__name__
        return test

    return wrap


@criterion(1, "exact_measures", 1)
def test_01_exact_measures():
    want = {"interval": (1, 2, 2), "simplex2": (Fraction(1, 2), 3, 6), "hirzebruch_fano": (4, 8, 2)}
    for name, (v, a, s) in want.items():
        P = catalog.lookup(name).polytope
        got = (volume(P), boundary_area(P), mean_scalar(P))
        assert got == (v, a, s), f"{name}: {got}"
    return "interval 1,2,2; simplex 1/2,3,6; F1 4,8,2"


@criterion(2, "futaki", 1)
def test_02_futaki():
    for name in ("interval", "square", "simplex2"):
        fut = futaki_character(catalog.lookup(name).polytope)
        assert fut.zero and all(v == 0 for v in fut.values), name
    F = catalog.hirzebruch_fano()
    fut = futaki_character(F)
    assert fut.values == (Fraction(1, 3), Fraction(1, 3))
    ell = AffineFunction((-1, -1), 0)
    assert fut.destabilizer() == ell
    assert donaldson_L(F, ell) == Fraction(-2, 3)
    return "zero on interval, square, simplex; F1 (1/3, 1/3), L(-x-y) = -2/3"


@criterion(3, "j_norm", 10)
def test_03_j_norm():
    I = catalog.interval()
    assert j_norm(I, simple_pl((1,), Fraction(1, 2))) == Fraction(1, 8)
    assert j_norm(I, MaxAffinePL((AffineFunction((0,), 0), AffineFunction((2,), -1)))) == Fraction(1, 4)
    rng = samples.rng_from_seed(2024)
    for _ in range(50):
        P = samples.delzant_polytope(rng)
        f = samples.convex_pl(rng, P.dim)
        ell = samples.affine(rng, P.dim)
        q = Fraction(rng.randint(0, 6), rng.randint(1, 4))
        base = j_norm(P, f)
        assert j_norm(P, ell) == 0, f"affine {ell} on {P}"
        assert j_norm(P, f + ell) == base, f"affine invariance for {f} on {P}"
        assert j_norm(P, f.scale(q)) == q * base, f"homogeneity for {f} on {P}"
    return "1/8 and 1/4 exact; 50 random instances invariant"


@criterion(4, "delta_lp", 60)
def test_04_delta_lp():
    I = catalog.interval()
    d, fstar = delta_on_subdivision(I, subdivide(I, 1))
    assert d == 2, f"delta on {{0, 1/2, 1}} = {d}"
    seqs = {}
    for name, P, depth in (("interval", I, 3), ("square", catalog.square(), 2)):
        prev, seq = None, []
        for k in range(depth + 1):
            d, fstar = delta_on_subdivision(P, subdivide(P, k))
            assert d > 0 and (prev is None or d <= prev), f"{name} depth {k}: {d} after {prev}"
            assert j_norm(P, fstar) == 1 and donaldson_L(P, fstar) == d, f"{name} depth {k} minimizer"
            prev = d
            seq.append(str(d))
        seqs[name] = seq
    return f"delta_Sigma = 2; interval {seqs['interval']}, square {seqs['square']}"


@criterion(5, "lp_certificates", 30)
def test_05_lp_certificates():
    rng = samples.rng_from_seed(5)
    seen = {}
    for i in range(200):
        prog = samples.linear_program(rng)
        out = lp.solve(prog)
        assert not lp.verify(prog, out), f"program {i}: {lp.verify(prog, out)}"
        status, value = brute_force_lp(prog.objective, prog.ineq_lhs, prog.ineq_rhs, prog.eq_lhs, prog.eq_rhs)
        assert out.status == status, f"program {i}: solver {out.status}, oracle {status}"
        if status == "optimal":
            assert out.value == value, f"program {i}: {out.value} != {value}"
        seen[status] = seen.get(status, 0) + 1
    return f"200 programs agree with enumeration {seen}"


@criterion(6, "abreu", 60)
def test_06_abreu():
    rng = np.random.default_rng(6)
    worst = {}
    for name, tol in (("interval", 1e-6), ("simplex2", 1e-4), ("square", 1e-4)):
        P = catalog.lookup(name).polytope
        target = float(mean_scalar(P))
        S = abreu_scalar_batch(guillemin(P), sample_interior(P, 100, 1e-2, rng))
        dev = float(np.abs(S - target).max())
        assert len(S) == 100 and dev <= tol, f"{name}: max deviation {dev:.2e} > {tol}"
        assert abs(float(np.mean(S)) - target) <= 1e-3, f"{name}: mean {np.mean(S)}"
        worst[name] = f"{dev:.1e}"
    return f"max deviations {worst}"


@criterion(7, "k_energy_value", 60)
def test_07_k_energy_value():
    out = []
    for name, want in (("interval", math.log(2) - 1.5), ("square", 2 * (math.log(2) - 1.5))):
        P = catalog.lookup(name).polytope
        VM = energy_M(P, guillemin(P)).VM
        assert abs(VM - want) <= 1e-4, f"{name}: VM {VM} vs {want}"
        out.append(f"{name} {abs(VM - want):.1e}")
    return "errors " + ", ".join(out)


@criterion(8, "translation_identity", 60)
def test_08_translation_identity():
    rng = samples.rng_from_seed(8)
    worst = 0.0
    for name in ("interval", "square", "hirzebruch_fano"):
        P = catalog.lookup(name).polytope
        u = guillemin(P)
        base = energy_M(P, u).VM
        for _ in range(20):
            ell = AffineFunction(
                tuple(Fraction(rng.randint(-8, 8), 4) for _ in range(P.dim)), Fraction(rng.randint(-8, 8), 4)
            )
            dev = abs(energy_M(P, u + ell).VM - base - float(donaldson_L(P, ell)))
            assert dev <= 1e-8, f"{name}, {ell}: deviation {dev:.2e}"
            worst = max(worst, dev)
    return f"20 affine shifts on interval, square, F1; max deviation {worst:.1e}"


@criterion(9, "ray_slope", 60)
def test_09_ray_slope():
    I = catalog.interval()
    f = simple_pl((1,), Fraction(1, 2))
    res = ray_energy(I, guillemin(I), f, [0, 1, 2, 4])
    assert res.L == donaldson_L(I, f) == Fraction(1, 4)
    assert abs(res.slope - 0.25) <= 1e-5, f"slope {res.slope!r}"
    return f"slope {res.slope!r}, L = 1/4"


PERTURBATIONS = {
    1: [{(2,): 1}, {(4,): 1}, {(2,): 1, (4,): 2}, {(6,): 1}, {(2,): Fraction(1, 2), (3,): Fraction(1, 3)}],
    2: [{(2, 0): 1}, {(0, 2): 1}, {(2, 0): 1, (1, 1): 1, (0, 2): 1}, {(4, 0): 1, (0, 2): 1}, {(2, 2): 1, (2, 0): 1, (0, 2): 1}],
}


@criterion(10, "m0_minimizer", 120)
def test_10_m0_minimizer():
    worst = math.inf
    for name in ("interval", "square"):
        P = catalog.lookup(name).polytope
        u0 = guillemin(P)
        base = M0(P, u0, u0)
        count = 0
        for q in PERTURBATIONS[P.dim]:
            for eps in (Fraction(1, 10), Fraction(1, 1000)):
                gain = M0(P, u0, u0 + Polynomial.from_dict(q).scale(eps)) - base
                assert gain >= -1e-6, f"{name}, {q}, eps {eps}: {gain:.2e}"
                worst = min(worst, gain)
                count += 1
        assert count == 10
    return f"10 perturbations each; smallest increase {worst:.2e}"


@criterion(11, "duality", 30)
def test_11_duality():
    rng = np.random.default_rng(11)
    worst = 0.0
    for name in ("interval", "square"):
        P = catalog.lookup(name).polytope
        u = guillemin(P)
        pts = sample_interior(P, 50, 1e-2, rng)
        assert len(pts) == 50
        for x in pts:
            r = duality_residual(u, x)
            assert r <= 1e-6, f"{name} at {x}: {r:.2e}"
            worst = max(worst, r)
    return f"max residual {worst:.1e}"


@criterion(12, "equivariance", 60)
def test_12_equivariance():
    rng = samples.rng_from_seed(12)
    bases = [catalog.interval, catalog.square, catalog.simplex2]
    deltas = 0
    for i in range(20):
        if i % 2:
            P = rng.choice(bases)(Fraction(rng.randint(1, 3), rng.randint(1, 2)))
        else:
            P = samples.delzant_polytope(rng)
        A, t = samples.unimodular(rng, P.dim), samples.shift(rng, P.dim)
        TP = transform(P, A, t)
        f = samples.convex_pl(rng, P.dim)
        tf = f.image(A, t)
        where = f"instance {i}"
        assert volume(TP) == volume(P) and boundary_area(TP) == boundary_area(P), where
        assert donaldson_L(TP, tf) == donaldson_L(P, f), where
        assert j_norm(TP, tf) == j_norm(P, f), where
        assert futaki_character(TP).zero == futaki_character(P).zero, where
        assert check_delzant(TP).valid == check_delzant(P).valid, where
        if futaki_character(P).zero:
            mesh = subdivide(P, 1)
            assert delta_on_subdivision(TP, mesh.transform(A, t))[0] == delta_on_subdivision(P, mesh)[0], where
            deltas += 1
    assert deltas >= 10
    return f"20 transforms, delta_Sigma compared on {deltas}"


@pytest.fixture(scope="module", autouse=True)
def _summary(request):
    yield
    request.config._acceptance_lines = list(RESULTS)
