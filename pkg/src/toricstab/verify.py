"""End-to-end invariant suite behind ``toricstab verify``.

Each check returns ``(passed, detail)``; the runner reports one line per check.
Random instances come from a seeded generator, so runs are reproducible.
"""

import math
import time
from fractions import Fraction

import numpy as np

from . import catalog, lp, samples
from .kahler import (
    M0,
    Polynomial,
    abreu_scalar_batch,
    duality_residual,
    energy_M,
    guillemin,
    ray_energy,
    sample_interior,
)
from .plconvex import AffineFunction
from .polytope import boundary_area, check_delzant, mean_scalar, subdivide, transform, volume
from .stability import delta_on_subdivision, donaldson_L, futaki_character, j_norm, simple_pl


def check_measures(seed, fast):
    want = {"interval": (1, 2, 2), "simplex2": (Fraction(1, 2), 3, 6), "hirzebruch_fano": (4, 8, 2)}
    bad = []
    for name, (v, a, s) in want.items():
        P = catalog.lookup(name).polytope
        if (volume(P), boundary_area(P), mean_scalar(P)) != (v, a, s):
            bad.append(name)
    return not bad, "mismatch: " + ", ".join(bad) if bad else "vol, area, S_hat exact"


def check_futaki(seed, fast):
    for name in ("interval", "square", "simplex2"):
        if not futaki_character(catalog.lookup(name).polytope).zero:
            return False, f"{name} has nonzero Futaki character"
    F = catalog.hirzebruch_fano()
    fut = futaki_character(F)
    ell = fut.destabilizer()
    ok = fut.values == (Fraction(1, 3), Fraction(1, 3)) and donaldson_L(F, ell) == Fraction(-2, 3)
    return ok, f"F1 futaki {fut.to_json()['futaki']}, L(witness) = {donaldson_L(F, ell)}"


def check_jnorm(seed, fast):
    I = catalog.interval()
    if j_norm(I, simple_pl((1,), Fraction(1, 2))) != Fraction(1, 8):
        return False, "crease at 1/2"
    if j_norm(I, simple_pl((2,), 1)) != Fraction(1, 4):
        return False, "max(0, 2x - 1)"
    rng = samples.rng_from_seed(seed)
    for _ in range(10 if fast else 50):
        P = samples.delzant_polytope(rng)
        f = samples.convex_pl(rng, P.dim)
        ell = samples.affine(rng, P.dim)
        q = Fraction(rng.randint(0, 5), rng.randint(1, 3))
        base = j_norm(P, f)
        if j_norm(P, f + ell) != base or j_norm(P, f.scale(q)) != q * base or j_norm(P, ell) != 0:
            return False, f"invariance fails for {f} on {P}"
    return True, "exact values, affine invariance, homogeneity"


def check_delta(seed, fast):
    I = catalog.interval()
    mesh = subdivide(I, 1)
    d, fstar = delta_on_subdivision(I, mesh)
    if d != 2 or j_norm(I, fstar) != 1 or donaldson_L(I, fstar) != d:
        return False, f"delta on {{0, 1/2, 1}} is {d}"
    cases = [(I, 2 if fast else 3), (catalog.square(), 1 if fast else 2)]
    for P, depth in cases:
        prev = None
        for k in range(depth + 1):
            d, fstar = delta_on_subdivision(P, subdivide(P, k))
            if not d > 0 or (prev is not None and d > prev):
                return False, f"sequence not positive nonincreasing at depth {k}"
            if j_norm(P, fstar) != 1 or donaldson_L(P, fstar) != d:
                return False, "minimizer not normalised"
            prev = d
    return True, "delta = 2 on {0, 1/2, 1}; sequences monotone"


def check_lp(seed, fast):
    rng = samples.rng_from_seed(seed)
    for _ in range(40 if fast else 200):
        prog = samples.linear_program(rng)
        problems = lp.verify(prog, lp.solve(prog))
        if problems:
            return False, "; ".join(problems)
    return True, "all certificates verify"


def check_abreu(seed, fast):
    rng = np.random.default_rng(seed)
    for name, tol in (("interval", 1e-6), ("simplex2", 1e-4), ("square", 1e-4)):
        P = catalog.lookup(name).polytope
        S = abreu_scalar_batch(guillemin(P), sample_interior(P, 100, 1e-2, rng))
        if np.abs(S - float(mean_scalar(P))).max() > tol:
            return False, f"{name}: max deviation {np.abs(S - float(mean_scalar(P))).max():.2e}"
    return True, "Guillemin curvature constant"


def check_energy(seed, fast):
    for name, want in (("interval", math.log(2) - 1.5), ("square", 2 * (math.log(2) - 1.5))):
        P = catalog.lookup(name).polytope
        r = energy_M(P, guillemin(P))
        if abs(r.VM - want) > 1e-4:
            return False, f"{name}: VM = {r.VM}"
    return True, "VM matches closed forms"


def check_translation(seed, fast):
    rng = samples.rng_from_seed(seed)
    worst = 0.0
    for name in ("interval", "hirzebruch_fano"):
        P = catalog.lookup(name).polytope
        u = guillemin(P)
        base = energy_M(P, u).VM
        for _ in range(5 if fast else 20):
            ell = AffineFunction(tuple(Fraction(rng.randint(-6, 6), 3) for _ in range(P.dim)), Fraction(rng.randint(-6, 6), 3))
            worst = max(worst, abs(energy_M(P, u + ell).VM - base - float(donaldson_L(P, ell))))
    return worst <= 1e-8, f"max deviation {worst:.2e}"


def check_ray(seed, fast):
    I = catalog.interval()
    r = ray_energy(I, guillemin(I), simple_pl((1,), Fraction(1, 2)), [0, 1, 2, 4])
    return abs(r.slope - 0.25) <= 1e-5, f"slope {r.slope!r}"


def check_minimizer(seed, fast):
    worst = math.inf
    polys = [catalog.interval()] + ([] if fast else [catalog.square()])
    for P in polys:
        u0 = guillemin(P)
        base = M0(P, u0, u0)
        n = P.dim
        perts = [{(2,) + (0,) * (n - 1): 1}, {(4,) + (0,) * (n - 1): 1, (0,) * (n - 1) + (2,): Fraction(1, 2)}]
        for q in perts:
            for eps in (Fraction(1, 10), Fraction(1, 100)):
                worst = min(worst, M0(P, u0, u0 + Polynomial.from_dict(q).scale(eps)) - base)
    return worst >= -1e-6, f"smallest increase {worst:.3e}"


def check_duality(seed, fast):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in ("interval", "square"):
        P = catalog.lookup(name).polytope
        u = guillemin(P)
        for x in sample_interior(P, 10 if fast else 50, 1e-2, rng):
            worst = max(worst, duality_residual(u, x))
    return worst <= 1e-6, f"max residual {worst:.2e}"


def check_equivariance(seed, fast):
    rng = samples.rng_from_seed(seed)
    for _ in range(5 if fast else 20):
        P = samples.delzant_polytope(rng)
        A, t = samples.unimodular(rng, P.dim), samples.shift(rng, P.dim)
        TP = transform(P, A, t)
        f = samples.convex_pl(rng, P.dim)
        tf = f.image(A, t)
        same = (
            volume(TP) == volume(P)
            and boundary_area(TP) == boundary_area(P)
            and donaldson_L(TP, tf) == donaldson_L(P, f)
            and j_norm(TP, tf) == j_norm(P, f)
            and futaki_character(TP).zero == futaki_character(P).zero
            and check_delzant(TP).valid == check_delzant(P).valid
        )
        if same and futaki_character(P).zero:
            mesh = subdivide(P, 0)
            same = delta_on_subdivision(TP, mesh.transform(A, t))[0] == delta_on_subdivision(P, mesh)[0]
        if not same:
            return False, f"not invariant: {P} under {A}, {t}"
    return True, "exact invariants preserved"


CHECKS = [
    ("measures", check_measures),
    ("futaki", check_futaki),
    ("jnorm", check_jnorm),
    ("delta", check_delta),
    ("lp_certificates", check_lp),
    ("abreu", check_abreu),
    ("energy", check_energy),
    ("translation", check_translation),
    ("ray_slope", check_ray),
    ("m0_minimizer", check_minimizer),
    ("duality", check_duality),
    ("equivariance", check_equivariance),
]


def run(seed=0, fast=False, out=print):
    """Run every check; return True iff all pass."""
    ok = True
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = check(seed, fast)
        except Exception as exc:  # a crash is a failure, reported like one
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        ok &= bool(passed)
        out(f"{'PASS' if passed else 'FAIL'} {name} ({time.perf_counter() - start:.2f}s): {detail}")
    return ok
