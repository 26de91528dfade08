"""Seeded random instances: Delzant polytopes, convex PL functions, lattice maps, LPs."""

import random
from fractions import Fraction

from . import catalog
from .errors import ToricStabError
from .lp import LinearProgram
from .plconvex import AffineFunction, MaxAffinePL
from .polytope import check_delzant, cut_corner
from .rational import det


def small_fraction(rng, num=4, den=4):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def delzant_polytope(rng, dims=(1, 2), cuts=2):
    """A base polytope from the catalog, rescaled, with up to ``cuts`` corners blown up."""
    dim = rng.choice(dims)
    if dim == 1:
        return catalog.interval(Fraction(rng.randint(1, 6), rng.randint(1, 3)))
    base = rng.choice([catalog.simplex2, catalog.square, None])
    if base is None:
        P = catalog.hirzebruch_fano()
    else:
        P = base(Fraction(rng.randint(2, 6), rng.randint(1, 2)))
    for _ in range(rng.randint(0, cuts)):
        v = rng.choice(P.vertices)
        size = Fraction(1, rng.randint(2, 4))
        try:
            Q = cut_corner(P, v, size)
        except ToricStabError:
            continue
        if check_delzant(Q).valid:
            P = Q
    return P


def convex_pl(rng, dim, pieces=3, num=3, den=3):
    """Random max of affine functions with small rational coefficients."""
    out = []
    for _ in range(rng.randint(2, pieces)):
        a = tuple(small_fraction(rng, num, den) for _ in range(dim))
        out.append(AffineFunction(a, small_fraction(rng, num, den)))
    return MaxAffinePL(tuple(out))


def affine(rng, dim, num=2, den=3):
    return AffineFunction(tuple(small_fraction(rng, num, den) for _ in range(dim)), small_fraction(rng, num, den))


def unimodular(rng, dim, steps=6):
    """Random integer matrix of determinant +-1 from elementary operations."""
    A = [[int(i == j) for j in range(dim)] for i in range(dim)]
    for _ in range(steps if dim > 1 else 0):
        i, j = rng.sample(range(dim), 2)
        k = rng.choice([-2, -1, 1, 2])
        A[i] = [a + k * b for a, b in zip(A[i], A[j])]
    if rng.random() < 0.5:
        A[0] = [-a for a in A[0]]
    if dim > 1 and rng.random() < 0.5:
        A[0], A[1] = A[1], A[0]
    assert abs(det(A)) == 1
    return A


def shift(rng, dim):
    return tuple(small_fraction(rng, 3, 2) for _ in range(dim))


def linear_program(rng, n=None, m_ineq=None, m_eq=None):
    """Small random LP with integer data in [-3, 3]."""
    n = n if n is not None else rng.randint(1, 3)
    m_ineq = m_ineq if m_ineq is not None else rng.randint(1, 4)
    m_eq = m_eq if m_eq is not None else rng.randint(0, 1)

    def row():
        return tuple(rng.randint(-3, 3) for _ in range(n))

    return LinearProgram(
        row(),
        tuple(row() for _ in range(m_ineq)),
        tuple(rng.randint(-3, 3) for _ in range(m_ineq)),
        tuple(row() for _ in range(m_eq)),
        tuple(rng.randint(-3, 3) for _ in range(m_eq)),
    )


def rng_from_seed(seed):
    return random.Random(seed)
