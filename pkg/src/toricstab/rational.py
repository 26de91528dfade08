"""Exact rational helpers: parsing, canonical strings, small dense linear algebra."""

from fractions import Fraction
from math import gcd, lcm


def Q(value):
    """Coerce ints, Fractions and ``"p/q"`` strings to :class:`Fraction`.

    Floats are rejected on purpose; exact quantities never pass through them.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def qstr(q):
    """Canonical ``"p/q"`` string (``q > 0``, lowest terms, ``"0/1"`` for zero)."""
    q = Q(q)
    return f"{q.numerator}/{q.denominator}"


def qvec(values):
    return tuple(Q(v) for v in values)


def dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def primitive(vec):
    """Scale a rational vector to the primitive integer vector in its ray."""
    vec = qvec(vec)
    den = lcm(*(v.denominator for v in vec)) if vec else 1
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(v // g for v in ints), Fraction(den, g)


def det(rows):
    """Exact determinant by fraction Gaussian elimination."""
    m = [list(map(Q, r)) for r in rows]
    n = len(m)
    if n == 0:
        return Fraction(1)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        result *= p
        for r in range(c + 1, n):
            f = m[r][c]
            if f:
                f /= p
                row_c = m[c]
                row_r = m[r]
                for k in range(c + 1, n):
                    row_r[k] -= f * row_c[k]
    return sign * result


def solve(rows, rhs):
    """Solve a square system exactly; return ``None`` when singular."""
    n = len(rows)
    m = [list(map(Q, r)) + [Q(b)] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        row_c = m[c]
        for k in range(c, n + 1):
            row_c[k] /= p
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                row_r = m[r]
                for k in range(c, n + 1):
                    row_r[k] -= f * row_c[k]
    return [m[r][n] for r in range(n)]


def rank(rows):
    m = [list(map(Q, r)) for r in rows]
    if not m:
        return 0
    ncol = len(m[0])
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f = m[i][c] / m[r][c]
                for k in range(c, ncol):
                    m[i][k] -= f * m[r][k]
        r += 1
        if r == len(m):
            break
    return r


def affine_rank(points):
    """Dimension of the affine hull of ``points`` (-1 for the empty set)."""
    points = list(points)
    if not points:
        return -1
    p0 = points[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def inverse(rows):
    n = len(rows)
    cols = []
    for j in range(n):
        e = [Fraction(int(i == j)) for i in range(n)]
        x = solve(rows, e)
        if x is None:
            raise ZeroDivisionError("singular matrix")
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def transpose(rows):
    return [list(c) for c in zip(*rows)]


def matvec(rows, vec):
    return [dot(r, vec) for r in rows]
