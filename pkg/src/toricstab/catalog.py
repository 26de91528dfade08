"""Built-in polytopes and PL functions, addressable by name from the command line."""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .plconvex import AffineFunction, MaxAffinePL
from .polytope import DelzantPolytope, Facet
from .rational import Q


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    polytope: DelzantPolytope
    notes: dict = field(default_factory=dict)
    valid: bool = True


def interval(lam=1):
    lam = Q(lam)
    return DelzantPolytope(1, (Facet((1,), 0), Facet((-1,), -lam)))


def simplex2(lam=1):
    lam = Q(lam)
    return DelzantPolytope(2, (Facet((1, 0), 0), Facet((0, 1), 0), Facet((-1, -1), -lam)))


def square(lam=1):
    lam = Q(lam)
    return DelzantPolytope(2, (Facet((1, 0), 0), Facet((0, 1), 0), Facet((-1, 0), -lam), Facet((0, -1), -lam)))


def cube(lam=1):
    lam = Q(lam)
    facets = []
    for i in range(3):
        e = tuple(int(j == i) for j in range(3))
        facets.append(Facet(e, 0))
        facets.append(Facet(tuple(-c for c in e), -lam))
    return DelzantPolytope(3, tuple(facets))


def hirzebruch_fano():
    """Anticanonical polytope of the first Hirzebruch surface."""
    return DelzantPolytope(2, (Facet((1, 0), -1), Facet((0, 1), -1), Facet((1, 1), -1), Facet((-1, -1), -1)))


def bad_triangle():
    """A lattice triangle that fails the Delzant condition at (0, 1)."""
    return DelzantPolytope(2, (Facet((1, 0), 0), Facet((0, 1), 0), Facet((-1, -2), -2)))


_SCALED = {"interval": interval, "simplex2": simplex2, "square": square, "cube": cube}
_FIXED = {"hirzebruch_fano": hirzebruch_fano, "bad_triangle": bad_triangle}

_NOTES = {
    "interval": {"futaki_zero": True, "volume": "1/1", "boundary_area": "2/1", "mean_scalar": "2/1"},
    "simplex2": {"futaki_zero": True, "volume": "1/2", "boundary_area": "3/1", "mean_scalar": "6/1"},
    "square": {"futaki_zero": True, "volume": "1/1", "boundary_area": "4/1", "mean_scalar": "4/1"},
    "cube": {"futaki_zero": True, "volume": "1/1", "boundary_area": "6/1", "mean_scalar": "6/1"},
    "hirzebruch_fano": {"futaki_zero": False, "futaki": ["1/3", "1/3"], "volume": "4/1", "mean_scalar": "2/1"},
    "bad_triangle": {"delzant": False, "failing_vertex": ["0/1", "1/1"], "determinant": -2},
}

PL_FUNCTIONS = {
    "crease_half": lambda: MaxAffinePL((AffineFunction((0,), 0), AffineFunction((1,), Fraction(-1, 2)))),
    "crease_2x": lambda: MaxAffinePL((AffineFunction((0,), 0), AffineFunction((2,), -1))),
}

_NAME = re.compile(r"^([a-z_0-9]+?)(?:\((-?\d+(?:/\d+)?)\))?$")


def names():
    return sorted(_SCALED) + sorted(_FIXED)


def lookup(name):
    """Resolve ``name`` or ``name(lambda)`` to a :class:`CatalogEntry`; ``None`` if unknown."""
    m = _NAME.match(name.strip())
    if not m:
        return None
    base, arg = m.group(1), m.group(2)
    if base in _SCALED:
        lam = Q(arg) if arg is not None else Fraction(1)
        notes = dict(_NOTES[base]) if lam == 1 else {"futaki_zero": True}
        return CatalogEntry(name, _SCALED[base](lam), notes)
    if base in _FIXED and arg is None:
        return CatalogEntry(name, _FIXED[base](), dict(_NOTES[base]), base != "bad_triangle")
    return None


def entries():
    return [lookup(n) for n in names()]


def pl_lookup(name):
    factory = PL_FUNCTIONS.get(name.strip())
    return None if factory is None else factory()
