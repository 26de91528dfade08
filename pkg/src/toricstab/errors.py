"""Exception hierarchy.

Every error carries a short machine-readable ``code`` which the command line
front end reports as ``{"error": {"code": ..., "message": ...}}``.
"""


class ToricStabError(Exception):
    code = "error"

    def to_json(self):
        return {"error": {"code": self.code, "message": str(self)}}


class DimensionMismatch(ToricStabError, ValueError):
    code = "dimension_mismatch"


# polytope
class EmptyPolytope(ToricStabError, ValueError):
    code = "empty_polytope"


class UnboundedPolytope(ToricStabError, ValueError):
    code = "unbounded_polytope"


class DegeneratePolytope(ToricStabError, ValueError):
    code = "degenerate_polytope"


class RedundantFacet(ToricStabError, ValueError):
    code = "redundant_facet"


class NotUnimodular(ToricStabError, ValueError):
    code = "not_unimodular"


class MeshTooLarge(ToricStabError, RuntimeError):
    code = "mesh_too_large"


class EmptyWeightSet(ToricStabError, ValueError):
    code = "empty_weight_set"


class InvalidSubdivision(ToricStabError, RuntimeError):
    code = "invalid_subdivision"


# piecewise linear functions
class NonPiecewiseLinear(ToricStabError, TypeError):
    code = "non_piecewise_linear"


class PointOutsideP(ToricStabError, ValueError):
    code = "point_outside_polytope"


class NotConvex(ToricStabError, ValueError):
    code = "not_convex"


# stability
class AffineInput(ToricStabError, ValueError):
    code = "affine_input"


class FutakiNonzero(ToricStabError):
    """The Futaki character does not vanish; ``destabilizer`` has L < 0."""

    code = "futaki_nonzero"

    def __init__(self, message, futaki=None, destabilizer=None):
        super().__init__(message)
        self.futaki = futaki
        self.destabilizer = destabilizer


class DegenerateTestConfiguration(ToricStabError, ValueError):
    code = "degenerate_test_configuration"


# analytic side
class TooCloseToBoundary(ToricStabError, ValueError):
    code = "too_close_to_boundary"


class SingularHessian(ToricStabError, ArithmeticError):
    code = "singular_hessian"


class NewtonDivergence(ToricStabError, RuntimeError):
    code = "newton_divergence"

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class QuadratureBudgetExceeded(ToricStabError, RuntimeError):
    code = "quadrature_budget_exceeded"


class NotNormalized(ToricStabError, ValueError):
    code = "not_normalized"
