"""Analytic side in symplectic coordinates: potentials, curvature and energies."""

from .curvature import abreu_scalar, abreu_scalar_batch, sample_interior
from .duality import dual_hessian, duality_residual, gradient_inverse
from .energy import (
    EnergyReport,
    L0,
    M0,
    RayResult,
    energy_E,
    energy_M,
    j_proxy,
    linear_functional,
    ray_energy,
    reference_curvature_mean,
)
from .potential import (
    DEFAULT_GRID,
    GridSpec,
    Polynomial,
    SymplecticPotential,
    guillemin,
    hessian,
    is_positive_definite,
    minimizer,
    normalize,
    potential_from_json,
)

__all__ = [
    "DEFAULT_GRID",
    "EnergyReport",
    "GridSpec",
    "L0",
    "M0",
    "Polynomial",
    "RayResult",
    "SymplecticPotential",
    "abreu_scalar",
    "abreu_scalar_batch",
    "dual_hessian",
    "duality_residual",
    "energy_E",
    "energy_M",
    "gradient_inverse",
    "guillemin",
    "hessian",
    "is_positive_definite",
    "j_proxy",
    "linear_functional",
    "minimizer",
    "normalize",
    "potential_from_json",
    "ray_energy",
    "reference_curvature_mean",
    "sample_interior",
]
