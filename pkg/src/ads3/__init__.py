"""Certified numerics for spherical eigenfunctions and their group
averages on quotients of the 3-dimensional anti-de Sitter space.

Subpackages:

  psl2            arithmetic in PSL(2,R) = AdS^3 (norms, polar coordinates)
  groups          finitely generated isometry groups, orbit counting,
                  separation constants, growth fitting
  eigenfunctions  the spherical eigenfunction family and its L^2 data
  poincare        truncated group averages with certified tails,
                  non-vanishing checks, rank certificates
  thresholds      the explicit sufficiency thresholds
  checks          independent verification oracles (finite differences,
                  exhaustive lemma checks, fuzzers)
  cli             the `ads3` command-line interface
"""

__version__ = "0.1.0"

from .psl2 import (  # noqa: F401
    AdS3Point,
    CartanCoords,
    GroupElement,
    boost,
    cartan,
    compose,
    identity,
    norm,
    norm_lower_bound,
    rotation,
)
from .eigenfunctions import SphericalParams, eigenvalue, psi, psi_abs  # noqa: F401
from .groups import (  # noqa: F401
    GroupPresentation,
    GrowthConstants,
    IsometryPair,
    OrbitBall,
    count,
    cyclic_boost_presentation,
    enumerate_ball,
    epsilon_lower_certified,
    epsilon_upper,
    fit_growth,
    standard_class_n,
)
from .poincare import (  # noqa: F401
    CertifiedValue,
    IndependenceCertificate,
    SignVector,
    independence_certificate,
    nonvanishing_check,
    sample_point,
    theta_sample,
    truncated_series,
)
from .thresholds import ThresholdInputs, eta, m_gamma, m_threshold, m_tilde  # noqa: F401
