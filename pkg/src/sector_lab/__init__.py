"""Numerical laboratory for functional calculi of sectorial matrices.

Subpackages and modules:

``linalg_core``
    Weighted sequence spaces, solves, a Jacobi eigensolver and operator norms.
``function_space``
    Scalar multipliers, dyadic partitions, Sobolev, Hormander and Mihlin norms.
``functional_calculus``
    Sectorial operators, contour and spectral calculi, semigroups.
``gaussian_analysis``
    Gaussian sum norms, square functions and gamma-bound estimators.
``equivalence_lab``
    Model operators, experiments, reports and the ``sector-lab`` CLI.
"""

from . import errors, function_space, functional_calculus, gaussian_analysis, linalg_core
from .errors import SectorLabError

__version__ = "0.1.0"

__all__ = [
    "errors",
    "function_space",
    "functional_calculus",
    "gaussian_analysis",
    "linalg_core",
    "SectorLabError",
    "__version__",
]
