"""Statistics with set-valued data.

Modules
-------
geometry
    Compact convex set variants, Minkowski arithmetic, and set distances.
randomsets
    Random translated sets, Minkowski sample means, limit-law diagnostics,
    and expectation-algebra checks.
kernelreg
    Kernel regression of set-valued responses on vector covariates.
invopt
    Inverse parametric optimization from noisy approximate optima.
harness
    Reproducible experiment runner behind the ``setstat`` command line.
"""

from . import geometry, harness, invopt, kernelreg, randomsets
from .geometry import (
    Ball,
    Box,
    ConvexSet,
    VertexPolytope,
    Zonotope,
    contains,
    dist_point,
    hausdorff,
    integrated_distance,
    interval,
    minkowski_diff,
    minkowski_sum,
    point_set,
    scale,
    set_from_json,
    set_to_json,
    support,
    weighted_minkowski_average,
)
from .randomsets import RandomlyTranslatedSet, RngSeed

__version__ = "0.1.0"

__all__ = [
    "geometry",
    "randomsets",
    "kernelreg",
    "invopt",
    "harness",
    "ConvexSet",
    "VertexPolytope",
    "Zonotope",
    "Ball",
    "Box",
    "interval",
    "point_set",
    "support",
    "minkowski_sum",
    "minkowski_diff",
    "scale",
    "dist_point",
    "hausdorff",
    "integrated_distance",
    "weighted_minkowski_average",
    "contains",
    "set_to_json",
    "set_from_json",
    "RngSeed",
    "RandomlyTranslatedSet",
    "__version__",
]
