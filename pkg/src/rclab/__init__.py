"""Restricted Chebyshev centers, l_p direct sums and related moduli."""

from .direct_sum import (
    Component,
    ProductInstance,
    ProductPoint,
    product_center,
    product_farthest_radius,
    product_norm,
    product_restricted_radius,
    semicontinuity_transfer_probe,
    tail_mass_check,
)
from .errors import (
    DimensionError,
    NonConvergenceError,
    RCLabError,
    UnsupportedError,
    ValidationError,
)
from .geometry import (
    BoundedSet,
    Subspace,
    ball_inclusion,
    dist_to_cloud,
    farthest_radius,
    hausdorff,
)
from .property_lab import (
    SetFamily,
    local_vs_uniform_compare,
    lp2_modulus,
    p2_modulus,
    qur_probe,
    semicontinuity_gap,
    ured_probe,
)
from .solver import (
    CenterSolution,
    ModulusCurve,
    grid_oracle,
    metric_projection,
    p1_modulus,
    restricted_radius,
    sublevel_sample,
)
from .spaces import CNorm, LqNorm, Space, SumNorm, norm, validate_norm

__version__ = "0.1.0"

__all__ = [
    "Component",
    "ProductInstance",
    "ProductPoint",
    "product_center",
    "product_farthest_radius",
    "product_norm",
    "product_restricted_radius",
    "semicontinuity_transfer_probe",
    "tail_mass_check",
    "DimensionError",
    "NonConvergenceError",
    "RCLabError",
    "UnsupportedError",
    "ValidationError",
    "BoundedSet",
    "Subspace",
    "ball_inclusion",
    "dist_to_cloud",
    "farthest_radius",
    "hausdorff",
    "SetFamily",
    "local_vs_uniform_compare",
    "lp2_modulus",
    "p2_modulus",
    "qur_probe",
    "semicontinuity_gap",
    "ured_probe",
    "CenterSolution",
    "ModulusCurve",
    "grid_oracle",
    "metric_projection",
    "p1_modulus",
    "restricted_radius",
    "sublevel_sample",
    "CNorm",
    "LqNorm",
    "Space",
    "SumNorm",
    "norm",
    "validate_norm",
]
