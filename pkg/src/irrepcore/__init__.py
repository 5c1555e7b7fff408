"""E(3)-equivariant tensor algebra with a verification CLI.

Real spherical harmonics, real-basis Clebsch-Gordan coupling, O(3)
irrep feature containers, equivariant layers, and a property harness
that certifies equivariance of every operation.
"""

from .backend import active_backend, available_backends
from .cgc import CgcTable, build_cgc_table, cgc, couple
from .features import (IrrepFeatures, slice_degree_parity, to_compact,
                       to_general, transform)
from .layers import (DenseParams, TensorParams, activation, dense_apply,
                     dense_init, tensor_apply, tensor_dense_apply, tensor_init)
from .limits import CapacityError, max_degree_capacity
from .radial import RadialBasisSpec, featurize, radial_basis
from .rotations import (EquivarianceReport, GroupElement, WignerDSet,
                        check_equivariance, compose, random_rotation, wigner_d)
from .sh import ShVector, eval_sh, eval_sh_single, eval_solid_sh, sh_index

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CgcTable",
    "DenseParams",
    "EquivarianceReport",
    "GroupElement",
    "IrrepFeatures",
    "RadialBasisSpec",
    "ShVector",
    "TensorParams",
    "WignerDSet",
    "activation",
    "active_backend",
    "available_backends",
    "build_cgc_table",
    "cgc",
    "check_equivariance",
    "compose",
    "couple",
    "dense_apply",
    "dense_init",
    "eval_sh",
    "eval_sh_single",
    "eval_solid_sh",
    "featurize",
    "max_degree_capacity",
    "radial_basis",
    "random_rotation",
    "sh_index",
    "slice_degree_parity",
    "tensor_apply",
    "tensor_dense_apply",
    "tensor_init",
    "to_compact",
    "to_general",
    "transform",
    "wigner_d",
]
