"""Verification toolkit for the finiteness of arithmetic Kleinian maximal reflection groups."""

from .arithmetic import (
    HATCHER_DISCRIMINANTS,
    FieldRecord,
    ScanReport,
    class_number,
    class_number_dirichlet,
    crude_cutoff,
    dirichlet_l2,
    field_record,
    hatcher_check,
    is_fundamental,
    kronecker,
    scan,
)
from .mesh import SpectralResult, TriangleMesh, build_icosphere, laplace_spectrum, mesh_area
from .orbifolds import (
    SphericalSignature,
    euler_characteristic,
    group_order,
    parse_signature,
    reflection_supergroup,
    verify_cover,
)
from .spectral import BoundChain, InequalityCheck, li_yau_slack, verify_sphere_saturation, volume_bound_chain

__version__ = "0.1.0"
