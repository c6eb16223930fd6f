"""One-dimensional L-infinity optimal transport with explicit Kantorovich potentials."""
from .coupling import (
    DisplacementSets,
    MonotonePlan,
    maximal_displacement_sets,
    monotone_coupling,
    reflect,
    reflect_plan,
    winf_value,
)
from .errors import LinfotError
from .kernels import BACKEND
from .measures import (
    BVPotential,
    DiscretePlan,
    IntervalUnion,
    Measure1D,
    SignedMeasure1D,
    cdf_eval,
    integrate_bv,
    measure_from_json,
    measure_from_pieces,
    quantile_eval,
)
from .oracle import (
    band_feasible_coupling,
    sample_quantile_grid,
    sorted_matching_bottleneck,
    threshold_matching_bottleneck,
)
from .potentials import (
    DualReport,
    RhoConfig,
    b_r_set,
    build_phi,
    build_psi,
    build_rho,
    check_dual_feasibility,
    criticality_witness,
    dual_value,
    kantorovich_potentials,
)
from .structure import (
    StructureComponent,
    StructureDecomposition,
    assemble_plan,
    decompose,
    infcm_check,
    minimal_set_inclusion,
    validate_plan,
)

__version__ = "0.1.0"
