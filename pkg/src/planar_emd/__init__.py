"""Exact planar earthmover distance and its Fourier-multiplier L1 embedding."""

from .measures import (
    DenseDirichlet,
    DiracPair,
    DomainSpec,
    ProbabilityMeasure,
    SignedMeasure,
    SparseK,
    Topology,
    center,
    difference,
    dirac,
    from_dense,
    grid_domain,
    jordan_decompose,
    linf_norm,
    random_measure,
    torus_domain,
    uniform,
    uniform_on_set,
)
from .transport import (
    DualPotential,
    GroundMetric,
    SolverError,
    TransportPlan,
    brute_force_matching,
    dual_potential,
    emd,
    emd_norm,
    ground_distance,
    min_weight_matching,
    verify_plan,
)
from .fourier import (
    Multiplier,
    SpectralField,
    apply_multiplier,
    character,
    dft2,
    estimate_multiplier_pnorm,
    idft2,
    multiplier_m1,
    multiplier_m2,
    partial_diff,
)
from .embedding import (
    EmbeddedVector,
    embed,
    embedded_distance,
    grid_to_torus,
    op_A,
    op_A_star,
    op_B,
    op_B_star,
    op_S,
    reconstruct,
)
from .bench import (
    ConfigError,
    DistortionReport,
    ExperimentConfig,
    NNReport,
    calibrate,
    run_distortion_experiment,
    run_nn_experiment,
    run_scaling_sweep,
)

__version__ = "0.1.0"
