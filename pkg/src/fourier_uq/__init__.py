"""Matrix-free debiased-LASSO uncertainty quantification for subsampled
Fourier measurements with Haar-wavelet sparsity."""

__version__ = "0.1.0"

from .coherence import CoherenceProfile, local_coherence, nu_measure, precondition_weights
from .debias import Decomposition, debias_estimate, decompose, to_image_domain
from .experiments import (
    ExperimentConfig,
    ExperimentRecord,
    RealizationRecord,
    SweepResult,
    calibrate_sigma,
    emit_outputs,
    lambda_base,
    load_config,
    pipeline_operator,
    run_experiment,
    run_sweep,
)
from .operators import (
    GramDiagnostics,
    MeasurementOperator,
    gram_diagonal,
    noise_gram_diagonal,
    op_adjoint,
    op_forward,
    preconditioned_operator,
    reweighted_operator,
    standard_operator,
    multiset_gram_identity_check,
    unweighted_forward,
)
from .phantom import (
    EllipseSpec,
    SHEPP_LOGAN_ELLIPSES,
    ground_truth_pair,
    rasterize,
    shepp_logan,
)
from .sampling import (
    AliasTable,
    SamplingPattern,
    expand_to_with_replacement,
    sample_reweighted,
    sample_uniform,
    sample_with_replacement,
    sample_without_replacement,
)
from .solver import (
    SolverDivergenceError,
    SolverOptions,
    SolverResult,
    estimate_lipschitz,
    kkt_residual,
    lasso_solve,
    soft_threshold,
)
from .transforms import (
    dft2_adjoint,
    dft2_forward,
    dft_adjoint,
    dft_forward,
    haar2_adjoint,
    haar2_forward,
    haar_adjoint,
    haar_forward,
)
from .uq import (
    ConfidenceReport,
    build_report,
    confidence_radii,
    coverage,
    interval_export,
    write_interval_csv,
)

__all__ = [
    "__version__",
    "CoherenceProfile",
    "local_coherence",
    "nu_measure",
    "precondition_weights",
    "Decomposition",
    "debias_estimate",
    "decompose",
    "to_image_domain",
    "ExperimentConfig",
    "ExperimentRecord",
    "RealizationRecord",
    "SweepResult",
    "calibrate_sigma",
    "emit_outputs",
    "lambda_base",
    "load_config",
    "pipeline_operator",
    "run_experiment",
    "run_sweep",
    "GramDiagnostics",
    "MeasurementOperator",
    "gram_diagonal",
    "noise_gram_diagonal",
    "op_adjoint",
    "op_forward",
    "preconditioned_operator",
    "reweighted_operator",
    "standard_operator",
    "multiset_gram_identity_check",
    "unweighted_forward",
    "EllipseSpec",
    "SHEPP_LOGAN_ELLIPSES",
    "ground_truth_pair",
    "rasterize",
    "shepp_logan",
    "AliasTable",
    "SamplingPattern",
    "expand_to_with_replacement",
    "sample_reweighted",
    "sample_uniform",
    "sample_with_replacement",
    "sample_without_replacement",
    "SolverDivergenceError",
    "SolverOptions",
    "SolverResult",
    "estimate_lipschitz",
    "kkt_residual",
    "lasso_solve",
    "soft_threshold",
    "dft2_adjoint",
    "dft2_forward",
    "dft_adjoint",
    "dft_forward",
    "haar2_adjoint",
    "haar2_forward",
    "haar_adjoint",
    "haar_forward",
    "ConfidenceReport",
    "build_report",
    "confidence_radii",
    "coverage",
    "interval_export",
    "write_interval_csv",
]
