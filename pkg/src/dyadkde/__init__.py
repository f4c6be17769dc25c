"""Dyadic kernel density estimation with jackknife empirical likelihood.

Point estimation, leave-out pseudo-values, JEL / modified-JEL / Wald
inference for complete and randomly missing edge sets, and a deterministic
Monte Carlo coverage harness.
"""

from ._backend import BACKEND, available_backends
from .errors import (
    BracketFailure,
    DuplicateEdge,
    DyadKDEError,
    EmptyNetwork,
    IncompleteSampleRequiresIncompletePath,
    NonFiniteInput,
    NonPositiveBandwidth,
    NonPositiveModifiedVariance,
    SampleTooSmall,
    SelfLoop,
    VertexOutOfRange,
    ZeroSpreadSample,
)
from .estimator import (
    KernelSums,
    LeaveOutEstimates,
    density_estimate,
    density_estimate_incomplete,
    density_profile,
    kernel_sums,
    leave_out_estimates,
    rot_bandwidth,
    rot_bandwidth_incomplete,
)
from .inference import (
    ELContext,
    InferenceResult,
    PseudoValueSet,
    chi2_critical_value,
    el_dual,
    el_log_ratio,
    invert_test,
    jel_statistic,
    jel_value,
    mjel_statistic,
    mjel_value,
    mjk_wald_interval,
    modified_pseudo_values,
    normal_two_sided_quantile,
    prepare_context,
    pseudo_values,
)
from .kernels import KernelFamily, KernelSpec, get_kernel
from .montecarlo import (
    CoverageReport,
    MethodTally,
    SimulationConfig,
    coverage_experiment,
    generate_sample,
    render_table,
    report_json_dict,
    sup_error_experiment,
    true_density,
)
from .sample import (
    DyadicSample,
    EdgeRecord,
    aggregate_multi_records,
    from_edge_list,
    observed_fraction,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "available_backends",
    "BracketFailure",
    "DuplicateEdge",
    "DyadKDEError",
    "EmptyNetwork",
    "IncompleteSampleRequiresIncompletePath",
    "NonFiniteInput",
    "NonPositiveBandwidth",
    "NonPositiveModifiedVariance",
    "SampleTooSmall",
    "SelfLoop",
    "VertexOutOfRange",
    "ZeroSpreadSample",
    "KernelSums",
    "LeaveOutEstimates",
    "density_estimate",
    "density_estimate_incomplete",
    "density_profile",
    "kernel_sums",
    "leave_out_estimates",
    "rot_bandwidth",
    "rot_bandwidth_incomplete",
    "ELContext",
    "InferenceResult",
    "PseudoValueSet",
    "chi2_critical_value",
    "el_dual",
    "el_log_ratio",
    "invert_test",
    "jel_statistic",
    "jel_value",
    "mjel_statistic",
    "mjel_value",
    "mjk_wald_interval",
    "modified_pseudo_values",
    "normal_two_sided_quantile",
    "prepare_context",
    "pseudo_values",
    "KernelFamily",
    "KernelSpec",
    "get_kernel",
    "CoverageReport",
    "MethodTally",
    "SimulationConfig",
    "coverage_experiment",
    "generate_sample",
    "render_table",
    "report_json_dict",
    "sup_error_experiment",
    "true_density",
    "DyadicSample",
    "EdgeRecord",
    "aggregate_multi_records",
    "from_edge_list",
    "observed_fraction",
    "__version__",
]
