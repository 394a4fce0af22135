"""Entanglement detection for GHZ-like states under coherent and white noise."""

__version__ = "0.1.0"

from .pauli import (
    I,
    X,
    Y,
    Z,
    ObservableSum,
    ProductObservable,
    Single,
    SizeLimitError,
    UnsupportedFactorError,
    cnot_conjugate,
    dense_matrix,
    ghz_projectors,
    ghz_stabilizer_generators,
    noisy_hadamard_conjugate_z,
    s1_prime,
    xy,
)
from .states import (
    CoherentParams,
    DiagonalStats,
    DimensionError,
    MeasurementSetting,
    OutcomeDistribution,
    PreparedState,
    SettingKind,
    diagonal_stats,
    expectation_exact,
    outcome_distribution,
)
from .protocol import (
    DecompositionCoefficients,
    Estimate,
    ExpectationSet,
    IncompleteDataError,
    Protocol,
    ShotRecord,
    dft_coefficients,
    estimate_expectations,
    exact_expectations,
    read_jsonl,
    sample_protocol,
    sample_shots,
    settings,
    write_jsonl,
)
from .witness import (
    AngleEstimate,
    DetectionReport,
    Family,
    Tolerance,
    evaluate,
    gap_functions,
    max_fidelity,
    phi_opt_efficient,
    phi_opt_full,
    schmidt_bound,
    theta_opt_efficient,
    theta_opt_full,
    threshold_by_bisection,
    tolerance,
    white_noise_tolerance,
)
