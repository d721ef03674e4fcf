//! Quantum-like representation of probability data for two trichotomous
//! observables.
//!
//! Given the marginals of two three-valued observables `a` and `b`, the
//! conditional matrix `p(b | a)` and the pair-conditional probabilities
//! `p(b | a ∈ {α_i, α_j})`, this crate computes interference coefficients,
//! checks the constraints that data must satisfy to admit a complex amplitude
//! reproducing it via Born's rule, solves for the phases and assembles the
//! amplitude. A forward generator and a triple-slit Monte Carlo simulator
//! supply data with a known quantum origin.
//!
//! Index convention: `l` ranges over b-outcomes, `i, j, k` over a-outcomes.
//! Everything is stored zero-based; diagnostics report one-based indices.

// Negated comparisons are used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the l, i, j notation of the formulas.
#![allow(clippy::needless_range_loop)]

pub mod engine;
pub mod error;
pub mod interference;
pub mod json;
pub mod linalg;
pub mod oracle;
pub mod phase_solver;
pub mod prob_model;
pub mod slit;

pub use engine::{
    born_verify, born_verify_with, build_amplitude, run_qlra, unitarity_defect,
    unitarity_residuals, AmplitudeModel, FeasibilityReport, Mode, QlraOptions,
};
pub use error::{Error, Result};
pub use interference::{
    boundedness_check, ftp_with_interference, interference_coefficients,
    lambda_normalization_residual, sorkin_residual, triple_prob_from_lambda, InterferenceTable,
};
pub use oracle::{
    ansatz_family, ansatz_mu_roots, generate, mub_instance, mub_lambda_closed_form,
    mub_marginals_closed_form, uniform_example, AnsatzParams, MubParams, MuRoots, QuantumInstance,
};
pub use phase_solver::{row_consistency, solve_all, solve_row, BranchReport, PhaseSolution};
pub use prob_model::{
    check_double_stochastic, validate, Pair, PairMap, ProbabilityData, ValidationOutcome,
    Violation, DEFAULT_TOL,
};
pub use slit::{max_deviation, simulate, to_probability_data, Counts, FrequencyData, SlitExperimentPlan};
