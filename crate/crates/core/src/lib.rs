//! Feasibility engine for entanglement-based QKD.
//!
//! Computes the 16 click-pattern probabilities of two polarization analyzers
//! with on/off detectors (finite efficiency, dark counts) for ideal Bell,
//! quantum-dot and SPDC photon-pair sources, bins them into logical outcomes,
//! and derives the CHSH value, QBER and Devetak-Winter key rates.
//!
//! Two engines produce click statistics: [`fock`] works in a truncated
//! four-mode Fock space and handles every source; [`gaussian`] evaluates the
//! SPDC source in closed form. They are cross-checked against each other.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

pub mod binning;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod metrics;
pub mod modes;
pub mod optimizer;
pub mod outcomes;
pub mod rates;
pub mod scalar;
pub mod source;

pub use binning::{bin, bin_standard, bin_transmitted_only, BinningStrategy};
pub use error::{Error, Result};
pub use metrics::{Backend, ChshForm, Evaluator};
pub use modes::{ModeSet, Port, Side};
pub use optimizer::{optimize, optimize_with, Objective, OptimizerConfig, Variable};
pub use scalar::Real;
pub use source::{BellState, Truncation};

pub type SourceModel = source::SourceModel<f64>;
pub type DetectorModel = modes::DetectorModel<f64>;
pub type AnalyzerSettings = modes::AnalyzerSettings<f64>;
pub type OutcomeDistribution = outcomes::OutcomeDistribution<f64>;
pub type LogicalDistribution = binning::LogicalDistribution<f64>;
pub type MeasurementPlan = metrics::MeasurementPlan<f64>;
pub type MetricsReport = metrics::MetricsReport<f64>;
pub type KeyRateInput = rates::KeyRateInput<f64>;
pub type KeyRateResult = rates::KeyRateResult<f64>;
pub type FockState = fock::FockState<f64>;
pub type SpdcClosedFormParams = gaussian::SpdcClosedFormParams<f64>;
pub type OptimizationProblem = optimizer::OptimizationProblem<f64>;
pub type OptimizationResult = optimizer::OptimizationResult<f64>;
