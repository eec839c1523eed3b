//! Systems, operators, spectra, sampling families and time domains.

mod operator;
mod spectrum;
mod system;

pub use operator::{matrix_exponential, operator_power, Operator};
pub use spectrum::{
    eigenvalues, spectral_decomposition, stability_classification, DiagonalizableSystem, Spectrum, StabilityReport,
    DEFAULT_DIAGONALIZATION_TOL,
};
pub use system::{
    panels_for, Dynamics, ObservationOperator, SamplingFamily, SystemSpec, TimeDomain, DEFAULT_NODES_PER_PANEL,
    DEFAULT_PANELS,
};
