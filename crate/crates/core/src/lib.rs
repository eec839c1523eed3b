//! Linear systems read as dynamical sampling problems.
//!
//! A state `x` evolving under `A` is observed through a family of vectors `G` at the times of a
//! horizon. Observability of `(A, B)` is the statement that `{(A*)^k g}` or `{e^{tA*} g}` is a
//! frame, and most routines here compute one side of that dictionary numerically and report
//! the other.
//!
//! ```
//! use dynsamp_core::observability::{frame_report, reconstruct, ObservationRecord};
//! use dynsamp_core::{real, CVector, Operator, SamplingFamily, SystemSpec, TimeDomain, Tolerances};
//!
//! # fn main() -> dynsamp_core::Result<()> {
//! let a = Operator::real_diagonal(&[0.5, 0.25])?;
//! let g = SamplingFamily::unlabeled(vec![CVector::from_vec(vec![real(1.0), real(1.0)])])?;
//! let sys = SystemSpec::dense(a, g, TimeDomain::discrete(1))?;
//!
//! let tol = Tolerances::default();
//! assert!(frame_report(&sys, &tol)?.verdicts.frame_eob);
//!
//! let x = CVector::from_vec(vec![real(1.0), real(2.0)]);
//! let y = ObservationRecord::observe(&sys, &x)?.values();
//! let x0 = reconstruct(&sys, &y, &tol)?.x0;
//! assert!((x0 - x).norm() < 1e-12);
//! # Ok(())
//! # }
//! ```

pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod observability;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{c, real, CMatrix, CVector, C64};
pub use model::{DiagonalizableSystem, Dynamics, Operator, SamplingFamily, Spectrum, SystemSpec, TimeDomain};
pub use observability::{FrameReport, FrameVerdicts};
pub use tolerance::Tolerances;
