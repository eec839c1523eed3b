use serde::Serialize;

use super::{frame_report, observability_matrix, observability_singular_extremes};
use crate::dynamics::{controllability_matrix, controllability_verdicts};
use crate::error::{Error, Result};
use crate::linalg::{hstack, relative_frobenius_error, CMatrix};
use crate::model::{Dynamics, SystemSpec};
use crate::tolerance::Tolerances;

/// Numerical comparison of `Psi*` for `(A, B)` with `Theta` for the dual pair `(A*, B*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityReport {
    /// `||Psi* - Theta R|| / ||Psi||` (Frobenius), `R` reversing the time blocks.
    pub adjoint_identity_error: f64,
    /// Same without the time reflection.
    pub unreflected_error: f64,
    /// The unreflected identity fails while the reflected one holds.
    pub reflection_needed: bool,
    pub eob: bool,
    pub aob: bool,
    pub dual_eco: bool,
    pub dual_aco: bool,
    pub eob_iff_dual_eco: bool,
    pub aob_iff_dual_aco: bool,
    pub sigma_min_observability: f64,
    pub sigma_min_dual_controllability: f64,
}

const IDENTITY_TOL: f64 = 1e-10;

pub fn duality_check(sys: &SystemSpec, tol: &Tolerances) -> Result<DualityReport> {
    let horizon = *sys.time();
    if horizon.is_infinite() {
        return Err(Error::NotApplicable("duality is checked on finite horizons only".into()));
    }
    let psi = observability_matrix(sys)?;
    let frame = frame_report(sys, tol)?;

    let b = sys.observation();
    let dual = SystemSpec::new(
        Dynamics::Dense(sys.operator().adjoint()),
        sys.sampling().clone(),
        horizon,
        Some(b.matrix().adjoint()),
    )?;
    let theta = controllability_matrix(&dual, &horizon)?.matrix;
    let ctrl = controllability_verdicts(&theta, sys.dim(), tol);

    let block = b.matrix().nrows();
    let blocks: Vec<CMatrix> =
        (0..theta.ncols() / block).rev().map(|j| theta.columns(j * block, block).into_owned()).collect();
    // composite Gauss-Legendre grids are symmetric, so s -> tau - s is a block reversal
    let reflected = hstack(&blocks, sys.dim());

    let psi_adj = psi.matrix.adjoint();
    let adjoint_identity_error = relative_frobenius_error(&reflected, &psi_adj);
    let unreflected_error = relative_frobenius_error(&theta, &psi_adj);
    let (sigma_min_observability, _) = observability_singular_extremes(&psi.matrix);

    let eob = frame.verdicts.frame_eob;
    let aob = frame.verdicts.complete_aob;
    Ok(DualityReport {
        adjoint_identity_error,
        unreflected_error,
        reflection_needed: unreflected_error > IDENTITY_TOL && adjoint_identity_error <= IDENTITY_TOL,
        eob,
        aob,
        dual_eco: ctrl.eco,
        dual_aco: ctrl.aco,
        eob_iff_dual_eco: eob == ctrl.eco,
        aob_iff_dual_aco: aob == ctrl.aco,
        sigma_min_observability,
        sigma_min_dual_controllability: ctrl.sigma_min,
    })
}
