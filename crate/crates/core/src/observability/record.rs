use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{observability_matrix, FrameReport, ObservabilityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{gram, CVector, C64};
use crate::model::{SamplingFamily, SystemSpec};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRow {
    pub time_or_step: f64,
    pub sample_label: String,
    pub re: f64,
    pub im: f64,
}

/// Observed values `(Psi x)_r`, one row per observability-matrix row, in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    pub rows: Vec<ObservationRow>,
}

impl ObservationRecord {
    pub fn from_values(psi: &ObservabilityMatrix, sampling: &SamplingFamily, y: &CVector) -> Result<Self> {
        if y.len() != psi.rows() {
            return Err(Error::DimensionMismatch(format!("{} observations for {} rows", y.len(), psi.rows())));
        }
        let rows = psi
            .index_map
            .iter()
            .zip(y.iter())
            .map(|(idx, v)| ObservationRow {
                time_or_step: idx.time_or_step,
                sample_label: sampling.labels()[idx.sample].clone(),
                re: v.re,
                im: v.im,
            })
            .collect();
        Ok(ObservationRecord { rows })
    }

    /// Observes `x` through the system.
    pub fn observe(sys: &SystemSpec, x: &CVector) -> Result<Self> {
        let psi = observability_matrix(sys)?;
        if x.len() != sys.dim() {
            return Err(Error::DimensionMismatch("state length".into()));
        }
        Self::from_values(&psi, sys.sampling(), &(&psi.matrix * x))
    }

    pub fn values(&self) -> CVector {
        CVector::from_iterator(self.rows.len(), self.rows.iter().map(|r| C64::new(r.re, r.im)))
    }

    /// Checks row order against the index map (time-major, then sample).
    pub fn check_layout(&self, psi: &ObservabilityMatrix, sampling: &SamplingFamily) -> Result<()> {
        if self.rows.len() != psi.rows() {
            return Err(Error::DimensionMismatch(format!(
                "record has {} rows, observability matrix has {}",
                self.rows.len(),
                psi.rows()
            )));
        }
        for (r, (row, idx)) in self.rows.iter().zip(&psi.index_map).enumerate() {
            let label = &sampling.labels()[idx.sample];
            if row.time_or_step != idx.time_or_step || &row.sample_label != label {
                return Err(Error::InvalidArgument(format!(
                    "row {r}: expected ({}, {label}), found ({}, {})",
                    idx.time_or_step, row.time_or_step, row.sample_label
                )));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::result::Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wr.serialize(row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> std::result::Result<Self, csv::Error> {
        let mut rd = csv::Reader::from_reader(r);
        let rows = rd.deserialize().collect::<std::result::Result<Vec<ObservationRow>, _>>()?;
        Ok(ObservationRecord { rows })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub x0: CVector,
    /// `||Psi x0 - y||`.
    pub residual: f64,
    pub frame: FrameReport,
}

/// `x0 = Q^{-1} Psi* y`, refused unless the system is exactly observable.
pub fn reconstruct(sys: &SystemSpec, y: &CVector, tol: &Tolerances) -> Result<Reconstruction> {
    let psi = observability_matrix(sys)?;
    if y.len() != psi.rows() {
        return Err(Error::DimensionMismatch(format!("{} observations for {} rows", y.len(), psi.rows())));
    }
    let q = gram(&psi.matrix);
    let mut frame = FrameReport::from_parts(&psi.matrix, &q, tol);
    frame.tail_certificate = sys.tail_certificate().copied();
    if !frame.verdicts.frame_eob {
        return Err(Error::NotObservable { c1: frame.c1, threshold: tol.eob_rel * frame.c2 });
    }
    let rhs = psi.matrix.adjoint() * y;
    let x0 =
        q.col_piv_qr().solve(&rhs).ok_or(Error::NotObservable { c1: frame.c1, threshold: tol.eob_rel * frame.c2 })?;
    let residual = (&psi.matrix * &x0 - y).norm();
    Ok(Reconstruction { x0, residual, frame })
}
