//! Observability maps, Grammians, frame bounds and admissibility.
//!
//! A finite observability matrix realizes the map `x0 -> (B e^{tA} x0)_t` (continuous) or
//! `x0 -> (B A^k x0)_k` (discrete). Its rows are the frame vectors `e^{tA*} g` / `(A*)^k g`,
//! conjugated, so that `||Psi x||^2` is the frame sum and `Q = Psi* Psi` the frame operator.

mod duality;
mod record;

pub use duality::{duality_check, DualityReport};
pub use record::{reconstruct, ObservationRecord, Reconstruction};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{QuadratureGrid, TailCertificate};
use crate::error::{Error, Result};
use crate::linalg::{
    gram, hermitian_eigenvalues, hermitian_part, real, sigma_min_for_dim, singular_values, vstack, CMatrix, C64,
};
use crate::model::{DiagonalizableSystem, SamplingFamily, SystemSpec, TimeDomain};
use crate::tolerance::Tolerances;

/// Which time index a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowIndex {
    /// Step `k` (discrete) or node time `t_j` (continuous).
    pub time_or_step: f64,
    /// Index into the sampling family.
    pub sample: usize,
}

/// Finite realization of the observability map, rows ordered time-major then by sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservabilityMatrix {
    pub matrix: CMatrix,
    pub index_map: Vec<RowIndex>,
    /// `sqrt(w_j)` for quadrature rows, 1 for discrete rows.
    pub row_weights: Vec<f64>,
    pub discrete: bool,
}

impl ObservabilityMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Rows `g* A^k` for `k = 0..=last_step`.
pub fn discrete_observability(sys: &SystemSpec, last_step: usize) -> ObservabilityMatrix {
    let b = sys.observation().matrix().clone();
    let a = sys.operator().matrix();
    let g = b.nrows();
    let mut blocks = Vec::with_capacity(last_step + 1);
    blocks.push(b);
    for _ in 0..last_step {
        let next = blocks.last().unwrap() * a;
        blocks.push(next);
    }
    let index_map =
        (0..=last_step).flat_map(|k| (0..g).map(move |s| RowIndex { time_or_step: k as f64, sample: s })).collect();
    ObservabilityMatrix {
        matrix: vstack(&blocks, sys.dim()),
        index_map,
        row_weights: vec![1.0; (last_step + 1) * g],
        discrete: true,
    }
}

/// Rows `sqrt(w_j) g* e^{t_j A}` on an arbitrary time grid.
pub fn observability_on_grid(sys: &SystemSpec, grid: &QuadratureGrid) -> Result<ObservabilityMatrix> {
    let b = sys.observation().matrix().clone();
    let a = sys.operator();
    let g = b.nrows();
    // with eigen-data, g* e^{tA} = (g* V) e^{t Lambda} V^{-1}
    let eigen = sys.diagonalizable().map(|d| {
        let bv = match d.basis() {
            Some(v) => &b * v,
            None => b.clone(),
        };
        (bv, d.basis().map(|_| d.basis_inverse()), d.spectrum().mu().to_vec())
    });
    let block = |t: f64| -> Result<CMatrix> {
        match &eigen {
            Some((bv, vinv, mu)) => {
                let mut m = bv.clone();
                for (j, &z) in mu.iter().enumerate() {
                    let e = (z * t).exp();
                    if !(e.re.is_finite() && e.im.is_finite()) {
                        return Err(Error::Overflow { norm: z.norm() * t });
                    }
                    m.column_mut(j).iter_mut().for_each(|x| *x *= e);
                }
                Ok(match vinv {
                    Some(vi) => m * vi,
                    None => m,
                })
            }
            None => Ok(&b * a.exp(t)?.matrix()),
        }
    };
    let blocks = grid
        .nodes()
        .par_iter()
        .zip(grid.weights().par_iter())
        .map(|(&t, &w)| Ok(block(t)? * real(w.sqrt())))
        .collect::<Result<Vec<_>>>()?;
    let index_map =
        grid.nodes().iter().flat_map(|&t| (0..g).map(move |s| RowIndex { time_or_step: t, sample: s })).collect();
    let row_weights = grid.weights().iter().flat_map(|&w| std::iter::repeat_n(w.sqrt(), g)).collect();
    Ok(ObservabilityMatrix { matrix: vstack(&blocks, sys.dim()), index_map, row_weights, discrete: false })
}

/// Observability matrix for the system's own time domain.
///
/// Infinite horizons use the truncation already certified when the system was built.
pub fn observability_matrix(sys: &SystemSpec) -> Result<ObservabilityMatrix> {
    match *sys.time() {
        TimeDomain::DiscreteFinite { gamma } => Ok(discrete_observability(sys, gamma)),
        TimeDomain::DiscreteInfinite { truncation, .. } => Ok(discrete_observability(sys, truncation)),
        TimeDomain::ContinuousFinite { tau, panels, nodes_per_panel } => {
            observability_on_grid(sys, &QuadratureGrid::gauss_legendre(tau, panels, nodes_per_panel)?)
        }
        TimeDomain::ContinuousInfinite { horizon, panels, nodes_per_panel, .. } => {
            observability_on_grid(sys, &QuadratureGrid::gauss_legendre(horizon, panels, nodes_per_panel)?)
        }
    }
}

/// `Q = Psi* Psi`, Hermitian.
pub fn grammian(sys: &SystemSpec) -> Result<CMatrix> {
    Ok(gram(&observability_matrix(sys)?.matrix))
}

/// Infinite-horizon regimes with a closed-form Grammian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfiniteRegime {
    Discrete,
    Continuous,
}

/// Exact infinite-horizon Grammian of a diagonalizable operator.
///
/// In eigen-coordinates the entries are `c_n conj(c_m) S_nm` with `c_n = <g, phi_n>` and
/// `S_nm = 1 / (1 - conj(mu_n) mu_m)` (discrete) or `-1 / (conj(mu_n) + mu_m)` (continuous),
/// summed over the family and mapped back by `V^{-*} (.) V^{-1}`.
pub fn grammian_closed_form_diagonal(
    d: &DiagonalizableSystem,
    sampling: &SamplingFamily,
    regime: InfiniteRegime,
) -> Result<CMatrix> {
    let mu = d.spectrum().mu();
    let n = d.dim();
    if sampling.dim() != n {
        return Err(Error::DimensionMismatch("sampling vectors do not match the operator".into()));
    }
    match regime {
        InfiniteRegime::Discrete => {
            let bad: Vec<usize> = (0..n).filter(|&i| mu[i].norm() >= 1.0).collect();
            if !bad.is_empty() {
                return Err(Error::Convergence(format!("|mu| >= 1 at indices {bad:?}")));
            }
        }
        InfiniteRegime::Continuous => {
            let bad: Vec<usize> = (0..n).filter(|&i| mu[i].re >= 0.0).collect();
            if !bad.is_empty() {
                return Err(Error::Convergence(format!("Re mu >= 0 at indices {bad:?}")));
            }
        }
    }
    let kernel = |i: usize, j: usize| -> C64 {
        match regime {
            InfiniteRegime::Discrete => real(1.0) / (real(1.0) - mu[i].conj() * mu[j]),
            InfiniteRegime::Continuous => -real(1.0) / (mu[i].conj() + mu[j]),
        }
    };
    let mut coef = CMatrix::zeros(n, n);
    for g in sampling.vectors() {
        let c = d.coefficients(g);
        for i in 0..n {
            for j in 0..n {
                coef[(i, j)] += c[i] * c[j].conj() * kernel(i, j);
            }
        }
    }
    let vinv = d.basis_inverse();
    Ok(hermitian_part(&(vinv.adjoint() * coef * vinv)))
}

/// Frame-theoretic verdicts for the observability map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameVerdicts {
    /// Finite upper frame bound (the observation is admissible).
    pub bessel_admissible: bool,
    /// Trivial kernel: the family is complete.
    pub complete_aob: bool,
    /// Bounded below: the family is a frame.
    pub frame_eob: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameReport {
    /// Smallest eigenvalue of `Q`.
    pub c1: f64,
    /// Largest eigenvalue of `Q`.
    pub c2: f64,
    pub rank: usize,
    pub condition_number: f64,
    pub verdicts: FrameVerdicts,
    pub tail_certificate: Option<TailCertificate>,
}

impl FrameReport {
    /// Bounds from `Q`'s extreme eigenvalues, rank from `Psi`'s singular values.
    pub fn from_parts(psi: &CMatrix, q: &CMatrix, tol: &Tolerances) -> Self {
        let sv = singular_values(psi);
        let rank = tol.rank(&sv, psi.nrows(), psi.ncols());
        Self::assemble(q, rank, tol)
    }

    /// Everything from `Q` alone (rank from its eigenvalues).
    pub fn from_grammian(q: &CMatrix, tol: &Tolerances) -> Self {
        let mut ev = hermitian_eigenvalues(q);
        ev.reverse();
        let rank = tol.rank(&ev.iter().map(|v| v.max(0.0)).collect::<Vec<_>>(), q.nrows(), q.ncols());
        Self::assemble(q, rank, tol)
    }

    fn assemble(q: &CMatrix, rank: usize, tol: &Tolerances) -> Self {
        let ev = hermitian_eigenvalues(q);
        let c2 = ev.last().copied().unwrap_or(0.0).max(0.0);
        // rounding can leave a tiny negative eigenvalue on a singular Q
        let c1 = ev.first().copied().unwrap_or(0.0).clamp(0.0, c2);
        let dim = q.nrows();
        let frame_eob = tol.bounded_below(c1, c2);
        FrameReport {
            c1,
            c2,
            rank,
            condition_number: if c1 > 0.0 { c2 / c1 } else { f64::INFINITY },
            verdicts: FrameVerdicts { bessel_admissible: c2.is_finite(), complete_aob: rank == dim, frame_eob },
            tail_certificate: None,
        }
    }
}

pub fn frame_report(sys: &SystemSpec, tol: &Tolerances) -> Result<FrameReport> {
    let psi = observability_matrix(sys)?;
    let q = gram(&psi.matrix);
    let mut report = FrameReport::from_parts(&psi.matrix, &q, tol);
    report.tail_certificate = sys.tail_certificate().copied();
    Ok(report)
}

/// `sigma_min(Psi)` in the sense of the state dimension, and `sigma_max(Psi)`.
pub fn observability_singular_extremes(psi: &CMatrix) -> (f64, f64) {
    let sv = singular_values(psi);
    (sigma_min_for_dim(&sv, psi.ncols()), sv.first().copied().unwrap_or(0.0))
}

/// Upper frame bound against the a-priori admissibility constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityCheck {
    pub c2: f64,
    /// `(e^{2||A|| tau} - 1) / (2 ||A||) ||B||^2`, or `-||B||^2 / (2 omega)` at infinite time.
    pub bound: f64,
    /// Growth exponent used for the infinite-time bound.
    pub omega: Option<f64>,
    pub satisfied: bool,
}

pub fn admissibility_bound_check(sys: &SystemSpec, tol: &Tolerances) -> Result<AdmissibilityCheck> {
    let b2 = sys.observation().norm().powi(2);
    let a = sys.operator();
    let (bound, omega) = match *sys.time() {
        TimeDomain::ContinuousFinite { tau, .. } => {
            let norm = a.norm();
            let factor = if norm == 0.0 { tau } else { (2.0 * norm * tau).exp_m1() / (2.0 * norm) };
            (factor * b2, None)
        }
        TimeDomain::ContinuousInfinite { .. } => {
            // ||e^{tA}|| <= e^{t mu2} with mu2 the top eigenvalue of the Hermitian part
            let mu2 = hermitian_eigenvalues(a.matrix()).last().copied().unwrap_or(0.0);
            if mu2 < 0.0 {
                (-b2 / (2.0 * mu2), Some(mu2))
            } else {
                let d = match sys.dynamics() {
                    crate::model::Dynamics::Diagonalizable(d) => Some(d.clone()),
                    crate::model::Dynamics::Dense(a) => {
                        crate::model::spectral_decomposition(a, tol.diagonalization).ok()
                    }
                };
                let Some(d) = d else {
                    return Err(Error::NotApplicable(
                        "no contraction exponent available for a defective operator".into(),
                    ));
                };
                let omega = d.spectrum().spectral_abscissa();
                if omega >= 0.0 {
                    return Err(Error::NotApplicable("operator is not exponentially stable".into()));
                }
                let kappa = d.condition_number();
                (-b2 * kappa * kappa / (2.0 * omega), Some(omega))
            }
        }
        _ => return Err(Error::NotApplicable("admissibility bounds are stated for continuous time".into())),
    };
    let c2 = frame_report(sys, tol)?.c2;
    Ok(AdmissibilityCheck { c2, bound, omega, satisfied: c2 <= bound * (1.0 + 1e-8) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;
    use crate::model::{Dynamics, Operator, Spectrum};

    fn rank_one(a: Operator, b: &[f64], time: TimeDomain) -> SystemSpec {
        let g = CVector::from_iterator(b.len(), b.iter().map(|&x| real(x)));
        SystemSpec::dense(a, SamplingFamily::unlabeled(vec![g]).unwrap(), time).unwrap()
    }

    #[test]
    fn identity_family_at_step_zero() {
        let sys = SystemSpec::dense(
            Operator::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap(),
            SamplingFamily::standard_basis(2).unwrap(),
            TimeDomain::discrete(0),
        )
        .unwrap();
        let psi = observability_matrix(&sys).unwrap();
        assert_eq!(psi.matrix, CMatrix::identity(2, 2));
        let r = frame_report(&sys, &Tolerances::default()).unwrap();
        assert!((r.c1 - 1.0).abs() < 1e-15 && (r.c2 - 1.0).abs() < 1e-15);
        assert!(r.verdicts.bessel_admissible && r.verdicts.complete_aob && r.verdicts.frame_eob);
    }

    #[test]
    fn discrete_rows_for_diagonal_example() {
        let sys = rank_one(Operator::real_diagonal(&[0.5, 0.25]).unwrap(), &[1.0, 1.0], TimeDomain::discrete(1));
        let psi = observability_matrix(&sys).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[real(1.0), real(1.0), real(0.5), real(0.25)]);
        assert_eq!(psi.matrix, want);
        assert_eq!(psi.index_map[1], RowIndex { time_or_step: 1.0, sample: 0 });

        // eigenvalues of [[1.25, 1.125], [1.125, 1.0625]]
        let (tr, det): (f64, f64) = (1.25 + 1.0625, 1.25 * 1.0625 - 1.125 * 1.125);
        let disc = (tr * tr / 4.0 - det).sqrt();
        let r = frame_report(&sys, &Tolerances::default()).unwrap();
        assert!((r.c1 - (tr / 2.0 - disc)).abs() < 1e-14);
        assert!((r.c2 - (tr / 2.0 + disc)).abs() < 1e-14);
        assert!(r.verdicts.frame_eob);
    }

    #[test]
    fn vector_missing_an_eigendirection_is_incomplete() {
        let t = TimeDomain::DiscreteInfinite { truncation: 60, tail_tol: 1e-12 };
        let sys = rank_one(Operator::real_diagonal(&[0.5, 0.25]).unwrap(), &[1.0, 0.0], t);
        let r = frame_report(&sys, &Tolerances::default()).unwrap();
        assert_eq!(r.rank, 1);
        assert!(!r.verdicts.complete_aob && !r.verdicts.frame_eob);
    }

    #[test]
    fn continuous_zero_operator_scales_gram_by_tau() {
        let tau = 1.7;
        let g = vec![
            CVector::from_vec(vec![real(1.0), C64::new(0.0, 1.0)]),
            CVector::from_vec(vec![real(2.0), real(-1.0)]),
        ];
        let fam = SamplingFamily::unlabeled(g).unwrap();
        let sys = SystemSpec::dense(Operator::zeros(2).unwrap(), fam.clone(), TimeDomain::continuous(tau)).unwrap();
        let psi = observability_matrix(&sys).unwrap();
        let b = fam.observation_operator();
        for (r, idx) in psi.index_map.iter().enumerate() {
            let want = b.matrix().row(idx.sample) * real(psi.row_weights[r]);
            assert!((psi.matrix.row(r) - want).norm() < 1e-15);
        }
        let q = grammian(&sys).unwrap();
        let want = b.matrix().adjoint() * b.matrix() * real(tau);
        assert!((q - want).norm() < 1e-12);
    }

    #[test]
    fn scalar_grammians_against_closed_forms() {
        let t = TimeDomain::DiscreteInfinite { truncation: 40, tail_tol: 1e-12 };
        let sys = rank_one(Operator::real_diagonal(&[0.5]).unwrap(), &[1.0], t);
        assert!((grammian(&sys).unwrap()[(0, 0)].re - 4.0 / 3.0).abs() < 1e-12);

        let t = TimeDomain::ContinuousInfinite { horizon: 20.0, panels: 40, nodes_per_panel: 8, tail_tol: 1e-12 };
        let sys = rank_one(Operator::real_diagonal(&[-1.0]).unwrap(), &[1.0], t);
        assert!((grammian(&sys).unwrap()[(0, 0)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let fam = SamplingFamily::unlabeled(vec![CVector::from_element(1, real(1.0))]).unwrap();
        let d = DiagonalizableSystem::diagonal(Spectrum::from_mu(vec![real(0.5)]).unwrap());
        let q = grammian_closed_form_diagonal(&d, &fam, InfiniteRegime::Discrete).unwrap();
        assert!((q[(0, 0)].re - 4.0 / 3.0).abs() < 1e-15);
        let d = DiagonalizableSystem::diagonal(Spectrum::from_mu(vec![real(-1.0)]).unwrap());
        let q = grammian_closed_form_diagonal(&d, &fam, InfiniteRegime::Continuous).unwrap();
        assert!((q[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(grammian_closed_form_diagonal(&d, &fam, InfiniteRegime::Discrete).is_err());
    }

    #[test]
    fn duplicate_eigenvalue_gives_singular_closed_form() {
        let fam = SamplingFamily::unlabeled(vec![CVector::from_element(2, real(1.0))]).unwrap();
        let d = DiagonalizableSystem::diagonal(Spectrum::from_mu(vec![real(0.5), real(0.5)]).unwrap());
        let q = grammian_closed_form_diagonal(&d, &fam, InfiniteRegime::Discrete).unwrap();
        let r = FrameReport::from_grammian(&q, &Tolerances::default());
        assert_eq!(r.rank, 1);
        assert!(r.c1.abs() < 1e-15);
    }

    #[test]
    fn admissibility_examples() {
        let tol = Tolerances::default();
        let sys = SystemSpec::dense(
            Operator::zeros(2).unwrap(),
            SamplingFamily::standard_basis(2).unwrap(),
            TimeDomain::continuous(2.0),
        )
        .unwrap();
        let chk = admissibility_bound_check(&sys, &tol).unwrap();
        assert!((chk.bound - 2.0).abs() < 1e-15 && (chk.c2 - 2.0).abs() < 1e-12 && chk.satisfied);

        let a = Operator::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let sys = rank_one(a, &[1.0, 0.0], TimeDomain::continuous(1.0));
        let chk = admissibility_bound_check(&sys, &tol).unwrap();
        assert!((chk.bound - 3.194528049465325).abs() < 1e-12);
        assert!(chk.satisfied);

        let t = TimeDomain::ContinuousInfinite { horizon: 20.0, panels: 40, nodes_per_panel: 8, tail_tol: 1e-12 };
        let sys = SystemSpec::new(
            Dynamics::Dense(Operator::real_diagonal(&[-1.0]).unwrap()),
            SamplingFamily::standard_basis(1).unwrap(),
            t,
            None,
        )
        .unwrap();
        let chk = admissibility_bound_check(&sys, &tol).unwrap();
        assert!((chk.bound - 0.5).abs() < 1e-15 && (chk.c2 - 0.5).abs() < 1e-10);

        let sys = rank_one(Operator::zeros(1).unwrap(), &[1.0], TimeDomain::discrete(2));
        assert!(matches!(admissibility_bound_check(&sys, &tol), Err(Error::NotApplicable(_))));
    }
}
