use serde::Serialize;

use super::operator::Operator;
use super::spectrum::DiagonalizableSystem;
use crate::dynamics::{certify_tail_parts, TailCertificate};
use crate::error::{Error, Result};
use crate::linalg::{all_finite, CMatrix, CVector};

/// The sampling vectors `G`; the observation operator is their analysis operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingFamily {
    vectors: Vec<CVector>,
    labels: Vec<String>,
}

impl SamplingFamily {
    pub fn new(vectors: Vec<CVector>, labels: Vec<String>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::InvalidArgument("sampling family needs at least one vector".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("sampling vectors must be non-empty".into()));
        }
        if let Some(i) = vectors.iter().position(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "sampling vector {i} has length {}, expected {dim}",
                vectors[i].len()
            )));
        }
        if labels.len() != vectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} sampling vectors",
                labels.len(),
                vectors.len()
            )));
        }
        if !vectors.iter().all(|v| all_finite(v.iter())) {
            return Err(Error::NonFinite("sampling vectors"));
        }
        Ok(SamplingFamily { vectors, labels })
    }

    /// Labels `g0, g1, ...`.
    pub fn unlabeled(vectors: Vec<CVector>) -> Result<Self> {
        let labels = (0..vectors.len()).map(|i| format!("g{i}")).collect();
        SamplingFamily::new(vectors, labels)
    }

    /// The standard basis of `C^dim`.
    pub fn standard_basis(dim: usize) -> Result<Self> {
        let vectors = (0..dim)
            .map(|i| {
                let mut v = CVector::zeros(dim);
                v[i] = crate::linalg::real(1.0);
                v
            })
            .collect();
        SamplingFamily::unlabeled(vectors)
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn observation_operator(&self) -> ObservationOperator {
        ObservationOperator::from_family(self)
    }
}

/// `B x = (<x, g>)_g`: row `g` is the conjugate transpose of the sampling vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationOperator {
    matrix: CMatrix,
}

impl ObservationOperator {
    pub fn from_family(family: &SamplingFamily) -> Self {
        let mut m = CMatrix::zeros(family.len(), family.dim());
        for (i, g) in family.vectors().iter().enumerate() {
            m.row_mut(i).copy_from(&g.adjoint());
        }
        ObservationOperator { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Recovers `G = {B* e_i}`.
    pub fn to_vectors(&self) -> Vec<CVector> {
        self.matrix.row_iter().map(|r| r.adjoint()).collect()
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::spectral_norm(&self.matrix)
    }
}

/// Discrete or continuous, finite or (certified) infinite observation horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeDomain {
    DiscreteFinite { gamma: usize },
    DiscreteInfinite { truncation: usize, tail_tol: f64 },
    ContinuousFinite { tau: f64, panels: usize, nodes_per_panel: usize },
    ContinuousInfinite { horizon: f64, panels: usize, nodes_per_panel: usize, tail_tol: f64 },
}

pub const DEFAULT_PANELS: usize = 8;
pub const DEFAULT_NODES_PER_PANEL: usize = 8;

/// Smallest panel count, at least [`DEFAULT_PANELS`], with `end / panels * rate <= 1`.
pub fn panels_for(end: f64, rate: f64) -> usize {
    let need = (end * rate).ceil();
    if need.is_finite() && need > DEFAULT_PANELS as f64 {
        need as usize
    } else {
        DEFAULT_PANELS
    }
}

impl TimeDomain {
    pub fn discrete(gamma: usize) -> Self {
        TimeDomain::DiscreteFinite { gamma }
    }

    /// Finite continuous horizon with the default 8 x 8 Gauss-Legendre grid.
    pub fn continuous(tau: f64) -> Self {
        TimeDomain::ContinuousFinite { tau, panels: DEFAULT_PANELS, nodes_per_panel: DEFAULT_NODES_PER_PANEL }
    }

    /// Finite continuous horizon whose panels satisfy `panel length * rate <= 1`.
    pub fn continuous_resolved(tau: f64, rate: f64) -> Self {
        TimeDomain::ContinuousFinite { tau, panels: panels_for(tau, rate), nodes_per_panel: DEFAULT_NODES_PER_PANEL }
    }

    pub fn validate(&self) -> Result<()> {
        let check_grid = |panels: usize, nodes: usize| {
            if panels < 1 || nodes < 2 {
                Err(Error::InvalidArgument(format!(
                    "quadrature needs panels >= 1 and nodes_per_panel >= 2 (got {panels}, {nodes})"
                )))
            } else {
                Ok(())
            }
        };
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            TimeDomain::DiscreteFinite { .. } => Ok(()),
            TimeDomain::DiscreteInfinite { truncation, tail_tol } => {
                if truncation == 0 {
                    return Err(Error::InvalidArgument("truncation must be positive".into()));
                }
                positive("tail_tol", tail_tol)
            }
            TimeDomain::ContinuousFinite { tau, panels, nodes_per_panel } => {
                positive("tau", tau)?;
                check_grid(panels, nodes_per_panel)
            }
            TimeDomain::ContinuousInfinite { horizon, panels, nodes_per_panel, tail_tol } => {
                positive("horizon", horizon)?;
                positive("tail_tol", tail_tol)?;
                check_grid(panels, nodes_per_panel)
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, TimeDomain::DiscreteFinite { .. } | TimeDomain::DiscreteInfinite { .. })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, TimeDomain::DiscreteInfinite { .. } | TimeDomain::ContinuousInfinite { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            TimeDomain::DiscreteFinite { .. } => "discrete_finite",
            TimeDomain::DiscreteInfinite { .. } => "discrete_infinite",
            TimeDomain::ContinuousFinite { .. } => "continuous_finite",
            TimeDomain::ContinuousInfinite { .. } => "continuous_infinite",
        }
    }
}

/// How the dynamic operator was supplied.
#[derive(Debug, Clone, PartialEq)]
pub enum Dynamics {
    Dense(Operator),
    Diagonalizable(DiagonalizableSystem),
}

/// A dynamic operator, sampling family, horizon and optional control operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    dynamics: Dynamics,
    operator: Operator,
    sampling: SamplingFamily,
    time: TimeDomain,
    control: Option<CMatrix>,
    tail: Option<TailCertificate>,
}

impl SystemSpec {
    /// Validates dimensions; infinite horizons must pass the tail certificate.
    pub fn new(
        dynamics: Dynamics,
        sampling: SamplingFamily,
        time: TimeDomain,
        control: Option<CMatrix>,
    ) -> Result<Self> {
        time.validate()?;
        let operator = match &dynamics {
            Dynamics::Dense(a) => a.clone(),
            Dynamics::Diagonalizable(d) => d.to_operator()?,
        };
        let dim = operator.dim();
        if sampling.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "sampling vectors have length {}, state dimension is {dim}",
                sampling.dim()
            )));
        }
        if let Some(c) = &control {
            if c.nrows() != dim || c.ncols() == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "control operator must be {dim}xU with U >= 1, got {}x{}",
                    c.nrows(),
                    c.ncols()
                )));
            }
            if !all_finite(c.iter()) {
                return Err(Error::NonFinite("control operator"));
            }
        }
        let tail = if time.is_infinite() {
            let cert = certify_tail_parts(&dynamics, &operator, &sampling.observation_operator(), &time)?;
            if !cert.ok {
                return Err(Error::TailNotCertifiable(format!(
                    "tail bound {:e} exceeds tolerance; suggested truncation {}",
                    cert.tail_bound, cert.suggested_truncation
                )));
            }
            Some(cert)
        } else {
            None
        };
        Ok(SystemSpec { dynamics, operator, sampling, time, control, tail })
    }

    pub fn dense(a: Operator, sampling: SamplingFamily, time: TimeDomain) -> Result<Self> {
        SystemSpec::new(Dynamics::Dense(a), sampling, time, None)
    }

    /// Same operator and sampling, different horizon.
    pub fn with_time(&self, time: TimeDomain) -> Result<Self> {
        SystemSpec::new(self.dynamics.clone(), self.sampling.clone(), time, self.control.clone())
    }

    pub fn with_control(&self, control: CMatrix) -> Result<Self> {
        SystemSpec::new(self.dynamics.clone(), self.sampling.clone(), self.time, Some(control))
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn sampling(&self) -> &SamplingFamily {
        &self.sampling
    }

    pub fn observation(&self) -> ObservationOperator {
        self.sampling.observation_operator()
    }

    pub fn time(&self) -> &TimeDomain {
        &self.time
    }

    pub fn control(&self) -> Option<&CMatrix> {
        self.control.as_ref()
    }

    pub fn tail_certificate(&self) -> Option<&TailCertificate> {
        self.tail.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn diagonalizable(&self) -> Option<&DiagonalizableSystem> {
        match &self.dynamics {
            Dynamics::Diagonalizable(d) => Some(d),
            Dynamics::Dense(_) => None,
        }
    }
}
