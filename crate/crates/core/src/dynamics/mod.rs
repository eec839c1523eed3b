//! Trajectories, controllability maps, reachability tests and horizon certificates.

mod quadrature;
mod tail;

pub use quadrature::{gauss_legendre, QuadratureGrid, QuadratureRule};
pub(crate) use tail::certify_tail_parts;
pub use tail::{certify_tail, TailCertificate, TailMethod};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hstack, real, sigma_min_for_dim, singular_values, CMatrix, CVector};
use crate::model::{SystemSpec, TimeDomain};
use crate::tolerance::Tolerances;

/// Control input: discrete samples `u(0), u(1), ...` or values at quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlSignal {
    Discrete(Vec<CVector>),
    Continuous { grid: QuadratureGrid, values: Vec<CVector> },
}

impl ControlSignal {
    fn values(&self) -> &[CVector] {
        match self {
            ControlSignal::Discrete(v) => v,
            ControlSignal::Continuous { values, .. } => values,
        }
    }
}

fn control_operator(sys: &SystemSpec) -> Result<&CMatrix> {
    sys.control().ok_or_else(|| Error::InvalidArgument("system has no control operator".into()))
}

fn check_state(sys: &SystemSpec, x: &CVector) -> Result<()> {
    if x.len() != sys.dim() {
        return Err(Error::DimensionMismatch(format!("state of length {} for dimension {}", x.len(), sys.dim())));
    }
    Ok(())
}

fn check_inputs(c: &CMatrix, values: &[CVector]) -> Result<()> {
    if let Some((j, u)) = values.iter().enumerate().find(|(_, u)| u.len() != c.ncols()) {
        return Err(Error::DimensionMismatch(format!(
            "control value {j} has length {}, control operator takes {}",
            u.len(),
            c.ncols()
        )));
    }
    Ok(())
}

fn is_zero_signal(u: Option<&ControlSignal>) -> bool {
    u.is_none_or(|u| u.values().iter().all(|v| v.iter().all(|z| z.norm() == 0.0)))
}

/// `x(k) = A^k x0 + sum_{j<k} A^{k-1-j} C u(j)`.
///
/// `u` must hold at least `k` values when present; extra values are ignored.
pub fn evolve_discrete(sys: &SystemSpec, x0: &CVector, u: Option<&[CVector]>, k: usize) -> Result<CVector> {
    check_state(sys, x0)?;
    let a = sys.operator().matrix();
    let n = sys.dim();
    // powers A^0 .. A^k
    let mut powers = Vec::with_capacity(k + 1);
    powers.push(CMatrix::identity(n, n));
    for m in 1..=k {
        let next = a * &powers[m - 1];
        powers.push(next);
    }
    let mut x = &powers[k] * x0;
    let Some(u) = u else { return Ok(x) };
    if u.iter().all(|v| v.iter().all(|z| z.norm() == 0.0)) {
        return Ok(x);
    }
    let c = control_operator(sys)?;
    if u.len() < k {
        return Err(Error::DimensionMismatch(format!("need {k} control values, got {}", u.len())));
    }
    check_inputs(c, &u[..k])?;
    for (j, uj) in u[..k].iter().enumerate() {
        x += &powers[k - 1 - j] * (c * uj);
    }
    Ok(x)
}

/// Mild solution `e^{tA} x0 + int_0^t e^{(t-s)A} C u(s) ds`, the integral by the signal's grid.
pub fn evolve_continuous(sys: &SystemSpec, x0: &CVector, u: Option<&ControlSignal>, t: f64) -> Result<CVector> {
    check_state(sys, x0)?;
    let free = sys.operator().exp(t)?.matrix() * x0;
    if is_zero_signal(u) {
        return Ok(free);
    }
    let Some(ControlSignal::Continuous { grid, values }) = u else {
        return Err(Error::InvalidArgument("continuous evolution needs a continuous signal".into()));
    };
    Ok(free + convolution(sys, grid, values, t)?)
}

fn convolution(sys: &SystemSpec, grid: &QuadratureGrid, values: &[CVector], t: f64) -> Result<CVector> {
    let c = control_operator(sys)?;
    if (grid.end() - t).abs() > 1e-12 * t.abs().max(1.0) {
        return Err(Error::Quadrature(format!("grid covers [0, {}] but the horizon is {t}", grid.end())));
    }
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} control values for {} quadrature nodes",
            values.len(),
            grid.len()
        )));
    }
    check_inputs(c, values)?;
    let a = sys.operator();
    let mut acc = CVector::zeros(sys.dim());
    for ((&s, &w), u) in grid.nodes().iter().zip(grid.weights()).zip(values) {
        acc += a.exp(t - s)?.matrix() * (c * u) * real(w);
    }
    Ok(acc)
}

/// Discrete step count or continuous time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Step(usize),
    Time(f64),
}

/// `Theta(h) u`: the reachable-state contribution of the input.
///
/// Discrete: `sum_{j=0}^{k} A^{k-j} C u(j)`; continuous: `int_0^t e^{(t-s)A} C u(s) ds`.
pub fn controllability_map(sys: &SystemSpec, u: &ControlSignal, horizon: Horizon) -> Result<CVector> {
    match (u, horizon) {
        (ControlSignal::Discrete(values), Horizon::Step(k)) => {
            if values.len() != k + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "Theta({k}) needs {} control values, got {}",
                    k + 1,
                    values.len()
                )));
            }
            let zero = CVector::zeros(sys.dim());
            if is_zero_signal(Some(u)) {
                return Ok(zero);
            }
            evolve_discrete(sys, &zero, Some(values), k + 1)
        }
        (ControlSignal::Continuous { grid, values }, Horizon::Time(t)) => {
            if is_zero_signal(Some(u)) {
                return Ok(CVector::zeros(sys.dim()));
            }
            convolution(sys, grid, values, t)
        }
        _ => Err(Error::InvalidArgument("signal kind does not match the horizon".into())),
    }
}

/// Matrix of `Theta` on the discretized control space.
///
/// Discrete horizon `gamma`: blocks `[A^gamma C, ..., A C, C]` for `u(0), ..., u(gamma)`.
/// Continuous horizon `tau`: blocks `sqrt(w_j) e^{(tau - s_j) A} C`, so that the Euclidean
/// norm of the coordinates is the quadrature `L^2` norm of the signal.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllabilityMatrix {
    pub matrix: CMatrix,
    /// Time node (or step) of each column block.
    pub block_times: Vec<f64>,
}

pub fn controllability_matrix(sys: &SystemSpec, horizon: &TimeDomain) -> Result<ControllabilityMatrix> {
    let c = control_operator(sys)?;
    let a = sys.operator();
    let n = sys.dim();
    match *horizon {
        TimeDomain::DiscreteFinite { gamma } => {
            let mut blocks = vec![c.clone()];
            for _ in 0..gamma {
                let next = a.matrix() * blocks.last().unwrap();
                blocks.push(next);
            }
            blocks.reverse();
            Ok(ControllabilityMatrix {
                matrix: hstack(&blocks, n),
                block_times: (0..=gamma).map(|j| j as f64).collect(),
            })
        }
        TimeDomain::ContinuousFinite { tau, panels, nodes_per_panel } => {
            let grid = QuadratureGrid::gauss_legendre(tau, panels, nodes_per_panel)?;
            let blocks = grid
                .nodes()
                .iter()
                .zip(grid.weights())
                .map(|(&s, &w)| Ok(a.exp(tau - s)?.matrix() * c * real(w.sqrt())))
                .collect::<Result<Vec<_>>>()?;
            Ok(ControllabilityMatrix { matrix: hstack(&blocks, n), block_times: grid.nodes().to_vec() })
        }
        _ => Err(Error::NotApplicable("controllability is only tested on finite horizons".into())),
    }
}

/// Exact / approximate controllability verdicts at a finite horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControllabilityReport {
    pub eco: bool,
    pub aco: bool,
    pub reach_rank: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

pub fn controllability_tests(
    sys: &SystemSpec,
    horizon: &TimeDomain,
    tol: &Tolerances,
) -> Result<ControllabilityReport> {
    let theta = controllability_matrix(sys, horizon)?;
    Ok(controllability_verdicts(&theta.matrix, sys.dim(), tol))
}

pub(crate) fn controllability_verdicts(theta: &CMatrix, dim: usize, tol: &Tolerances) -> ControllabilityReport {
    let sv = singular_values(theta);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sigma_min_for_dim(&sv, dim);
    let reach_rank = tol.rank(&sv, theta.nrows(), theta.ncols());
    ControllabilityReport {
        eco: tol.bounded_below(sigma_min * sigma_min, sigma_max * sigma_max),
        aco: reach_rank == dim,
        reach_rank,
        sigma_min,
        sigma_max,
    }
}

/// Orthonormal basis of the column space of `m` (numerical rank by `tol`).
pub fn range_basis(m: &CMatrix, tol: &Tolerances) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let r = tol.rank(&sv, m.nrows(), m.ncols());
    let u = svd.u.expect("requested U");
    let cols: Vec<CMatrix> = idx[..r].iter().map(|&i| u.columns(i, 1).into_owned()).collect();
    hstack(&cols, m.nrows())
}

/// Largest principal angle (radians) between two subspaces given by orthonormal bases.
pub fn max_principal_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let sv = singular_values(&(a.adjoint() * b));
    let smallest = sv.last().copied().unwrap_or(0.0).min(1.0);
    smallest.acos()
}
