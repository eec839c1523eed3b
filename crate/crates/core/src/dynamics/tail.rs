use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, spectral_norm};
use crate::model::{
    eigenvalues, spectral_decomposition, DiagonalizableSystem, Dynamics, ObservationOperator, Operator, SystemSpec,
    TimeDomain, DEFAULT_DIAGONALIZATION_TOL,
};

/// How the tail bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    /// Geometric / exponential tail through an eigenvector basis.
    Spectral,
    /// Decay of `||A^p||` or `||e^{hA}||` below one, for defective operators.
    PowerNorm,
    /// No truncation used.
    ClosedForm,
}

/// Upper bound on the neglected part of `||Psi x||^2 / ||x||^2` for an infinite horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCertificate {
    pub ok: bool,
    pub tail_bound: f64,
    /// Truncation step `K` (discrete) or horizon `T` (continuous) that meets the tolerance.
    pub suggested_truncation: f64,
    pub method: TailMethod,
    pub basis_condition: Option<f64>,
}

impl TailCertificate {
    pub fn closed_form() -> Self {
        TailCertificate {
            ok: true,
            tail_bound: 0.0,
            suggested_truncation: 0.0,
            method: TailMethod::ClosedForm,
            basis_condition: None,
        }
    }
}

/// Certifies a truncated infinite horizon of `sys`'s operator and sampling.
pub fn certify_tail(sys: &SystemSpec, kind: &TimeDomain) -> Result<TailCertificate> {
    certify_tail_parts(sys.dynamics(), sys.operator(), &sys.observation(), kind)
}

fn eigen_data(dynamics: &Dynamics, a: &Operator) -> Option<DiagonalizableSystem> {
    match dynamics {
        Dynamics::Diagonalizable(d) => Some(d.clone()),
        Dynamics::Dense(_) => spectral_decomposition(a, DEFAULT_DIAGONALIZATION_TOL).ok(),
    }
}

pub(crate) fn certify_tail_parts(
    dynamics: &Dynamics,
    a: &Operator,
    b: &ObservationOperator,
    kind: &TimeDomain,
) -> Result<TailCertificate> {
    let b2 = b.norm().powi(2);
    match *kind {
        TimeDomain::DiscreteInfinite { truncation, tail_tol } => discrete_tail(dynamics, a, b2, truncation, tail_tol),
        TimeDomain::ContinuousInfinite { horizon, tail_tol, .. } => continuous_tail(dynamics, a, b2, horizon, tail_tol),
        _ => Err(Error::InvalidArgument("tail certificate needs an infinite time domain".into())),
    }
}

fn discrete_tail(
    dynamics: &Dynamics,
    a: &Operator,
    b2: f64,
    truncation: usize,
    tail_tol: f64,
) -> Result<TailCertificate> {
    let rho = eigenvalues(a).spectral_radius();
    if rho >= 1.0 {
        return Err(Error::TailNotCertifiable(format!("spectral radius {rho} is not below one (see certify_tail)")));
    }
    if let Some(d) = eigen_data(dynamics, a) {
        let rho = d.spectrum().spectral_radius();
        let kappa = d.condition_number();
        let scale = b2 * kappa * kappa / (1.0 - rho * rho);
        let bound = |k: usize| scale * rho.powf(2.0 * (k as f64 + 1.0));
        let tail_bound = bound(truncation);
        let suggested = if rho == 0.0 || scale <= tail_tol {
            0.0
        } else {
            // rho^{2(K+1)} <= tol / scale
            let mut k = ((tail_tol / scale).ln() / (2.0 * rho.ln()) - 1.0).ceil().max(0.0) as usize;
            while bound(k) > tail_tol {
                k += 1;
            }
            k as f64
        };
        return Ok(TailCertificate {
            ok: tail_bound <= tail_tol,
            tail_bound,
            suggested_truncation: suggested,
            method: TailMethod::Spectral,
            basis_condition: Some(kappa),
        });
    }

    // defective: find p with ||A^p|| < 1
    let mut p = 1u64;
    let q = loop {
        let q = a.pow(p).norm();
        if q < 1.0 {
            break q;
        }
        if p > 1 << 16 {
            return Err(Error::TailNotCertifiable("no power of A has norm below one".into()));
        }
        p *= 2;
    };
    let bound = |k: usize| -> f64 {
        let mut m = a.pow(k as u64 + 1);
        let mut s = 0.0;
        for _ in 0..p {
            s += m.norm().powi(2);
            m = Operator::new(m.matrix() * a.matrix()).expect("finite");
        }
        b2 * s / (1.0 - q * q)
    };
    let tail_bound = bound(truncation);
    let mut k = truncation.max(1);
    let mut suggested = truncation;
    if tail_bound > tail_tol {
        while k < 1 << 24 {
            k *= 2;
            if bound(k) <= tail_tol {
                suggested = k;
                break;
            }
        }
    }
    Ok(TailCertificate {
        ok: tail_bound <= tail_tol,
        tail_bound,
        suggested_truncation: suggested as f64,
        method: TailMethod::PowerNorm,
        basis_condition: None,
    })
}

fn continuous_tail(dynamics: &Dynamics, a: &Operator, b2: f64, horizon: f64, tail_tol: f64) -> Result<TailCertificate> {
    let omega = eigenvalues(a).spectral_abscissa();
    if omega >= 0.0 {
        return Err(Error::TailNotCertifiable(format!("spectral abscissa {omega} is not negative (see certify_tail)")));
    }
    if let Some(d) = eigen_data(dynamics, a) {
        let omega = d.spectrum().spectral_abscissa();
        let kappa = d.condition_number();
        let scale = b2 * kappa * kappa / (-2.0 * omega);
        let bound = |t: f64| scale * (2.0 * omega * t).exp();
        let tail_bound = bound(horizon);
        let suggested = if scale <= tail_tol {
            0.0
        } else {
            let mut t = (tail_tol / scale).ln() / (2.0 * omega);
            // rounding in exp can leave the bound an ulp above the tolerance
            while bound(t) > tail_tol {
                t *= 1.0 + 1e-12;
            }
            t
        };
        return Ok(TailCertificate {
            ok: tail_bound <= tail_tol,
            tail_bound,
            suggested_truncation: suggested,
            method: TailMethod::Spectral,
            basis_condition: Some(kappa),
        });
    }

    // defective: ||e^{sA}|| <= e^{s max(mu2, 0)} on [0, h], then geometric decay in steps of h
    let log_norm = hermitian_eigenvalues(a.matrix()).last().copied().unwrap_or(0.0).max(0.0);
    let mut h = 1.0;
    let q = loop {
        let q = a.exp(h)?.norm();
        if q < 1.0 {
            break q;
        }
        if h > 1e6 {
            return Err(Error::TailNotCertifiable("no exponential step has norm below one".into()));
        }
        h *= 2.0;
    };
    let local = (h * log_norm).exp();
    let bound = |t: f64| -> Result<f64> {
        let e = spectral_norm(a.exp(t)?.matrix());
        Ok(b2 * e * e * local * local * h / (1.0 - q * q))
    };
    let tail_bound = bound(horizon)?;
    let mut suggested = horizon;
    if tail_bound > tail_tol {
        let mut t = horizon;
        while t < 1e7 {
            t *= 2.0;
            if bound(t)? <= tail_tol {
                suggested = t;
                break;
            }
        }
    }
    Ok(TailCertificate {
        ok: tail_bound <= tail_tol,
        tail_bound,
        suggested_truncation: suggested,
        method: TailMethod::PowerNorm,
        basis_condition: None,
    })
}
