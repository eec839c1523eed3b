use serde::Serialize;

use super::operator::Operator;
use crate::error::{Error, Result};
use crate::linalg::{all_finite, real, singular_values, CMatrix, CVector, C64, EPS};

/// Eigenvalues of a dynamic operator.
///
/// `mu` holds the eigenvalues in the direct convention `A phi = mu phi`. The
/// spectral criteria are written for `A phi = -lambda phi`; they read
/// [`Spectrum::lambda_view`], never `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    mu: Vec<C64>,
}

impl Spectrum {
    pub fn from_mu(mu: Vec<C64>) -> Result<Self> {
        if !all_finite(mu.iter()) {
            return Err(Error::NonFinite("eigenvalues"));
        }
        Ok(Spectrum { mu })
    }

    /// Builds the spectrum from values in the `A phi = -lambda phi` convention.
    pub fn from_lambda(lambda: &[C64]) -> Result<Self> {
        Spectrum::from_mu(lambda.iter().map(|&l| -l).collect())
    }

    pub fn mu(&self) -> &[C64] {
        &self.mu
    }

    /// `lambda_n = -mu_n`.
    pub fn lambda_view(&self) -> Vec<C64> {
        self.mu.iter().map(|&m| -m).collect()
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.mu.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.mu.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Eigenvalues of `a` from a complex Schur form. Does not require diagonalizability.
pub fn eigenvalues(a: &Operator) -> Spectrum {
    let t = a.matrix().clone().schur().unpack().1;
    Spectrum { mu: (0..a.dim()).map(|i| t[(i, i)]).collect() }
}

/// An operator given by its eigenvalues and a (possibly non-orthonormal) eigenvector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizableSystem {
    spectrum: Spectrum,
    basis: Option<CMatrix>,
    basis_norms: Vec<f64>,
}

impl DiagonalizableSystem {
    /// Diagonal operator in the standard orthonormal basis.
    pub fn diagonal(spectrum: Spectrum) -> Self {
        let n = spectrum.len();
        DiagonalizableSystem { spectrum, basis: None, basis_norms: vec![1.0; n] }
    }

    /// `basis` columns are eigenvectors; it must be invertible.
    pub fn with_basis(spectrum: Spectrum, basis: CMatrix) -> Result<Self> {
        let n = spectrum.len();
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "basis must be {n}x{n}, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if !all_finite(basis.iter()) {
            return Err(Error::NonFinite("eigenvector basis"));
        }
        let sv = singular_values(&basis);
        let smax = sv[0];
        let smin = sv[n - 1];
        if smin <= n as f64 * EPS * smax {
            return Err(Error::NotDiagonalizable { condition: f64::INFINITY });
        }
        let basis_norms = basis.column_iter().map(|c| c.norm()).collect();
        Ok(DiagonalizableSystem { spectrum, basis: Some(basis), basis_norms })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn basis(&self) -> Option<&CMatrix> {
        self.basis.as_ref()
    }

    pub fn basis_norms(&self) -> &[f64] {
        &self.basis_norms
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    /// Basis matrix, identity when no basis was given.
    pub fn basis_matrix(&self) -> CMatrix {
        self.basis.clone().unwrap_or_else(|| CMatrix::identity(self.dim(), self.dim()))
    }

    pub fn basis_inverse(&self) -> CMatrix {
        match &self.basis {
            // invertibility checked at construction
            Some(v) => v.clone().try_inverse().expect("basis is invertible"),
            None => CMatrix::identity(self.dim(), self.dim()),
        }
    }

    /// Condition number of the eigenvector basis (1 for an orthonormal one).
    pub fn condition_number(&self) -> f64 {
        match &self.basis {
            None => 1.0,
            Some(v) => {
                let sv = singular_values(v);
                sv[0] / sv[sv.len() - 1]
            }
        }
    }

    /// `V diag(mu) V^{-1}`.
    pub fn to_operator(&self) -> Result<Operator> {
        let d = CMatrix::from_diagonal(&CVector::from_column_slice(self.spectrum.mu()));
        match &self.basis {
            None => Operator::new(d),
            Some(v) => Operator::new(v * d * self.basis_inverse()),
        }
    }

    /// `<b, phi_n>` for every eigenvector.
    pub fn coefficients(&self, b: &CVector) -> CVector {
        match &self.basis {
            None => b.clone(),
            Some(v) => v.adjoint() * b,
        }
    }

    /// `e^{tA} = V e^{t Lambda} V^{-1}`.
    pub fn exp(&self, t: f64) -> CMatrix {
        let d: Vec<C64> = self.spectrum.mu().iter().map(|&m| (m * t).exp()).collect();
        let d = CMatrix::from_diagonal(&CVector::from_vec(d));
        match &self.basis {
            None => d,
            Some(v) => v * d * self.basis_inverse(),
        }
    }
}

/// Default eigenvector-basis condition threshold is `1 / DEFAULT_DIAGONALIZATION_TOL`.
pub const DEFAULT_DIAGONALIZATION_TOL: f64 = 1e-8;

/// Eigen-decomposition with a diagonalizability certificate.
///
/// Fails when the unit-norm eigenvector matrix has condition number above `1 / tol`
/// or when `V Lambda V^{-1}` does not reproduce `A` within `tol * ||A||`.
pub fn spectral_decomposition(a: &Operator, tol: f64) -> Result<DiagonalizableSystem> {
    let n = a.dim();
    let (q, t) = a.matrix().clone().schur().unpack();
    let mu: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = t.norm().max(f64::MIN_POSITIVE);

    let strictly_upper =
        (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).map(|(i, j)| t[(i, j)].norm()).fold(0.0, f64::max);

    let vectors = if strictly_upper <= 1e-13 * scale {
        // normal operator: Schur vectors are eigenvectors
        q
    } else {
        let smin = EPS * scale;
        let mut y = CMatrix::zeros(n, n);
        for k in 0..n {
            y[(k, k)] = real(1.0);
            for i in (0..k).rev() {
                let mut num = C64::new(0.0, 0.0);
                for j in (i + 1)..=k {
                    num += t[(i, j)] * y[(j, k)];
                }
                let mut den = t[(i, i)] - t[(k, k)];
                if den.norm() < smin {
                    den = real(smin);
                }
                y[(i, k)] = -num / den;
            }
            let norm = y.column(k).norm();
            y.column_mut(k).unscale_mut(norm);
        }
        let v = q * y;
        if !all_finite(v.iter()) {
            return Err(Error::NotDiagonalizable { condition: f64::INFINITY });
        }
        v
    };
    let mut v = vectors;
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        col.unscale_mut(norm);
    }

    let sv = singular_values(&v);
    let condition = sv[0] / sv[n - 1];
    if !condition.is_finite() || condition > 1.0 / tol {
        return Err(Error::NotDiagonalizable { condition });
    }
    let spectrum = Spectrum::from_mu(mu)?;
    let sys = DiagonalizableSystem::with_basis(spectrum, v)?;
    let rebuilt = sys.to_operator()?;
    let a_norm = a.norm();
    if (rebuilt.matrix() - a.matrix()).norm() > tol * a_norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NotDiagonalizable { condition });
    }
    Ok(sys)
}

/// Spectral stability summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub exponentially_stable: bool,
    /// Spectral abscissa `max Re sigma(A)`.
    pub omega: f64,
    pub strongly_stable: bool,
    pub spectral_radius: f64,
}

impl StabilityReport {
    pub fn of_spectrum(s: &Spectrum) -> Self {
        let omega = s.spectral_abscissa();
        let spectral_radius = s.spectral_radius();
        StabilityReport {
            exponentially_stable: omega < 0.0,
            omega,
            strongly_stable: spectral_radius < 1.0,
            spectral_radius,
        }
    }

    pub fn of_operator(a: &Operator) -> Self {
        Self::of_spectrum(&eigenvalues(a))
    }
}

pub fn stability_classification(a: &Operator) -> StabilityReport {
    StabilityReport::of_operator(a)
}
