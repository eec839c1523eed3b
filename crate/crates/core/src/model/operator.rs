use crate::error::{Error, Result};
use crate::linalg::{all_finite, real, spectral_norm, CMatrix, CVector, C64};

/// A bounded operator on a finite-dimensional state space, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    m: CMatrix,
}

impl Operator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!("operator must be square, got {}x{}", m.nrows(), m.ncols())));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument("operator dimension must be at least 1".into()));
        }
        if !all_finite(m.iter()) {
            return Err(Error::NonFinite("operator entries"));
        }
        Ok(Operator { m })
    }

    /// Builds a real operator from row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, rows.first().map_or(0, |r| r.len()));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m.ncols() {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = real(v);
            }
        }
        Operator::new(m)
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        Operator::new(CMatrix::from_diagonal(&CVector::from_column_slice(values)))
    }

    pub fn real_diagonal(values: &[f64]) -> Result<Self> {
        let v: Vec<C64> = values.iter().map(|&x| real(x)).collect();
        Operator::diagonal(&v)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Operator::new(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Operator::new(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn adjoint(&self) -> Operator {
        Operator { m: self.m.adjoint() }
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.m)
    }

    pub fn scaled(&self, t: f64) -> Operator {
        Operator { m: &self.m * real(t) }
    }

    /// `||A - A*||`.
    pub fn self_adjoint_defect(&self) -> f64 {
        spectral_norm(&(&self.m - self.m.adjoint()))
    }

    pub fn exp(&self, t: f64) -> Result<Operator> {
        matrix_exponential(self, t)
    }

    pub fn pow(&self, k: u64) -> Operator {
        operator_power(self, k)
    }

    pub fn apply(&self, x: &CVector) -> Result<CVector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} applied to operator of dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(&self.m * x)
    }
}

/// Scaled argument never exceeds this 1-norm before the Taylor series is evaluated.
const SCALED_NORM_CAP: f64 = 0.5;
/// Refuse arguments needing more squarings than this.
const MAX_SQUARINGS: i32 = 64;

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Smallest Taylor order whose remainder bound at 1-norm `theta` is below 1e-16.
fn taylor_order(theta: f64) -> usize {
    let mut term = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= theta / k as f64;
        // remainder after degree k-1 is bounded by term / (1 - theta/(k+1))
        let tail = term / (1.0 - theta / (k as f64 + 1.0));
        if tail < 1e-16 || k > 40 {
            return k.max(1);
        }
    }
}

/// `e^{tA}` by scaling and squaring over the truncated exponential series.
pub fn matrix_exponential(a: &Operator, t: f64) -> Result<Operator> {
    if !t.is_finite() {
        return Err(Error::NonFinite("exponential time argument"));
    }
    let n = a.dim();
    let x = a.matrix() * real(t);
    let norm = one_norm(&x);
    if !norm.is_finite() {
        return Err(Error::NonFinite("exponential argument"));
    }
    let mut squarings = 0i32;
    if norm > SCALED_NORM_CAP {
        squarings = (norm / SCALED_NORM_CAP).log2().ceil() as i32;
    }
    if squarings > MAX_SQUARINGS {
        return Err(Error::Overflow { norm });
    }
    let scaled = &x * real(0.5f64.powi(squarings));
    let theta = norm * 0.5f64.powi(squarings);
    let order = taylor_order(theta);

    // Horner: I + X/1 (I + X/2 (I + ... (I + X/order)))
    let id = CMatrix::identity(n, n);
    let mut e = id.clone();
    for k in (1..=order).rev() {
        e = &id + (&scaled * e) * real(1.0 / k as f64);
    }
    for _ in 0..squarings {
        e = &e * &e;
    }
    if !all_finite(e.iter()) {
        return Err(Error::Overflow { norm });
    }
    Ok(Operator { m: e })
}

/// `A^k` by repeated squaring.
pub fn operator_power(a: &Operator, k: u64) -> Operator {
    let n = a.dim();
    let mut result = CMatrix::identity(n, n);
    let mut base = a.m.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    Operator { m: result }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn exponential_of_zero_is_identity() {
        let z = Operator::zeros(2).unwrap();
        let e = matrix_exponential(&z, 7.0).unwrap();
        assert_eq!(e.matrix(), &CMatrix::identity(2, 2));
    }

    #[test]
    fn exponential_of_nilpotent_terminates() {
        let a = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let e = matrix_exponential(&a, 1.0).unwrap();
        let want = Operator::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!((e.matrix() - want.matrix()).norm() < 1e-15);
    }

    #[test]
    fn exponential_of_log_two_is_two() {
        let a = Operator::real_diagonal(&[std::f64::consts::LN_2]).unwrap();
        let e = matrix_exponential(&a, 1.0).unwrap();
        assert!((e.matrix()[(0, 0)] - real(2.0)).norm() < 1e-12 * 2.0);
    }

    #[test]
    fn exponential_of_complex_diagonal_matches_scalar() {
        let z = c(-0.3, 4.0);
        let a = Operator::diagonal(&[z]).unwrap();
        let e = matrix_exponential(&a, 2.5).unwrap();
        let want = (z * 2.5).exp();
        assert!((e.matrix()[(0, 0)] - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn exponential_rejects_nan_time() {
        let a = Operator::identity(1).unwrap();
        assert!(matches!(matrix_exponential(&a, f64::NAN), Err(Error::NonFinite(_))));
    }

    #[test]
    fn exponential_overflows_loudly() {
        let a = Operator::real_diagonal(&[1.0]).unwrap();
        assert!(matches!(matrix_exponential(&a, 1e300), Err(Error::Overflow { .. })));
        assert!(matches!(matrix_exponential(&a, 800.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn power_zero_is_identity() {
        let a = Operator::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(operator_power(&a, 0).matrix(), &CMatrix::identity(2, 2));
    }

    #[test]
    fn power_of_half() {
        let a = Operator::real_diagonal(&[0.5]).unwrap();
        assert_eq!(operator_power(&a, 3).matrix()[(0, 0)], real(0.125));
    }

    #[test]
    fn non_square_and_non_finite_rejected() {
        assert!(Operator::new(CMatrix::zeros(2, 3)).is_err());
        assert!(Operator::new(CMatrix::zeros(0, 0)).is_err());
        let mut m = CMatrix::zeros(1, 1);
        m[(0, 0)] = c(f64::INFINITY, 0.0);
        assert!(matches!(Operator::new(m), Err(Error::NonFinite(_))));
    }
}
