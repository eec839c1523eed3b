//! Dense complex linear-algebra helpers shared by the analysis modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const EPS: f64 = f64::EPSILON;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub(crate) fn all_finite<'a>(values: impl IntoIterator<Item = &'a C64>) -> bool {
    values.into_iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Spectral (largest singular value) norm.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// (M + M*) / 2.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * real(0.5)
}

/// Rank threshold for singular values: `max(rows, cols) * eps * sigma_max`.
pub fn rank_threshold(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * EPS * sigma_max
}

/// Number of singular values above the default rank threshold.
pub fn numerical_rank(m: &CMatrix) -> usize {
    let sv = singular_values(m);
    rank_from_singular_values(&sv, m.nrows(), m.ncols())
}

pub fn rank_from_singular_values(sv: &[f64], rows: usize, cols: usize) -> usize {
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    let thr = rank_threshold(rows, cols, top);
    sv.iter().filter(|&&s| s > thr).count()
}

/// The `dim`-th singular value of a matrix acting on (or onto) a space of dimension `dim`,
/// zero when the matrix has fewer than `dim` singular values.
pub fn sigma_min_for_dim(sv: &[f64], dim: usize) -> f64 {
    if sv.len() < dim || dim == 0 {
        0.0
    } else {
        sv[dim - 1]
    }
}

/// Stack row blocks vertically.
pub fn vstack(blocks: &[CMatrix], cols: usize) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Stack column blocks horizontally.
pub fn hstack(blocks: &[CMatrix], rows: usize) -> CMatrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut col = 0;
    for b in blocks {
        out.view_mut((0, col), (rows, b.ncols())).copy_from(b);
        col += b.ncols();
    }
    out
}

/// Gram matrix `M* M`, symmetrized.
pub fn gram(m: &CMatrix) -> CMatrix {
    hermitian_part(&(m.adjoint() * m))
}

pub fn relative_frobenius_error(a: &CMatrix, reference: &CMatrix) -> f64 {
    let denom = reference.norm();
    let diff = (a - reference).norm();
    if denom == 0.0 {
        diff
    } else {
        diff / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_rank_one_outer_product() {
        let u = CVector::from_vec(vec![real(1.0), c(0.0, 2.0), real(-1.0)]);
        let m = &u * u.adjoint();
        assert_eq!(numerical_rank(&m), 1);
    }

    #[test]
    fn sigma_min_pads_with_zero() {
        assert_eq!(sigma_min_for_dim(&[3.0], 2), 0.0);
        assert_eq!(sigma_min_for_dim(&[3.0, 1.0], 2), 1.0);
    }

    #[test]
    fn stacking_preserves_order() {
        let a = CMatrix::from_element(1, 2, real(1.0));
        let b = CMatrix::from_element(2, 2, real(2.0));
        let v = vstack(&[a.clone(), b.clone()], 2);
        assert_eq!(v.nrows(), 3);
        assert_eq!(v[(0, 1)], real(1.0));
        assert_eq!(v[(2, 0)], real(2.0));
        let h = hstack(&[a.transpose(), b], 2);
        assert_eq!(h.ncols(), 3);
        assert_eq!(h[(1, 0)], real(1.0));
    }
}
