//! Benchmark inputs shared by the criterion targets.

use dynsamp_core::{c, real, CVector, Operator, SamplingFamily, SystemSpec, TimeDomain};

/// Tridiagonal, non-normal operator of size `n` with spectrum inside the left half-plane.
pub fn tridiagonal(n: usize) -> Operator {
    let mut m = dynsamp_core::CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(-0.5 - 0.1 * i as f64, 0.05 * i as f64);
        if i + 1 < n {
            m[(i, i + 1)] = real(0.4);
            m[(i + 1, i)] = real(-0.2);
        }
    }
    Operator::new(m).expect("finite")
}

/// One all-ones sampling vector.
pub fn single_vector_system(n: usize, time: TimeDomain) -> SystemSpec {
    let g = CVector::from_element(n, real(1.0));
    SystemSpec::dense(tridiagonal(n), SamplingFamily::unlabeled(vec![g]).expect("valid"), time).expect("valid")
}
