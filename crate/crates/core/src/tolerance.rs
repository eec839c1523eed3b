use serde::Serialize;

use crate::linalg::rank_from_singular_values;

/// Every threshold used by a verdict. Reports embed the resolved set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Exact observability / controllability: `c1 > eob_rel * c2`.
    pub eob_rel: f64,
    /// Rank cut-off relative to the largest singular value. `None` uses
    /// `max(rows, cols) * eps`.
    pub rank_rel: Option<f64>,
    /// Eigenvector-basis conditioning bound is `1 / diagonalization`.
    pub diagonalization: f64,
    /// Carleson products must reach this floor.
    pub delta_floor: f64,
    /// Norm-ratio condition: lower floor for the smallest ratio.
    pub ratio_floor: f64,
    /// Norm-ratio condition: cap for the largest ratio.
    pub ratio_cap: f64,
    /// Norm-ratio condition: allowed multiplicative drift across the trailing window.
    pub ratio_drift_cap: f64,
    /// Boundary-accumulation proxy: distance to the boundary the trailing window must reach.
    pub trend_tol: f64,
    /// Trailing window length; `None` uses `max(5, N / 4)`.
    pub trend_window: Option<usize>,
    /// Guard `|1 + lambda| > epsilon_guard` for the disc to half-plane map.
    pub epsilon_guard: f64,
    /// Spectral certificate of the integrated semigroup: `min |g(tau, mu)| > invertibility`.
    pub invertibility: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eob_rel: 1e-10,
            rank_rel: None,
            diagonalization: 1e-8,
            delta_floor: 1e-6,
            ratio_floor: 1e-6,
            ratio_cap: 1e6,
            ratio_drift_cap: 2.0,
            trend_tol: 0.05,
            trend_window: None,
            epsilon_guard: 1e-6,
            invertibility: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn rank(&self, sv: &[f64], rows: usize, cols: usize) -> usize {
        match self.rank_rel {
            None => rank_from_singular_values(sv, rows, cols),
            Some(r) => {
                let top = sv.first().copied().unwrap_or(0.0);
                sv.iter().filter(|&&s| top > 0.0 && s > r * top).count()
            }
        }
    }

    /// Bounded-below verdict from the extreme squared singular values.
    pub fn bounded_below(&self, c1: f64, c2: f64) -> bool {
        c2 > 0.0 && c1 > self.eob_rel * c2
    }

    pub fn window(&self, n: usize) -> usize {
        self.trend_window.unwrap_or((n / 4).max(5)).clamp(1, n.max(1))
    }
}
