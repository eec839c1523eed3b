//! Numerical experiments built on the observability machinery: time-discretization sweeps,
//! horizon independence of ranks and frame verdicts, finite-time bounds for stable discrete
//! systems, and the integrated semigroup `T = int_0^tau e^{tA} dt`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::QuadratureGrid;
use crate::error::{Error, Result};
use crate::linalg::{gram, hermitian_eigenvalues, numerical_rank, real, spectral_norm, CMatrix, C64};
use crate::model::{eigenvalues, spectral_decomposition, Operator, SystemSpec, TimeDomain};
use crate::observability::{
    discrete_observability, frame_report, grammian_closed_form_diagonal, observability_on_grid, FrameReport,
    InfiniteRegime,
};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c1_ref_gap: f64,
    pub c2_ref_gap: f64,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub reference: FrameReport,
    /// Ordered by increasing spacing.
    pub reports: Vec<FrameReport>,
    pub rows: Vec<SweepRow>,
    /// Largest spacing such that every grid at or below it is a frame.
    pub threshold: Option<f64>,
}

impl SweepResult {
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "delta\tc1\tc2\tc1_ref_gap\tc2_ref_gap\tverdict")?;
        for r in &self.rows {
            writeln!(w, "{}\t{}\t{}\t{}\t{}\t{}", r.delta, r.c1, r.c2, r.c1_ref_gap, r.c2_ref_gap, r.verdict)?;
        }
        Ok(())
    }
}

/// Frame bounds of uniform left-point samplings `{0, delta, 2 delta, ...}` of `[0, tau)`,
/// each sample weighted by `delta`, against the quadrature baseline.
pub fn discretization_sweep(sys: &SystemSpec, deltas: &[f64], tol: &Tolerances) -> Result<SweepResult> {
    let TimeDomain::ContinuousFinite { tau, .. } = *sys.time() else {
        return Err(Error::InvalidArgument("sweep needs a finite continuous horizon".into()));
    };
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("no spacings given".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(d.is_finite() && **d > 0.0 && **d <= tau)) {
        return Err(Error::InvalidArgument(format!("spacing {d} outside (0, {tau}]")));
    }
    let reference = frame_report(sys, tol)?;
    if !reference.verdicts.frame_eob {
        return Err(Error::NotObservable { c1: reference.c1, threshold: tol.eob_rel * reference.c2 });
    }

    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let reports = sorted
        .par_iter()
        .map(|&d| {
            let psi = observability_on_grid(sys, &QuadratureGrid::uniform_left(tau, d)?)?;
            Ok(FrameReport::from_parts(&psi.matrix, &gram(&psi.matrix), tol))
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<SweepRow> = sorted
        .iter()
        .zip(&reports)
        .map(|(&delta, r)| SweepRow {
            delta,
            c1: r.c1,
            c2: r.c2,
            c1_ref_gap: (r.c1 - reference.c1).abs(),
            c2_ref_gap: (r.c2 - reference.c2).abs(),
            verdict: r.verdicts.frame_eob,
        })
        .collect();
    let threshold = rows.iter().take_while(|r| r.verdict).last().map(|r| r.delta);
    Ok(SweepResult { reference, reports, rows, threshold })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KalmanReport {
    pub taus: Vec<f64>,
    /// Rank of the observability map on `[0, tau)` for each `tau`.
    pub ranks: Vec<usize>,
    /// Truncation actually used (at least `n - 1`).
    pub truncation: usize,
    pub discrete_rank: usize,
    /// Rank of the stacked rows `B, BA, ..., BA^{n-1}`.
    pub kalman_rank: usize,
    pub all_equal: bool,
}

/// Observability ranks across horizons, against the Kalman matrix.
pub fn kalman_independence(
    sys: &SystemSpec,
    taus: &[f64],
    truncation: usize,
    tol: &Tolerances,
) -> Result<KalmanReport> {
    let n = sys.dim();
    let ranks = taus
        .iter()
        .map(|&tau| {
            Ok(frame_report(&sys.with_time(TimeDomain::continuous_resolved(tau, sys.operator().norm()))?, tol)?.rank)
        })
        .collect::<Result<Vec<_>>>()?;
    let truncation = truncation.max(n - 1);
    let discrete_rank = frame_report(&sys.with_time(TimeDomain::discrete(truncation))?, tol)?.rank;
    let kalman_rank = numerical_rank(&discrete_observability(sys, n - 1).matrix);
    let all_equal = ranks.iter().all(|&r| r == kalman_rank) && discrete_rank == kalman_rank;
    Ok(KalmanReport { taus: taus.to_vec(), ranks, truncation, discrete_rank, kalman_rank, all_equal })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfAdjointReport {
    pub taus: Vec<f64>,
    pub frame_verdicts: Vec<bool>,
    pub c1_curve: Vec<f64>,
    pub all_agree: bool,
}

const SELF_ADJOINT_TOL: f64 = 1e-12;

/// Frame verdicts of a Hermitian operator's continuous sampling across horizons.
pub fn selfadjoint_independence(sys: &SystemSpec, taus: &[f64], tol: &Tolerances) -> Result<SelfAdjointReport> {
    let a = sys.operator();
    let defect = a.self_adjoint_defect();
    if defect > SELF_ADJOINT_TOL * a.norm() {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let reports = taus
        .iter()
        .map(|&tau| frame_report(&sys.with_time(TimeDomain::continuous_resolved(tau, sys.operator().norm()))?, tol))
        .collect::<Result<Vec<_>>>()?;
    let frame_verdicts: Vec<bool> = reports.iter().map(|r| r.verdicts.frame_eob).collect();
    Ok(SelfAdjointReport {
        taus: taus.to_vec(),
        all_agree: frame_verdicts.windows(2).all(|w| w[0] == w[1]),
        c1_curve: reports.iter().map(|r| r.c1).collect(),
        frame_verdicts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    ClosedForm,
    Truncation { steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationBound {
    pub gamma_star: usize,
    /// `c1 - c2 ||A||^{2(gamma* + 1)}`.
    pub predicted_lower: f64,
    /// Smallest eigenvalue of the Grammian over steps `0..=gamma*`.
    pub measured_c1: f64,
    /// Infinite-horizon frame bounds.
    pub c1: f64,
    pub c2: f64,
    pub norm: f64,
    pub baseline: Baseline,
    pub ok: bool,
}

const TRUNCATION_TAIL_TOL: f64 = 1e-12;
const MAX_STEPS: usize = 1 << 22;

/// First finite horizon at which a contraction is provably exactly observable, from its
/// infinite-horizon frame bounds.
pub fn stable_truncation_bound(sys: &SystemSpec, tol: &Tolerances) -> Result<TruncationBound> {
    let a = sys.operator();
    let norm = a.norm();
    if norm >= 1.0 {
        return Err(Error::NotStronglyStable { norm });
    }
    let decomposition = match sys.diagonalizable() {
        Some(d) => Some(d.clone()),
        None => spectral_decomposition(a, tol.diagonalization).ok(),
    };
    let (q, baseline) = match decomposition {
        Some(d) => (grammian_closed_form_diagonal(&d, sys.sampling(), InfiniteRegime::Discrete)?, Baseline::ClosedForm),
        None => {
            // tail after step K is at most ||B||^2 ||A||^{2(K+1)} / (1 - ||A||^2)
            let b2 = sys.observation().norm().powi(2);
            let scale = b2 / (1.0 - norm * norm);
            let steps = if norm == 0.0 || scale <= TRUNCATION_TAIL_TOL {
                0
            } else {
                ((TRUNCATION_TAIL_TOL / scale).ln() / (2.0 * norm.ln()) - 1.0).ceil().max(0.0) as usize
            };
            if steps > MAX_STEPS {
                return Err(Error::Convergence(format!("truncation would need {steps} steps")));
            }
            (truncated_discrete_grammian(a, sys.observation().matrix(), steps), Baseline::Truncation { steps })
        }
    };
    let ev = hermitian_eigenvalues(&q);
    let c2 = ev.last().copied().unwrap_or(0.0).max(0.0);
    let c1 = ev.first().copied().unwrap_or(0.0).clamp(0.0, c2);
    if !tol.bounded_below(c1, c2) {
        return Err(Error::NotObservable { c1, threshold: tol.eob_rel * c2 });
    }

    let predicted = |g: usize| c1 - c2 * norm.powf(2.0 * (g as f64 + 1.0));
    let mut gamma_star = if norm == 0.0 {
        0
    } else {
        // smallest gamma with ||A||^{2(gamma+1)} < c1 / c2
        ((c1 / c2).ln() / (2.0 * norm.ln()) - 1.0).floor().max(0.0) as usize
    };
    while gamma_star > 0 && predicted(gamma_star - 1) > 0.0 {
        gamma_star -= 1;
    }
    while predicted(gamma_star) <= 0.0 {
        gamma_star += 1;
        if gamma_star > MAX_STEPS {
            return Err(Error::Convergence("no finite horizon found".into()));
        }
    }
    let predicted_lower = predicted(gamma_star);
    let q_gamma = truncated_discrete_grammian(a, sys.observation().matrix(), gamma_star);
    let measured_c1 = hermitian_eigenvalues(&q_gamma).first().copied().unwrap_or(0.0);
    Ok(TruncationBound {
        gamma_star,
        predicted_lower,
        measured_c1,
        c1,
        c2,
        norm,
        baseline,
        ok: measured_c1 >= predicted_lower * (1.0 - 1e-9),
    })
}

/// `sum_{k=0}^{steps} (A*)^k B* B A^k`.
fn truncated_discrete_grammian(a: &Operator, b: &CMatrix, steps: usize) -> CMatrix {
    let n = a.dim();
    let mut q = CMatrix::zeros(n, n);
    let mut rows = b.clone();
    for k in 0..=steps {
        q += rows.adjoint() * &rows;
        if k < steps {
            rows = &rows * a.matrix();
        }
    }
    crate::linalg::hermitian_part(&q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratedSemigroup {
    pub tau: f64,
    #[serde(skip)]
    pub t_matrix: CMatrix,
    /// `||g(tau, A) - quadrature||` in the spectral norm.
    pub series_vs_quadrature_error: f64,
    pub t_norm: f64,
    /// `g(tau, mu)` for each eigenvalue `mu` of `A`.
    pub spectral_certificate: Vec<C64>,
    pub min_abs_g: f64,
    pub invertible: bool,
    /// Largest horizon in `[0, tau_max]` found by bisection with a certified inverse.
    pub tau_threshold: Option<f64>,
}

/// `(e^{tau z} - 1) / z`, equal to `tau` at `z = 0`.
pub fn g_scalar(tau: f64, z: C64) -> C64 {
    let w = z * tau;
    if w.norm() < 1e-3 {
        // tau (1 + w/2 + w^2/6 + w^3/24 + w^4/120)
        real(tau) * (real(1.0) + w * (real(0.5) + w * (real(1.0 / 6.0) + w * (real(1.0 / 24.0) + w / 120.0))))
    } else {
        (w.exp() - real(1.0)) / z
    }
}

/// `g(tau, A) = sum_{k >= 1} tau^k A^{k-1} / k!`, using `g(2t) = g(t) (I + e^{tA})` to keep
/// the series argument small.
pub fn g_matrix(a: &Operator, tau: f64) -> Result<CMatrix> {
    let n = a.dim();
    let scaled_norm = a.norm() * tau;
    let mut halvings = 0u32;
    while scaled_norm / 2f64.powi(halvings as i32) > 0.5 {
        halvings += 1;
        if halvings > 64 {
            return Err(Error::Overflow { norm: scaled_norm });
        }
    }
    let t = tau / 2f64.powi(halvings as i32);
    let ta = a.matrix() * real(t);
    let mut term = CMatrix::identity(n, n) * real(t);
    let mut g = term.clone();
    let mut e = CMatrix::identity(n, n) + &ta;
    let mut e_term = ta.clone();
    for k in 1..40 {
        term = &term * &ta * real(1.0 / (k as f64 + 1.0));
        g += &term;
        e_term = &e_term * &ta * real(1.0 / (k as f64 + 1.0));
        e += &e_term;
        if term.norm() <= 1e-17 * g.norm() && e_term.norm() <= 1e-17 * e.norm() {
            break;
        }
    }
    let id = CMatrix::identity(n, n);
    for _ in 0..halvings {
        g = &g * (&id + &e);
        e = &e * &e;
    }
    if !crate::linalg::all_finite(g.iter()) {
        return Err(Error::Overflow { norm: scaled_norm });
    }
    Ok(g)
}

/// `int_0^tau e^{tA} dt` by composite Gauss-Legendre quadrature.
pub fn integrated_semigroup_quadrature(
    a: &Operator,
    tau: f64,
    panels: usize,
    nodes_per_panel: usize,
) -> Result<CMatrix> {
    let grid = QuadratureGrid::gauss_legendre(tau, panels, nodes_per_panel)?;
    let n = a.dim();
    let mut t = CMatrix::zeros(n, n);
    for (&s, &w) in grid.nodes().iter().zip(grid.weights()) {
        t += a.exp(s)?.matrix() * real(w);
    }
    Ok(t)
}

fn min_abs_g(mu: &[C64], tau: f64) -> f64 {
    mu.iter().map(|&m| g_scalar(tau, m).norm()).fold(f64::INFINITY, f64::min)
}

const BISECTION_STEPS: usize = 40;

/// The operator `T = g(tau, A)` computed by series and by quadrature, with a spectral
/// invertibility certificate `min |g(tau, mu)| > tol.invertibility`.
pub fn bessel_admissibility_operator(
    a: &Operator,
    tau: f64,
    tau_max: Option<f64>,
    tol: &Tolerances,
) -> Result<IntegratedSemigroup> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let t_matrix = g_matrix(a, tau)?;
    let quad = integrated_semigroup_quadrature(a, tau, 8, 8)?;
    let series_vs_quadrature_error = spectral_norm(&(&t_matrix - &quad));
    let mu = eigenvalues(a).mu().to_vec();
    let spectral_certificate: Vec<C64> = mu.iter().map(|&m| g_scalar(tau, m)).collect();
    let min_g = min_abs_g(&mu, tau);

    let tau_threshold = match tau_max {
        None => None,
        Some(tm) if !(tm.is_finite() && tm > 0.0) => {
            return Err(Error::InvalidArgument(format!("tau_max must be positive, got {tm}")))
        }
        Some(tm) if min_abs_g(&mu, tm) > tol.invertibility => Some(tm),
        Some(tm) => {
            // small horizons are invertible (g(t, mu) ~ t), so bracket the first loss
            let (mut lo, mut hi) = (0.0, tm);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if min_abs_g(&mu, mid) > tol.invertibility {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(lo)
        }
    };

    Ok(IntegratedSemigroup {
        tau,
        t_norm: spectral_norm(&t_matrix),
        t_matrix,
        series_vs_quadrature_error,
        spectral_certificate,
        min_abs_g: min_g,
        invertible: min_g > tol.invertibility,
        tau_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CVector};
    use crate::model::SamplingFamily;

    fn scalar(a: f64, time: TimeDomain) -> SystemSpec {
        SystemSpec::dense(
            Operator::real_diagonal(&[a]).unwrap(),
            SamplingFamily::unlabeled(vec![CVector::from_vec(vec![real(1.0)])]).unwrap(),
            time,
        )
        .unwrap()
    }

    fn rank_one(rows: &[&[f64]], b: &[f64], time: TimeDomain) -> SystemSpec {
        SystemSpec::dense(
            Operator::from_real_rows(rows).unwrap(),
            SamplingFamily::unlabeled(vec![CVector::from_iterator(b.len(), b.iter().map(|&x| real(x)))]).unwrap(),
            time,
        )
        .unwrap()
    }

    #[test]
    fn sweep_zero_operator() {
        let sys = SystemSpec::dense(
            Operator::zeros(2).unwrap(),
            SamplingFamily::standard_basis(2).unwrap(),
            TimeDomain::continuous(1.0),
        )
        .unwrap();
        let r = discretization_sweep(&sys, &[0.25, 0.1], &Tolerances::default()).unwrap();
        assert_eq!(r.rows[0].delta, 0.1);
        assert!((r.rows[0].c1 - 1.0).abs() < 1e-12 && (r.rows[0].c2 - 1.0).abs() < 1e-12);
        assert!((r.rows[1].c1 - 1.0).abs() < 1e-12);
        assert_eq!(r.threshold, Some(0.25));
    }

    #[test]
    fn sweep_scalar_is_first_order() {
        let sys = scalar(-1.0, TimeDomain::continuous(1.0));
        let r = discretization_sweep(&sys, &[0.125, 0.0625], &Tolerances::default()).unwrap();
        let exact = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((r.reference.c1 - exact).abs() < 1e-12);
        for row in &r.rows {
            let n = (1.0 / row.delta).round() as i32;
            let riemann: f64 = (0..n).map(|j| row.delta * (-2.0 * j as f64 * row.delta).exp()).sum();
            assert!((row.c1 - riemann).abs() < 1e-13);
        }
        let factor = r.rows[1].c1_ref_gap / r.rows[0].c1_ref_gap;
        assert!((1.5..=3.0).contains(&factor), "factor {factor}");

        let mut buf = Vec::new();
        r.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("delta\tc1\tc2\tc1_ref_gap\tc2_ref_gap\tverdict\n0.0625\t"));
    }

    #[test]
    fn sweep_needs_observable_baseline() {
        let sys = rank_one(&[&[-1.0, 0.0], &[0.0, -1.0]], &[1.0, 1.0], TimeDomain::continuous(1.0));
        assert!(matches!(discretization_sweep(&sys, &[0.1], &Tolerances::default()), Err(Error::NotObservable { .. })));
    }

    #[test]
    fn kalman_examples() {
        let tol = Tolerances::default();
        let nil = [&[0.0, 1.0][..], &[0.0, 0.0][..]];
        let r = kalman_independence(&rank_one(&nil, &[1.0, 0.0], TimeDomain::discrete(0)), &[0.1, 1.0, 10.0], 0, &tol)
            .unwrap();
        assert_eq!(r.ranks, vec![2, 2, 2]);
        assert_eq!((r.kalman_rank, r.discrete_rank, r.truncation), (2, 2, 1));
        assert!(r.all_equal);

        let r = kalman_independence(&rank_one(&nil, &[0.0, 1.0], TimeDomain::discrete(0)), &[0.1, 1.0, 10.0], 3, &tol)
            .unwrap();
        assert_eq!(r.ranks, vec![1, 1, 1]);
        assert_eq!(r.kalman_rank, 1);
        assert!(r.all_equal);

        let id = [&[1.0, 0.0][..], &[0.0, 1.0][..]];
        let r =
            kalman_independence(&rank_one(&id, &[0.3, -2.0], TimeDomain::discrete(0)), &[0.5, 2.0], 4, &tol).unwrap();
        assert_eq!(r.ranks, vec![1, 1]);
        assert!(r.all_equal);
    }

    #[test]
    fn selfadjoint_examples() {
        let tol = Tolerances::default();
        let taus = [0.5, 1.0, 2.0];
        let sys = rank_one(&[&[-1.0, 0.0], &[0.0, -2.0]], &[1.0, 1.0], TimeDomain::continuous(1.0));
        let r = selfadjoint_independence(&sys, &taus, &tol).unwrap();
        assert_eq!(r.frame_verdicts, vec![true; 3]);
        assert!(r.all_agree);

        let sys = rank_one(&[&[-1.0, 0.0], &[0.0, -1.0]], &[1.0, 1.0], TimeDomain::continuous(1.0));
        let r = selfadjoint_independence(&sys, &taus, &tol).unwrap();
        assert_eq!(r.frame_verdicts, vec![false; 3]);
        assert!(r.all_agree);

        let sys = rank_one(&[&[-1.0, 1.0], &[0.0, -2.0]], &[1.0, 1.0], TimeDomain::continuous(1.0));
        assert!(matches!(selfadjoint_independence(&sys, &taus, &tol), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn truncation_scalar_examples() {
        let tol = Tolerances::default();
        let r = stable_truncation_bound(&scalar(0.5, TimeDomain::discrete(0)), &tol).unwrap();
        assert_eq!(r.gamma_star, 0);
        assert!((r.c1 - 4.0 / 3.0).abs() < 1e-12);
        assert!((r.predicted_lower - 1.0).abs() < 1e-12);
        assert!((r.measured_c1 - 1.0).abs() < 1e-12);
        assert!(r.ok);

        let r = stable_truncation_bound(&scalar(0.9, TimeDomain::discrete(0)), &tol).unwrap();
        assert_eq!(r.gamma_star, 0);
        assert!((r.c1 - 1.0 / 0.19).abs() < 1e-9);
        assert!((r.predicted_lower - 1.0).abs() < 1e-9);

        let err = stable_truncation_bound(&scalar(1.0, TimeDomain::discrete(0)), &tol).unwrap_err();
        assert!(matches!(err, Error::NotStronglyStable { .. }));
    }

    #[test]
    fn truncation_two_vectors() {
        let sys = SystemSpec::dense(
            Operator::real_diagonal(&[0.5, 0.9]).unwrap(),
            SamplingFamily::unlabeled(vec![
                CVector::from_vec(vec![real(1.0), real(0.2)]),
                CVector::from_vec(vec![real(-0.3), real(1.0)]),
            ])
            .unwrap(),
            TimeDomain::discrete(0),
        )
        .unwrap();
        let r = stable_truncation_bound(&sys, &Tolerances::default()).unwrap();
        assert!(r.ok);
        assert!(r.measured_c1 >= r.predicted_lower);
    }

    #[test]
    fn defective_contraction_uses_truncation() {
        let sys = rank_one(&[&[0.3, 0.5], &[0.0, 0.3]], &[1.0, 0.0], TimeDomain::discrete(0));
        let r = stable_truncation_bound(&sys, &Tolerances::default()).unwrap();
        assert!(matches!(r.baseline, Baseline::Truncation { .. }));
        assert!(r.ok);
    }

    #[test]
    fn g_examples() {
        let tol = Tolerances::default();
        let r = bessel_admissibility_operator(&Operator::zeros(2).unwrap(), 1.5, None, &tol).unwrap();
        assert!((&r.t_matrix - CMatrix::identity(2, 2) * real(1.5)).norm() < 1e-15);
        assert_eq!(g_scalar(1.5, real(0.0)), real(1.5));

        let r = bessel_admissibility_operator(&Operator::real_diagonal(&[1.0]).unwrap(), 1.0, None, &tol).unwrap();
        let e1 = std::f64::consts::E - 1.0;
        assert!((r.t_matrix[(0, 0)] - real(e1)).norm() < 1e-14);
        assert!(r.series_vs_quadrature_error < 1e-10);
        assert!(r.invertible);

        let a = Operator::diagonal(&[c(0.0, 2.0 * std::f64::consts::PI)]).unwrap();
        let r = bessel_admissibility_operator(&a, 1.0, Some(1.0), &tol).unwrap();
        assert!(r.min_abs_g <= 1e-10);
        assert!(!r.invertible);
        let t = r.tau_threshold.unwrap();
        assert!(t > 0.99 && t < 1.0);
    }

    #[test]
    fn g_matrix_large_argument() {
        let a = Operator::from_real_rows(&[&[0.5, 2.0], &[-1.0, -0.7]]).unwrap();
        let g = g_matrix(&a, 3.0).unwrap();
        let q = integrated_semigroup_quadrature(&a, 3.0, 16, 8).unwrap();
        assert!(spectral_norm(&(&g - &q)) <= 1e-12 * spectral_norm(&g));
    }
}
