//! Infinite-time exact-observability criteria for diagonalizable systems sampled at one vector.
//!
//! Inputs use the convention `A phi_n = -lambda_n phi_n`. Every verdict is evaluated on the
//! finite section supplied, so reports are evidence, not proof: conditions quantifying over
//! infinitely many indices (boundary accumulation, bounded ratios) are tested through
//! trailing-window proxies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{real, CVector, C64};
use crate::model::DiagonalizableSystem;
use crate::tolerance::Tolerances;

/// Eigenvalues (`lambda` convention), coefficients `<b, phi_n>` and norms `||phi_n||`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSamplePair {
    lambdas: Vec<C64>,
    coeffs: Vec<C64>,
    norms: Vec<f64>,
}

impl EigenSamplePair {
    pub fn new(lambdas: Vec<C64>, coeffs: Vec<C64>, norms: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidArgument("need at least one eigenvalue".into()));
        }
        if coeffs.len() != lambdas.len() || norms.len() != lambdas.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} eigenvalues, {} coefficients, {} norms",
                lambdas.len(),
                coeffs.len(),
                norms.len()
            )));
        }
        if !crate::linalg::all_finite(lambdas.iter().chain(&coeffs)) {
            return Err(Error::NonFinite("eigen-sample pair"));
        }
        if let Some(i) = norms.iter().position(|&n| !(n.is_finite() && n > 0.0)) {
            return Err(Error::InvalidArgument(format!("norm {i} must be positive, got {}", norms[i])));
        }
        Ok(EigenSamplePair { lambdas, coeffs, norms })
    }

    /// Unit eigenvector norms.
    pub fn orthonormal(lambdas: Vec<C64>, coeffs: Vec<C64>) -> Result<Self> {
        let n = lambdas.len();
        EigenSamplePair::new(lambdas, coeffs, vec![1.0; n])
    }

    /// Reads `lambda_n = -mu_n`, `<b, phi_n>` and `||phi_n||` off a diagonalizable operator.
    pub fn from_system(d: &DiagonalizableSystem, b: &CVector) -> Result<Self> {
        if b.len() != d.dim() {
            return Err(Error::DimensionMismatch("sampling vector length".into()));
        }
        EigenSamplePair::new(
            d.spectrum().lambda_view(),
            d.coefficients(b).iter().copied().collect(),
            d.basis_norms().to_vec(),
        )
    }

    pub fn lambdas(&self) -> &[C64] {
        &self.lambdas
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    fn select(&self, idx: &[usize]) -> EigenSamplePair {
        EigenSamplePair {
            lambdas: idx.iter().map(|&i| self.lambdas[i]).collect(),
            coeffs: idx.iter().map(|&i| self.coeffs[i]).collect(),
            norms: idx.iter().map(|&i| self.norms[i]).collect(),
        }
    }
}

/// Which observability statement the sequence is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// Discrete time, infinite horizon: the unit disc.
    Disc,
    /// Continuous time, infinite horizon: the right half-plane.
    Halfplane,
    /// Continuous time on `[0, tau)`.
    Finite { tau: f64 },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Disc => "disc",
            Regime::Halfplane => "halfplane",
            Regime::Finite { .. } => "finite",
        }
    }

    fn weight(&self, lambda: C64) -> f64 {
        match self {
            Regime::Disc => one_minus_abs_sqr(lambda).sqrt(),
            Regime::Halfplane => (2.0 * lambda.re).sqrt(),
            Regime::Finite { .. } => 1.0,
        }
    }

    fn offenders(&self, lambdas: &[C64]) -> Vec<usize> {
        (0..lambdas.len())
            .filter(|&i| match self {
                Regime::Disc => lambdas[i].norm() >= 1.0,
                Regime::Halfplane => lambdas[i].re <= 0.0,
                Regime::Finite { .. } => false,
            })
            .collect()
    }
}

/// Pseudo-hyperbolic distance `|(a - b) / (1 - conj(a) b)|` in the disc.
pub fn disc_factor(a: C64, b: C64) -> f64 {
    (a - b).norm() / (real(1.0) - a.conj() * b).norm()
}

/// Half-plane analogue `|(a - b) / (a + conj(b))|`.
pub fn halfplane_factor(a: C64, b: C64) -> f64 {
    (a - b).norm() / (a + b.conj()).norm()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonResult {
    /// `inf_n prod_{k != n} factor(lambda_n, lambda_k)`.
    pub inf_product: f64,
    pub log_inf_product: f64,
    pub argmin_index: usize,
    pub pass: bool,
    /// First pair of coincident points, if any.
    pub duplicate: Option<(usize, usize)>,
}

fn carleson(lambdas: &[C64], delta_floor: f64, factor: impl Fn(C64, C64) -> f64) -> CarlesonResult {
    let mut best = (f64::INFINITY, 0usize);
    let mut duplicate = None;
    for (n, &ln) in lambdas.iter().enumerate() {
        let mut log_prod = 0.0;
        for (k, &lk) in lambdas.iter().enumerate() {
            if k == n {
                continue;
            }
            let f = factor(ln, lk);
            if f == 0.0 {
                duplicate.get_or_insert((n.min(k), n.max(k)));
                log_prod = f64::NEG_INFINITY;
                break;
            }
            log_prod += f.ln();
        }
        if log_prod < best.0 {
            best = (log_prod, n);
        }
    }
    let (log_inf, argmin_index) = if lambdas.len() <= 1 { (0.0, 0) } else { best };
    let inf_product = log_inf.exp();
    CarlesonResult { inf_product, log_inf_product: log_inf, argmin_index, pass: inf_product >= delta_floor, duplicate }
}

/// Carleson's condition in the disc, on the finite sequence supplied.
pub fn carleson_disc(lambdas: &[C64], delta_floor: f64) -> Result<CarlesonResult> {
    let bad = Regime::Disc.offenders(lambdas);
    if !bad.is_empty() {
        return Err(Error::Domain { reason: "|lambda| >= 1".into(), indices: bad });
    }
    Ok(carleson(lambdas, delta_floor, disc_factor))
}

/// Carleson's condition in the right half-plane.
pub fn carleson_halfplane(lambdas: &[C64], delta_floor: f64) -> Result<CarlesonResult> {
    let bad = Regime::Halfplane.offenders(lambdas);
    if !bad.is_empty() {
        return Err(Error::Domain { reason: "Re lambda <= 0".into(), indices: bad });
    }
    Ok(carleson(lambdas, delta_floor, halfplane_factor))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRatioReport {
    /// `|<b, phi_n>| / (||phi_n|| w_n)`.
    pub ratios: Vec<f64>,
    pub c1_hat: f64,
    pub c2_hat: f64,
    /// Least-squares change of `ln ratio` across the trailing window.
    pub log_drift: f64,
    pub pass: bool,
    /// `sup |Re lambda|` (finite-continuous regime only).
    pub sup_abs_re: Option<f64>,
}

fn least_squares_change(values: &[f64]) -> f64 {
    let w = values.len();
    if w < 2 {
        return 0.0;
    }
    let xm = (w as f64 - 1.0) / 2.0;
    let ym = values.iter().sum::<f64>() / w as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &y) in values.iter().enumerate() {
        let dx = i as f64 - xm;
        sxy += dx * (y - ym);
        sxx += dx * dx;
    }
    sxy / sxx * (w as f64 - 1.0)
}

/// Whether `||E_n|| ~ ||phi_n||`, through the ratio bounds of the regime.
pub fn norm_ratio_condition(pair: &EigenSamplePair, regime: Regime, tol: &Tolerances) -> Result<NormRatioReport> {
    let bad = regime.offenders(&pair.lambdas);
    if !bad.is_empty() {
        let reason = match regime {
            Regime::Disc => "condition 1 premise |lambda_n| < 1 fails",
            _ => "condition 1 premise Re lambda_n > 0 fails",
        };
        return Err(Error::Domain { reason: reason.into(), indices: bad });
    }
    let ratios: Vec<f64> =
        (0..pair.len()).map(|i| pair.coeffs[i].norm() / (pair.norms[i] * regime.weight(pair.lambdas[i]))).collect();
    let c1_hat = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let c2_hat = ratios.iter().copied().fold(0.0, f64::max);
    let w = tol.window(ratios.len());
    let tail: Vec<f64> = ratios[ratios.len() - w..].iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).collect();
    let log_drift = least_squares_change(&tail);
    let sup_abs_re = match regime {
        Regime::Finite { .. } => Some(pair.lambdas.iter().map(|l| l.re.abs()).fold(0.0, f64::max)),
        _ => None,
    };
    Ok(NormRatioReport {
        pass: c1_hat > tol.ratio_floor && c2_hat < tol.ratio_cap && log_drift.abs() <= tol.ratio_drift_cap.ln(),
        ratios,
        c1_hat,
        c2_hat,
        log_drift,
        sup_abs_re,
    })
}

/// Closed-form `||E_n||^2` for `E_n = Psi phi_n`, given `||B phi_n||`.
pub fn en_norm_squared(lambda: C64, b_phi_norm: f64, regime: Regime) -> Result<f64> {
    let b2 = b_phi_norm * b_phi_norm;
    let v = match regime {
        Regime::Finite { tau } => {
            let r = lambda.re;
            if r == 0.0 {
                tau * b2
            } else {
                // (e^{-2 r tau} - 1) / (-2 r)
                -(-2.0 * r * tau).exp_m1() / (2.0 * r) * b2
            }
        }
        Regime::Halfplane => {
            if lambda.re <= 0.0 {
                return Err(Error::Convergence(format!("Re lambda = {} is not positive", lambda.re)));
            }
            b2 / (2.0 * lambda.re)
        }
        Regime::Disc => {
            if lambda.norm() >= 1.0 {
                return Err(Error::Convergence(format!("|lambda| = {} is not below one", lambda.norm())));
            }
            b2 / one_minus_abs_sqr(lambda)
        }
    };
    if !v.is_finite() {
        return Err(Error::Convergence("norm overflows".into()));
    }
    Ok(v)
}

pub fn en_norm(lambda: C64, b_phi_norm: f64, regime: Regime) -> Result<f64> {
    en_norm_squared(lambda, b_phi_norm, regime).map(f64::sqrt)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub name: &'static str,
    pub pass: bool,
    pub witness: f64,
    pub index: Option<usize>,
    pub offenders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport {
    pub regime: &'static str,
    pub evidence: &'static str,
    pub conditions: Vec<ConditionResult>,
    pub overall: bool,
    pub diagnostics: Vec<String>,
}

fn finish(regime: &'static str, conditions: Vec<ConditionResult>, diagnostics: Vec<String>) -> CriteriaReport {
    CriteriaReport {
        regime,
        evidence: "finite-section evidence",
        overall: conditions.iter().all(|c| c.pass),
        conditions,
        diagnostics,
    }
}

fn argmax(values: &[f64]) -> usize {
    (0..values.len()).fold(0, |best, i| if values[i] > values[best] { i } else { best })
}

fn argmin(values: &[f64]) -> usize {
    (0..values.len()).fold(0, |best, i| if values[i] < values[best] { i } else { best })
}

/// Conditions 3 and 4 on the indices that satisfy condition 1.
fn structural_conditions(
    pair: &EigenSamplePair,
    regime: Regime,
    in_domain: &[usize],
    tol: &Tolerances,
    diagnostics: &mut Vec<String>,
) -> Result<(ConditionResult, ConditionResult)> {
    let name3 = match regime {
        Regime::Disc => "carleson_disc",
        _ => "carleson_halfplane",
    };
    if in_domain.is_empty() {
        let empty = |name| ConditionResult { name, pass: false, witness: 0.0, index: None, offenders: vec![] };
        return Ok((empty(name3), empty("norm_ratio")));
    }
    let sub = pair.select(in_domain);
    let carl = match regime {
        Regime::Disc => carleson_disc(&sub.lambdas, tol.delta_floor)?,
        _ => carleson_halfplane(&sub.lambdas, tol.delta_floor)?,
    };
    let mut offenders = vec![];
    if let Some((i, j)) = carl.duplicate {
        let (i, j) = (in_domain[i], in_domain[j]);
        diagnostics.push(format!(
            "duplicate eigenvalue at indices {i} and {j}: one sampling vector cannot separate a repeated eigenvalue"
        ));
        offenders = vec![i, j];
    }
    let c3 = ConditionResult {
        name: name3,
        pass: carl.pass,
        witness: carl.inf_product,
        index: Some(in_domain[carl.argmin_index]),
        offenders,
    };
    let ratio = norm_ratio_condition(&sub, regime, tol)?;
    let lo = argmin(&ratio.ratios);
    let c4 = ConditionResult {
        name: "norm_ratio",
        pass: ratio.pass,
        witness: ratio.c1_hat,
        index: Some(in_domain[lo]),
        offenders: vec![],
    };
    Ok((c3, c4))
}

/// Discrete infinite-time frame test for one sampling vector (four conditions).
pub fn one_point_frame_check(pair: &EigenSamplePair, tol: &Tolerances) -> Result<CriteriaReport> {
    let moduli: Vec<f64> = pair.lambdas.iter().map(|l| l.norm()).collect();
    let offenders = Regime::Disc.offenders(&pair.lambdas);
    let c1 = ConditionResult {
        name: "inside_disc",
        pass: offenders.is_empty(),
        witness: moduli.iter().copied().fold(0.0, f64::max),
        index: Some(argmax(&moduli)),
        offenders: offenders.clone(),
    };

    let n = moduli.len();
    let w = tol.window(n);
    let window_max = moduli[n - w..].iter().copied().fold(0.0, f64::max);
    let global_max = c1.witness;
    let c2 = ConditionResult {
        name: "accumulates_at_boundary",
        pass: window_max >= 1.0 - tol.trend_tol && window_max >= global_max,
        witness: 1.0 - window_max,
        index: Some(n - w + argmax(&moduli[n - w..])),
        offenders: vec![],
    };

    let in_domain: Vec<usize> = (0..n).filter(|i| !offenders.contains(i)).collect();
    let mut diagnostics = Vec::new();
    if !offenders.is_empty() {
        diagnostics.push(format!("conditions 3-4 evaluated without out-of-disc indices {offenders:?}"));
    }
    let (c3, c4) = structural_conditions(pair, Regime::Disc, &in_domain, tol, &mut diagnostics)?;
    Ok(finish("disc", vec![c1, c2, c3, c4], diagnostics))
}

/// Continuous infinite-time semi-continuous frame test for one sampling vector.
pub fn continuous_infinite_check(pair: &EigenSamplePair, tol: &Tolerances) -> Result<CriteriaReport> {
    let re: Vec<f64> = pair.lambdas.iter().map(|l| l.re).collect();
    let offenders = Regime::Halfplane.offenders(&pair.lambdas);
    let c1 = ConditionResult {
        name: "right_halfplane",
        pass: offenders.is_empty(),
        witness: re.iter().copied().fold(f64::INFINITY, f64::min),
        index: Some(argmin(&re)),
        offenders: offenders.clone(),
    };

    let n = re.len();
    let w = tol.window(n);
    let window_min = re[n - w..].iter().copied().fold(f64::INFINITY, f64::min);
    let c2 = ConditionResult {
        name: "real_part_to_zero",
        pass: window_min <= tol.trend_tol && window_min <= c1.witness,
        witness: window_min,
        index: Some(n - w + argmin(&re[n - w..])),
        offenders: vec![],
    };

    let in_domain: Vec<usize> = (0..n).filter(|i| !offenders.contains(i)).collect();
    let mut diagnostics = Vec::new();
    if !offenders.is_empty() {
        diagnostics.push(format!("conditions 3-4 evaluated without indices {offenders:?} outside the half-plane"));
    }
    let (c3, c4) = structural_conditions(pair, Regime::Halfplane, &in_domain, tol, &mut diagnostics)?;
    Ok(finish("halfplane", vec![c1, c2, c3, c4], diagnostics))
}

/// Self-inverse map `(1 - z) / (1 + z)` between the unit disc and the right half-plane.
pub fn mobius(z: C64) -> C64 {
    // (1 - z)(1 + conj z) / |1 + z|^2, with 1 - |z|^2 formed without cancellation
    let d = (real(1.0) + z).norm_sqr();
    C64::new(one_minus_abs_sqr(z) / d, -2.0 * z.im / d)
}

/// `1 - |z|^2`, accurate near the unit circle.
fn one_minus_abs_sqr(z: C64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobiusTransfer {
    pub halfplane_pair: EigenSamplePair,
    /// Max difference between the disc and half-plane ratio expressions.
    pub identity_residual: f64,
}

/// Maps a disc-regime pair to the half-plane, rescaling coefficients by `sqrt(2) / |1 + lambda|`.
pub fn mobius_transfer(pair: &EigenSamplePair, epsilon_guard: f64) -> Result<MobiusTransfer> {
    let bad = Regime::Disc.offenders(&pair.lambdas);
    if !bad.is_empty() {
        return Err(Error::Domain { reason: "|lambda| >= 1".into(), indices: bad });
    }
    let guarded: Vec<usize> =
        (0..pair.len()).filter(|&i| (real(1.0) + pair.lambdas[i]).norm() <= epsilon_guard).collect();
    if !guarded.is_empty() {
        return Err(Error::GuardViolation { epsilon: epsilon_guard, indices: guarded });
    }
    let lambdas: Vec<C64> = pair.lambdas.iter().map(|&l| mobius(l)).collect();
    let coeffs: Vec<C64> = pair
        .lambdas
        .iter()
        .zip(&pair.coeffs)
        .map(|(&l, &c)| c * (std::f64::consts::SQRT_2 / (real(1.0) + l).norm()))
        .collect();
    let halfplane_pair = EigenSamplePair::new(lambdas, coeffs, pair.norms.clone())?;
    let identity_residual = (0..pair.len())
        .map(|i| {
            let d = pair.coeffs[i].norm() / (pair.norms[i] * Regime::Disc.weight(pair.lambdas[i]));
            let h = halfplane_pair.coeffs[i].norm()
                / (halfplane_pair.norms[i] * Regime::Halfplane.weight(halfplane_pair.lambdas[i]));
            (d - h).abs()
        })
        .fold(0.0, f64::max);
    Ok(MobiusTransfer { halfplane_pair, identity_residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub inside: bool,
    pub region: String,
    pub alpha: Option<f64>,
    pub offenders: Vec<usize>,
}

/// Necessary location of the point spectrum of `A` (`mu = -lambda`) for exact observability.
pub fn spectrum_inclusion_report(lambdas: &[C64], regime: Regime) -> InclusionReport {
    let offenders = regime.offenders(lambdas);
    match regime {
        Regime::Disc => {
            InclusionReport { inside: offenders.is_empty(), region: "|mu| < 1".into(), alpha: None, offenders }
        }
        Regime::Halfplane => {
            let alpha = lambdas.iter().map(|l| l.re).fold(0.0, f64::max);
            InclusionReport {
                inside: offenders.is_empty(),
                region: format!("-{alpha} <= Re mu < 0"),
                alpha: Some(alpha),
                offenders,
            }
        }
        Regime::Finite { .. } => {
            let alpha = lambdas.iter().map(|l| l.re.abs()).fold(0.0, f64::max);
            InclusionReport { inside: true, region: format!("|Re mu| <= {alpha}"), alpha: Some(alpha), offenders }
        }
    }
}

/// Ready-made sequences exercising each condition.
pub mod fixtures {
    use super::*;

    /// `lambda_n = 1 - 2^{-n}`, `<b, phi_n> = sqrt(1 - lambda_n^2)`: passes all four disc conditions.
    pub fn disc_pass_family(n: usize) -> EigenSamplePair {
        let lambdas: Vec<C64> = (1..=n).map(|k| real(1.0 - 0.5f64.powi(k as i32))).collect();
        let coeffs = lambdas.iter().map(|l| real(one_minus_abs_sqr(*l).sqrt())).collect();
        EigenSamplePair::orthonormal(lambdas, coeffs).expect("valid fixture")
    }

    /// Last eigenvalue moved onto the unit circle.
    pub fn disc_boundary_mutation(n: usize) -> EigenSamplePair {
        let base = disc_pass_family(n);
        let mut lambdas = base.lambdas().to_vec();
        let mut coeffs = base.coeffs().to_vec();
        lambdas[n - 1] = real(1.0);
        coeffs[n - 1] = real(0.5f64.powi(n as i32));
        EigenSamplePair::orthonormal(lambdas, coeffs).expect("valid fixture")
    }

    /// Eigenvalues stalled on the circle of radius 1/2, equally spaced in angle.
    pub fn disc_stalled_mutation(n: usize) -> EigenSamplePair {
        let lambdas: Vec<C64> =
            (0..n).map(|k| C64::from_polar(0.5, 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
        let coeffs = lambdas.iter().map(|l| real(one_minus_abs_sqr(*l).sqrt())).collect();
        EigenSamplePair::orthonormal(lambdas, coeffs).expect("valid fixture")
    }

    /// Last eigenvalue repeats the previous one.
    pub fn disc_duplicate_mutation(n: usize) -> EigenSamplePair {
        let base = disc_pass_family(n);
        let mut lambdas = base.lambdas().to_vec();
        let mut coeffs = base.coeffs().to_vec();
        lambdas[n - 1] = lambdas[n - 2];
        coeffs[n - 1] = coeffs[n - 2];
        EigenSamplePair::orthonormal(lambdas, coeffs).expect("valid fixture")
    }

    /// Coefficients `2^{-n}` decay faster than `sqrt(1 - lambda_n^2)`.
    pub fn disc_decayed_mutation(n: usize) -> EigenSamplePair {
        let base = disc_pass_family(n);
        let coeffs = (1..=n).map(|k| real(0.5f64.powi(k as i32))).collect();
        EigenSamplePair::orthonormal(base.lambdas().to_vec(), coeffs).expect("valid fixture")
    }

    /// `lambda_n = 2^{-n}`, `<b, phi_n> = sqrt(2 lambda_n)`: passes all four half-plane conditions.
    pub fn halfplane_pass_family(n: usize) -> EigenSamplePair {
        let lambdas: Vec<C64> = (1..=n).map(|k| real(0.5f64.powi(k as i32))).collect();
        let coeffs = lambdas.iter().map(|l| real((2.0 * l.re).sqrt())).collect();
        EigenSamplePair::orthonormal(lambdas, coeffs).expect("valid fixture")
    }

    /// A passing disc family rotated by pi. Rotation keeps every disc condition but moves the
    /// eigenvalues into the left half-plane, so the continuous statement fails condition 1.
    pub fn rotated_counterexample(n: usize) -> EigenSamplePair {
        let base = disc_pass_family(n);
        let lambdas = base.lambdas().iter().map(|&l| -l).collect();
        EigenSamplePair::orthonormal(lambdas, base.coeffs().to_vec()).expect("valid fixture")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::linalg::c;

    fn verdicts(r: &CriteriaReport) -> Vec<bool> {
        r.conditions.iter().map(|c| c.pass).collect()
    }

    #[test]
    fn carleson_disc_examples() {
        let r = carleson_disc(&[real(0.3)], 1e-6).unwrap();
        assert_eq!(r.inf_product, 1.0);
        assert!(r.pass);
        let r = carleson_disc(&[real(0.0), real(0.5)], 1e-6).unwrap();
        assert!((r.inf_product - 0.5).abs() < 1e-15);
        let r = carleson_disc(&[real(0.4), real(0.4)], 1e-6).unwrap();
        assert_eq!(r.inf_product, 0.0);
        assert!(!r.pass);
        assert_eq!(r.duplicate, Some((0, 1)));
        assert!(matches!(carleson_disc(&[real(1.0)], 1e-6), Err(Error::Domain { .. })));
    }

    #[test]
    fn carleson_halfplane_examples() {
        assert_eq!(carleson_halfplane(&[real(1.0)], 1e-6).unwrap().inf_product, 1.0);
        let r = carleson_halfplane(&[real(1.0), real(2.0)], 1e-6).unwrap();
        assert!((r.inf_product - 1.0 / 3.0).abs() < 1e-15);
        let r = carleson_halfplane(&[c(1.0, 1.0), c(1.0, 1.0)], 1e-6).unwrap();
        assert_eq!(r.inf_product, 0.0);
        assert!(!r.pass);
    }

    #[test]
    fn ratio_examples() {
        let tol = Tolerances::default();
        let p = EigenSamplePair::orthonormal(vec![real(0.5)], vec![real(3f64.sqrt() / 2.0)]).unwrap();
        let r = norm_ratio_condition(&p, Regime::Disc, &tol).unwrap();
        assert!((r.ratios[0] - 1.0).abs() < 1e-15);

        let p = EigenSamplePair::orthonormal(vec![real(0.5)], vec![real(1.0)]).unwrap();
        let r = norm_ratio_condition(&p, Regime::Halfplane, &tol).unwrap();
        assert!((r.ratios[0] - 1.0).abs() < 1e-15);

        let p = disc_pass_family(10);
        let r = norm_ratio_condition(&p, Regime::Disc, &tol).unwrap();
        assert!(r.pass);
        assert!((r.c1_hat - 1.0).abs() < 1e-12 && (r.c2_hat - 1.0).abs() < 1e-12);

        let p = EigenSamplePair::orthonormal(vec![real(1.0)], vec![real(1.0)]).unwrap();
        assert!(matches!(norm_ratio_condition(&p, Regime::Disc, &tol), Err(Error::Domain { .. })));
    }

    #[test]
    fn en_norm_examples() {
        let v = en_norm_squared(real(1.0), 1.0, Regime::Finite { tau: 1.0 }).unwrap();
        assert!((v - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-15);
        assert!((v - 0.432332).abs() < 1e-6);
        let v = en_norm_squared(real(0.5), 1.0, Regime::Disc).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(en_norm_squared(real(0.0), 3.0, Regime::Finite { tau: 2.0 }).unwrap(), 18.0);
        assert!(matches!(en_norm_squared(real(-0.1), 1.0, Regime::Halfplane), Err(Error::Convergence(_))));
        assert!(matches!(en_norm_squared(real(1.0), 1.0, Regime::Disc), Err(Error::Convergence(_))));
    }

    #[test]
    fn disc_pass_family_passes() {
        let r = one_point_frame_check(&disc_pass_family(12), &Tolerances::default()).unwrap();
        assert_eq!(verdicts(&r), vec![true; 4]);
        assert!(r.overall);
    }

    #[test]
    fn decayed_coefficients_fail_condition_four() {
        let r = one_point_frame_check(&disc_decayed_mutation(12), &Tolerances::default()).unwrap();
        assert_eq!(verdicts(&r), vec![true, true, true, false]);
    }

    #[test]
    fn interior_spectrum_fails_condition_two() {
        let p = EigenSamplePair::orthonormal(
            vec![real(0.1), real(0.2), real(0.3)],
            vec![real(0.99f64.sqrt()), real(0.96f64.sqrt()), real(0.91f64.sqrt())],
        )
        .unwrap();
        let r = one_point_frame_check(&p, &Tolerances::default()).unwrap();
        assert!(!r.conditions[1].pass);
    }

    #[test]
    fn halfplane_examples() {
        let tol = Tolerances::default();
        let r = continuous_infinite_check(&halfplane_pass_family(12), &tol).unwrap();
        assert_eq!(verdicts(&r), vec![true; 4]);

        let base = halfplane_pass_family(12);
        let mut lambdas = base.lambdas().to_vec();
        lambdas.insert(5, lambdas[4]);
        let coeffs = lambdas.iter().map(|l| real((2.0 * l.re).sqrt())).collect();
        let p = EigenSamplePair::orthonormal(lambdas, coeffs).unwrap();
        let r = continuous_infinite_check(&p, &tol).unwrap();
        assert!(!r.conditions[2].pass);
        assert!(r.diagnostics.iter().any(|d| d.contains("duplicate")));

        let lambdas: Vec<C64> = (1..=12).map(|k| real(k as f64)).collect();
        let coeffs = lambdas.iter().map(|l| real((2.0 * l.re).sqrt())).collect();
        let r = continuous_infinite_check(&EigenSamplePair::orthonormal(lambdas, coeffs).unwrap(), &tol).unwrap();
        assert!(!r.conditions[1].pass);
    }

    #[test]
    fn mobius_identities() {
        assert_eq!(mobius(real(0.0)), real(1.0));
        assert_eq!(mobius(real(1.0)), real(0.0));
        let z = c(0.3, -0.4);
        assert!((mobius(mobius(z)) - z).norm() < 1e-15);
        let m = mobius(real(0.5));
        assert!((m.re - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.re - (1.0 - 0.25) / 2.25).abs() < 1e-15);
    }

    #[test]
    fn mobius_guard() {
        let p = EigenSamplePair::orthonormal(vec![real(-1.0 + 1e-9)], vec![real(1.0)]).unwrap();
        match mobius_transfer(&p, 1e-6) {
            Err(Error::GuardViolation { indices, .. }) => assert_eq!(indices, vec![0]),
            other => panic!("expected guard violation, got {other:?}"),
        }
    }

    #[test]
    fn rotated_counterexample_breaks_continuous_condition_one() {
        let tol = Tolerances::default();
        let rotated = rotated_counterexample(12);
        assert!(one_point_frame_check(&rotated, &tol).unwrap().overall);
        let r = continuous_infinite_check(&rotated, &tol).unwrap();
        assert!(!r.conditions[0].pass);
    }

    #[test]
    fn inclusion_examples() {
        let r = spectrum_inclusion_report(&[real(0.5), c(0.0, 0.9)], Regime::Disc);
        assert!(r.inside);
        let r = spectrum_inclusion_report(&[real(0.5), real(-0.1)], Regime::Halfplane);
        assert!(!r.inside);
        assert_eq!(r.offenders, vec![1]);
        let r = spectrum_inclusion_report(&[real(-3.0), real(2.0)], Regime::Finite { tau: 1.0 });
        assert!(r.inside);
        assert_eq!(r.alpha, Some(3.0));
    }

    #[test]
    fn pair_from_system_uses_lambda_convention() {
        use crate::model::Spectrum;
        let d = DiagonalizableSystem::diagonal(Spectrum::from_mu(vec![real(-0.5), real(0.25)]).unwrap());
        let b = CVector::from_vec(vec![real(1.0), c(0.0, 2.0)]);
        let p = EigenSamplePair::from_system(&d, &b).unwrap();
        assert_eq!(p.lambdas(), &[real(0.5), real(-0.25)]);
        assert_eq!(p.coeffs(), &[real(1.0), c(0.0, 2.0)]);
    }
}
