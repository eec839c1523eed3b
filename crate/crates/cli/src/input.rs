//! JSON input files: systems and eigen-sample pairs.
//!
//! Complex numbers are `[re, im]` pairs. Every error carries a JSON pointer into the file.

use std::fs;
use std::path::Path;

use dynsamp_core::criteria::EigenSamplePair;
use dynsamp_core::dynamics::certify_tail;
use dynsamp_core::model::{panels_for, DEFAULT_NODES_PER_PANEL, DEFAULT_PANELS};
use dynsamp_core::{
    c, CMatrix, CVector, DiagonalizableSystem, Dynamics, Operator, SamplingFamily, Spectrum, SystemSpec, TimeDomain,
    C64,
};
use serde::Deserialize;

use crate::CliError;

/// Tail tolerance used when an infinite horizon does not give one.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

type Pair = [f64; 2];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    dim: usize,
    // decoded in a second pass: serde's tagged enums would drop the error path
    operator: serde_json::Value,
    sampling: SamplingFile,
    time: serde_json::Value,
    #[serde(default)]
    control: Option<Vec<Vec<Pair>>>,
}

enum OperatorFile {
    Dense {
        entries: Vec<Vec<Pair>>,
    },
    Diagonal {
        mu_re: Vec<f64>,
        mu_im: Option<Vec<f64>>,
        /// Basis matrix `V` row by row; its columns are the eigenvectors.
        basis: Option<Vec<Vec<Pair>>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DenseFile {
    entries: Vec<Vec<Pair>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagonalFile {
    mu_re: Vec<f64>,
    #[serde(default)]
    mu_im: Option<Vec<f64>>,
    #[serde(default)]
    basis: Option<Vec<Vec<Pair>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplingFile {
    vectors: Vec<Vec<Pair>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteFiniteFile {
    gamma: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteInfiniteFile {
    #[serde(default)]
    truncation: Option<usize>,
    #[serde(default)]
    tail_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContinuousFiniteFile {
    tau: f64,
    #[serde(default)]
    panels: Option<usize>,
    #[serde(default)]
    nodes_per_panel: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContinuousInfiniteFile {
    #[serde(default)]
    horizon: Option<f64>,
    #[serde(default)]
    panels: Option<usize>,
    #[serde(default)]
    nodes_per_panel: Option<usize>,
    #[serde(default)]
    tail_tol: Option<f64>,
}

enum TimeFile {
    DiscreteFinite {
        gamma: usize,
    },
    DiscreteInfinite {
        truncation: Option<usize>,
        tail_tol: Option<f64>,
    },
    ContinuousFinite {
        tau: f64,
        panels: Option<usize>,
        nodes_per_panel: Option<usize>,
    },
    ContinuousInfinite {
        horizon: Option<f64>,
        panels: Option<usize>,
        nodes_per_panel: Option<usize>,
        tail_tol: Option<f64>,
    },
}

/// Splits `{"kind": ..., rest}` into the tag and the remaining object.
fn tagged(value: &serde_json::Value, at: &str) -> Result<(String, serde_json::Value), CliError> {
    let mut obj = value.as_object().cloned().ok_or_else(|| schema(at, "expected an object"))?;
    let kind = match obj.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        Some(_) => return Err(schema(format!("{at}/kind"), "expected a string")),
        None => return Err(schema(at, "missing field `kind`")),
    };
    Ok((kind, serde_json::Value::Object(obj)))
}

fn operator_file(value: &serde_json::Value) -> Result<OperatorFile, CliError> {
    let (kind, rest) = tagged(value, "/operator")?;
    match kind.as_str() {
        "dense" => {
            let f: DenseFile = parse_value(&rest, "/operator")?;
            Ok(OperatorFile::Dense { entries: f.entries })
        }
        "diagonal" => {
            let f: DiagonalFile = parse_value(&rest, "/operator")?;
            Ok(OperatorFile::Diagonal { mu_re: f.mu_re, mu_im: f.mu_im, basis: f.basis })
        }
        other => Err(schema("/operator/kind", format!("unknown kind `{other}`, expected dense or diagonal"))),
    }
}

fn time_file(value: &serde_json::Value) -> Result<TimeFile, CliError> {
    let (kind, rest) = tagged(value, "/time")?;
    match kind.as_str() {
        "discrete_finite" => {
            let f: DiscreteFiniteFile = parse_value(&rest, "/time")?;
            Ok(TimeFile::DiscreteFinite { gamma: f.gamma })
        }
        "discrete_infinite" => {
            let f: DiscreteInfiniteFile = parse_value(&rest, "/time")?;
            Ok(TimeFile::DiscreteInfinite { truncation: f.truncation, tail_tol: f.tail_tol })
        }
        "continuous_finite" => {
            let f: ContinuousFiniteFile = parse_value(&rest, "/time")?;
            Ok(TimeFile::ContinuousFinite { tau: f.tau, panels: f.panels, nodes_per_panel: f.nodes_per_panel })
        }
        "continuous_infinite" => {
            let f: ContinuousInfiniteFile = parse_value(&rest, "/time")?;
            Ok(TimeFile::ContinuousInfinite {
                horizon: f.horizon,
                panels: f.panels,
                nodes_per_panel: f.nodes_per_panel,
                tail_tol: f.tail_tol,
            })
        }
        other => Err(schema(
            "/time/kind",
            format!("unknown kind `{other}`, expected discrete_finite, discrete_infinite, continuous_finite or continuous_infinite"),
        )),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{key}")),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = pointer(e.path());
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            CliError::Parse(inner.to_string())
        } else {
            CliError::Schema { pointer: at, message: inner.to_string() }
        }
    })
}

fn parse_value<T: for<'de> Deserialize<'de>>(value: &serde_json::Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let at = format!("{prefix}{}", pointer(e.path()));
        CliError::Schema { pointer: at, message: e.into_inner().to_string() }
    })
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema { pointer: pointer.into(), message: message.into() }
}

fn invariant(pointer: &str) -> impl FnOnce(dynsamp_core::Error) -> CliError + '_ {
    move |e| CliError::Invariant { pointer: pointer.to_string(), source: e }
}

fn complex(p: &Pair) -> C64 {
    c(p[0], p[1])
}

fn square(rows: &[Vec<Pair>], dim: usize, at: &str) -> Result<CMatrix, CliError> {
    if rows.len() != dim {
        return Err(schema(at, format!("expected {dim} rows, found {}", rows.len())));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(schema(format!("{at}/{i}"), format!("expected {dim} entries, found {}", row.len())));
        }
        for (j, p) in row.iter().enumerate() {
            m[(i, j)] = complex(p);
        }
    }
    Ok(m)
}

fn dynamics(op: &OperatorFile, dim: usize) -> Result<Dynamics, CliError> {
    match op {
        OperatorFile::Dense { entries } => {
            let m = square(entries, dim, "/operator/entries")?;
            Ok(Dynamics::Dense(Operator::new(m).map_err(invariant("/operator/entries"))?))
        }
        OperatorFile::Diagonal { mu_re, mu_im, basis } => {
            if mu_re.len() != dim {
                return Err(schema("/operator/mu_re", format!("expected {dim} values, found {}", mu_re.len())));
            }
            let im = match mu_im {
                Some(v) if v.len() != dim => {
                    return Err(schema("/operator/mu_im", format!("expected {dim} values, found {}", v.len())))
                }
                Some(v) => v.clone(),
                None => vec![0.0; dim],
            };
            let mu = mu_re.iter().zip(&im).map(|(&r, &i)| c(r, i)).collect();
            let spectrum = Spectrum::from_mu(mu).map_err(invariant("/operator/mu_re"))?;
            let d = match basis {
                None => DiagonalizableSystem::diagonal(spectrum),
                Some(rows) => {
                    let v = square(rows, dim, "/operator/basis")?;
                    DiagonalizableSystem::with_basis(spectrum, v).map_err(invariant("/operator/basis"))?
                }
            };
            Ok(Dynamics::Diagonalizable(d))
        }
    }
}

fn sampling(s: &SamplingFile, dim: usize) -> Result<SamplingFamily, CliError> {
    let mut vectors = Vec::with_capacity(s.vectors.len());
    for (i, v) in s.vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(schema(format!("/sampling/vectors/{i}"), format!("expected length {dim}, found {}", v.len())));
        }
        vectors.push(CVector::from_iterator(dim, v.iter().map(complex)));
    }
    match &s.labels {
        None => SamplingFamily::unlabeled(vectors).map_err(invariant("/sampling/vectors")),
        Some(labels) => {
            if labels.len() != vectors.len() {
                return Err(schema(
                    "/sampling/labels",
                    format!("{} labels for {} vectors", labels.len(), vectors.len()),
                ));
            }
            SamplingFamily::new(vectors, labels.clone()).map_err(invariant("/sampling/labels"))
        }
    }
}

/// Builds an infinite horizon, filling a missing truncation from the tail certificate.
fn time_domain(t: &TimeFile, dynamics: &Dynamics, family: &SamplingFamily) -> Result<TimeDomain, CliError> {
    Ok(match *t {
        TimeFile::DiscreteFinite { gamma } => TimeDomain::DiscreteFinite { gamma },
        TimeFile::ContinuousFinite { tau, panels, nodes_per_panel } => TimeDomain::ContinuousFinite {
            tau,
            panels: panels.unwrap_or_else(|| panels_for(tau, rate(dynamics))),
            nodes_per_panel: nodes_per_panel.unwrap_or(DEFAULT_NODES_PER_PANEL),
        },
        TimeFile::DiscreteInfinite { truncation, tail_tol } => {
            let tail_tol = tail_tol.unwrap_or(DEFAULT_TAIL_TOL);
            let mut kind = TimeDomain::DiscreteInfinite { truncation: truncation.unwrap_or(0), tail_tol };
            if truncation.is_none() {
                let k = suggested(dynamics, family, &kind)?;
                kind = TimeDomain::DiscreteInfinite { truncation: k as usize, tail_tol };
            }
            kind
        }
        TimeFile::ContinuousInfinite { horizon, panels, nodes_per_panel, tail_tol } => {
            let tail_tol = tail_tol.unwrap_or(DEFAULT_TAIL_TOL);
            let nodes_per_panel = nodes_per_panel.unwrap_or(DEFAULT_NODES_PER_PANEL);
            let probe = TimeDomain::ContinuousInfinite {
                horizon: horizon.unwrap_or(1.0),
                panels: DEFAULT_PANELS,
                nodes_per_panel,
                tail_tol,
            };
            let horizon = match horizon {
                Some(h) => h,
                None => suggested(dynamics, family, &probe)?.max(1.0),
            };
            let panels = panels.unwrap_or_else(|| panels_for(horizon, rate(dynamics)));
            TimeDomain::ContinuousInfinite { horizon, panels, nodes_per_panel, tail_tol }
        }
    })
}

/// Operator norm used to size quadrature panels.
fn rate(dynamics: &Dynamics) -> f64 {
    match dynamics {
        Dynamics::Dense(a) => a.norm(),
        Dynamics::Diagonalizable(d) => d.to_operator().map(|a| a.norm()).unwrap_or(1.0),
    }
}

fn suggested(dynamics: &Dynamics, family: &SamplingFamily, kind: &TimeDomain) -> Result<f64, CliError> {
    let probe =
        SystemSpec::new(dynamics.clone(), family.clone(), TimeDomain::discrete(0), None).map_err(invariant("/time"))?;
    Ok(certify_tail(&probe, kind).map_err(invariant("/time"))?.suggested_truncation)
}

/// Loads and validates a system file.
pub fn load_system(path: &Path) -> Result<SystemSpec, CliError> {
    system_from_str(&read(path)?)
}

pub fn system_from_str(text: &str) -> Result<SystemSpec, CliError> {
    let file: SystemFile = parse(text)?;
    if file.dim == 0 {
        return Err(schema("/dim", "dimension must be at least 1"));
    }
    let operator = operator_file(&file.operator)?;
    let time = time_file(&file.time)?;
    let dynamics = dynamics(&operator, file.dim)?;
    let family = sampling(&file.sampling, file.dim)?;
    let control = match &file.control {
        None => None,
        Some(rows) => {
            if rows.len() != file.dim {
                return Err(schema("/control", format!("expected {} rows, found {}", file.dim, rows.len())));
            }
            let cols = rows.first().map_or(0, Vec::len);
            let mut m = CMatrix::zeros(file.dim, cols);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != cols || cols == 0 {
                    return Err(schema(
                        format!("/control/{i}"),
                        format!("expected {cols} entries, found {}", row.len()),
                    ));
                }
                for (j, p) in row.iter().enumerate() {
                    m[(i, j)] = complex(p);
                }
            }
            Some(m)
        }
    };
    let time = time_domain(&time, &dynamics, &family)?;
    SystemSpec::new(dynamics, family, time, control).map_err(invariant("/time"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    lambda_re: Vec<f64>,
    #[serde(default)]
    lambda_im: Option<Vec<f64>>,
    coeff_re: Vec<f64>,
    #[serde(default)]
    coeff_im: Option<Vec<f64>>,
    #[serde(default)]
    phi_norms: Option<Vec<f64>>,
}

fn optional(v: &Option<Vec<f64>>, n: usize, fill: f64, at: &str) -> Result<Vec<f64>, CliError> {
    match v {
        None => Ok(vec![fill; n]),
        Some(v) if v.len() == n => Ok(v.clone()),
        Some(v) => Err(schema(at, format!("expected {n} values, found {}", v.len()))),
    }
}

/// Loads an eigen-sample pair file.
pub fn load_pair(path: &Path) -> Result<EigenSamplePair, CliError> {
    pair_from_str(&read(path)?)
}

pub fn pair_from_str(text: &str) -> Result<EigenSamplePair, CliError> {
    let f: PairFile = parse(text)?;
    let n = f.lambda_re.len();
    if f.coeff_re.len() != n {
        return Err(schema("/coeff_re", format!("expected {n} values, found {}", f.coeff_re.len())));
    }
    let lambda_im = optional(&f.lambda_im, n, 0.0, "/lambda_im")?;
    let coeff_im = optional(&f.coeff_im, n, 0.0, "/coeff_im")?;
    let norms = optional(&f.phi_norms, n, 1.0, "/phi_norms")?;
    let lambdas = f.lambda_re.iter().zip(&lambda_im).map(|(&r, &i)| c(r, i)).collect();
    let coeffs = f.coeff_re.iter().zip(&coeff_im).map(|(&r, &i)| c(r, i)).collect();
    EigenSamplePair::new(lambdas, coeffs, norms).map_err(invariant(""))
}

/// Pair in the file layout, for writing transferred sequences back out.
pub fn pair_to_json(p: &EigenSamplePair) -> serde_json::Value {
    serde_json::json!({
        "lambda_re": p.lambdas().iter().map(|l| l.re).collect::<Vec<_>>(),
        "lambda_im": p.lambdas().iter().map(|l| l.im).collect::<Vec<_>>(),
        "coeff_re": p.coeffs().iter().map(|l| l.re).collect::<Vec<_>>(),
        "coeff_im": p.coeffs().iter().map(|l| l.im).collect::<Vec<_>>(),
        "phi_norms": p.norms(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dim": 2,
        "operator": {"kind": "diagonal", "mu_re": [0.5, 0.25]},
        "sampling": {"vectors": [[[1, 0], [1, 0]]]},
        "time": {"kind": "discrete_finite", "gamma": 1}
    }"#;

    #[test]
    fn minimal_diagonal_loads() {
        let sys = system_from_str(MINIMAL).unwrap();
        assert_eq!(sys.dim(), 2);
        assert_eq!(sys.sampling().labels(), &["g0".to_string()]);
    }

    #[test]
    fn short_vector_is_a_schema_error() {
        let text = MINIMAL.replace("[[[1, 0], [1, 0]]]", "[[[1, 0]]]");
        match system_from_str(&text) {
            Err(CliError::Schema { pointer, .. }) => assert_eq!(pointer, "/sampling/vectors/0"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn type_errors_carry_pointers() {
        let text = MINIMAL.replace(r#""gamma": 1"#, r#""gamma": "one""#);
        match system_from_str(&text) {
            Err(CliError::Schema { pointer, .. }) => assert_eq!(pointer, "/time/gamma"),
            other => panic!("expected schema error, got {other:?}"),
        }
        assert!(matches!(system_from_str("{\"dim\": 2,"), Err(CliError::Parse(_))));
    }

    #[test]
    fn unstable_infinite_horizon_is_an_invariant_error() {
        let text = MINIMAL.replace("[0.5, 0.25]", "[1.0, 0.25]").replace(
            r#"{"kind": "discrete_finite", "gamma": 1}"#,
            r#"{"kind": "discrete_infinite", "truncation": 50}"#,
        );
        match system_from_str(&text) {
            Err(e @ CliError::Invariant { .. }) => assert!(e.to_string().contains("certify_tail")),
            other => panic!("expected invariant error, got {other:?}"),
        }
    }

    #[test]
    fn missing_truncation_is_filled_from_the_certificate() {
        let text = MINIMAL.replace(r#"{"kind": "discrete_finite", "gamma": 1}"#, r#"{"kind": "discrete_infinite"}"#);
        let sys = system_from_str(&text).unwrap();
        let TimeDomain::DiscreteInfinite { truncation, .. } = *sys.time() else { panic!() };
        assert!(truncation > 10);
        assert!(sys.tail_certificate().unwrap().ok);
    }

    #[test]
    fn pair_lengths_must_match() {
        let p = pair_from_str(r#"{"lambda_re": [0.5, 0.25], "coeff_re": [1, 1]}"#).unwrap();
        assert_eq!(p.norms(), &[1.0, 1.0]);
        match pair_from_str(r#"{"lambda_re": [0.5], "coeff_re": [1], "phi_norms": [1, 2]}"#) {
            Err(CliError::Schema { pointer, .. }) => assert_eq!(pointer, "/phi_norms"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }
}
