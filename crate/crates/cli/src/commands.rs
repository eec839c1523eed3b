use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dynsamp_core::criteria::{
    continuous_infinite_check, disc_factor, halfplane_factor, mobius, mobius_transfer, norm_ratio_condition,
    one_point_frame_check, spectrum_inclusion_report, CriteriaReport, Regime,
};
use dynsamp_core::dynamics::controllability_tests;
use dynsamp_core::experiments::{
    bessel_admissibility_operator, discretization_sweep, kalman_independence, stable_truncation_bound,
};
use dynsamp_core::model::stability_classification;
use dynsamp_core::observability::{
    admissibility_bound_check, duality_check, frame_report, observability_matrix, reconstruct, ObservationRecord,
};
use dynsamp_core::{Error, SystemSpec, Tolerances};
use serde_json::json;

use crate::input::{load_pair, load_system, pair_to_json};
use crate::report::{write_atomic, Entry, Format, Report};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "dynsamp", version, about = "Observability and frame analysis of sampled linear dynamics")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Relative floor for exact observability, `c1 > tol * c2`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Carleson product floor.
    #[arg(long, global = true)]
    pub delta_floor: Option<f64>,
    /// Guard `|1 + lambda| > epsilon` for the disc to half-plane map.
    #[arg(long, global = true)]
    pub epsilon_guard: Option<f64>,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SystemArg {
    #[arg(long)]
    pub system: PathBuf,
}

#[derive(Debug, Args)]
pub struct PairArg {
    /// Eigen-sample pair file.
    #[arg(long)]
    pub pair: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RegimeArg {
    Disc,
    Halfplane,
    Finite,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame bounds, stability and admissibility of a system.
    Check(SystemArg),
    /// Recover the initial state from an observation CSV.
    Reconstruct {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        samples: PathBuf,
    },
    /// Four-condition test of an eigen-sample pair.
    Criteria {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Horizon for the finite regime.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Map a disc pair to the half-plane and compare the two checks.
    Mobius(PairArg),
    /// Observability of a system against controllability of its dual.
    Duality(SystemArg),
    /// Uniform-grid discretizations of a continuous horizon.
    Sweep {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
    },
    /// Observability ranks across horizons and the Kalman matrix.
    Kalman {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_delimiter = ',', default_value = "0.1,1,10")]
        taus: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        truncation: usize,
    },
    /// Finite horizon guaranteed by the infinite-horizon bounds of a contraction.
    Truncation(SystemArg),
    /// Integrated semigroup `int_0^tau e^{tA} dt` and its invertibility.
    BesselOp {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        tau: f64,
        /// Upper end of the bisection for the invertibility threshold.
        #[arg(long)]
        tau_max: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::Reconstruct { .. } => "reconstruct",
            Command::Criteria { .. } => "criteria",
            Command::Mobius(_) => "mobius",
            Command::Duality(_) => "duality",
            Command::Sweep { .. } => "sweep",
            Command::Kalman { .. } => "kalman",
            Command::Truncation(_) => "truncation",
            Command::BesselOp { .. } => "bessel-op",
        }
    }
}

impl RunConfig {
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        let mut t = Tolerances::default();
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
            }
        };
        if let Some(v) = self.tol {
            t.eob_rel = positive("tol", v)?;
        }
        if let Some(v) = self.delta_floor {
            t.delta_floor = positive("delta-floor", v)?;
        }
        if let Some(v) = self.epsilon_guard {
            t.epsilon_guard = positive("epsilon-guard", v)?;
        }
        Ok(t)
    }
}

pub const EXIT_TRUE: u8 = 0;
pub const EXIT_FALSE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CERTIFICATE: u8 = 3;

/// Runs one command, writes its report and returns the exit code.
pub fn run(config: &RunConfig) -> u8 {
    match execute(config) {
        Ok(report) => {
            let text = report.render(config.format);
            let written = match &config.out {
                Some(p) => write_atomic(p, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) if report.verdict => EXIT_TRUE,
                Ok(()) => EXIT_FALSE,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn base(command: &'static str, tol: &Tolerances) -> Report {
    let mut r = Report::new(command);
    r.set("tolerances", tol);
    r
}

fn attach_system(r: &mut Report, sys: &SystemSpec) {
    r.set(
        "system",
        json!({
            "dim": sys.dim(),
            "samples": sys.sampling().len(),
            "time": sys.time(),
            "has_control": sys.control().is_some(),
        }),
    );
    r.set("tail_certificate", sys.tail_certificate());
}

fn frame_dictionary(v: &dynsamp_core::FrameVerdicts) -> Vec<Entry> {
    vec![
        Entry::new(
            "bessel_admissible",
            v.bessel_admissible,
            "the sampled family is a Bessel system",
            "the observation operator is admissible",
        ),
        Entry::new("complete_aob", v.complete_aob, "the sampled family is complete", "approximately observable"),
        Entry::new("frame_eob", v.frame_eob, "the sampled family is a frame", "exactly observable"),
    ]
}

fn execute(config: &RunConfig) -> Result<Report, CliError> {
    let tol = config.tolerances()?;
    let name = config.command.name();
    let mut r = base(name, &tol);
    match &config.command {
        Command::Check(a) => {
            let sys = load_system(&a.system)?;
            attach_system(&mut r, &sys);
            let frame = frame_report(&sys, &tol)?;
            r.set("frame", frame);
            r.set("stability", stability_classification(sys.operator()));
            if !sys.time().is_discrete() {
                match admissibility_bound_check(&sys, &tol) {
                    Ok(adm) => r.set("admissibility", adm),
                    Err(Error::NotApplicable(why)) => r.set("admissibility", json!({ "not_applicable": why })),
                    Err(e) => return Err(e.into()),
                };
            }
            if sys.control().is_some() && !sys.time().is_infinite() {
                let ctrl = controllability_tests(&sys, sys.time(), &tol)?;
                r.dictionary.push(Entry::new(
                    "eco",
                    ctrl.eco,
                    "the controllability map is onto",
                    "exactly controllable",
                ));
                r.set("controllability", ctrl);
            }
            r.dictionary.splice(0..0, frame_dictionary(&frame.verdicts));
            if sys.time().is_infinite() && sys.sampling().len() < sys.dim() {
                let stab = stability_classification(sys.operator());
                if stab.exponentially_stable || stab.strongly_stable {
                    r.notes.push(
                        "finite-dimensional verdict: in infinite dimensions a stable operator observed at infinite \
                         time through finitely many vectors is never exactly observable"
                            .into(),
                    );
                }
            }
            r.verdict = frame.verdicts.frame_eob;
        }
        Command::Reconstruct { system, samples } => {
            let sys = load_system(&system.system)?;
            attach_system(&mut r, &sys);
            let file =
                fs::File::open(samples).map_err(|e| CliError::Io { path: samples.display().to_string(), source: e })?;
            let record = ObservationRecord::read_csv(file).map_err(|e| CliError::Csv(e.to_string()))?;
            let psi = observability_matrix(&sys)?;
            record.check_layout(&psi, sys.sampling()).map_err(|e| CliError::Csv(e.to_string()))?;
            match reconstruct(&sys, &record.values(), &tol) {
                Ok(rec) => {
                    r.set("x0", rec.x0.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>());
                    r.set("residual", rec.residual);
                    r.set("frame", rec.frame);
                    r.dictionary = frame_dictionary(&rec.frame.verdicts);
                    r.verdict = true;
                }
                Err(Error::NotObservable { c1, threshold }) => {
                    r.set("refused", json!({ "reason": "not exactly observable", "c1": c1, "threshold": threshold }));
                    r.set("frame", frame_report(&sys, &tol)?);
                    r.verdict = false;
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Criteria { pair, regime, tau } => {
            let p = load_pair(&pair.pair)?;
            r.set("n", p.len());
            let report: Option<CriteriaReport> = match regime {
                RegimeArg::Disc => Some(one_point_frame_check(&p, &tol)?),
                RegimeArg::Halfplane => Some(continuous_infinite_check(&p, &tol)?),
                RegimeArg::Finite => None,
            };
            let core_regime = match regime {
                RegimeArg::Disc => Regime::Disc,
                RegimeArg::Halfplane => Regime::Halfplane,
                RegimeArg::Finite => Regime::Finite {
                    tau: tau.ok_or_else(|| CliError::Usage("--tau is required for the finite regime".into()))?,
                },
            };
            r.set("inclusion", spectrum_inclusion_report(p.lambdas(), core_regime));
            match report {
                Some(rep) => {
                    for c in &rep.conditions {
                        r.dictionary.push(Entry::new(
                            c.name,
                            c.pass,
                            "condition on the eigen-sample sequence",
                            "necessary and sufficient part of exact observability at infinite time",
                        ));
                    }
                    r.verdict = rep.overall;
                    r.set("criteria", rep);
                }
                None => {
                    let ratio = norm_ratio_condition(&p, core_regime, &tol)?;
                    r.verdict = ratio.pass;
                    r.set("regime", core_regime);
                    r.set("evidence", "finite-section evidence");
                    r.set("norm_ratio", ratio);
                }
            }
        }
        Command::Mobius(pair) => {
            let p = load_pair(&pair.pair)?;
            let t = mobius_transfer(&p, tol.epsilon_guard)?;
            let disc = one_point_frame_check(&p, &tol)?;
            let half = continuous_infinite_check(&t.halfplane_pair, &tol)?;
            let mut factor_gap = 0.0f64;
            for (i, &a) in p.lambdas().iter().enumerate() {
                for &b in &p.lambdas()[i + 1..] {
                    factor_gap = factor_gap.max((disc_factor(a, b) - halfplane_factor(mobius(a), mobius(b))).abs());
                }
            }
            let agree: Vec<bool> =
                disc.conditions.iter().zip(&half.conditions).map(|(d, h)| d.pass == h.pass).collect();
            r.verdict = t.identity_residual <= 1e-12 && agree.iter().all(|&x| x);
            r.set("identity_residual", t.identity_residual);
            r.set("max_factor_gap", factor_gap);
            r.set("condition_agreement", agree);
            r.set("halfplane_pair", pair_to_json(&t.halfplane_pair));
            r.set("disc", disc);
            r.set("halfplane", half);
        }
        Command::Duality(a) => {
            let sys = load_system(&a.system)?;
            attach_system(&mut r, &sys);
            let d = duality_check(&sys, &tol)?;
            r.dictionary = vec![
                Entry::new("eob", d.eob, "the sampled family is a frame", "exactly observable"),
                Entry::new("dual_eco", d.dual_eco, "the dual family is a frame", "dual pair exactly controllable"),
                Entry::new("aob", d.aob, "the sampled family is complete", "approximately observable"),
                Entry::new(
                    "dual_aco",
                    d.dual_aco,
                    "the dual family is complete",
                    "dual pair approximately controllable",
                ),
            ];
            r.verdict = d.eob_iff_dual_eco && d.aob_iff_dual_aco && d.adjoint_identity_error <= 1e-10;
            r.set("duality", d);
        }
        Command::Sweep { system, deltas } => {
            let sys = load_system(&system.system)?;
            attach_system(&mut r, &sys);
            let s = discretization_sweep(&sys, deltas, &tol)?;
            let mut table = Vec::new();
            s.write_tsv(&mut table).expect("in-memory write");
            r.table = Some(String::from_utf8(table).expect("utf8"));
            r.verdict = s.rows.iter().all(|row| row.verdict);
            r.set("sweep", s);
        }
        Command::Kalman { system, taus, truncation } => {
            let sys = load_system(&system.system)?;
            attach_system(&mut r, &sys);
            let k = kalman_independence(&sys, taus, *truncation, &tol)?;
            r.verdict = k.all_equal;
            r.set("kalman", k);
        }
        Command::Truncation(a) => {
            let sys = load_system(&a.system)?;
            attach_system(&mut r, &sys);
            let t = stable_truncation_bound(&sys, &tol)?;
            r.verdict = t.ok;
            r.set("truncation", t);
        }
        Command::BesselOp { system, tau, tau_max } => {
            let sys = load_system(&system.system)?;
            attach_system(&mut r, &sys);
            let b = bessel_admissibility_operator(sys.operator(), *tau, *tau_max, &tol)?;
            r.set(
                "t_matrix",
                b.t_matrix
                    .row_iter()
                    .map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            );
            r.verdict = b.invertible;
            r.set("operator", b);
        }
    }
    Ok(r)
}
