//! Command dispatch behind the `nevkit` binary. Each command reads JSON,
//! writes one JSON report and says whether the checked property held.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::blaschke::interpolation_margins;
use crate::covering::{build_covering, verify_covering};
use crate::divdiff::{xn_statistic, StatConfig};
use crate::error::{Error, Result};
use crate::generate::{generate, GeneratorSpec};
use crate::interpolator::{chained_solve, split_values};
use crate::majorant::HarmonicMajorant;
use crate::pipeline::{covering_majorant, verify_main_theorem, weak_separation_majorant, MainTheoremConfig};
use crate::separation::{count_condition, partition_weakly_separated, weakly_separated};
use crate::sequence::LabeledSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Gen,
    CheckSep,
    Partition,
    Cover,
    Divdiff,
    Margin,
    Interpolate,
    VerifyMain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub n: usize,
    pub seed: u64,
    pub budget: u128,
    /// Path to a `HarmonicMajorant` JSON file.
    pub majorant: Option<PathBuf>,
    /// Covering constant `C`.
    pub c: Option<f64>,
}

/// Report plus whether the property under test held.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

impl Outcome {
    fn new<T: Serialize>(report: &T, passed: bool) -> Result<Self> {
        Ok(Outcome {
            report: serde_json::to_value(report)?,
            passed,
        })
    }

    fn failure(err: &Error) -> Self {
        Outcome {
            report: json!({ "passed": false, "error": err.to_string() }),
            passed: false,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn input(cfg: &ExperimentConfig) -> Result<&Path> {
    cfg.input
        .as_deref()
        .ok_or_else(|| Error::InvalidParams("--input is required".into()))
}

fn majorant_or(cfg: &ExperimentConfig, default: impl FnOnce() -> Result<HarmonicMajorant>) -> Result<HarmonicMajorant> {
    match &cfg.majorant {
        Some(p) => read_json(p),
        None => default(),
    }
}

/// Runs one command. Mathematical failures come back as `Outcome { passed:
/// false }`; `Err` means bad usage or input.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    match dispatch(cfg) {
        Err(e) if crate::pipeline::is_property_failure(&e) => Ok(Outcome::failure(&e)),
        other => other,
    }
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.command == Command::Gen {
        let spec: GeneratorSpec = read_json(input(cfg)?)?;
        return Outcome::new(&generate(&spec, cfg.seed)?, true);
    }
    let seq: LabeledSequence = read_json(input(cfg)?)?;
    let stat_cfg = StatConfig {
        budget: cfg.budget,
        ..StatConfig::default()
    };
    match cfg.command {
        Command::Gen => unreachable!(),
        Command::CheckSep => {
            let h = majorant_or(cfg, || Ok(HarmonicMajorant::standard()))?;
            let sep = weakly_separated(seq.points(), &h);
            let count = count_condition(seq.points(), &h);
            let parts = match seq.labels() {
                Some(_) => Some(
                    seq.parts()?
                        .iter()
                        .map(|p| weakly_separated(p, &h))
                        .collect::<Vec<_>>(),
                ),
                None => None,
            };
            let passed = count.max_count <= cfg.n;
            Outcome::new(
                &json!({ "n": cfg.n, "separation": sep, "count": count, "parts": parts, "passed": passed }),
                passed,
            )
        }
        Command::Partition => {
            let h = majorant_or(cfg, || Ok(HarmonicMajorant::standard()))?;
            let r = partition_weakly_separated(seq.points(), &h, cfg.n)?;
            let passed = r.all_separated();
            let labeled = LabeledSequence::from_parts(&r.parts)?;
            Outcome::new(&json!({ "partition": r, "sequence": labeled, "passed": passed }), passed)
        }
        Command::Cover => {
            let parts = seq.parts()?;
            let h = majorant_or(cfg, || covering_majorant(&parts))?;
            let cov = build_covering(&parts, &h, cfg.c)?;
            let ver = verify_covering(&cov, &parts);
            let passed = ver.all_pass();
            Outcome::new(&json!({ "covering": cov, "verification": ver, "passed": passed }), passed)
        }
        Command::Divdiff => {
            let h = majorant_or(cfg, || Ok(HarmonicMajorant::standard()))?;
            let st = xn_statistic(&seq, cfg.n, &h, &stat_cfg)?;
            let passed = st.sup <= 1.0;
            Outcome::new(&json!({ "statistic": st, "passed": passed }), passed)
        }
        Command::Margin => {
            let h = majorant_or(cfg, || Ok(HarmonicMajorant::standard()))?;
            let ms = interpolation_margins(seq.points(), &h)?;
            let passed = ms.iter().all(|m| m.satisfied);
            Outcome::new(&json!({ "margins": ms, "passed": passed }), passed)
        }
        Command::Interpolate => {
            let (parts, omega) = split_values(&seq)?;
            let h = majorant_or(cfg, || weak_separation_majorant(&parts))?;
            let chain = chained_solve(&parts, &omega, &h)?;
            let residual = chain.max_residual(&omega);
            let max_w = omega.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
            let passed = residual <= 1e-9 * (1.0 + max_w);
            Outcome::new(&json!({ "chain": chain, "residual": residual, "passed": passed }), passed)
        }
        Command::VerifyMain => {
            let mut mc = MainTheoremConfig::new(cfg.n);
            mc.budget = cfg.budget;
            mc.seed = cfg.seed;
            mc.covering_c = cfg.c;
            if let Some(p) = &cfg.majorant {
                mc.majorant = read_json(p)?;
            }
            let r = verify_main_theorem(&seq, &mc)?;
            Outcome::new(&r, r.passed)
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}
