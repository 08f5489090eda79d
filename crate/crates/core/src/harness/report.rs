use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, Scenario, Verdict};
use crate::error::Result;
use crate::field::{stepanov_norm, GridFn};
use crate::model::{DecayClass, FSet};
use crate::solver::{EntropyReport, ENTROPY_TOL_PER_LENGTH};
use crate::stefan::{
    DecayReport, JumpReport, MassBalance, NonDecayReport, EQUIVALENCE_TOL, MAX_FIT_RMS,
    RH_TOL_FRACTION,
};

/// Relative mass drift allowed in a run.
pub const CONSERVATION_TOL: f64 = 1e-10;
/// Allowed excursion beyond the initial range.
pub const BOUND_VIOLATION_TOL: f64 = 1e-8;
/// Slack on pointwise ordering of bracketing runs.
pub const ORDER_TOL: f64 = 1e-12;
/// Largest relative mass-balance residual of the Stefan construction.
pub const MASS_BALANCE_TOL: f64 = 0.02;

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub model: String,
    pub range: (f64, f64),
    pub mean: f64,
    pub f_components: Vec<(f64, f64)>,
    pub nd_condition: bool,
    pub gn_condition: bool,
    pub classification: DecayClass,
}

impl ConditionReport {
    pub fn f_set(&self) -> String {
        if self.f_components.is_empty() {
            return "∅".into();
        }
        self.f_components
            .iter()
            .map(|(a, b)| format!("[{a}, {b}]"))
            .collect::<Vec<_>>()
            .join(" ∪ ")
    }

    pub(crate) fn from_fset(model: &str, range: (f64, f64), mean: f64, f: &FSet) -> Self {
        ConditionReport {
            model: model.to_string(),
            range,
            mean,
            f_components: f.components().to_vec(),
            nd_condition: crate::model::check_nd_condition(f, mean),
            gn_condition: crate::model::check_gn_condition(f, mean),
            classification: crate::model::classify(f, mean),
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormSample {
    pub time: f64,
    /// `∫ |u - m|` over the computational cell.
    pub l1_cell: f64,
    /// `‖u - m‖_X`.
    pub stepanov_x: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// `min residual + tolerance` over the entropy tests ending at this sample.
    pub entropy_margin: Option<f64>,
}

impl NormSample {
    pub fn of(time: f64, u: &GridFn, m: f64, radius: f64) -> Result<Self> {
        let d = u.map(|x| x - m);
        Ok(NormSample {
            time,
            l1_cell: d.l1_norm(),
            stepanov_x: stepanov_norm(&d, radius)?,
            mean: u.mean()?,
            min: u.min(),
            max: u.max(),
            entropy_margin: None,
        })
    }
}

pub const CSV_HEADER: &str = "time,l1_cell,stepanov_x,mean,min,max,entropy_margin";

pub fn norms_csv(samples: &[NormSample]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in samples {
        let margin = r.entropy_margin.map(|m| m.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.time, r.l1_cell, r.stepanov_x, r.mean, r.min, r.max, margin
        );
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleResult {
    pub rule: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl RuleResult {
    pub fn at_most(rule: &str, measured: f64, threshold: f64) -> Self {
        RuleResult {
            rule: rule.into(),
            measured,
            threshold,
            passed: measured <= threshold,
        }
    }

    pub fn at_least(rule: &str, measured: f64, threshold: f64) -> Self {
        RuleResult {
            rule: rule.into(),
            measured,
            threshold,
            passed: measured >= threshold,
        }
    }

    pub fn flag(rule: &str, ok: bool) -> Self {
        RuleResult {
            rule: rule.into(),
            measured: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantSummary {
    pub max_mass_drift: f64,
    pub max_bound_violation: f64,
    pub steps: u64,
    pub entropy: Option<EntropyReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketReport {
    pub r: usize,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub m_r: f64,
    /// `2 (α⁺ - α⁻)`.
    pub bound: f64,
    pub final_norm: f64,
    pub max_order_violation: f64,
    pub upper: Vec<NormSample>,
    pub lower: Vec<NormSample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StefanDetails {
    pub alpha: f64,
    pub n_y: usize,
    pub steps: usize,
    pub mass_balance: MassBalance,
    pub refined_mass_balance: Option<MassBalance>,
    pub jump: JumpReport,
    pub refined_rh_residual: Option<f64>,
    pub decay: DecayReport,
    /// `max_k |mean u(t_k) - mean u(0)|` of the assembled solution.
    pub assembled_mean_drift: f64,
    pub nondecay: Option<NonDecayReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub config_hash: String,
    pub mean: f64,
    pub condition: Option<ConditionReport>,
    pub samples: Vec<NormSample>,
    pub invariants: Option<InvariantSummary>,
    pub verdict: Option<Verdict>,
    pub warnings: Vec<String>,
    pub rules: Vec<RuleResult>,
    pub bracket: Option<BracketReport>,
    pub stefan: Option<StefanDetails>,
    pub passed: bool,
}

impl Report {
    pub(crate) fn new(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Report {
            scenario: cfg.scenario,
            config_hash: cfg.hash()?,
            mean: cfg.mean,
            condition: None,
            samples: Vec::new(),
            invariants: None,
            verdict: None,
            warnings: Vec::new(),
            rules: Vec::new(),
            bracket: None,
            stefan: None,
            passed: false,
        })
    }

    pub(crate) fn finish(mut self) -> Self {
        self.passed = self.rules.iter().all(|r| r.passed);
        self
    }

    pub fn rule(&self, name: &str) -> Option<&RuleResult> {
        self.rules.iter().find(|r| r.rule == name)
    }

    pub fn failed_rules(&self) -> Vec<&RuleResult> {
        self.rules.iter().filter(|r| !r.passed).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub artifact: &'static str,
    pub version: &'static str,
    pub scenario: Scenario,
    pub config_hash: String,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub files: Vec<String>,
}

pub fn tolerances(cfg: &ExperimentConfig) -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("harness.conservation", CONSERVATION_TOL),
        ("harness.bound_violation", BOUND_VIOLATION_TOL),
        ("harness.order", ORDER_TOL),
        ("harness.decay_fraction", cfg.decay_fraction),
        ("lattice.membership", crate::lattice::MEMBERSHIP_TOL),
        ("solver.entropy_per_length", ENTROPY_TOL_PER_LENGTH),
        ("solver.cfl", crate::solver::DEFAULT_CFL),
        ("stefan.mass_balance", MASS_BALANCE_TOL),
        ("stefan.assembled_mean", super::run::ASSEMBLED_MEAN_TOL),
        ("stefan.rh_fraction", RH_TOL_FRACTION),
        ("stefan.equivalence", EQUIVALENCE_TOL),
        ("stefan.fit_rms", MAX_FIT_RMS),
    ])
}

/// Writes `config.toml`, `report.json`, `norms.csv`, any `extra` files and
/// `manifest.json` into `dir`.
pub fn write_experiment_dir(
    dir: &Path,
    cfg: &ExperimentConfig,
    report: &Report,
    extra: &[(&str, String)],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<()> {
        fs::write(dir.join(name), text)?;
        files.push(name.to_string());
        Ok(())
    };
    put("config.toml", &cfg.to_toml()?)?;
    put("report.json", &report.to_json()?)?;
    put("norms.csv", &norms_csv(&report.samples))?;
    for (name, text) in extra {
        put(name, text)?;
    }
    let manifest = Manifest {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: cfg.scenario,
        config_hash: cfg.hash()?,
        tolerances: tolerances(cfg),
        files,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}
