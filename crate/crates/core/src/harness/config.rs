use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{build_exactness_data, Domain, GridFn};
use crate::model::ModelConfig;
use crate::solver::{SolverConfig, TestFunction};
use crate::stefan::StefanConfig;

/// Environment variable naming the directory relative output paths live in.
pub const OUTPUT_ROOT_ENV: &str = "DECAYLAB_OUTPUT_ROOT";
pub const DEFAULT_DECAY_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Decay,
    Bracketing,
    Stefan,
    Condition,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Decay => "decay",
            Scenario::Bracketing => "bracketing",
            Scenario::Stefan => "stefan",
            Scenario::Condition => "condition",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub x_lo: f64,
    pub length: f64,
}

impl DomainConfig {
    pub fn domain(&self) -> Result<Domain> {
        if !(self.length > 0.0 && self.length.is_finite() && self.x_lo.is_finite()) {
            return Err(Error::Config(format!("bad domain {self:?}")));
        }
        Ok(Domain::periodic(self.x_lo, self.length))
    }
}

/// `height (1 - s²)²` with `s = (x - center) / half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub height: f64,
    pub center: f64,
    pub half_width: f64,
}

impl BumpConfig {
    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.half_width;
        if s.abs() < 1.0 {
            self.height * (1.0 - s * s).powi(2)
        } else {
            0.0
        }
    }
}

/// Constant `value` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxPerturbation {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl BoxPerturbation {
    pub fn grid(&self, domain: Domain, n: usize) -> Result<GridFn> {
        GridFn::from_cell_average(domain, n, |x| {
            if (self.lo..self.hi).contains(&x) {
                self.value
            } else {
                0.0
            }
        })
    }
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialRecipe {
    /// `m + amplitude sin(2π waves (x - x_lo) / L)`.
    Periodic {
        amplitude: f64,
        #[serde(default = "one")]
        waves: u32,
    },
    /// The periodic profile plus a compact bump.
    Perturbed {
        amplitude: f64,
        #[serde(default = "one")]
        waves: u32,
        bump: BumpConfig,
    },
    /// `m + (δ/2) sin(2π ξ x / r)`.
    Exactness { delta: f64, xi: f64, r_period: f64 },
    /// The assembled Stefan solution at `t = 0`, optionally plus a box.
    Stefan {
        #[serde(default)]
        perturbation: Option<BoxPerturbation>,
    },
}

impl InitialRecipe {
    /// True when the data carry no compactly supported perturbation.
    pub fn is_purely_periodic(&self) -> bool {
        match self {
            InitialRecipe::Periodic { .. } | InitialRecipe::Exactness { .. } => true,
            InitialRecipe::Perturbed { .. } => false,
            InitialRecipe::Stefan { perturbation } => perturbation.is_none(),
        }
    }

    /// Period of the periodic part, when it has a simple one.
    pub fn period(&self, length: f64) -> Option<f64> {
        match self {
            InitialRecipe::Periodic { waves, .. } | InitialRecipe::Perturbed { waves, .. } => {
                Some(length / *waves as f64)
            }
            InitialRecipe::Exactness { xi, r_period, .. } => Some(r_period / xi.abs()),
            InitialRecipe::Stefan { .. } => Some(crate::stefan::PERIOD),
        }
    }

    /// Periodic part `p` on the grid (not available for Stefan data, which
    /// need the construction).
    pub fn periodic_part(&self, mean: f64, domain: Domain, n: usize) -> Result<GridFn> {
        let wave = |amplitude: f64, waves: u32| {
            let (x0, len) = (domain.x_lo(), domain.length());
            GridFn::from_cell_average(domain, n, move |x| {
                mean + amplitude * (2.0 * PI * waves as f64 * (x - x0) / len).sin()
            })
        };
        match *self {
            InitialRecipe::Periodic { amplitude, waves }
            | InitialRecipe::Perturbed {
                amplitude, waves, ..
            } => wave(amplitude, waves),
            InitialRecipe::Exactness {
                delta,
                xi,
                r_period,
            } => build_exactness_data(mean, delta, None, xi, r_period, domain, n),
            InitialRecipe::Stefan { .. } => Err(Error::Config(
                "Stefan data come from the construction".into(),
            )),
        }
    }

    /// The compact perturbation `v` on the grid (zero for periodic recipes).
    pub fn perturbation(&self, domain: Domain, n: usize) -> Result<GridFn> {
        match self {
            InitialRecipe::Perturbed { bump, .. } => {
                GridFn::from_cell_average(domain, n, |x| bump.eval(x))
            }
            InitialRecipe::Stefan {
                perturbation: Some(b),
            } => b.grid(domain, n),
            _ => GridFn::zeros(domain, n),
        }
    }
}

/// Entropy test functions: `ks` against every `(center, half_width)` bump in
/// space on each output interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    pub ks: Vec<f64>,
    pub windows: Vec<[f64; 2]>,
}

impl EntropyConfig {
    /// Test functions in interval-major order: index `j·windows + s`.
    pub fn tests(&self, sample_times: &[f64]) -> Vec<TestFunction> {
        let mut out = Vec::new();
        for w in sample_times.windows(2) {
            for &[c, h] in &self.windows {
                out.push(TestFunction::new(w[0], w[1], c, h));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketingConfig {
    pub r: usize,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonDecayConfig {
    pub perturbation: BoxPerturbation,
    /// Number of 5-periods in the periodic grid starting at `-5/2`.
    pub periods: usize,
    pub solver: SolverConfig,
}

fn default_n_x() -> usize {
    400
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StefanSection {
    #[serde(default)]
    pub fixed: StefanConfig,
    /// Cells per period for the assembled snapshots.
    #[serde(default = "default_n_x")]
    pub n_x: usize,
    /// Repeat the construction with `n_y` and every time step refined by 2.
    #[serde(default)]
    pub refinement: bool,
    #[serde(default)]
    pub nondecay: Option<NonDecayConfig>,
}

impl Default for StefanSection {
    fn default() -> Self {
        StefanSection {
            fixed: StefanConfig::default(),
            n_x: default_n_x(),
            refinement: false,
            nondecay: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Decay,
    NonDecay,
}

fn decay_fraction() -> f64 {
    DEFAULT_DECAY_FRACTION
}

fn unit_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub mean: f64,
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub initial: Option<InitialRecipe>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default = "decay_fraction")]
    pub decay_fraction: f64,
    /// Ball radius of the Stepanov norm.
    #[serde(default = "unit_radius")]
    pub norm_radius: f64,
    #[serde(default)]
    pub expect: Option<Verdict>,
    #[serde(default)]
    pub entropy: Option<EntropyConfig>,
    #[serde(default)]
    pub bracketing: Option<BracketingConfig>,
    #[serde(default)]
    pub stefan: Option<StefanSection>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        ExperimentConfig {
            scenario,
            model: ModelConfig::default(),
            mean: 0.0,
            domain: None,
            initial: None,
            solver: None,
            decay_fraction: DEFAULT_DECAY_FRACTION,
            norm_radius: 1.0,
            expect: None,
            entropy: None,
            bracketing: None,
            stefan: None,
            output_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// SHA-256 of the JSON serialization, hex encoded.
    pub fn hash(&self) -> Result<String> {
        let text = serde_json::to_string(self)?;
        Ok(format!("{:x}", Sha256::digest(text.as_bytes())))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.decay_fraction > 0.0) || !(self.norm_radius > 0.0) || !self.mean.is_finite() {
            return Err(Error::Config(
                "decay_fraction and norm_radius must be positive".into(),
            ));
        }
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "scenario {} needs {what}",
                    self.scenario.as_str()
                )))
            }
        };
        match self.scenario {
            Scenario::Decay | Scenario::Bracketing => {
                need(self.domain.is_some(), "[domain]")?;
                need(self.initial.is_some(), "[initial]")?;
                need(self.solver.is_some(), "[solver]")?;
                if let Some(InitialRecipe::Stefan { .. }) = self.initial {
                    need(self.stefan.is_some(), "[stefan]")?;
                }
                if self.scenario == Scenario::Bracketing {
                    need(self.bracketing.is_some(), "[bracketing]")?;
                }
                self.solver.as_ref().unwrap().validate()?;
            }
            Scenario::Stefan => {
                let s = self.stefan.clone().unwrap_or_default();
                s.fixed.validate()?;
                if let Some(nd) = &s.nondecay {
                    nd.solver.validate()?;
                }
            }
            Scenario::Condition => {}
        }
        Ok(())
    }

    /// `output_dir` resolved against `$DECAYLAB_OUTPUT_ROOT` when relative.
    pub fn resolved_output_dir(&self) -> Option<PathBuf> {
        let dir = self.output_dir.as_ref()?;
        if dir.is_absolute() {
            return Some(dir.clone());
        }
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) => Some(PathBuf::from(root).join(dir)),
            None => Some(dir.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BURGERS: &str = r#"
scenario = "decay"
mean = 0.0
model = { preset = "burgers" }
domain = { x_lo = 0.0, length = 2.0 }
initial = { kind = "perturbed", amplitude = 0.5, bump = { height = 0.3, center = 1.0, half_width = 0.25 } }
solver = { n = 200, t_end = 4.0 }
"#;

    #[test]
    fn parses_and_roundtrips() {
        let cfg = ExperimentConfig::from_toml(BURGERS).unwrap();
        assert_eq!(cfg.scenario, Scenario::Decay);
        assert_eq!(cfg.decay_fraction, 0.05);
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());
    }

    #[test]
    fn rejects_unknown_scenario_and_fields() {
        let bad = BURGERS.replace("\"decay\"", "\"wave\"");
        assert!(matches!(
            ExperimentConfig::from_toml(&bad),
            Err(Error::Parse(_))
        ));
        let extra = format!("{BURGERS}\ncolour = 1\n");
        assert!(ExperimentConfig::from_toml(&extra).is_err());
    }

    #[test]
    fn missing_sections() {
        let cfg = "scenario = \"decay\"\nmodel = { preset = \"burgers\" }\n";
        assert!(matches!(
            ExperimentConfig::from_toml(cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn recipe_pieces() {
        let cfg = ExperimentConfig::from_toml(BURGERS).unwrap();
        let r = cfg.initial.unwrap();
        let d = Domain::periodic(0.0, 2.0);
        let p = r.periodic_part(0.0, d, 200).unwrap();
        assert!(p.mean().unwrap().abs() < 1e-14);
        let v = r.perturbation(d, 200).unwrap();
        assert!((v.max() - 0.3).abs() < 1e-3 && v.min() == 0.0);
        assert!(!r.is_purely_periodic());
        assert_eq!(r.period(2.0), Some(2.0));
    }
}
