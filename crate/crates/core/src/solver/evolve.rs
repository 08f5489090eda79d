use std::fs;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::entropy::{EntropyMonitor, EntropyReport, TestFunction};
use super::scheme::{check_in_range, check_periodic, ConvectionFlux, Scheme, Stepper, BOUND_TOL};
use crate::error::{Error, Result};
use crate::field::GridFn;
use crate::model::{ModelConfig, ModelSpec};

pub const DEFAULT_CFL: f64 = 0.45;

fn default_cfl() -> f64 {
    DEFAULT_CFL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    /// Sample instants in `(0, t_end]`; the initial state and `t_end` are
    /// always sampled.
    #[serde(default)]
    pub output_times: Vec<f64>,
    #[serde(default)]
    pub convection_flux: ConvectionFlux,
}

impl SolverConfig {
    pub fn new(n: usize, t_end: f64) -> Self {
        SolverConfig {
            n,
            cfl: DEFAULT_CFL,
            t_end,
            output_times: Vec::new(),
            convection_flux: ConvectionFlux::default(),
        }
    }

    /// `count` equally spaced samples ending at `t_end`.
    pub fn with_uniform_outputs(mut self, count: usize) -> Self {
        self.output_times = (1..=count)
            .map(|j| self.t_end * j as f64 / count as f64)
            .collect();
        self
    }

    pub fn with_output_times(mut self, times: Vec<f64>) -> Self {
        self.output_times = times;
        self
    }

    pub fn with_flux(mut self, kind: ConvectionFlux) -> Self {
        self.convection_flux = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!(
                "need at least 2 cells, got {}",
                self.n
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl {} outside (0, 1]", self.cfl)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("invalid t_end {}", self.t_end)));
        }
        if self.output_times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config(
                "output_times must be strictly increasing".into(),
            ));
        }
        if let Some(&t) = self
            .output_times
            .iter()
            .find(|&&t| !(t >= 0.0 && t <= self.t_end))
        {
            return Err(Error::Config(format!("output time {t} outside [0, t_end]")));
        }
        Ok(())
    }

    fn sample_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .output_times
            .iter()
            .copied()
            .filter(|&t| t > 0.0)
            .collect();
        if ts.last().map_or(true, |&t| t < self.t_end) && self.t_end > 0.0 {
            ts.push(self.t_end);
        }
        ts
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub time: f64,
    pub mass: f64,
    /// `|mass(t) - mass(0)| / ‖u0‖₁` (absolute when `u0 = 0`).
    pub mass_drift: f64,
    pub min: f64,
    pub max: f64,
    /// Largest excursion beyond `[min u0, max u0]` so far.
    pub bound_violation: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridFn>,
    pub model: ModelSpec,
    pub config: SolverConfig,
    /// Run-length encoded `(dt, repeat count)`.
    pub dt_history: Vec<(f64, u64)>,
    pub log: Vec<InvariantRecord>,
    pub steps: u64,
}

impl Trajectory {
    pub fn initial(&self) -> &GridFn {
        &self.states[0]
    }

    pub fn last(&self) -> &GridFn {
        self.states.last().unwrap()
    }

    pub fn max_mass_drift(&self) -> f64 {
        self.log.iter().map(|r| r.mass_drift).fold(0.0, f64::max)
    }

    pub fn max_bound_violation(&self) -> f64 {
        self.log
            .iter()
            .map(|r| r.bound_violation)
            .fold(0.0, f64::max)
    }

    /// One `x,value` CSV per sample, `samples.csv` and `manifest.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut index = String::from("index,time,file\n");
        for (i, (t, u)) in self.times.iter().zip(&self.states).enumerate() {
            let name = format!("u_{i:04}.csv");
            u.write_csv(BufWriter::new(fs::File::create(dir.join(&name))?))?;
            index.push_str(&format!("{i},{t},{name}\n"));
        }
        fs::write(dir.join("samples.csv"), index)?;
        let manifest = TrajectoryManifest {
            model: self.model.to_config(),
            model_hash: model_hash(&self.model)?,
            config: self.config.clone(),
            domain: *self.states[0].domain(),
            steps: self.steps,
            dt_history: self.dt_history.clone(),
            invariants: self.log.clone(),
        };
        fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub model: ModelConfig,
    pub model_hash: String,
    pub config: SolverConfig,
    pub domain: crate::field::Domain,
    pub steps: u64,
    pub dt_history: Vec<(f64, u64)>,
    pub invariants: Vec<InvariantRecord>,
}

/// SHA-256 of the model's config serialization, hex encoded.
pub fn model_hash(model: &ModelSpec) -> Result<String> {
    let text = serde_json::to_string(&model.to_config())?;
    Ok(format!("{:x}", Sha256::digest(text.as_bytes())))
}

pub fn evolve(u0: &GridFn, model: &ModelSpec, cfg: &SolverConfig) -> Result<Trajectory> {
    evolve_monitored(u0, model, cfg, None)
}

/// Evolution with an optional entropy observer fed every step.
pub fn evolve_monitored(
    u0: &GridFn,
    model: &ModelSpec,
    cfg: &SolverConfig,
    mut monitor: Option<&mut EntropyMonitor>,
) -> Result<Trajectory> {
    cfg.validate()?;
    check_periodic(u0)?;
    check_in_range(u0, model)?;
    if u0.len() != cfg.n {
        return Err(Error::Shape(format!(
            "initial data has {} cells, config expects {}",
            u0.len(),
            cfg.n
        )));
    }
    let (lo0, hi0) = (u0.min(), u0.max());
    // bounds over the model range, so runs of one model share their time grid
    let scheme = Scheme::new(model, cfg.convection_flux, model.range())?;
    let dx = u0.dx();
    let dt_stable = scheme.stable_dt(dx, cfg.cfl);
    let mut stepper = Stepper::new(scheme);
    let domain = *u0.domain();

    let mass0 = u0.integral();
    let scale = match u0.l1_norm() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let record = |t: f64, u: &GridFn, violation: f64| InvariantRecord {
        time: t,
        mass: u.integral(),
        mass_drift: (u.integral() - mass0).abs() / scale,
        min: u.min(),
        max: u.max(),
        bound_violation: violation,
    };

    let mut tr = Trajectory {
        times: vec![0.0],
        states: vec![u0.clone()],
        model: model.clone(),
        config: cfg.clone(),
        dt_history: Vec::new(),
        log: vec![record(0.0, u0, 0.0)],
        steps: 0,
    };
    let mut cur = u0.values().to_vec();
    let mut next = vec![0.0; cur.len()];
    let mut t = 0.0;
    let mut violation: f64 = 0.0;
    for target in cfg.sample_times() {
        while t < target {
            let remaining = target - t;
            let (dt, last) = if remaining <= dt_stable * (1.0 + 1e-9) {
                (remaining, true)
            } else {
                (dt_stable, false)
            };
            let (lo, hi) = stepper.step_into(&cur, dx, dt, &mut next);
            violation = violation.max(lo0 - lo).max(hi - hi0);
            if violation > BOUND_TOL {
                let cell = next
                    .iter()
                    .position(|&v| v < lo0 - BOUND_TOL || v > hi0 + BOUND_TOL)
                    .unwrap_or(0);
                return Err(Error::Monotonicity {
                    value: next[cell],
                    lo: lo0,
                    hi: hi0,
                    cell,
                });
            }
            if let Some(m) = monitor.as_deref_mut() {
                m.observe(stepper.scheme(), &domain, &cur, &next, t, dt);
            }
            std::mem::swap(&mut cur, &mut next);
            t = if last { target } else { t + dt };
            tr.steps += 1;
            match tr.dt_history.last_mut() {
                Some((d, c)) if *d == dt => *c += 1,
                _ => tr.dt_history.push((dt, 1)),
            }
        }
        let state = u0.with_values(cur.clone())?;
        tr.log.push(record(target, &state, violation));
        tr.times.push(target);
        tr.states.push(state);
    }
    log::debug!("evolved {} steps to t = {}", tr.steps, cfg.t_end);
    Ok(tr)
}

/// Replays the run behind `tr` with an entropy monitor.
pub fn entropy_residual(
    tr: &Trajectory,
    ks: &[f64],
    tests: &[TestFunction],
) -> Result<EntropyReport> {
    let mut monitor = EntropyMonitor::new(ks.to_vec(), tests.to_vec())?;
    evolve_monitored(tr.initial(), &tr.model, &tr.config, Some(&mut monitor))?;
    Ok(monitor.report())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialOrder {
    Equal,
    FirstBelow,
    FirstAbove,
    Unordered,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub initial_order: InitialOrder,
    /// Largest violation of the initial ordering over all samples.
    pub max_order_violation: f64,
    pub order_preserved: bool,
    pub l1_distances: Vec<f64>,
    pub l1_nonincreasing: bool,
}

/// Ordering and `L¹` distance of two runs on the same grid and sample times.
pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<ComparisonReport> {
    if a.times.len() != b.times.len()
        || a.times
            .iter()
            .zip(&b.times)
            .any(|(s, t)| (s - t).abs() > 1e-12 * t.abs().max(1.0))
    {
        return Err(Error::Shape(
            "trajectories sampled at different times".into(),
        ));
    }
    if !a.initial().same_grid(b.initial()) {
        return Err(Error::Shape("trajectories live on different grids".into()));
    }
    let (ua, ub) = (a.initial().values(), b.initial().values());
    let initial_order = if ua == ub {
        InitialOrder::Equal
    } else if ua.iter().zip(ub).all(|(x, y)| x <= y) {
        InitialOrder::FirstBelow
    } else if ua.iter().zip(ub).all(|(x, y)| x >= y) {
        InitialOrder::FirstAbove
    } else {
        InitialOrder::Unordered
    };
    let mut max_order_violation: f64 = 0.0;
    let mut l1_distances = Vec::with_capacity(a.states.len());
    for (sa, sb) in a.states.iter().zip(&b.states) {
        let violation = sa
            .values()
            .iter()
            .zip(sb.values())
            .map(|(x, y)| match initial_order {
                InitialOrder::Equal => (x - y).abs(),
                InitialOrder::FirstBelow => x - y,
                InitialOrder::FirstAbove => y - x,
                InitialOrder::Unordered => 0.0,
            })
            .fold(0.0, f64::max);
        max_order_violation = max_order_violation.max(violation);
        l1_distances.push(sa.l1_distance(sb)?);
    }
    // rounding allowance of the explicit updates
    let scale = a.initial().l1_norm() + b.initial().l1_norm();
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let vtol = 1e-12 * (a.initial().sup_norm() + b.initial().sup_norm()).max(f64::MIN_POSITIVE);
    Ok(ComparisonReport {
        initial_order,
        order_preserved: max_order_violation <= vtol,
        max_order_violation,
        l1_nonincreasing: l1_distances.windows(2).all(|w| w[1] <= w[0] + tol),
        l1_distances,
    })
}
