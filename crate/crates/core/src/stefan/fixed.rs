//! Heat equation in the expanding interval `|x| < r(t)`, solved in the fixed
//! variable `y = x / r(t)`:
//! `v_t = v_yy / r² + (r'/r) y v_y`, `v(t, ±1) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `r(t) = 2 - e^{-αt}`. With `α = 0` the interval stays `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovingBoundary {
    pub alpha: f64,
}

impl MovingBoundary {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Contract(format!("α = {alpha} must be nonnegative")));
        }
        Ok(MovingBoundary { alpha })
    }

    pub fn r(&self, t: f64) -> f64 {
        2.0 - (-self.alpha * t).exp()
    }

    pub fn r_prime(&self, t: f64) -> f64 {
        self.alpha * (-self.alpha * t).exp()
    }

    pub fn r_second(&self, t: f64) -> f64 {
        -self.alpha * self.alpha * (-self.alpha * t).exp()
    }

    /// Time at which the front reaches `x ∈ [1, 2)`.
    pub fn time_of(&self, x: f64) -> f64 {
        -(2.0 - x).ln() / self.alpha
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StefanConfig {
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default = "defaults::n_y")]
    pub n_y: usize,
    /// Defaults to `80 / α`.
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Start of the fit window; defaults to `5 / α`.
    #[serde(default)]
    pub t_burn: Option<f64>,
    /// Height `h` of the default profile `h (1 - y²)³`.
    #[serde(default = "defaults::amplitude")]
    pub amplitude: f64,
    #[serde(default = "defaults::dt_initial")]
    pub dt_initial: f64,
    #[serde(default = "defaults::dt_max")]
    pub dt_max: f64,
    #[serde(default = "defaults::dt_growth")]
    pub dt_growth: f64,
    #[serde(default = "defaults::sample_interval")]
    pub sample_interval: f64,
    #[serde(default)]
    pub time_scheme: TimeScheme,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScheme {
    ImplicitEuler,
    #[default]
    Bdf2,
}

mod defaults {
    pub fn alpha() -> f64 {
        0.05
    }
    pub fn n_y() -> usize {
        400
    }
    pub fn amplitude() -> f64 {
        0.5
    }
    pub fn dt_initial() -> f64 {
        1e-3
    }
    pub fn dt_max() -> f64 {
        1e-2
    }
    pub fn dt_growth() -> f64 {
        1.01
    }
    pub fn sample_interval() -> f64 {
        1.0
    }
}

impl Default for StefanConfig {
    fn default() -> Self {
        StefanConfig {
            alpha: defaults::alpha(),
            n_y: defaults::n_y(),
            t_end: None,
            t_burn: None,
            amplitude: defaults::amplitude(),
            dt_initial: defaults::dt_initial(),
            dt_max: defaults::dt_max(),
            dt_growth: defaults::dt_growth(),
            sample_interval: defaults::sample_interval(),
            time_scheme: TimeScheme::default(),
        }
    }
}

impl StefanConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        StefanConfig {
            alpha,
            ..Default::default()
        }
    }

    pub fn t_end(&self) -> Result<f64> {
        match self.t_end {
            Some(t) => Ok(t),
            None if self.alpha > 0.0 => Ok(80.0 / self.alpha),
            None => Err(Error::Config("t_end is required when α = 0".into())),
        }
    }

    pub fn t_burn(&self) -> f64 {
        match self.t_burn {
            Some(t) => t,
            None if self.alpha > 0.0 => 5.0 / self.alpha,
            None => 1.0,
        }
    }

    /// Doubles `n_y` and halves every time step. In the graded phase
    /// `dt ≈ (growth - 1) t`, so the growth excess is halved too.
    pub fn refined(&self) -> Self {
        StefanConfig {
            n_y: 2 * self.n_y,
            dt_initial: 0.5 * self.dt_initial,
            dt_max: 0.5 * self.dt_max,
            dt_growth: 1.0 + 0.5 * (self.dt_growth - 1.0),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        MovingBoundary::new(self.alpha)?;
        let t_end = self.t_end()?;
        if self.n_y < 4 || self.n_y % 2 != 0 {
            return Err(Error::Config(format!(
                "n_y = {} must be even and ≥ 4",
                self.n_y
            )));
        }
        if !(t_end > 0.0) || !(self.sample_interval > 0.0) {
            return Err(Error::Config(
                "t_end and sample_interval must be positive".into(),
            ));
        }
        if !(self.dt_initial > 0.0 && self.dt_max >= self.dt_initial && self.dt_growth >= 1.0) {
            return Err(Error::Config(
                "need 0 < dt_initial ≤ dt_max and growth ≥ 1".into(),
            ));
        }
        Ok(())
    }

    /// Node values of `h (1 - y²)³`.
    pub fn default_profile(&self) -> Vec<f64> {
        let h = 2.0 / self.n_y as f64;
        (0..=self.n_y)
            .map(|j| {
                let y = -1.0 + j as f64 * h;
                let s = 1.0 - y * y;
                if j == 0 || j == self.n_y {
                    0.0
                } else {
                    self.amplitude * s * s * s
                }
            })
            .collect()
    }
}

/// Boundary data recorded after every time step.
#[derive(Debug, Clone, Default)]
pub struct BoundarySeries {
    pub t: Vec<f64>,
    /// `v_y(t, 1)`, second-order one-sided.
    pub w_right: Vec<f64>,
    /// `v_y(t, -1)`, second-order one-sided.
    pub w_left: Vec<f64>,
    /// `v_y(t, 1)`, first-order one-sided.
    pub w_right_first: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FixedDomainRun {
    pub boundary: MovingBoundary,
    pub config: StefanConfig,
    /// Node spacing `2 / n_y`.
    pub h: f64,
    /// Sample times (multiples of the sample interval, plus `t_end`).
    pub times: Vec<f64>,
    /// Node values on `y_j = -1 + j h` at each sample time.
    pub states: Vec<Vec<f64>>,
    pub series: BoundarySeries,
    pub steps: usize,
}

impl FixedDomainRun {
    pub fn phi0(&self) -> &[f64] {
        &self.states[0]
    }

    pub fn n_y(&self) -> usize {
        self.states[0].len() - 1
    }

    pub fn y(&self, j: usize) -> f64 {
        -1.0 + j as f64 * self.h
    }

    /// Linear interpolation of sample `k` at `y ∈ [-1, 1]`.
    pub fn v_at(&self, k: usize, y: f64) -> f64 {
        let v = &self.states[k];
        let s = ((y + 1.0) / self.h).clamp(0.0, (v.len() - 1) as f64);
        let j = (s.floor() as usize).min(v.len() - 2);
        let f = s - j as f64;
        (1.0 - f) * v[j] + f * v[j + 1]
    }

    pub fn sup(&self, k: usize) -> f64 {
        self.states[k].iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    /// `v_y(t_k, ±1)` (second order) at a sample.
    pub fn boundary_slopes(&self, k: usize) -> (f64, f64) {
        slopes(&self.states[k], self.h)
    }

    /// `∫ v_yy² dy + r r' Σ_{±1} v_y²` at a sample; `v_yy` at the ends is
    /// taken from the boundary relation `v_yy = -r r' y v_y`.
    pub fn energy(&self, k: usize) -> f64 {
        let t = self.times[k];
        let (r, rp) = (self.boundary.r(t), self.boundary.r_prime(t));
        let v = &self.states[k];
        let n = v.len() - 1;
        let h = self.h;
        let (wl, wr) = self.boundary_slopes(k);
        let p = |j: usize| -> f64 {
            if j == 0 {
                r * rp * wl
            } else if j == n {
                -r * rp * wr
            } else {
                (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h)
            }
        };
        let mut integral = 0.0;
        for j in 0..n {
            integral += 0.5 * h * (p(j) * p(j) + p(j + 1) * p(j + 1));
        }
        integral + r * rp * (wl * wl + wr * wr)
    }

    /// `max_j |v(y_j) - v(-y_j)|` at a sample.
    pub fn asymmetry(&self, k: usize) -> f64 {
        let v = &self.states[k];
        let n = v.len() - 1;
        (0..=n / 2)
            .map(|j| (v[j] - v[n - j]).abs())
            .fold(0.0, f64::max)
    }

    /// `v_y(t, 0)` and the discrete check `v_y(t, 1)² ≤ ∫_0^1 v_yy² dy` (up to
    /// a 1% quadrature allowance).
    pub fn jensen_check(&self, k: usize) -> (f64, bool) {
        let v = &self.states[k];
        let n = v.len() - 1;
        let h = self.h;
        let mid = n / 2;
        let w0 = (v[mid + 1] - v[mid - 1]) / (2.0 * h);
        let mut int = 0.0;
        for j in mid..n {
            let p = |j: usize| {
                if j == 0 || j == n {
                    0.0
                } else {
                    (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h)
                }
            };
            int += 0.5 * h * (p(j).powi(2) + p(j + 1).powi(2));
        }
        let (_, wr) = self.boundary_slopes(k);
        (w0, wr * wr <= 1.01 * int + f64::MIN_POSITIVE)
    }
}

fn slopes(v: &[f64], h: f64) -> (f64, f64) {
    let n = v.len() - 1;
    let wl = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    let wr = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    (wl, wr)
}

/// Solves `a_j x_{j-1} + b_j x_j + c_j x_{j+1} = d_j` in place of `d`.
fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64], scratch: &mut Vec<f64>) {
    let n = d.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut beta = b[0];
    d[0] /= beta;
    for i in 1..n {
        scratch[i] = c[i - 1] / beta;
        beta = b[i] - a[i] * scratch[i];
        d[i] = (d[i] - a[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= scratch[i + 1] * d[i + 1];
    }
}

/// BDF2 (or implicit Euler) in time with steps growing geometrically from
/// `dt_initial` to `dt_max`; centred differences in `y`. Both are L-stable, so
/// stiff modes are damped instead of ringing through the long-time fits.
pub fn solve_fixed_domain(phi0: &[f64], cfg: &StefanConfig) -> Result<FixedDomainRun> {
    cfg.validate()?;
    let n = cfg.n_y;
    if phi0.len() != n + 1 {
        return Err(Error::Shape(format!(
            "profile has {} nodes, expected {}",
            phi0.len(),
            n + 1
        )));
    }
    let scale = phi0.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if phi0.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::Contract(
            "initial profile must be nonnegative".into(),
        ));
    }
    if phi0[0] != 0.0 || phi0[n] != 0.0 {
        return Err(Error::Contract(
            "initial profile must vanish at y = ±1".into(),
        ));
    }
    if (0..=n).any(|j| (phi0[j] - phi0[n - j]).abs() > 1e-12 * scale) {
        return Err(Error::Contract("initial profile must be even".into()));
    }
    let boundary = MovingBoundary::new(cfg.alpha)?;
    let t_end = cfg.t_end()?;
    let h = 2.0 / n as f64;

    let mut targets: Vec<f64> = (1..)
        .map(|k| k as f64 * cfg.sample_interval)
        .take_while(|&t| t < t_end * (1.0 - 1e-12))
        .collect();
    targets.push(t_end);

    let mut run = FixedDomainRun {
        boundary,
        config: cfg.clone(),
        h,
        times: vec![0.0],
        states: vec![phi0.to_vec()],
        series: BoundarySeries::default(),
        steps: 0,
    };
    let record = |series: &mut BoundarySeries, t: f64, v: &[f64]| {
        let (wl, wr) = slopes(v, h);
        series.t.push(t);
        series.w_left.push(wl);
        series.w_right.push(wr);
        series.w_right_first.push((v[n] - v[n - 1]) / h);
    };
    record(&mut run.series, 0.0, phi0);

    let m = n - 1;
    let (mut a, mut b, mut c) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut scratch = Vec::new();
    let mut v = phi0.to_vec();
    let mut rhs = vec![0.0; m];
    let mut prev: Option<(Vec<f64>, f64)> = None;
    let mut t = 0.0;
    let mut dt_nominal = cfg.dt_initial;
    for target in targets {
        while t < target {
            let (dt, last) = if target - t <= dt_nominal * (1.0 + 1e-9) {
                (target - t, true)
            } else {
                (dt_nominal, false)
            };
            let t1 = if last { target } else { t + dt };
            let r = boundary.r(t1);
            let drift = boundary.r_prime(t1) / r;
            let diff = 1.0 / (r * r * h * h);
            // Variable-step BDF2 with ratio ω = dt / dt_prev; implicit Euler first.
            let (c0, c1, c2) = match (&prev, cfg.time_scheme) {
                (Some((_, dt_prev)), TimeScheme::Bdf2) => {
                    let w = dt / dt_prev;
                    ((1.0 + 2.0 * w) / (1.0 + w), 1.0 + w, w * w / (1.0 + w))
                }
                _ => (1.0, 1.0, 0.0),
            };
            for i in 0..m {
                let y = -1.0 + (i + 1) as f64 * h;
                let cj = drift * y / (2.0 * h);
                a[i] = -dt * (diff - cj);
                b[i] = c0 + 2.0 * dt * diff;
                c[i] = -dt * (diff + cj);
                rhs[i] = c1 * v[i + 1];
            }
            if let Some((vp, _)) = &prev {
                if c2 != 0.0 {
                    for i in 0..m {
                        rhs[i] -= c2 * vp[i + 1];
                    }
                }
            }
            thomas(&a, &b, &c, &mut rhs, &mut scratch);
            match &mut prev {
                Some((vp, dp)) => {
                    vp.copy_from_slice(&v);
                    *dp = dt;
                }
                None => prev = Some((v.clone(), dt)),
            }
            v[1..n].copy_from_slice(&rhs);
            t = t1;
            run.steps += 1;
            record(&mut run.series, t, &v);
            dt_nominal = (dt_nominal * cfg.dt_growth).min(cfg.dt_max);
        }
        run.times.push(target);
        run.states.push(v.clone());
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_shape() {
        let b = MovingBoundary::new(0.05).unwrap();
        assert_eq!(b.r(0.0), 1.0);
        for t in [0.0, 1.0, 100.0] {
            assert!(b.r(t) >= 1.0 && b.r(t) < 2.0);
            assert!(b.r_prime(t) > 0.0 && b.r_second(t) < 0.0);
        }
        assert!((b.time_of(b.r(7.0)) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn thomas_solves() {
        let a = [0.0, -1.0, -1.0];
        let b = [2.0, 2.0, 2.0];
        let c = [-1.0, -1.0, 0.0];
        let mut d = [1.0, 0.0, 1.0];
        thomas(&a, &b, &c, &mut d, &mut Vec::new());
        for x in d {
            assert!((x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_profile_stays_zero() {
        let cfg = StefanConfig {
            t_end: Some(2.0),
            n_y: 40,
            ..Default::default()
        };
        let run = solve_fixed_domain(&vec![0.0; 41], &cfg).unwrap();
        assert!(run.states.iter().all(|s| s.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn initial_sample_is_profile() {
        let cfg = StefanConfig {
            t_end: Some(1.0),
            n_y: 40,
            ..Default::default()
        };
        let phi0 = cfg.default_profile();
        let run = solve_fixed_domain(&phi0, &cfg).unwrap();
        assert_eq!(run.states[0], phi0);
        assert_eq!(run.times, vec![0.0, 1.0]);
        let last = run.states.last().unwrap();
        assert!(last.iter().all(|&x| (0.0..=0.5).contains(&x)));
        assert!(run.asymmetry(1) <= 1e-10);
    }

    #[test]
    fn bad_profiles_rejected() {
        let cfg = StefanConfig {
            t_end: Some(1.0),
            n_y: 8,
            ..Default::default()
        };
        let mut p = cfg.default_profile();
        p[2] = -0.1;
        assert!(matches!(
            solve_fixed_domain(&p, &cfg),
            Err(Error::Contract(_))
        ));
        let mut p = cfg.default_profile();
        p[2] += 0.1;
        assert!(matches!(
            solve_fixed_domain(&p, &cfg),
            Err(Error::Contract(_))
        ));
    }
}
