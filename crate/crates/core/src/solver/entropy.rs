//! Discrete Kruzhkov entropy residual, accumulated while the scheme runs.
//!
//! With `E = |u - k|`, `Q_{i+½} = F(u_i ∨ k, u_{i+1} ∨ k) - F(u_i ∧ k, u_{i+1} ∧ k)`
//! and `D = |A(u) - A(k)|`, summation by parts against `f ≥ 0` vanishing at
//! both ends of the run gives
//!
//! `R = Σ_n Σ_i dx [E_i^{n+1} (f_i^{n+1} - f_i^n) + dt Q_{i+½} (f_{i+1}^n - f_i^n)/dx
//!       + dt D_i (f_{i+1}^n - 2 f_i^n + f_{i-1}^n)/dx²]`,
//!
//! which is nonnegative for a monotone scheme.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::scheme::Scheme;
use crate::error::{Error, Result};
use crate::field::Domain;

/// Residual tolerance per unit of domain length.
pub const ENTROPY_TOL_PER_LENGTH: f64 = 1e-6;

/// Separable test function `w · sin²(π (t - t_lo)/(t_hi - t_lo)) · cos²(π d / (2h))`
/// with `d` the periodic distance to `x_center`, supported in
/// `(t_lo, t_hi) × (x_center - h, x_center + h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub t_lo: f64,
    pub t_hi: f64,
    pub x_center: f64,
    pub half_width: f64,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

impl TestFunction {
    pub fn new(t_lo: f64, t_hi: f64, x_center: f64, half_width: f64) -> Self {
        TestFunction {
            t_lo,
            t_hi,
            x_center,
            half_width,
            weight: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.weight >= 0.0) {
            return Err(Error::Contract(format!(
                "test function weight {} is negative",
                self.weight
            )));
        }
        if !(self.t_lo >= 0.0 && self.t_lo < self.t_hi && self.half_width > 0.0) {
            return Err(Error::Contract(format!(
                "bad test function support {self:?}"
            )));
        }
        Ok(())
    }

    pub fn time_factor(&self, t: f64) -> f64 {
        if t <= self.t_lo || t >= self.t_hi {
            return 0.0;
        }
        let s = (PI * (t - self.t_lo) / (self.t_hi - self.t_lo)).sin();
        self.weight * s * s
    }

    pub fn space_factor(&self, x: f64, domain: &Domain) -> f64 {
        let mut d = x - self.x_center;
        if domain.is_periodic() {
            let len = domain.length();
            d -= len * (d / len).round();
        }
        if d.abs() >= self.half_width {
            0.0
        } else {
            let c = (0.5 * PI * d / self.half_width).cos();
            c * c
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEntry {
    pub k: f64,
    pub test: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub entries: Vec<EntropyEntry>,
    pub min_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

struct SpaceData {
    chi: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    /// Cells where any of the three is nonzero.
    support: Vec<usize>,
}

/// Observer fed with every step of an evolution.
pub struct EntropyMonitor {
    ks: Vec<f64>,
    tests: Vec<TestFunction>,
    space: Vec<SpaceData>,
    sums: Vec<f64>,
    domain_length: f64,
}

impl EntropyMonitor {
    pub fn new(ks: Vec<f64>, tests: Vec<TestFunction>) -> Result<Self> {
        if ks.is_empty() || tests.is_empty() {
            return Err(Error::Contract(
                "need at least one k and one test function".into(),
            ));
        }
        for t in &tests {
            t.validate()?;
        }
        let sums = vec![0.0; ks.len() * tests.len()];
        Ok(EntropyMonitor {
            ks,
            tests,
            space: Vec::new(),
            sums,
            domain_length: 0.0,
        })
    }

    fn prepare(&mut self, domain: &Domain, n: usize) {
        if !self.space.is_empty() {
            return;
        }
        let dx = domain.length() / n as f64;
        self.domain_length = domain.length();
        for t in &self.tests {
            let chi: Vec<f64> = (0..n)
                .map(|i| t.space_factor(domain.x_lo() + (i as f64 + 0.5) * dx, domain))
                .collect();
            let d1: Vec<f64> = (0..n).map(|i| (chi[(i + 1) % n] - chi[i]) / dx).collect();
            let d2: Vec<f64> = (0..n)
                .map(|i| {
                    let l = chi[(i + n - 1) % n];
                    let r = chi[(i + 1) % n];
                    (r - 2.0 * chi[i] + l) / (dx * dx)
                })
                .collect();
            let support = (0..n)
                .filter(|&i| chi[i] != 0.0 || d1[i] != 0.0 || d2[i] != 0.0)
                .collect();
            self.space.push(SpaceData {
                chi,
                d1,
                d2,
                support,
            });
        }
    }

    /// Adds the contribution of the step `u_old → u_new` taken at `t_old`.
    pub fn observe(
        &mut self,
        scheme: &Scheme,
        domain: &Domain,
        u_old: &[f64],
        u_new: &[f64],
        t_old: f64,
        dt: f64,
    ) {
        let n = u_old.len();
        self.prepare(domain, n);
        let taus: Vec<(f64, f64)> = self
            .tests
            .iter()
            .map(|t| (t.time_factor(t_old), t.time_factor(t_old + dt)))
            .collect();
        if taus.iter().all(|&(a, b)| a == 0.0 && b == 0.0) {
            return;
        }
        let dx = domain.length() / n as f64;
        let nt = self.tests.len();
        for (ki, &k) in self.ks.iter().enumerate() {
            let ak = scheme.diffusion_primitive(k);
            for (ti, &(tau0, tau1)) in taus.iter().enumerate() {
                if tau0 == 0.0 && tau1 == 0.0 {
                    continue;
                }
                let sp = &self.space[ti];
                let dtau = tau1 - tau0;
                let mut acc = 0.0;
                for &i in &sp.support {
                    let mut term = (u_new[i] - k).abs() * dtau * sp.chi[i];
                    if scheme.has_convection() {
                        let (a, b) = (u_old[i], u_old[(i + 1) % n]);
                        let q = scheme.numerical_flux(a.max(k), b.max(k))
                            - scheme.numerical_flux(a.min(k), b.min(k));
                        term += dt * tau0 * q * sp.d1[i];
                    }
                    if scheme.has_diffusion() {
                        let d = (scheme.diffusion_primitive(u_old[i]) - ak).abs();
                        term += dt * tau0 * d * sp.d2[i];
                    }
                    acc += term;
                }
                self.sums[ki * nt + ti] += acc * dx;
            }
        }
    }

    pub fn report(&self) -> EntropyReport {
        let nt = self.tests.len();
        let entries: Vec<EntropyEntry> = self
            .sums
            .iter()
            .enumerate()
            .map(|(idx, &residual)| EntropyEntry {
                k: self.ks[idx / nt],
                test: idx % nt,
                residual,
            })
            .collect();
        let min_residual = entries
            .iter()
            .map(|e| e.residual)
            .fold(f64::INFINITY, f64::min);
        let tolerance = ENTROPY_TOL_PER_LENGTH * self.domain_length;
        EntropyReport {
            passed: min_residual >= -tolerance,
            entries,
            min_residual,
            tolerance,
        }
    }
}
