//! Frozen-phase profile `ψ`, the assembled 5-periodic solution and the mass
//! identity `∫φ0 = 2 ∫_1^2 ψ`.

use std::cell::RefCell;

use serde::Serialize;

use super::fit::{exp_fit, ExpFit};
use super::fixed::{FixedDomainRun, MovingBoundary};
use crate::error::{Error, Result};
use crate::field::{Domain, GridFn};

pub const PERIOD: f64 = 5.0;

/// Continuation of `ψ` past the last computed front position, from the fitted
/// decay `|v_y(t, 1)| ≈ |w_end| e^{-λ (t - t_end)}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PsiTail {
    pub t_end: f64,
    pub w_end: f64,
    pub rate: f64,
}

/// `ψ` sampled at the front positions `x = r(t)`, increasing in `x`.
#[derive(Debug, Clone)]
pub struct PsiTable {
    pub boundary: MovingBoundary,
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub t: Vec<f64>,
    pub tail: Option<PsiTail>,
}

impl PsiTable {
    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn max(&self) -> f64 {
        self.psi.iter().copied().fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(1.0..2.0).contains(&x) {
            return Err(Error::Coverage(format!("ψ is defined on [1, 2), got {x}")));
        }
        if x <= self.x_max() {
            let i = self.x.partition_point(|&s| s < x);
            if i == 0 {
                return Ok(self.psi[0]);
            }
            let (x0, x1) = (self.x[i - 1], self.x[i]);
            let f = (x - x0) / (x1 - x0);
            return Ok((1.0 - f) * self.psi[i - 1] + f * self.psi[i]);
        }
        match self.tail {
            Some(tail) => {
                let t = self.boundary.time_of(x);
                let w = tail.w_end * (-tail.rate * (t - tail.t_end)).exp();
                Ok(w.abs() / (self.boundary.r(t) * self.boundary.r_prime(t)))
            }
            None => Err(Error::Coverage(format!(
                "ψ known up to x = {}, requested {x}",
                self.x_max()
            ))),
        }
    }
}

/// `ψ(r(t)) = -v_y(t, 1) / (r(t) r'(t))` from the per-step boundary slopes.
/// Samples whose slope underflowed to a subnormal or zero are dropped.
pub fn boundary_flux_to_psi(run: &FixedDomainRun) -> Result<PsiTable> {
    let b = run.boundary;
    if b.alpha <= 0.0 {
        return Err(Error::Contract("ψ needs α > 0".into()));
    }
    let s = &run.series;
    let trivial = run.phi0().iter().all(|&v| v == 0.0);
    let mut table = PsiTable {
        boundary: b,
        x: Vec::new(),
        psi: Vec::new(),
        t: Vec::new(),
        tail: None,
    };
    for (i, (&t, &w)) in s.t.iter().zip(&s.w_right).enumerate() {
        let x = b.r(t);
        let mut psi = -w / (b.r(t) * b.r_prime(t));
        if t == 0.0 {
            // The one-sided stencil on a profile flat at y = 1 can be O(h²) positive.
            psi = psi.max(0.0);
        }
        if !trivial && t > 0.0 {
            if w > 0.0 || (psi <= 0.0 && w.abs() >= f64::MIN_POSITIVE) {
                return Err(Error::Construction(format!(
                    "ψ = {psi} ≤ 0 at t = {t} (step {i}); the profile must be positive"
                )));
            }
            if w.abs() < f64::MIN_POSITIVE {
                break;
            }
        }
        if table.x.last().map_or(true, |&last| x > last) {
            table.x.push(x);
            table.psi.push(psi);
            table.t.push(t);
        }
    }
    if !trivial {
        let mut fit = boundary_slope_fit(run, run.config.t_burn());
        if fit.points < 3 {
            // Short run: fit the second half instead.
            fit = boundary_slope_fit(run, 0.5 * run.times.last().copied().unwrap_or(0.0));
        }
        if fit.rate > 0.0 {
            let k = table.t.len() - 1;
            table.tail = Some(PsiTail {
                t_end: table.t[k],
                w_end: -table.psi[k] * b.r(table.t[k]) * b.r_prime(table.t[k]),
                rate: fit.rate,
            });
        }
    }
    Ok(table)
}

/// Exponential fit of `|v_y(t, 1)|` at the sample times in `[t_from, t_end]`.
pub fn boundary_slope_fit(run: &FixedDomainRun, t_from: f64) -> ExpFit {
    let pts: Vec<(f64, f64)> = (0..run.times.len())
        .filter(|&k| run.times[k] >= t_from)
        .map(|k| (run.times[k], run.boundary_slopes(k).1.abs()))
        .collect();
    exp_fit(&pts)
}

#[derive(Debug, Clone, Serialize)]
pub struct MassBalance {
    pub phi_integral: f64,
    /// `2 ∫_1^2 ψ dx`, including the tail.
    pub psi_integral: f64,
    pub tail: f64,
    pub absolute: f64,
    /// `None` when `∫φ0 = 0`.
    pub relative: Option<f64>,
}

/// Compares `∫φ0` with `2 ∫ ψ dx = 2 ∫ (-v_y(t,1)/r) dt` (trapezoid over the
/// steps) plus the tail `2 |w_end| / (r_end λ)`.
pub fn mass_balance(run: &FixedDomainRun, psi: &PsiTable) -> MassBalance {
    let h = run.h;
    let phi = run.phi0();
    let phi_integral: f64 = phi.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    let b = run.boundary;
    let s = &run.series;
    let mut integral = 0.0;
    for i in 1..s.t.len() {
        let f0 = -s.w_right[i - 1] / b.r(s.t[i - 1]);
        let f1 = -s.w_right[i] / b.r(s.t[i]);
        integral += 0.5 * (s.t[i] - s.t[i - 1]) * (f0 + f1);
    }
    let tail = psi
        .tail
        .map(|t| t.w_end.abs() / (b.r(t.t_end) * t.rate))
        .unwrap_or(0.0);
    let psi_integral = 2.0 * (integral + tail);
    let absolute = (phi_integral - psi_integral).abs();
    MassBalance {
        phi_integral,
        psi_integral,
        tail: 2.0 * tail,
        absolute,
        relative: (phi_integral != 0.0).then(|| absolute / phi_integral.abs()),
    }
}

/// The 5-periodic solution: `v(t, x/r)` for `|x| < r(t)`, `-ψ(|x|)` for
/// `r(t) < |x| < 2`, `0` for `2 < |x| < 5/2`.
#[derive(Debug, Clone)]
pub struct StefanSolution {
    pub run: FixedDomainRun,
    pub psi: PsiTable,
    /// Cell averages on `[-5/2, 5/2)` at the run's sample times.
    pub states: Vec<GridFn>,
}

impl StefanSolution {
    pub fn alpha(&self) -> f64 {
        self.run.boundary.alpha
    }

    pub fn times(&self) -> &[f64] {
        &self.run.times
    }

    /// Point value at sample `k`.
    pub fn value(&self, k: usize, x: f64) -> Result<f64> {
        let x = x - PERIOD * ((x + 0.5 * PERIOD) / PERIOD).floor();
        let ax = x.abs();
        let r = self.run.boundary.r(self.run.times[k]);
        if ax < r {
            Ok(self.run.v_at(k, x / r))
        } else if ax < 2.0 {
            Ok(-self.psi.eval(ax)?)
        } else {
            Ok(0.0)
        }
    }

    /// Initial data `p` on an arbitrary periodic grid (cell averages).
    pub fn initial_data_on(&self, domain: Domain, n: usize) -> Result<GridFn> {
        self.sample_on(0, domain, n)
    }

    pub fn sample_on(&self, k: usize, domain: Domain, n: usize) -> Result<GridFn> {
        let err = RefCell::new(None);
        let g = GridFn::from_cell_average(domain, n, |x| match self.value(k, x) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        })?;
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(g),
        }
    }

    /// Index of the sample at time `t`, if there is one.
    pub fn sample_index(&self, t: f64) -> Option<usize> {
        self.run
            .times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
    }
}

/// Assembles the periodic solution on `n_x` cells of `[-5/2, 5/2)`.
pub fn assemble_periodic_solution(
    run: &FixedDomainRun,
    psi: &PsiTable,
    n_x: usize,
) -> Result<StefanSolution> {
    if psi.x.is_empty() || psi.x[0] != 1.0 {
        return Err(Error::Coverage("ψ table must start at x = 1".into()));
    }
    let mut sol = StefanSolution {
        run: run.clone(),
        psi: psi.clone(),
        states: Vec::new(),
    };
    let domain = Domain::periodic(-0.5 * PERIOD, PERIOD);
    let states = (0..run.times.len())
        .map(|k| sol.sample_on(k, domain, n_x))
        .collect::<Result<Vec<_>>>()?;
    sol.states = states;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::super::fixed::{solve_fixed_domain, StefanConfig};
    use super::*;

    fn small() -> FixedDomainRun {
        let cfg = StefanConfig {
            n_y: 100,
            t_end: Some(40.0),
            alpha: 0.1,
            ..Default::default()
        };
        solve_fixed_domain(&cfg.default_profile(), &cfg).unwrap()
    }

    #[test]
    fn psi_identity() {
        let run = small();
        let psi = boundary_flux_to_psi(&run).unwrap();
        let b = run.boundary;
        for (i, &t) in psi.t.iter().enumerate().skip(1).step_by(97) {
            let w = run.series.w_right[run.series.t.iter().position(|&s| s == t).unwrap()];
            let back = psi.psi[i] * b.r(t) * b.r_prime(t);
            assert!((back + w).abs() <= 1e-14 * w.abs().max(1e-300));
        }
        assert!(psi.psi.iter().skip(1).all(|&p| p > 0.0));
        assert!(psi.eval(0.5).is_err());
    }

    #[test]
    fn zero_profile_gives_zero_psi() {
        let cfg = StefanConfig {
            n_y: 20,
            t_end: Some(2.0),
            ..Default::default()
        };
        let run = solve_fixed_domain(&vec![0.0; 21], &cfg).unwrap();
        let psi = boundary_flux_to_psi(&run).unwrap();
        assert!(psi.psi.iter().all(|&p| p == 0.0));
        let mb = mass_balance(&run, &psi);
        assert_eq!(mb.absolute, 0.0);
        assert!(mb.relative.is_none());
    }

    #[test]
    fn assembled_initial_slice() {
        let run = small();
        let psi = boundary_flux_to_psi(&run).unwrap();
        let sol = assemble_periodic_solution(&run, &psi, 200).unwrap();
        assert!((sol.value(0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(sol.value(0, 2.2).unwrap(), 0.0);
        assert_eq!(sol.value(0, 1.5).unwrap(), -psi.eval(1.5).unwrap());
        assert_eq!(
            sol.value(0, 1.5 + PERIOD).unwrap(),
            sol.value(0, 1.5).unwrap()
        );
        assert_eq!(sol.value(0, -1.5).unwrap(), sol.value(0, 1.5).unwrap());
        let mb = mass_balance(&run, &psi);
        let mean = sol.states[0].mean().unwrap();
        assert!(mean.abs() < 0.05 * mb.phi_integral / PERIOD, "mean {mean}");
    }
}
