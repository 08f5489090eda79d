//! Front conditions, decay rates and the perturbed run.

use serde::Serialize;

use super::construct::{boundary_slope_fit, StefanSolution, PERIOD};
use super::fit::{exp_fit, ExpFit};
use crate::error::{Error, Result};
use crate::field::{stepanov_norm, GridFn};
use crate::model::ModelSpec;
use crate::solver::{evolve, SolverConfig};

/// Relative RH tolerance: `tol = RH_TOL_FRACTION · max ψ`.
pub const RH_TOL_FRACTION: f64 = 5e-3;

#[derive(Debug, Clone, Serialize)]
pub struct JumpSample {
    pub t: f64,
    pub r: f64,
    pub psi: f64,
    /// `[A(u)]` across `x = r(t)`.
    pub a_jump: f64,
    /// `|ψ r' + (A(u)_x)₋|`.
    pub rh_residual: f64,
    /// `(A(u)_x)₋ = v_y(t, 1) / r`.
    pub inside_flux: f64,
    /// `(A(u)_x)₊`, zero because `u ≤ 0` outside.
    pub outside_flux: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpReport {
    pub samples: Vec<JumpSample>,
    pub max_a_jump: f64,
    pub max_rh_residual: f64,
    pub max_psi: f64,
    pub rh_tolerance: f64,
    pub rh_ok: bool,
    pub entropy_signs_ok: bool,
    pub passed: bool,
}

/// Checks the front `x = r(t)` at every time step `t > 0` of the run. The inside
/// derivative uses a first-order one-sided difference, `ψ` the second-order
/// stencil, so the residual measures their `O(h)` disagreement.
pub fn verify_jump_conditions(sol: &StefanSolution) -> JumpReport {
    let run = &sol.run;
    let b = run.boundary;
    let s = &run.series;
    let mut samples = Vec::new();
    let (mut max_a, mut max_rh) = (0.0f64, 0.0f64);
    let mut signs = true;
    let mut next_sample = 1;
    let n = run.n_y();
    for i in 1..s.t.len() {
        let t = s.t[i];
        let r = b.r(t);
        let rp = b.r_prime(t);
        let psi = -s.w_right[i] / (r * rp);
        let k = run
            .times
            .partition_point(|&s| s < t)
            .min(run.times.len() - 1);
        let inside_a = run.states[k][n].max(0.0);
        let outside_a = (-psi).max(0.0);
        let a_jump = outside_a - inside_a;
        let inside_flux = s.w_right_first[i] / r;
        let outside_flux = 0.0;
        let rh = (psi * rp + inside_flux).abs();
        max_a = max_a.max(a_jump.abs());
        max_rh = max_rh.max(rh);
        signs &= s.w_right[i] <= 0.0 && s.w_left[i] >= 0.0 && outside_flux == 0.0;
        if next_sample < run.times.len() && t >= run.times[next_sample] {
            samples.push(JumpSample {
                t,
                r,
                psi,
                a_jump,
                rh_residual: rh,
                inside_flux,
                outside_flux,
            });
            next_sample += 1;
        }
    }
    let max_psi = sol.psi.max();
    let rh_tolerance = RH_TOL_FRACTION * max_psi;
    let rh_ok = max_rh <= rh_tolerance;
    JumpReport {
        samples,
        max_a_jump: max_a,
        max_rh_residual: max_rh,
        max_psi,
        rh_tolerance,
        rh_ok,
        entropy_signs_ok: signs,
        passed: rh_ok && signs && max_a == 0.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub alpha: f64,
    pub t_burn: f64,
    pub energy: ExpFit,
    pub boundary_slope: ExpFit,
    pub sup: ExpFit,
    pub energy_threshold: f64,
    pub slope_threshold: f64,
    pub sup_threshold: f64,
    pub passed: bool,
    pub inconclusive: bool,
    pub max_asymmetry: f64,
    pub positivity_ok: bool,
    /// `max |v_y(t, 0)|` over the samples.
    pub max_center_slope: f64,
    pub jensen_ok: bool,
}

/// Exponential fits over `[t_burn, t_end]` of the energy
/// `∫ v_yy² + r r' Σ v_y²`, of `|v_y(t, 1)|` and of `sup v`.
pub fn verify_decay_estimates(sol: &StefanSolution) -> DecayReport {
    let run = &sol.run;
    let alpha = run.boundary.alpha;
    let t_burn = run.config.t_burn();
    let window: Vec<usize> = (0..run.times.len())
        .filter(|&k| run.times[k] >= t_burn)
        .collect();
    let series = |f: &dyn Fn(usize) -> f64| -> Vec<(f64, f64)> {
        window.iter().map(|&k| (run.times[k], f(k))).collect()
    };
    let energy = exp_fit(&series(&|k| run.energy(k)));
    let boundary_slope = boundary_slope_fit(run, t_burn);
    let sup = exp_fit(&series(&|k| run.sup(k)));
    let (et, wt, st) = (2.8 * alpha, 0.9 * alpha, 1.4 * alpha);
    let max_phi = run.sup(0);
    let mut positivity_ok = true;
    let mut max_asymmetry: f64 = 0.0;
    let mut max_center_slope: f64 = 0.0;
    let mut jensen_ok = true;
    for k in 0..run.times.len() {
        positivity_ok &= run.states[k].iter().all(|&v| v >= 0.0 && v <= max_phi);
        max_asymmetry = max_asymmetry.max(run.asymmetry(k));
        let (w0, ok) = run.jensen_check(k);
        max_center_slope = max_center_slope.max(w0.abs());
        jensen_ok &= ok;
    }
    let rate_ok = |f: &ExpFit, th: f64| f.rate.is_finite() && f.rate >= th;
    DecayReport {
        alpha,
        t_burn,
        passed: rate_ok(&energy, et) && rate_ok(&boundary_slope, wt) && rate_ok(&sup, st),
        inconclusive: !(energy.conclusive && boundary_slope.conclusive && sup.conclusive),
        energy,
        boundary_slope,
        sup,
        energy_threshold: et,
        slope_threshold: wt,
        sup_threshold: st,
        max_asymmetry,
        positivity_ok,
        max_center_slope,
        jensen_ok,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NonDecayReport {
    pub times: Vec<f64>,
    /// `‖u_pert(t)‖_X` with the unit-radius Stepanov norm.
    pub x_norms: Vec<f64>,
    pub perturbation_norm: f64,
    pub threshold: f64,
    pub nondecay_ok: bool,
    /// `‖u_pert(t) - (u(t) + v)‖₁` with `u` the unperturbed run.
    pub equivalence: Vec<f64>,
    pub equivalence_tol: f64,
    pub equivalence_ok: bool,
    /// `‖u(t)‖₁ / periods`, unperturbed run.
    pub unperturbed_l1_per_period: Vec<f64>,
    /// `‖u(t) - u_constructed(t)‖₁` where the construction has a sample at `t`.
    pub scheme_vs_construction: Vec<Option<f64>>,
    pub passed: bool,
}

pub const EQUIVALENCE_TOL: f64 = 1e-6;

/// Runs `p` and `p + v` with the finite-volume solver on the grid of `v`.
/// `v` must be nonpositive with support in `[2, 3]`, and the grid must cover
/// whole periods starting at `-5/2`.
pub fn perturbed_nondecay_experiment(
    sol: &StefanSolution,
    v_pert: &GridFn,
    cfg: &SolverConfig,
) -> Result<NonDecayReport> {
    let domain = *v_pert.domain();
    if !domain.is_periodic() {
        return Err(Error::Domain(
            "the perturbed run needs a periodic grid".into(),
        ));
    }
    let periods = domain.length() / PERIOD;
    let offset = (domain.x_lo() + 0.5 * PERIOD) / PERIOD;
    if (periods - periods.round()).abs() > 1e-12 || (offset - offset.round()).abs() > 1e-12 {
        return Err(Error::Commensurability(format!(
            "grid [{}, {}) is not a union of periods starting at -5/2",
            domain.x_lo(),
            domain.x_hi()
        )));
    }
    for (i, x) in v_pert.centers().enumerate() {
        let v = v_pert.values()[i];
        if v > 0.0 {
            return Err(Error::Contract(format!("perturbation positive at x = {x}")));
        }
        if v != 0.0 && !(2.0..=3.0).contains(&x) {
            return Err(Error::Contract(format!(
                "perturbation support leaves [2, 3] at x = {x}"
            )));
        }
    }
    let p = sol.initial_data_on(domain, v_pert.len())?;
    let perturbed = p.add(v_pert)?;
    let lo = perturbed.min().min(-1.0);
    let hi = p.max().max(1.0);
    let model = ModelSpec::preset("stefan", (lo, hi))?;
    let base = evolve(&p, &model, cfg)?;
    let pert = evolve(&perturbed, &model, cfg)?;

    let perturbation_norm = stepanov_norm(v_pert, 1.0)?;
    let threshold = 0.9 * perturbation_norm;
    let mut report = NonDecayReport {
        times: base.times.clone(),
        x_norms: Vec::new(),
        perturbation_norm,
        threshold,
        nondecay_ok: true,
        equivalence: Vec::new(),
        equivalence_tol: EQUIVALENCE_TOL,
        equivalence_ok: true,
        unperturbed_l1_per_period: Vec::new(),
        scheme_vs_construction: Vec::new(),
        passed: false,
    };
    for (k, &t) in base.times.iter().enumerate() {
        let x = stepanov_norm(&pert.states[k], 1.0)?;
        if t >= 1.0 {
            report.nondecay_ok &= x >= threshold;
        }
        report.x_norms.push(x);
        let eq = pert.states[k].l1_distance(&base.states[k].add(v_pert)?)?;
        report.equivalence_ok &= eq <= EQUIVALENCE_TOL;
        report.equivalence.push(eq);
        report
            .unperturbed_l1_per_period
            .push(base.states[k].l1_norm() / periods.round());
        let constructed = match sol.sample_index(t) {
            Some(j) => {
                Some(base.states[k].l1_distance(&sol.sample_on(j, domain, v_pert.len())?)?)
            }
            None => None,
        };
        report.scheme_vs_construction.push(constructed);
    }
    report.passed = report.nondecay_ok && report.equivalence_ok;
    Ok(report)
}
