//! Shift-invariant window norms and vanishing-at-infinity diagnostics.
//!
//! For a piecewise-constant `|u|` the window integral `y ↦ ∫_y^{y+W} |u|` is
//! piecewise linear with kinks where either window end crosses a cell edge, so
//! its maximum is attained with one end on an edge. Evaluating those `2N`
//! placements with prefix sums is exact and O(N).

use serde::Serialize;

use super::grid::{Domain, GridFn};
use crate::error::{Error, Result};

/// Cumulative `∫ |u|` in cell units, extended periodically or by zero.
struct Cumulative {
    prefix: Vec<f64>,
    abs: Vec<f64>,
    periodic: bool,
}

impl Cumulative {
    fn new(u: &GridFn) -> Self {
        let abs: Vec<f64> = u.values().iter().map(|v| v.abs()).collect();
        let mut prefix = Vec::with_capacity(abs.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for a in &abs {
            acc += a;
            prefix.push(acc);
        }
        Cumulative {
            prefix,
            abs,
            periodic: u.is_periodic(),
        }
    }

    /// `∫_0^s |u|` with `s` in cells from the left edge.
    fn at(&self, s: f64) -> f64 {
        let n = self.abs.len();
        let total = self.prefix[n];
        let k = s.floor();
        let frac = s - k;
        if self.periodic {
            let wraps = (k / n as f64).floor();
            let i = (k - wraps * n as f64) as usize;
            wraps * total + self.prefix[i] + frac * self.abs[i]
        } else if k < 0.0 {
            0.0
        } else if k >= n as f64 {
            total
        } else {
            let i = k as usize;
            self.prefix[i] + frac * self.abs[i]
        }
    }
}

/// Window length in cells, snapped to an integer when it is one up to rounding.
fn window_cells(u: &GridFn, window: f64) -> f64 {
    let w = window / u.dx();
    let r = w.round();
    if (w - r).abs() <= 1e-9 * w.max(1.0) {
        r
    } else {
        w
    }
}

fn check_window(u: &GridFn, window: f64) -> Result<()> {
    if !(window > 0.0) {
        return Err(Error::Domain(format!(
            "window length {window} must be positive"
        )));
    }
    if window > u.domain().length() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "window {window} longer than domain {}",
            u.domain().length()
        )));
    }
    Ok(())
}

/// `sup_y ∫_{y}^{y+W} |u| dx` over all placements (cyclic on periodic domains,
/// zero extension outside a box).
pub fn v_norm(u: &GridFn, window_length: f64) -> Result<f64> {
    check_window(u, window_length)?;
    let cum = Cumulative::new(u);
    let w = window_cells(u, window_length);
    let n = u.len() as i64;
    let (first, last) = if u.is_periodic() {
        (0, n - 1)
    } else {
        (-(w.ceil() as i64) - 1, n)
    };
    let mut best: f64 = 0.0;
    for j in first..=last {
        let s = j as f64;
        best = best.max(cum.at(s + w) - cum.at(s));
        best = best.max(cum.at(s) - cum.at(s - w));
    }
    Ok(best * u.dx())
}

/// Stepanov norm with ball radius `radius` (window length `2 radius` in 1D).
pub fn stepanov_norm(u: &GridFn, radius: f64) -> Result<f64> {
    v_norm(u, 2.0 * radius)
}

/// `∫_a^b |u| dx` of the piecewise-constant reconstruction.
pub fn window_integral(u: &GridFn, a: f64, b: f64) -> f64 {
    let cum = Cumulative::new(u);
    let x0 = u.domain().x_lo();
    (cum.at((b - x0) / u.dx()) - cum.at((a - x0) / u.dx())) * u.dx()
}

/// Measure of `{|v| > λ}` for each threshold.
pub fn vanishing_profile(v: &GridFn, thresholds: &[f64]) -> Vec<(f64, f64)> {
    thresholds
        .iter()
        .map(|&lam| {
            let count = v.values().iter().filter(|x| x.abs() > lam).count();
            (lam, count as f64 * v.dx())
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanVanishingReport {
    pub widths: Vec<f64>,
    /// `(1/|A|) ∫_A |v|` for boxes of the given widths centred at `center`.
    pub averages: Vec<f64>,
    /// `meas{|v| > ε} ‖v‖_∞ / |A| + ε` for the chosen `ε`.
    pub bounds: Vec<f64>,
    pub epsilon: f64,
    pub nonincreasing: bool,
    pub bounds_hold: bool,
    pub below_threshold: bool,
    pub passed: bool,
}

/// Averages of `|v|` over nested centred boxes; `v` passes when the sequence is
/// nonincreasing and ends below `threshold`.
pub fn mean_vanishing_check(
    v: &GridFn,
    center: f64,
    widths: &[f64],
    epsilon: f64,
    threshold: f64,
) -> Result<MeanVanishingReport> {
    if widths.is_empty() || widths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract(
            "box widths must be increasing and nonempty".into(),
        ));
    }
    if let Domain::Periodic { .. } = v.domain() {
        return Err(Error::Domain(
            "vanishing checks need a box domain (zero outside)".into(),
        ));
    }
    let sup = v.sup_norm();
    let big_set = vanishing_profile(v, &[epsilon])[0].1;
    let averages: Vec<f64> = widths
        .iter()
        .map(|&w| window_integral(v, center - 0.5 * w, center + 0.5 * w) / w)
        .collect();
    let bounds: Vec<f64> = widths
        .iter()
        .map(|&w| big_set * sup / w + epsilon)
        .collect();
    let tol = 1e-12 * averages.iter().fold(0.0f64, |m, a| m.max(*a)).max(1e-300);
    let nonincreasing = averages.windows(2).all(|a| a[1] <= a[0] + tol);
    let bounds_hold = averages.iter().zip(&bounds).all(|(a, b)| *a <= b + tol);
    let below_threshold = *averages.last().unwrap() <= threshold;
    Ok(MeanVanishingReport {
        widths: widths.to_vec(),
        averages,
        bounds,
        epsilon,
        nonincreasing,
        bounds_hold,
        below_threshold,
        passed: nonincreasing && below_threshold,
    })
}
