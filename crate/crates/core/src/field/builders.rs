use std::f64::consts::PI;

use super::grid::{Domain, GridFn};
use crate::error::{Error, Result};

/// Periodic data `m + v + (δ/2) sin(2π ξ x / r)` whose group of periods is
/// `(r / ξ)·ℤ` when `v` is zero or shares that period. In one space dimension
/// the hyperplane component of the general construction is trivial, so `v` is
/// usually absent.
pub fn build_exactness_data(
    mean: f64,
    delta: f64,
    v_profile: Option<&GridFn>,
    xi: f64,
    r_period: f64,
    domain: Domain,
    n: usize,
) -> Result<GridFn> {
    if !(delta > 0.0) || xi == 0.0 || !(r_period > 0.0) {
        return Err(Error::Contract(format!(
            "need δ > 0, ξ ≠ 0, r > 0 (got {delta}, {xi}, {r_period})"
        )));
    }
    let wave = GridFn::from_cell_average(domain, n, |x| {
        mean + 0.5 * delta * (2.0 * PI * xi * x / r_period).sin()
    })?;
    match v_profile {
        None => Ok(wave),
        Some(v) => {
            if v.sup_norm() > 0.5 * delta {
                return Err(Error::Contract(format!(
                    "‖v‖∞ = {} exceeds δ/2 = {}",
                    v.sup_norm(),
                    0.5 * delta
                )));
            }
            wave.add(v)
        }
    }
}
