//! Lattice envelopes of a compactly supported perturbation: pointwise sup/inf
//! over the translates `x + r e`, `e` in the period lattice, sampled on the
//! fundamental cell `P_r = [-r L / 2, r L / 2)`.

use serde::Serialize;

use super::grid::{Domain, GridFn};
use crate::error::{Error, Result};

/// `v_r⁺`, `v_r⁻` and `V_r` on the cell `P_r` (box domain).
#[derive(Debug, Clone)]
pub struct Envelopes {
    pub r: usize,
    pub period: f64,
    pub plus: GridFn,
    pub minus: GridFn,
    pub abs: GridFn,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeMeans {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub m_r: f64,
}

fn cells_of(length: f64, dx: f64, what: &str) -> Result<i64> {
    let c = length / dx;
    let r = c.round();
    if (c - r).abs() > 1e-9 * c.abs().max(1.0) {
        return Err(Error::Commensurability(format!(
            "{what} = {length} is {c} cells of width {dx}"
        )));
    }
    Ok(r as i64)
}

/// Envelopes of `v` (a box-domain grid function vanishing on both edge cells)
/// for the 1D lattice `period·ℤ` scaled by `r`.
pub fn lattice_envelopes(v: &GridFn, period: f64, r: usize) -> Result<Envelopes> {
    if v.is_periodic() {
        return Err(Error::Domain("envelopes need a box domain".into()));
    }
    if r == 0 || !(period > 0.0) {
        return Err(Error::Contract(format!("r = {r}, period = {period}")));
    }
    let n = v.len();
    if v.values()[0] != 0.0 || v.values()[n - 1] != 0.0 {
        return Err(Error::Coverage(
            "support of v reaches the edge of the box".into(),
        ));
    }
    let dx = v.dx();
    let cell_len = r as f64 * period;
    let shift = cells_of(cell_len, dx, "r·period")?;
    let offset = cells_of(-0.5 * cell_len - v.domain().x_lo(), dx, "cell offset")?;

    let mut plus = Vec::with_capacity(shift as usize);
    let mut minus = Vec::with_capacity(shift as usize);
    let mut abs = Vec::with_capacity(shift as usize);
    for i in 0..shift {
        let base = offset + i;
        // translates outside the box contribute v = 0
        let (mut hi, mut lo, mut a) = (0.0f64, 0.0f64, 0.0f64);
        let k_min = (-base).div_euclid(shift) - 1;
        let k_max = (n as i64 - 1 - base).div_euclid(shift) + 1;
        for k in k_min..=k_max {
            let j = base + k * shift;
            if (0..n as i64).contains(&j) {
                let x = v.values()[j as usize];
                hi = hi.max(x);
                lo = lo.min(x);
                a = a.max(x.abs());
            }
        }
        plus.push(hi);
        minus.push(lo);
        abs.push(a);
    }
    let domain = Domain::boxed(-0.5 * cell_len, 0.5 * cell_len);
    Ok(Envelopes {
        r,
        period,
        plus: GridFn::new(domain, plus)?,
        minus: GridFn::new(domain, minus)?,
        abs: GridFn::new(domain, abs)?,
    })
}

impl Envelopes {
    /// Samples the `rL`-periodic envelope `which` onto another grid.
    pub fn tile_onto(&self, which: &GridFn, target: &GridFn) -> Result<GridFn> {
        let dx = target.dx();
        if (dx - which.dx()).abs() > 1e-12 * dx {
            return Err(Error::Commensurability(format!(
                "envelope cell width {} vs target {}",
                which.dx(),
                dx
            )));
        }
        let cell_len = self.r as f64 * self.period;
        let n_cell = which.len() as i64;
        let start = cells_of(target.domain().x_lo() + 0.5 * cell_len, dx, "target offset")?;
        let values = (0..target.len() as i64)
            .map(|i| which.values()[(start + i).rem_euclid(n_cell) as usize])
            .collect();
        target.with_values(values)
    }
}

/// Means of the envelopes over `P_r`; fails if `|ε_r^±| ≤ M_r` is violated.
pub fn envelope_means(env: &Envelopes) -> Result<EnvelopeMeans> {
    let means = EnvelopeMeans {
        eps_plus: env.plus.mean_over_box(),
        eps_minus: env.minus.mean_over_box(),
        m_r: env.abs.mean_over_box(),
    };
    let tol = 1e-14 * means.m_r.max(1e-300);
    if means.eps_plus.abs() > means.m_r + tol || means.eps_minus.abs() > means.m_r + tol {
        return Err(Error::Construction(format!(
            "envelope means exceed M_r: {means:?}"
        )));
    }
    Ok(means)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(x: f64, c: f64, w: f64, h: f64) -> f64 {
        let s = (x - c) / w;
        if s.abs() < 1.0 {
            h * (1.0 - s * s).powi(2)
        } else {
            0.0
        }
    }

    fn boxed(f: impl Fn(f64) -> f64) -> GridFn {
        GridFn::from_centers(Domain::boxed(-16.0, 16.0), 3200, f).unwrap()
    }

    #[test]
    fn single_cell_support() {
        let v = boxed(|x| bump(x, 0.2, 0.5, 0.3) - bump(x, -0.5, 0.3, 0.2));
        let env = lattice_envelopes(&v, 2.0, 1).unwrap();
        assert_eq!(env.plus.len(), 200);
        for (i, x) in env.plus.centers().enumerate() {
            let vx = v.value_at(x);
            assert_eq!(env.plus.values()[i], vx.max(0.0));
            assert_eq!(env.minus.values()[i], vx.min(0.0));
            assert_eq!(env.abs.values()[i], vx.abs());
        }
    }

    #[test]
    fn nonnegative_v_has_zero_lower_envelope() {
        let v = boxed(|x| bump(x, 3.0, 0.7, 0.3));
        let env = lattice_envelopes(&v, 2.0, 2).unwrap();
        assert!(env.minus.values().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn envelope_means_of_zero() {
        let v = GridFn::zeros(Domain::boxed(-16.0, 16.0), 3200).unwrap();
        let m = envelope_means(&lattice_envelopes(&v, 2.0, 3).unwrap()).unwrap();
        assert_eq!((m.eps_plus, m.eps_minus, m.m_r), (0.0, 0.0, 0.0));
    }

    #[test]
    fn symmetric_pair_cancels() {
        let v = boxed(|x| bump(x, 0.5, 0.3, 0.25) - bump(x, -0.5, 0.3, 0.25));
        let m = envelope_means(&lattice_envelopes(&v, 2.0, 1).unwrap()).unwrap();
        assert!((m.eps_plus + m.eps_minus).abs() < 1e-14);
    }

    #[test]
    fn support_at_edge_rejected() {
        let v = boxed(|_| 1.0);
        assert!(matches!(
            lattice_envelopes(&v, 2.0, 1),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn incommensurate_period_rejected() {
        let v = boxed(|x| bump(x, 0.0, 0.5, 1.0));
        assert!(matches!(
            lattice_envelopes(&v, 2.003, 1),
            Err(Error::Commensurability(_))
        ));
    }

    #[test]
    fn tiling_repeats_cell() {
        let v = boxed(|x| bump(x, 0.1, 0.4, 0.3));
        let env = lattice_envelopes(&v, 2.0, 2).unwrap();
        let tiled = env.tile_onto(&env.plus, &v).unwrap();
        for i in 0..v.len() - 400 {
            assert_eq!(tiled.values()[i], tiled.values()[i + 400]);
        }
        for i in 0..v.len() {
            assert!(tiled.values()[i] >= v.values()[i]);
        }
    }
}
