//! Bounded-variation multipliers `g`, Stieltjes integrals against them and the
//! operator `T_g f = g(u-) f(u) - ∫_0^u f dg`.

use super::piecewise::PiecewisePoly;
use super::poly::Poly;
use crate::error::{Error, Result};

/// `g = smooth + Σ s_j H(u - u_j)` with left-continuous Heaviside steps, so
/// `g(u_j)` is the value before the jump.
#[derive(Debug, Clone, PartialEq)]
pub struct BVFunction {
    smooth: PiecewisePoly,
    jumps: Vec<(f64, f64)>,
}

impl BVFunction {
    pub fn new(smooth: PiecewisePoly, jumps: Vec<(f64, f64)>) -> Result<Self> {
        if !smooth.is_continuous() {
            return Err(Error::Contract(
                "smooth part of a BV function must be continuous".into(),
            ));
        }
        if jumps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Contract(
                "jump locations must be strictly increasing".into(),
            ));
        }
        for &(u, s) in &jumps {
            smooth.piece_index(u)?;
            if !s.is_finite() {
                return Err(Error::Contract(format!("jump size {s} at {u}")));
            }
        }
        Ok(BVFunction { smooth, jumps })
    }

    pub fn smooth(smooth: PiecewisePoly) -> Result<Self> {
        Self::new(smooth, Vec::new())
    }

    /// `sign(u - k)` on `[lo, hi]`: constant `-1` with a jump of `2` at `k`.
    pub fn sign_shift(k: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(PiecewisePoly::constant(-1.0, lo, hi)?, vec![(k, 2.0)])
    }

    pub fn smooth_part(&self) -> &PiecewisePoly {
        &self.smooth
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn range(&self) -> (f64, f64) {
        self.smooth.range()
    }

    /// Left limit `g(u-)`.
    pub fn eval_left(&self, u: f64) -> Result<f64> {
        let base = self.smooth.eval(u)?;
        Ok(base
            + self
                .jumps
                .iter()
                .filter(|j| j.0 < u)
                .map(|j| j.1)
                .sum::<f64>())
    }

    /// Right limit `g(u+)`.
    pub fn eval_right(&self, u: f64) -> Result<f64> {
        let base = self.smooth.eval(u)?;
        Ok(base
            + self
                .jumps
                .iter()
                .filter(|j| j.0 <= u)
                .map(|j| j.1)
                .sum::<f64>())
    }

    pub fn total_variation(&self) -> Result<f64> {
        let (lo, hi) = self.range();
        let smooth_tv = self.smooth.derivative().abs().integrate(lo, hi)?;
        Ok(smooth_tv + self.jumps.iter().map(|j| j.1.abs()).sum::<f64>())
    }
}

/// `∫_0^u f dg` with the orientation `sign(u) ∫_{J(u)} f dg`, where
/// `J(u) = [0, u)` for `u > 0` and `[u, 0)` otherwise. A jump `s_j` at `u_j`
/// contributes `f(u_j) s_j` when `u_j ∈ J(u)`.
pub fn stieltjes_integral(f: &PiecewisePoly, g: &BVFunction, u: f64) -> Result<f64> {
    f.piece_index(0.0)?;
    f.piece_index(u)?;
    g.smooth.piece_index(0.0)?;
    g.smooth.piece_index(u)?;
    if u == 0.0 {
        return Ok(0.0);
    }
    let density = f.mul(&g.smooth.derivative())?;
    let smooth = density.integrate(0.0, u)?;
    let (a, b) = if u > 0.0 { (0.0, u) } else { (u, 0.0) };
    let mut atoms = 0.0;
    for &(uj, s) in &g.jumps {
        if uj >= a && uj < b {
            atoms += f.eval(uj)? * s;
        }
    }
    Ok(smooth + u.signum() * atoms)
}

/// `T_g(f)(u) = g(u-) f(u) - ∫_0^u f dg`, normalized so that `T_g(f)(0) = 0`.
/// Requires a continuous `f`; the result is continuous even where `g` jumps.
pub fn apply_tg(g: &BVFunction, f: &PiecewisePoly) -> Result<PiecewisePoly> {
    if !f.is_continuous() {
        return Err(Error::Contract("T_g needs a continuous argument".into()));
    }
    let (lo, hi) = f.range();
    if g.range() != (lo, hi) {
        return Err(Error::Contract("f and g live on different ranges".into()));
    }
    f.piece_index(0.0)?;

    let jump_locs: Vec<f64> = g.jumps.iter().map(|j| j.0).collect();
    let mut extra = jump_locs.clone();
    extra.push(0.0);
    // g(u-) f(u) and ∫_0^u f g_s' on the common refinement
    let smooth_prod = g.smooth.mul(f)?.refine(&extra);
    let smooth_int = f
        .mul(&g.smooth.derivative())?
        .integral_from(0.0)?
        .refine(&smooth_prod.breaks().to_vec());
    let fr = f.refine(smooth_prod.breaks());

    let breaks = smooth_prod.breaks().to_vec();
    let mut pieces = Vec::with_capacity(breaks.len() - 1);
    for (i, w) in breaks.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        // jumps strictly to the left of the open piece add to g(u-)
        let left_jumps: f64 = g.jumps.iter().filter(|j| j.0 <= a).map(|j| j.1).sum();
        // atoms of ∫_0^u over the open piece, as an oriented constant
        let atoms: f64 = if a >= 0.0 {
            g.jumps
                .iter()
                .filter(|j| j.0 >= 0.0 && j.0 <= a)
                .map(|j| f.eval(j.0).map(|fv| fv * j.1))
                .sum::<Result<f64>>()?
        } else {
            debug_assert!(b <= 0.0);
            -g.jumps
                .iter()
                .filter(|j| j.0 >= b && j.0 < 0.0)
                .map(|j| f.eval(j.0).map(|fv| fv * j.1))
                .sum::<Result<f64>>()?
        };
        let piece = smooth_prod.pieces()[i]
            .add(&fr.pieces()[i].scale(left_jumps))
            .sub(&smooth_int.pieces()[i])
            .add_constant(-atoms);
        pieces.push(piece);
    }
    let raw = PiecewisePoly::new(breaks, pieces, false)?;
    let at_zero = raw.eval(0.0)?;
    let shifted = raw.add_constant(-at_zero);
    PiecewisePoly::continuous(shifted.breaks().to_vec(), shifted.pieces().to_vec())
        .map(|t| t.simplify())
        .map_err(|e| Error::Construction(format!("T_g result not continuous: {e}")))
}

/// Kruzhkov entropy `|u - k|` with its convective flux
/// `sign(u - k)(φ(u) - φ(k))` and diffusive part `|A(u) - A(k)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct KruzhkovPair {
    pub k: f64,
    pub eta: PiecewisePoly,
    pub flux: PiecewisePoly,
    pub diffusion: PiecewisePoly,
}

pub fn kruzhkov_pair(
    flux: &PiecewisePoly,
    diff_primitive: &PiecewisePoly,
    k: f64,
) -> Result<KruzhkovPair> {
    let (lo, hi) = flux.range();
    let eta = PiecewisePoly::from_poly(Poly::linear(-k, 1.0), lo, hi)?
        .times_sign(k)
        .and_then(|e| PiecewisePoly::continuous(e.breaks().to_vec(), e.pieces().to_vec()))?;
    let fk = flux.eval(k)?;
    let q = flux.add_constant(-fk).times_sign(k)?;
    let q = PiecewisePoly::continuous(q.breaks().to_vec(), q.pieces().to_vec()).unwrap_or(q);
    let ak = diff_primitive.eval(k)?;
    let big_q = diff_primitive.add_constant(-ak).abs();
    Ok(KruzhkovPair {
        k,
        eta,
        flux: q,
        diffusion: big_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burgers(lo: f64, hi: f64) -> PiecewisePoly {
        PiecewisePoly::from_poly(Poly::new(vec![0.0, 0.0, 0.5]), lo, hi).unwrap()
    }

    #[test]
    fn stieltjes_smooth_unit_integrand() {
        let g = BVFunction::smooth(burgers(-1.0, 3.0)).unwrap();
        let one = PiecewisePoly::constant(1.0, -1.0, 3.0).unwrap();
        let v = stieltjes_integral(&one, &g, 2.0).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn stieltjes_jump_only() {
        let f = PiecewisePoly::from_poly(Poly::new(vec![0.0, 0.0, 1.0]), -1.0, 3.0).unwrap();
        let g = BVFunction::sign_shift(1.0, -1.0, 3.0).unwrap();
        assert_eq!(stieltjes_integral(&f, &g, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn stieltjes_empty_interval() {
        let f = burgers(-1.0, 1.0);
        let g = BVFunction::sign_shift(0.0, -1.0, 1.0).unwrap();
        assert_eq!(stieltjes_integral(&f, &g, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn stieltjes_jump_at_origin_orientation() {
        // jump at 0 is in [0, u) for u > 0 but not in [u, 0) for u < 0
        let f = PiecewisePoly::constant(3.0, -1.0, 1.0).unwrap();
        let g = BVFunction::sign_shift(0.0, -1.0, 1.0).unwrap();
        assert_eq!(stieltjes_integral(&f, &g, 0.5).unwrap(), 6.0);
        assert_eq!(stieltjes_integral(&f, &g, -0.5).unwrap(), 0.0);
    }

    #[test]
    fn tg_of_constant_vanishes() {
        let f = PiecewisePoly::constant(2.5, -1.0, 1.0).unwrap();
        let g = BVFunction::sign_shift(0.3, -1.0, 1.0).unwrap();
        let t = apply_tg(&g, &f).unwrap();
        for u in [-1.0, -0.2, 0.0, 0.3, 0.31, 1.0] {
            assert!(t.eval(u).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn tg_sign_matches_kruzhkov_flux() {
        let f = burgers(-2.0, 2.0);
        for k in [-1.5, -0.3, 0.0, 0.8] {
            let g = BVFunction::sign_shift(k, -2.0, 2.0).unwrap();
            let t = apply_tg(&g, &f).unwrap();
            let fk = 0.5 * k * k;
            let c = -((0.0f64 - k).signum() * (0.0 - fk));
            for i in 0..=80 {
                let u = -2.0 + 0.05 * i as f64;
                let want = (u - k).signum() * (0.5 * u * u - fk) + c;
                assert!((t.eval(u).unwrap() - want).abs() < 1e-12, "k={k} u={u}");
            }
        }
    }

    #[test]
    fn tg_rejects_discontinuous_argument() {
        let f = PiecewisePoly::new(
            vec![-1.0, 0.0, 1.0],
            vec![Poly::constant(0.0), Poly::constant(1.0)],
            false,
        )
        .unwrap();
        let g = BVFunction::sign_shift(0.5, -1.0, 1.0).unwrap();
        assert!(matches!(apply_tg(&g, &f), Err(Error::Contract(_))));
    }

    #[test]
    fn kruzhkov_stefan_at_zero() {
        let a = PiecewisePoly::positive_part_of_shift(0.0, -1.0, 1.0).unwrap();
        let phi = PiecewisePoly::constant(0.0, -1.0, 1.0).unwrap();
        let kp = kruzhkov_pair(&phi, &a, 0.0).unwrap();
        for u in [-0.7, -0.1, 0.0, 0.4, 1.0] {
            assert_eq!(kp.diffusion.eval(u).unwrap(), u.max(0.0));
            assert_eq!(kp.eta.eval(u).unwrap(), u.abs());
        }
    }

    #[test]
    fn kruzhkov_k_below_range() {
        let phi = burgers(0.0, 1.0);
        let a = PiecewisePoly::identity(0.0, 1.0).unwrap();
        let kp = kruzhkov_pair(&phi, &a, 0.0).unwrap();
        for u in [0.1, 0.5, 1.0] {
            assert!((kp.flux.eval(u).unwrap() - 0.5 * u * u).abs() < 1e-15);
            assert!((kp.eta.eval(u).unwrap() - u).abs() < 1e-15);
        }
    }

    #[test]
    fn kruzhkov_burgers_k_one() {
        let kp = kruzhkov_pair(
            &burgers(-2.0, 2.0),
            &PiecewisePoly::constant(0.0, -2.0, 2.0).unwrap(),
            1.0,
        )
        .unwrap();
        for i in 0..=40 {
            let u = -2.0 + 0.1 * i as f64;
            // case split: u < 1 and u >= 1
            let want = if u < 1.0 {
                -(0.5 * u * u - 0.5)
            } else {
                0.5 * u * u - 0.5
            };
            assert!((kp.flux.eval(u).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn total_variation_of_sign() {
        let g = BVFunction::sign_shift(0.2, -1.0, 1.0).unwrap();
        assert_eq!(g.total_variation().unwrap(), 2.0);
        let h = BVFunction::smooth(burgers(-1.0, 2.0)).unwrap();
        assert!((h.total_variation().unwrap() - 2.5).abs() < 1e-14);
    }
}
