//! Dense polynomials in the monomial basis, `c[0] + c[1] u + c[2] u^2 + ...`.

use serde::{Deserialize, Serialize};

/// Roots closer than this are reported once.
pub const ROOT_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Builds a polynomial, trimming exact trailing zeros.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        Poly::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Affine means degree at most one, decided on the stored coefficients.
    pub fn is_affine(&self) -> bool {
        self.coeffs.iter().skip(2).all(|&c| c == 0.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        Poly::new(out)
    }

    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let p = self.antiderivative();
        p.eval(b) - p.eval(a)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + other.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add_constant(&self, c: f64) -> Poly {
        let mut out = self.coeffs.clone();
        out[0] += c;
        Poly::new(out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Largest coefficient magnitude weighted by `|u|^k` on `[lo, hi]`; used as
    /// the scale for relative comparisons of values.
    pub fn magnitude_on(&self, lo: f64, hi: f64) -> f64 {
        let r = lo.abs().max(hi.abs()).max(1.0);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * r.powi(k as i32))
            .fold(0.0, f64::max)
    }

    /// Real roots in the closed interval `[lo, hi]`, sorted, merged within
    /// [`ROOT_MERGE_TOL`]. The zero polynomial reports no roots.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let raw = match self.degree() {
            0 => Vec::new(),
            1 => vec![-self.coeffs[0] / self.coeffs[1]],
            2 => quadratic_roots(self.coeffs[0], self.coeffs[1], self.coeffs[2]),
            3 => cubic_roots(
                self.coeffs[0],
                self.coeffs[1],
                self.coeffs[2],
                self.coeffs[3],
            ),
            _ => return self.bracketed_roots(lo, hi),
        };
        let span_tol = ROOT_MERGE_TOL * (1.0 + lo.abs().max(hi.abs()));
        let mut roots: Vec<f64> = raw
            .into_iter()
            .map(|r| self.polish(r))
            .filter(|r| r.is_finite() && *r >= lo - span_tol && *r <= hi + span_tol)
            .map(|r| r.clamp(lo, hi))
            .collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_MERGE_TOL * (1.0 + b.abs()));
        roots
    }

    fn polish(&self, mut r: f64) -> f64 {
        let d = self.derivative();
        for _ in 0..4 {
            let fp = d.eval(r);
            if fp == 0.0 {
                break;
            }
            let step = self.eval(r) / fp;
            if !step.is_finite() {
                break;
            }
            let next = r - step;
            if self.eval(next).abs() >= self.eval(r).abs() {
                break;
            }
            r = next;
        }
        r
    }

    /// Roots of higher-degree polynomials: split `[lo, hi]` at the roots of the
    /// derivative and bisect every monotone segment with a sign change.
    fn bracketed_roots(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut knots = vec![lo];
        knots.extend(self.derivative().real_roots_in(lo, hi));
        knots.push(hi);
        let scale = self.magnitude_on(lo, hi);
        let mut roots = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa.abs() <= 1e-14 * scale {
                roots.push(a);
            }
            if fa.signum() * fb.signum() < 0.0 {
                let (mut x0, mut x1, mut f0) = (a, b, fa);
                for _ in 0..200 {
                    let mid = 0.5 * (x0 + x1);
                    let fm = self.eval(mid);
                    if fm == 0.0 || (x1 - x0) <= f64::EPSILON * mid.abs().max(1e-300) {
                        x0 = mid;
                        x1 = mid;
                        break;
                    }
                    if fm.signum() == f0.signum() {
                        x0 = mid;
                        f0 = fm;
                    } else {
                        x1 = mid;
                    }
                }
                roots.push(0.5 * (x0 + x1));
            }
        }
        if self.eval(hi).abs() <= 1e-14 * scale {
            roots.push(hi);
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_MERGE_TOL * (1.0 + b.abs()));
        roots
    }
}

fn quadratic_roots(c: f64, b: f64, a: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // near-double roots may show up as a tiny negative discriminant
        if disc > -1e-14 * (b * b).max((4.0 * a * c).abs()) {
            return vec![-b / (2.0 * a)];
        }
        return Vec::new();
    }
    let sq = disc.sqrt();
    let sign = if b < 0.0 { -1.0 } else { 1.0 };
    let q = -0.5 * (b + sign * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

fn cubic_roots(d: f64, c: f64, b: f64, a: f64) -> Vec<f64> {
    // x^3 + p2 x^2 + p1 x + p0
    let (p2, p1, p0) = (b / a, c / a, d / a);
    let shift = p2 / 3.0;
    // depressed: t^3 + p t + q with x = t - shift
    let p = p1 - p2 * p2 / 3.0;
    let q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut out = Vec::with_capacity(3);
    if p == 0.0 && q == 0.0 {
        out.push(-shift);
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        out.push(u + v - shift);
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        for k in 0..3 {
            out.push(m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_trailing_zeros() {
        let p = Poly::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(p.is_affine());
        assert!(Poly::new(vec![]).is_zero());
    }

    #[test]
    fn derivative_and_integral() {
        let p = Poly::new(vec![1.0, 0.0, 3.0]);
        assert_eq!(p.derivative().coeffs(), &[0.0, 6.0]);
        assert!((p.integrate(0.0, 2.0) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_roots_sorted() {
        // (u-1)(u+2) = u^2 + u - 2
        let r = Poly::new(vec![-2.0, 1.0, 1.0]).real_roots_in(-5.0, 5.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2.0).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cubic_three_roots() {
        // (u-1)(u-2)(u+0.5)
        let p = Poly::new(vec![1.0])
            .mul(&Poly::linear(-1.0, 1.0))
            .mul(&Poly::linear(-2.0, 1.0))
            .mul(&Poly::linear(0.5, 1.0));
        let r = p.real_roots_in(-3.0, 3.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-0.5, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn cubic_double_root_merged() {
        // (u-1)^2 (u+1)
        let p = Poly::linear(-1.0, 1.0)
            .mul(&Poly::linear(-1.0, 1.0))
            .mul(&Poly::linear(1.0, 1.0));
        let r = p.real_roots_in(-2.0, 2.0);
        assert_eq!(r.len(), 2, "{r:?}");
    }

    #[test]
    fn quintic_by_bracketing() {
        let mut p = Poly::constant(1.0);
        for z in [-1.5, -0.2, 0.3, 1.1, 1.9] {
            p = p.mul(&Poly::linear(-z, 1.0));
        }
        let r = p.real_roots_in(-2.0, 2.0);
        assert_eq!(r.len(), 5);
        for (got, want) in r.iter().zip([-1.5, -0.2, 0.3, 1.1, 1.9]) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn roots_restricted_to_interval() {
        let r = Poly::new(vec![-2.0, 1.0, 1.0]).real_roots_in(0.0, 5.0);
        assert_eq!(r.len(), 1);
    }
}
