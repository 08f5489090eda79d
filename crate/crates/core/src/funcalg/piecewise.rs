use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::{Error, Result};

/// Relative tolerance for the value match at shared breakpoints of a
/// continuous piecewise polynomial.
pub const CONTINUITY_TOL: f64 = 1e-12;

/// Default cap on the degree of model functions (flux, diffusion primitive).
pub const DEFAULT_MAX_DEGREE: usize = 3;

/// Piecewise polynomial on `[breaks[0], breaks[last]]`. Piece `i` lives on
/// `[breaks[i], breaks[i + 1]]`; at an interior breakpoint the left piece
/// supplies the value.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    pieces: Vec<Poly>,
    continuous: bool,
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Poly>, continuous: bool) -> Result<Self> {
        if breaks.len() < 2 || pieces.len() + 1 != breaks.len() {
            return Err(Error::Contract(format!(
                "{} breakpoints for {} pieces",
                breaks.len(),
                pieces.len()
            )));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Contract(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        let f = PiecewisePoly {
            breaks,
            pieces,
            continuous,
        };
        if continuous {
            if let Some((b, jump)) = f.worst_breakpoint_jump() {
                return Err(Error::Contract(format!(
                    "pieces disagree by {jump:e} at breakpoint {b}"
                )));
            }
        }
        Ok(f)
    }

    /// Continuous function made of the given pieces; fails if they do not match.
    pub fn continuous(breaks: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        Self::new(breaks, pieces, true)
    }

    pub fn from_poly(p: Poly, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![p], true)
    }

    pub fn constant(c: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::from_poly(Poly::constant(c), lo, hi)
    }

    pub fn identity(lo: f64, hi: f64) -> Result<Self> {
        Self::from_poly(Poly::linear(0.0, 1.0), lo, hi)
    }

    /// `u ↦ max(u - k, 0)`, the Stefan diffusion primitive when `k = 0`.
    pub fn positive_part_of_shift(k: f64, lo: f64, hi: f64) -> Result<Self> {
        if k <= lo {
            return Self::from_poly(Poly::linear(-k, 1.0), lo, hi);
        }
        if k >= hi {
            return Self::constant(0.0, lo, hi);
        }
        Self::continuous(vec![lo, k, hi], vec![Poly::zero(), Poly::linear(-k, 1.0)])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn lo(&self) -> f64 {
        self.breaks[0]
    }

    pub fn hi(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo(), self.hi())
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// Index of the piece supplying the value at `u` (left-continuous).
    pub fn piece_index(&self, u: f64) -> Result<usize> {
        if !(u >= self.lo() && u <= self.hi()) {
            return Err(Error::Range {
                value: u,
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        Ok(self.piece_index_unchecked(u))
    }

    #[inline]
    fn piece_index_unchecked(&self, u: f64) -> usize {
        let idx = self.breaks.partition_point(|&b| b < u);
        idx.clamp(1, self.pieces.len()) - 1
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        Ok(self.pieces[self.piece_index(u)?].eval(u))
    }

    /// Evaluation without the range check, for hot loops where the caller has
    /// already established the range; values outside are extrapolated from
    /// the end pieces.
    #[inline]
    pub fn eval_unchecked(&self, u: f64) -> f64 {
        self.pieces[self.piece_index_unchecked(u)].eval(u)
    }

    /// Right limit at `u` (the value of the piece to the right of a breakpoint).
    pub fn eval_right(&self, u: f64) -> Result<f64> {
        self.piece_index(u)?;
        let idx = self.breaks.partition_point(|&b| b <= u);
        let i = idx.clamp(1, self.pieces.len()) - 1;
        Ok(self.pieces[i].eval(u))
    }

    fn worst_breakpoint_jump(&self) -> Option<(f64, f64)> {
        let mut worst: Option<(f64, f64)> = None;
        for i in 1..self.pieces.len() {
            let b = self.breaks[i];
            let (l, r) = (self.pieces[i - 1].eval(b), self.pieces[i].eval(b));
            let scale = 1.0
                + self.pieces[i - 1]
                    .magnitude_on(b, b)
                    .max(self.pieces[i].magnitude_on(b, b));
            let jump = (l - r).abs();
            if jump > CONTINUITY_TOL * scale && worst.map_or(true, |(_, w)| jump > w) {
                worst = Some((b, jump));
            }
        }
        worst
    }

    /// Same function with extra breakpoints inserted (points outside the open
    /// range or already present are ignored).
    pub fn refine(&self, points: &[f64]) -> PiecewisePoly {
        let mut breaks = self.breaks.clone();
        breaks.extend(
            points
                .iter()
                .copied()
                .filter(|&p| p > self.lo() && p < self.hi()),
        );
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let pieces = breaks
            .windows(2)
            .map(|w| self.pieces[self.piece_index_unchecked(0.5 * (w[0] + w[1]))].clone())
            .collect();
        PiecewisePoly {
            breaks,
            pieces,
            continuous: self.continuous,
        }
    }

    fn check_same_range(&self, other: &PiecewisePoly) -> Result<()> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(Error::Contract(format!(
                "ranges differ: [{}, {}] vs [{}, {}]",
                self.lo(),
                self.hi(),
                other.lo(),
                other.hi()
            )));
        }
        Ok(())
    }

    /// Pointwise combination of two functions on the same range over their
    /// common refinement.
    pub fn combine(
        &self,
        other: &PiecewisePoly,
        op: impl Fn(&Poly, &Poly) -> Poly,
    ) -> Result<PiecewisePoly> {
        self.check_same_range(other)?;
        let a = self.refine(&other.breaks);
        let b = other.refine(&self.breaks);
        debug_assert_eq!(a.breaks, b.breaks);
        let pieces = a
            .pieces
            .iter()
            .zip(&b.pieces)
            .map(|(p, q)| op(p, q))
            .collect();
        Ok(PiecewisePoly {
            breaks: a.breaks,
            pieces,
            continuous: self.continuous && other.continuous,
        })
    }

    pub fn add(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        self.combine(other, Poly::add)
    }

    pub fn sub(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        self.combine(other, Poly::sub)
    }

    pub fn mul(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        self.combine(other, Poly::mul)
    }

    pub fn scale(&self, s: f64) -> PiecewisePoly {
        self.map_pieces(|p| p.scale(s))
    }

    pub fn add_constant(&self, c: f64) -> PiecewisePoly {
        self.map_pieces(|p| p.add_constant(c))
    }

    fn map_pieces(&self, f: impl Fn(&Poly) -> Poly) -> PiecewisePoly {
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(f).collect(),
            continuous: self.continuous,
        }
    }

    /// Piecewise derivative. The result is flagged continuous only when the
    /// one-sided derivatives agree at every breakpoint.
    pub fn derivative(&self) -> PiecewisePoly {
        let mut d = PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(Poly::derivative).collect(),
            continuous: false,
        };
        d.continuous = d.worst_breakpoint_jump().is_none();
        d
    }

    /// Continuous antiderivative vanishing at `base`.
    pub fn integral_from(&self, base: f64) -> Result<PiecewisePoly> {
        self.piece_index(base)?;
        let mut pieces: Vec<Poly> = Vec::with_capacity(self.pieces.len());
        let mut acc = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let anti = p.antiderivative();
            let left = self.breaks[i];
            pieces.push(anti.add_constant(acc - anti.eval(left)));
            acc += anti.eval(self.breaks[i + 1]) - anti.eval(left);
        }
        let f = PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces,
            continuous: true,
        };
        let offset = f.eval(base)?;
        Ok(f.add_constant(-offset))
    }

    /// `∫_a^b f(u) du` (oriented).
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        let anti = self.integral_from(self.lo())?;
        Ok(anti.eval(b)? - anti.eval(a)?)
    }

    /// Breakpoints augmented with the real roots of every piece.
    fn with_root_breaks(&self) -> PiecewisePoly {
        let mut roots = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if !p.is_zero() {
                roots.extend(p.real_roots_in(self.breaks[i], self.breaks[i + 1]));
            }
        }
        self.refine(&roots)
    }

    fn sign_split(&self, flip: impl Fn(&Poly) -> Poly) -> PiecewisePoly {
        let split = self.with_root_breaks();
        let pieces = split
            .breaks
            .windows(2)
            .zip(&split.pieces)
            .map(|(w, p)| {
                if p.eval(0.5 * (w[0] + w[1])) < 0.0 {
                    flip(p)
                } else {
                    p.clone()
                }
            })
            .collect();
        PiecewisePoly {
            breaks: split.breaks,
            pieces,
            continuous: self.continuous,
        }
    }

    /// `|f|`, splitting pieces at real roots.
    pub fn abs(&self) -> PiecewisePoly {
        self.sign_split(|p| p.scale(-1.0))
    }

    /// `max(f, 0)`, splitting pieces at real roots.
    pub fn positive_part(&self) -> PiecewisePoly {
        self.sign_split(|_| Poly::zero())
    }

    /// Multiplies by `sign(u - k)`; the piece boundary at `k` is inserted.
    pub fn times_sign(&self, k: f64) -> Result<PiecewisePoly> {
        self.piece_index(k)?;
        let split = self.refine(&[k]);
        let pieces = split
            .breaks
            .windows(2)
            .zip(&split.pieces)
            .map(|(w, p)| if w[1] <= k { p.scale(-1.0) } else { p.clone() })
            .collect();
        Ok(PiecewisePoly {
            breaks: split.breaks,
            pieces,
            continuous: false,
        })
    }

    /// `max |f'|` over the range, from piece endpoints and the interior
    /// critical points of `f'`.
    pub fn max_abs_derivative(&self) -> f64 {
        let d = self.derivative();
        d.breaks
            .windows(2)
            .zip(&d.pieces)
            .flat_map(|(w, p)| {
                let mut pts = vec![w[0], w[1]];
                pts.extend(p.derivative().real_roots_in(w[0], w[1]));
                pts.into_iter().map(move |u| p.eval(u).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Minimum and maximum over the range.
    pub fn extrema(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (w, p) in self.breaks.windows(2).zip(&self.pieces) {
            let mut pts = vec![w[0], w[1]];
            pts.extend(p.derivative().real_roots_in(w[0], w[1]));
            for u in pts {
                let v = p.eval(u);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Minimum over each piece, used for nonnegativity checks.
    pub fn min_value(&self) -> f64 {
        self.extrema().0
    }

    /// Merges adjacent pieces that carry identical polynomials.
    pub fn simplify(&self) -> PiecewisePoly {
        let mut breaks = vec![self.breaks[0]];
        let mut pieces: Vec<Poly> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if pieces.last() == Some(p) {
                *breaks.last_mut().unwrap() = self.breaks[i + 1];
            } else {
                pieces.push(p.clone());
                breaks.push(self.breaks[i + 1]);
            }
        }
        PiecewisePoly {
            breaks,
            pieces,
            continuous: self.continuous,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PiecewiseRepr::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: PiecewiseRepr = serde_json::from_str(text)?;
        repr.try_into()
    }
}

/// Text layout: one entry per piece with its left breakpoint and monomial
/// coefficients, followed by the right end of the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseRepr {
    pub pieces: Vec<PieceRepr>,
    pub end: f64,
    #[serde(default = "default_true")]
    pub continuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceRepr {
    pub breakpoint: f64,
    pub coefficients: Vec<f64>,
}

fn default_true() -> bool {
    true
}

impl From<&PiecewisePoly> for PiecewiseRepr {
    fn from(f: &PiecewisePoly) -> Self {
        PiecewiseRepr {
            pieces: f
                .breaks
                .iter()
                .zip(&f.pieces)
                .map(|(&b, p)| PieceRepr {
                    breakpoint: b,
                    coefficients: p.coeffs().to_vec(),
                })
                .collect(),
            end: f.hi(),
            continuous: f.continuous,
        }
    }
}

impl TryFrom<PiecewiseRepr> for PiecewisePoly {
    type Error = Error;

    fn try_from(r: PiecewiseRepr) -> Result<Self> {
        let mut breaks: Vec<f64> = r.pieces.iter().map(|p| p.breakpoint).collect();
        breaks.push(r.end);
        let pieces = r
            .pieces
            .into_iter()
            .map(|p| Poly::new(p.coefficients))
            .collect();
        PiecewisePoly::new(breaks, pieces, r.continuous)
    }
}

impl Serialize for PiecewisePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PiecewiseRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewisePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PiecewiseRepr::deserialize(d)?;
        repr.try_into().map_err(serde::de::Error::custom)
    }
}
