use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a grid function lives: a periodic cell `[x_lo, x_lo + length)` or a
/// finite box `[x_lo, x_hi]` outside of which the function is taken to be 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Periodic { x_lo: f64, length: f64 },
    Box { x_lo: f64, x_hi: f64 },
}

impl Domain {
    pub fn periodic(x_lo: f64, length: f64) -> Self {
        Domain::Periodic { x_lo, length }
    }

    pub fn boxed(x_lo: f64, x_hi: f64) -> Self {
        Domain::Box { x_lo, x_hi }
    }

    pub fn x_lo(&self) -> f64 {
        match *self {
            Domain::Periodic { x_lo, .. } | Domain::Box { x_lo, .. } => x_lo,
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Domain::Periodic { length, .. } => length,
            Domain::Box { x_lo, x_hi } => x_hi - x_lo,
        }
    }

    pub fn x_hi(&self) -> f64 {
        self.x_lo() + self.length()
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Domain::Periodic { .. })
    }
}

/// Cell averages on a uniform 1D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    domain: Domain,
    values: Vec<f64>,
}

// 3-point Gauss-Legendre on [-1/2, 1/2], weights summing to 1
const GAUSS_NODES: [f64; 3] = [-0.387_298_334_620_741_7, 0.0, 0.387_298_334_620_741_7];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

impl GridFn {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 cells, got {}",
                values.len()
            )));
        }
        if !(domain.length() > 0.0) || !domain.x_lo().is_finite() {
            return Err(Error::Domain(format!("bad domain {domain:?}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at cell {i}")));
        }
        Ok(GridFn { domain, values })
    }

    pub fn zeros(domain: Domain, n: usize) -> Result<Self> {
        Self::new(domain, vec![0.0; n])
    }

    pub fn constant(domain: Domain, n: usize, c: f64) -> Result<Self> {
        Self::new(domain, vec![c; n])
    }

    /// Cell averages of `f` by 3-point Gauss quadrature on every cell.
    pub fn from_cell_average(domain: Domain, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dx = domain.length() / n as f64;
        let values = (0..n)
            .map(|i| {
                let xc = domain.x_lo() + (i as f64 + 0.5) * dx;
                GAUSS_NODES
                    .iter()
                    .zip(GAUSS_WEIGHTS)
                    .map(|(s, w)| w * f(xc + s * dx))
                    .sum()
            })
            .collect();
        Self::new(domain, values)
    }

    /// Point values of `f` at cell centres.
    pub fn from_centers(domain: Domain, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dx = domain.length() / n as f64;
        let values = (0..n)
            .map(|i| f(domain.x_lo() + (i as f64 + 0.5) * dx))
            .collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.domain.length() / self.values.len() as f64
    }

    pub fn is_periodic(&self) -> bool {
        self.domain.is_periodic()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.domain.x_lo() + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.center(i))
    }

    /// New grid function on the same grid.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Shape(format!(
                "{} values for a {}-cell grid",
                values.len(),
                self.values.len()
            )));
        }
        Self::new(self.domain, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFn {
            domain: self.domain,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn same_grid(&self, other: &GridFn) -> bool {
        self.domain == other.domain && self.values.len() == other.values.len()
    }

    fn check_same_grid(&self, other: &GridFn) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "grids differ: {:?}/{} vs {:?}/{}",
                self.domain,
                self.len(),
                other.domain,
                other.len()
            )))
        }
    }

    pub fn zip_with(&self, other: &GridFn, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(GridFn {
            domain: self.domain,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &GridFn) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFn) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn integral(&self) -> f64 {
        self.sum() * self.dx()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.dx()
    }

    pub fn l1_distance(&self, other: &GridFn) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.dx())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean over the period cell.
    pub fn mean(&self) -> Result<f64> {
        if !self.is_periodic() {
            return Err(Error::Domain(
                "mean is defined on periodic domains; use mean_over_box".into(),
            ));
        }
        Ok(self.integral() / self.domain.length())
    }

    /// Average over the whole box, zero extension outside is irrelevant here.
    pub fn mean_over_box(&self) -> f64 {
        self.integral() / self.domain.length()
    }

    /// Cyclic shift: result(x) = self(x + k dx). Periodic domains only.
    pub fn shift_cells(&self, k: isize) -> Result<Self> {
        if !self.is_periodic() {
            return Err(Error::Domain("cyclic shift needs a periodic domain".into()));
        }
        let n = self.len() as isize;
        let values = (0..n)
            .map(|i| self.values[(i + k).rem_euclid(n) as usize])
            .collect();
        Ok(GridFn {
            domain: self.domain,
            values,
        })
    }

    /// Value of the piecewise-constant reconstruction at `x` (periodic wrap or
    /// zero outside a box).
    pub fn value_at(&self, x: f64) -> f64 {
        let rel = (x - self.domain.x_lo()) / self.dx();
        let i = rel.floor();
        match self.domain {
            Domain::Periodic { .. } => {
                let n = self.len() as f64;
                self.values[i.rem_euclid(n) as usize % self.len()]
            }
            Domain::Box { .. } => {
                if i < 0.0 || i >= self.len() as f64 {
                    0.0
                } else {
                    self.values[i as usize]
                }
            }
        }
    }

    /// Linear interpolation between cell centres (periodic wrap, zero beyond
    /// a box).
    pub fn interpolate(&self, x: f64) -> f64 {
        let s = (x - self.domain.x_lo()) / self.dx() - 0.5;
        let i0 = s.floor();
        let frac = s - i0;
        let at = |i: f64| -> f64 {
            match self.domain {
                Domain::Periodic { .. } => {
                    self.values[(i as i64).rem_euclid(self.len() as i64) as usize]
                }
                Domain::Box { .. } => {
                    if i < 0.0 || i >= self.len() as f64 {
                        0.0
                    } else {
                        self.values[i as usize]
                    }
                }
            }
        };
        (1.0 - frac) * at(i0) + frac * at(i0 + 1.0)
    }

    /// `x,value` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.center(i), v)?;
        }
        Ok(())
    }

    /// Reads the layout written by [`GridFn::write_csv`]; cell centres must be
    /// uniformly spaced.
    pub fn read_csv<R: BufRead>(r: R, periodic: bool) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::Parse(format!("line {}: missing column", lineno + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            xs.push(parse(parts.next())?);
            vs.push(parse(parts.next())?);
        }
        if xs.len() < 2 {
            return Err(Error::Parse("need at least two rows".into()));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        let x_lo = xs[0] - 0.5 * dx;
        let length = dx * xs.len() as f64;
        let domain = if periodic {
            Domain::periodic(x_lo, length)
        } else {
            Domain::boxed(x_lo, x_lo + length)
        };
        Self::new(domain, vs)
    }

    /// Little-endian layout: cell count (u64), dx (f64), values (f64 each).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.len());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.dx().to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Inverse of [`GridFn::to_bytes`]; the left edge and the domain kind are
    /// not part of the layout and must be supplied.
    pub fn from_bytes(bytes: &[u8], x_lo: f64, periodic: bool) -> Result<Self> {
        if bytes.len() < 16 {
            return Err(Error::Parse("truncated header".into()));
        }
        let n = u64::from_le_bytes(bytes[0..8].try_into().unwrap()) as usize;
        let dx = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
        if bytes.len() != 16 + 8 * n {
            return Err(Error::Parse(format!(
                "expected {} bytes for {n} cells, got {}",
                16 + 8 * n,
                bytes.len()
            )));
        }
        let values = bytes[16..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let length = dx * n as f64;
        let domain = if periodic {
            Domain::periodic(x_lo, length)
        } else {
            Domain::boxed(x_lo, x_lo + length)
        };
        Self::new(domain, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mean_of_constant() {
        let u = GridFn::constant(Domain::periodic(0.0, 3.0), 30, 0.7).unwrap();
        assert!((u.mean().unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn mean_of_sine_vanishes() {
        let u = GridFn::from_cell_average(Domain::periodic(0.0, 5.0), 200, |x| {
            (2.0 * PI * x / 5.0).sin()
        })
        .unwrap();
        assert!(u.mean().unwrap().abs() < 1e-12);
    }

    #[test]
    fn mean_requires_periodic() {
        let u = GridFn::zeros(Domain::boxed(0.0, 1.0), 4).unwrap();
        assert!(matches!(u.mean(), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_tiny_or_nonfinite() {
        assert!(GridFn::new(Domain::periodic(0.0, 1.0), vec![1.0]).is_err());
        assert!(GridFn::new(Domain::periodic(0.0, 1.0), vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn cyclic_shift() {
        let u = GridFn::new(Domain::periodic(0.0, 4.0), vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(u.shift_cells(1).unwrap().values(), &[1.0, 2.0, 3.0, 0.0]);
        assert_eq!(u.shift_cells(-1).unwrap().values(), &[3.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn csv_round_trip() {
        let u = GridFn::from_centers(Domain::periodic(-1.0, 2.0), 8, |x| x * x).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let back = GridFn::read_csv(buf.as_slice(), true).unwrap();
        assert_eq!(back.values(), u.values());
        assert!((back.dx() - u.dx()).abs() < 1e-14);
    }

    #[test]
    fn binary_layout() {
        let u = GridFn::new(Domain::boxed(0.0, 1.0), vec![0.25, -1.5]).unwrap();
        let b = u.to_bytes();
        assert_eq!(b.len(), 32);
        assert_eq!(&b[0..8], &2u64.to_le_bytes());
        assert_eq!(&b[8..16], &0.5f64.to_le_bytes());
        let back = GridFn::from_bytes(&b, 0.0, false).unwrap();
        assert_eq!(back, u);
    }
}
