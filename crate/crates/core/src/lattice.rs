//! Full-rank lattices `L = B ℤ^d` (basis vectors are the columns of `B`),
//! their duals, fundamental cells and period checks for grid data.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Domain, GridFn};

/// Default tolerance on lattice coordinates for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Bound on `|det B| / Π |e_k|` below which a basis is treated as singular.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Largest divisor `k` tried when looking for sub-periods `e / k`.
pub const DEFAULT_SUBPERIOD_SEARCH: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    basis: DMatrix<f64>,
}

/// Config layout: one list of coordinates per basis vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeRepr(pub Vec<Vec<f64>>);

impl Lattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != basis.ncols() || basis.nrows() == 0 {
            return Err(Error::Degeneracy(format!(
                "basis must be square, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        let norms: f64 = basis.column_iter().map(|c| c.norm()).product();
        let det = basis.determinant();
        if !(norms > 0.0) || !det.is_finite() || (det / norms).abs() <= DEGENERACY_TOL {
            return Err(Error::Degeneracy(format!(
                "singular basis (det = {det:e}, column-norm product = {norms:e})"
            )));
        }
        Ok(Lattice { basis })
    }

    /// Lattice spanned by the given vectors.
    pub fn from_vectors(vectors: &[Vec<f64>]) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::Degeneracy(format!("need {d} vectors of length {d}")));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| vectors[j][i]))
    }

    pub fn one_d(period: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, period))
    }

    pub fn identity(d: usize) -> Self {
        Lattice {
            basis: DMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<f64>> {
        self.basis
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    pub fn to_repr(&self) -> LatticeRepr {
        LatticeRepr(self.vectors())
    }

    pub fn determinant(&self) -> f64 {
        self.basis.determinant()
    }

    /// `{ξ : ξ·e ∈ ℤ for all e ∈ L}`, basis `(B⁻¹)ᵀ`.
    pub fn dual(&self) -> Result<Lattice> {
        let inv = self
            .basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degeneracy("basis not invertible".into()))?;
        Lattice::new(inv.transpose())
    }

    /// Lattice coordinates `z` with `B z = x`.
    pub fn coordinates(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Shape(format!(
                "vector of length {} in dimension {}",
                x.len(),
                self.dim()
            )));
        }
        self.basis
            .clone()
            .lu()
            .solve(&DVector::from_column_slice(x))
            .ok_or_else(|| Error::Degeneracy("basis not invertible".into()))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self.coordinates(x) {
            Ok(z) => z.iter().all(|c| (c - c.round()).abs() <= tol),
            Err(_) => false,
        }
    }

    /// `P_r = {Σ x_k e_k : -r/2 ≤ x_k < r/2}`.
    pub fn fundamental_cell(&self, r: usize) -> Result<Parallelepiped> {
        if r == 0 {
            return Err(Error::Contract("cell scale r must be at least 1".into()));
        }
        Ok(Parallelepiped {
            lattice: self.clone(),
            r: r as f64,
        })
    }
}

/// Half-open cell `{Σ x_k e_k : -r/2 ≤ x_k < r/2}`.
#[derive(Debug, Clone)]
pub struct Parallelepiped {
    lattice: Lattice,
    r: f64,
}

impl Parallelepiped {
    pub fn volume(&self) -> f64 {
        self.r.powi(self.lattice.dim() as i32) * self.lattice.determinant().abs()
    }

    /// Corner with all coordinates `-r/2`.
    pub fn corner(&self) -> Vec<f64> {
        let z = DVector::from_element(self.lattice.dim(), -0.5 * self.r);
        (self.lattice.basis() * z).iter().copied().collect()
    }

    /// Edge vectors `r e_k`.
    pub fn edges(&self) -> Vec<Vec<f64>> {
        self.lattice
            .vectors()
            .into_iter()
            .map(|v| v.into_iter().map(|c| c * self.r).collect())
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self.lattice.coordinates(x) {
            Ok(z) => z.iter().all(|&c| c >= -0.5 * self.r && c < 0.5 * self.r),
            Err(_) => false,
        }
    }

    /// 1D cells as an interval `[lo, hi)`.
    pub fn interval(&self) -> Option<(f64, f64)> {
        if self.lattice.dim() != 1 {
            return None;
        }
        let e = self.lattice.basis()[(0, 0)].abs();
        Some((-0.5 * self.r * e, 0.5 * self.r * e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodReport {
    pub period: f64,
    /// `‖p(· + e) - p‖₁` for the basis vector.
    pub period_difference: f64,
    /// `(k, ‖p(· + e/k) - p‖₁)` for the candidate sub-periods.
    pub subperiod_differences: Vec<(usize, f64)>,
    pub degenerate_constant: bool,
    pub is_period: bool,
    /// The lattice is exactly the group of periods on this grid.
    pub exact: bool,
}

/// `‖p(· + s) - p‖₁` with the shift `s` in cells; fractional shifts use linear
/// interpolation. Box domains compare only where both points are inside.
fn shifted_l1(p: &GridFn, s: f64) -> f64 {
    let n = p.len();
    let whole = s.floor();
    let frac = s - whole;
    let v = p.values();
    let mut acc = 0.0;
    for i in 0..n {
        let j0 = i as i64 + whole as i64;
        let j1 = j0 + 1;
        let at = |j: i64| -> Option<f64> {
            match p.domain() {
                Domain::Periodic { .. } => Some(v[j.rem_euclid(n as i64) as usize]),
                Domain::Box { .. } => (0..n as i64).contains(&j).then(|| v[j as usize]),
            }
        };
        let shifted = if frac == 0.0 {
            at(j0)
        } else {
            match (at(j0), at(j1)) {
                (Some(a), Some(b)) => Some((1.0 - frac) * a + frac * b),
                _ => None,
            }
        };
        if let Some(sv) = shifted {
            acc += (sv - v[i]).abs();
        }
    }
    acc * p.dx()
}

/// Checks that the 1D lattice `L` is a group of periods of `p` and that no
/// `e/k` (`k = 2..=max_k`) is a period, i.e. the group is exactly `L` on the
/// grid.
pub fn verify_period_group(
    p: &GridFn,
    lattice: &Lattice,
    tol: f64,
    max_k: usize,
) -> Result<PeriodReport> {
    if lattice.dim() != 1 {
        return Err(Error::Shape(format!(
            "grid functions are 1D, lattice has dimension {}",
            lattice.dim()
        )));
    }
    let period = lattice.basis()[(0, 0)].abs();
    let cells = period / p.dx();
    if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) || cells.round() < 1.0 {
        return Err(Error::Commensurability(format!(
            "period {period} is {cells} cells"
        )));
    }
    let period_difference = shifted_l1(p, cells.round());
    let subperiod_differences: Vec<(usize, f64)> = (2..=max_k)
        .map(|k| {
            let s = cells / k as f64;
            let s = if (s - s.round()).abs() < 1e-9 {
                s.round()
            } else {
                s
            };
            (k, shifted_l1(p, s))
        })
        .collect();
    let degenerate_constant = p.max() - p.min() <= tol;
    let is_period = period_difference <= tol;
    let exact =
        is_period && !degenerate_constant && subperiod_differences.iter().all(|&(_, d)| d > tol);
    Ok(PeriodReport {
        period,
        period_difference,
        subperiod_differences,
        degenerate_constant,
        is_period,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_is_self_dual() {
        let l = Lattice::identity(2);
        assert_eq!(l.dual().unwrap(), l);
    }

    #[test]
    fn one_d_dual() {
        let d = Lattice::one_d(5.0).unwrap().dual().unwrap();
        assert!((d.basis()[(0, 0)] - 0.2).abs() < 1e-16);
    }

    #[test]
    fn skew_dual_pairs_integrally() {
        let l = Lattice::from_vectors(&[vec![2.0, 0.0], vec![1.0, 3.0]]).unwrap();
        let d = l.dual().unwrap();
        let products = d.basis().transpose() * l.basis();
        for v in products.iter() {
            assert!((v - v.round()).abs() < 1e-9);
        }
        let dd = d.dual().unwrap();
        for e in l.vectors() {
            assert!(dd.contains(&e, MEMBERSHIP_TOL));
        }
        for e in dd.vectors() {
            assert!(l.contains(&e, MEMBERSHIP_TOL));
        }
    }

    #[test]
    fn membership() {
        let id = Lattice::identity(2);
        assert!(id.contains(&[3.0, -7.0], MEMBERSHIP_TOL));
        assert!(!id.contains(&[0.5, 0.0], MEMBERSHIP_TOL));
        let l = Lattice::from_vectors(&[vec![2.0, 0.0], vec![1.0, 3.0]]).unwrap();
        assert!(l.contains(&[3.0, 3.0], MEMBERSHIP_TOL));
        assert!(!l.contains(&[1.0, 0.0], MEMBERSHIP_TOL));
    }

    #[test]
    fn singular_rejected() {
        let r = Lattice::from_vectors(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(r, Err(Error::Degeneracy(_))));
        assert!(Lattice::one_d(0.0).is_err());
    }

    #[test]
    fn cells() {
        let c = Lattice::identity(3).fundamental_cell(1).unwrap();
        assert_eq!(c.volume(), 1.0);
        assert!(c.contains(&[-0.5, 0.0, 0.49]));
        assert!(!c.contains(&[0.5, 0.0, 0.0]));
        let c = Lattice::one_d(5.0).unwrap().fundamental_cell(3).unwrap();
        assert_eq!(c.interval(), Some((-7.5, 7.5)));
        assert_eq!(c.volume(), 15.0);
    }

    #[test]
    fn sine_period_five() {
        let p = GridFn::from_cell_average(Domain::periodic(0.0, 5.0), 400, |x| {
            (2.0 * PI * x / 5.0).sin()
        })
        .unwrap();
        let rep = verify_period_group(&p, &Lattice::one_d(5.0).unwrap(), 1e-9, 16).unwrap();
        assert!(rep.period_difference < 1e-12);
        assert!(rep.subperiod_differences[0].1 > 1.0);
        assert!(rep.exact);
    }

    #[test]
    fn constant_is_degenerate() {
        let p = GridFn::constant(Domain::periodic(0.0, 5.0), 50, 2.0).unwrap();
        let rep = verify_period_group(&p, &Lattice::one_d(5.0).unwrap(), 1e-9, 16).unwrap();
        assert!(rep.degenerate_constant && rep.is_period && !rep.exact);
    }

    #[test]
    fn incommensurate_grid() {
        let p = GridFn::constant(Domain::periodic(0.0, 5.0), 50, 2.0).unwrap();
        assert!(matches!(
            verify_period_group(&p, &Lattice::one_d(0.123).unwrap(), 1e-9, 16),
            Err(Error::Commensurability(_))
        ));
    }
}
