use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GridFn;
use crate::funcalg::{PiecewisePoly, Poly};
use crate::model::ModelSpec;

/// Two-point monotone flux for the convective term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvectionFlux {
    #[default]
    EngquistOsher,
    LaxFriedrichs,
}

const STRIDE: usize = 4;

/// Flat piecewise polynomial for the inner loops. Values outside the range
/// continue the end pieces. Pieces of degree below `STRIDE` use a fixed
/// Horner form, higher degrees a general loop.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    inner: Vec<f64>,
    fixed: Vec<[f64; STRIDE]>,
    general: Option<Vec<Vec<f64>>>,
}

impl Compiled {
    pub(crate) fn new(f: &PiecewisePoly) -> Self {
        let b = f.breaks();
        let general = (f.max_degree() >= STRIDE)
            .then(|| f.pieces().iter().map(|p| p.coeffs().to_vec()).collect());
        let fixed = f
            .pieces()
            .iter()
            .map(|p| {
                let mut c = [0.0; STRIDE];
                for (d, v) in c.iter_mut().zip(p.coeffs()) {
                    *d = *v;
                }
                c
            })
            .collect();
        Compiled {
            inner: b[1..b.len() - 1].to_vec(),
            fixed,
            general,
        }
    }

    #[inline]
    pub(crate) fn eval(&self, u: f64) -> f64 {
        let mut i = 0;
        while i < self.inner.len() && u > self.inner[i] {
            i += 1;
        }
        match &self.general {
            None => {
                let c = &self.fixed[i];
                c[0] + u * (c[1] + u * (c[2] + u * c[3]))
            }
            Some(g) => g[i].iter().rev().fold(0.0, |acc, c| acc * u + c),
        }
    }
}

/// `max |f|` over `[a, b] ∩ range` from clipped piece ends and critical points.
fn max_abs_on(f: &PiecewisePoly, a: f64, b: f64) -> f64 {
    f.breaks()
        .windows(2)
        .zip(f.pieces())
        .filter(|(w, _)| w[0] <= b && w[1] >= a)
        .flat_map(|(w, p)| {
            let lo = w[0].max(a);
            let hi = w[1].min(b);
            let mut pts = vec![lo, hi];
            if lo < hi {
                pts.extend(p.derivative().real_roots_in(lo, hi));
            }
            pts.into_iter().map(move |u| p.eval(u).abs())
        })
        .fold(0.0, f64::max)
}

/// Conservative explicit scheme
/// `u_i' = u_i - λ (F_{i+½} - F_{i-½}) + μ (G_{i+½} - G_{i-½})` with
/// `G_{i+½} = A(u_{i+1}) - A(u_i)`, `λ = dt/dx`, `μ = dt/dx²`, periodic cells.
#[derive(Debug, Clone)]
pub struct Scheme {
    kind: ConvectionFlux,
    phi: Compiled,
    phi_plus: Compiled,
    phi_minus: Compiled,
    a_prim: Compiled,
    lip: f64,
    a_max: f64,
    convection: bool,
    diffusion: bool,
}

impl Scheme {
    /// Scheme for data with values in `data_range`; the Lipschitz bound of `φ`
    /// and `max a` are taken over that interval.
    pub fn new(model: &ModelSpec, kind: ConvectionFlux, data_range: (f64, f64)) -> Result<Self> {
        let phi = model.flux_1d()?;
        let (lo, _) = phi.range();
        let d = phi.derivative();
        // φ = φ(lo) + ∫ max(φ', 0) + ∫ min(φ', 0)
        let phi_plus = d
            .positive_part()
            .integral_from(lo)?
            .add_constant(phi.eval(lo)?);
        let phi_minus = d
            .scale(-1.0)
            .positive_part()
            .scale(-1.0)
            .integral_from(lo)?;
        let (a, b) = data_range;
        let phi_c = Compiled::new(phi);
        let a_prim = Compiled::new(model.diff_primitive());
        Ok(Scheme {
            kind,
            convection: !d.pieces().iter().all(Poly::is_zero),
            diffusion: !model.diffusivity().pieces().iter().all(Poly::is_zero),
            phi: phi_c,
            phi_plus: Compiled::new(&phi_plus),
            phi_minus: Compiled::new(&phi_minus),
            a_prim,
            lip: max_abs_on(&d, a, b),
            a_max: max_abs_on(model.diffusivity(), a, b),
        })
    }

    pub fn kind(&self) -> ConvectionFlux {
        self.kind
    }

    pub fn lipschitz(&self) -> f64 {
        self.lip
    }

    pub fn max_diffusivity(&self) -> f64 {
        self.a_max
    }

    pub fn has_convection(&self) -> bool {
        self.convection
    }

    pub fn has_diffusion(&self) -> bool {
        self.diffusion
    }

    /// `cfl / (Lip(φ)/dx + 2 max a / dx²)`; infinite when nothing moves.
    pub fn stable_dt(&self, dx: f64, cfl: f64) -> f64 {
        let rate = self.lip / dx + 2.0 * self.a_max / (dx * dx);
        if rate > 0.0 {
            cfl / rate
        } else {
            f64::INFINITY
        }
    }

    /// Convective numerical flux `F(u, v)` at a face with left state `u`.
    #[inline]
    pub fn numerical_flux(&self, u: f64, v: f64) -> f64 {
        match self.kind {
            ConvectionFlux::EngquistOsher => self.phi_plus.eval(u) + self.phi_minus.eval(v),
            ConvectionFlux::LaxFriedrichs => {
                0.5 * (self.phi.eval(u) + self.phi.eval(v)) - 0.5 * self.lip * (v - u)
            }
        }
    }

    #[inline]
    pub fn diffusion_primitive(&self, u: f64) -> f64 {
        self.a_prim.eval(u)
    }

    #[inline]
    pub fn flux(&self, u: f64) -> f64 {
        self.phi.eval(u)
    }
}

/// Scheme driver for repeated steps.
#[derive(Debug, Clone)]
pub struct Stepper {
    scheme: Scheme,
}

impl Stepper {
    pub fn new(scheme: Scheme) -> Self {
        Stepper { scheme }
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    /// One step from `u` into `out`; returns `(min, max)` of the result.
    pub fn step_into(&mut self, u: &[f64], dx: f64, dt: f64, out: &mut [f64]) -> (f64, f64) {
        let lam = dt / dx;
        let mu = dt / (dx * dx);
        match (self.scheme.convection, self.scheme.diffusion) {
            (true, true) => kernel::<true, true>(&self.scheme, u, lam, mu, out),
            (true, false) => kernel::<true, false>(&self.scheme, u, lam, mu, out),
            (false, true) => kernel::<false, true>(&self.scheme, u, lam, mu, out),
            (false, false) => {
                out.copy_from_slice(u);
                let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        }
    }
}

/// Single pass over the cells carrying the left face values along. Each face
/// value is computed once and used by both neighbours, so the update telescopes.
fn kernel<const C: bool, const D: bool>(
    s: &Scheme,
    u: &[f64],
    lam: f64,
    mu: f64,
    out: &mut [f64],
) -> (f64, f64) {
    let n = u.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut f_left = if C {
        s.numerical_flux(u[n - 1], u[0])
    } else {
        0.0
    };
    let a_first = if D { s.a_prim.eval(u[0]) } else { 0.0 };
    let mut a_cur = a_first;
    let mut g_left = if D {
        a_cur - s.a_prim.eval(u[n - 1])
    } else {
        0.0
    };
    for i in 0..n {
        let right = if i + 1 < n { u[i + 1] } else { u[0] };
        let mut v = u[i];
        if C {
            let f_right = s.numerical_flux(u[i], right);
            v -= lam * (f_right - f_left);
            f_left = f_right;
        }
        if D {
            let a_next = if i + 1 < n {
                s.a_prim.eval(right)
            } else {
                a_first
            };
            let g_right = a_next - a_cur;
            v += mu * (g_right - g_left);
            g_left = g_right;
            a_cur = a_next;
        }
        out[i] = v;
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    (lo, hi)
}

/// Tolerance on excursions beyond the initial range.
pub const BOUND_TOL: f64 = 1e-8;

pub(crate) fn check_periodic(u: &GridFn) -> Result<()> {
    if u.is_periodic() {
        Ok(())
    } else {
        Err(Error::Domain("the solver needs a periodic domain".into()))
    }
}

pub(crate) fn check_in_range(u: &GridFn, model: &ModelSpec) -> Result<()> {
    let (lo, hi) = model.range();
    let tol = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    for &v in [u.min(), u.max()].iter() {
        if v < lo - tol || v > hi + tol {
            return Err(Error::Range { value: v, lo, hi });
        }
    }
    Ok(())
}

/// Single explicit step with the default flux. `dt` may not exceed the
/// monotonicity limit (the harmonic rule with `cfl = 1`).
pub fn step(u: &GridFn, model: &ModelSpec, dt: f64) -> Result<GridFn> {
    step_with(u, model, dt, ConvectionFlux::default())
}

pub fn step_with(u: &GridFn, model: &ModelSpec, dt: f64, kind: ConvectionFlux) -> Result<GridFn> {
    check_periodic(u)?;
    check_in_range(u, model)?;
    let (lo, hi) = (u.min(), u.max());
    let scheme = Scheme::new(model, kind, (lo, hi))?;
    let limit = scheme.stable_dt(u.dx(), 1.0);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::TimeStep { dt, limit });
    }
    let mut out = vec![0.0; u.len()];
    Stepper::new(scheme).step_into(u.values(), u.dx(), dt, &mut out);
    if let Some((cell, &value)) = out
        .iter()
        .enumerate()
        .find(|(_, &v)| v < lo - BOUND_TOL || v > hi + BOUND_TOL)
    {
        return Err(Error::Monotonicity {
            value,
            lo,
            hi,
            cell,
        });
    }
    u.with_values(out)
}
