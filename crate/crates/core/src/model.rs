//! Model functions (flux `φ`, diffusion primitive `A`, diffusivity `a = A'`),
//! the set `F` of states where the equation is genuinely nonlinear or
//! diffusive, and the decay conditions built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcalg::{PiecewisePoly, PiecewiseRepr, Poly, CONTINUITY_TOL};

/// Open interval `(lo, hi)`.
pub type Interval = (f64, f64);

pub const PRESETS: [&str; 3] = ["burgers", "stefan", "affine"];

#[derive(Debug, Clone)]
pub struct ModelSpec {
    name: String,
    range: (f64, f64),
    flux: Vec<PiecewisePoly>,
    diff_primitive: PiecewisePoly,
    diffusivity: PiecewisePoly,
}

/// Config layout: either a preset name or explicit piecewise functions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<Vec<PiecewiseRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diff_primitive: Option<PiecewiseRepr>,
}

impl ModelSpec {
    pub fn new(
        name: impl Into<String>,
        flux: Vec<PiecewisePoly>,
        diff_primitive: PiecewisePoly,
    ) -> Result<Self> {
        let range = diff_primitive.range();
        if !(range.0 < range.1) {
            return Err(Error::Contract(format!("empty range {range:?}")));
        }
        if flux.is_empty() {
            return Err(Error::Contract("flux needs at least one component".into()));
        }
        if let Some(f) = flux.iter().find(|f| f.range() != range) {
            return Err(Error::Contract(format!(
                "flux range {:?} differs from diffusion range {range:?}",
                f.range()
            )));
        }
        if !diff_primitive.is_continuous() {
            return Err(Error::Contract(
                "diffusion primitive must be continuous".into(),
            ));
        }
        let diffusivity = diff_primitive.derivative();
        let scale = diffusivity.extrema().1.abs().max(1.0);
        let min_a = diffusivity.min_value();
        if min_a < -CONTINUITY_TOL * scale {
            return Err(Error::Contract(format!(
                "diffusivity A' takes the negative value {min_a}"
            )));
        }
        Ok(ModelSpec {
            name: name.into(),
            range,
            flux,
            diff_primitive,
            diffusivity,
        })
    }

    /// `burgers`: `φ = u²/2`, `A = 0`; `stefan`: `φ = 0`, `A = u⁺`;
    /// `affine`: `φ = u`, `A = 0`.
    pub fn preset(name: &str, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if !(lo < hi) {
            return Err(Error::Config(format!("empty range [{lo}, {hi}]")));
        }
        let zero = PiecewisePoly::constant(0.0, lo, hi)?;
        match name {
            "burgers" => Self::new(
                name,
                vec![PiecewisePoly::from_poly(
                    Poly::new(vec![0.0, 0.0, 0.5]),
                    lo,
                    hi,
                )?],
                zero,
            ),
            "stefan" => Self::new(
                name,
                vec![zero],
                PiecewisePoly::positive_part_of_shift(0.0, lo, hi)?,
            ),
            "affine" => Self::new(name, vec![PiecewisePoly::identity(lo, hi)?], zero),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESETS.join(", ")
            ))),
        }
    }

    pub fn from_config(cfg: &ModelConfig) -> Result<Self> {
        let range = cfg.range.map(|[a, b]| (a, b));
        match (&cfg.preset, &cfg.flux, &cfg.diff_primitive) {
            (Some(name), None, None) => Self::preset(name, range.unwrap_or((-1.0, 1.0))),
            (None, Some(flux), Some(a)) => {
                let flux = flux
                    .iter()
                    .cloned()
                    .map(PiecewisePoly::try_from)
                    .collect::<Result<Vec<_>>>()
                    .map_err(config_error)?;
                let a = PiecewisePoly::try_from(a.clone()).map_err(config_error)?;
                let m = Self::new("custom", flux, a).map_err(config_error)?;
                if let Some(r) = range {
                    if r != m.range {
                        return Err(Error::Config(format!(
                            "range {r:?} does not match the functions' range {:?}",
                            m.range
                        )));
                    }
                }
                Ok(m)
            }
            _ => Err(Error::Config(
                "model needs either `preset` or both `flux` and `diff_primitive`".into(),
            )),
        }
    }

    pub fn to_config(&self) -> ModelConfig {
        let range = Some([self.range.0, self.range.1]);
        if PRESETS.contains(&self.name.as_str()) {
            ModelConfig {
                preset: Some(self.name.clone()),
                range,
                ..Default::default()
            }
        } else {
            ModelConfig {
                preset: None,
                range,
                flux: Some(self.flux.iter().map(PiecewiseRepr::from).collect()),
                diff_primitive: Some(PiecewiseRepr::from(&self.diff_primitive)),
            }
        }
    }

    /// Same preset on another state range. Custom models cannot be re-ranged.
    pub fn with_range(&self, range: (f64, f64)) -> Result<Self> {
        if PRESETS.contains(&self.name.as_str()) {
            Self::preset(&self.name, range)
        } else {
            Err(Error::Config("only presets can change their range".into()))
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn dim(&self) -> usize {
        self.flux.len()
    }

    pub fn flux(&self) -> &[PiecewisePoly] {
        &self.flux
    }

    /// The scalar flux; fails for vector fluxes.
    pub fn flux_1d(&self) -> Result<&PiecewisePoly> {
        match self.flux.as_slice() {
            [f] => Ok(f),
            _ => Err(Error::Config(format!(
                "scalar flux expected, model has {} components",
                self.flux.len()
            ))),
        }
    }

    pub fn diff_primitive(&self) -> &PiecewisePoly {
        &self.diff_primitive
    }

    pub fn diffusivity(&self) -> &PiecewisePoly {
        &self.diffusivity
    }

    pub fn max_degree(&self) -> usize {
        self.flux
            .iter()
            .map(PiecewisePoly::max_degree)
            .chain([self.diff_primitive.max_degree()])
            .max()
            .unwrap_or(0)
    }

    /// `φ · ξ` for a direction `ξ`.
    pub fn flux_along(&self, xi: &[f64]) -> Result<PiecewisePoly> {
        if xi.len() != self.dim() {
            return Err(Error::Config(format!(
                "direction of length {} for a {}-dimensional flux",
                xi.len(),
                self.dim()
            )));
        }
        let mut acc = self.flux[0].scale(xi[0]);
        for (f, &x) in self.flux.iter().zip(xi).skip(1) {
            acc = acc.add(&f.scale(x))?;
        }
        Ok(acc)
    }
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Values agree up to the continuity tolerance.
fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONTINUITY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Maximal open intervals on which `f` is affine, read off the pieces. Adjacent
/// affine pieces are merged when slopes are equal and the values meet.
pub fn affine_intervals(f: &PiecewisePoly) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::new();
    let mut prev: Option<&Poly> = None;
    for (w, p) in f.breaks().windows(2).zip(f.pieces()) {
        if !p.is_affine() {
            prev = None;
            continue;
        }
        let joins = prev.is_some_and(|q| {
            let slope = |r: &Poly| r.coeffs().get(1).copied().unwrap_or(0.0);
            slope(q) == slope(p) && close(q.eval(w[0]), p.eval(w[0]))
        });
        match out.last_mut() {
            Some(last) if joins => last.1 = w[1],
            _ => out.push((w[0], w[1])),
        }
        prev = Some(p);
    }
    out
}

/// Maximal open intervals on which `f` vanishes identically.
pub fn zero_intervals(f: &PiecewisePoly) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::new();
    let mut open = false;
    for (w, p) in f.breaks().windows(2).zip(f.pieces()) {
        if p.is_zero() {
            match out.last_mut() {
                Some(last) if open => last.1 = w[1],
                _ => out.push((w[0], w[1])),
            }
            open = true;
        } else {
            open = false;
        }
    }
    out
}

fn intersect(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Finite union of disjoint closed intervals, sorted; single points are
/// degenerate intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FSet {
    components: Vec<(f64, f64)>,
    /// Computed from finitely many directions only, so possibly too large.
    #[serde(default)]
    pub upper_bound: bool,
}

impl FSet {
    /// Sorts the components and merges overlapping or touching ones.
    pub fn new(mut components: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(c) = components.iter().find(|c| !(c.0 <= c.1)) {
            return Err(Error::Contract(format!("invalid component {c:?}")));
        }
        components.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(components.len());
        for c in components {
            match merged.last_mut() {
                Some(last) if c.0 <= last.1 => last.1 = last.1.max(c.1),
                _ => merged.push(c),
            }
        }
        Ok(FSet {
            components: merged,
            upper_bound: false,
        })
    }

    pub fn empty() -> Self {
        FSet {
            components: Vec::new(),
            upper_bound: false,
        }
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, u: f64) -> bool {
        self.components.iter().any(|&(a, b)| a <= u && u <= b)
    }

    pub fn measure(&self) -> f64 {
        self.components.iter().map(|(a, b)| b - a).sum()
    }
}

/// Directions used for `F`. In one dimension every nonzero `ξ` gives the same
/// set.
#[derive(Debug, Clone)]
pub enum Directions {
    OneD,
    List(Vec<Vec<f64>>),
}

/// `[lo, hi]` minus the union of the open intervals where `φ·ξ` is affine and
/// `a` vanishes. An interval reaching an end of the range is treated as
/// extending past it, so that end is removed as well.
pub fn compute_f(model: &ModelSpec, directions: &Directions) -> Result<FSet> {
    let zero = zero_intervals(model.diffusivity());
    let (removed, upper_bound) = match directions {
        Directions::OneD => {
            if model.dim() != 1 {
                return Err(Error::Config(format!(
                    "one-dimensional mode with a {}-component flux",
                    model.dim()
                )));
            }
            (intersect(&affine_intervals(&model.flux[0]), &zero), false)
        }
        Directions::List(list) => {
            if list.is_empty() {
                return Err(Error::Config("direction list is empty".into()));
            }
            let mut removed = Vec::new();
            for xi in list {
                if xi.iter().all(|&x| x == 0.0) {
                    return Err(Error::Config("direction must be nonzero".into()));
                }
                removed.extend(intersect(&affine_intervals(&model.flux_along(xi)?), &zero));
            }
            (removed, true)
        }
    };
    let mut f = complement(model.range, removed);
    f.upper_bound = upper_bound;
    Ok(f)
}

fn complement(range: (f64, f64), mut removed: Vec<Interval>) -> FSet {
    removed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut union: Vec<Interval> = Vec::new();
    for r in removed {
        match union.last_mut() {
            // open intervals sharing only an endpoint leave that point behind
            Some(last) if r.0 < last.1 => last.1 = last.1.max(r.1),
            _ => union.push(r),
        }
    }
    let (lo, hi) = range;
    let mut components = Vec::new();
    let mut cursor = lo;
    for (a, b) in union {
        if a > lo && a >= cursor {
            components.push((cursor, a));
        }
        cursor = cursor.max(b);
    }
    if cursor < hi {
        components.push((cursor, hi));
    }
    FSet {
        components,
        upper_bound: false,
    }
}

/// `F` meets both `(m - ε, m)` and `(m, m + ε)` for every `ε > 0`. With touching
/// components merged, this means `m` is interior to a component.
pub fn check_nd_condition(f: &FSet, m: f64) -> bool {
    f.components.iter().any(|&(a, b)| a < m && m < b)
}

/// `m ∈ F`.
pub fn check_gn_condition(f: &FSet, m: f64) -> bool {
    f.contains(m)
}

/// `F` meets `(m - ε, m)` for every `ε > 0`.
pub fn accumulates_from_below(f: &FSet, m: f64) -> bool {
    f.components.iter().any(|&(a, b)| a < m && m <= b)
}

/// `F` meets `(m, m + ε)` for every `ε > 0`.
pub fn accumulates_from_above(f: &FSet, m: f64) -> bool {
    f.components.iter().any(|&(a, b)| a <= m && m < b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    /// Decay for periodic data with compactly supported perturbations.
    DecayGuaranteed,
    /// Decay for purely periodic data only.
    PeriodicOnly,
    NoGuarantee,
}

impl DecayClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecayClass::DecayGuaranteed => "decay guaranteed",
            DecayClass::PeriodicOnly => "periodic-only decay",
            DecayClass::NoGuarantee => "no guarantee",
        }
    }
}

pub fn classify(f: &FSet, m: f64) -> DecayClass {
    if check_nd_condition(f, m) {
        DecayClass::DecayGuaranteed
    } else if check_gn_condition(f, m) {
        DecayClass::PeriodicOnly
    } else {
        DecayClass::NoGuarantee
    }
}

/// Sign of a perturbation known to be one-signed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationSign {
    Nonnegative,
    Nonpositive,
}

/// Classification when the perturbation has a sign: a nonnegative `v` only
/// needs `F` to accumulate at `m` from above, a nonpositive one from below.
pub fn classify_one_signed(f: &FSet, m: f64, sign: PerturbationSign) -> DecayClass {
    let side = match sign {
        PerturbationSign::Nonnegative => accumulates_from_above(f, m),
        PerturbationSign::Nonpositive => accumulates_from_below(f, m),
    };
    if side {
        DecayClass::DecayGuaranteed
    } else {
        classify(f, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pw(breaks: Vec<f64>, pieces: Vec<Vec<f64>>) -> PiecewisePoly {
        PiecewisePoly::continuous(breaks, pieces.into_iter().map(Poly::new).collect()).unwrap()
    }

    #[test]
    fn affine_examples() {
        let burgers = pw(vec![-1.0, 1.0], vec![vec![0.0, 0.0, 0.5]]);
        assert!(affine_intervals(&burgers).is_empty());
        let plus = PiecewisePoly::positive_part_of_shift(0.0, -1.0, 1.0).unwrap();
        assert_eq!(affine_intervals(&plus), vec![(-1.0, 0.0), (0.0, 1.0)]);
        let mixed = pw(
            vec![-1.0, 0.0, 1.0],
            vec![vec![0.0, 2.0], vec![0.0, 2.0, 1.0]],
        );
        assert_eq!(affine_intervals(&mixed), vec![(-1.0, 0.0)]);
    }

    #[test]
    fn split_affine_pieces_merge() {
        let f = pw(vec![-1.0, 0.0, 1.0], vec![vec![1.0, 2.0], vec![1.0, 2.0]]);
        assert_eq!(affine_intervals(&f), vec![(-1.0, 1.0)]);
    }

    #[test]
    fn zero_examples() {
        let heaviside = PiecewisePoly::new(
            vec![-1.0, 0.0, 1.0],
            vec![Poly::zero(), Poly::constant(1.0)],
            false,
        )
        .unwrap();
        assert_eq!(zero_intervals(&heaviside), vec![(-1.0, 0.0)]);
        assert!(zero_intervals(&PiecewisePoly::constant(1.0, -1.0, 1.0).unwrap()).is_empty());
        assert_eq!(
            zero_intervals(&PiecewisePoly::constant(0.0, -1.0, 1.0).unwrap()),
            vec![(-1.0, 1.0)]
        );
    }

    #[test]
    fn presets_give_expected_f() {
        let r = (-1.0, 1.0);
        let f = compute_f(&ModelSpec::preset("burgers", r).unwrap(), &Directions::OneD).unwrap();
        assert_eq!(f.components(), &[(-1.0, 1.0)]);
        let f = compute_f(&ModelSpec::preset("stefan", r).unwrap(), &Directions::OneD).unwrap();
        assert_eq!(f.components(), &[(0.0, 1.0)]);
        let f = compute_f(&ModelSpec::preset("affine", r).unwrap(), &Directions::OneD).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn conditions() {
        let f = FSet::new(vec![(0.0, 1.0)]).unwrap();
        assert!(!check_nd_condition(&f, 0.0));
        assert!(check_nd_condition(&f, 0.5));
        assert!(check_gn_condition(&f, 0.0));
        assert!(!check_gn_condition(&f, -0.5));
        let merged = FSet::new(vec![(0.0, 1.0), (-1.0, 0.0)]).unwrap();
        assert_eq!(merged.components(), &[(-1.0, 1.0)]);
        assert!(check_nd_condition(&merged, 0.0));
        assert!(!check_gn_condition(&FSet::empty(), 0.3));
    }

    #[test]
    fn one_signed_classes() {
        let f = FSet::new(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(classify(&f, 0.0), DecayClass::PeriodicOnly);
        assert_eq!(
            classify_one_signed(&f, 0.0, PerturbationSign::Nonnegative),
            DecayClass::DecayGuaranteed
        );
        assert_eq!(
            classify_one_signed(&f, 0.0, PerturbationSign::Nonpositive),
            DecayClass::PeriodicOnly
        );
        assert_eq!(classify(&f, -0.5), DecayClass::NoGuarantee);
    }

    #[test]
    fn isolated_point_survives() {
        let f = pw(vec![-1.0, 0.0, 1.0], vec![vec![0.0, 1.0], vec![0.0, 2.0]]);
        let m = ModelSpec::new(
            "custom",
            vec![f],
            PiecewisePoly::constant(0.0, -1.0, 1.0).unwrap(),
        )
        .unwrap();
        let set = compute_f(&m, &Directions::OneD).unwrap();
        assert_eq!(set.components(), &[(0.0, 0.0)]);
        assert!(check_gn_condition(&set, 0.0) && !check_nd_condition(&set, 0.0));
    }

    #[test]
    fn negative_diffusivity_rejected() {
        let a = pw(vec![-1.0, 1.0], vec![vec![0.0, -1.0]]);
        let phi = PiecewisePoly::constant(0.0, -1.0, 1.0).unwrap();
        assert!(matches!(
            ModelSpec::new("custom", vec![phi], a),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(
            ModelSpec::preset("kdv", (-1.0, 1.0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn vector_flux_directions() {
        let lo = -1.0;
        let hi = 1.0;
        let m = ModelSpec::new(
            "custom",
            vec![
                PiecewisePoly::identity(lo, hi).unwrap(),
                pw(vec![lo, hi], vec![vec![0.0, 0.0, 1.0]]),
            ],
            PiecewisePoly::constant(0.0, lo, hi).unwrap(),
        )
        .unwrap();
        assert!(compute_f(&m, &Directions::OneD).is_err());
        assert!(compute_f(&m, &Directions::List(vec![])).is_err());
        let f = compute_f(&m, &Directions::List(vec![vec![1.0, 0.0]])).unwrap();
        assert!(f.is_empty() && f.upper_bound);
        let f = compute_f(&m, &Directions::List(vec![vec![0.0, 1.0]])).unwrap();
        assert_eq!(f.components(), &[(lo, hi)]);
    }

    #[test]
    fn config_round_trip() {
        let m = ModelSpec::preset("stefan", (-3.0, 1.0)).unwrap();
        let cfg = m.to_config();
        let back = ModelSpec::from_config(&cfg).unwrap();
        assert_eq!(back.range(), (-3.0, 1.0));
        assert_eq!(back.name(), "stefan");
        let custom = ModelSpec::new(
            "custom",
            vec![pw(vec![-1.0, 1.0], vec![vec![0.0, 0.0, 0.5]])],
            PiecewisePoly::constant(0.0, -1.0, 1.0).unwrap(),
        )
        .unwrap();
        let text = toml::to_string(&custom.to_config()).unwrap();
        let back = ModelSpec::from_config(&toml::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.flux_1d().unwrap(), custom.flux_1d().unwrap());
    }
}
