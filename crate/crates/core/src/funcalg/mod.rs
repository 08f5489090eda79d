//! Exact algebra of piecewise-polynomial functions of the state variable.

mod bv;
mod piecewise;
mod poly;

pub use bv::{apply_tg, kruzhkov_pair, stieltjes_integral, BVFunction, KruzhkovPair};
pub use piecewise::{PieceRepr, PiecewisePoly, PiecewiseRepr, CONTINUITY_TOL, DEFAULT_MAX_DEGREE};
pub use poly::{Poly, ROOT_MERGE_TOL};
