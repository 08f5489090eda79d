//! Cell-averaged grid functions, window norms, lattice envelopes and
//! initial-data builders.

mod builders;
mod envelopes;
mod grid;
mod norms;

pub use builders::build_exactness_data;
pub use envelopes::{envelope_means, lattice_envelopes, EnvelopeMeans, Envelopes};
pub use grid::{Domain, GridFn};
pub use norms::{
    mean_vanishing_check, stepanov_norm, v_norm, vanishing_profile, window_integral,
    MeanVanishingReport,
};
