//! One-phase Stefan construction: `u_t = (u⁺)_xx` with a liquid region
//! `|x| < r(t) = 2 - e^{-αt}` inside each period of length 5.

mod construct;
mod fit;
mod fixed;
mod verify;

pub use construct::{
    assemble_periodic_solution, boundary_flux_to_psi, boundary_slope_fit, mass_balance,
    MassBalance, PsiTable, PsiTail, StefanSolution, PERIOD,
};
pub use fit::{exp_fit, ExpFit, FIT_FLOOR, MAX_FIT_RMS};
pub use fixed::{
    solve_fixed_domain, BoundarySeries, FixedDomainRun, MovingBoundary, StefanConfig, TimeScheme,
};
pub use verify::{
    perturbed_nondecay_experiment, verify_decay_estimates, verify_jump_conditions, DecayReport,
    JumpReport, JumpSample, NonDecayReport, EQUIVALENCE_TOL, RH_TOL_FRACTION,
};
