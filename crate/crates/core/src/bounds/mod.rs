//! Executable sandwich checks for the randomized recursions: the Erlang horizon
//! law, mixtures of fixed-horizon values (upper side), Monte-Carlo policy values
//! (lower side), a BSB finite-difference oracle and an empirical rate fit.

mod bsb;
mod erlang;
mod monte_carlo;
mod rate;
mod test_payoff;

pub use bsb::{bsb_fd_oracle, bsb_fd_oracle_with, BsbConfig, MAX_CFL};
pub use erlang::{
    erlang_mixture, erlang_mixture_fixed, erlang_mixture_with, erlang_pdf, ErlangHorizon,
    MIXTURE_REL_TOL,
};
pub use monte_carlo::{
    mc_lower_bound, DigitalHitting, McEstimate, PathPolicy, PutExercise, ZeroPayoff, MIN_PATHS,
};
pub use rate::{convergence_diagnostic, RateFit};
pub use test_payoff::TestPayoff;
