//! Super-replication under uncertain volatility: the stage operator `T_b`,
//! its boundary equation, and the recursion `U^{k+1} = T_{b_{k+1}}[U^k]`.

mod model;
mod operator;
mod payoff;
mod scheme;

pub use model::{exponents, lower_exponent, upper_exponent, Exponents, UvmModel};
pub use operator::{apply_t, beta_functional, h_kernel, mixing_density, KernelSide, Operator};
pub use payoff::{check_payoff_admissible, AdmissibilityReport, Payoff, Violation};
pub use scheme::{iterate_scheme, iterate_scheme_with_tol, solve_boundary, StageFunction};
