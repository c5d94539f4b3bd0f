//! Grid functions on log-uniform grids, product quadrature, root finding,
//! the normal distribution and Richardson extrapolation.

mod grid;
mod normal;
mod quadrature;
mod richardson;
mod root;
mod sweep;
mod tail;

pub(crate) use grid::fit_left;
pub use grid::{GridFunction, LogGrid, DEFAULT_NODES, MIN_NODES};
pub use normal::{std_normal_cdf, std_normal_pdf};
pub use quadrature::{
    composite_gauss_legendre, cumulative_integral, gauss_legendre8, integrate_adaptive,
    CumulativeIntegral,
};
pub use richardson::richardson_extrapolate;
pub use root::{find_root_bracketed, Bracket, ROOT_TOL};
pub use sweep::ExpSweep;
pub use tail::{Tail, TailFit};

/// Half-width in `ln x` of the default grid for volatility `sigma` and horizon `t`.
pub fn default_half_width<T: crate::Real>(sigma: T, t: T) -> T {
    (T::lit(8.0) * sigma * t.sqrt()).max(T::lit(4.0))
}
