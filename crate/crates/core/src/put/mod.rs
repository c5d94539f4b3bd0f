//! The randomized American put.
//!
//! Each stage is a perpetual stopping problem with discount `r_n = r + λ_n`
//! and running reward `λ_n·u_prev`. Its continuation value is a Green's-function
//! particular solution plus the decaying homogeneous mode `x^{θ₋}`; the
//! exercise boundary follows from smooth pasting.

mod binomial;

use std::sync::Arc;

pub use binomial::{binomial_oracle, european_put};

use crate::numerics::{
    default_half_width, find_root_bracketed, richardson_extrapolate, Bracket, ExpSweep,
    GridFunction, LogGrid, Tail, DEFAULT_NODES, ROOT_TOL,
};
use crate::{Error, Real, Result};

/// Lognormal market and stage count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PutModel<T> {
    pub strike: T,
    pub rate: T,
    pub sigma: T,
    pub horizon: T,
    pub stages: usize,
}

impl<T: Real> PutModel<T> {
    pub fn new(strike: T, rate: T, sigma: T, horizon: T, stages: usize) -> Result<Self> {
        if !(strike > T::zero() && strike.is_finite()) {
            return Err(Error::Input(format!("K must be positive, got {strike}")));
        }
        if !(rate >= T::zero() && rate.is_finite()) {
            return Err(Error::Input(format!("r must be ≥ 0, got {rate}")));
        }
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(Error::Input(format!("sigma must be positive, got {sigma}")));
        }
        if !(horizon > T::zero() && horizon.is_finite()) {
            return Err(Error::Input(format!("T must be positive, got {horizon}")));
        }
        if stages == 0 {
            return Err(Error::Input("stage count n must be at least 1".into()));
        }
        Ok(Self {
            strike,
            rate,
            sigma,
            horizon,
            stages,
        })
    }

    pub fn lambda(&self) -> T {
        T::count(self.stages) / self.horizon
    }

    pub fn with_stages(&self, stages: usize) -> Result<Self> {
        Self::new(self.strike, self.rate, self.sigma, self.horizon, stages)
    }

    pub fn stage_params(&self) -> StageParams<T> {
        StageParams::new(self.rate, self.sigma, self.lambda())
    }
}

/// Per-stage constants: `λ`, `r_n = r + λ` and the roots `θ₋ < 0 < 1 < θ₊`
/// of `(σ²/2)θ(θ-1) + rθ - r_n = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageParams<T> {
    pub rate: T,
    pub sigma: T,
    pub lambda: T,
    pub discount: T,
    pub theta_minus: T,
    pub theta_plus: T,
}

impl<T: Real> StageParams<T> {
    /// Stage constants for `λ` with the usual discount `r + λ`.
    pub fn new(rate: T, sigma: T, lambda: T) -> Self {
        Self::with_discount(rate, sigma, rate + lambda, lambda)
    }

    /// Decouples the discount from the running-reward intensity; `lambda = 0`
    /// is the perpetual put discounted at `discount`.
    pub fn with_discount(rate: T, sigma: T, discount: T, lambda: T) -> Self {
        let half_var = sigma * sigma * T::lit(0.5);
        let b = rate - half_var;
        let disc = (b * b + T::lit(4.0) * half_var * discount).sqrt();
        let two_a = T::lit(2.0) * half_var;
        Self {
            rate,
            sigma,
            lambda,
            discount,
            theta_minus: (-b - disc) / two_a,
            theta_plus: (-b + disc) / two_a,
        }
    }

    /// `2λ / (σ²(θ₊ - θ₋))`, the weight of the particular solution.
    fn kappa(&self) -> T {
        T::lit(2.0) * self.lambda / (self.sigma * self.sigma * (self.theta_plus - self.theta_minus))
    }
}

/// One solved stage: `v_n^k`, its exercise boundary and exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct PutStage<T> {
    pub value: GridFunction<T>,
    pub boundary: T,
    pub theta_minus: T,
    pub theta_plus: T,
    pub stage: usize,
}

/// Odd-sized grid centred on `K` so that the payoff kink is a node.
pub fn put_grid<T: Real>(model: &PutModel<T>, nodes: usize) -> Result<Arc<LogGrid<T>>> {
    let nodes = nodes | 1;
    let l = default_half_width(model.sigma, model.horizon);
    Ok(Arc::new(LogGrid::centered(model.strike, l, nodes)?))
}

/// `(K - x)⁺` on `grid`.
pub fn put_payoff<T: Real>(grid: Arc<LogGrid<T>>, strike: T) -> Result<GridFunction<T>> {
    let values = grid
        .abscissae()
        .iter()
        .map(|&x| (strike - x).max(T::zero()))
        .collect();
    GridFunction::new(
        grid,
        values,
        Tail::affine_power(strike, -T::one(), T::one()),
        Tail::constant(T::zero()),
    )
}

/// Relative distance of the boundary bracket from 0 and from `K`.
const BRACKET_EPS: f64 = 1e-6;

/// Solves one stage from the previous stage value `u_prev`.
pub fn solve_stage<T: Real>(u_prev: &GridFunction<T>, model: &PutModel<T>) -> Result<PutStage<T>> {
    solve_stage_with(u_prev, model.strike, &model.stage_params())
}

pub fn solve_stage_with<T: Real>(
    u_prev: &GridFunction<T>,
    strike: T,
    p: &StageParams<T>,
) -> Result<PutStage<T>> {
    let kernel = StageKernel::new(u_prev, strike, p)?;
    stage_on_grid(&kernel, u_prev.grid(), p)
}

/// First stage, `u_prev = (K - x)⁺`, with the payoff integrated exactly.
pub fn solve_first_stage<T: Real>(grid: &Arc<LogGrid<T>>, model: &PutModel<T>) -> Result<PutStage<T>> {
    let p = model.stage_params();
    let kernel = StageKernel::payoff(model.strike, &p)?;
    let mut st = stage_on_grid(&kernel, grid, &p)?;
    st.stage = 1;
    Ok(st)
}

fn stage_on_grid<T: Real>(
    kernel: &StageKernel<'_, T>,
    g: &Arc<LogGrid<T>>,
    p: &StageParams<T>,
) -> Result<PutStage<T>> {
    let strike = kernel.strike;
    let b = kernel.boundary()?;
    if b < g.x_min() {
        return Err(Error::Domain(format!(
            "exercise boundary {b} below the grid minimum {}",
            g.x_min()
        )));
    }
    let bu = b.ln();
    let a = kernel.homogeneous_coef(bu)?;
    let values = g
        .logs()
        .iter()
        .zip(g.abscissae())
        .enumerate()
        .map(|(i, (&u, &x))| {
            Ok(if u <= bu {
                strike - x
            } else {
                (p.theta_minus * (u - bu)).exp() * a + kernel.kappa * kernel.sweeps.at_node(i, u)?
            })
        })
        .collect::<Result<Vec<T>>>()?;
    let right_tail = Tail::power(values[values.len() - 1], p.theta_minus, g.x_max());
    let value = GridFunction::new(
        Arc::clone(g),
        values,
        Tail::affine_power(strike, -T::one(), T::one()),
        right_tail,
    )?;
    Ok(PutStage {
        value,
        boundary: b,
        theta_minus: p.theta_minus,
        theta_plus: p.theta_plus,
        stage: 0,
    })
}

/// What a stage integrates against.
#[derive(Debug, Clone, Copy)]
pub enum StageInput<'a, T> {
    /// The exact payoff `(K - x)⁺`, as seen by the first stage.
    Payoff,
    Value(&'a GridFunction<T>),
}

/// Stage value at an arbitrary spot for a given boundary `b`, evaluated from
/// the Green's-function representation rather than grid interpolation.
pub fn continuation_value<T: Real>(
    u_prev: StageInput<'_, T>,
    strike: T,
    p: &StageParams<T>,
    b: T,
    x: T,
) -> Result<T> {
    let kernel = match u_prev {
        StageInput::Payoff => StageKernel::payoff(strike, p)?,
        StageInput::Value(u) => StageKernel::new(u, strike, p)?,
    };
    if x <= b {
        return Ok(strike - x);
    }
    let (bu, u) = (b.ln(), x.ln());
    Ok((p.theta_minus * (u - bu)).exp() * kernel.homogeneous_coef(bu)?
        + kernel.kappa * (kernel.sweeps.left(u)? + kernel.sweeps.right(u)?))
}

/// The two exponential sweeps behind the particular solution:
/// `L(U) = ∫_{-∞}^U u e^{θ₋(U-s)} ds` and `R(U) = ∫_U^∞ u e^{θ₊(U-s)} ds`.
enum Sweeps<'a, T: Real> {
    Grid {
        left: ExpSweep<'a, T>,
        right: ExpSweep<'a, T>,
    },
    /// `u = (K - x)⁺` in closed form, so the payoff kink costs nothing.
    Payoff { log_strike: T, q: T, tp: T },
}

impl<T: Real> Sweeps<'_, T> {
    fn left(&self, u: T) -> Result<T> {
        match self {
            Sweeps::Grid { left, .. } => left.at_log(u),
            &Sweeps::Payoff { log_strike: k, q, .. } => {
                let strike = k.exp();
                Ok(if u <= k {
                    strike / q - u.exp() / (q + T::one())
                } else {
                    (-q * (u - k)).exp() * strike / (q * (q + T::one()))
                })
            }
        }
    }

    fn right(&self, u: T) -> Result<T> {
        match self {
            Sweeps::Grid { right, .. } => right.at_log(u),
            &Sweeps::Payoff { log_strike: k, tp, .. } => {
                if u >= k {
                    return Ok(T::zero());
                }
                let d = k - u;
                let one = T::one();
                Ok(k.exp() * (-(-tp * d).exp_m1()) / tp
                    - u.exp() * (-(-(tp - one) * d).exp_m1()) / (tp - one))
            }
        }
    }

    fn at_node(&self, i: usize, u: T) -> Result<T> {
        match self {
            Sweeps::Grid { left, right } => Ok(left.nodes()[i] + right.nodes()[i]),
            Sweeps::Payoff { .. } => Ok(self.left(u)? + self.right(u)?),
        }
    }
}

struct StageKernel<'a, T: Real> {
    sweeps: Sweeps<'a, T>,
    kappa: T,
    reach: T,
    strike: T,
    theta_minus: T,
}

impl<'a, T: Real> StageKernel<'a, T> {
    fn new(u_prev: &'a GridFunction<T>, strike: T, p: &StageParams<T>) -> Result<Self> {
        let (left, right) = rayon::join(
            || ExpSweep::left(u_prev, -p.theta_minus),
            || ExpSweep::right(u_prev, p.theta_plus),
        );
        Self::with_sweeps(
            Sweeps::Grid {
                left: left?,
                right: right?,
            },
            strike,
            p,
        )
    }

    fn payoff(strike: T, p: &StageParams<T>) -> Result<Self> {
        let sweeps = Sweeps::Payoff {
            log_strike: strike.ln(),
            q: -p.theta_minus,
            tp: p.theta_plus,
        };
        Self::with_sweeps(sweeps, strike, p)
    }

    fn with_sweeps(sweeps: Sweeps<'a, T>, strike: T, p: &StageParams<T>) -> Result<Self> {
        if !(p.discount > T::zero()) {
            return Err(Error::Input(format!("stage discount must be positive, got {}", p.discount)));
        }
        Ok(Self {
            sweeps,
            kappa: p.kappa(),
            reach: T::lit(2.0) * p.lambda / (p.sigma * p.sigma),
            strike,
            theta_minus: p.theta_minus,
        })
    }

    /// `x v'(x) + x` at `x = b⁺` once value matching fixes the homogeneous part.
    fn smooth_fit(&self, b: T) -> Result<T> {
        Ok(self.theta_minus * (self.strike - b) + b + self.reach * self.sweeps.right(b.ln())?)
    }

    fn homogeneous_coef(&self, bu: T) -> Result<T> {
        Ok(self.strike - bu.exp() - self.kappa * (self.sweeps.left(bu)? + self.sweeps.right(bu)?))
    }

    fn boundary(&self) -> Result<T> {
        let eps = T::lit(BRACKET_EPS);
        let bracket = Bracket::new(eps * self.strike, (T::one() - eps) * self.strike)?;
        find_root_bracketed(
            |b| self.smooth_fit(b).unwrap_or(T::nan()),
            bracket,
            T::lit(ROOT_TOL),
        )
        .map_err(|e| match e {
            Error::Bracket { lo, hi } => {
                Error::Boundary(format!("smooth-fit residual keeps its sign on ({lo}, {hi})"))
            }
            other => other,
        })
    }
}

/// `v_n^n(x)` and every stage, starting from `v_n^0 = (K - x)⁺`.
pub fn carr_price<T: Real>(model: &PutModel<T>, x: T) -> Result<(T, Vec<PutStage<T>>)> {
    carr_price_with(model, x, DEFAULT_NODES)
}

pub fn carr_price_with<T: Real>(model: &PutModel<T>, x: T, nodes: usize) -> Result<(T, Vec<PutStage<T>>)> {
    if !(x > T::zero() && x.is_finite()) {
        return Err(Error::Input(format!("spot must be positive, got {x}")));
    }
    let grid = put_grid(model, nodes)?;
    let mut stages = Vec::with_capacity(model.stages);
    stages.push(solve_first_stage(&grid, model).map_err(|e| e.at_stage(1))?);
    for k in 2..=model.stages {
        let mut st = solve_stage(&stages[k - 2].value, model).map_err(|e| e.at_stage(k))?;
        st.stage = k;
        stages.push(st);
    }
    let price = stages.last().expect("n ≥ 1").value.eval(x);
    Ok((price, stages))
}

/// Richardson extrapolation of `v_n^n(x)` over `stage_counts`; the stage count
/// of `model` itself is ignored.
pub fn carr_richardson<T: Real>(model: &PutModel<T>, x: T, stage_counts: &[usize]) -> Result<T> {
    carr_richardson_with(model, x, stage_counts, DEFAULT_NODES)
}

pub fn carr_richardson_with<T: Real>(
    model: &PutModel<T>,
    x: T,
    stage_counts: &[usize],
    nodes: usize,
) -> Result<T> {
    let samples = stage_counts
        .iter()
        .map(|&n| Ok((n, carr_price_with(&model.with_stages(n)?, x, nodes)?.0)))
        .collect::<Result<Vec<_>>>()?;
    richardson_extrapolate(&samples)
}

/// Default Richardson stage counts.
pub const RICHARDSON_STAGES: [usize; 3] = [1, 2, 3];
