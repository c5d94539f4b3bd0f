use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::ErlangHorizon;
use crate::put::{PutModel, PutStage};
use crate::{Error, Result};

/// A stopping or control rule that never looks at the exponential clocks:
/// given a horizon drawn independently of the path, it returns one
/// discounted payoff.
pub trait PathPolicy: Sync {
    fn payoff(&self, horizon: f64, rng: &mut ChaCha8Rng) -> f64;
}

/// Fewest paths accepted by [`mc_lower_bound`].
pub const MIN_PATHS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub paths: usize,
}

/// Value of `policy` under an Erlang horizon drawn per path. Path `i` uses the
/// ChaCha stream `i` of `seed`, and samples are summed in path order, so the
/// result does not depend on the thread count.
pub fn mc_lower_bound<P: PathPolicy>(
    policy: &P,
    h: &ErlangHorizon<f64>,
    paths: usize,
    seed: u64,
) -> Result<McEstimate> {
    if paths < MIN_PATHS {
        return Err(Error::Input(format!("need at least {MIN_PATHS} paths, got {paths}")));
    }
    let samples: Vec<f64> = (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let z = h.sample(&mut rng);
            policy.payoff(z, &mut rng)
        })
        .collect();
    let n = paths as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate {
        mean,
        std_error: (var / n).sqrt(),
        paths,
    })
}

/// Pays nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPayoff;

impl PathPolicy for ZeroPayoff {
    fn payoff(&self, _horizon: f64, _rng: &mut ChaCha8Rng) -> f64 {
        0.0
    }
}

/// Runs the driftless price at `σ` until it reaches the strike, then freezes it;
/// pays 1 if the strike was reached before the horizon.
#[derive(Debug, Clone, Copy)]
pub struct DigitalHitting {
    pub strike: f64,
    pub spot: f64,
    pub sigma: f64,
    /// Time steps per path; the Brownian-bridge test makes any count exact in law.
    pub steps: usize,
}

impl DigitalHitting {
    pub fn new(strike: f64, spot: f64, sigma: f64) -> Self {
        Self {
            strike,
            spot,
            sigma,
            steps: 16,
        }
    }
}

impl PathPolicy for DigitalHitting {
    fn payoff(&self, horizon: f64, rng: &mut ChaCha8Rng) -> f64 {
        if self.spot >= self.strike {
            return 1.0;
        }
        let barrier = self.strike.ln();
        let s2 = self.sigma * self.sigma;
        let dt = horizon / self.steps.max(1) as f64;
        let mut y = self.spot.ln();
        for _ in 0..self.steps.max(1) {
            let z: f64 = StandardNormal.sample(rng);
            let next = y - 0.5 * s2 * dt + self.sigma * dt.sqrt() * z;
            let u: f64 = rand::Rng::random(rng);
            if next >= barrier || u < (-2.0 * (barrier - y) * (barrier - next) / (s2 * dt)).exp() {
                return 1.0;
            }
            y = next;
        }
        0.0
    }
}

/// Exercises the put when the price is at or below the boundary of the stage
/// the deterministic clock would be in: `b_k` with `k = max(1, n - ⌊t n/T⌋)`.
/// Checks happen at `substeps` equally spaced times per stage, so this is a
/// Bermudan rule and hence an admissible lower-bound policy.
#[derive(Debug, Clone)]
pub struct PutExercise {
    pub model: PutModel<f64>,
    pub spot: f64,
    /// `b_1, …, b_n`.
    pub boundaries: Vec<f64>,
    pub substeps: usize,
}

impl PutExercise {
    pub fn from_stages(model: &PutModel<f64>, spot: f64, stages: &[PutStage<f64>]) -> Result<Self> {
        if stages.len() != model.stages {
            return Err(Error::Input(format!(
                "expected {} stages, got {}",
                model.stages,
                stages.len()
            )));
        }
        Ok(Self {
            model: *model,
            spot,
            boundaries: stages.iter().map(|s| s.boundary).collect(),
            substeps: 20,
        })
    }

    fn boundary_at_step(&self, j: usize) -> f64 {
        let n = self.model.stages;
        let k = n.saturating_sub(j / self.substeps).max(1);
        self.boundaries[k - 1]
    }
}

impl PathPolicy for PutExercise {
    fn payoff(&self, horizon: f64, rng: &mut ChaCha8Rng) -> f64 {
        let m = &self.model;
        let drift = m.rate - 0.5 * m.sigma * m.sigma;
        let dt = m.horizon / (m.stages * self.substeps) as f64;
        let mut s = self.spot;
        let mut t = 0.0;
        let mut j = 0usize;
        loop {
            if s <= self.boundary_at_step(j) {
                return (-m.rate * t).exp() * (m.strike - s);
            }
            let next = (j + 1) as f64 * dt;
            let step = next.min(horizon) - t;
            let z: f64 = StandardNormal.sample(rng);
            s *= (drift * step + m.sigma * step.sqrt() * z).exp();
            if next >= horizon {
                return (-m.rate * horizon).exp() * (m.strike - s).max(0.0);
            }
            t = next;
            j += 1;
        }
    }
}
