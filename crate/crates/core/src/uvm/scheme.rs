use crate::numerics::{find_root_bracketed, Bracket, GridFunction, ROOT_TOL};
use crate::{Error, Real, Result};

use super::model::{Exponents, UvmModel};
use super::operator::Operator;
use super::payoff::{check_payoff_admissible, shape_violations, AdmissibilityReport, Payoff};

/// Stage `k` of the recursion: `U^k` and the boundary `b_k` it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct StageFunction<T> {
    pub value: GridFunction<T>,
    pub boundary: T,
    pub stage: usize,
}

impl<T: Real> StageFunction<T> {
    /// Range, monotonicity and convex/concave split about `b_k`, slack `slack·‖U‖`.
    pub fn shape_report(&self, slack: T) -> AdmissibilityReport<T> {
        let mut r = AdmissibilityReport::default();
        shape_violations(&self.value, self.boundary, slack, &mut r);
        r
    }
}

/// Doublings allowed in the outward boundary scan.
const MAX_SCAN: usize = 60;

impl<T: Real> Operator<'_, T> {
    /// Unique `b` with `β[φ](b) = φ(b)`, bracketed by a geometric scan from `start`.
    pub fn solve_boundary_from(&self, start: T, tol: T) -> Result<T> {
        if self.input().is_constant() {
            return Err(Error::Degenerate(
                "φ is constant, so every b solves β[φ](b) = φ(b)".into(),
            ));
        }
        if !(start > T::zero() && start.is_finite()) {
            return Err(Error::Input(format!("scan start must be positive, got {start}")));
        }
        let two = T::lit(2.0);
        let mut b = start;
        let r0 = self.boundary_residual(b)?;
        if r0 == T::zero() {
            return Ok(b);
        }
        // residual is positive below the root
        let upward = r0 > T::zero();
        for _ in 0..MAX_SCAN {
            let next = if upward { b * two } else { b / two };
            let r = self.boundary_residual(next)?;
            if r == T::zero() {
                return Ok(next);
            }
            if (r > T::zero()) != upward {
                let (lo, hi) = if upward { (b, next) } else { (next, b) };
                let root = find_root_bracketed(
                    |x| self.boundary_residual(x).unwrap_or(T::nan()),
                    Bracket::new(lo, hi)?,
                    tol,
                )?;
                return Ok(root);
            }
            b = next;
        }
        Err(Error::Boundary(format!(
            "no sign change of β[φ] - φ within 2^{MAX_SCAN} of b = {start}"
        )))
    }
}

/// Unique positive root of `β[φ](b) = φ(b)`, scanning out from where `φ`
/// crosses the middle of its range.
pub fn solve_boundary<T: Real>(phi: &GridFunction<T>, exp: &Exponents<T>) -> Result<T> {
    let v = phi.values();
    let (lo, hi) = v.iter().fold((v[0], v[0]), |(a, b), &y| (a.min(y), b.max(y)));
    let mid = (lo + hi) * T::lit(0.5);
    let i = v.iter().position(|&y| y >= mid).unwrap_or(v.len() / 2);
    Operator::new(phi, *exp)?.solve_boundary_from(phi.abscissae()[i], T::lit(ROOT_TOL))
}

/// `U^0 = h`, `U^{k+1} = T_{b_{k+1}}[U^k]` with `β[U^k](b_{k+1}) = U^k(b_{k+1})`.
pub fn iterate_scheme<T: Real>(h: &Payoff<T>, model: &UvmModel<T>) -> Result<Vec<StageFunction<T>>> {
    iterate_scheme_with_tol(h, model, T::lit(ROOT_TOL))
}

pub fn iterate_scheme_with_tol<T: Real>(
    h: &Payoff<T>,
    model: &UvmModel<T>,
    tol: T,
) -> Result<Vec<StageFunction<T>>> {
    let report = check_payoff_admissible(h);
    if !report.passed() {
        return Err(Error::Input(format!("payoff {report}")));
    }
    let exp = model.exponents()?;
    let mut stages: Vec<StageFunction<T>> = Vec::with_capacity(model.stages);
    let mut b = h.b0;
    for k in 1..=model.stages {
        let prev = stages.last().map_or(&h.h, |s| &s.value);
        let step = || -> Result<(GridFunction<T>, T)> {
            let op = Operator::new(prev, exp)?;
            let bk = op.solve_boundary_from(b, tol)?;
            Ok((op.apply(bk)?, bk))
        };
        let (value, bk) = step().map_err(|e| e.at_stage(k))?;
        b = bk;
        stages.push(StageFunction {
            value,
            boundary: bk,
            stage: k,
        });
    }
    Ok(stages)
}
