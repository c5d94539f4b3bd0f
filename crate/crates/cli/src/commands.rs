use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use randhorizon::bounds::{
    bsb_fd_oracle, convergence_diagnostic, erlang_mixture, erlang_mixture_fixed, mc_lower_bound,
    ErlangHorizon, PutExercise,
};
use randhorizon::digital::{
    digital_value_with, exact_digital_value, exact_digital_value_quadrature, reproduce_table, DigitalModel,
};
use randhorizon::numerics::DEFAULT_NODES;
use randhorizon::put::{binomial_oracle, carr_price_with, carr_richardson_with, PutModel, RICHARDSON_STAGES};
use randhorizon::uvm::{check_payoff_admissible, iterate_scheme_with_tol, Payoff, UvmModel};

use crate::config::{need, Params};
use crate::output::{Cell, Table};
use crate::{CliError, Command};

const DEFAULT_TREE_STEPS: usize = 20_000;
/// Tree size inside the sandwich's Erlang mixture, averaged over N and N+1 steps.
const DEFAULT_MIXTURE_TREE_STEPS: usize = 1000;
const DEFAULT_MC_PATHS: usize = 100_000;
const DEFAULT_SEED: u64 = 42;
const DEFAULT_RATE_STAGES: [usize; 4] = [10, 50, 200, 1000];
const DEFAULT_ROOT_TOL: f64 = 1e-10;
/// Slack on the upper side of the sandwich: the mixture's quadrature tolerance.
const SANDWICH_UPPER_SLACK: f64 = 1e-3;

fn numerical(command: &'static str) -> impl Fn(randhorizon::Error) -> CliError {
    move |source| CliError::Numerical { command, source }
}

pub fn run(command: &Command, p: &Params) -> Result<Table, CliError> {
    match command {
        Command::ExactDigital => exact_digital(p),
        Command::Digital => digital(p),
        Command::Uvm => uvm(p),
        Command::Put => put(p),
        Command::Sandwich => sandwich(p),
        Command::Repro { table } => repro(*table),
        Command::Rate => rate(p),
    }
}

fn exact_digital(p: &Params) -> Result<Table, CliError> {
    let (k, x, s, t) = (need(p.strike, "K")?, need(p.x, "x")?, need(p.sigma2, "sigma2")?, need(p.horizon, "T")?);
    let value = exact_digital_value(k, x, s, t);
    let oracle = exact_digital_value_quadrature(k, x, s, t).map_err(numerical("exact-digital"))?;
    let mut table = Table::new(vec!["K", "x", "sigma2", "T", "value", "oracle", "abs_err"]);
    table.push(vec![
        Cell::Input(k),
        Cell::Input(x),
        Cell::Input(s),
        Cell::Input(t),
        Cell::Num(value),
        Cell::Num(oracle),
        Cell::Num((value - oracle).abs()),
    ]);
    Ok(table)
}

fn digital(p: &Params) -> Result<Table, CliError> {
    let (k, x, s, t) = (need(p.strike, "K")?, need(p.x, "x")?, need(p.sigma2, "sigma2")?, need(p.horizon, "T")?);
    let n = need(p.n, "n")?;
    let nodes = p.grid_points.unwrap_or(DEFAULT_NODES);
    let err = numerical("digital");
    let model = DigitalModel::new(k, x, s, t, n).map_err(&err)?;
    let value = digital_value_with(&model, nodes).map_err(&err)?;
    let h = ErlangHorizon::new(n, t).map_err(&err)?;
    let oracle = erlang_mixture(|z| exact_digital_value(k, x, s, z), &h).map_err(&err)?;
    let mut table = Table::new(vec!["K", "x", "sigma2", "T", "n", "grid_points", "value", "oracle", "abs_err"]);
    table.push(vec![
        Cell::Input(k),
        Cell::Input(x),
        Cell::Input(s),
        Cell::Input(t),
        Cell::Int(n as u64),
        Cell::Int(nodes as u64),
        Cell::Num(value),
        Cell::Num(oracle),
        Cell::Num((value - oracle).abs()),
    ]);
    Ok(table)
}

/// Two-column `x h(x)` text, whitespace or comma separated, `#` comments.
pub fn read_payoff(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read payoff {}: {e}", path.display())))?;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let cols: Vec<&str> = body.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[x, h]) if x.is_finite() && h.is_finite() => {
                if x <= 0.0 || pts.last().is_some_and(|&(px, _)| x <= px) {
                    return Err(CliError::Config(format!(
                        "payoff line {}: x must be positive and strictly increasing",
                        i + 1
                    )));
                }
                pts.push((x, h));
            }
            _ => return Err(CliError::Config(format!("payoff line {}: expected two numbers", i + 1))),
        }
    }
    if pts.len() < 2 {
        return Err(CliError::Config("payoff file needs at least two points".into()));
    }
    Ok(pts)
}

/// Piecewise-linear interpolant, constant beyond the first and last points.
fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    let i = pts.partition_point(|&(px, _)| px <= x);
    if i == 0 {
        return pts[0].1;
    }
    if i == pts.len() {
        return pts[pts.len() - 1].1;
    }
    let ((x0, h0), (x1, h1)) = (pts[i - 1], pts[i]);
    h0 + (h1 - h0) * (x - x0) / (x1 - x0)
}

fn uvm(p: &Params) -> Result<Table, CliError> {
    let path = p.payoff.as_deref().ok_or_else(|| CliError::Config("missing required parameter `payoff`".into()))?;
    let x = need(p.x, "x")?;
    let (s1, s2, t, n) = (need(p.sigma1, "sigma1")?, need(p.sigma2, "sigma2")?, need(p.horizon, "T")?, need(p.n, "n")?);
    let pts = Arc::new(read_payoff(path)?);
    let x0 = match p.x0 {
        Some(x0) => x0,
        None => pts
            .iter()
            .take_while(|&&(_, h)| h == 0.0)
            .last()
            .map(|&(x, _)| x)
            .filter(|&x| x < 1.0)
            .ok_or_else(|| CliError::Config("payoff has no zero level below 1; set `x0`".into()))?,
    };
    let b0 = p.b0.unwrap_or(1.0);
    let nodes = p.grid_points.unwrap_or(DEFAULT_NODES);
    let err = numerical("uvm");
    let model = UvmModel::new(s1, s2, t, n).map_err(&err)?;
    let grid = Payoff::default_grid(x0, s2, t, nodes).map_err(&err)?;
    let h = |y: f64| interpolate(&pts, y);
    let payoff = Payoff::from_fn(h, x0, b0, grid).map_err(&err)?;
    let report = check_payoff_admissible(&payoff);
    eprintln!("payoff admissibility: {report}");
    if !report.passed() {
        return Err(CliError::Config(format!("payoff {} is not admissible", path.display())));
    }
    let stages = iterate_scheme_with_tol(&payoff, &model, p.tol.unwrap_or(DEFAULT_ROOT_TOL)).map_err(&err)?;
    let last = stages.last().expect("n ≥ 1");
    let value = last.value.eval(x);
    let oracle = bsb_fd_oracle(h, &model, x).map_err(&err)?;
    let mut table = Table::new(vec![
        "payoff", "x", "sigma1", "sigma2", "T", "n", "x0", "b0", "boundary", "value", "oracle", "abs_err",
    ]);
    table.push(vec![
        Cell::Text(path.display().to_string()),
        Cell::Input(x),
        Cell::Input(s1),
        Cell::Input(s2),
        Cell::Input(t),
        Cell::Int(n as u64),
        Cell::Input(x0),
        Cell::Input(b0),
        Cell::Num(last.boundary),
        Cell::Num(value),
        Cell::Num(oracle),
        Cell::Num((value - oracle).abs()),
    ]);
    Ok(table)
}

struct PutInputs {
    model: PutModel<f64>,
    x: f64,
}

fn put_inputs(p: &Params, command: &'static str, n: usize) -> Result<PutInputs, CliError> {
    let (k, x, r, s, t) = (
        need(p.strike, "K")?,
        need(p.x, "x")?,
        need(p.r, "r")?,
        need(p.sigma, "sigma")?,
        need(p.horizon, "T")?,
    );
    let model = PutModel::new(k, r, s, t, n).map_err(numerical(command))?;
    Ok(PutInputs { model, x })
}

fn put_echo(m: &PutModel<f64>, x: f64) -> Vec<Cell> {
    vec![Cell::Input(m.strike), Cell::Input(x), Cell::Input(m.rate), Cell::Input(m.sigma), Cell::Input(m.horizon)]
}

fn put(p: &Params) -> Result<Table, CliError> {
    let PutInputs { model, x } = put_inputs(p, "put", p.n.unwrap_or(1))?;
    let nodes = p.grid_points.unwrap_or(DEFAULT_NODES);
    let counts = p.richardson_nodes.clone().unwrap_or(RICHARDSON_STAGES.to_vec());
    let steps = p.tree_steps.unwrap_or(DEFAULT_TREE_STEPS);
    let err = numerical("put");
    let oracle = binomial_oracle(model.strike, model.rate, model.sigma, model.horizon, x, steps);
    let mut table = Table::new(vec![
        "K", "x", "r", "sigma", "T", "n", "richardson_nodes", "tree_steps", "value", "oracle", "abs_err",
    ]);
    let mut row = |n: Cell, nodes_cell: Cell, value: f64| {
        let mut r = put_echo(&model, x);
        r.extend([n, nodes_cell, Cell::Int(steps as u64), Cell::Num(value), Cell::Num(oracle), Cell::Num((value - oracle).abs())]);
        table.push(r);
    };
    if let Some(n) = p.n {
        let (value, _) = carr_price_with(&model.with_stages(n).map_err(&err)?, x, nodes).map_err(&err)?;
        row(Cell::Int(n as u64), Cell::Empty, value);
    }
    let rich = carr_richardson_with(&model, x, &counts, nodes).map_err(&err)?;
    let label = counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";");
    row(Cell::Empty, Cell::Text(label), rich);
    Ok(table)
}

fn sandwich(p: &Params) -> Result<Table, CliError> {
    let n = need(p.n, "n")?;
    let PutInputs { model, x } = put_inputs(p, "sandwich", n)?;
    let nodes = p.grid_points.unwrap_or(DEFAULT_NODES);
    let paths = p.mc_paths.unwrap_or(DEFAULT_MC_PATHS);
    let seed = p.seed.unwrap_or(DEFAULT_SEED);
    let steps = p.tree_steps.unwrap_or(DEFAULT_MIXTURE_TREE_STEPS);
    let err = numerical("sandwich");
    let (value, stages) = carr_price_with(&model, x, nodes).map_err(&err)?;
    let h = ErlangHorizon::new(n, model.horizon).map_err(&err)?;
    let policy = PutExercise::from_stages(&model, x, &stages).map_err(&err)?;
    let lower = mc_lower_bound(&policy, &h, paths, seed).map_err(&err)?;
    let tree = |z: f64| {
        let b = |s| binomial_oracle(model.strike, model.rate, model.sigma, z, x, s);
        0.5 * (b(steps) + b(steps + 1))
    };
    let upper = erlang_mixture_fixed(tree, &h, 2);
    let mut table = Table::new(vec![
        "K", "x", "r", "sigma", "T", "n", "mc_paths", "seed", "tree_steps", "bound", "value", "oracle", "abs_err",
        "std_error", "holds",
    ]);
    let sides = [
        ("lower", lower.mean, Cell::Num(lower.std_error), lower.mean - 3.0 * lower.std_error <= value),
        ("upper", upper, Cell::Empty, value <= upper + SANDWICH_UPPER_SLACK),
    ];
    for (side, oracle, se, holds) in sides {
        let mut r = put_echo(&model, x);
        r.extend([
            Cell::Int(n as u64),
            Cell::Int(paths as u64),
            Cell::Int(seed),
            Cell::Int(steps as u64),
            Cell::Text(side.into()),
            Cell::Num(value),
            Cell::Num(oracle),
            Cell::Num((value - oracle).abs()),
            se,
            Cell::Bool(holds),
        ]);
        table.push(r);
    }
    Ok(table)
}

fn repro(which: Option<u8>) -> Result<Table, CliError> {
    let tables: Vec<u8> = which.map_or(vec![1, 2], |t| vec![t]);
    let mut table = Table::new(vec!["table", "K", "x", "sigma2", "T", "n", "value", "oracle", "abs_err", "status"]);
    for t in tables {
        let rows = reproduce_table(t, DEFAULT_NODES).map_err(numerical("repro"))?;
        let (decimals, sci) = if t == 1 { (4, false) } else { (4, true) };
        let failed = rows.iter().filter(|r| r.status == randhorizon::digital::CellStatus::Fail).count();
        eprintln!("table {t}: {} cells, {failed} outside tolerance", rows.len());
        for r in rows {
            table.push(vec![
                Cell::Int(t as u64),
                Cell::Input(r.strike),
                Cell::Input(r.spot),
                Cell::Input(r.sigma2),
                Cell::Input(r.horizon),
                r.stages.map_or(Cell::Text("exact".into()), |n| Cell::Int(n as u64)),
                Cell::Published { value: r.value, decimals, sci },
                Cell::Published { value: r.reference, decimals, sci },
                Cell::Num(r.abs_err()),
                Cell::Text(r.status.as_str().into()),
            ]);
        }
    }
    Ok(table)
}

fn rate(p: &Params) -> Result<Table, CliError> {
    let (k, x, s, t) = (need(p.strike, "K")?, need(p.x, "x")?, need(p.sigma2, "sigma2")?, need(p.horizon, "T")?);
    let ns = p.ns.clone().unwrap_or(DEFAULT_RATE_STAGES.to_vec());
    let nodes = p.grid_points.unwrap_or(DEFAULT_NODES);
    let err = numerical("rate");
    let values = ns
        .par_iter()
        .map(|&n| Ok((n, digital_value_with(&DigitalModel::new(k, x, s, t, n)?, nodes)?)))
        .collect::<randhorizon::Result<Vec<_>>>()
        .map_err(&err)?;
    let exact = exact_digital_value(k, x, s, t);
    let fit = convergence_diagnostic(&values, exact).map_err(|e| CliError::Check(format!("rate: convergence diagnostic failed: {e}")))?;
    let order = fit.order.map_or(Cell::Empty, Cell::Num);
    let mut table = Table::new(vec!["K", "x", "sigma2", "T", "n", "value", "oracle", "abs_err", "order", "excluded"]);
    for (n, v) in values {
        table.push(vec![
            Cell::Input(k),
            Cell::Input(x),
            Cell::Input(s),
            Cell::Input(t),
            Cell::Int(n as u64),
            Cell::Num(v),
            Cell::Num(exact),
            Cell::Num((v - exact).abs()),
            order.clone(),
            Cell::Bool(fit.excluded.contains(&n)),
        ]);
    }
    Ok(table)
}
