//! CSV data sets for figures 2-5.
//!
//! Figure 2: SPDC (`eta = 1`, `nu = 0`) versus `xi`, standard binning with the
//! textbook angles and transmitted-only binning with angles optimized at each
//! `xi`, plus the global five-variable optimum. Figures 3-5: quantum dot versus
//! `eta` at `nu = 1e-3` for `p` in {0.9, 1} and `fss` in {0, 0.25}, plus the
//! security thresholds obtained by root-finding the key-rate zero.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use qkd_feasibility::optimizer::{optimize_with, Objective, OptimizerConfig, Variable};
use qkd_feasibility::rates::{bb84_max_qber, di_max_qber, di_min_bell};
use qkd_feasibility::metrics::effective_qber;
use qkd_feasibility::{
    BinningStrategy, DetectorModel, OptimizationProblem, OptimizationResult, SourceModel,
};

use crate::csv::{fmt_num, Table};
use crate::scenario::{chsh_name, default_chsh, Scenario, SweepVar, METRIC_COLUMNS};
use crate::sweep::{self, grid, SweepSpec};

pub const XI_RANGE: (f64, f64) = (0.01, 1.2);
pub const ETA_RANGE: (f64, f64) = (0.8, 1.0);
pub const XI_STEPS: usize = 120;
pub const ETA_STEPS: usize = 101;
pub const QD_NU: f64 = 1e-3;
pub const QD_P: [f64; 2] = [0.9, 1.0];
pub const QD_FSS: [f64; 2] = [0.0, 0.25];
pub const ANGLE_BUDGET: usize = 4_000;
pub const FULL_BUDGET: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReproduceOptions {
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub seed: u64,
}

impl ReproduceOptions {
    fn range(&self, default: (f64, f64), steps: usize) -> (f64, f64, usize) {
        (
            self.from.unwrap_or(default.0),
            self.to.unwrap_or(default.1),
            self.steps.unwrap_or(steps),
        )
    }
}

/// Writes the CSV files for `figure` into `outdir` and returns their paths.
pub fn reproduce(figure: u32, outdir: &Path, opts: &ReproduceOptions) -> Result<Vec<PathBuf>> {
    if !(2..=5).contains(&figure) {
        bail!("parameter `figure` = {figure} is out of range: must be one of 2, 3, 4, 5");
    }
    fs::create_dir_all(outdir)
        .with_context(|| format!("cannot create output directory {}", outdir.display()))?;
    let tables = match figure {
        2 => figure2(opts)?,
        3 => {
            let mut t = qd_series(3, opts)?;
            t.push(("fig3_threshold.csv".into(), bell_threshold(opts)?));
            t
        }
        4 => {
            let mut t = qd_series(4, opts)?;
            t.push(("fig4_threshold.csv".into(), qber_threshold(opts)?));
            t
        }
        _ => qd_series(5, opts)?,
    };
    let mut paths = Vec::with_capacity(tables.len());
    for (name, table) in tables {
        let path = outdir.join(name);
        table
            .write(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}

fn series_name(figure: u32, p: f64, fss: f64) -> String {
    format!("fig{figure}_p{}_fss{}.csv", fmt_num(p), fmt_num(fss))
}

fn qd_series(figure: u32, opts: &ReproduceOptions) -> Result<Vec<(String, Table)>> {
    let (from, to, steps) = opts.range(ETA_RANGE, ETA_STEPS);
    let mut out = Vec::new();
    for p in QD_P {
        for fss in QD_FSS {
            let spec = SweepSpec {
                var: SweepVar::Eta,
                from,
                to,
                steps,
                base: Scenario::qd(fss, p, 1.0, QD_NU),
            };
            out.push((series_name(figure, p, fss), sweep::run(&spec)?));
        }
    }
    Ok(out)
}

/// Smallest Bell value with a positive DI rate at each point's QBER.
fn bell_threshold(opts: &ReproduceOptions) -> Result<Table> {
    let (from, to, steps) = opts.range(ETA_RANGE, ETA_STEPS);
    let mut columns = vec!["eta".to_string()];
    columns.extend(QD_P.iter().map(|p| format!("s_min_p{}", fmt_num(*p))));
    let rows = grid(from, to, steps)
        .into_par_iter()
        .map(|eta| {
            let mut row = vec![eta];
            for p in QD_P {
                let q = Scenario::qd(0.0, p, eta, QD_NU).evaluate()?.qber_di;
                row.push(di_min_bell(effective_qber(q))?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table {
        columns,
        ..Table::default()
    };
    table.comment(format!("source=qd nu={} binning=standard", fmt_num(QD_NU)));
    table.comment("s_min: Bell value at which the DI key rate vanishes for the QBER at this eta (QBER does not depend on fss)");
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Largest QBER with a positive DI rate at each series' Bell value, and the
/// BB84 limit.
fn qber_threshold(opts: &ReproduceOptions) -> Result<Table> {
    let (from, to, steps) = opts.range(ETA_RANGE, ETA_STEPS);
    let mut columns = vec!["eta".to_string()];
    for p in QD_P {
        for fss in QD_FSS {
            columns.push(format!("q_max_di_p{}_fss{}", fmt_num(p), fmt_num(fss)));
        }
    }
    columns.push("q_max_bb84".into());
    let bb84 = bb84_max_qber::<f64>();
    let rows = grid(from, to, steps)
        .into_par_iter()
        .map(|eta| {
            let mut row = vec![eta];
            for p in QD_P {
                for fss in QD_FSS {
                    let s = Scenario::qd(fss, p, eta, QD_NU).evaluate()?.bell_s;
                    row.push(di_max_qber(s.min(2.0 * std::f64::consts::SQRT_2))?.unwrap_or(f64::NAN));
                }
            }
            row.push(bb84);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table {
        columns,
        ..Table::default()
    };
    table.comment(format!("source=qd nu={} binning=standard", fmt_num(QD_NU)));
    table.comment("q_max: QBER at which the key rate vanishes; nan where S <= 2 leaves no secure QBER");
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

fn spdc_problem(xi: f64, free: &[Variable]) -> Result<OptimizationProblem> {
    let mut problem = OptimizationProblem::new(
        Objective::BellParameter,
        free,
        SourceModel::spdc(xi)?,
        DetectorModel::ideal(),
        BinningStrategy::TransmittedOnly,
    );
    problem.plan.chsh = default_chsh(BinningStrategy::TransmittedOnly);
    Ok(problem)
}

/// Five-variable optimum of the transmitted-only Bell value.
pub fn figure2_optimum(seed: u64) -> Result<OptimizationResult> {
    let free = [
        Variable::ThetaA1,
        Variable::ThetaA2,
        Variable::ThetaB1,
        Variable::ThetaB2,
        Variable::Xi,
    ];
    let problem = spdc_problem(0.5, &free)?;
    Ok(optimize_with(&problem, seed, FULL_BUDGET, &OptimizerConfig::default())?)
}

fn figure2(opts: &ReproduceOptions) -> Result<Vec<(String, Table)>> {
    let (from, to, steps) = opts.range(XI_RANGE, XI_STEPS);

    let standard = sweep::run(&SweepSpec {
        var: SweepVar::Xi,
        from,
        to,
        steps,
        base: Scenario::spdc(from, 1.0, 0.0, BinningStrategy::Standard),
    })?;

    let sweep_spec = SweepSpec {
        var: SweepVar::Xi,
        from,
        to,
        steps,
        base: Scenario::spdc(from, 1.0, 0.0, BinningStrategy::TransmittedOnly),
    };
    sweep_spec.validate()?;
    let rows = sweep_spec
        .points()
        .into_par_iter()
        .map(|xi| {
            let problem = spdc_problem(xi, &Variable::ANGLES)?;
            let r = optimize_with(&problem, opts.seed, ANGLE_BUDGET, &OptimizerConfig::default())?;
            let mut s = Scenario::spdc(xi, 1.0, 0.0, BinningStrategy::TransmittedOnly);
            s.plan = r.plan;
            s.plan.theta_a0 = r.plan.theta_b1;
            let m = s.evaluate()?;
            let mut row = vec![xi];
            row.extend(m.row());
            row.extend(r.chsh_angles());
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["xi"];
    columns.extend(METRIC_COLUMNS);
    columns.extend(["theta_a1", "theta_a2", "theta_b1", "theta_b2"]);
    let mut vivoli = Table::new(&columns);
    vivoli.comment(format!(
        "source=spdc eta=1 nu=0 binning=vivoli chsh_minus={}",
        chsh_name(default_chsh(BinningStrategy::TransmittedOnly))
    ));
    vivoli.comment(format!(
        "angles optimized per xi for bell_s (seed {}, budget {}); key setting a0 = b1",
        opts.seed, ANGLE_BUDGET
    ));
    for row in rows {
        vivoli.push(row);
    }

    let best = figure2_optimum(opts.seed)?;
    let xi = best.value_of(Variable::Xi).expect("xi is free");
    let mut s = Scenario::spdc(xi, 1.0, 0.0, BinningStrategy::TransmittedOnly);
    s.plan = best.plan;
    let m = s.evaluate()?;
    let mut summary = Table::new(&[
        "bell_s",
        "xi",
        "theta_a1",
        "theta_a2",
        "theta_b1",
        "theta_b2",
        "qber_di",
        "rate_di",
        "evaluations",
        "converged",
    ]);
    summary.comment(format!(
        "source=spdc eta=1 nu=0 binning=vivoli chsh_minus={}",
        chsh_name(best.plan.chsh)
    ));
    summary.comment(format!(
        "five-variable optimum (seed {}, budget {}); angles shifted so theta_b1 = 0",
        opts.seed, FULL_BUDGET
    ));
    let mut row = vec![best.best_value, xi];
    row.extend(best.chsh_angles());
    row.extend([
        m.qber_di,
        m.rate_di,
        best.evaluations as f64,
        if best.converged { 1.0 } else { 0.0 },
    ]);
    summary.push(row);

    Ok(vec![
        ("fig2_standard.csv".into(), standard),
        ("fig2_vivoli.csv".into(), vivoli),
        ("fig2_summary.csv".into(), summary),
    ])
}
