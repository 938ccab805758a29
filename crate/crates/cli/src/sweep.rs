//! One-dimensional parameter sweeps.

use anyhow::{bail, Result};
use rayon::prelude::*;

use crate::csv::Table;
use crate::scenario::{Scenario, SweepVar, METRIC_COLUMNS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub base: Scenario,
}

/// `steps` evenly spaced points from `from` to `to`, both included.
pub fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    let span = to - from;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + span * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            bail!("parameter `steps` = {} is out of range: must be >= 2", self.steps);
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            bail!("parameter `from`/`to` must be finite");
        }
        if !(self.from < self.to) {
            bail!(
                "parameter `from` = {} is out of range: must be < to = {}",
                self.from,
                self.to
            );
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        grid(self.from, self.to, self.steps)
    }
}

/// Evaluates every grid point; rows come back in ascending order of the
/// swept value regardless of scheduling.
pub fn run(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let mut probe = spec.base;
    probe.set(spec.var, spec.from)?;
    let rows = spec
        .points()
        .into_par_iter()
        .map(|v| {
            let mut s = spec.base;
            s.set(spec.var, v)?;
            let m = s.evaluate()?;
            let mut row = vec![v];
            row.extend(m.row());
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec![spec.var.name()];
    columns.extend(METRIC_COLUMNS);
    let mut table = Table::new(&columns);
    table.comment(spec.base.describe(Some(spec.var)));
    table.comment(format!(
        "sweep {} from {} to {} steps {}",
        spec.var.name(),
        crate::csv::fmt_num(spec.from),
        crate::csv::fmt_num(spec.to),
        spec.steps
    ));
    for row in rows {
        table.push(row);
    }
    Ok(table)
}
