//! Command-line front end: `eval`, `sweep`, `optimize` and `reproduce`.

pub mod csv;
pub mod reproduce;
pub mod scenario;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qkd_feasibility::optimizer::{optimize_with, Bound, Objective, OptimizerConfig, Variable};
use qkd_feasibility::OptimizationProblem;

use crate::csv::{fmt_num, Table};
use crate::reproduce::ReproduceOptions;
use crate::scenario::{chsh_name, ModelArgs, SourceKind, SweepVar};
use crate::sweep::SweepSpec;

#[derive(Debug, Parser)]
#[command(name = "eqkd", version, about = "Feasibility of entanglement-based QKD with realistic sources")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bell value, QBERs and key rates at one point.
    Eval(EvalArgs),
    /// Metrics along one parameter, as CSV.
    Sweep(SweepArgs),
    /// Maximize the Bell value or DI key rate over angles (and xi).
    Optimize(OptimizeArgs),
    /// Write the CSV data of a figure.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Print a JSON object instead of labeled lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub var: SweepVar,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Bell,
    DiRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FreeArg {
    A1,
    A2,
    B1,
    B2,
    Xi,
}

impl From<FreeArg> for Variable {
    fn from(v: FreeArg) -> Self {
        match v {
            FreeArg::A1 => Variable::ThetaA1,
            FreeArg::A2 => Variable::ThetaA2,
            FreeArg::B1 => Variable::ThetaB1,
            FreeArg::B2 => Variable::ThetaB2,
            FreeArg::Xi => Variable::Xi,
        }
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Bell)]
    pub objective: ObjectiveArg,
    /// Free variables; defaults to the four angles, plus xi for SPDC.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub free: Vec<FreeArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 5)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 5)]
    pub starts: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub xi_min: f64,
    #[arg(long, default_value_t = 1.5)]
    pub xi_max: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Figure number: 2, 3, 4 or 5.
    #[arg(long)]
    pub figure: u32,
    #[arg(long)]
    pub outdir: PathBuf,
    /// Override the start of the figure's axis range.
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Eval(a) => eval(&a, out),
        Command::Sweep(a) => sweep_cmd(&a, out),
        Command::Optimize(a) => optimize_cmd(&a, out),
        Command::Reproduce(a) => {
            let opts = ReproduceOptions {
                from: a.from,
                to: a.to,
                steps: a.steps,
                seed: a.seed,
            };
            for path in reproduce::reproduce(a.figure, &a.outdir, &opts)? {
                writeln!(out, "{}", path.display())?;
            }
            Ok(())
        }
    }
}

fn eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let m = args.model.scenario().evaluate()?;
    if args.json {
        let v = serde_json::json!({
            "bell_s": m.bell_s,
            "qber_di": m.qber_di,
            "qber_bb84": m.qber_bb84,
            "rate_di": m.rate_di,
            "rate_bb84": m.rate_bb84,
            "correlations": m.correlations,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        writeln!(out, "S      = {}", fmt_num(m.bell_s))?;
        writeln!(out, "Q_DI   = {}", fmt_num(m.qber_di))?;
        writeln!(out, "Q_BB84 = {}", fmt_num(m.qber_bb84))?;
        writeln!(out, "r_DI   = {}", fmt_num(m.rate_di))?;
        writeln!(out, "r_BB84 = {}", fmt_num(m.rate_bb84))?;
    }
    Ok(())
}

fn emit(table: &Table, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => table
            .write(p)
            .with_context(|| format!("cannot write {}", p.display())),
        None => Ok(out.write_all(table.render().as_bytes())?),
    }
}

fn sweep_cmd(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let spec = SweepSpec {
        var: args.var,
        from: args.from,
        to: args.to,
        steps: args.steps,
        base: args.model.scenario(),
    };
    let table = sweep::run(&spec)?;
    emit(&table, args.out.as_ref(), out)
}

fn optimize_cmd(args: &OptimizeArgs, out: &mut dyn Write) -> Result<()> {
    let scenario = args.model.scenario();
    let mut free: Vec<Variable> = args.free.iter().map(|&v| v.into()).collect();
    if free.is_empty() {
        free.extend(Variable::ANGLES);
        if scenario.source == SourceKind::Spdc {
            free.push(Variable::Xi);
        }
    }
    let objective = match args.objective {
        ObjectiveArg::Bell => Objective::BellParameter,
        ObjectiveArg::DiRate => Objective::DiKeyRate,
    };
    let mut problem = OptimizationProblem::new(
        objective,
        &free,
        scenario.source_model()?,
        scenario.detector()?,
        scenario.binning,
    );
    problem.plan = scenario.plan;
    problem.backend = scenario.backend;
    for (v, b) in problem.free.iter_mut() {
        if *v == Variable::Xi {
            *b = Bound {
                lo: args.xi_min,
                hi: args.xi_max,
            };
        }
    }
    if args.budget < 100 {
        bail!("parameter `budget` = {} is out of range: must be >= 100", args.budget);
    }
    let config = OptimizerConfig {
        grid_points: args.grid_points,
        starts: args.starts,
        ..OptimizerConfig::default()
    };
    let r = optimize_with(&problem, args.seed, args.budget, &config)?;
    let xi = r.value_of(Variable::Xi).unwrap_or(scenario.xi);

    let mut table = Table::new(&[
        "value",
        "theta_a1",
        "theta_a2",
        "theta_b1",
        "theta_b2",
        "xi",
        "evaluations",
        "converged",
    ]);
    table.comment(scenario.describe(None));
    let names: Vec<&str> = free.iter().map(|v| v.name()).collect();
    table.comment(format!(
        "objective={} free={} seed={} budget={} chsh_minus={}",
        match objective {
            Objective::BellParameter => "bell",
            Objective::DiKeyRate => "di-rate",
        },
        names.join(","),
        args.seed,
        args.budget,
        chsh_name(r.plan.chsh)
    ));
    let mut row = vec![r.best_value];
    row.extend(r.chsh_angles());
    row.extend([xi, r.evaluations as f64, if r.converged { 1.0 } else { 0.0 }]);
    table.push(row);
    emit(&table, args.out.as_ref(), out)
}
