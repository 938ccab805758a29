//! Derivative-free maximization of the CHSH value or the DI key rate over
//! analyzer angles and, for SPDC, the squeezing parameter.
//!
//! A seeded coarse grid (at least five points per free variable) picks the
//! starting points; each start is refined with Nelder-Mead. Angles are
//! `pi`-periodic and are wrapped rather than clamped.

mod simplex;
mod symmetry;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use simplex::{maximize, SimplexOutcome};
pub use symmetry::{canonicalize, equivalent_for_difference_only, setting_differences, swap_parties};

use crate::binning::BinningStrategy;
use crate::error::{domain, Error, Result};
use crate::metrics::{effective_qber, Backend, Evaluator, MeasurementPlan};
use crate::modes::{wrap_angle, DetectorModel};
use crate::rates::{di_key_rate, KeyRateInput};
use crate::scalar::Real;
use crate::source::SourceModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    BellParameter,
    DiKeyRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    ThetaA1,
    ThetaA2,
    ThetaB1,
    ThetaB2,
    Xi,
}

impl Variable {
    pub const ANGLES: [Variable; 4] = [
        Variable::ThetaA1,
        Variable::ThetaA2,
        Variable::ThetaB1,
        Variable::ThetaB2,
    ];

    pub fn is_angle(self) -> bool {
        !matches!(self, Variable::Xi)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variable::ThetaA1 => "theta_a1",
            Variable::ThetaA2 => "theta_a2",
            Variable::ThetaB1 => "theta_b1",
            Variable::ThetaB2 => "theta_b2",
            Variable::Xi => "xi",
        }
    }
}

/// Closed search interval; angles use `[0, pi)` and wrap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Debug, Clone)]
pub struct OptimizationProblem<T> {
    pub objective: Objective,
    pub free: Vec<(Variable, Bound<T>)>,
    pub source: SourceModel<T>,
    pub detector: DetectorModel<T>,
    pub strategy: BinningStrategy,
    /// Values of the non-free angles and the key setting.
    pub plan: MeasurementPlan<T>,
    pub backend: Backend,
}

impl<T: Real> OptimizationProblem<T> {
    /// Problem with the given variables free over their default ranges:
    /// angles over `[0, pi)` and `xi` over `[1e-3, 1.5]`.
    pub fn new(
        objective: Objective,
        free: &[Variable],
        source: SourceModel<T>,
        detector: DetectorModel<T>,
        strategy: BinningStrategy,
    ) -> Self {
        let free = free
            .iter()
            .map(|&v| (v, default_bound(v)))
            .collect();
        Self {
            objective,
            free,
            source,
            detector,
            strategy,
            plan: MeasurementPlan::default(),
            backend: Backend::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::Degenerate("no free variables"));
        }
        for (i, (v, b)) in self.free.iter().enumerate() {
            if self.free[..i].iter().any(|(w, _)| w == v) {
                return Err(domain(v.name(), f64::NAN, "listed twice"));
            }
            if !(b.lo < b.hi) || !b.lo.is_finite() || !b.hi.is_finite() {
                return Err(domain(v.name(), b.lo.as_f64(), "bound must satisfy lo < hi"));
            }
            if v.is_angle() && (b.lo < T::zero() || b.hi > T::PI()) {
                return Err(domain(v.name(), b.hi.as_f64(), "angle bounds must lie in [0, pi]"));
            }
            if *v == Variable::Xi {
                if !matches!(self.source, SourceModel::Spdc { .. }) {
                    return Err(Error::Unsupported("xi is only free for the SPDC source"));
                }
                if !(b.lo > T::zero() && b.hi <= T::lit(1.5)) {
                    return Err(domain("xi", b.lo.as_f64(), "bounds must lie in (0, 1.5]"));
                }
            }
        }
        self.source.validate()
    }

    /// Plan and source with `x` substituted for the free variables.
    fn instantiate(&self, x: &[T]) -> (MeasurementPlan<T>, SourceModel<T>) {
        let mut plan = self.plan;
        let mut source = self.source;
        for ((v, b), &val) in self.free.iter().zip(x) {
            let val = project(*v, *b, val);
            match v {
                Variable::ThetaA1 => plan.theta_a1 = val,
                Variable::ThetaA2 => plan.theta_a2 = val,
                Variable::ThetaB1 => plan.theta_b1 = val,
                Variable::ThetaB2 => plan.theta_b2 = val,
                Variable::Xi => {
                    if let SourceModel::Spdc { xi, .. } = &mut source {
                        *xi = val;
                    }
                }
            }
        }
        (plan, source)
    }

    /// Objective value at the given plan and source.
    pub fn evaluate_at(&self, plan: &MeasurementPlan<T>, source: &SourceModel<T>) -> Result<T> {
        let ev = Evaluator::new(source, self.detector, self.backend)?;
        let s = ev.bell_parameter(plan, self.strategy)?;
        match self.objective {
            Objective::BellParameter => Ok(s),
            Objective::DiKeyRate => {
                let q = effective_qber(ev.qber_di(plan, self.strategy)?);
                let s = s.min(T::lit(2.0) * T::SQRT_2());
                Ok(di_key_rate(KeyRateInput::new(q, s)?)?.rate)
            }
        }
    }

    pub fn evaluate(&self, x: &[T]) -> Result<T> {
        let (plan, source) = self.instantiate(x);
        self.evaluate_at(&plan, &source)
    }
}

fn default_bound<T: Real>(v: Variable) -> Bound<T> {
    if v.is_angle() {
        Bound {
            lo: T::zero(),
            hi: T::PI(),
        }
    } else {
        Bound {
            lo: T::lit(1e-3),
            hi: T::lit(1.5),
        }
    }
}

/// Angles spanning the full period wrap; everything else is clamped.
fn project<T: Real>(v: Variable, b: Bound<T>, x: T) -> T {
    if v.is_angle() && b.lo == T::zero() && b.hi == T::PI() {
        wrap_angle(x)
    } else {
        x.max(b.lo).min(b.hi)
    }
}

fn is_periodic<T: Real>(v: Variable, b: Bound<T>) -> bool {
    v.is_angle() && b.lo == T::zero() && b.hi == T::PI()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Coarse-grid points per free variable (at least 5).
    pub grid_points: usize,
    /// Number of best grid points refined locally.
    pub starts: usize,
    /// Simplex diameter at which a start counts as converged.
    pub xtol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_points: 5,
            starts: 5,
            xtol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub best_value: T,
    /// Free variables at the optimum, angles in canonical form.
    pub argmax: Vec<(Variable, T)>,
    /// Full plan at the optimum (canonical angles).
    pub plan: MeasurementPlan<T>,
    /// Source at the optimum (carries the optimal `xi` when it was free).
    pub source: SourceModel<T>,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Real> OptimizationResult<T> {
    pub fn value_of(&self, v: Variable) -> Option<T> {
        self.argmax.iter().find(|(w, _)| *w == v).map(|(_, x)| *x)
    }

    pub fn chsh_angles(&self) -> [T; 4] {
        [
            self.plan.theta_a1,
            self.plan.theta_a2,
            self.plan.theta_b1,
            self.plan.theta_b2,
        ]
    }
}

/// Runs the multi-start search with default configuration.
pub fn optimize<T: Real>(
    problem: &OptimizationProblem<T>,
    seed: u64,
    budget: usize,
) -> Result<OptimizationResult<T>> {
    optimize_with(problem, seed, budget, &OptimizerConfig::default())
}

pub fn optimize_with<T: Real>(
    problem: &OptimizationProblem<T>,
    seed: u64,
    budget: usize,
    config: &OptimizerConfig,
) -> Result<OptimizationResult<T>> {
    problem.validate()?;
    if budget < 100 {
        return Err(domain("budget", budget as f64, "must be >= 100"));
    }
    if config.grid_points < 5 {
        return Err(domain("grid_points", config.grid_points as f64, "must be >= 5"));
    }
    if config.starts == 0 {
        return Err(domain("starts", 0.0, "must be >= 1"));
    }
    let dim = problem.free.len();
    let grid_size = config
        .grid_points
        .checked_pow(dim as u32)
        .ok_or(domain("grid_points", config.grid_points as f64, "grid too large"))?;
    if grid_size > budget {
        return Err(domain(
            "budget",
            budget as f64,
            "must cover the coarse grid (grid_points^free_variables evaluations)",
        ));
    }

    // Seeded offset of the grid inside each cell.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes: Vec<Vec<T>> = problem
        .free
        .iter()
        .map(|(v, b)| {
            let u: f64 = rng.gen_range(0.0..1.0);
            let n = config.grid_points;
            let width = b.hi - b.lo;
            (0..n)
                .map(|i| {
                    let frac = if is_periodic(*v, *b) {
                        (i as f64 + u) / n as f64
                    } else {
                        // Interval: cells are evenly spaced including both ends.
                        (i as f64 + 0.5 * u) / (n as f64 - 0.5)
                    };
                    b.lo + width * T::lit(frac.min(1.0))
                })
                .collect()
        })
        .collect();
    let steps: Vec<T> = problem
        .free
        .iter()
        .map(|(_, b)| (b.hi - b.lo) / T::from_usize_lossy(2 * config.grid_points))
        .collect();

    let grid: Vec<(Vec<T>, T)> = (0..grid_size)
        .into_par_iter()
        .map(|mut idx| {
            let mut x = Vec::with_capacity(dim);
            for axis in &axes {
                x.push(axis[idx % axis.len()]);
                idx /= axis.len();
            }
            let v = problem.evaluate(&x)?;
            Ok((x, v))
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| {
        grid[j]
            .1
            .partial_cmp(&grid[i].1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let starts: Vec<usize> = order.into_iter().take(config.starts).collect();
    let share = (budget - grid_size) / starts.len();
    let xtol = T::lit(config.xtol);

    let refined: Vec<SimplexOutcome<T>> = starts
        .par_iter()
        .map(|&i| refine(problem, &grid[i].0, &steps, xtol, share))
        .collect::<Result<_>>()?;

    let mut evaluations = grid_size + refined.iter().map(|r| r.evaluations).sum::<usize>();
    let best = refined
        .into_iter()
        .map(|r| {
            let x: Vec<T> = r
                .x
                .iter()
                .zip(&problem.free)
                .map(|(&xi, (v, b))| project(*v, *b, xi))
                .collect();
            (x, r.value, r.converged)
        })
        .fold(None::<(Vec<T>, T, bool)>, |acc, cand| match acc {
            None => Some(cand),
            Some(cur) => {
                let better = cand.1 > cur.1
                    || (cand.1 == cur.1
                        && cand
                            .0
                            .partial_cmp(&cur.0)
                            == Some(std::cmp::Ordering::Less));
                Some(if better { cand } else { cur })
            }
        })
        .expect("at least one start");

    let (mut plan, source) = problem.instantiate(&best.0);
    let canon = canonicalize(
        [plan.theta_a1, plan.theta_a2, plan.theta_b1, plan.theta_b2],
        source.difference_only() && all_chsh_angles_free(problem),
    );
    plan.theta_a1 = canon[0];
    plan.theta_a2 = canon[1];
    plan.theta_b1 = canon[2];
    plan.theta_b2 = canon[3];
    let best_value = problem.evaluate_at(&plan, &source)?;
    evaluations += 1;

    let argmax = problem
        .free
        .iter()
        .map(|(v, _)| {
            let x = match v {
                Variable::ThetaA1 => plan.theta_a1,
                Variable::ThetaA2 => plan.theta_a2,
                Variable::ThetaB1 => plan.theta_b1,
                Variable::ThetaB2 => plan.theta_b2,
                Variable::Xi => match source {
                    SourceModel::Spdc { xi, .. } => xi,
                    _ => unreachable!("validated"),
                },
            };
            (*v, x)
        })
        .collect();

    Ok(OptimizationResult {
        best_value,
        argmax,
        plan,
        source,
        evaluations,
        converged: best.2,
    })
}

fn all_chsh_angles_free<T: Real>(problem: &OptimizationProblem<T>) -> bool {
    Variable::ANGLES
        .iter()
        .all(|v| problem.free.iter().any(|(w, b)| w == v && is_periodic(*w, *b)))
}

/// Nelder-Mead from one start, restarted from its own optimum while it keeps
/// improving and budget remains.
fn refine<T: Real>(
    problem: &OptimizationProblem<T>,
    x0: &[T],
    steps: &[T],
    xtol: T,
    budget: usize,
) -> Result<SimplexOutcome<T>> {
    let mut f = |x: &[T]| problem.evaluate(x);
    let dim = x0.len();
    if budget < dim + 1 {
        let value = problem.evaluate(x0)?;
        return Ok(SimplexOutcome {
            x: x0.to_vec(),
            value,
            evaluations: 1,
            converged: false,
        });
    }
    let mut out = maximize(&mut f, x0, steps, xtol, budget)?;
    let mut step_scale = T::lit(0.1);
    for _ in 0..3 {
        let left = budget.saturating_sub(out.evaluations);
        if !out.converged || left < 4 * (dim + 1) {
            break;
        }
        let s: Vec<T> = steps.iter().map(|s| *s * step_scale).collect();
        let again = maximize(&mut f, &out.x, &s, xtol, left)?;
        let improved = again.value > out.value + T::lit(1e-12);
        let used = out.evaluations + again.evaluations;
        if again.value >= out.value {
            out = SimplexOutcome {
                evaluations: used,
                ..again
            };
        } else {
            out.evaluations = used;
        }
        if !improved {
            break;
        }
        step_scale = step_scale * T::lit(0.1);
    }
    Ok(out)
}
