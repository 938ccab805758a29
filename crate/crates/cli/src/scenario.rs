//! Flag-level description of one evaluation point and its metrics.

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};

use qkd_feasibility::metrics::{Backend, ChshForm};
use qkd_feasibility::source::Truncation;
use qkd_feasibility::{
    BinningStrategy, DetectorModel, Evaluator, MeasurementPlan, SourceModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    Bell,
    Qd,
    Spdc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BinningArg {
    Standard,
    Vivoli,
}

impl From<BinningArg> for BinningStrategy {
    fn from(b: BinningArg) -> Self {
        match b {
            BinningArg::Standard => BinningStrategy::Standard,
            BinningArg::Vivoli => BinningStrategy::TransmittedOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Auto,
    Fock,
    Gaussian,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Fock => Backend::Fock,
            BackendArg::Gaussian => Backend::Gaussian,
        }
    }
}

/// Which CHSH correlator carries the minus sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChshArg {
    /// `a2b1` for standard binning, `a1b2` for transmitted-only binning.
    Auto,
    A1b1,
    A1b2,
    A2b1,
    A2b2,
}

impl ChshArg {
    pub fn resolve(self, binning: BinningStrategy) -> ChshForm {
        match self {
            ChshArg::Auto => default_chsh(binning),
            ChshArg::A1b1 => ChshForm::MinusA1B1,
            ChshArg::A1b2 => ChshForm::MinusA1B2,
            ChshArg::A2b1 => ChshForm::MinusA2B1,
            ChshArg::A2b2 => ChshForm::MinusA2B2,
        }
    }
}

/// The transmitted-only optimum is quoted for the expression with the minus
/// on `E(a1, b2)`; standard binning uses the one with the minus on `E(a2, b1)`.
pub fn default_chsh(binning: BinningStrategy) -> ChshForm {
    match binning {
        BinningStrategy::Standard => ChshForm::MinusA2B1,
        BinningStrategy::TransmittedOnly => ChshForm::MinusA1B2,
    }
}

/// `a1,a2,b1,b2[,a0]` in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles {
    pub chsh: [f64; 4],
    pub a0: Option<f64>,
}

pub fn parse_angles(s: &str) -> Result<Angles, String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if !(v.len() == 4 || v.len() == 5) {
        return Err(format!("expected 4 or 5 comma-separated angles, got {}", v.len()));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(format!("angle {x} is not finite"));
    }
    Ok(Angles {
        chsh: [v[0], v[1], v[2], v[3]],
        a0: v.get(4).copied(),
    })
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub source: SourceKind,
    /// Squeezing parameter (SPDC).
    #[arg(long, allow_negative_numbers = true, required_if_eq("source", "spdc"))]
    pub xi: Option<f64>,
    /// Fine-structure phase in radians (quantum dot).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub fss: f64,
    /// Probability that the entangled state survives (quantum dot).
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub eta: f64,
    /// Mean dark counts per detector.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub nu: f64,
    #[arg(long, value_enum, default_value_t = BinningArg::Standard)]
    pub binning: BinningArg,
    #[arg(long, value_parser = parse_angles, allow_hyphen_values = true)]
    pub angles: Option<Angles>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-12)]
    pub truncation_tail: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    #[arg(long = "chsh-minus", value_enum, default_value_t = ChshArg::Auto)]
    pub chsh_minus: ChshArg,
}

impl ModelArgs {
    pub fn scenario(&self) -> Scenario {
        let binning = BinningStrategy::from(self.binning);
        let mut plan = MeasurementPlan::default();
        if let Some(a) = self.angles {
            plan.theta_a1 = a.chsh[0];
            plan.theta_a2 = a.chsh[1];
            plan.theta_b1 = a.chsh[2];
            plan.theta_b2 = a.chsh[3];
            if let Some(a0) = a.a0 {
                plan.theta_a0 = a0;
            }
        }
        plan.chsh = self.chsh_minus.resolve(binning);
        Scenario {
            source: self.source,
            xi: self.xi.unwrap_or(f64::NAN),
            fss: self.fss,
            p: self.p,
            eta: self.eta,
            nu: self.nu,
            binning,
            plan,
            truncation_tail: self.truncation_tail,
            backend: self.backend.into(),
        }
    }
}

/// Variables a sweep may scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Xi,
    Eta,
    Nu,
    P,
    Fss,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Xi => "xi",
            SweepVar::Eta => "eta",
            SweepVar::Nu => "nu",
            SweepVar::P => "p",
            SweepVar::Fss => "fss",
        }
    }
}

/// A fully specified evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub source: SourceKind,
    pub xi: f64,
    pub fss: f64,
    pub p: f64,
    pub eta: f64,
    pub nu: f64,
    pub binning: BinningStrategy,
    pub plan: MeasurementPlan,
    pub truncation_tail: f64,
    pub backend: Backend,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub bell_s: f64,
    pub qber_di: f64,
    pub qber_bb84: f64,
    pub rate_di: f64,
    pub rate_bb84: f64,
    pub correlations: [f64; 4],
}

impl Metrics {
    pub fn row(&self) -> [f64; 5] {
        [self.bell_s, self.qber_di, self.qber_bb84, self.rate_di, self.rate_bb84]
    }
}

pub const METRIC_COLUMNS: [&str; 5] = ["bell_s", "qber_di", "qber_bb84", "rate_di", "rate_bb84"];

impl Scenario {
    pub fn qd(fss: f64, p: f64, eta: f64, nu: f64) -> Self {
        Self {
            source: SourceKind::Qd,
            xi: f64::NAN,
            fss,
            p,
            eta,
            nu,
            binning: BinningStrategy::Standard,
            plan: MeasurementPlan::default(),
            truncation_tail: 1e-12,
            backend: Backend::Auto,
        }
    }

    pub fn spdc(xi: f64, eta: f64, nu: f64, binning: BinningStrategy) -> Self {
        let plan = MeasurementPlan {
            chsh: default_chsh(binning),
            ..MeasurementPlan::default()
        };
        Self {
            source: SourceKind::Spdc,
            xi,
            binning,
            plan,
            ..Self::qd(0.0, 1.0, eta, nu)
        }
    }

    pub fn source_model(&self) -> Result<SourceModel> {
        let model = match self.source {
            SourceKind::Bell => SourceModel::phi_plus(),
            SourceKind::Qd => SourceModel::quantum_dot(self.fss, self.p)?,
            SourceKind::Spdc => {
                if !(self.truncation_tail > 0.0 && self.truncation_tail <= 1e-12) {
                    bail!(
                        "parameter `truncation-tail` = {} is out of range: must lie in (0, 1e-12]",
                        self.truncation_tail
                    );
                }
                let m = SourceModel::Spdc {
                    xi: self.xi,
                    truncation: Truncation::Auto {
                        tail: self.truncation_tail,
                    },
                };
                m.validate()?;
                m
            }
        };
        Ok(model)
    }

    pub fn detector(&self) -> Result<DetectorModel> {
        Ok(DetectorModel::new(self.eta, self.nu)?)
    }

    pub fn set(&mut self, var: SweepVar, value: f64) -> Result<()> {
        let applies = match var {
            SweepVar::Xi => self.source == SourceKind::Spdc,
            SweepVar::P | SweepVar::Fss => self.source == SourceKind::Qd,
            SweepVar::Eta | SweepVar::Nu => true,
        };
        if !applies {
            bail!(
                "parameter `{}` has no effect for source {:?}",
                var.name(),
                self.source
            );
        }
        match var {
            SweepVar::Xi => self.xi = value,
            SweepVar::Eta => self.eta = value,
            SweepVar::Nu => self.nu = value,
            SweepVar::P => self.p = value,
            SweepVar::Fss => self.fss = value,
        }
        Ok(())
    }

    pub fn evaluator(&self) -> Result<Evaluator<f64>> {
        Ok(Evaluator::new(&self.source_model()?, self.detector()?, self.backend)?)
    }

    pub fn evaluate(&self) -> Result<Metrics> {
        let report = self.evaluator()?.report(&self.plan, self.binning)?;
        Ok(Metrics {
            bell_s: report.bell_s,
            qber_di: report.qber_di,
            qber_bb84: report.qber_bb84,
            rate_di: report.di_rate()?.rate,
            rate_bb84: report.bb84_rate()?.rate,
            correlations: report.correlations,
        })
    }

    /// `# key=value` description of the fixed parameters, omitting `skip`.
    pub fn describe(&self, skip: Option<SweepVar>) -> String {
        let mut parts = vec![format!("source={:?}", self.source).to_lowercase()];
        let mut push = |var: SweepVar, v: f64| {
            if skip != Some(var) {
                parts.push(format!("{}={}", var.name(), crate::csv::fmt_num(v)));
            }
        };
        match self.source {
            SourceKind::Spdc => push(SweepVar::Xi, self.xi),
            SourceKind::Qd => {
                push(SweepVar::Fss, self.fss);
                push(SweepVar::P, self.p);
            }
            SourceKind::Bell => {}
        }
        push(SweepVar::Eta, self.eta);
        push(SweepVar::Nu, self.nu);
        let binning = match self.binning {
            BinningStrategy::Standard => "standard",
            BinningStrategy::TransmittedOnly => "vivoli",
        };
        let p = &self.plan;
        parts.push(format!("binning={binning}"));
        parts.push(format!(
            "angles={},{},{},{},{}",
            crate::csv::fmt_num(p.theta_a1),
            crate::csv::fmt_num(p.theta_a2),
            crate::csv::fmt_num(p.theta_b1),
            crate::csv::fmt_num(p.theta_b2),
            crate::csv::fmt_num(p.theta_a0)
        ));
        parts.push(format!("chsh_minus={}", chsh_name(p.chsh)));
        parts.join(" ")
    }
}

pub fn chsh_name(form: ChshForm) -> &'static str {
    match form {
        ChshForm::MinusA1B1 => "a1b1",
        ChshForm::MinusA1B2 => "a1b2",
        ChshForm::MinusA2B1 => "a2b1",
        ChshForm::MinusA2B2 => "a2b2",
    }
}
