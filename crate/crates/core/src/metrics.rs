//! Correlators, CHSH value and the two QBER definitions.

use crate::binning::{bin, BinningStrategy, LogicalDistribution};
use crate::error::{Error, Result};
use crate::fock::FockEngine;
use crate::gaussian::GaussianEngine;
use crate::modes::{AnalyzerSettings, DetectorModel, Port};
use crate::outcomes::OutcomeDistribution;
use crate::rates::{bb84_key_rate, di_key_rate, KeyRateInput, KeyRateResult};
use crate::scalar::Real;
use crate::source::SourceModel;

/// Which correlator carries the minus sign in the CHSH combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ChshForm {
    MinusA1B1,
    MinusA1B2,
    /// `E11 + E12 - E21 + E22`
    #[default]
    MinusA2B1,
    MinusA2B2,
}

impl ChshForm {
    /// Signs of `(E11, E12, E21, E22)`.
    pub fn signs(self) -> [i8; 4] {
        match self {
            ChshForm::MinusA1B1 => [-1, 1, 1, 1],
            ChshForm::MinusA1B2 => [1, -1, 1, 1],
            ChshForm::MinusA2B1 => [1, 1, -1, 1],
            ChshForm::MinusA2B2 => [1, 1, 1, -1],
        }
    }
}

/// CHSH analyzer angles plus Alice's key-generation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPlan<T> {
    pub theta_a1: T,
    pub theta_a2: T,
    pub theta_b1: T,
    pub theta_b2: T,
    pub theta_a0: T,
    pub chsh: ChshForm,
}

impl<T: Real> Default for MeasurementPlan<T> {
    /// `a1 = pi/8, a2 = 3pi/8, b1 = 0, b2 = pi/4, a0 = 0`: maximal violation
    /// for `Phi+` and `Psi-`.
    fn default() -> Self {
        let pi = T::PI();
        Self {
            theta_a1: pi / T::lit(8.0),
            theta_a2: T::lit(3.0) * pi / T::lit(8.0),
            theta_b1: T::zero(),
            theta_b2: pi / T::lit(4.0),
            theta_a0: T::zero(),
            chsh: ChshForm::default(),
        }
    }
}

impl<T: Real> MeasurementPlan<T> {
    pub fn with_chsh_angles(a1: T, a2: T, b1: T, b2: T) -> Self {
        Self {
            theta_a1: a1,
            theta_a2: a2,
            theta_b1: b1,
            theta_b2: b2,
            ..Self::default()
        }
    }

    /// The four CHSH settings in `(a1 b1, a1 b2, a2 b1, a2 b2)` order.
    pub fn chsh_settings(&self) -> [AnalyzerSettings<T>; 4] {
        let s = |a, b| AnalyzerSettings { theta_a: a, theta_b: b };
        [
            s(self.theta_a1, self.theta_b1),
            s(self.theta_a1, self.theta_b2),
            s(self.theta_a2, self.theta_b1),
            s(self.theta_a2, self.theta_b2),
        ]
    }

    /// The key-generation setting `(a0, b1)`.
    pub fn key_settings(&self) -> AnalyzerSettings<T> {
        AnalyzerSettings {
            theta_a: self.theta_a0,
            theta_b: self.theta_b1,
        }
    }
}

/// `(P_same - P_diff) / (P_same + P_diff)`.
pub fn correlation<T: Real>(logical: &LogicalDistribution<T>) -> Result<T> {
    let total = logical.same() + logical.diff();
    if !(total > T::zero()) {
        return Err(Error::Degenerate("no same/different events to correlate"));
    }
    Ok((logical.same() - logical.diff()) / total)
}

/// Combines four correlators with the given CHSH sign pattern, `|sum|`.
pub fn chsh_value<T: Real>(correlators: &[T; 4], form: ChshForm) -> T {
    correlators
        .iter()
        .zip(form.signs())
        .fold(T::zero(), |acc, (&e, s)| if s > 0 { acc + e } else { acc - e })
        .abs()
}

/// Which engine evaluates click statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Gaussian for SPDC, Fock otherwise.
    #[default]
    Auto,
    Fock,
    Gaussian,
}

#[derive(Debug, Clone)]
enum Engine<T> {
    Fock(FockEngine<T>),
    Gaussian(GaussianEngine<T>),
}

/// A fixed source and detector pair, measured at arbitrary settings.
#[derive(Debug, Clone)]
pub struct Evaluator<T> {
    engine: Engine<T>,
}

impl<T: Real> Evaluator<T> {
    pub fn new(source: &SourceModel<T>, detector: DetectorModel<T>, backend: Backend) -> Result<Self> {
        source.validate()?;
        let engine = match (backend, source) {
            (Backend::Auto | Backend::Gaussian, SourceModel::Spdc { xi, .. }) => {
                Engine::Gaussian(GaussianEngine::new(*xi, detector)?)
            }
            (Backend::Gaussian, _) => {
                return Err(Error::Unsupported(
                    "the Gaussian backend only models the SPDC source",
                ))
            }
            (Backend::Auto | Backend::Fock, _) => Engine::Fock(FockEngine::new(source, detector)?),
        };
        Ok(Self { engine })
    }

    pub fn outcomes(&self, settings: &AnalyzerSettings<T>) -> Result<OutcomeDistribution<T>> {
        match &self.engine {
            Engine::Fock(e) => e.outcomes(settings),
            Engine::Gaussian(e) => e.outcomes(settings),
        }
    }

    pub fn logical(
        &self,
        settings: &AnalyzerSettings<T>,
        strategy: BinningStrategy,
    ) -> Result<LogicalDistribution<T>> {
        bin(&self.outcomes(settings)?, strategy)
    }

    pub fn correlation_at(&self, settings: &AnalyzerSettings<T>, strategy: BinningStrategy) -> Result<T> {
        correlation(&self.logical(settings, strategy)?)
    }

    pub fn correlators(&self, plan: &MeasurementPlan<T>, strategy: BinningStrategy) -> Result<[T; 4]> {
        let mut out = [T::zero(); 4];
        for (slot, st) in out.iter_mut().zip(plan.chsh_settings()) {
            *slot = self.correlation_at(&st, strategy)?;
        }
        Ok(out)
    }

    pub fn bell_parameter(&self, plan: &MeasurementPlan<T>, strategy: BinningStrategy) -> Result<T> {
        Ok(chsh_value(&self.correlators(plan, strategy)?, plan.chsh))
    }

    /// Binned `P_diff` at the key-generation setting.
    pub fn qber_di(&self, plan: &MeasurementPlan<T>, strategy: BinningStrategy) -> Result<T> {
        Ok(self.logical(&plan.key_settings(), strategy)?.diff())
    }

    /// Conclusive-only QBER: exactly one click per side, no binning.
    pub fn qber_bb84(&self, plan: &MeasurementPlan<T>) -> Result<T> {
        let d = self.outcomes(&plan.key_settings())?;
        let same = d.exactly(&[Port::TA, Port::TB]) + d.exactly(&[Port::RA, Port::RB]);
        let diff = d.exactly(&[Port::TA, Port::RB]) + d.exactly(&[Port::RA, Port::TB]);
        let total = same + diff;
        if !(total > T::zero()) {
            return Err(Error::Degenerate("no conclusive coincidences at the key setting"));
        }
        Ok(diff / total)
    }

    pub fn report(&self, plan: &MeasurementPlan<T>, strategy: BinningStrategy) -> Result<MetricsReport<T>> {
        let correlations = self.correlators(plan, strategy)?;
        Ok(MetricsReport {
            bell_s: chsh_value(&correlations, plan.chsh),
            qber_di: self.qber_di(plan, strategy)?,
            qber_bb84: self.qber_bb84(plan)?,
            correlations,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport<T> {
    pub bell_s: T,
    pub qber_di: T,
    pub qber_bb84: T,
    /// `E(a1,b1), E(a1,b2), E(a2,b1), E(a2,b2)`.
    pub correlations: [T; 4],
}

/// QBER entering a key rate. Above one half the parties flip one key bit,
/// so the rate sees `min(Q, 1 - Q)`.
pub fn effective_qber<T: Real>(q: T) -> T {
    q.min(T::one() - q).max(T::zero())
}

impl<T: Real> MetricsReport<T> {
    pub fn di_rate(&self) -> Result<KeyRateResult<T>> {
        let s = self.bell_s.min(T::lit(2.0) * T::SQRT_2());
        di_key_rate(KeyRateInput::new(effective_qber(self.qber_di), s)?)
    }

    pub fn bb84_rate(&self) -> Result<KeyRateResult<T>> {
        bb84_key_rate(effective_qber(self.qber_bb84))
    }
}

pub fn bell_parameter<T: Real>(
    source: &SourceModel<T>,
    detector: &DetectorModel<T>,
    plan: &MeasurementPlan<T>,
    strategy: BinningStrategy,
) -> Result<T> {
    Evaluator::new(source, *detector, Backend::Auto)?.bell_parameter(plan, strategy)
}

pub fn qber_di<T: Real>(
    source: &SourceModel<T>,
    detector: &DetectorModel<T>,
    plan: &MeasurementPlan<T>,
    strategy: BinningStrategy,
) -> Result<T> {
    Evaluator::new(source, *detector, Backend::Auto)?.qber_di(plan, strategy)
}

pub fn qber_bb84<T: Real>(
    source: &SourceModel<T>,
    detector: &DetectorModel<T>,
    plan: &MeasurementPlan<T>,
) -> Result<T> {
    Evaluator::new(source, *detector, Backend::Auto)?.qber_bb84(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{closed_form_params, binned_coincidences_closed_form};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    const STD: BinningStrategy = BinningStrategy::Standard;

    fn det(eta: f64, nu: f64) -> DetectorModel<f64> {
        DetectorModel::new(eta, nu).unwrap()
    }

    fn plan() -> MeasurementPlan<f64> {
        MeasurementPlan::default()
    }

    #[test]
    fn correlation_examples() {
        let l = LogicalDistribution::new(0.5, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(correlation(&l).unwrap(), 1.0);
        let l = LogicalDistribution::new(0.25, 0.25, 0.25, 0.25).unwrap();
        assert_eq!(correlation(&l).unwrap(), 0.0);
    }

    #[test]
    fn phi_plus_correlation_at_eighth_pi() {
        let e = Evaluator::new(&SourceModel::phi_plus(), det(1.0, 0.0), Backend::Auto).unwrap();
        let st = AnalyzerSettings::new(std::f64::consts::FRAC_PI_8, 0.0).unwrap();
        assert!((e.correlation_at(&st, STD).unwrap() - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn ideal_bell_states_reach_tsirelson() {
        for which in [crate::source::BellState::PhiPlus, crate::source::BellState::PsiMinus] {
            let s = bell_parameter(&SourceModel::IdealBell { which }, &det(1.0, 0.0), &plan(), STD).unwrap();
            assert!((s - 2.0 * SQRT_2).abs() < 1e-14);
        }
    }

    #[test]
    fn qd_closed_forms() {
        for &(p, eta, nu) in &[(0.9_f64, 0.95_f64, 1e-3_f64), (0.7, 0.8, 1e-2), (1.0, 1.0, 0.0)] {
            let src = SourceModel::quantum_dot(0.0, p).unwrap();
            let k = (-2.0 * nu).exp() * p * eta * eta;
            let s = bell_parameter(&src, &det(eta, nu), &plan(), STD).unwrap();
            assert!((s - 2.0 * SQRT_2 * k).abs() < 1e-12);
            let q = qber_di(&src, &det(eta, nu), &plan(), STD).unwrap();
            assert!((q - (1.0 - k) / 2.0).abs() < 1e-12);
        }
        let q = qber_di(&SourceModel::quantum_dot(0.0, 0.9).unwrap(), &det(0.95, 1e-3), &plan(), STD).unwrap();
        assert!((q - 0.094_686_438_291_229).abs() < 1e-12);
    }

    #[test]
    fn qd_fss_bell_value() {
        let s = bell_parameter(&SourceModel::quantum_dot(0.25, 1.0).unwrap(), &det(1.0, 0.0), &plan(), STD).unwrap();
        assert!((s - SQRT_2 * (1.0 + 0.25_f64.cos())).abs() < 1e-12);
        assert!((s - 2.784_462_649_908_05).abs() < 1e-10);
    }

    #[test]
    fn qber_examples() {
        let ideal = Evaluator::new(&SourceModel::phi_plus(), det(1.0, 0.0), Backend::Auto).unwrap();
        assert!(ideal.qber_di(&plan(), STD).unwrap().abs() < 1e-15);
        let lossy = Evaluator::new(&SourceModel::phi_plus(), det(0.5, 0.0), Backend::Auto).unwrap();
        assert!(lossy.qber_bb84(&plan()).unwrap().abs() < 1e-15);
        let qd = qber_bb84(&SourceModel::quantum_dot(0.0, 0.9).unwrap(), &det(1.0, 0.0), &plan()).unwrap();
        assert!((qd - 0.05).abs() < 1e-14);
        let blind = qber_bb84(&SourceModel::phi_plus(), &det(0.0, 0.0), &plan());
        assert!(matches!(blind, Err(Error::Degenerate(_))));
    }

    #[test]
    fn spdc_qber_matches_closed_form() {
        let xi = 0.755;
        let q = qber_di(&SourceModel::spdc(xi).unwrap(), &det(1.0, 0.0), &plan(), STD).unwrap();
        let l = binned_coincidences_closed_form(&closed_form_params(xi, 1.0, 0.0, 0.0).unwrap(), 0.0).unwrap();
        assert!((q - l.diff()).abs() < 1e-12);
        // The printed TMSV pairs H_A with V_B, so the key basis is anticorrelated.
        assert!(q > 0.5);
        assert!(effective_qber(q) < 0.5);
    }

    #[test]
    fn gaussian_backend_rejects_qd() {
        let r = Evaluator::new(&SourceModel::quantum_dot(0.0, 1.0).unwrap(), det(1.0, 0.0), Backend::Gaussian);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn chsh_forms() {
        let e = [0.1_f64, 0.2, 0.3, 0.4];
        assert!((chsh_value(&e, ChshForm::MinusA2B1) - 0.4).abs() < 1e-15);
        assert!((chsh_value(&e, ChshForm::MinusA1B2) - 0.6).abs() < 1e-15);
        assert!((chsh_value(&e, ChshForm::MinusA2B2) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn report_rates_at_ideal_point() {
        let e = Evaluator::new(&SourceModel::quantum_dot(0.0, 1.0).unwrap(), det(1.0, 0.0), Backend::Auto).unwrap();
        let r = e.report(&plan(), STD).unwrap();
        assert!((r.di_rate().unwrap().rate - 1.0).abs() < 1e-12);
        assert!((r.bb84_rate().unwrap().rate - 1.0).abs() < 1e-12);
    }
}
