//! Exact click statistics in a truncated four-mode Fock space.
//!
//! Source states live on `(H_A, V_A, H_B, V_B)`. The analyzers rotate them
//! onto the detector ports `(T_A, R_A, T_B, R_B)`, where the on/off POVMs are
//! diagonal, so only populations of the rotated state are needed.

mod rotation;
mod state;

use std::collections::BTreeMap;

use num_complex::Complex;

pub use rotation::{apply_analyzers, side_amplitudes};
pub use state::{total_photons, DensityMatrix, FockState, Occupation, PureState};

use crate::error::Result;
use crate::modes::{AnalyzerSettings, DetectorModel, ModeSet, Port};
use crate::outcomes::OutcomeDistribution;
use crate::scalar::Real;
use crate::source::{resolve_cutoff, BellState, SourceModel};

const HH: Occupation = [1, 0, 1, 0];
const HV: Occupation = [1, 0, 0, 1];
const VH: Occupation = [0, 1, 1, 0];
const VV: Occupation = [0, 1, 0, 1];

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Builds the source state in the input polarization modes.
pub fn make_source_state<T: Real>(source: &SourceModel<T>) -> Result<FockState<T>> {
    source.validate()?;
    let h = T::FRAC_1_SQRT_2();
    let zero = T::zero();
    let state = match *source {
        SourceModel::IdealBell { which } => {
            let amps = match which {
                BellState::PhiPlus => BTreeMap::from([(HH, c(h, zero)), (VV, c(h, zero))]),
                BellState::PsiMinus => BTreeMap::from([(HV, c(h, zero)), (VH, c(-h, zero))]),
            };
            FockState::Pure(PureState { amps })
        }
        SourceModel::QuantumDot { fss_phase, p } => {
            let basis = vec![HH, HV, VH, VV];
            // |phi> = (|HH> + e^{-i fss}|VV>)/sqrt(2)
            let vv = Complex::from_polar(h, -fss_phase);
            let phi = [c(h, zero), c(zero, zero), c(zero, zero), vv];
            let noise = (T::one() - p) / T::lit(4.0);
            let mut rho = vec![c(zero, zero); 16];
            for i in 0..4 {
                for j in 0..4 {
                    rho[i * 4 + j] = (phi[i] * phi[j].conj()).scale(p);
                }
                rho[i * 4 + i] = rho[i * 4 + i] + c(noise, zero);
            }
            // Exact Hermitian symmetry on the diagonal.
            for i in 0..4 {
                rho[i * 4 + i].im = zero;
            }
            FockState::Mixed(DensityMatrix { basis, rho })
        }
        SourceModel::Spdc { xi, truncation } => {
            let n_max = resolve_cutoff(xi, truncation)?;
            let t = xi.tanh();
            let mut amps = BTreeMap::new();
            let mut norm = T::zero();
            // Per pair number n: tanh^n xi * sum_m (-1)^m |n-m, m, m, n-m>.
            let mut tn = T::one();
            for n in 0..=n_max {
                for m in 0..=n {
                    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
                    let occ = [(n - m) as u16, m as u16, m as u16, (n - m) as u16];
                    amps.insert(occ, c(sign * tn, zero));
                    norm = norm + tn * tn;
                }
                tn = tn * t;
            }
            let scale = T::one() / norm.sqrt();
            for a in amps.values_mut() {
                *a = a.scale(scale);
            }
            FockState::Pure(PureState { amps })
        }
    };
    Ok(state)
}

/// `Tr[rho prod_{i in M} :exp(-eta n_i - nu):]` for a state already expressed
/// on the detector ports.
pub fn no_click_weight<T: Real>(state: &FockState<T>, modes: ModeSet, detector: &DetectorModel<T>) -> T {
    no_click_weight_from_populations(&state.populations(), modes, detector)
}

fn no_click_weight_from_populations<T: Real>(
    pops: &[(Occupation, T)],
    modes: ModeSet,
    detector: &DetectorModel<T>,
) -> T {
    let survive = T::one() - detector.eta;
    let dark = (-T::from_usize_lossy(modes.len() as usize) * detector.nu).exp();
    let sum = pops.iter().fold(T::zero(), |acc, (occ, p)| {
        let n: i32 = modes.ports().map(|port| occ[port.index()] as i32).sum();
        acc + *p * survive.powi(n)
    });
    dark * sum
}

/// All 16 no-click weights of a rotated state, indexed by port mask.
pub fn no_click_table<T: Real>(state: &FockState<T>, detector: &DetectorModel<T>) -> [T; 16] {
    let pops = state.populations();
    let mut w = [T::zero(); 16];
    for m in ModeSet::all() {
        w[m.bits() as usize] = no_click_weight_from_populations(&pops, m, detector);
    }
    w
}

/// Click-pattern distribution of `state` (in input modes) measured with the
/// given analyzer settings and detectors.
pub fn outcome_distribution<T: Real>(
    state: &FockState<T>,
    settings: &AnalyzerSettings<T>,
    detector: &DetectorModel<T>,
) -> Result<OutcomeDistribution<T>> {
    let rotated = apply_analyzers(state, settings);
    OutcomeDistribution::from_no_click_weights(&no_click_table(&rotated, detector))
}

/// Photon numbers reaching `port` summed over a state's support; handy for
/// asserting which ports can fire.
pub fn port_mean_photons<T: Real>(state: &FockState<T>, port: Port) -> T {
    state
        .populations()
        .iter()
        .fold(T::zero(), |acc, (occ, p)| {
            acc + *p * T::from_usize_lossy(occ[port.index()] as usize)
        })
}

/// A source state prepared once and measured at many settings.
#[derive(Debug, Clone)]
pub struct FockEngine<T> {
    state: FockState<T>,
    detector: DetectorModel<T>,
}

impl<T: Real> FockEngine<T> {
    pub fn new(source: &SourceModel<T>, detector: DetectorModel<T>) -> Result<Self> {
        let state = make_source_state(source)?;
        state.validate()?;
        Ok(Self { state, detector })
    }

    pub fn state(&self) -> &FockState<T> {
        &self.state
    }

    pub fn outcomes(&self, settings: &AnalyzerSettings<T>) -> Result<OutcomeDistribution<T>> {
        outcome_distribution(&self.state, settings, &self.detector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::Truncation;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

    fn det(eta: f64, nu: f64) -> DetectorModel<f64> {
        DetectorModel::new(eta, nu).unwrap()
    }

    #[test]
    fn zero_fss_full_survival_is_phi_plus() {
        let s = make_source_state(&SourceModel::quantum_dot(0.0_f64, 1.0).unwrap()).unwrap();
        let FockState::Mixed(dm) = s else { panic!() };
        let expect = [
            [0.5, 0.0, 0.0, 0.5],
            [0.0; 4],
            [0.0; 4],
            [0.5, 0.0, 0.0, 0.5],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((dm.at(i, j) - c(expect[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn near_vacuum_spdc() {
        let xi = 1e-4_f64;
        let s = make_source_state(&SourceModel::Spdc {
            xi,
            truncation: Truncation::Fixed(2),
        })
        .unwrap();
        let vac = s.populations().iter().find(|(o, _)| *o == [0; 4]).unwrap().1;
        // Renormalized truncation of 1/cosh^4 xi; tail ~ xi^6.
        assert!((vac - 1.0 / xi.cosh().powi(4)).abs() < 1e-15);
        assert!(vac > 1.0 - 1e-7);
    }

    #[test]
    fn spdc_pair_number_weights() {
        let xi = 0.3_f64;
        let s = make_source_state(&SourceModel::spdc(xi).unwrap()).unwrap();
        s.validate().unwrap();
        let dist = s.photon_number_distribution();
        // n pairs carry 2n photons.
        assert!((dist[&2] - 0.142_141_457_621_215).abs() < 1e-12);
    }

    #[test]
    fn rotation_identity_and_number_conservation() {
        let s = make_source_state(&SourceModel::spdc(0.4_f64).unwrap()).unwrap();
        let FockState::Pure(same) = apply_analyzers(&s, &AnalyzerSettings::zero()) else { panic!() };
        let FockState::Pure(orig) = &s else { panic!() };
        assert_eq!(same.amps.len(), orig.amps.len());
        for (k, a) in &orig.amps {
            assert!((same.amps[k] - a).norm() < 1e-15);
        }
        let rot = apply_analyzers(&s, &AnalyzerSettings::new(0.3, 1.1).unwrap());
        let before = s.photon_number_distribution();
        let after = rot.photon_number_distribution();
        for (n, p) in &before {
            assert!((after[n] - p).abs() < 1e-13);
        }
        rot.validate().unwrap();
    }

    #[test]
    fn single_photon_rotation() {
        let s = FockState::Pure(PureState {
            amps: BTreeMap::from([([1u16, 0, 0, 0], c(1.0_f64, 0.0))]),
        });
        let r = apply_analyzers(&s, &AnalyzerSettings::new(FRAC_PI_4, 0.0).unwrap());
        let FockState::Pure(p) = r else { panic!() };
        assert!((p.amps[&[1, 0, 0, 0]].re - FRAC_PI_4.cos()).abs() < 1e-15);
        assert!((p.amps[&[0, 1, 0, 0]].re + FRAC_PI_4.sin()).abs() < 1e-15);
    }

    #[test]
    fn no_click_weight_examples() {
        let vac = FockState::Pure(PureState {
            amps: BTreeMap::from([([0u16; 4], c(1.0_f64, 0.0))]),
        });
        let nu = 0.01;
        let w = no_click_weight(&vac, ModeSet::FULL, &det(0.7, nu));
        assert!((w - (-4.0 * nu).exp()).abs() < 1e-15);

        let one = FockState::Pure(PureState {
            amps: BTreeMap::from([([0u16, 0, 1, 0], c(1.0_f64, 0.0))]),
        });
        let w = no_click_weight(&one, ModeSet::of(&[Port::TB]), &det(0.7, nu));
        assert!((w - 0.3 * (-nu).exp()).abs() < 1e-15);

        let qd = make_source_state(&SourceModel::quantum_dot(0.3_f64, 0.8).unwrap()).unwrap();
        for m in ModeSet::all() {
            assert!((no_click_weight(&qd, m, &det(0.0, 0.0)) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_plus_perfect_z_correlations() {
        let e = FockEngine::new(&SourceModel::<f64>::phi_plus(), DetectorModel::ideal()).unwrap();
        let d = e.outcomes(&AnalyzerSettings::zero()).unwrap();
        assert!((d.exactly(&[Port::TA, Port::TB]) - 0.5).abs() < 1e-15);
        assert!((d.exactly(&[Port::RA, Port::RB]) - 0.5).abs() < 1e-15);
        let rest: f64 = d
            .iter()
            .filter(|(m, _)| *m != ModeSet::of(&[Port::TA, Port::TB]) && *m != ModeSet::of(&[Port::RA, Port::RB]))
            .map(|(_, p)| p)
            .sum();
        assert!(rest.abs() < 1e-15);
    }

    #[test]
    fn phi_plus_equal_angles_never_disagree() {
        let e = FockEngine::new(&SourceModel::<f64>::phi_plus(), DetectorModel::ideal()).unwrap();
        for i in 0..20 {
            let th = PI * i as f64 / 20.0;
            let d = e.outcomes(&AnalyzerSettings::new(th, th).unwrap()).unwrap();
            let diff = d.exactly(&[Port::TA, Port::RB]) + d.exactly(&[Port::RA, Port::TB]);
            assert!(diff.abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_never_clicks_without_dark_counts() {
        let vac = FockState::Pure(PureState {
            amps: BTreeMap::from([([0u16; 4], c(1.0_f64, 0.0))]),
        });
        let d = outcome_distribution(&vac, &AnalyzerSettings::new(0.2, 0.9).unwrap(), &det(0.4, 0.0)).unwrap();
        assert_eq!(d.no_click(), 1.0);
    }

    #[test]
    fn rotation_by_pi_is_invisible() {
        let e = FockEngine::new(&SourceModel::spdc(0.35_f64).unwrap(), det(0.8, 1e-3)).unwrap();
        let base = e.outcomes(&AnalyzerSettings::new(FRAC_PI_8, 0.2).unwrap()).unwrap();
        let a = e.outcomes(&AnalyzerSettings::new(FRAC_PI_8 + PI, 0.2).unwrap()).unwrap();
        let b = e.outcomes(&AnalyzerSettings::new(FRAC_PI_8, 0.2 - PI).unwrap()).unwrap();
        assert!(base.max_abs_diff(&a) < 1e-12);
        assert!(base.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn mixed_state_is_linear_combination() {
        let (fss, p) = (0.4_f64, 0.7);
        let dt = det(0.9, 2e-3);
        let st = AnalyzerSettings::new(0.3, 1.2).unwrap();
        let mixed = FockEngine::new(&SourceModel::quantum_dot(fss, p).unwrap(), dt).unwrap();
        let pure = FockEngine::new(&SourceModel::quantum_dot(fss, 1.0).unwrap(), dt).unwrap();
        let noise = FockEngine::new(&SourceModel::quantum_dot(fss, 0.0).unwrap(), dt).unwrap();
        let (m, a, b) = (
            mixed.outcomes(&st).unwrap(),
            pure.outcomes(&st).unwrap(),
            noise.outcomes(&st).unwrap(),
        );
        for k in ModeSet::all() {
            let lin = p * a.get(k) + (1.0 - p) * b.get(k);
            assert!((m.get(k) - lin).abs() < 1e-14);
        }
    }

    #[test]
    fn qd_state_is_valid_density_matrix() {
        for &(fss, p) in &[(0.0, 0.0), (0.25, 0.9), (1.3, 1.0)] {
            let s = make_source_state(&SourceModel::quantum_dot(fss, p).unwrap()).unwrap();
            s.validate().unwrap();
            let r = apply_analyzers(&s, &AnalyzerSettings::new(0.4, 2.0).unwrap());
            r.validate().unwrap();
        }
    }

    #[test]
    fn ports_see_one_photon_per_side_for_qd() {
        let s = make_source_state(&SourceModel::quantum_dot(0.1_f64, 0.9).unwrap()).unwrap();
        let r = apply_analyzers(&s, &AnalyzerSettings::new(0.3, 0.8).unwrap());
        let a = port_mean_photons(&r, Port::TA) + port_mean_photons(&r, Port::RA);
        assert!((a - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_precision_engine_runs() {
        let e = FockEngine::new(&SourceModel::<f32>::phi_plus(), DetectorModel::new(0.9, 1e-3).unwrap()).unwrap();
        let d = e.outcomes(&AnalyzerSettings::new(0.3, 0.1).unwrap()).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-5);
    }
}
