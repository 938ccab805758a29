use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use qkd_feasibility::fock::FockEngine;
use qkd_feasibility::gaussian::{
    binned_coincidences_closed_form, closed_form_params, outcome_distribution_gaussian,
    GaussianEngine,
};
use qkd_feasibility::source::{tmsv_tail, Truncation};
use qkd_feasibility::{bin_standard, AnalyzerSettings, DetectorModel, Error, SourceModel};

const ANGLE_PAIRS: [(f64, f64); 8] = [
    (0.0, 0.0),
    (FRAC_PI_8, 0.0),
    (3.0 * FRAC_PI_8, 0.0),
    (FRAC_PI_8, FRAC_PI_4),
    (3.0 * FRAC_PI_8, FRAC_PI_4),
    (0.661, 2.525),
    (1.248, 3.112),
    (2.9, 0.4),
];

#[test]
fn all_sixteen_patterns_agree_on_grid() {
    let mut worst = 0.0_f64;
    for xi in [0.1, 0.3, 0.6] {
        let source = SourceModel::spdc(xi).unwrap();
        for eta in [0.6, 1.0] {
            for nu in [0.0, 1e-3] {
                let det = DetectorModel::new(eta, nu).unwrap();
                let fock = FockEngine::new(&source, det).unwrap();
                let gauss = GaussianEngine::new(xi, det).unwrap();
                for (ta, tb) in ANGLE_PAIRS {
                    let s = AnalyzerSettings::new(ta, tb).unwrap();
                    let f = fock.outcomes(&s).unwrap();
                    let g = gauss.outcomes(&s).unwrap();
                    let d = f.max_abs_diff(&g);
                    assert!(d < 1e-8, "xi={xi} eta={eta} nu={nu} angles=({ta},{tb}) diff={d:e}");
                    assert!((g.total() - 1.0).abs() < 1e-10);
                    assert!(g.probs().iter().all(|&p| (-1e-12..=1.0 + 1e-12).contains(&p)));
                    worst = worst.max(d);
                }
            }
        }
    }
    assert!(worst < 1e-8);
}

#[test]
fn documented_point() {
    let det = DetectorModel::new(0.8, 1e-3).unwrap();
    let s = AnalyzerSettings::new(FRAC_PI_8, 0.0).unwrap();
    let f = FockEngine::new(&SourceModel::spdc(0.3).unwrap(), det)
        .unwrap()
        .outcomes(&s)
        .unwrap();
    let g = outcome_distribution_gaussian(0.3, 0.8, 1e-3, &s).unwrap();
    assert!(f.max_abs_diff(&g) < 1e-8);
}

#[test]
fn standard_binning_matches_closed_form() {
    for xi in [0.2, 0.755, 1.4] {
        for (eta, nu) in [(1.0, 0.0), (0.7, 1e-3), (0.3, 1e-2)] {
            for (ta, tb) in ANGLE_PAIRS {
                let s = AnalyzerSettings::new(ta, tb).unwrap();
                let g = outcome_distribution_gaussian(xi, eta, nu, &s).unwrap();
                let binned = bin_standard(&g).unwrap();
                let closed =
                    binned_coincidences_closed_form(&closed_form_params(xi, eta, ta, tb).unwrap(), nu)
                        .unwrap();
                for (a, b) in [
                    (binned.p_tt, closed.p_tt),
                    (binned.p_tr, closed.p_tr),
                    (binned.p_rt, closed.p_rt),
                    (binned.p_rr, closed.p_rr),
                ] {
                    assert!((a - b).abs() < 1e-10, "xi={xi} eta={eta} ({ta},{tb}): {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn truncation_tail_is_enforced() {
    let xi = 0.6;
    let fixed = |n| SourceModel::Spdc {
        xi,
        truncation: Truncation::Fixed(n),
    };
    let det = DetectorModel::ideal();
    assert!(matches!(
        FockEngine::new(&fixed(10), det),
        Err(Error::Truncation { .. })
    ));
    let n = (1..200).find(|&n| tmsv_tail(xi, n) < 1e-12).unwrap();
    assert!(FockEngine::new(&fixed(n), det).is_ok());
}

#[test]
fn vacuum_limit() {
    let g = outcome_distribution_gaussian(1e-9, 1.0, 0.0, &AnalyzerSettings::new(0.3, 2.0 * PI).unwrap())
        .unwrap();
    assert!((g.no_click() - 1.0).abs() < 1e-15);
}
