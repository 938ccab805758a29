//! Closed-form click statistics of the polarization-entangled two-mode
//! squeezed vacuum.
//!
//! The state is Gaussian with zero mean, so every no-click weight
//! `<prod_{i in M} :exp(-eta n_i - nu):>` has a determinant form. With real
//! normally ordered moments `N_ij = <a_i^+ a_j>` and `M_ij = <a_i a_j>`
//! restricted to the ports in `M`,
//!
//! ```text
//! W(M) = exp(-|M| nu) / sqrt( det(I + eta (N + M)) * det(I + eta (N - M)) )
//! ```
//!
//! which is the vacuum probability of the lossy quadrature covariance,
//! split into its `x` and `p` blocks.

use crate::binning::LogicalDistribution;
use crate::error::{domain, Error, Result};
use crate::modes::{AnalyzerSettings, DetectorModel, ModeSet};
use crate::outcomes::OutcomeDistribution;
use crate::scalar::Real;

/// The `zeta`, `gamma`, `lambda` combination behind the binned coincidences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcClosedFormParams<T> {
    pub zeta: T,
    pub gamma: T,
    pub lambda: T,
    pub eta: T,
}

fn check_xi<T: Real>(xi: T) -> Result<()> {
    if !(xi > T::zero() && xi.is_finite()) {
        return Err(domain("xi", xi.as_f64(), "must be finite and > 0"));
    }
    Ok(())
}

/// `sinh^2 xi = tanh^2/(1 - tanh^2)` and `sinh xi cosh xi = tanh/(1 - tanh^2)`.
fn tmsv_moments<T: Real>(xi: T) -> (T, T) {
    let t = xi.tanh();
    let denom = T::one() - t * t;
    (t * t / denom, t / denom)
}

pub fn closed_form_params<T: Real>(
    xi: T,
    eta: T,
    theta_a: T,
    theta_b: T,
) -> Result<SpdcClosedFormParams<T>> {
    check_xi(xi)?;
    if !(eta > T::zero() && eta <= T::one()) {
        return Err(domain("eta", eta.as_f64(), "must lie in (0, 1]"));
    }
    let (mean, pair) = tmsv_moments(xi);
    let d = theta_a - theta_b;
    Ok(SpdcClosedFormParams {
        zeta: mean + T::one() / eta,
        gamma: pair * d.sin(),
        lambda: pair * d.cos(),
        eta,
    })
}

/// Standard-binned logical distribution straight from the closed form.
pub fn binned_coincidences_closed_form<T: Real>(
    params: &SpdcClosedFormParams<T>,
    nu: T,
) -> Result<LogicalDistribution<T>> {
    if !(nu >= T::zero() && nu.is_finite()) {
        return Err(domain("nu", nu.as_f64(), "must be finite and >= 0"));
    }
    let z2 = params.zeta * params.zeta;
    let g = z2 - params.gamma * params.gamma;
    let l = z2 - params.lambda * params.lambda;
    let pref = (-T::lit(2.0) * nu).exp() / (T::lit(2.0) * params.eta * params.eta);
    let delta = pref * (T::one() / g - T::one() / l);
    let quarter = T::lit(0.25);
    LogicalDistribution::new(quarter + delta, quarter - delta, quarter - delta, quarter + delta)
}

/// `E = P_same - P_diff` of the closed form.
pub fn closed_form_correlation<T: Real>(params: &SpdcClosedFormParams<T>, nu: T) -> T {
    let z2 = params.zeta * params.zeta;
    let g = z2 - params.gamma * params.gamma;
    let l = z2 - params.lambda * params.lambda;
    T::lit(2.0) * (-T::lit(2.0) * nu).exp() / (params.eta * params.eta) * (T::one() / g - T::one() / l)
}

/// Normally ordered moments of a zero-mean Gaussian state with real
/// correlations, on the four modes in port order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments<T> {
    pub n: [[T; 4]; 4],
    pub m: [[T; 4]; 4],
}

impl<T: Real> GaussianMoments<T> {
    /// TMSV on `(H_A, V_A, H_B, V_B)` with pairs `H_A V_B` (positive) and
    /// `V_A H_B` (negative), matching the Fock-basis state.
    pub fn tmsv(xi: T) -> Self {
        let (mean, pair) = tmsv_moments(xi);
        let z = T::zero();
        let mut n = [[z; 4]; 4];
        let mut m = [[z; 4]; 4];
        for (i, row) in n.iter_mut().enumerate() {
            row[i] = mean;
        }
        m[0][3] = pair;
        m[3][0] = pair;
        m[1][2] = -pair;
        m[2][1] = -pair;
        Self { n, m }
    }

    /// Applies the analyzer rotation `a_out = U a_in`.
    pub fn rotated(&self, settings: &AnalyzerSettings<T>) -> Self {
        let z = T::zero();
        let mut u = [[z; 4]; 4];
        for (off, theta) in [(0usize, settings.theta_a), (2, settings.theta_b)] {
            let (s, c) = theta.sin_cos();
            u[off][off] = c;
            u[off][off + 1] = s;
            u[off + 1][off] = -s;
            u[off + 1][off + 1] = c;
        }
        Self {
            n: congruence(&u, &self.n),
            m: congruence(&u, &self.m),
        }
    }

    /// `exp(-|M| nu)`-free no-click weight over the ports in `modes`.
    pub fn vacuum_weight(&self, modes: ModeSet, eta: T) -> Result<T> {
        let idx: Vec<usize> = modes.ports().map(|p| p.index()).collect();
        if idx.is_empty() {
            return Ok(T::one());
        }
        let k = idx.len();
        let mut plus = vec![T::zero(); k * k];
        let mut minus = vec![T::zero(); k * k];
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                let id = if r == c { T::one() } else { T::zero() };
                plus[r * k + c] = id + eta * (self.n[i][j] + self.m[i][j]);
                minus[r * k + c] = id + eta * (self.n[i][j] - self.m[i][j]);
            }
        }
        let d = determinant(&mut plus, k) * determinant(&mut minus, k);
        if !(d > T::zero()) {
            return Err(Error::Numerical(format!(
                "non-positive covariance determinant {} for ports {:04b}",
                d,
                modes.bits()
            )));
        }
        Ok(T::one() / d.sqrt())
    }
}

fn congruence<T: Real>(u: &[[T; 4]; 4], a: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let z = T::zero();
    let mut ua = [[z; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            ua[i][j] = (0..4).fold(z, |s, k| s + u[i][k] * a[k][j]);
        }
    }
    let mut out = [[z; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).fold(z, |s, k| s + ua[i][k] * u[j][k]);
        }
    }
    out
}

/// LU determinant with partial pivoting; destroys `a`.
fn determinant<T: Real>(a: &mut [T], n: usize) -> T {
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                a[x * n + col]
                    .abs()
                    .partial_cmp(&a[y * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[pivot * n + col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            for k in col..n {
                a[row * n + k] = a[row * n + k] - f * a[col * n + k];
            }
        }
    }
    det
}

/// Full 16-pattern distribution for the TMSV source.
pub fn outcome_distribution_gaussian<T: Real>(
    xi: T,
    eta: T,
    nu: T,
    settings: &AnalyzerSettings<T>,
) -> Result<OutcomeDistribution<T>> {
    check_xi(xi)?;
    let detector = DetectorModel::new(eta, nu)?;
    GaussianEngine::new(xi, detector)?.outcomes(settings)
}

#[derive(Debug, Clone, Copy)]
pub struct GaussianEngine<T> {
    moments: GaussianMoments<T>,
    detector: DetectorModel<T>,
}

impl<T: Real> GaussianEngine<T> {
    pub fn new(xi: T, detector: DetectorModel<T>) -> Result<Self> {
        check_xi(xi)?;
        Ok(Self {
            moments: GaussianMoments::tmsv(xi),
            detector,
        })
    }

    pub fn no_click_table(&self, settings: &AnalyzerSettings<T>) -> Result<[T; 16]> {
        let rotated = self.moments.rotated(settings);
        let mut w = [T::zero(); 16];
        for m in ModeSet::all() {
            let dark = (-T::from_usize_lossy(m.len() as usize) * self.detector.nu).exp();
            w[m.bits() as usize] = dark * rotated.vacuum_weight(m, self.detector.eta)?;
        }
        Ok(w)
    }

    pub fn outcomes(&self, settings: &AnalyzerSettings<T>) -> Result<OutcomeDistribution<T>> {
        OutcomeDistribution::from_no_click_weights(&self.no_click_table(settings)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::bin_standard;
    use crate::modes::Port;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn params_at_xi_half() {
        let p = closed_form_params(0.5_f64, 1.0, 0.3, 0.3).unwrap();
        assert!((p.zeta - 1.271_540_317_407_62).abs() < 1e-12);
        assert!(p.gamma.abs() < 1e-15);
        assert!((p.lambda - 0.587_600_596_821_901).abs() < 1e-12);
    }

    #[test]
    fn params_vacuum_limit() {
        let p = closed_form_params(1e-9_f64, 1.0, 0.4, 1.7).unwrap();
        assert!((p.zeta - 1.0).abs() < 1e-12);
        assert!(p.gamma.abs() < 1e-8 && p.lambda.abs() < 1e-8);
    }

    #[test]
    fn params_quarter_pi_difference() {
        let p = closed_form_params(0.7_f64, 0.6, 1.0 + FRAC_PI_4, 1.0).unwrap();
        assert!((p.gamma - p.lambda).abs() < 1e-14);
        let l = binned_coincidences_closed_form(&p, 1e-3).unwrap();
        assert!(closed_form_correlation(&p, 1e-3).abs() < 1e-14);
        assert!((l.p_tt - 0.25).abs() < 1e-14);
    }

    #[test]
    fn params_reject_zero_efficiency() {
        assert!(closed_form_params(0.5_f64, 0.0, 0.0, 0.0).is_err());
        assert!(closed_form_params(0.0_f64, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn denominators_stay_positive() {
        for &xi in &[0.01_f64, 0.5, 1.0, 1.5] {
            for &eta in &[0.05_f64, 0.5, 1.0] {
                for i in 0..16 {
                    let p = closed_form_params(xi, eta, 0.2 * i as f64, 0.0).unwrap();
                    assert!(p.zeta > p.gamma.abs() && p.zeta > p.lambda.abs());
                }
            }
        }
    }

    #[test]
    fn vacuum_limit_never_clicks() {
        let d = outcome_distribution_gaussian(1e-9_f64, 0.8, 0.0, &AnalyzerSettings::new(0.3, 0.1).unwrap()).unwrap();
        assert!((d.no_click() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_mode_is_thermal() {
        // Each port alone is thermal with mean sinh^2 xi.
        let xi = 0.6_f64;
        let e = GaussianEngine::new(xi, DetectorModel::new(0.7, 0.0).unwrap()).unwrap();
        let w = e.no_click_table(&AnalyzerSettings::new(0.4, 1.3).unwrap()).unwrap();
        let expect = 1.0 / (1.0 + 0.7 * xi.sinh().powi(2));
        for port in Port::ALL {
            assert!((w[ModeSet::of(&[port]).bits() as usize] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn full_pattern_set_reproduces_closed_form_binning() {
        for &(xi, eta, nu) in &[(0.3_f64, 0.8, 1e-3), (0.755, 1.0, 0.0), (1.1, 0.6, 1e-2)] {
            for &(ta, tb) in &[(FRAC_PI_8, 0.0), (0.0, 0.0), (1.0, 0.2), (2.9, 1.4)] {
                let st = AnalyzerSettings::new(ta, tb).unwrap();
                let binned = bin_standard(&outcome_distribution_gaussian(xi, eta, nu, &st).unwrap()).unwrap();
                let closed = binned_coincidences_closed_form(&closed_form_params(xi, eta, ta, tb).unwrap(), nu).unwrap();
                assert!((binned.p_tt - closed.p_tt).abs() < 1e-10);
                assert!((binned.p_tr - closed.p_tr).abs() < 1e-10);
                assert!((binned.p_rt - closed.p_rt).abs() < 1e-10);
                assert!((binned.p_rr - closed.p_rr).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let mut a = vec![2.0_f64, -1.0, 0.5, 0.0, 3.0, 1.0, 4.0, 0.2, -2.0];
        let expect = 2.0 * (3.0 * -2.0 - 1.0 * 0.2) - (-1.0) * (0.0 * -2.0 - 1.0 * 4.0) + 0.5 * (0.0 * 0.2 - 3.0 * 4.0);
        assert!((determinant(&mut a, 3) - expect).abs() < 1e-12);
    }
}
