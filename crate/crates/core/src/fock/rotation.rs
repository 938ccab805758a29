//! Polarization analyzers acting on Fock states.
//!
//! Each analyzer maps `(H, V)` to `(T, R)` via `a_T = a_H cos + a_V sin`,
//! `a_R = -a_H sin + a_V cos`; on states this means substituting
//! `a_H^+ = cos a_T^+ - sin a_R^+` and `a_V^+ = sin a_T^+ + cos a_R^+`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;

use super::state::{DensityMatrix, FockState, Occupation, PureState};
use crate::modes::AnalyzerSettings;
use crate::scalar::Real;

/// Amplitudes over `k = 0..=n_h + n_v` of the output `|k>_T |N-k>_R` produced
/// from `|n_h>_H |n_v>_V`. Built by applying one creation operator at a time
/// with normalization, so every intermediate vector has unit norm.
pub fn side_amplitudes<T: Real>(n_h: usize, n_v: usize, cos: T, sin: T) -> Vec<T> {
    let total = n_h + n_v;
    let mut cur = vec![T::one()];
    for step in 0..total {
        // `step` photons present; apply a_H^+ for the first n_h steps, then a_V^+.
        let (ct, cr) = if step < n_h { (cos, -sin) } else { (sin, cos) };
        // Count of the mode just being filled, before this step.
        let j = if step < n_h { step } else { step - n_h };
        let norm = T::one() / T::from_usize_lossy(j + 1).sqrt();
        let mut next = vec![T::zero(); step + 2];
        for (k, &a) in cur.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            let m = step - k;
            next[k + 1] = next[k + 1] + ct * T::from_usize_lossy(k + 1).sqrt() * a * norm;
            next[k] = next[k] + cr * T::from_usize_lossy(m + 1).sqrt() * a * norm;
        }
        cur = next;
    }
    cur
}

struct SideCache<T> {
    cos: T,
    sin: T,
    memo: HashMap<(u16, u16), Vec<T>>,
}

impl<T: Real> SideCache<T> {
    fn new(theta: T) -> Self {
        Self {
            cos: theta.cos(),
            sin: theta.sin(),
            memo: HashMap::new(),
        }
    }

    fn get(&mut self, n_h: u16, n_v: u16) -> &[T] {
        let (c, s) = (self.cos, self.sin);
        self.memo
            .entry((n_h, n_v))
            .or_insert_with(|| side_amplitudes(n_h as usize, n_v as usize, c, s))
    }
}

/// Expands one input basis ket into the rotated output basis.
fn rotate_ket<T: Real>(
    occ: &Occupation,
    side_a: &mut SideCache<T>,
    side_b: &mut SideCache<T>,
) -> Vec<(Occupation, T)> {
    let a = side_a.get(occ[0], occ[1]).to_vec();
    let b = side_b.get(occ[2], occ[3]);
    let na = a.len() - 1;
    let nb = b.len() - 1;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (k, &ca) in a.iter().enumerate() {
        if ca == T::zero() {
            continue;
        }
        for (l, &cb) in b.iter().enumerate() {
            if cb == T::zero() {
                continue;
            }
            out.push((
                [k as u16, (na - k) as u16, l as u16, (nb - l) as u16],
                ca * cb,
            ));
        }
    }
    out
}

/// Re-expresses `state` in the analyzers' output basis `(T_A, R_A, T_B, R_B)`.
pub fn apply_analyzers<T: Real>(state: &FockState<T>, settings: &AnalyzerSettings<T>) -> FockState<T> {
    let mut side_a = SideCache::new(settings.theta_a);
    let mut side_b = SideCache::new(settings.theta_b);
    match state {
        FockState::Pure(pure) => {
            let mut amps: BTreeMap<Occupation, Complex<T>> = BTreeMap::new();
            for (occ, amp) in &pure.amps {
                for (out, c) in rotate_ket(occ, &mut side_a, &mut side_b) {
                    let e = amps.entry(out).or_insert(Complex::new(T::zero(), T::zero()));
                    *e = *e + amp.scale(c);
                }
            }
            FockState::Pure(PureState { amps })
        }
        FockState::Mixed(dm) => {
            let images: Vec<Vec<(Occupation, T)>> = dm
                .basis
                .iter()
                .map(|o| rotate_ket(o, &mut side_a, &mut side_b))
                .collect();
            let mut basis: Vec<Occupation> = images
                .iter()
                .flat_map(|img| img.iter().map(|(o, _)| *o))
                .collect();
            basis.sort_unstable();
            basis.dedup();
            let index: HashMap<Occupation, usize> =
                basis.iter().enumerate().map(|(i, o)| (*o, i)).collect();
            let n = basis.len();
            let zero = Complex::new(T::zero(), T::zero());
            let mut rho = vec![zero; n * n];
            for (i, img_i) in images.iter().enumerate() {
                for (j, img_j) in images.iter().enumerate() {
                    let r = dm.at(i, j);
                    if r == zero {
                        continue;
                    }
                    for (oi, ci) in img_i {
                        let row = index[oi] * n;
                        for (oj, cj) in img_j {
                            let e = &mut rho[row + index[oj]];
                            *e = *e + r.scale(*ci * *cj);
                        }
                    }
                }
            }
            FockState::Mixed(DensityMatrix { basis, rho })
        }
    }
}
