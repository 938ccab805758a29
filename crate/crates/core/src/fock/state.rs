use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Photon numbers in the four modes, ordered `(H_A, V_A, H_B, V_B)` before
/// the analyzers and `(T_A, R_A, T_B, R_B)` after.
pub type Occupation = [u16; 4];

pub fn total_photons(occ: &Occupation) -> usize {
    occ.iter().map(|&n| n as usize).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    pub amps: BTreeMap<Occupation, Complex<T>>,
}

/// Dense Hermitian density matrix over an explicit occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    pub basis: Vec<Occupation>,
    /// Row-major, `basis.len()` squared entries.
    pub rho: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.rho[i * self.dim() + j]
    }

    /// Cholesky of `rho + delta I`; succeeds iff `rho` is PSD up to `delta`.
    pub fn is_positive_semidefinite(&self, delta: T) -> bool {
        let n = self.dim();
        let mut l = vec![Complex::new(T::zero(), T::zero()); n * n];
        for j in 0..n {
            let mut d = self.at(j, j).re + delta;
            for k in 0..j {
                d = d - l[j * n + k].norm_sqr();
            }
            if d <= T::zero() {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = Complex::new(d, T::zero());
            for i in j + 1..n {
                let mut s = self.at(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FockState<T> {
    Pure(PureState<T>),
    Mixed(DensityMatrix<T>),
}

fn norm_slack<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(1e3))
}

impl<T: Real> FockState<T> {
    /// Diagonal of the density matrix in the occupation basis.
    pub fn populations(&self) -> Vec<(Occupation, T)> {
        match self {
            FockState::Pure(s) => s.amps.iter().map(|(o, a)| (*o, a.norm_sqr())).collect(),
            FockState::Mixed(m) => m
                .basis
                .iter()
                .enumerate()
                .map(|(i, o)| (*o, m.at(i, i).re))
                .collect(),
        }
    }

    pub fn trace(&self) -> T {
        self.populations()
            .iter()
            .fold(T::zero(), |acc, (_, p)| acc + *p)
    }

    /// Probability of each total photon number.
    pub fn photon_number_distribution(&self) -> BTreeMap<usize, T> {
        let mut out = BTreeMap::new();
        for (occ, p) in self.populations() {
            let e = out.entry(total_photons(&occ)).or_insert(T::zero());
            *e = *e + p;
        }
        out
    }

    /// Checks unit trace and, for mixed states, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        let slack = norm_slack::<T>();
        let tr = self.trace();
        if (tr - T::one()).abs() > slack {
            return Err(Error::Numerical(format!("state trace is {}", tr)));
        }
        if let FockState::Mixed(m) = self {
            let n = m.dim();
            if m.rho.len() != n * n {
                return Err(Error::Numerical("density matrix shape mismatch".into()));
            }
            for i in 0..n {
                for j in 0..n {
                    if (m.at(i, j) - m.at(j, i).conj()).norm() > slack {
                        return Err(Error::Numerical("density matrix is not Hermitian".into()));
                    }
                }
            }
            if !m.is_positive_semidefinite(slack) {
                return Err(Error::Numerical(
                    "density matrix is not positive semidefinite".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, FockState::Pure(_))
    }
}
