//! Budgeted Nelder-Mead maximizer.

use crate::error::Result;
use crate::scalar::Real;

pub struct SimplexOutcome<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Maximizes `f` from `x0` with initial per-axis steps `steps`. Stops when
/// every vertex lies within `xtol` of the best vertex on every axis, or when
/// `budget` evaluations are spent.
pub fn maximize<T: Real>(
    f: &mut dyn FnMut(&[T]) -> Result<T>,
    x0: &[T],
    steps: &[T],
    xtol: T,
    budget: usize,
) -> Result<SimplexOutcome<T>> {
    let dim = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[T], evaluations: &mut usize| -> Result<T> {
        *evaluations += 1;
        f(x)
    };

    let mut verts: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evaluations)?;
    verts.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] = x[i] + steps[i];
        let v = eval(&x, &mut evaluations)?;
        verts.push((x, v));
    }

    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut converged = false;
    loop {
        // Best first; stable sort keeps ties deterministic.
        verts.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread_ok = verts.iter().skip(1).all(|(x, _)| {
            x.iter().zip(&verts[0].0).all(|(a, b)| (*a - *b).abs() < xtol)
        });
        if spread_ok {
            converged = true;
            break;
        }
        if evaluations + 2 > budget {
            break;
        }

        let mut centroid = vec![T::zero(); dim];
        for (x, _) in verts.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c = *c + *xi;
            }
        }
        let n = T::from_usize_lossy(dim);
        centroid.iter_mut().for_each(|c| *c = *c / n);

        let worst = verts[dim].clone();
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| *c + t * (*c - *w))
                .collect()
        };

        let xr = along(T::one());
        let fr = eval(&xr, &mut evaluations)?;
        if fr > verts[0].1 {
            let xe = along(two);
            let fe = eval(&xe, &mut evaluations)?;
            verts[dim] = if fe > fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr > verts[dim - 1].1 {
            verts[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr > worst.1 {
            let xc = along(half);
            let fc = eval(&xc, &mut evaluations)?;
            (xc, fc)
        } else {
            let xc = along(-half);
            let fc = eval(&xc, &mut evaluations)?;
            (xc, fc)
        };
        if fc > worst.1.max(fr) {
            verts[dim] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        if evaluations + dim > budget {
            break;
        }
        let best = verts[0].0.clone();
        for v in verts.iter_mut().skip(1) {
            let x: Vec<T> = v.0.iter().zip(&best).map(|(a, b)| *b + half * (*a - *b)).collect();
            let fx = eval(&x, &mut evaluations)?;
            *v = (x, fx);
        }
    }
    verts.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let (x, value) = verts.swap_remove(0);
    Ok(SimplexOutcome {
        x,
        value,
        evaluations,
        converged,
    })
}
