//! Central-difference oracle for mixed partials, independent of the jet path.
//!
//! Fields are evaluated in plain `f64`. The stencil is the tensor product of
//! one-dimensional central differences (half-integer offsets for odd orders),
//! whose error expands in even powers of the step, followed by Richardson
//! extrapolation over halved steps.

use super::point::{BasePoint, MultiIndex};
use super::ScalarField;
use crate::error::{Error, Result};

/// Richardson levels used by [`fd_partial`].
pub const FD_RICHARDSON_LEVELS: usize = 2;

/// Step that balances rounding against truncation for a derivative of total
/// order `order` under [`fd_partial`]'s extrapolation depth.
pub fn fd_default_step(order: usize) -> f64 {
    match order {
        0 | 1 => 2e-2,
        2 => 4e-2,
        3 => 6e-2,
        4 => 8e-2,
        _ => 1e-1,
    }
}

/// Central-difference estimate of `d^|m| f / dx^alpha dy^beta` at `base`.
pub fn fd_partial<F: ScalarField + ?Sized>(
    f: &F,
    base: &BasePoint,
    m: &MultiIndex,
    step: f64,
) -> Result<f64> {
    fd_partial_with(f, base, m, step, FD_RICHARDSON_LEVELS)
}

pub fn fd_partial_with<F: ScalarField + ?Sized>(
    f: &F,
    base: &BasePoint,
    m: &MultiIndex,
    step: f64,
    levels: usize,
) -> Result<f64> {
    let n = base.dim();
    if m.alpha.len() != n || m.beta.len() != n {
        return Err(Error::Order("multi-index dimension mismatch".into()));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {step}")));
    }
    let mut table: Vec<f64> = Vec::with_capacity(levels + 1);
    let mut h = step;
    for _ in 0..=levels {
        table.push(central(f, base, m, h)?);
        h *= 0.5;
    }
    // Richardson: error terms h^2, h^4, ... with step ratio 2
    for level in 1..=levels {
        let factor = 4f64.powi(level as i32);
        for i in (level..table.len()).rev() {
            table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
        }
    }
    Ok(*table.last().expect("at least one level"))
}

fn central<F: ScalarField + ?Sized>(f: &F, base: &BasePoint, m: &MultiIndex, h: f64) -> Result<f64> {
    let n = base.dim();
    // (coordinate slot, order); slots 0..n are x, n..2n are y
    let dirs: Vec<(usize, usize)> = m
        .alpha
        .iter()
        .chain(&m.beta)
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(slot, &k)| (slot, k))
        .collect();
    let coords: Vec<f64> = base.x.iter().chain(&base.y).copied().collect();
    for &(slot, _) in &dirs {
        let v = coords[slot];
        if v + 0.5 * h == v {
            return Err(Error::Numeric(format!("finite-difference step {h:e} underflows at {v}")));
        }
    }
    let total: usize = dirs.iter().map(|&(_, k)| k).sum();
    let denom = h.powi(total as i32);
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Numeric(format!("step {h:e} underflows at order {total}")));
    }

    let stencils: Vec<Vec<(f64, f64)>> = dirs.iter().map(|&(_, k)| stencil_1d(k)).collect();
    let mut idx = vec![0usize; dirs.len()];
    let mut acc = 0.0;
    let mut point = coords.clone();
    loop {
        let mut w = 1.0;
        point.copy_from_slice(&coords);
        for (d, &(slot, _)) in dirs.iter().enumerate() {
            let (offset, weight) = stencils[d][idx[d]];
            point[slot] += offset * h;
            w *= weight;
        }
        let v = f.eval::<f64>(&point[..n], &point[n..])?;
        acc += w * v;

        let mut d = 0;
        loop {
            if d == dirs.len() {
                return Ok(acc / denom);
            }
            idx[d] += 1;
            if idx[d] < stencils[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// `(offset, weight)` pairs of the k-th central difference: offsets `k/2 - j`,
/// weights `(-1)^j C(k, j)`.
fn stencil_1d(k: usize) -> Vec<(f64, f64)> {
    let mut binom = 1.0;
    (0..=k)
        .map(|j| {
            if j > 0 {
                binom = binom * (k + 1 - j) as f64 / j as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            (k as f64 / 2.0 - j as f64, sign * binom)
        })
        .collect()
}
