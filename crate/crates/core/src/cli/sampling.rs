//! Deterministic sampling of base points and flags.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ad::{BasePoint, ScalarField};
use crate::error::{Error, Result};
use crate::metrics::FinslerStructure;

pub const Y_MIN: f64 = 0.5;
pub const Y_MAX: f64 = 2.0;

/// Largest tolerated fraction of rejected draws.
pub const MAX_REJECTION_RATE: f64 = 0.99;

/// Uniform point of the annulus `Y_MIN <= |y| <= Y_MAX`.
fn annulus<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-Y_MAX..=Y_MAX)).collect();
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (Y_MIN..=Y_MAX).contains(&r) {
            return y;
        }
    }
}

/// `count` base points: `x` uniform in `bounds`, `y` uniform on the annulus,
/// points outside the structure's domain resampled.
pub fn sample_points(s: &FinslerStructure, bounds: &[[f64; 2]], count: usize, seed: u64) -> Result<Vec<BasePoint>> {
    if count == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let n = s.dim();
    if bounds.len() != n {
        return Err(Error::Config(format!("{} box intervals for dimension {n}", bounds.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_draws = ((count as f64) / (1.0 - MAX_REJECTION_RATE)).ceil() as usize;
    let mut out = Vec::with_capacity(count);
    let mut draws = 0usize;
    while out.len() < count {
        if draws >= max_draws {
            return Err(Error::Domain(format!(
                "domain too small: more than {:.0}% of {draws} draws fell outside the chart domain",
                100.0 * MAX_REJECTION_RATE
            )));
        }
        draws += 1;
        let x: Vec<f64> = bounds.iter().map(|[lo, hi]| rng.gen_range(*lo..*hi)).collect();
        let y = annulus(&mut rng, n);
        let p = BasePoint::new(x, y)?;
        if s.in_domain(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// `count` flags `(sample index, u)` with `u` uniform in the cube and at
/// least 15 degrees away from the pole `y` (Euclidean angle).
pub fn sample_flags(points: &[BasePoint], count: usize, seed: u64) -> Vec<(usize, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let cos_max = 15f64.to_radians().cos();
    (0..count)
        .map(|k| {
            let sample = k % points.len();
            let y = &points[sample].y;
            let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            loop {
                let u: Vec<f64> = (0..y.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                let dot: f64 = u.iter().zip(y).map(|(a, b)| a * b).sum();
                if nu > 1e-3 && (dot / (nu * ny)).abs() < cos_max {
                    return (sample, u);
                }
            }
        })
        .collect()
}
