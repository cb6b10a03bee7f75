use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound on `|y|`: the slit tangent bundle excludes the zero section.
pub const EPS_Y: f64 = 1e-8;

/// A point `(x, y)` of the slit tangent bundle in one chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BasePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<BasePoint> {
        if x.len() != y.len() {
            return Err(Error::Config(format!(
                "x has {} components but y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::Config("dimension must be at least 2".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite base point coordinate".into()));
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < EPS_Y {
            return Err(Error::Domain(format!(
                "|y| = {norm:e} is below the slit threshold {EPS_Y:e}"
            )));
        }
        Ok(BasePoint { x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn with_y(&self, y: Vec<f64>) -> Result<BasePoint> {
        BasePoint::new(self.x.clone(), y)
    }

    pub fn scaled_y(&self, lambda: f64) -> Result<BasePoint> {
        self.with_y(self.y.iter().map(|v| v * lambda).collect())
    }
}

/// Derivative orders per x-coordinate (`alpha`) and per y-coordinate (`beta`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
}

impl MultiIndex {
    pub fn new(alpha: Vec<usize>, beta: Vec<usize>) -> MultiIndex {
        MultiIndex { alpha, beta }
    }

    pub fn zero(n: usize) -> MultiIndex {
        MultiIndex::new(vec![0; n], vec![0; n])
    }

    /// Multi-index from lists of differentiated coordinates, e.g. `&[0], &[1, 1]`
    /// for `d^3 / dx^1 dy^2 dy^2`.
    pub fn from_vars(n: usize, xs: &[usize], ys: &[usize]) -> MultiIndex {
        let mut m = MultiIndex::zero(n);
        for &i in xs {
            m.alpha[i] += 1;
        }
        for &i in ys {
            m.beta[i] += 1;
        }
        m
    }

    pub fn alpha_order(&self) -> usize {
        self.alpha.iter().sum()
    }

    pub fn beta_order(&self) -> usize {
        self.beta.iter().sum()
    }

    pub fn order(&self) -> usize {
        self.alpha_order() + self.beta_order()
    }

    /// Every multi-index in dimension `n` with `|alpha| <= max_x`, `|beta| <= max_y`.
    pub fn enumerate(n: usize, max_x: usize, max_y: usize) -> Vec<MultiIndex> {
        let xs = exponents_up_to(n, max_x);
        let ys = exponents_up_to(n, max_y);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for a in &xs {
            for b in &ys {
                out.push(MultiIndex::new(a.clone(), b.clone()));
            }
        }
        out
    }
}

fn exponents_up_to(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; n]];
    let mut frontier = out.clone();
    for _ in 0..max {
        let mut next = Vec::new();
        for e in &frontier {
            // extend only at or after the last nonzero slot to avoid duplicates
            let start = e.iter().rposition(|&d| d > 0).unwrap_or(0);
            for v in start..n {
                let mut f = e.clone();
                f[v] += 1;
                next.push(f);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
