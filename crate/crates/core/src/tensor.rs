//! Dense index arrays: `TensorBlock` holds values at a base point, `JetTensor`
//! holds a jet per component so further derivatives can be taken.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ad::{BasePoint, Jet, Scalar};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
    /// Invariant under every permutation of its slots.
    Total,
}

/// Row-major flat index of `idx` in an `n^rank` array.
#[inline]
pub fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Inverse of [`flat_index`].
pub fn multi_index(n: usize, rank: usize, mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % n;
        flat /= n;
    }
    idx
}

/// Components of a tensor at one base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorBlock {
    pub name: String,
    pub n: usize,
    pub valence: Vec<Slot>,
    /// One label per slot, e.g. `"ijkl"`.
    pub indices: String,
    pub components: Vec<f64>,
    pub base: BasePoint,
    pub symmetries: Vec<Symmetry>,
}

impl TensorBlock {
    pub fn new(
        name: &str,
        valence: Vec<Slot>,
        indices: &str,
        components: Vec<f64>,
        base: BasePoint,
    ) -> TensorBlock {
        let n = base.dim();
        debug_assert_eq!(components.len(), n.pow(valence.len() as u32));
        debug_assert_eq!(indices.chars().count(), valence.len());
        TensorBlock {
            name: name.to_string(),
            n,
            valence,
            indices: indices.to_string(),
            components,
            base,
            symmetries: Vec::new(),
        }
    }

    pub fn with_symmetry(mut self, s: Symmetry) -> TensorBlock {
        self.symmetries.push(s);
        self
    }

    pub fn rank(&self) -> usize {
        self.valence.len()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.components[flat_index(self.n, idx)]
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm of the difference; the blocks must have the same shape.
    pub fn max_abs_diff(&self, other: &TensorBlock) -> f64 {
        assert_eq!(self.components.len(), other.components.len(), "shape mismatch");
        self.components
            .iter()
            .zip(&other.components)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Worst violation of the declared symmetries.
    pub fn symmetry_residual(&self) -> f64 {
        let rank = self.rank();
        let mut worst = 0.0f64;
        for flat in 0..self.components.len() {
            let idx = multi_index(self.n, rank, flat);
            let v = self.components[flat];
            for s in &self.symmetries {
                let pairs: Vec<(usize, usize, f64)> = match *s {
                    Symmetry::Symmetric(a, b) => vec![(a, b, 1.0)],
                    Symmetry::Antisymmetric(a, b) => vec![(a, b, -1.0)],
                    Symmetry::Total => (0..rank)
                        .flat_map(|a| (a + 1..rank).map(move |b| (a, b, 1.0)))
                        .collect(),
                };
                for (a, b, sign) in pairs {
                    let mut sw = idx.clone();
                    sw.swap(a, b);
                    worst = worst.max((v - sign * self.get(&sw)).abs());
                }
            }
        }
        worst
    }
}

impl fmt::Display for TensorBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let up: String = self
            .indices
            .chars()
            .zip(&self.valence)
            .filter(|(_, s)| **s == Slot::Up)
            .map(|(c, _)| c)
            .collect();
        let down: String = self
            .indices
            .chars()
            .zip(&self.valence)
            .filter(|(_, s)| **s == Slot::Down)
            .map(|(c, _)| c)
            .collect();
        writeln!(f, "{}^{}_{} at x={:?} y={:?}", self.name, up, down, self.base.x, self.base.y)?;
        for (flat, v) in self.components.iter().enumerate() {
            let idx = multi_index(self.n, self.rank(), flat);
            writeln!(f, "  {idx:?} = {v:.12e}")?;
        }
        Ok(())
    }
}

/// A tensor whose components are jets about a common base point.
#[derive(Debug, Clone)]
pub struct JetTensor {
    pub n: usize,
    pub rank: usize,
    pub data: Vec<Jet>,
}

impl JetTensor {
    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Jet) -> JetTensor {
        let data = (0..n.pow(rank as u32))
            .map(|flat| f(&multi_index(n, rank, flat)))
            .collect();
        JetTensor { n, rank, data }
    }

    pub fn try_from_fn(
        n: usize,
        rank: usize,
        mut f: impl FnMut(&[usize]) -> Result<Jet>,
    ) -> Result<JetTensor> {
        let data = (0..n.pow(rank as u32))
            .map(|flat| f(&multi_index(n, rank, flat)))
            .collect::<Result<Vec<_>>>()?;
        Ok(JetTensor { n, rank, data })
    }

    #[inline]
    pub fn at(&self, idx: &[usize]) -> &Jet {
        &self.data[flat_index(self.n, idx)]
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Result<Jet>) -> Result<JetTensor> {
        Ok(JetTensor {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        self.data.iter().map(Scalar::value).collect()
    }

    pub fn truncate(&self, x_order: usize, y_order: usize) -> JetTensor {
        JetTensor {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().map(|j| j.truncate(x_order, y_order)).collect(),
        }
    }

    /// Appends a slot: component `[.., h]` is `d/dy^h` of component `[..]`.
    pub fn dy_all(&self) -> Result<JetTensor> {
        let n = self.n;
        JetTensor::try_from_fn(n, self.rank + 1, |idx| {
            let (head, h) = idx.split_at(self.rank);
            self.at(head).dy(h[0])
        })
    }

    pub fn x_order(&self) -> usize {
        self.data.iter().map(Jet::x_order).min().unwrap_or(0)
    }

    pub fn y_order(&self) -> usize {
        self.data.iter().map(Jet::y_order).min().unwrap_or(0)
    }

    pub fn block(&self, name: &str, valence: Vec<Slot>, indices: &str) -> TensorBlock {
        let base = self.data[0].base().clone();
        TensorBlock::new(name, valence, indices, self.values(), base)
    }
}
