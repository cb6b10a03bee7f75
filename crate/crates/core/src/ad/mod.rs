//! Exact mixed partial derivatives of scalar fields on the slit tangent bundle.
//!
//! The engine works with truncated multivariate Taylor polynomials ([`Jet`])
//! in the `2n` variables `(x, y)`. Orders are tracked separately for the
//! x-block and the y-block because the curvature chains consume far more
//! y-derivatives than x-derivatives. [`fd_partial`] is an independent
//! central-difference oracle that never touches the jet path.

mod basis;
mod fd;
mod jet;
mod point;
pub mod scalar;

use std::sync::Arc;

pub use basis::{MAX_DIM, MAX_JET_ORDER};
pub use fd::{fd_default_step, fd_partial, fd_partial_with, FD_RICHARDSON_LEVELS};
pub use jet::Jet;
pub use point::{BasePoint, MultiIndex, EPS_Y};
pub use scalar::Scalar;

use crate::error::{Error, Result};

/// A scalar field on (an open subset of) the tangent bundle of one chart.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S>;

    fn in_domain(&self, _p: &BasePoint) -> bool {
        true
    }
}

/// Jet orders used by the curvature pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EngineConfig {
    pub x_order: usize,
    pub y_order: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            x_order: 3,
            y_order: 6,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.x_order > MAX_JET_ORDER || self.y_order > MAX_JET_ORDER {
            return Err(Error::Config(format!(
                "jet order ({}, {}) exceeds the engine limit {MAX_JET_ORDER}",
                self.x_order, self.y_order
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::Config(format!(
            "dimension {n} outside the supported range 2..={MAX_DIM}"
        )));
    }
    Ok(())
}

/// Seed the coordinate jets `x^i`, `y^i` about `base`.
pub fn seed_variables(
    base: &Arc<BasePoint>,
    x_order: usize,
    y_order: usize,
) -> (Vec<Jet>, Vec<Jet>) {
    let n = base.dim();
    let xs = (0..n)
        .map(|i| Jet::x_var(base.clone(), x_order, y_order, i))
        .collect();
    let ys = (0..n)
        .map(|i| Jet::y_var(base.clone(), x_order, y_order, i))
        .collect();
    (xs, ys)
}

/// Expand `f` about `base`, retaining x-derivatives up to `x_order` and
/// y-derivatives up to `y_order`.
pub fn taylor_eval<F: ScalarField + ?Sized>(
    f: &F,
    base: &BasePoint,
    x_order: usize,
    y_order: usize,
) -> Result<Jet> {
    if x_order > MAX_JET_ORDER || y_order > MAX_JET_ORDER {
        return Err(Error::Config(format!(
            "requested jet order ({x_order}, {y_order}) exceeds the engine limit {MAX_JET_ORDER}"
        )));
    }
    if f.dim() != base.dim() {
        return Err(Error::Config(format!(
            "field of dimension {} evaluated at a point of dimension {}",
            f.dim(),
            base.dim()
        )));
    }
    check_dim(base.dim())?;
    if !f.in_domain(base) {
        return Err(Error::Domain(format!("base point {base:?} outside the field's domain")));
    }
    let base = Arc::new(base.clone());
    let (xs, ys) = seed_variables(&base, x_order, y_order);
    f.eval(&xs, &ys)
}

/// The partial derivative `d^|m| f / dx^alpha dy^beta` held by `j`.
pub fn coefficient(j: &Jet, m: &MultiIndex) -> Result<f64> {
    j.derivative(m)
}
