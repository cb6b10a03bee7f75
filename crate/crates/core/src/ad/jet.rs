use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::basis::{basis, Basis};
use super::point::{BasePoint, MultiIndex};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Truncated Taylor expansion of a scalar field in `(x, y)` about a base point.
///
/// Coefficients are stored as Taylor coefficients `f^(m) / m!` over the
/// product of the graded x-monomials (degree `<= x_order`) and y-monomials
/// (degree `<= y_order`); entry `ix * ny + iy` pairs x-monomial `ix` with
/// y-monomial `iy`.
#[derive(Clone)]
pub struct Jet {
    basis: Arc<Basis>,
    base: Arc<BasePoint>,
    x_order: usize,
    y_order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("x_order", &self.x_order)
            .field("y_order", &self.y_order)
            .field("value", &self.value())
            .finish()
    }
}

impl Jet {
    pub(crate) fn zeros(base: Arc<BasePoint>, x_order: usize, y_order: usize) -> Jet {
        let basis = basis(base.dim());
        let len = basis.count(x_order) * basis.count(y_order);
        Jet {
            basis,
            base,
            x_order,
            y_order,
            coeffs: vec![0.0; len],
        }
    }

    pub fn constant(base: Arc<BasePoint>, x_order: usize, y_order: usize, c: f64) -> Jet {
        let mut j = Jet::zeros(base, x_order, y_order);
        j.coeffs[0] = c;
        j
    }

    /// The coordinate function `x^i` expanded about the base point.
    pub fn x_var(base: Arc<BasePoint>, x_order: usize, y_order: usize, i: usize) -> Jet {
        let v = base.x[i];
        let mut j = Jet::constant(base, x_order, y_order, v);
        if x_order > 0 {
            let ny = j.ny();
            j.coeffs[(1 + i) * ny] = 1.0;
        }
        j
    }

    /// The fiber coordinate `y^i` expanded about the base point.
    pub fn y_var(base: Arc<BasePoint>, x_order: usize, y_order: usize, i: usize) -> Jet {
        let v = base.y[i];
        let mut j = Jet::constant(base, x_order, y_order, v);
        if y_order > 0 {
            j.coeffs[1 + i] = 1.0;
        }
        j
    }

    pub fn base(&self) -> &BasePoint {
        &self.base
    }


    pub fn dim(&self) -> usize {
        self.basis.n
    }

    pub fn x_order(&self) -> usize {
        self.x_order
    }

    pub fn y_order(&self) -> usize {
        self.y_order
    }

    #[inline]
    fn ny(&self) -> usize {
        self.basis.count(self.y_order)
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn locate(&self, m: &MultiIndex) -> Result<(usize, usize, f64)> {
        let ax = m.alpha_order();
        let by = m.beta_order();
        if m.alpha.len() != self.dim() || m.beta.len() != self.dim() {
            return Err(Error::Order(format!(
                "multi-index of dimension {} on a jet of dimension {}",
                m.alpha.len(),
                self.dim()
            )));
        }
        if ax > self.x_order || by > self.y_order {
            return Err(Error::Order(format!(
                "multi-index of order ({ax}, {by}) exceeds retained order ({}, {})",
                self.x_order, self.y_order
            )));
        }
        let ix = self.basis.index_of(&m.alpha).expect("within order");
        let iy = self.basis.index_of(&m.beta).expect("within order");
        let fact = self.basis.factorial(ix) * self.basis.factorial(iy);
        Ok((ix, iy, fact))
    }

    /// Partial derivative `d^|m| f / dx^alpha dy^beta` at the base point.
    pub fn derivative(&self, m: &MultiIndex) -> Result<f64> {
        let (ix, iy, fact) = self.locate(m)?;
        Ok(self.coeffs[ix * self.ny() + iy] * fact)
    }

    /// Raw Taylor coefficient (derivative divided by `alpha! beta!`).
    pub fn taylor_coefficient(&self, m: &MultiIndex) -> Result<f64> {
        let (ix, iy, _) = self.locate(m)?;
        Ok(self.coeffs[ix * self.ny() + iy])
    }

    pub fn truncate(&self, x_order: usize, y_order: usize) -> Jet {
        let xo = x_order.min(self.x_order);
        let yo = y_order.min(self.y_order);
        if xo == self.x_order && yo == self.y_order {
            return self.clone();
        }
        let nx = self.basis.count(xo);
        let ny = self.basis.count(yo);
        let src_ny = self.ny();
        let mut coeffs = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            coeffs.extend_from_slice(&self.coeffs[ix * src_ny..ix * src_ny + ny]);
        }
        Jet {
            basis: self.basis.clone(),
            base: self.base.clone(),
            x_order: xo,
            y_order: yo,
            coeffs,
        }
    }

    fn check_compatible(&self, other: &Jet) {
        debug_assert!(
            Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base,
            "jets expanded about different base points"
        );
    }

    fn zip(&self, other: &Jet, op: impl Fn(f64, f64) -> f64) -> Jet {
        self.check_compatible(other);
        let xo = self.x_order.min(other.x_order);
        let yo = self.y_order.min(other.y_order);
        let nx = self.basis.count(xo);
        let ny = self.basis.count(yo);
        let (sa, sb) = (self.ny(), other.ny());
        let mut coeffs = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            for iy in 0..ny {
                coeffs.push(op(self.coeffs[ix * sa + iy], other.coeffs[ix * sb + iy]));
            }
        }
        Jet {
            basis: self.basis.clone(),
            base: self.base.clone(),
            x_order: xo,
            y_order: yo,
            coeffs,
        }
    }

    fn map(&self, op: impl Fn(f64) -> f64) -> Jet {
        Jet {
            basis: self.basis.clone(),
            base: self.base.clone(),
            x_order: self.x_order,
            y_order: self.y_order,
            coeffs: self.coeffs.iter().map(|&c| op(c)).collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let xo = self.x_order.min(other.x_order);
        let yo = self.y_order.min(other.y_order);
        let mut out = Jet::zeros(self.base.clone(), xo, yo);
        let ny = out.ny();
        let (sa, sb) = (self.ny(), other.ny());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let nya = self.basis.count(yo);
        let a_rows: Vec<bool> = (0..self.basis.count(xo))
            .map(|ix| a[ix * sa..ix * sa + nya].iter().any(|&v| v != 0.0))
            .collect();
        let b_rows: Vec<bool> = (0..self.basis.count(xo))
            .map(|ix| b[ix * sb..ix * sb + nya].iter().any(|&v| v != 0.0))
            .collect();
        let ypairs = self.basis.pairs(yo);
        for &(xa, xb, xc) in self.basis.pairs(xo) {
            let (xa, xb, xc) = (xa as usize, xb as usize, xc as usize);
            if !a_rows[xa] || !b_rows[xb] {
                continue;
            }
            let arow = &a[xa * sa..];
            let brow = &b[xb * sb..];
            let crow = &mut out.coeffs[xc * ny..(xc + 1) * ny];
            for &(ya, yb, yc) in ypairs {
                crow[yc as usize] += arow[ya as usize] * brow[yb as usize];
            }
        }
        out
    }

    /// `d/dx^i`; lowers the x-order by one.
    pub fn dx(&self, i: usize) -> Result<Jet> {
        if self.x_order == 0 {
            return Err(Error::Order(
                "x-derivative of a jet with no x-order left".into(),
            ));
        }
        let xo = self.x_order - 1;
        let ny = self.ny();
        let nx = self.basis.count(xo);
        let mut coeffs = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            let src = self.basis.successor(ix, i).expect("within table");
            let factor = self.basis.exponents(src)[i] as f64;
            coeffs.extend(self.coeffs[src * ny..(src + 1) * ny].iter().map(|&c| c * factor));
        }
        Ok(Jet {
            basis: self.basis.clone(),
            base: self.base.clone(),
            x_order: xo,
            y_order: self.y_order,
            coeffs,
        })
    }

    /// `d/dy^i`; lowers the y-order by one.
    pub fn dy(&self, i: usize) -> Result<Jet> {
        if self.y_order == 0 {
            return Err(Error::Order(
                "y-derivative of a jet with no y-order left".into(),
            ));
        }
        let yo = self.y_order - 1;
        let src_ny = self.ny();
        let ny = self.basis.count(yo);
        let nx = self.basis.count(self.x_order);
        let map: Vec<(usize, f64)> = (0..ny)
            .map(|iy| {
                let s = self.basis.successor(iy, i).expect("within table");
                (s, self.basis.exponents(s)[i] as f64)
            })
            .collect();
        let mut coeffs = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            let row = &self.coeffs[ix * src_ny..];
            coeffs.extend(map.iter().map(|&(s, f)| row[s] * f));
        }
        Ok(Jet {
            basis: self.basis.clone(),
            base: self.base.clone(),
            x_order: self.x_order,
            y_order: yo,
            coeffs,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(self.base.clone(), self.x_order, self.y_order, c)
    }

    fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn mul(&self, other: &Self) -> Self {
        self.product(other)
    }

    fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    fn add_const(&self, c: f64) -> Self {
        let mut j = self.clone();
        j.coeffs[0] += c;
        j
    }

    fn nilpotency(&self) -> usize {
        self.x_order + self.y_order
    }

    fn compose(&self, taylor: &[f64]) -> Self {
        let k = self.nilpotency().min(taylor.len() - 1);
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut r = self.constant_like(taylor[k]);
        for c in taylor[..k].iter().rev() {
            r = r.product(&h);
            r.coeffs[0] += c;
        }
        r
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Scalar::add(self, rhs)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Scalar::sub(self, rhs)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.product(rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Scalar::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ad::scalar;

    fn base2(x: [f64; 2], y: [f64; 2]) -> Arc<BasePoint> {
        Arc::new(BasePoint::new(x.to_vec(), y.to_vec()).unwrap())
    }

    #[test]
    fn product_of_variables() {
        let b = base2([3.0, 0.0], [1.0, 1.0]);
        let x1 = Jet::x_var(b.clone(), 3, 3, 0);
        let y1 = Jet::y_var(b.clone(), 3, 3, 0);
        let f = &(&x1 * &x1) * &y1;
        assert_eq!(f.value(), 9.0);
        let m = MultiIndex::new(vec![2, 0], vec![1, 0]);
        assert_eq!(f.derivative(&m).unwrap(), 2.0);
        let m = MultiIndex::new(vec![1, 0], vec![0, 0]);
        assert_eq!(f.derivative(&m).unwrap(), 6.0);
    }

    #[test]
    fn derivative_operators_commute_with_coefficients() {
        let b = base2([0.3, -0.2], [0.8, 1.1]);
        let x2 = Jet::x_var(b.clone(), 2, 4, 1);
        let y1 = Jet::y_var(b.clone(), 2, 4, 0);
        let f = scalar::sin(&(&x2 * &scalar::powi(&y1, 3).unwrap())).unwrap();
        let g = f.dx(1).unwrap().dy(0).unwrap();
        let m_full = MultiIndex::new(vec![0, 2], vec![2, 0]);
        let m_red = MultiIndex::new(vec![0, 1], vec![1, 0]);
        let a = f.derivative(&m_full).unwrap();
        let c = g.derivative(&m_red).unwrap();
        assert!((a - c).abs() < 1e-12, "{a} vs {c}");
    }

    #[test]
    fn exp_log_round_trip() {
        let b = base2([0.1, 0.2], [1.0, 2.0]);
        let y = Jet::y_var(b.clone(), 1, 5, 1);
        let r = scalar::exp(&scalar::ln(&y).unwrap()).unwrap();
        let d = &r - &y;
        assert!(d.max_abs() < 1e-13);
    }

    #[test]
    fn order_errors() {
        let b = base2([0.0, 0.0], [1.0, 0.0]);
        let c = Jet::constant(b, 0, 1, 2.0);
        assert!(matches!(c.dx(0), Err(Error::Order(_))));
        let d = c.dy(1).unwrap();
        assert!(matches!(d.dy(0), Err(Error::Order(_))));
        let m = MultiIndex::new(vec![0, 0], vec![2, 0]);
        assert!(matches!(c.derivative(&m), Err(Error::Order(_))));
    }
}
