//! Arithmetic shared by plain `f64` evaluation and jet evaluation.
//!
//! Every elementary function is expressed through [`Scalar::compose`]: the
//! univariate Taylor series of the function at the argument's value is
//! composed with the nilpotent part of the argument. For `f64` this collapses
//! to the function value.

use crate::error::{Error, Result};

pub trait Scalar: Clone + Send + Sync {
    fn value(&self) -> f64;
    /// A constant with the same shape (order, base point) as `self`.
    fn constant_like(&self, c: f64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn add_const(&self, c: f64) -> Self;
    /// Highest power of the nilpotent part that survives truncation.
    fn nilpotency(&self) -> usize;
    /// `sum_k taylor[k] * (self - value)^k`; `taylor` has `nilpotency() + 1` entries.
    fn compose(&self, taylor: &[f64]) -> Self;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn add_const(&self, c: f64) -> Self {
        self + c
    }
    fn nilpotency(&self) -> usize {
        0
    }
    fn compose(&self, taylor: &[f64]) -> Self {
        taylor[0]
    }
}

fn check_finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Numeric(format!("non-finite argument to {what}")))
    }
}

pub fn recip<S: Scalar>(a: &S) -> Result<S> {
    let a0 = a.value();
    check_finite(a0, "reciprocal")?;
    if a0 == 0.0 {
        return Err(Error::Domain("division by zero".into()));
    }
    let k = a.nilpotency();
    let inv = 1.0 / a0;
    let mut c = Vec::with_capacity(k + 1);
    let mut t = inv;
    for _ in 0..=k {
        c.push(t);
        t *= -inv;
    }
    Ok(a.compose(&c))
}

pub fn div<S: Scalar>(a: &S, b: &S) -> Result<S> {
    Ok(a.mul(&recip(b)?))
}

/// `a^p` for real `p`; requires `a > 0` unless `p` is a nonnegative integer.
pub fn powf<S: Scalar>(a: &S, p: f64) -> Result<S> {
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        return powi(a, p as i32);
    }
    let a0 = a.value();
    check_finite(a0, "pow")?;
    if a0 <= 0.0 {
        return Err(Error::Domain(format!(
            "non-integer power {p} of non-positive value {a0}"
        )));
    }
    let k = a.nilpotency();
    let mut c = Vec::with_capacity(k + 1);
    let mut t = a0.powf(p);
    for i in 0..=k {
        c.push(t);
        t *= (p - i as f64) / ((i + 1) as f64 * a0);
    }
    Ok(a.compose(&c))
}

pub fn powi<S: Scalar>(a: &S, p: i32) -> Result<S> {
    if p < 0 {
        return recip(&powi(a, -p)?);
    }
    let mut result = a.constant_like(1.0);
    let mut base = a.clone();
    let mut e = p as u32;
    while e > 0 {
        if e & 1 == 1 {
            result = result.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    Ok(result)
}

pub fn sqrt<S: Scalar>(a: &S) -> Result<S> {
    let a0 = a.value();
    if a0 <= 0.0 {
        return Err(Error::Domain(format!("sqrt of non-positive value {a0}")));
    }
    powf(a, 0.5)
}

pub fn exp<S: Scalar>(a: &S) -> Result<S> {
    let a0 = a.value();
    check_finite(a0, "exp")?;
    let k = a.nilpotency();
    let e = a0.exp();
    let mut c = Vec::with_capacity(k + 1);
    let mut t = e;
    for i in 0..=k {
        c.push(t);
        t /= (i + 1) as f64;
    }
    Ok(a.compose(&c))
}

pub fn ln<S: Scalar>(a: &S) -> Result<S> {
    let a0 = a.value();
    check_finite(a0, "log")?;
    if a0 <= 0.0 {
        return Err(Error::Domain(format!("log of non-positive value {a0}")));
    }
    let k = a.nilpotency();
    let mut c = Vec::with_capacity(k + 1);
    c.push(a0.ln());
    for i in 1..=k {
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        c.push(sign / (i as f64 * a0.powi(i as i32)));
    }
    Ok(a.compose(&c))
}

fn trig<S: Scalar>(a: &S, phase: usize) -> Result<S> {
    let a0 = a.value();
    check_finite(a0, "trig")?;
    let (s, co) = a0.sin_cos();
    let cycle = [s, co, -s, -co];
    let k = a.nilpotency();
    let mut fact = 1.0;
    let mut c = Vec::with_capacity(k + 1);
    for i in 0..=k {
        if i > 0 {
            fact *= i as f64;
        }
        c.push(cycle[(i + phase) % 4] / fact);
    }
    Ok(a.compose(&c))
}

pub fn sin<S: Scalar>(a: &S) -> Result<S> {
    trig(a, 0)
}

pub fn cos<S: Scalar>(a: &S) -> Result<S> {
    trig(a, 1)
}

pub fn tan<S: Scalar>(a: &S) -> Result<S> {
    div(&sin(a)?, &cos(a)?)
}
