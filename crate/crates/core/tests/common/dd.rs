//! Double-double evaluation of structure expressions and a finite-difference
//! oracle built on it. Independent of the jet engine; rounding is near 1e-32
//! so high-order difference quotients keep their accuracy.

use finsler_core::ad::{BasePoint, MultiIndex};
use finsler_core::expr::{Expr, Func};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };
const PI_2: Dd = Dd { hi: std::f64::consts::FRAC_PI_2, lo: 6.123_233_995_736_766e-17 };

impl Dd {
    pub fn new(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let v = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(v.hi, v.lo + t.lo)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn scale(self, c: f64) -> Dd {
        let p = two_prod(self.hi, c);
        quick_two_sum(p.hi, p.lo + self.lo * c)
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.scale(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.scale(q2));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::new(q3))
    }

    pub fn sqrt(self) -> Option<Dd> {
        if !(self.hi > 0.0) {
            return (self.hi == 0.0).then_some(Dd::new(0.0));
        }
        let r = Dd::new(self.hi.sqrt());
        Some(r.add(self.sub(r.mul(r)).div(r.scale(2.0))))
    }

    pub fn exp(self) -> Dd {
        let k = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.scale(k)).scale(1.0 / 1024.0);
        // Taylor series of exp(r) - 1, then square ten times
        let mut term = r;
        let mut sum = r;
        for i in 2..30 {
            term = term.mul(r).div(Dd::new(i as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            // (1 + s)^2 - 1 = 2 s + s^2
            sum = sum.scale(2.0).add(sum.mul(sum));
        }
        let v = sum.add(Dd::new(1.0));
        Dd { hi: v.hi * 2f64.powi(k as i32), lo: v.lo * 2f64.powi(k as i32) }
    }

    pub fn ln(self) -> Option<Dd> {
        if !(self.hi > 0.0) {
            return None;
        }
        let mut y = Dd::new(self.hi.ln());
        for _ in 0..2 {
            y = y.add(self.mul(y.neg().exp())).sub(Dd::new(1.0));
        }
        Some(y)
    }

    /// `(sin, cos)` by reduction modulo pi/2 and Taylor series.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.hi / PI_2.hi).round();
        let r = self.sub(PI_2.scale(k));
        let r2 = r.mul(r);
        let mut s = r;
        let mut c = Dd::new(1.0);
        let mut ts = r;
        let mut tc = Dd::new(1.0);
        for i in 1..30 {
            ts = ts.mul(r2).div(Dd::new(-((2 * i) * (2 * i + 1)) as f64));
            tc = tc.mul(r2).div(Dd::new(-((2 * i - 1) * (2 * i)) as f64));
            s = s.add(ts);
            c = c.add(tc);
            if ts.hi.abs() < 1e-36 && tc.hi.abs() < 1e-36 {
                break;
            }
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, s.neg()),
            2 => (s.neg(), c.neg()),
            _ => (c.neg(), s),
        }
    }

    pub fn powi(self, p: i64) -> Dd {
        let mut base = if p < 0 { Dd::new(1.0).div(self) } else { self };
        let mut e = p.unsigned_abs();
        let mut acc = Dd::new(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(self, p: Dd) -> Option<Dd> {
        if p.lo == 0.0 && p.hi.fract() == 0.0 && p.hi.abs() < 64.0 {
            return Some(self.powi(p.hi as i64));
        }
        Some(p.mul(self.ln()?).exp())
    }
}

/// `expr(x, y)` in double-double, `None` outside the real domain.
pub fn eval(e: &Expr, x: &[Dd], y: &[Dd]) -> Option<Dd> {
    Some(match e {
        Expr::Const(c) => Dd::new(*c),
        Expr::X(i) => x[*i],
        Expr::Y(i) => y[*i],
        Expr::Add(a, b) => eval(a, x, y)?.add(eval(b, x, y)?),
        Expr::Sub(a, b) => eval(a, x, y)?.sub(eval(b, x, y)?),
        Expr::Mul(a, b) => eval(a, x, y)?.mul(eval(b, x, y)?),
        Expr::Div(a, b) => eval(a, x, y)?.div(eval(b, x, y)?),
        Expr::Neg(a) => eval(a, x, y)?.neg(),
        Expr::Pow(a, b) => eval(a, x, y)?.pow(eval(b, x, y)?)?,
        Expr::Call(f, a) => {
            let v = eval(a, x, y)?;
            match f {
                Func::Sqrt => v.sqrt()?,
                Func::Exp => v.exp(),
                Func::Log => v.ln()?,
                Func::Sin => v.sin_cos().0,
                Func::Cos => v.sin_cos().1,
                Func::Tan => {
                    let (s, c) = v.sin_cos();
                    s.div(c)
                }
            }
        }
    })
}

/// Tensor-product central difference of `f^2` with steps that are powers of
/// two, so every stencil point is exact in double-double.
fn central(f: &Expr, p: &BasePoint, m: &MultiIndex, h: f64) -> Option<Dd> {
    let n = p.dim();
    let dirs: Vec<(usize, usize)> = m
        .alpha
        .iter()
        .chain(&m.beta)
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(slot, &k)| (slot, k))
        .collect();
    let stencil = |k: usize| -> Vec<(f64, f64)> {
        let mut binom = 1.0;
        (0..=k)
            .map(|j| {
                if j > 0 {
                    binom = binom * (k + 1 - j) as f64 / j as f64;
                }
                (k as f64 / 2.0 - j as f64, if j % 2 == 0 { binom } else { -binom })
            })
            .collect()
    };
    let stencils: Vec<_> = dirs.iter().map(|&(_, k)| stencil(k)).collect();
    let base: Vec<f64> = p.x.iter().chain(&p.y).copied().collect();
    let total: usize = dirs.iter().map(|d| d.1).sum();
    let mut idx = vec![0usize; dirs.len()];
    let mut acc = Dd::new(0.0);
    loop {
        let mut pt: Vec<Dd> = base.iter().map(|&v| Dd::new(v)).collect();
        let mut w = 1.0;
        for (d, &(slot, _)) in dirs.iter().enumerate() {
            let (off, wt) = stencils[d][idx[d]];
            pt[slot] = pt[slot].add(Dd::new(off * h));
            w *= wt;
        }
        let v = eval(f, &pt[..n], &pt[n..])?;
        acc = acc.add(v.mul(v).scale(w));
        let mut d = 0;
        loop {
            if d == dirs.len() {
                return Some(acc.scale(h.powi(-(total as i32))));
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

/// `d^|m| F^2 / dx^alpha dy^beta` by double-double central differences with
/// three Richardson levels from the step `2^-7`.
pub fn fd_f2(f: &Expr, p: &BasePoint, m: &MultiIndex) -> Option<f64> {
    const LEVELS: usize = 3;
    let mut h = 2f64.powi(-7);
    let mut table = Vec::with_capacity(LEVELS + 1);
    for _ in 0..=LEVELS {
        table.push(central(f, p, m, h)?);
        h *= 0.5;
    }
    for level in 1..=LEVELS {
        let factor = 4f64.powi(level as i32);
        for i in (level..table.len()).rev() {
            table[i] = table[i].scale(factor).sub(table[i - 1]).scale(1.0 / (factor - 1.0));
        }
    }
    Some(table[LEVELS].to_f64())
}
