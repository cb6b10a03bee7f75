//! Graded monomial tables shared by every jet of a given dimension.
//!
//! Monomials in `n` variables are enumerated by total degree, so the set of
//! monomials of degree `<= k` is always a prefix of the enumeration. Truncating
//! a jet to a lower order is therefore a prefix copy, and the product table for
//! a lower order is a prefix of the full table (it is sorted by result index).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Highest per-block order (x-block or y-block) the tables are built for.
pub const MAX_JET_ORDER: usize = 10;

/// Highest supported dimension.
pub const MAX_DIM: usize = 6;

const NONE: u32 = u32::MAX;

#[derive(Debug)]
pub(crate) struct Basis {
    pub n: usize,
    exps: Vec<Vec<u8>>,
    /// `counts[k]` is the number of monomials of degree `<= k`.
    counts: Vec<usize>,
    /// `succ[m * n + v]` is the index of `m + e_v`, or `NONE` past `MAX_JET_ORDER`.
    succ: Vec<u32>,
    /// `(a, b, c)` with `m_a + m_b = m_c`, sorted by `c`.
    pairs: Vec<(u32, u32, u32)>,
    /// `pair_end[k]` is the number of triples whose result has degree `<= k`.
    pair_end: Vec<usize>,
    /// `m!` for each monomial.
    factorials: Vec<f64>,
}

impl Basis {
    fn build(n: usize) -> Basis {
        let mut exps: Vec<Vec<u8>> = Vec::new();
        let mut counts = Vec::with_capacity(MAX_JET_ORDER + 1);
        for deg in 0..=MAX_JET_ORDER {
            let mut cur = vec![0u8; n];
            push_degree(&mut exps, &mut cur, 0, deg);
            counts.push(exps.len());
        }
        let lookup: HashMap<&[u8], u32> = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_slice(), i as u32))
            .collect();

        let mut succ = vec![NONE; exps.len() * n];
        for (i, e) in exps.iter().enumerate() {
            for v in 0..n {
                let mut f = e.clone();
                f[v] += 1;
                if let Some(&j) = lookup.get(f.as_slice()) {
                    succ[i * n + v] = j;
                }
            }
        }

        let degree = |e: &[u8]| e.iter().map(|&d| d as usize).sum::<usize>();
        let mut pairs = Vec::new();
        let mut sum = vec![0u8; n];
        for (a, ea) in exps.iter().enumerate() {
            let da = degree(ea);
            for (b, eb) in exps.iter().enumerate() {
                if da + degree(eb) > MAX_JET_ORDER {
                    // enumeration is graded; later b only grow in degree
                    break;
                }
                for v in 0..n {
                    sum[v] = ea[v] + eb[v];
                }
                let c = lookup[sum.as_slice()];
                pairs.push((a as u32, b as u32, c));
            }
        }
        pairs.sort_by_key(|&(a, b, c)| (c, a, b));
        let pair_end = counts
            .iter()
            .map(|&cnt| pairs.partition_point(|&(_, _, c)| (c as usize) < cnt))
            .collect();

        let factorials = exps
            .iter()
            .map(|e| e.iter().map(|&d| factorial(d as usize)).product())
            .collect();

        Basis {
            n,
            exps,
            counts,
            succ,
            pairs,
            pair_end,
            factorials,
        }
    }

    #[inline]
    pub fn count(&self, order: usize) -> usize {
        self.counts[order]
    }

    #[inline]
    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.exps[idx]
    }

    #[inline]
    pub fn successor(&self, idx: usize, var: usize) -> Option<usize> {
        let s = self.succ[idx * self.n + var];
        (s != NONE).then_some(s as usize)
    }

    #[inline]
    pub fn pairs(&self, order: usize) -> &[(u32, u32, u32)] {
        &self.pairs[..self.pair_end[order]]
    }

    #[inline]
    pub fn factorial(&self, idx: usize) -> f64 {
        self.factorials[idx]
    }

    /// Index of the monomial with the given exponents, if it is tabulated.
    pub fn index_of(&self, exps: &[usize]) -> Option<usize> {
        if exps.len() != self.n {
            return None;
        }
        let mut idx = 0usize;
        for (v, &d) in exps.iter().enumerate() {
            for _ in 0..d {
                idx = self.successor(idx, v)?;
            }
        }
        Some(idx)
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, var: usize, remaining: usize) {
    let n = cur.len();
    if var + 1 == n {
        cur[var] = remaining as u8;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    for d in (0..=remaining).rev() {
        cur[var] = d as u8;
        push_degree(out, cur, var + 1, remaining - d);
    }
    cur[var] = 0;
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Basis>>>> = OnceLock::new();

pub(crate) fn basis(n: usize) -> Arc<Basis> {
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(Basis::build(n)))
        .clone()
}
