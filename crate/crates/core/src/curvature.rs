//! hh- and hv-curvature of the Chern connection, their contractions along
//! the distinguished section, the D-tensor, constant-flag detection and flag
//! curvature.

use serde::{Deserialize, Serialize};

use crate::ad::{BasePoint, Jet, Scalar};
use crate::connection::ConnectionFrame;
use crate::error::{Error, Result};
use crate::metrics::{sum_jets, FinslerStructure};
use crate::report::{CheckReport, Residual, Worst};
use crate::tensor::{flat_index, multi_index, JetTensor, Slot, Symmetry, TensorBlock};

/// Contraction used for the two-index curvature.
pub const R2_CONVENTION: &str = "R^i_j = l^m R^i_mjl l^l";

/// A flag is degenerate when `1 - (l.u)^2 / g(u,u)` falls below this.
pub const EPS_FLAG: f64 = 1e-10;

pub const CONSTANT_FLAG_TOL: f64 = 1e-6;
pub const RECONSTRUCT_TOL: f64 = 1e-5;

/// Curvature jets at one base point.
#[derive(Debug, Clone)]
pub struct CurvatureFrame {
    pub conn: ConnectionFrame,
    pub l_up: Vec<Jet>,
    pub l_down: Vec<Jet>,
    /// `R^i_jkl`
    pub r4: JetTensor,
    /// `R^i_kl = l^j R^i_jkl`
    pub r3: JetTensor,
}

impl CurvatureFrame {
    /// Needs `F^2` to order at least `(2, 4)`.
    pub fn new(conn: ConnectionFrame) -> Result<CurvatureFrame> {
        if conn.metric.f2.x_order() < 2 || conn.metric.f2.y_order() < 4 {
            return Err(Error::Order("the hh-curvature needs F^2 to order (2, 4)".into()));
        }
        let r4 = hh_tensor(&conn)?;
        let l_up = conn.metric.l_up()?;
        let l_down = conn.metric.l_down()?;
        let r3 = contract_first(&r4, &l_up);
        Ok(CurvatureFrame { conn, l_up, l_down, r4, r3 })
    }

    pub fn build(s: &FinslerStructure, p: &BasePoint, x_order: usize, y_order: usize) -> Result<CurvatureFrame> {
        CurvatureFrame::new(ConnectionFrame::build(s, p, x_order, y_order)?)
    }

    pub fn n(&self) -> usize {
        self.conn.n()
    }

    /// `P^i_jkl = -F dGamma^i_jk / dy^l`
    pub fn hv(&self) -> Result<JetTensor> {
        let f = &self.conn.metric.f;
        self.conn.gamma.dy_all()?.map(|j| Ok(-&(f * j)))
    }

    /// `R^i_j = R^i_jl l^l`
    pub fn r2(&self) -> JetTensor {
        let n = self.n();
        JetTensor::from_fn(n, 2, |ij| {
            sum_jets((0..n).map(|l| self.r3.at(&[ij[0], ij[1], l]) * &self.l_up[l]))
        })
    }

    /// `D^i_hkl`, needs `F^2` to order `(2, 6)`.
    pub fn d_tensor(&self) -> Result<JetTensor> {
        d_tensor_of(&self.conn)
    }
}

/// Contract the second slot of a rank-4 tensor with `v`.
fn contract_first(t: &JetTensor, v: &[Jet]) -> JetTensor {
    let n = t.n;
    JetTensor::from_fn(n, 3, |ikl| {
        sum_jets((0..n).map(|j| &v[j] * t.at(&[ikl[0], j, ikl[1], ikl[2]])))
    })
}

fn zero_like(t: &JetTensor) -> Jet {
    t.data[0].constant_like(0.0)
}

/// Writes the `k > l` half of a tensor antisymmetric in its last two slots.
fn mirror_antisymmetric(t: &mut JetTensor) {
    let n = t.n;
    let rank = t.rank;
    for flat in 0..t.data.len() {
        let idx = multi_index(n, rank, flat);
        let (k, l) = (idx[rank - 2], idx[rank - 1]);
        if k > l {
            let mut sw = idx.clone();
            sw.swap(rank - 2, rank - 1);
            t.data[flat] = -&t.data[flat_index(n, &sw)];
        }
    }
}

/// `R^i_jkl = delta_k Gamma^i_jl - delta_l Gamma^i_jk + Gamma^i_hk Gamma^h_jl - Gamma^i_hl Gamma^h_jk`
pub fn hh_tensor(c: &ConnectionFrame) -> Result<JetTensor> {
    let n = c.n();
    let g = &c.gamma;
    // dg[i, j, l, k] = delta_k Gamma^i_jl
    let dg = c.horizontal_all(g)?;
    let zero = zero_like(g);
    let mut r = JetTensor::from_fn(n, 4, |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        if k >= l {
            return zero.clone();
        }
        let quad = sum_jets((0..n).map(|h| {
            &(g.at(&[i, h, k]) * g.at(&[h, j, l])) - &(g.at(&[i, h, l]) * g.at(&[h, j, k]))
        }));
        &(dg.at(&[i, j, l, k]) - dg.at(&[i, j, k, l])) + &quad
    });
    mirror_antisymmetric(&mut r);
    Ok(r)
}

/// `D^i_hkl = y^j d/dy^h [Adot^i_jl|k - Adot^i_jk|l + Adot^s_jl Adot^i_sk - Adot^s_jk Adot^i_sl]`
pub fn d_tensor_of(c: &ConnectionFrame) -> Result<JetTensor> {
    if c.metric.f2.x_order() < 2 || c.metric.f2.y_order() < 6 {
        return Err(Error::Order("the D-tensor needs F^2 to order (2, 6)".into()));
    }
    let n = c.n();
    let ad = c.adot()?;
    // cov[i, j, l, k] = Adot^i_jl|k
    let cov = c.hcov(&ad, &[Slot::Up, Slot::Down, Slot::Down])?;
    let zero = zero_like(&ad);
    let mut bracket = JetTensor::from_fn(n, 4, |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        if k >= l {
            return zero.clone();
        }
        let quad = sum_jets((0..n).map(|s| {
            &(ad.at(&[s, j, l]) * ad.at(&[i, s, k])) - &(ad.at(&[s, j, k]) * ad.at(&[i, s, l]))
        }));
        &(cov.at(&[i, j, l, k]) - cov.at(&[i, j, k, l])) + &quad
    });
    mirror_antisymmetric(&mut bracket);
    let ys = &c.metric.ys;
    // antisymmetry in (k, l) carries over exactly from the bracket
    JetTensor::try_from_fn(n, 4, |idx| {
        let (i, h, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let terms = (0..n)
            .map(|j| Ok(&ys[j] * &bracket.at(&[i, j, k, l]).dy(h)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(sum_jets(terms.into_iter()))
    })
}

fn r4_block(t: &JetTensor, name: &str, idx: &str) -> TensorBlock {
    t.block(name, vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], idx)
        .with_symmetry(Symmetry::Antisymmetric(2, 3))
}

pub fn hh_curvature(s: &FinslerStructure, p: &BasePoint) -> Result<TensorBlock> {
    let c = CurvatureFrame::build(s, p, 2, 4)?;
    Ok(r4_block(&c.r4, "R", "ijkl"))
}

pub fn hv_curvature(s: &FinslerStructure, p: &BasePoint) -> Result<TensorBlock> {
    let c = CurvatureFrame::build(s, p, 2, 4)?;
    Ok(c.hv()?.block("P", vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], "ijkl"))
}

/// `(R^i_kl, R^i_j)`; the second uses [`R2_CONVENTION`].
pub fn contract_r(s: &FinslerStructure, p: &BasePoint) -> Result<(TensorBlock, TensorBlock)> {
    let c = CurvatureFrame::build(s, p, 2, 4)?;
    Ok(blocks_r3_r2(&c))
}

fn blocks_r3_r2(c: &CurvatureFrame) -> (TensorBlock, TensorBlock) {
    (
        c.r3.block("R3", vec![Slot::Up, Slot::Down, Slot::Down], "ikl")
            .with_symmetry(Symmetry::Antisymmetric(1, 2)),
        c.r2().block("R2", vec![Slot::Up, Slot::Down], "ij"),
    )
}

/// `R_kh = R^i_ikh`, `R_k = R^i_ik`, and `R` with `R^i_i = (n - 1) R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Traces {
    /// Row-major `n x n`.
    pub r_kh: Vec<f64>,
    pub r_k: Vec<f64>,
    pub scalar: f64,
}

fn traces_of(c: &CurvatureFrame) -> Traces {
    let n = c.n();
    let r4 = c.r4.values();
    let r3 = c.r3.values();
    let r2 = c.r2().values();
    let mut r_kh = vec![0.0; n * n];
    let mut r_k = vec![0.0; n];
    let mut trace = 0.0;
    for i in 0..n {
        for k in 0..n {
            for h in 0..n {
                r_kh[k * n + h] += r4[flat_index(n, &[i, i, k, h])];
            }
            r_k[k] += r3[flat_index(n, &[i, i, k])];
        }
        trace += r2[i * n + i];
    }
    Traces {
        r_kh,
        r_k,
        scalar: trace / (n as f64 - 1.0),
    }
}

pub fn traces(s: &FinslerStructure, p: &BasePoint) -> Result<Traces> {
    Ok(traces_of(&CurvatureFrame::build(s, p, 2, 4)?))
}

pub fn d_tensor(s: &FinslerStructure, p: &BasePoint) -> Result<TensorBlock> {
    let c = ConnectionFrame::build(s, p, 2, 6)?;
    Ok(r4_block(&d_tensor_of(&c)?, "D", "ihkl"))
}

/// Everything the curvature module computes at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    pub r4: TensorBlock,
    pub p4: TensorBlock,
    pub r3: TensorBlock,
    pub r2: TensorBlock,
    pub traces: Traces,
    pub d4: TensorBlock,
    pub base: BasePoint,
    pub convention: &'static str,
}

pub fn curvature_data(s: &FinslerStructure, p: &BasePoint) -> Result<CurvatureData> {
    let c = CurvatureFrame::build(s, p, 2, 6)?;
    let (r3, r2) = blocks_r3_r2(&c);
    Ok(CurvatureData {
        r4: r4_block(&c.r4, "R", "ijkl"),
        p4: c.hv()?.block("P", vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], "ijkl"),
        r3,
        r2,
        traces: traces_of(&c),
        d4: r4_block(&c.d_tensor()?, "D", "ihkl"),
        base: p.clone(),
        convention: R2_CONVENTION,
    })
}

/// Per-point values behind [`reconstruct_hh`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionSample {
    /// `|R^i_hkl - dR^i_kl/dy^h - D^i_hkl|`
    pub literal: (f64, Vec<usize>),
    /// Same identity with the y-contraction `y^j R^i_jkl` in place of `R^i_kl`.
    pub y_contracted: (f64, Vec<usize>),
}

pub fn reconstruction_sample(c: &CurvatureFrame, d: &JetTensor) -> Result<ReconstructionSample> {
    let n = c.n();
    let dr3 = c.r3.dy_all()?; // [i, k, l, h]
    let f = &c.conn.metric.f;
    let r3y = c.r3.map(|j| Ok(f * j))?;
    let dr3y = r3y.dy_all()?;
    let mut literal = (0.0, vec![0; 4]);
    let mut y_contracted = (0.0, vec![0; 4]);
    for flat in 0..n.pow(4) {
        let idx = multi_index(n, 4, flat);
        let (i, h, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let r = c.r4.data[flat].value();
        let dv = d.data[flat].value();
        let a = (r - dr3.at(&[i, k, l, h]).value() - dv).abs();
        let b = (r - dr3y.at(&[i, k, l, h]).value() - dv).abs();
        if a > literal.0 || a.is_nan() {
            literal = (a, idx.clone());
        }
        if b > y_contracted.0 || b.is_nan() {
            y_contracted = (b, idx);
        }
    }
    Ok(ReconstructionSample { literal, y_contracted })
}

/// Sup-residual of `R^i_hkl = d(y^j R^i_jkl)/dy^h + D^i_hkl` over the samples.
pub fn reconstruct_hh(s: &FinslerStructure, samples: &[BasePoint]) -> Result<CheckReport> {
    let rows = samples
        .iter()
        .map(|p| {
            let c = CurvatureFrame::build(s, p, 2, 6)?;
            let d = c.d_tensor()?;
            reconstruction_sample(&c, &d)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reconstruction_report(&rows, RECONSTRUCT_TOL))
}

pub fn reconstruction_report(rows: &[ReconstructionSample], tol: f64) -> CheckReport {
    let mut res = Residual::new(
        "reconstruction",
        tol,
        "sup |R^i_hkl - d(y^j R^i_jkl)/dy^h - D^i_hkl|",
    );
    let mut literal = 0.0f64;
    for (k, r) in rows.iter().enumerate() {
        res.observe(r.y_contracted.0, k, &r.y_contracted.1);
        literal = literal.max(r.literal.0);
    }
    res.finish_upper();
    let mut report = CheckReport::new("reconstruction", rows.len());
    report.notes.push(format!(
        "with l^j R^i_jkl in place of y^j R^i_jkl the residual is {literal:.3e}; that reading mixes \
         homogeneity degrees -1 and 0 in y"
    ));
    report.residuals = vec![res];
    report
}

/// Least-squares fit of `R^i_kl = lambda (delta^i_k l_l - delta^i_l l_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagFit {
    pub lambda: f64,
    /// Sup-norm misfit over all components and samples.
    pub residual: f64,
    pub worst: Worst,
    pub degenerate: bool,
}

/// `(R^i_kl, l_i)` values at one point, the input of [`fit_constant_flag`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlagSample {
    pub n: usize,
    pub r3: Vec<f64>,
    pub l_down: Vec<f64>,
}

impl FlagSample {
    pub fn of(c: &CurvatureFrame) -> FlagSample {
        FlagSample {
            n: c.n(),
            r3: c.r3.values(),
            l_down: c.l_down.iter().map(Scalar::value).collect(),
        }
    }

    fn basis(&self, i: usize, k: usize, l: usize) -> f64 {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        d(i, k) * self.l_down[l] - d(i, l) * self.l_down[k]
    }
}

pub fn fit_constant_flag(samples: &[FlagSample]) -> Result<FlagFit> {
    if samples.len() < 2 {
        return Err(Error::Config("the constant-flag fit needs at least two samples".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for s in samples {
        let n = s.n;
        for flat in 0..n * n * n {
            let idx = multi_index(n, 3, flat);
            let e = s.basis(idx[0], idx[1], idx[2]);
            num += s.r3[flat] * e;
            den += e * e;
        }
    }
    let degenerate = !(den > 1e-300);
    let lambda = if degenerate { 0.0 } else { num / den };
    let mut residual = 0.0f64;
    let mut worst = Worst::at(0);
    for (k, s) in samples.iter().enumerate() {
        let n = s.n;
        for flat in 0..n * n * n {
            let idx = multi_index(n, 3, flat);
            let e = if degenerate { 0.0 } else { s.basis(idx[0], idx[1], idx[2]) };
            let r = (s.r3[flat] - lambda * e).abs();
            if r > residual || r.is_nan() {
                residual = r;
                worst = Worst { sample: k, index: idx };
            }
        }
    }
    Ok(FlagFit { lambda, residual, worst, degenerate })
}

pub fn constant_flag_fit(s: &FinslerStructure, samples: &[BasePoint]) -> Result<FlagFit> {
    let rows = samples
        .iter()
        .map(|p| Ok(FlagSample::of(&CurvatureFrame::build(s, p, 2, 4)?)))
        .collect::<Result<Vec<_>>>()?;
    fit_constant_flag(&rows)
}

/// Values needed to evaluate flag curvature at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagData {
    pub n: usize,
    pub g: Vec<f64>,
    pub l_down: Vec<f64>,
    pub r2: Vec<f64>,
}

impl FlagData {
    pub fn of(c: &CurvatureFrame) -> FlagData {
        FlagData {
            n: c.n(),
            g: c.conn.metric.g.values(),
            l_down: c.l_down.iter().map(Scalar::value).collect(),
            r2: c.r2().values(),
        }
    }

    /// `K = R_ik u^i u^k / (g(u,u) - (l_i u^i)^2)` with `R_ik = g_ij R^j_k`.
    pub fn flag_curvature(&self, u: &[f64]) -> Result<f64> {
        let n = self.n;
        if u.len() != n {
            return Err(Error::Config(format!("flag vector of length {} in dimension {n}", u.len())));
        }
        let mut guu = 0.0;
        let mut lu = 0.0;
        let mut num = 0.0;
        for i in 0..n {
            lu += self.l_down[i] * u[i];
            for j in 0..n {
                guu += self.g[i * n + j] * u[i] * u[j];
                for k in 0..n {
                    num += self.g[i * n + j] * self.r2[j * n + k] * u[i] * u[k];
                }
            }
        }
        if !(guu > 0.0) {
            return Err(Error::DegenerateFlag("flag vector has zero length".into()));
        }
        let den = guu - lu * lu;
        if !(den / guu > EPS_FLAG) {
            return Err(Error::DegenerateFlag("flag vector parallel to the pole y".into()));
        }
        Ok(num / den)
    }
}

pub fn flag_curvature(s: &FinslerStructure, p: &BasePoint, u: &[f64]) -> Result<f64> {
    FlagData::of(&CurvatureFrame::build(s, p, 2, 4)?).flag_curvature(u)
}
