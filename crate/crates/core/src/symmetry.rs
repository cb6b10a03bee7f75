//! Horizontal covariant derivatives of curvature tensors, the symmetric-space
//! certificate, Eqs. (1)-(4), the commutation formula and the theorem audit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ad::{BasePoint, EngineConfig, Jet, Scalar, FD_RICHARDSON_LEVELS};
use crate::connection::{classify_samples, connection_sample, ConnectionFrame, ConnectionSample};
use crate::curvature::{
    d_tensor_of, fit_constant_flag, reconstruction_report, reconstruction_sample, CurvatureFrame, FlagData,
    FlagFit, FlagSample, ReconstructionSample,
};
use crate::error::{Error, Result};
use crate::metrics::{sum_jets, FinslerStructure};
use crate::report::{AuditRow, CheckReport, Condition, DerivativeMode, Residual, Verdict};
use crate::tensor::{flat_index, multi_index, JetTensor, Slot, TensorBlock};
use crate::tolerance::Tolerances;

/// Step of the horizontal finite difference used for `nabla D` when the jet
/// order is too small.
pub const FD_HORIZONTAL_STEP: f64 = 1e-4;

/// Smallest y-order at which `nabla D` is taken from jets.
pub const AD_EQ2_Y_ORDER: usize = 7;

/// Horizontal covariant derivative of a tensor built on the frame `c`; the
/// derivative slot is appended last. `valence` gives the slot kinds of `t`.
pub fn hcov(c: &ConnectionFrame, t: &JetTensor, valence: &[Slot]) -> Result<TensorBlock> {
    let cov = c.hcov(t, valence)?;
    let mut val = valence.to_vec();
    val.push(Slot::Down);
    let idx: String = "abcdefgh".chars().take(val.len()).collect();
    Ok(cov.block("cov", val, &idx))
}

/// `(max |t|, argmax)` over the values of a jet tensor.
fn sup(t: &JetTensor) -> (f64, Vec<usize>) {
    sup_values(t.n, t.rank, &t.values())
}

fn sup_values(n: usize, rank: usize, v: &[f64]) -> (f64, Vec<usize>) {
    let mut best = (0.0f64, vec![0; rank]);
    for (flat, x) in v.iter().enumerate() {
        if x.abs() > best.0 || x.is_nan() {
            best = (if x.is_nan() { f64::MAX } else { x.abs() }, multi_index(n, rank, flat));
        }
    }
    best
}

/// Everything the checks need from one sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointAnalysis {
    pub connection: ConnectionSample,
    pub flag: FlagSample,
    pub flag_data: FlagData,
    /// `max |R^i_jkl + R^i_jlk|`
    pub antisymmetry: f64,
    /// `max |P^i_jkl|`
    pub hv_max: f64,
    pub reconstruction: ReconstructionSample,
    /// `nabla_p R^i_jkl`, index `[i, j, k, l, p]`
    pub defn1: (f64, Vec<usize>),
    /// `nabla_h R^i_kl`, index `[i, k, l, h]`
    pub eq1: (f64, Vec<usize>),
    /// `nabla_h R^i_j`
    pub eq1_two_index: (f64, Vec<usize>),
    /// `nabla` of `R_kh`, `R_k` and `R`
    pub traces_cov: f64,
    /// `nabla_p D^i_hkl`, index `[i, h, k, l, p]`
    pub eq2: (f64, Vec<usize>),
    pub eq2_mode: DerivativeMode,
    /// Commutation formula as displayed, index `[i, k, l, h, p]`.
    pub eq3: (f64, Vec<usize>),
    /// Commutation formula with the sign of the `Adot` term reversed.
    pub eq3_flipped: (f64, Vec<usize>),
    /// Largest single `(dR^i_kl/dy^m) Adot^m_hp` term.
    pub eq3_adot_term: f64,
    /// Largest single `R Gamma^._..h` term.
    pub eq3_gamma_term: f64,
    /// Condition (ii), index `[i, k, l, h, p]`.
    pub eq4: (f64, Vec<usize>),
}

/// Values of a horizontal covariant derivative from values of `t`, of
/// `delta t` (slot `p` last) and of `Gamma`.
fn cov_from_values(n: usize, valence: &[Slot], t: &[f64], delta: &[f64], gamma: &[f64]) -> Vec<f64> {
    let rank = valence.len();
    let g = |i: usize, j: usize, k: usize| gamma[(i * n + j) * n + k];
    (0..n.pow(rank as u32 + 1))
        .map(|flat| {
            let idx = multi_index(n, rank + 1, flat);
            let (head, p) = (&idx[..rank], idx[rank]);
            let mut out = delta[flat];
            let mut key = head.to_vec();
            for (slot, kind) in valence.iter().enumerate() {
                let orig = head[slot];
                for m in 0..n {
                    key[slot] = m;
                    let v = t[flat_index(n, &key)];
                    match kind {
                        Slot::Up => out += g(orig, m, p) * v,
                        Slot::Down => out -= g(m, orig, p) * v,
                    }
                }
                key[slot] = orig;
            }
            out
        })
        .collect()
}

/// `delta D / delta x^p` by Richardson-extrapolated central differences along
/// the horizontal lift `t -> (x + t e_p, y - t N_p)`.
fn delta_d_fd(s: &FinslerStructure, c: &ConnectionFrame) -> Result<Vec<f64>> {
    let n = c.n();
    let base = &*c.metric.base;
    let n_val = c.nonlinear.values();
    let d_at = |p: usize, t: f64| -> Result<Vec<f64>> {
        let x: Vec<f64> = (0..n).map(|i| base.x[i] + if i == p { t } else { 0.0 }).collect();
        let y: Vec<f64> = (0..n).map(|m| base.y[m] - t * n_val[m * n + p]).collect();
        let q = BasePoint::new(x, y)?;
        Ok(d_tensor_of(&ConnectionFrame::build(s, &q, 2, 6)?)?.values())
    };
    let size = n.pow(4);
    let mut out = vec![0.0; size * n];
    for p in 0..n {
        // table[m] = central difference with step h / 2^m
        let mut table: Vec<Vec<f64>> = Vec::with_capacity(FD_RICHARDSON_LEVELS);
        for m in 0..FD_RICHARDSON_LEVELS {
            let h = FD_HORIZONTAL_STEP / f64::powi(2.0, m as i32);
            let plus = d_at(p, h)?;
            let minus = d_at(p, -h)?;
            table.push(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect());
        }
        for level in 1..FD_RICHARDSON_LEVELS {
            let factor = f64::powi(4.0, level as i32);
            for m in (level..FD_RICHARDSON_LEVELS).rev() {
                let prev = table[m - 1].clone();
                for (v, w) in table[m].iter_mut().zip(&prev) {
                    *v = (factor * *v - w) / (factor - 1.0);
                }
            }
        }
        let best = &table[FD_RICHARDSON_LEVELS - 1];
        for (flat, v) in best.iter().enumerate() {
            out[flat * n + p] = *v;
        }
    }
    Ok(out)
}

/// `nabla_p D^i_hkl` values and the mode used.
fn nabla_d(s: &FinslerStructure, c: &ConnectionFrame) -> Result<(Vec<f64>, DerivativeMode)> {
    let valence = [Slot::Up, Slot::Down, Slot::Down, Slot::Down];
    if c.metric.f2.y_order() >= AD_EQ2_Y_ORDER {
        let d = d_tensor_of(c)?;
        return Ok((c.hcov(&d, &valence)?.values(), DerivativeMode::Jet));
    }
    let d = d_tensor_of(c)?.values();
    let delta = delta_d_fd(s, c)?;
    Ok((
        cov_from_values(c.n(), &valence, &d, &delta, &c.gamma.values()),
        DerivativeMode::FiniteDifference,
    ))
}

fn rank0(j: Jet) -> JetTensor {
    JetTensor { n: j.dim(), rank: 0, data: vec![j] }
}

/// Computes every per-point quantity at jet orders `engine` (at least `(3, 6)`).
pub fn analyze_point(s: &FinslerStructure, p: &BasePoint, engine: EngineConfig) -> Result<PointAnalysis> {
    if engine.x_order < 3 || engine.y_order < 6 {
        return Err(Error::Order(format!(
            "the symmetry checks need jet orders of at least (3, 6), got ({}, {})",
            engine.x_order, engine.y_order
        )));
    }
    let cf = CurvatureFrame::build(s, p, engine.x_order, engine.y_order)?;
    let c = &cf.conn;
    let n = c.n();
    let connection = connection_sample(c)?;

    let r4 = cf.r4.values();
    let r3 = cf.r3.values();
    let mut antisymmetry = 0.0f64;
    for flat in 0..r4.len() {
        let idx = multi_index(n, 4, flat);
        let sw = flat_index(n, &[idx[0], idx[1], idx[3], idx[2]]);
        antisymmetry = antisymmetry.max((r4[flat] + r4[sw]).abs());
    }
    for flat in 0..r3.len() {
        let idx = multi_index(n, 3, flat);
        let sw = flat_index(n, &[idx[0], idx[2], idx[1]]);
        antisymmetry = antisymmetry.max((r3[flat] + r3[sw]).abs());
    }
    let hv_max = sup(&cf.hv()?).0;

    let d = cf.d_tensor()?;
    let reconstruction = reconstruction_sample(&cf, &d)?;

    let up = Slot::Up;
    let dn = Slot::Down;
    let defn1 = sup(&c.hcov(&cf.r4, &[up, dn, dn, dn])?);
    let cov_r3 = c.hcov(&cf.r3, &[up, dn, dn])?;
    let eq1 = sup(&cov_r3);
    let r2 = cf.r2();
    let eq1_two_index = sup(&c.hcov(&r2, &[up, dn])?);

    let r_kh = JetTensor::from_fn(n, 2, |kh| sum_jets((0..n).map(|i| cf.r4.at(&[i, i, kh[0], kh[1]]).clone())));
    let r_k = JetTensor::from_fn(n, 1, |k| sum_jets((0..n).map(|i| cf.r3.at(&[i, i, k[0]]).clone())));
    let scalar = rank0(sum_jets((0..n).map(|i| r2.at(&[i, i]).clone())).scale(1.0 / (n as f64 - 1.0)));
    let traces_cov = [
        sup(&c.hcov(&r_kh, &[dn, dn])?).0,
        sup(&c.hcov(&r_k, &[dn])?).0,
        sup(&c.hcov(&scalar, &[])?).0,
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let (nd, eq2_mode) = nabla_d(s, c)?;
    let eq2 = sup_values(n, 5, &nd);

    // commutation formula, both sides independently
    let lhs1 = cov_r3.dy_all()?; // [i, k, l, p, h]
    let dr3 = cf.r3.dy_all()?; // [i, k, l, h]
    let lhs2 = c.hcov(&dr3, &[up, dn, dn, dn])?; // [i, k, l, h, p]
    let adot = c.adot()?.values();
    let gy = c.gamma_vertical()?.values(); // [i, m, p, h]
    let dr3v = dr3.values();
    let (lhs1, lhs2) = (lhs1.values(), lhs2.values());
    let at3 = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let at4 = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let size = n.pow(5);
    let mut e3 = vec![0.0; size];
    let mut e3f = vec![0.0; size];
    let mut e4 = vec![0.0; size];
    let mut eq3_adot_term = 0.0f64;
    let mut eq3_gamma_term = 0.0f64;
    for flat in 0..size {
        let ix = multi_index(n, 5, flat);
        let (i, k, l, h, pp) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        let lhs = lhs1[flat_index(n, &[i, k, l, pp, h])] - lhs2[flat];
        let mut t_adot = 0.0;
        let mut t_gamma = 0.0;
        for m in 0..n {
            let a = dr3v[at4(i, k, l, m)] * adot[at3(m, h, pp)];
            let g1 = r3[at3(m, k, l)] * gy[at4(i, m, pp, h)];
            let g2 = r3[at3(i, m, l)] * gy[at4(m, k, pp, h)];
            let g3 = r3[at3(i, k, m)] * gy[at4(m, l, pp, h)];
            eq3_adot_term = eq3_adot_term.max(a.abs());
            eq3_gamma_term = eq3_gamma_term.max(g1.abs()).max(g2.abs()).max(g3.abs());
            t_adot += a;
            t_gamma += g1 - g2 - g3;
        }
        e4[flat] = t_adot + t_gamma;
        e3[flat] = lhs - (t_adot + t_gamma);
        e3f[flat] = lhs - (-t_adot + t_gamma);
    }

    Ok(PointAnalysis {
        connection,
        flag: FlagSample::of(&cf),
        flag_data: FlagData::of(&cf),
        antisymmetry,
        hv_max,
        reconstruction,
        defn1,
        eq1,
        eq1_two_index,
        traces_cov,
        eq2,
        eq2_mode,
        eq3: sup_values(n, 5, &e3),
        eq3_flipped: sup_values(n, 5, &e3f),
        eq3_adot_term,
        eq3_gamma_term,
        eq4: sup_values(n, 5, &e4),
    })
}

/// [`analyze_point`] over all samples, in parallel; results keep sample order.
pub fn analyze(s: &FinslerStructure, samples: &[BasePoint], engine: EngineConfig) -> Result<Vec<PointAnalysis>> {
    samples.par_iter().map(|p| analyze_point(s, p, engine)).collect()
}

fn residual_over(
    name: &str,
    tol: f64,
    description: &str,
    rows: &[PointAnalysis],
    pick: impl Fn(&PointAnalysis) -> &(f64, Vec<usize>),
) -> Residual {
    let mut r = Residual::new(name, tol, description);
    for (k, a) in rows.iter().enumerate() {
        let (v, idx) = pick(a);
        r.observe(*v, k, idx);
    }
    r.finish_upper();
    r
}

pub fn classification_report(rows: &[PointAnalysis], tol: &Tolerances) -> Result<CheckReport> {
    let samples: Vec<ConnectionSample> = rows.iter().map(|a| a.connection.clone()).collect();
    classify_samples(&samples, tol.into())
}

/// Antisymmetry, Berwald / hv agreement and the reconstruction identity.
pub fn curvature_report(rows: &[PointAnalysis], tol: &Tolerances) -> CheckReport {
    let recon: Vec<ReconstructionSample> = rows.iter().map(|a| a.reconstruction.clone()).collect();
    let mut report = reconstruction_report(&recon, tol.reconstruction);
    report.check = "curvature".into();
    let mut anti = Residual::new("antisymmetry", tol.antisymmetry, "sup |R^i_jkl + R^i_jlk| and |R^i_kl + R^i_lk|");
    let mut hv = Residual::new("hv_vanishes", tol.classify, "sup |P^i_jkl|");
    let mut gy = 0.0f64;
    for (k, a) in rows.iter().enumerate() {
        anti.observe(a.antisymmetry, k, &[]);
        hv.observe(a.hv_max, k, &[]);
        gy = gy.max(a.connection.gamma_y_max);
    }
    anti.finish_upper();
    let berwald = Condition::upper("berwald", gy, tol.classify);
    let p_zero = Condition::upper("hv_vanishes", hv.value, tol.classify);
    let mut agree = Residual::new(
        "berwald_iff_hv_vanishes",
        0.5,
        "the Berwald verdict and the P = 0 verdict coincide (0 when they agree)",
    );
    agree.set(if berwald.holds == p_zero.holds { 0.0 } else { 1.0 }, Default::default());
    agree.finish_upper();
    report.residuals.insert(0, anti);
    report.residuals.push(agree);
    report.conditions = vec![berwald, p_zero];
    report
}

/// The constant-flag fit and, when it passes, agreement of flag curvature
/// with the fitted value on the given flags `(sample, u)`.
pub fn constant_flag_report(
    rows: &[PointAnalysis],
    flags: &[(usize, Vec<f64>)],
    tol: &Tolerances,
) -> Result<(CheckReport, FlagFit)> {
    let samples: Vec<FlagSample> = rows.iter().map(|a| a.flag.clone()).collect();
    let fit = fit_constant_flag(&samples)?;
    let mut report = CheckReport::new("constant_flag", rows.len());
    let mut r = Residual::new(
        "constant_flag",
        tol.constant_flag,
        "sup |R^i_kl - lambda (delta^i_k l_l - delta^i_l l_k)| at the least-squares lambda",
    );
    r.set(fit.residual, fit.worst.clone());
    r.finish_upper();
    let mut coherence = Residual::new(
        "flag_coherence",
        tol.flag_coherence,
        "sup |K(p, u) - lambda| over random flags",
    );
    if r.passed() {
        for (sample, u) in flags {
            let k = rows[*sample].flag_data.flag_curvature(u)?;
            coherence.observe((k - fit.lambda).abs(), *sample, &[]);
        }
        coherence.finish_upper();
    } else {
        coherence.verdict = Verdict::Vacuous;
    }
    report.notes.push(format!("lambda = {:.12e}", fit.lambda));
    if fit.degenerate {
        report.notes.push("degenerate design: lambda set to 0".into());
    }
    report.notes.push(format!("R^i_j convention: {}", crate::curvature::R2_CONVENTION));
    report.residuals = vec![r, coherence];
    Ok((report, fit))
}

/// Def. 1 and Eqs. (1)-(4) over the analysed samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub residual_defn1: f64,
    pub residual_eq1: f64,
    pub residual_eq2: f64,
    pub residual_eq3: f64,
    pub residual_eq4: f64,
    pub symmetric: bool,
    pub eq2_mode: DerivativeMode,
    /// Largest single term on the right of the commutation formula.
    pub eq3_adot_term: f64,
    pub eq3_gamma_term: f64,
    pub report: CheckReport,
}

pub fn symmetry_report(rows: &[PointAnalysis], tol: &Tolerances) -> SymmetryReport {
    let defn1 = residual_over("defn1", tol.defn1, "sup |nabla_p R^i_jkl|", rows, |a| &a.defn1);
    let eq1 = residual_over("eq1", tol.eq1, "sup |nabla_h R^i_kl|", rows, |a| &a.eq1);
    let eq1b = residual_over("eq1_two_index", tol.eq1, "sup |nabla_h R^i_j|", rows, |a| &a.eq1_two_index);
    let mut traces = Residual::new("contracted_traces", tol.eq1, "sup |nabla| of R_kh, R_k and R");
    for (k, a) in rows.iter().enumerate() {
        traces.observe(a.traces_cov, k, &[]);
    }
    traces.finish_upper();
    let mut eq2 = residual_over("eq2", tol.eq2, "sup |nabla_p D^i_hkl|", rows, |a| &a.eq2);
    let eq2_mode = if rows.iter().any(|a| a.eq2_mode == DerivativeMode::FiniteDifference) {
        DerivativeMode::FiniteDifference
    } else {
        DerivativeMode::Jet
    };
    eq2.mode = eq2_mode;
    let eq3 = residual_over(
        "eq3",
        tol.eq3,
        "commutation formula as displayed: sup |LHS - RHS|",
        rows,
        |a| &a.eq3,
    );
    let eq3f = residual_over(
        "eq3_adot_sign_reversed",
        tol.eq3,
        "commutation formula with -(dR^i_kl/dy^m) Adot^m_hp: sup |LHS - RHS|",
        rows,
        |a| &a.eq3_flipped,
    );
    let eq4 = residual_over("eq4", tol.eq4, "sup of condition (ii)", rows, |a| &a.eq4);
    let eq3_adot_term = rows.iter().map(|a| a.eq3_adot_term).fold(0.0, f64::max);
    let eq3_gamma_term = rows.iter().map(|a| a.eq3_gamma_term).fold(0.0, f64::max);

    let mut report = CheckReport::new("symmetry", rows.len());
    if !eq3.passed() && eq3f.passed() {
        report.notes.push(
            "the commutation formula holds with the opposite sign of the (dR^i_kl/dy^m) Adot^m_hp term".into(),
        );
    }
    if eq2_mode == DerivativeMode::FiniteDifference {
        report.notes.push(format!(
            "eq2: delta/delta x of D by central differences (step {FD_HORIZONTAL_STEP:e}, {FD_RICHARDSON_LEVELS} Richardson levels)"
        ));
    }
    report.notes.push("symmetry is certified at the sampled points only".into());
    let out = SymmetryReport {
        residual_defn1: defn1.value,
        residual_eq1: eq1.value,
        residual_eq2: eq2.value,
        residual_eq3: eq3.value,
        residual_eq4: eq4.value,
        symmetric: defn1.passed(),
        eq2_mode,
        eq3_adot_term,
        eq3_gamma_term,
        report: CheckReport::new("symmetry", 0),
    };
    report.residuals = vec![defn1, eq1, eq1b, traces, eq2, eq3, eq3f, eq4];
    SymmetryReport { report, ..out }
}

/// Sampled certificate of Def. 1 together with Eqs. (1)-(4).
pub fn certify_symmetric(s: &FinslerStructure, samples: &[BasePoint]) -> Result<SymmetryReport> {
    let rows = analyze(s, samples, EngineConfig::default())?;
    Ok(symmetry_report(&rows, &Tolerances::default()))
}

pub fn check_eq1(s: &FinslerStructure, samples: &[BasePoint]) -> Result<f64> {
    Ok(certify_symmetric(s, samples)?.residual_eq1)
}

pub fn check_eq2(s: &FinslerStructure, samples: &[BasePoint]) -> Result<(f64, DerivativeMode)> {
    let r = certify_symmetric(s, samples)?;
    Ok((r.residual_eq2, r.eq2_mode))
}

pub fn commutation_residual(s: &FinslerStructure, samples: &[BasePoint]) -> Result<f64> {
    Ok(certify_symmetric(s, samples)?.residual_eq3)
}

pub fn check_eq4(s: &FinslerStructure, samples: &[BasePoint]) -> Result<f64> {
    Ok(certify_symmetric(s, samples)?.residual_eq4)
}

/// Sample-set facts feeding the theorem audit.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditInputs {
    pub n: usize,
    pub berwald: Condition,
    pub landsberg: Condition,
    pub constant_flag: Condition,
    pub symmetric: Condition,
    pub eq1: Condition,
    pub eq1_two_index: Condition,
    pub contracted_traces: Condition,
    pub eq2: Condition,
    pub eq4: Condition,
}

impl AuditInputs {
    pub fn gather(classification: &CheckReport, flag: &CheckReport, sym: &SymmetryReport, n: usize) -> Result<AuditInputs> {
        let cond = |r: &CheckReport, name: &str| {
            r.condition(name)
                .cloned()
                .ok_or_else(|| Error::Config(format!("missing condition {name}")))
        };
        let res = |r: &CheckReport, name: &str| {
            r.residual(name)
                .map(|x| Condition::upper(name, x.value, x.tolerance))
                .ok_or_else(|| Error::Config(format!("missing residual {name}")))
        };
        let s = &sym.report;
        let mut symmetric = res(s, "defn1")?;
        symmetric.name = "symmetric".into();
        Ok(AuditInputs {
            n,
            berwald: cond(classification, "berwald")?,
            landsberg: cond(classification, "landsberg")?,
            constant_flag: res(flag, "constant_flag")?,
            symmetric,
            eq1: res(s, "eq1")?,
            eq1_two_index: res(s, "eq1_two_index")?,
            contracted_traces: res(s, "contracted_traces")?,
            eq2: res(s, "eq2")?,
            eq4: res(s, "eq4")?,
        })
    }
}

/// Theorems 1-3 and Corollaries 1-3 as implications between sampled verdicts.
pub fn theorem_audit(inp: &AuditInputs) -> CheckReport {
    let dim3 = Condition::fact("dimension_at_least_3", inp.n >= 3);
    let scaled_eq1 = Condition::upper(
        "eq1_at_sqrt_n_tolerance",
        inp.eq1.residual,
        inp.eq1.tolerance.max(inp.symmetric.tolerance) * (inp.n as f64).sqrt(),
    );
    let sym = &inp.symmetric;
    let rows = vec![
        AuditRow::evaluate(
            "theorem1_forward",
            vec![inp.eq2.clone(), sym.clone()],
            vec![inp.eq1.clone(), inp.eq4.clone()],
        ),
        AuditRow::evaluate(
            "theorem1_converse",
            vec![inp.eq2.clone(), inp.eq1.clone(), inp.eq4.clone()],
            vec![sym.clone()],
        ),
        AuditRow::evaluate(
            "corollary1_forward",
            vec![inp.landsberg.clone(), sym.clone()],
            vec![inp.eq1.clone(), inp.eq4.clone()],
        ),
        AuditRow::evaluate(
            "corollary1_converse",
            vec![inp.landsberg.clone(), inp.eq1.clone(), inp.eq4.clone()],
            vec![sym.clone()],
        ),
        AuditRow::evaluate("theorem2", vec![inp.berwald.clone(), inp.eq1.clone()], vec![sym.clone()]),
        AuditRow::evaluate(
            "theorem3",
            vec![inp.constant_flag.clone(), dim3.clone(), inp.eq2.clone(), inp.eq4.clone()],
            vec![sym.clone()],
        ),
        AuditRow::evaluate(
            "theorem3_proof_step",
            vec![inp.constant_flag.clone(), dim3.clone()],
            vec![inp.eq1.clone()],
        ),
        AuditRow::evaluate(
            "corollary2",
            vec![inp.landsberg.clone(), inp.constant_flag.clone(), dim3.clone(), inp.eq4.clone()],
            vec![sym.clone()],
        ),
        AuditRow::evaluate(
            "corollary3",
            vec![inp.berwald.clone(), inp.constant_flag.clone(), dim3],
            vec![sym.clone()],
        ),
        AuditRow::evaluate("contraction_coherence", vec![sym.clone()], vec![scaled_eq1]),
        AuditRow::evaluate(
            "symmetric_contractions",
            vec![sym.clone()],
            vec![inp.eq1_two_index.clone(), inp.contracted_traces.clone()],
        ),
        AuditRow::evaluate("berwald_is_landsberg", vec![inp.berwald.clone()], vec![inp.landsberg.clone()]),
    ];
    let mut report = CheckReport::new("theorem_audit", 0);
    if rows.iter().any(|r| r.status == Verdict::Violation) {
        report
            .notes
            .push("VIOLATION: a hypothesis set passed while its conclusion failed; inspect the worst samples".into());
    }
    report.audit = rows;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::RiemannianSpec;

    fn pts(n: usize, count: usize) -> Vec<BasePoint> {
        (0..count)
            .map(|k| {
                let t = k as f64;
                let x = (0..n).map(|i| 0.1 * ((t + 1.0) * (i as f64 + 1.3)).sin()).collect();
                let y = (0..n).map(|i| (0.7 * t + 1.1 * i as f64).cos() + 0.2).collect();
                BasePoint::new(x, y).unwrap()
            })
            .collect()
    }

    #[test]
    fn cov_from_values_matches_jets() {
        let s = FinslerStructure::randers(2, RiemannianSpec::Identity, &["0.3*sin(x2)", "0.2*x1"]).unwrap();
        let p = &pts(2, 1)[0];
        let c = CurvatureFrame::build(&s, p, 3, 6).unwrap();
        let valence = [Slot::Up, Slot::Down, Slot::Down];
        let jet = c.conn.hcov(&c.r3, &valence).unwrap().values();
        let delta = c.conn.horizontal_all(&c.r3).unwrap().values();
        let vals = cov_from_values(2, &valence, &c.r3.values(), &delta, &c.conn.gamma.values());
        for (a, b) in jet.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fd_fallback_agrees_with_jets() {
        let s = FinslerStructure::randers(2, RiemannianSpec::Identity, &["0.5*cos(x2)", "0.5*sin(x2)"]).unwrap();
        let p = &pts(2, 2)[1];
        let fd = analyze_point(&s, p, EngineConfig { x_order: 3, y_order: 6 }).unwrap();
        let ad = analyze_point(&s, p, EngineConfig { x_order: 3, y_order: 7 }).unwrap();
        assert_eq!(fd.eq2_mode, DerivativeMode::FiniteDifference);
        assert_eq!(ad.eq2_mode, DerivativeMode::Jet);
        assert!(ad.eq2.0 > 1e-3);
        assert!((fd.eq2.0 - ad.eq2.0).abs() < 1e-6 * ad.eq2.0.max(1.0), "{} vs {}", fd.eq2.0, ad.eq2.0);
    }

    #[test]
    fn orders_are_checked() {
        let s = FinslerStructure::euclidean(2).unwrap();
        let err = analyze_point(&s, &pts(2, 1)[0], EngineConfig { x_order: 2, y_order: 6 }).unwrap_err();
        assert!(matches!(err, Error::Order(_)));
    }

    #[test]
    fn hcov_of_metric_vanishes() {
        let s = FinslerStructure::randers(2, RiemannianSpec::Identity, &["0.3*sin(x2)", "0.2*x1"]).unwrap();
        let p = &pts(2, 1)[0];
        let c = ConnectionFrame::build(&s, p, 2, 4).unwrap();
        let b = hcov(&c, &c.metric.g, &[Slot::Down, Slot::Down]).unwrap();
        assert!(b.max_abs() < 1e-8);
    }

    #[test]
    fn audit_marks_dimension_two_vacuous() {
        let s = FinslerStructure::riemannian(2, RiemannianSpec::Sphere { radius: 1.0 }).unwrap();
        let samples = pts(2, 4);
        let rows = analyze(&s, &samples, EngineConfig::default()).unwrap();
        let tol = Tolerances::default();
        let cls = classification_report(&rows, &tol).unwrap();
        let (flag, _) = constant_flag_report(&rows, &[], &tol).unwrap();
        let sym = symmetry_report(&rows, &tol);
        let audit = theorem_audit(&AuditInputs::gather(&cls, &flag, &sym, 2).unwrap());
        assert_eq!(audit.audit_row("theorem3").unwrap().status, Verdict::Vacuous);
        assert_eq!(audit.audit_row("theorem2").unwrap().status, Verdict::Consistent);
    }
}
