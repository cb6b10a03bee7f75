//! Nonlinear connection, horizontal derivatives, Chern connection
//! coefficients, and the Berwald / Landsberg / locally Minkowski tests.

use crate::ad::{BasePoint, Jet, Scalar};
use crate::error::{Error, Result};
use crate::metrics::{sum_jets, FinslerStructure, MetricFrame};
use crate::report::{CheckReport, Condition, Residual, Verdict};
use crate::tensor::{JetTensor, Slot, Symmetry, TensorBlock};

/// Default sup-norm tolerance for the Berwald / Landsberg / Minkowski tests.
pub const CLASSIFY_TOL: f64 = 1e-7;

/// Connection coefficients at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChernData {
    /// `N^i_m`, slots `[i, m]`.
    pub nonlinear: TensorBlock,
    /// `Gamma^i_jk`, slots `[i, j, k]`, symmetric in `(j, k)`.
    pub gamma: TensorBlock,
    pub base: BasePoint,
}

/// Jets of `N` and `Gamma` on top of a [`MetricFrame`].
#[derive(Debug, Clone)]
pub struct ConnectionFrame {
    pub metric: MetricFrame,
    /// `N^i_m`
    pub nonlinear: JetTensor,
    /// `Gamma^i_jk`
    pub gamma: JetTensor,
}

impl ConnectionFrame {
    /// Needs `F^2` to order at least `(1, 3)`.
    pub fn new(metric: MetricFrame) -> Result<ConnectionFrame> {
        let n = metric.n;
        if metric.f2.x_order() < 1 || metric.f2.y_order() < 3 {
            return Err(Error::Order("the Chern connection needs F^2 to order (1, 3)".into()));
        }
        let g = &metric.g;
        let ginv = &metric.ginv;
        let ys = &metric.ys;

        // dgx[a, b, c] = d g_ab / dx^c
        let dgx = JetTensor::try_from_fn(n, 3, |idx| g.at(&[idx[0], idx[1]]).dx(idx[2]))?;

        // G^i = 1/4 g^is (d_j g_sk + d_k g_sj - d_s g_kj) y^j y^k
        let c: Vec<Jet> = (0..n)
            .map(|s| {
                sum_jets((0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| {
                    let bracket = &(dgx.at(&[s, k, j]) + dgx.at(&[s, j, k])) - dgx.at(&[k, j, s]);
                    &(&bracket * &ys[j]) * &ys[k]
                }))
            })
            .collect();
        let spray: Vec<Jet> = (0..n)
            .map(|i| sum_jets((0..n).map(|s| ginv.at(&[i, s]) * &c[s])).scale(0.25))
            .collect();
        let nonlinear = JetTensor::try_from_fn(n, 2, |im| spray[im[0]].dy(im[1]))?;

        let mut frame = ConnectionFrame {
            metric,
            nonlinear,
            gamma: JetTensor { n, rank: 3, data: Vec::new() },
        };

        // dgd[a, b, c] = delta g_ab / delta x^c
        let dgd = frame.horizontal_all(&frame.metric.g)?;
        let mut gamma = JetTensor::from_fn(n, 3, |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            if j > k {
                // filled from the mirror below
                return frame.metric.f.constant_like(0.0);
            }
            sum_jets((0..n).map(|s| {
                let b = &(dgd.at(&[s, j, k]) - dgd.at(&[j, k, s])) + dgd.at(&[k, s, j]);
                frame.metric.ginv.at(&[i, s]) * &b
            }))
            .scale(0.5)
        });
        for i in 0..n {
            for j in 0..n {
                for k in 0..j {
                    let v = gamma.at(&[i, k, j]).clone();
                    let flat = crate::tensor::flat_index(n, &[i, j, k]);
                    gamma.data[flat] = v;
                }
            }
        }
        frame.gamma = gamma;
        Ok(frame)
    }

    pub fn build(s: &FinslerStructure, p: &BasePoint, x_order: usize, y_order: usize) -> Result<ConnectionFrame> {
        ConnectionFrame::new(MetricFrame::new(s, p, x_order, y_order)?)
    }

    pub fn n(&self) -> usize {
        self.metric.n
    }

    /// `delta t / delta x^p = dt/dx^p - N^m_p dt/dy^m`
    pub fn delta(&self, t: &Jet, p: usize) -> Result<Jet> {
        let mut out = t.dx(p)?;
        for m in 0..self.n() {
            out = &out - &(self.nonlinear.at(&[m, p]) * &t.dy(m)?);
        }
        Ok(out)
    }

    /// Appends a slot `p` holding `delta / delta x^p` of every component.
    pub fn horizontal_all(&self, t: &JetTensor) -> Result<JetTensor> {
        let n = self.n();
        let dx = JetTensor::try_from_fn(n, t.rank + 1, |idx| t.at(&idx[..t.rank]).dx(idx[t.rank]))?;
        let dy = t.dy_all()?;
        Ok(JetTensor::from_fn(n, t.rank + 1, |idx| {
            let (head, p) = (&idx[..t.rank], idx[t.rank]);
            let mut out = dx.at(idx).clone();
            let mut key = head.to_vec();
            key.push(0);
            for m in 0..n {
                key[t.rank] = m;
                out = &out - &(self.nonlinear.at(&[m, p]) * dy.at(&key));
            }
            out
        }))
    }

    /// Horizontal covariant derivative; the derivative slot is appended last.
    ///
    /// `nabla_p T^i.._j.. = delta_p T + Gamma^i_mp T^m.. - Gamma^m_jp T_m..`
    pub fn hcov(&self, t: &JetTensor, valence: &[Slot]) -> Result<JetTensor> {
        if valence.len() != t.rank {
            return Err(Error::Config(format!(
                "valence of length {} for a rank-{} tensor",
                valence.len(),
                t.rank
            )));
        }
        let n = self.n();
        let delta = self.horizontal_all(t)?;
        Ok(JetTensor::from_fn(n, t.rank + 1, |idx| {
            let (head, p) = (&idx[..t.rank], idx[t.rank]);
            let mut out = delta.at(idx).clone();
            let mut key = head.to_vec();
            for (slot, kind) in valence.iter().enumerate() {
                let orig = head[slot];
                for m in 0..n {
                    key[slot] = m;
                    let term = match kind {
                        Slot::Up => self.gamma.at(&[orig, m, p]) * t.at(&key),
                        Slot::Down => -&(self.gamma.at(&[m, orig, p]) * t.at(&key)),
                    };
                    out = &out + &term;
                }
                key[slot] = orig;
            }
            out
        }))
    }

    /// `Gamma^i_jkh = d Gamma^i_jk / dy^h`, slots `[i, j, k, h]`.
    pub fn gamma_vertical(&self) -> Result<JetTensor> {
        self.gamma.dy_all()
    }

    /// `A^i_jl|s`, slots `[i, j, l, s]`.
    pub fn hcov_cartan(&self) -> Result<JetTensor> {
        let a = self.metric.cartan_mixed()?;
        self.hcov(&a, &[Slot::Up, Slot::Down, Slot::Down])
    }

    /// `Adot^i_jl = A^i_jl|s l^s`, slots `[i, j, l]`.
    pub fn adot(&self) -> Result<JetTensor> {
        let cov = self.hcov_cartan()?;
        let l = self.metric.l_up()?;
        let n = self.n();
        Ok(JetTensor::from_fn(n, 3, |idx| {
            sum_jets((0..n).map(|s| cov.at(&[idx[0], idx[1], idx[2], s]) * &l[s]))
        }))
    }

    pub fn data(&self) -> ChernData {
        ChernData {
            nonlinear: self.nonlinear.block("N", vec![Slot::Up, Slot::Down], "im"),
            gamma: self
                .gamma
                .block("Gamma", vec![Slot::Up, Slot::Down, Slot::Down], "ijk")
                .with_symmetry(Symmetry::Symmetric(1, 2)),
            base: (*self.metric.base).clone(),
        }
    }
}

pub fn nonlinear_connection(s: &FinslerStructure, p: &BasePoint) -> Result<TensorBlock> {
    Ok(ConnectionFrame::build(s, p, 1, 3)?.data().nonlinear)
}

pub fn chern_gamma(s: &FinslerStructure, p: &BasePoint) -> Result<ChernData> {
    Ok(ConnectionFrame::build(s, p, 1, 3)?.data())
}

/// `delta F / delta x^i` for each `i` (zero for every Finsler structure).
pub fn delta_f(s: &FinslerStructure, p: &BasePoint) -> Result<Vec<f64>> {
    let c = ConnectionFrame::build(s, p, 1, 3)?;
    (0..s.dim()).map(|i| Ok(c.delta(&c.metric.f, i)?.value())).collect()
}

pub fn gamma_vertical(s: &FinslerStructure, p: &BasePoint) -> Result<TensorBlock> {
    let c = ConnectionFrame::build(s, p, 1, 4)?;
    Ok(c.gamma_vertical()?
        .block("Gamma_y", vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], "ijkh")
        .with_symmetry(Symmetry::Symmetric(1, 2)))
}

/// `(Adot^i_jl, A^i_jl|s)` at `p`.
pub fn adot(s: &FinslerStructure, p: &BasePoint) -> Result<(TensorBlock, TensorBlock)> {
    let c = ConnectionFrame::build(s, p, 1, 4)?;
    let cov = c.hcov_cartan()?;
    let l = c.metric.l_up()?;
    let n = c.n();
    let adot = JetTensor::from_fn(n, 3, |idx| {
        sum_jets((0..n).map(|k| cov.at(&[idx[0], idx[1], idx[2], k]) * &l[k]))
    });
    Ok((
        adot.block("Adot", vec![Slot::Up, Slot::Down, Slot::Down], "ijl"),
        cov.block("A_cov", vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], "ijls"),
    ))
}

/// Per-point quantities behind [`classify`] and the compatibility checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionSample {
    pub gamma_y_max: f64,
    pub gamma_y_worst: Vec<usize>,
    pub adot_max: f64,
    pub adot_worst: Vec<usize>,
    pub dfdx_max: f64,
    pub delta_f_max: f64,
    /// `delta_s g_ij - Gamma^l_is g_lj - Gamma^l_js g_il`
    pub metricity_max: f64,
    /// `F dg_ij/dy^s - 2 A_ijs`, with `A` from the third y-derivative of `F^2`.
    pub vertical_max: f64,
    pub torsion_max: f64,
}

fn argmax(t: &JetTensor) -> (f64, Vec<usize>) {
    let mut best = (0.0, vec![0; t.rank]);
    for (flat, j) in t.data.iter().enumerate() {
        let v = j.value().abs();
        if v > best.0 {
            best = (v, crate::tensor::multi_index(t.n, t.rank, flat));
        }
    }
    best
}

pub fn connection_sample(c: &ConnectionFrame) -> Result<ConnectionSample> {
    let n = c.n();
    let gy = c.gamma_vertical()?;
    let (gamma_y_max, gamma_y_worst) = argmax(&gy);
    let (adot_max, adot_worst) = argmax(&c.adot()?);
    let mut dfdx_max = 0.0f64;
    let mut delta_f_max = 0.0f64;
    for i in 0..n {
        dfdx_max = dfdx_max.max(c.metric.f.dx(i)?.value().abs());
        delta_f_max = delta_f_max.max(c.delta(&c.metric.f, i)?.value().abs());
    }
    let cov_g = c.hcov(&c.metric.g, &[Slot::Down, Slot::Down])?;
    let metricity_max = cov_g.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // A_ijs from the third derivative of F^2, compared with F dg/dy
    let f = c.metric.f.value();
    let mut vertical_max = 0.0f64;
    for i in 0..n {
        let di = c.metric.f2.dy(i)?;
        for j in 0..n {
            let dij = di.dy(j)?;
            for s in 0..n {
                let a = 0.25 * f * dij.dy(s)?.value();
                let dg = c.metric.g.at(&[i, j]).dy(s)?.value();
                vertical_max = vertical_max.max((f * dg - 2.0 * a).abs());
            }
        }
    }
    let mut torsion_max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let d = c.gamma.at(&[i, j, k]).value() - c.gamma.at(&[i, k, j]).value();
                torsion_max = torsion_max.max(d.abs());
            }
        }
    }
    Ok(ConnectionSample {
        gamma_y_max,
        gamma_y_worst,
        adot_max,
        adot_worst,
        dfdx_max,
        delta_f_max,
        metricity_max,
        vertical_max,
        torsion_max,
    })
}

/// Tolerances for [`classify_samples`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyTolerances {
    pub classify: f64,
    pub identity: f64,
    pub metricity: f64,
}

impl From<&crate::tolerance::Tolerances> for ClassifyTolerances {
    fn from(t: &crate::tolerance::Tolerances) -> Self {
        ClassifyTolerances {
            classify: t.classify,
            identity: t.identity,
            metricity: t.metricity,
        }
    }
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        ClassifyTolerances {
            classify: CLASSIFY_TOL,
            identity: 1e-9,
            metricity: 1e-8,
        }
    }
}

/// Berwald (`Gamma` y-independent), Landsberg (`Adot = 0`) and locally
/// Minkowski (`dF/dx = 0`) verdicts at the sampled points, with the
/// connection identities that must hold for every structure.
pub fn classify(s: &FinslerStructure, samples: &[BasePoint]) -> Result<CheckReport> {
    let frames: Vec<ConnectionSample> = samples
        .iter()
        .map(|p| connection_sample(&ConnectionFrame::build(s, p, 1, 4)?))
        .collect::<Result<_>>()?;
    classify_samples(&frames, ClassifyTolerances::default())
}

pub fn classify_samples(samples: &[ConnectionSample], tol: ClassifyTolerances) -> Result<CheckReport> {
    if samples.is_empty() {
        return Err(Error::Config("classification needs at least one sample".into()));
    }
    let mut gy = Residual::new("gamma_vertical", tol.classify, "sup |dGamma^i_jk/dy^h|");
    let mut ad = Residual::new("adot", tol.classify, "sup |Adot^i_jl|");
    let mut dfdx = Residual::new("dF_dx", tol.classify, "sup |dF/dx^i|");
    let mut delta_f = Residual::new(
        "horizontal_constancy_of_F",
        tol.identity,
        "sup |delta F / delta x^i|",
    );
    let mut metricity = Residual::new("horizontal_metricity", tol.metricity, "sup |g_ij|s|");
    let mut vertical = Residual::new("vertical_compatibility", tol.identity, "sup |F dg_ij/dy^s - 2 A_ijs|");
    let mut torsion = Residual::new("torsion", tol.identity, "sup |Gamma^i_jk - Gamma^i_kj|");
    for (k, c) in samples.iter().enumerate() {
        gy.observe(c.gamma_y_max, k, &c.gamma_y_worst);
        ad.observe(c.adot_max, k, &c.adot_worst);
        dfdx.observe(c.dfdx_max, k, &[]);
        delta_f.observe(c.delta_f_max, k, &[]);
        metricity.observe(c.metricity_max, k, &[]);
        vertical.observe(c.vertical_max, k, &[]);
        torsion.observe(c.torsion_max, k, &[]);
    }
    for r in [&mut gy, &mut ad, &mut dfdx, &mut delta_f, &mut metricity, &mut vertical, &mut torsion] {
        r.finish_upper();
    }
    let berwald = Condition::upper("berwald", gy.value, tol.classify);
    let landsberg = Condition::upper("landsberg", ad.value, tol.classify);
    let minkowski = Condition::upper("locally_minkowski", dfdx.value, tol.classify);

    let mut report = CheckReport::new("classify", samples.len());
    let mut implication = Residual::new(
        "berwald_implies_landsberg",
        tol.classify,
        "when the Berwald verdict holds, sup |Adot| must be below tolerance",
    );
    implication.set(if berwald.holds { ad.value } else { 0.0 }, ad.worst.clone().unwrap_or_default());
    implication.verdict = if berwald.holds && !landsberg.holds {
        Verdict::Violation
    } else {
        Verdict::Pass
    };
    if !delta_f.passed() {
        report
            .notes
            .push("warning: delta F / delta x does not vanish; the nonlinear connection is suspect".into());
    }
    report.notes.push("classification verdicts hold at the sampled points only".into());
    report.residuals = vec![delta_f, metricity, vertical, torsion, implication];
    report.conditions = vec![berwald, landsberg, minkowski];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::RiemannianSpec;

    fn pt(x: &[f64], y: &[f64]) -> BasePoint {
        BasePoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn minkowski_connection_vanishes() {
        let s = FinslerStructure::perturbed_quartic(3, 0.2).unwrap();
        let p = pt(&[0.3, -0.2, 0.5], &[0.7, 1.1, -0.4]);
        let c = chern_gamma(&s, &p).unwrap();
        assert_eq!(c.nonlinear.max_abs(), 0.0);
        assert_eq!(c.gamma.max_abs(), 0.0);
        assert_eq!(gamma_vertical(&s, &p).unwrap().max_abs(), 0.0);
        assert_eq!(adot(&s, &p).unwrap().0.max_abs(), 0.0);
    }

    #[test]
    fn flat_riemannian_is_flat() {
        let s = FinslerStructure::euclidean(2).unwrap();
        let p = pt(&[1.0, 2.0], &[0.5, 0.5]);
        assert_eq!(chern_gamma(&s, &p).unwrap().gamma.max_abs(), 0.0);
        assert_eq!(delta_f(&s, &p).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn sphere_gamma_is_y_independent_and_torsion_free() {
        let s = FinslerStructure::riemannian(2, RiemannianSpec::Sphere { radius: 1.0 }).unwrap();
        let p = pt(&[0.4, -0.3], &[1.2, 0.1]);
        let c = chern_gamma(&s, &p).unwrap();
        assert_eq!(c.gamma.symmetry_residual(), 0.0);
        assert!(gamma_vertical(&s, &p).unwrap().max_abs() < 1e-12);
        let q = p.scaled_y(2.0).unwrap();
        let c2 = chern_gamma(&s, &q).unwrap();
        assert!(c.gamma.max_abs_diff(&c2.gamma) < 1e-12);
        // N is homogeneous of degree one
        for (a, b) in c.nonlinear.components.iter().zip(&c2.nonlinear.components) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn randers_connection_identities() {
        let s = FinslerStructure::randers(2, RiemannianSpec::Identity, &["0.3*sin(x2)", "0.2*x1"]).unwrap();
        let p = pt(&[0.2, 0.7], &[0.9, -0.5]);
        let c = ConnectionFrame::build(&s, &p, 1, 4).unwrap();
        let sample = connection_sample(&c).unwrap();
        assert!(sample.delta_f_max < 1e-12, "{sample:?}");
        assert!(sample.metricity_max < 1e-10, "{sample:?}");
        assert!(sample.vertical_max < 1e-12, "{sample:?}");
        assert_eq!(sample.torsion_max, 0.0);
        assert!(sample.gamma_y_max > 1e-3);
        // y^j Gamma^i_jk = N^i_k
        for i in 0..2 {
            for k in 0..2 {
                let v: f64 = (0..2).map(|j| c.gamma.at(&[i, j, k]).value() * p.y[j]).sum();
                assert!((v - c.nonlinear.at(&[i, k]).value()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classify_verdicts() {
        let pts: Vec<BasePoint> = (0..4)
            .map(|k| pt(&[0.1 * k as f64, 0.2], &[1.0, 0.3 * k as f64 - 0.4]))
            .collect();
        let rep = classify(&FinslerStructure::perturbed_quartic(2, 0.1).unwrap(), &pts).unwrap();
        assert!(rep.conditions.iter().all(|c| c.holds));
        assert!(rep.all_passed());

        let sph = FinslerStructure::riemannian(2, RiemannianSpec::Sphere { radius: 1.0 }).unwrap();
        let rep = classify(&sph, &pts).unwrap();
        let get = |r: &CheckReport, n: &str| r.conditions.iter().find(|c| c.name == n).unwrap().holds;
        assert!(get(&rep, "berwald") && get(&rep, "landsberg") && !get(&rep, "locally_minkowski"));

        let randers = FinslerStructure::randers(2, RiemannianSpec::Identity, &["0.3*sin(x2)", "0.2*x1"]).unwrap();
        let rep = classify(&randers, &pts).unwrap();
        assert!(!get(&rep, "berwald"));
        assert!(rep.condition("berwald").unwrap().residual > 1e-4);
    }
}
