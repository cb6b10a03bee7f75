//! Finsler structures, the fundamental tensor, the Cartan tensor, the
//! distinguished section `l = y / F`, and numerical axiom checks.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ad::{self, scalar, BasePoint, EngineConfig, Jet, Scalar, ScalarField};
use crate::error::{Error, Result};
use crate::expr::{Expr, Func};
use crate::report::{CheckReport, Residual, Verdict, Worst};
use crate::tolerance::Tolerances;
use crate::tensor::{JetTensor, Slot, Symmetry, TensorBlock};

/// Minimum eigenvalue below which `g` is not positive-definite.
pub const EPS_PD: f64 = 1e-10;

/// Scalings used for the degree-1 homogeneity check.
pub const HOMOGENEITY_SCALES: [f64; 3] = [0.5, 2.0, 3.0];

/// Riemannian metrics `a_ij(x)` available to Riemannian and Randers families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RiemannianSpec {
    Identity,
    /// Constant symmetric positive-definite matrix.
    Constant { matrix: Vec<Vec<f64>> },
    /// Diagonal entries given as expressions in `x1..xn`.
    Diagonal { entries: Vec<String> },
    /// Round sphere of the given radius in the stereographic chart
    /// `a = (2 r^2 / (r^2 + |x|^2))^2 delta`.
    Sphere { radius: f64 },
    /// Two-sphere in polar coordinates `(theta, phi)`: `a = r^2 diag(1, sin^2 theta)`,
    /// chart `0 < theta < pi`.
    PolarSphere { radius: f64 },
    /// Poincare ball `a = (2 r^2 / (r^2 - |x|^2))^2 delta`, chart `|x| < r`.
    Hyperbolic { radius: f64 },
}

impl RiemannianSpec {
    /// Quadratic form `a_ij(x) y^i y^j` as an expression.
    fn quadratic_form(&self, n: usize) -> Result<Expr> {
        let euclid_sq = || Expr::sum((0..n).map(|i| Expr::Y(i) * Expr::Y(i)));
        let x_sq = || Expr::sum((0..n).map(|i| Expr::X(i) * Expr::X(i)));
        Ok(match self {
            RiemannianSpec::Identity => euclid_sq(),
            RiemannianSpec::Constant { matrix } => {
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                    return Err(Error::Config(format!("constant metric must be {n}x{n}")));
                }
                for i in 0..n {
                    for j in 0..i {
                        if (matrix[i][j] - matrix[j][i]).abs() > 1e-14 {
                            return Err(Error::Config("constant metric must be symmetric".into()));
                        }
                    }
                }
                let mut terms = Vec::new();
                for i in 0..n {
                    for j in i..n {
                        let c = if i == j { matrix[i][i] } else { 2.0 * matrix[i][j] };
                        if c != 0.0 {
                            terms.push(Expr::c(c) * Expr::Y(i) * Expr::Y(j));
                        }
                    }
                }
                Expr::sum(terms)
            }
            RiemannianSpec::Diagonal { entries } => {
                if entries.len() != n {
                    return Err(Error::Config(format!("diagonal metric needs {n} entries")));
                }
                let mut terms = Vec::new();
                for (i, src) in entries.iter().enumerate() {
                    let e = Expr::parse(src)?;
                    reject_fiber_coordinates(&e, "diagonal metric entry")?;
                    terms.push(e * Expr::Y(i) * Expr::Y(i));
                }
                Expr::sum(terms)
            }
            RiemannianSpec::Sphere { radius } => {
                let r2 = positive(*radius, "sphere radius")?.powi(2);
                let conf = Expr::c(2.0 * r2) / (Expr::c(r2) + x_sq());
                conf.clone() * conf * euclid_sq()
            }
            RiemannianSpec::PolarSphere { radius } => {
                if n != 2 {
                    return Err(Error::Config("polar sphere chart is two-dimensional".into()));
                }
                let r2 = positive(*radius, "sphere radius")?.powi(2);
                let s = Expr::call(Func::Sin, Expr::X(0));
                Expr::c(r2) * (Expr::Y(0) * Expr::Y(0) + s.clone() * s * Expr::Y(1) * Expr::Y(1))
            }
            RiemannianSpec::Hyperbolic { radius } => {
                let r2 = positive(*radius, "hyperbolic radius")?.powi(2);
                let conf = Expr::c(2.0 * r2) / (Expr::c(r2) - x_sq());
                conf.clone() * conf * euclid_sq()
            }
        })
    }

    fn domain(&self) -> Vec<DomainConstraint> {
        match self {
            RiemannianSpec::PolarSphere { .. } => vec![DomainConstraint::Band {
                coord: 0,
                lo: 0.0,
                hi: std::f64::consts::PI,
            }],
            RiemannianSpec::Hyperbolic { radius } => vec![DomainConstraint::Ball { radius: *radius }],
            _ => Vec::new(),
        }
    }
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{what} must be positive, got {v}")))
    }
}

fn reject_fiber_coordinates(e: &Expr, what: &str) -> Result<()> {
    fn has_y(e: &Expr) -> bool {
        match e {
            Expr::Const(_) | Expr::X(_) => false,
            Expr::Y(_) => true,
            Expr::Neg(a) | Expr::Call(_, a) => has_y(a),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                has_y(a) || has_y(b)
            }
        }
    }
    if has_y(e) {
        return Err(Error::Config(format!("{what} may only depend on x")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Riemannian {
        metric: RiemannianSpec,
    },
    /// `F = sqrt(a_ij y^i y^j) + b_i(x) y^i`.
    Randers {
        alpha: RiemannianSpec,
        beta: Vec<String>,
    },
    /// Any `F` depending on `y` only.
    LocallyMinkowski {
        f: String,
    },
    /// `F = (|y|^4 + c sum (y^i)^4)^(1/4)`.
    PerturbedQuartic {
        c: f64,
    },
    Custom {
        f: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Riemannian,
    Randers,
    LocallyMinkowski,
    PerturbedQuartic,
    Custom,
}

impl Family {
    pub fn tag(&self) -> FamilyTag {
        match self {
            Family::Riemannian { .. } => FamilyTag::Riemannian,
            Family::Randers { .. } => FamilyTag::Randers,
            Family::LocallyMinkowski { .. } => FamilyTag::LocallyMinkowski,
            Family::PerturbedQuartic { .. } => FamilyTag::PerturbedQuartic,
            Family::Custom { .. } => FamilyTag::Custom,
        }
    }
}

/// Open-chart restrictions on `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainConstraint {
    /// `|x| < radius`
    Ball { radius: f64 },
    /// `lo < x[coord] < hi`
    Band { coord: usize, lo: f64, hi: f64 },
}

impl DomainConstraint {
    fn contains(&self, x: &[f64]) -> bool {
        match *self {
            DomainConstraint::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>() < radius * radius,
            DomainConstraint::Band { coord, lo, hi } => x[coord] > lo && x[coord] < hi,
        }
    }
}

/// A Finsler function `F(x, y)` on one chart.
#[derive(Debug, Clone)]
pub struct FinslerStructure {
    n: usize,
    family: Family,
    f: Expr,
    domain: Vec<DomainConstraint>,
}

impl FinslerStructure {
    pub fn new(n: usize, family: Family) -> Result<FinslerStructure> {
        ad::check_dim(n)?;
        let (f, domain) = match &family {
            Family::Riemannian { metric } => (metric.quadratic_form(n)?.sqrt(), metric.domain()),
            Family::Randers { alpha, beta } => {
                if beta.len() != n {
                    return Err(Error::Config(format!("Randers beta needs {n} components")));
                }
                let mut terms = Vec::new();
                for (i, src) in beta.iter().enumerate() {
                    let b = Expr::parse(src)?;
                    reject_fiber_coordinates(&b, "Randers one-form component")?;
                    terms.push(b * Expr::Y(i));
                }
                (alpha.quadratic_form(n)?.sqrt() + Expr::sum(terms), alpha.domain())
            }
            Family::LocallyMinkowski { f } => {
                let e = Expr::parse(f)?;
                if e.depends_on_x() {
                    return Err(Error::Config(
                        "a locally Minkowski structure may not depend on x".into(),
                    ));
                }
                (e, Vec::new())
            }
            Family::PerturbedQuartic { c } => {
                if !c.is_finite() {
                    return Err(Error::Config("quartic perturbation must be finite".into()));
                }
                let sq = Expr::sum((0..n).map(|i| Expr::Y(i) * Expr::Y(i)));
                let quartic = Expr::sum((0..n).map(|i| Expr::Y(i).powf(4.0)));
                ((sq.clone() * sq + Expr::c(*c) * quartic).powf(0.25), Vec::new())
            }
            Family::Custom { f } => (Expr::parse(f)?, Vec::new()),
        };
        if let Some(k) = f.max_coordinate() {
            if k >= n {
                return Err(Error::Config(format!(
                    "expression uses coordinate {} but the dimension is {n}",
                    k + 1
                )));
            }
        }
        Ok(FinslerStructure { n, family, f, domain })
    }

    pub fn euclidean(n: usize) -> Result<FinslerStructure> {
        FinslerStructure::new(n, Family::Riemannian { metric: RiemannianSpec::Identity })
    }

    pub fn riemannian(n: usize, metric: RiemannianSpec) -> Result<FinslerStructure> {
        FinslerStructure::new(n, Family::Riemannian { metric })
    }

    pub fn randers(n: usize, alpha: RiemannianSpec, beta: &[&str]) -> Result<FinslerStructure> {
        FinslerStructure::new(
            n,
            Family::Randers {
                alpha,
                beta: beta.iter().map(|s| s.to_string()).collect(),
            },
        )
    }

    pub fn perturbed_quartic(n: usize, c: f64) -> Result<FinslerStructure> {
        FinslerStructure::new(n, Family::PerturbedQuartic { c })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn expr(&self) -> &Expr {
        &self.f
    }

    pub fn domain(&self) -> &[DomainConstraint] {
        &self.domain
    }

    /// Expansion of `F` and `F^2` about `base`.
    pub fn jets(&self, base: &Arc<BasePoint>, x_order: usize, y_order: usize) -> Result<(Jet, Jet)> {
        let (xs, ys) = ad::seed_variables(base, x_order, y_order);
        match self.f.sqrt_radicand() {
            Some(q) => {
                let f2 = q.eval(&xs, &ys)?;
                Ok((scalar::sqrt(&f2)?, f2))
            }
            None => {
                let f = self.f.eval(&xs, &ys)?;
                let f2 = f.mul(&f);
                Ok((f, f2))
            }
        }
    }

    fn check_point(&self, p: &BasePoint) -> Result<()> {
        if p.dim() != self.n {
            return Err(Error::Config(format!(
                "point of dimension {} for a structure of dimension {}",
                p.dim(),
                self.n
            )));
        }
        if !self.domain.iter().all(|c| c.contains(&p.x)) {
            return Err(Error::Domain(format!("x = {:?} outside the chart domain", p.x)));
        }
        Ok(())
    }
}

impl ScalarField for FinslerStructure {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        self.f.eval(x, y)
    }

    fn in_domain(&self, p: &BasePoint) -> bool {
        p.dim() == self.n
            && self.domain.iter().all(|c| c.contains(&p.x))
            && self.f.eval_f64(&p.x, &p.y).map(f64::is_finite).unwrap_or(false)
    }
}

/// `F^2` as an independent field, evaluated by squaring `F`.
pub struct SquaredField<'a>(pub &'a FinslerStructure);

impl ScalarField for SquaredField<'_> {
    fn dim(&self) -> usize {
        self.0.n
    }

    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        let f = self.0.f.eval(x, y)?;
        Ok(f.mul(&f))
    }

    fn in_domain(&self, p: &BasePoint) -> bool {
        self.0.in_domain(p)
    }
}

pub fn evaluate_f(s: &FinslerStructure, p: &BasePoint) -> Result<f64> {
    s.check_point(p)?;
    let v = s.f.eval_f64(&p.x, &p.y)?;
    if !v.is_finite() {
        return Err(Error::Numeric(format!("F is not finite at {p:?}")));
    }
    if v <= 0.0 {
        return Err(Error::StructureInvalid(format!("F = {v} is not positive at {p:?}")));
    }
    Ok(v)
}

/// `g_ij(x, y)` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTensor {
    pub n: usize,
    /// Row-major `n x n`.
    pub g: Vec<f64>,
    pub base: BasePoint,
}

impl MetricTensor {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.n + j]
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.g)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.g, self.n)
    }

    /// `g(u, v)`
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.n;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j) * u[i] * v[j])
            .sum()
    }
}

fn min_eigenvalue(g: &[f64], n: usize) -> f64 {
    let m = DMatrix::from_row_slice(n, n, g);
    let sym = (&m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// `g_ij = 1/2 d^2 F^2 / dy^i dy^j`, computed for `i <= j` and mirrored so the
/// result is exactly symmetric.
fn metric_from_f2(f2: &Jet, n: usize) -> Result<JetTensor> {
    let first: Vec<Jet> = (0..n).map(|i| f2.dy(i)).collect::<Result<_>>()?;
    JetTensor::try_from_fn(n, 2, |ij| {
        let (i, j) = (ij[0].min(ij[1]), ij[0].max(ij[1]));
        Ok(first[i].dy(j)?.scale(0.5))
    })
}

fn metric_tensor_unchecked(s: &FinslerStructure, p: &BasePoint) -> Result<MetricTensor> {
    s.check_point(p)?;
    let base = Arc::new(p.clone());
    let (_, f2) = s.jets(&base, 0, 2)?;
    let g = metric_from_f2(&f2, s.n)?;
    Ok(MetricTensor {
        n: s.n,
        g: g.values(),
        base: p.clone(),
    })
}

/// `g_ij = 1/2 d^2 F^2 / dy^i dy^j`; fails with `StructureInvalid` when the
/// result is not positive-definite.
pub fn fundamental_tensor(s: &FinslerStructure, p: &BasePoint) -> Result<MetricTensor> {
    let m = metric_tensor_unchecked(s, p)?;
    let lam = m.min_eigenvalue();
    if !(lam > EPS_PD) {
        return Err(Error::StructureInvalid(format!(
            "fundamental tensor not positive-definite at {p:?} (min eigenvalue {lam:e})"
        )));
    }
    Ok(m)
}

/// `g^ij`, row-major.
pub fn inverse_metric(g: &MetricTensor) -> Result<Vec<f64>> {
    let inv = g
        .matrix()
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular fundamental tensor".into()))?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("singular fundamental tensor".into()));
    }
    // row-major copy
    Ok((0..g.n).flat_map(|i| (0..g.n).map(move |j| (i, j))).map(|(i, j)| inv[(i, j)]).collect())
}

/// `A_ijk = (F / 4) d^3 F^2 / dy^i dy^j dy^k`, totally symmetric.
pub fn cartan_tensor(s: &FinslerStructure, p: &BasePoint) -> Result<TensorBlock> {
    let frame = MetricFrame::new(s, p, 0, 3)?;
    Ok(frame
        .cartan()?
        .block("A", vec![Slot::Down; 3], "ijk")
        .with_symmetry(Symmetry::Total))
}

/// `(l^i, l_i)` with `l^i = y^i / F` and `l_i = g_ij l^j`.
pub fn distinguished_section(s: &FinslerStructure, p: &BasePoint) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = evaluate_f(s, p)?;
    let g = fundamental_tensor(s, p)?;
    let up: Vec<f64> = p.y.iter().map(|v| v / f).collect();
    let down = (0..s.n)
        .map(|i| (0..s.n).map(|j| g.get(i, j) * up[j]).sum())
        .collect();
    Ok((up, down))
}

/// Jets of `F`, `F^2`, `g_ij`, `g^ij` about one base point.
#[derive(Debug, Clone)]
pub struct MetricFrame {
    pub n: usize,
    pub base: Arc<BasePoint>,
    pub ys: Vec<Jet>,
    pub f: Jet,
    pub f2: Jet,
    pub g: JetTensor,
    pub ginv: JetTensor,
}

impl MetricFrame {
    /// Expand about `p` keeping `F^2` to order `(x_order, y_order)`;
    /// `y_order >= 2` is required for `g`.
    pub fn new(s: &FinslerStructure, p: &BasePoint, x_order: usize, y_order: usize) -> Result<MetricFrame> {
        EngineConfig { x_order, y_order }.validate()?;
        if y_order < 2 {
            return Err(Error::Order("the fundamental tensor needs y-order 2".into()));
        }
        s.check_point(p)?;
        let n = s.n;
        let base = Arc::new(p.clone());
        let (f, f2) = s.jets(&base, x_order, y_order)?;
        if f.value() <= 0.0 {
            return Err(Error::StructureInvalid(format!("F = {} is not positive at {p:?}", f.value())));
        }
        let g = metric_from_f2(&f2, n)?;
        let lam = min_eigenvalue(&g.values(), n);
        if !(lam > EPS_PD) {
            return Err(Error::StructureInvalid(format!(
                "fundamental tensor not positive-definite at {p:?} (min eigenvalue {lam:e})"
            )));
        }
        let ginv = invert(&g)?;
        let (_, ys) = ad::seed_variables(&base, x_order, y_order);
        Ok(MetricFrame { n, base, ys, f, f2, g, ginv })
    }

    /// `l^i = y^i / F`
    pub fn l_up(&self) -> Result<Vec<Jet>> {
        let inv_f = scalar::recip(&self.f)?;
        Ok(self.ys.iter().map(|y| y * &inv_f).collect())
    }

    /// `l_i = g_ij l^j`
    pub fn l_down(&self) -> Result<Vec<Jet>> {
        let up = self.l_up()?;
        Ok((0..self.n)
            .map(|i| sum_jets((0..self.n).map(|j| self.g.at(&[i, j]) * &up[j])))
            .collect())
    }

    /// `A_ijk = (F / 2) dg_ij / dy^k`
    pub fn cartan(&self) -> Result<JetTensor> {
        let half_f = self.f.scale(0.5);
        JetTensor::try_from_fn(self.n, 3, |idx| {
            Ok(&half_f * &self.g.at(&[idx[0], idx[1]]).dy(idx[2])?)
        })
    }

    /// `A^i_jk = g^im A_mjk`
    pub fn cartan_mixed(&self) -> Result<JetTensor> {
        let a = self.cartan()?;
        let n = self.n;
        Ok(JetTensor::from_fn(n, 3, |idx| {
            sum_jets((0..n).map(|m| self.ginv.at(&[idx[0], m]) * a.at(&[m, idx[1], idx[2]])))
        }))
    }
}

pub(crate) fn sum_jets(terms: impl Iterator<Item = Jet>) -> Jet {
    terms
        .reduce(|a, b| &a + &b)
        .expect("sum over a nonempty index range")
}

/// Gauss-Jordan inverse of a positive-definite jet matrix (no pivoting needed).
fn invert(g: &JetTensor) -> Result<JetTensor> {
    let n = g.n;
    let mut a: Vec<Vec<Jet>> = (0..n).map(|i| (0..n).map(|j| g.at(&[i, j]).clone()).collect()).collect();
    let mut b: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| g.at(&[0, 0]).constant_like(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    for k in 0..n {
        let inv = scalar::recip(&a[k][k]).map_err(|_| Error::Numeric("singular fundamental tensor".into()))?;
        for j in 0..n {
            a[k][j] = &a[k][j] * &inv;
            b[k][j] = &b[k][j] * &inv;
        }
        for r in 0..n {
            if r == k {
                continue;
            }
            let factor = a[r][k].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&factor * &a[k][j]);
                b[r][j] = &b[r][j] - &(&factor * &b[k][j]);
            }
        }
    }
    Ok(JetTensor::from_fn(n, 2, |ij| b[ij[0]][ij[1]].clone()))
}

/// `max_ij |A_ijk y^k|` with its index, without the positive-definiteness guard.
fn cartan_annihilation(s: &FinslerStructure, p: &BasePoint) -> Result<(f64, Vec<usize>)> {
    let base = Arc::new(p.clone());
    let (f, f2) = s.jets(&base, 0, 3)?;
    let g = metric_from_f2(&f2, s.n)?;
    let fv = f.value();
    let mut best = (0.0f64, vec![0, 0]);
    for i in 0..s.n {
        for j in 0..s.n {
            let mut v = 0.0;
            for k in 0..s.n {
                v += 0.5 * fv * g.at(&[i, j]).dy(k)?.value() * p.y[k];
            }
            if v.abs() > best.0 || v.is_nan() {
                best = (v.abs(), vec![i, j]);
            }
        }
    }
    Ok(best)
}

/// Numerical check of the Finsler axioms over a sample set.
pub fn validate_structure(s: &FinslerStructure, samples: &[BasePoint]) -> Result<CheckReport> {
    validate_structure_with(s, samples, &Tolerances::default())
}

pub fn validate_structure_with(s: &FinslerStructure, samples: &[BasePoint], tol: &Tolerances) -> Result<CheckReport> {
    if samples.is_empty() {
        return Err(Error::Config("validation needs at least one sample".into()));
    }
    let mut positivity = Residual::new("positivity", 0.0, "min F must be > 0; residual is max(0, -min F)");
    let mut homogeneity = Residual::new(
        "homogeneity",
        tol.homogeneity,
        "|F(x, t y) - t F(x, y)| / (t F), t in {0.5, 2, 3}",
    );
    let mut pd = Residual::new(
        "positive_definiteness",
        tol.positive_definiteness,
        "min eigenvalue of g must exceed the tolerance",
    );
    let mut euler = Residual::new("euler_identity", tol.euler, "|g_ij y^i y^j - F^2| / F^2");
    let mut annihilation = Residual::new(
        "cartan_annihilation",
        tol.cartan_annihilation,
        "sup |A_ijk y^k| / F",
    );
    let mut min_f = f64::INFINITY;
    let mut min_eig = f64::INFINITY;
    let mut min_f_at = 0usize;
    let mut min_eig_at = 0usize;

    for (k, p) in samples.iter().enumerate() {
        s.check_point(p)?;
        let fv = s.f.eval_f64(&p.x, &p.y)?;
        if fv < min_f {
            min_f = fv;
            min_f_at = k;
        }
        for &t in &HOMOGENEITY_SCALES {
            let q = p.scaled_y(t)?;
            let ft = s.f.eval_f64(&q.x, &q.y)?;
            let r = (ft - t * fv).abs() / (t * fv.abs()).max(f64::MIN_POSITIVE);
            homogeneity.observe(r, k, &[]);
        }
        let g = metric_tensor_unchecked(s, p)?;
        let lam = g.min_eigenvalue();
        if lam < min_eig {
            min_eig = lam;
            min_eig_at = k;
        }
        let gyy = g.inner(&p.y, &p.y);
        euler.observe((gyy - fv * fv).abs() / (fv * fv).max(f64::MIN_POSITIVE), k, &[]);
        let (ann, idx) = cartan_annihilation(s, p)?;
        annihilation.observe(ann / fv.abs().max(f64::MIN_POSITIVE), k, &idx);
    }
    positivity.set(f64::max(0.0, -min_f), Worst::at(min_f_at));
    positivity.verdict = Verdict::from_bool(min_f > 0.0);
    pd.set(min_eig, Worst::at(min_eig_at));
    pd.verdict = Verdict::from_bool(min_eig > tol.positive_definiteness);
    homogeneity.finish_upper();
    euler.finish_upper();
    annihilation.finish_upper();

    let mut report = CheckReport::new("validate", samples.len());
    report.residuals = vec![positivity, homogeneity, pd, euler, annihilation];
    Ok(report)
}
