//! Closed-form oracles and the family catalogue shared by the integration tests.
#![allow(dead_code)]

pub mod dd;

use finsler_core::ad::BasePoint;
use finsler_core::cli::sample_points;
use finsler_core::metrics::{Family, FinslerStructure, RiemannianSpec};

pub struct Case {
    pub name: &'static str,
    pub s: FinslerStructure,
    pub bounds: Vec<[f64; 2]>,
    pub berwald: bool,
}

impl Case {
    pub fn samples(&self, count: usize, seed: u64) -> Vec<BasePoint> {
        sample_points(&self.s, &self.bounds, count, seed).expect("sampling")
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }
}

fn cube(n: usize, h: f64) -> Vec<[f64; 2]> {
    vec![[-h, h]; n]
}

pub fn riemannian(n: usize, metric: RiemannianSpec) -> FinslerStructure {
    FinslerStructure::riemannian(n, metric).unwrap()
}

pub fn sphere(n: usize, radius: f64) -> FinslerStructure {
    riemannian(n, RiemannianSpec::Sphere { radius })
}

pub fn hyperbolic(n: usize, radius: f64) -> FinslerStructure {
    riemannian(n, RiemannianSpec::Hyperbolic { radius })
}

pub fn diag2() -> FinslerStructure {
    riemannian(
        2,
        RiemannianSpec::Diagonal {
            entries: vec!["1 + 0.5*x1^2".into(), "exp(0.3*x2)".into()],
        },
    )
}

/// `|b| = 0.5`, not closed, hence not Berwald.
pub fn randers2() -> FinslerStructure {
    FinslerStructure::randers(2, RiemannianSpec::Identity, &["0.5*cos(x2)", "0.5*sin(x2)"]).unwrap()
}

pub fn randers3() -> FinslerStructure {
    FinslerStructure::randers(
        3,
        RiemannianSpec::Identity,
        &["0.5*cos(x2)", "0.5*sin(x2)*cos(x3)", "0.5*sin(x2)*sin(x3)"],
    )
    .unwrap()
}

pub fn flat_randers3() -> FinslerStructure {
    FinslerStructure::randers(3, RiemannianSpec::Identity, &["0.3", "-0.2", "0.1"]).unwrap()
}

pub fn minkowski2() -> FinslerStructure {
    FinslerStructure::new(
        2,
        Family::LocallyMinkowski {
            f: "sqrt(y1^2 + y2^2) + 0.3*y1".into(),
        },
    )
    .unwrap()
}

pub fn quartic(n: usize) -> FinslerStructure {
    FinslerStructure::perturbed_quartic(n, 0.3).unwrap()
}

/// Every built-in family at the dimensions the acceptance suite uses.
pub fn catalogue() -> Vec<Case> {
    let c = |name, s: FinslerStructure, h: f64, berwald| {
        let n = s.dim();
        Case { name, s, bounds: cube(n, h), berwald }
    };
    vec![
        c("euclidean2", FinslerStructure::euclidean(2).unwrap(), 0.5, true),
        c("euclidean3", FinslerStructure::euclidean(3).unwrap(), 0.5, true),
        c("diag2", diag2(), 0.5, true),
        c("sphere2", sphere(2, 1.0), 0.8, true),
        c("sphere3", sphere(3, 1.0), 0.8, true),
        c("hyperbolic2", hyperbolic(2, 1.0), 0.6, true),
        c("hyperbolic3", hyperbolic(3, 1.0), 0.5, true),
        Case {
            name: "polar_sphere",
            s: riemannian(2, RiemannianSpec::PolarSphere { radius: 1.0 }),
            bounds: vec![[0.4, 2.7], [0.0, 6.0]],
            berwald: true,
        },
        c("randers2", randers2(), 1.0, false),
        c("randers3", randers3(), 0.5, false),
        c("flat_randers3", flat_randers3(), 0.5, true),
        c("minkowski2", minkowski2(), 0.5, true),
        c("quartic2", quartic(2), 0.5, true),
        c("quartic3", quartic(3), 0.5, true),
    ]
}

pub fn case(name: &str) -> Case {
    catalogue().into_iter().find(|c| c.name == name).expect("known case")
}

pub fn kron(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Conformal factor `a = e^{2 sigma} delta` of the stereographic sphere
/// (`curvature = 1`) or the Poincare ball (`curvature = -1`), and `d sigma`.
pub fn conformal(curvature: f64, radius: f64, x: &[f64]) -> (f64, Vec<f64>) {
    let r2 = radius * radius;
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let den = r2 + curvature * x2;
    let e_sigma = 2.0 * r2 / den;
    let dsigma = x.iter().map(|v| -2.0 * curvature * v / den).collect();
    (e_sigma * e_sigma, dsigma)
}

/// Levi-Civita symbols of `e^{2 sigma} delta`, flat `[i][j][k]`.
pub fn conformal_christoffel(curvature: f64, radius: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let (_, ds) = conformal(curvature, radius, x);
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[(i * n + j) * n + k] = kron(i, j) * ds[k] + kron(i, k) * ds[j] - kron(j, k) * ds[i];
            }
        }
    }
    out
}

/// `R^i_jkl = K (delta^i_k a_jl - delta^i_l a_jk)` for a conformally flat
/// metric of constant sectional curvature `K`.
pub fn constant_curvature_riemann(curvature: f64, radius: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let (a, _) = conformal(curvature, radius, x);
    let k = curvature / (radius * radius);
    let mut out = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for m in 0..n {
                    out[((i * n + j) * n + l) * n + m] = k * (kron(i, l) * a * kron(j, m) - kron(i, m) * a * kron(j, l));
                }
            }
        }
    }
    out
}

/// Levi-Civita symbols of the unit sphere in `(theta, phi)`.
pub fn polar_christoffel(theta: f64) -> Vec<f64> {
    let mut out = vec![0.0; 8];
    out[3] = -theta.sin() * theta.cos();
    out[5] = theta.cos() / theta.sin();
    out[6] = out[5];
    out
}

/// Levi-Civita symbols of `a(x)` from central differences of the metric,
/// with `a` evaluated by the caller in plain floating point.
pub fn christoffel_fd(a: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h = 1e-5;
    let da: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[k] += h;
            m[k] -= h;
            a(&p).iter().zip(a(&m)).map(|(u, v)| (u - v) / (2.0 * h)).collect()
        })
        .collect();
    let g = nalgebra::DMatrix::from_row_slice(n, n, &a(x));
    let inv = g.try_inverse().expect("invertible metric");
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = 0.0;
                for s in 0..n {
                    v += 0.5 * inv[(i, s)] * (da[k][s * n + j] + da[j][s * n + k] - da[s][j * n + k]);
                }
                out[(i * n + j) * n + k] = v;
            }
        }
    }
    out
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

pub fn point(x: &[f64], y: &[f64]) -> BasePoint {
    BasePoint::new(x.to_vec(), y.to_vec()).unwrap()
}
