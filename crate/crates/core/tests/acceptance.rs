//! The ten acceptance criteria. Each prints one PASS/FAIL line; the process
//! exits non-zero when any criterion fails.

mod common;

use std::collections::HashMap;
use std::time::Instant;

use common::{case, catalogue, Case};
use finsler_core::ad::{taylor_eval, EngineConfig, MultiIndex};
use finsler_core::cli::{run, sample_flags, RunConfig};
use finsler_core::connection::chern_gamma;
use finsler_core::curvature::{hh_curvature, hv_curvature};
use finsler_core::metrics::{validate_structure_with, SquaredField};
use finsler_core::report::Verdict;
use finsler_core::symmetry::{
    analyze, classification_report, constant_flag_report, curvature_report, symmetry_report, theorem_audit,
    AuditInputs, PointAnalysis,
};
use finsler_core::tolerance::Tolerances;

const SAMPLES: usize = 50;
const SEED: u64 = 20240611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Lab {
    cases: Vec<Case>,
    rows: HashMap<&'static str, Vec<PointAnalysis>>,
}

impl Lab {
    fn new() -> Lab {
        let cases = catalogue();
        let rows = cases
            .iter()
            .map(|c| {
                let pts = c.samples(SAMPLES, SEED);
                (c.name, analyze(&c.s, &pts, EngineConfig::default()).expect(c.name))
            })
            .collect();
        Lab { cases, rows }
    }

    fn rows(&self, name: &str) -> &[PointAnalysis] {
        &self.rows[name]
    }
}

fn fmt_fail(fails: &[String]) -> String {
    fails.join("; ")
}

/// Axiom suite on the basic families.
fn c1(_: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for name in ["euclidean2", "euclidean3", "diag2", "sphere2", "sphere3", "hyperbolic2", "randers2", "randers3", "minkowski2", "quartic3"] {
        let c = case(name);
        let tol = if name.starts_with("randers") { 1e-8 } else { 1e-9 };
        let mut t = Tolerances::default();
        t.homogeneity = tol;
        t.euler = tol;
        t.cartan_annihilation = tol;
        let r = validate_structure_with(&c.s, &c.samples(200, SEED), &t).unwrap();
        for res in &r.residuals {
            if res.name != "positive_definiteness" && res.name != "positivity" {
                worst = worst.max(res.value);
            }
            if !res.passed() {
                fails.push(format!("{name}/{} = {:.3e}", res.name, res.value));
            }
        }
    }
    let detail = format!("10 families x 200 samples, worst identity residual {worst:.2e}");
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { fmt_fail(&fails) })
}

/// Horizontal metricity and vertical compatibility on every family.
fn c2(lab: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let (mut met, mut vert) = (0.0f64, 0.0f64);
    for c in &lab.cases {
        for a in lab.rows(c.name) {
            met = met.max(a.connection.metricity_max);
            vert = vert.max(a.connection.vertical_max);
        }
        let r = classification_report(lab.rows(c.name), &Tolerances::default()).unwrap();
        let m = r.residual("horizontal_metricity").unwrap().value;
        let v = r.residual("vertical_compatibility").unwrap().value;
        if !(m < 1e-8) || !(v < 1e-9) {
            fails.push(format!("{}: metricity {m:.2e}, vertical {v:.2e}", c.name));
        }
    }
    let detail = format!("{} families, metricity {met:.2e} < 1e-8, F dg/dy - 2A {vert:.2e} < 1e-9", lab.cases.len());
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { fmt_fail(&fails) })
}

/// Riemannian reduction against closed-form Christoffel symbols and curvature.
fn c3(_: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let (mut dg, mut dr) = (0.0f64, 0.0f64);
    for (name, k) in [("sphere2", 1.0), ("sphere3", 1.0), ("hyperbolic2", -1.0), ("hyperbolic3", -1.0)] {
        let c = case(name);
        for p in c.samples(SAMPLES, SEED) {
            let g = chern_gamma(&c.s, &p).unwrap().gamma.components;
            let e = common::max_diff(&g, &common::conformal_christoffel(k, 1.0, &p.x));
            let r = hh_curvature(&c.s, &p).unwrap().components;
            let er = common::max_diff(&r, &common::constant_curvature_riemann(k, 1.0, &p.x));
            dg = dg.max(e);
            dr = dr.max(er);
            if !(e < 1e-8) || !(er < 1e-7) {
                fails.push(format!("{name} at {:?}: gamma {e:.2e}, riemann {er:.2e}", p.x));
                break;
            }
        }
    }
    let detail = format!("sphere and hyperbolic, n = 2, 3: gamma {dg:.2e} < 1e-8, riemann {dr:.2e} < 1e-7");
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { fmt_fail(&fails) })
}

/// Locally Minkowski structures: Gamma, R, P vanish and symmetry certifies at 1e-10.
fn c4(lab: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let mut t = Tolerances::default();
    for name in ["defn1", "eq1", "eq2", "eq3", "eq4"] {
        t.set(name, 1e-10).unwrap();
    }
    for name in ["minkowski2", "quartic2", "quartic3"] {
        let c = case(name);
        for p in c.samples(20, SEED) {
            let v = chern_gamma(&c.s, &p)
                .unwrap()
                .gamma
                .max_abs()
                .max(hh_curvature(&c.s, &p).unwrap().max_abs())
                .max(hv_curvature(&c.s, &p).unwrap().max_abs());
            worst = worst.max(v);
        }
        let sym = symmetry_report(lab.rows(name), &t);
        if !sym.symmetric || sym.report.has_failure() {
            fails.push(format!("{name}: symmetry certificate failed"));
        }
    }
    if !(worst < 1e-12) {
        fails.push(format!("max |Gamma|, |R|, |P| = {worst:.2e}"));
    }
    let detail = format!("max |Gamma|, |R|, |P| = {worst:.1e}; symmetric at 1e-10 on 3 structures");
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { fmt_fail(&fails) })
}

/// Constant flag curvature fits and agreement on random flags.
fn c5(lab: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let mut lines = Vec::new();
    let expected = [
        ("sphere2", 1.0, 1e-6),
        ("sphere3", 1.0, 1e-6),
        ("polar_sphere", 1.0, 1e-6),
        ("hyperbolic2", -1.0, 1e-6),
        ("hyperbolic3", -1.0, 1e-6),
        ("euclidean3", 0.0, 1e-10),
        ("flat_randers3", 0.0, 1e-10),
        ("minkowski2", 0.0, 1e-10),
        ("quartic3", 0.0, 1e-10),
    ];
    for (name, lambda, tol) in expected {
        let c = case(name);
        let rows = lab.rows(name);
        let pts = c.samples(SAMPLES, SEED);
        let flags = sample_flags(&pts, 100, SEED);
        let (_, fit) = constant_flag_report(rows, &flags, &Tolerances::default()).unwrap();
        let mut flag_err = 0.0f64;
        for (k, u) in &flags {
            let kf = rows[*k].flag_data.flag_curvature(u).unwrap();
            flag_err = flag_err.max((kf - fit.lambda).abs());
        }
        if !((fit.lambda - lambda).abs() <= tol) || !(flag_err <= 1e-6) {
            fails.push(format!("{name}: lambda {:.12}, flag error {flag_err:.2e}", fit.lambda));
        }
        lines.push(format!("{name} {:+.9}", fit.lambda));
    }
    let detail = format!("lambda: {}; 100 flags each within 1e-6", lines.join(", "));
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { fmt_fail(&fails) })
}

/// Reconstruction of the hh-curvature from its contraction and D.
fn c6(lab: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let (mut y_read, mut l_read) = (0.0f64, 0.0f64);
    for c in &lab.cases {
        let r = curvature_report(lab.rows(c.name), &Tolerances::default());
        let v = r.residual("reconstruction").unwrap().value;
        y_read = y_read.max(v);
        for a in lab.rows(c.name) {
            l_read = l_read.max(a.reconstruction.literal.0);
        }
        if !(v < 1e-5) {
            fails.push(format!("{}: {v:.2e}", c.name));
        }
    }
    let detail = format!(
        "{} families incl. non-Berwald Randers: sup residual {y_read:.2e} < 1e-5 with R^i_kl = y^j R^i_jkl \
         (with l^j R^i_jkl it is {l_read:.2e})",
        lab.cases.len()
    );
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { format!("{}; {detail}", fmt_fail(&fails)) })
}

/// Commutation formula on non-Berwald Randers and on Riemannian families.
fn c7(lab: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let mut parts = Vec::new();
    for name in ["randers2", "randers3"] {
        let rows = lab.rows(name);
        let eq3 = rows.iter().map(|a| a.eq3.0).fold(0.0, f64::max);
        let flipped = rows.iter().map(|a| a.eq3_flipped.0).fold(0.0, f64::max);
        if !(eq3 < 1e-5) {
            fails.push(format!("{name}: {eq3:.2e} >= 1e-5 over {} samples", rows.len()));
        }
        parts.push(format!("{name} {eq3:.2e} (opposite Adot sign {flipped:.2e})"));
    }
    let mut riem = 0.0f64;
    for name in ["sphere2", "sphere3", "hyperbolic2", "hyperbolic3", "polar_sphere", "diag2"] {
        let v = lab.rows(name).iter().map(|a| a.eq3.0).fold(0.0, f64::max);
        riem = riem.max(v);
        if !(v < 1e-8) {
            fails.push(format!("{name}: {v:.2e} >= 1e-8"));
        }
    }
    parts.push(format!("riemannian {riem:.2e}"));
    let detail = parts.join(", ");
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { format!("{}; {detail}", fmt_fail(&fails)) })
}

/// Theorem audits never report a violation.
fn c8(lab: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let mut consistent = 0;
    let mut vacuous = 0;
    let tol = Tolerances::default();
    for c in &lab.cases {
        let rows = lab.rows(c.name);
        let pts = c.samples(SAMPLES, SEED);
        let classification = classification_report(rows, &tol).unwrap();
        let (flag, _) = constant_flag_report(rows, &sample_flags(&pts, 100, SEED), &tol).unwrap();
        let sym = symmetry_report(rows, &tol);
        let audit = theorem_audit(&AuditInputs::gather(&classification, &flag, &sym, c.dim()).unwrap());
        for row in &audit.audit {
            match row.status {
                Verdict::Consistent => consistent += 1,
                Verdict::Vacuous => vacuous += 1,
                _ => fails.push(format!("{}: {} {}", c.name, row.implication, row.status)),
            }
        }
    }
    let detail = format!("{} families: {consistent} CONSISTENT, {vacuous} VACUOUS, 0 VIOLATION", lab.cases.len());
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { fmt_fail(&fails) })
}

/// Jet partials of F^2 against a double-double finite-difference oracle.
fn c9(lab: &Lab) -> Outcome {
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for c in &lab.cases {
        let field = SquaredField(&c.s);
        let n = c.dim();
        for p in c.samples(10, SEED) {
            let jet = taylor_eval(&field, &p, 2, 3).unwrap();
            for m in MultiIndex::enumerate(n, 2, 3) {
                let ad = jet.derivative(&m).unwrap();
                let fd = common::dd::fd_f2(c.s.expr(), &p, &m).expect("stencil inside the domain");
                let err = (ad - fd).abs() / ad.abs().max(1.0);
                worst = worst.max(err);
                count += 1;
                if !(err <= 1e-6) {
                    fails.push(format!("{} {:?}/{:?}: jet {ad:.9e}, fd {fd:.9e}", c.name, m.alpha, m.beta));
                }
            }
        }
    }
    fails.truncate(5);
    let detail = format!(
        "{count} partials |alpha| <= 2, |beta| <= 3 over {} families, worst error {worst:.2e} <= max(1e-6, 1e-6 relative)",
        lab.cases.len()
    );
    outcome(fails.is_empty(), if fails.is_empty() { detail } else { fmt_fail(&fails) })
}

/// Two runs with the same config and seed give identical reports.
fn c10(_: &Lab) -> Outcome {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut fails = Vec::new();
    for file in ["randers2.toml", "sphere3.toml"] {
        let cfg = RunConfig::load(std::path::Path::new(&format!("{dir}/{file}"))).unwrap();
        let strip = |mut r: finsler_core::cli::RunReport| {
            r.timestamp = 0;
            r.to_json()
        };
        let a = strip(run(&cfg).unwrap());
        let b = strip(run(&cfg).unwrap());
        if a != b {
            fails.push(format!("{file}: reports differ"));
        }
    }
    outcome(fails.is_empty(), if fails.is_empty() { "randers2 and sphere3 reports byte-identical apart from the timestamp".into() } else { fmt_fail(&fails) })
}

fn main() {
    let start = Instant::now();
    let lab = Lab::new();
    println!("acceptance: analysed {} families x {SAMPLES} samples in {:.1}s", lab.cases.len(), start.elapsed().as_secs_f64());
    let criteria: [(&str, fn(&Lab) -> Outcome); 10] = [
        ("axiom suite", c1),
        ("compatibility suite", c2),
        ("riemannian reduction", c3),
        ("locally minkowski example", c4),
        ("constant flag detection", c5),
        ("reconstruction identity", c6),
        ("commutation formula", c7),
        ("theorem audits", c8),
        ("jet vs finite differences", c9),
        ("determinism", c10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f(&lab);
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<27} {}  ({:.1}s) {}",
            k + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
