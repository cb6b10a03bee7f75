//! Symmetry certificates and theorem audits on families with known answers.

mod common;

use common::case;
use finsler_core::cli::sample_flags;
use finsler_core::report::{CheckReport, Verdict};
use finsler_core::symmetry::{
    analyze, certify_symmetric, classification_report, constant_flag_report, symmetry_report, theorem_audit,
    AuditInputs, PointAnalysis,
};
use finsler_core::tolerance::Tolerances;

fn audit(name: &str, count: usize) -> (Vec<PointAnalysis>, CheckReport) {
    let c = case(name);
    let pts = c.samples(count, 21);
    let rows = analyze(&c.s, &pts, Default::default()).unwrap();
    let tol = Tolerances::default();
    let classification = classification_report(&rows, &tol).unwrap();
    let (flag, _) = constant_flag_report(&rows, &sample_flags(&pts, 50, 21), &tol).unwrap();
    let sym = symmetry_report(&rows, &tol);
    let report = theorem_audit(&AuditInputs::gather(&classification, &flag, &sym, c.dim()).unwrap());
    (rows, report)
}

fn status(r: &CheckReport, row: &str) -> Verdict {
    r.audit_row(row).unwrap().status
}

#[test]
fn minkowski_is_a_consistent_instance_of_theorem2() {
    let (_, r) = audit("minkowski2", 10);
    assert_eq!(status(&r, "theorem2"), Verdict::Consistent);
    assert_eq!(status(&r, "theorem1_forward"), Verdict::Consistent);
}

#[test]
fn three_sphere_is_a_consistent_instance_of_theorem3() {
    let (_, r) = audit("sphere3", 10);
    assert_eq!(status(&r, "theorem3"), Verdict::Consistent);
    assert_eq!(status(&r, "corollary3"), Verdict::Consistent);
}

#[test]
fn flat_randers_is_a_consistent_instance_of_corollary3() {
    let (_, r) = audit("flat_randers3", 10);
    assert_eq!(status(&r, "corollary3"), Verdict::Consistent);
    assert!(r.audit.iter().all(|a| a.status != Verdict::Violation));
}

#[test]
fn two_sphere_is_excluded_from_theorem3() {
    let (_, r) = audit("sphere2", 6);
    let row = r.audit_row("theorem3").unwrap();
    assert_eq!(row.status, Verdict::Vacuous);
    assert!(row.hypotheses.iter().any(|h| h.name == "dimension_at_least_3" && !h.holds));
}

#[test]
fn riemannian_commutation_terms_vanish_individually() {
    for name in ["sphere2", "hyperbolic3", "polar_sphere", "diag2"] {
        let (rows, _) = audit(name, 6);
        for a in &rows {
            assert!(a.eq3_adot_term < 1e-9 && a.eq3_gamma_term < 1e-9, "{name}");
            assert!(a.eq4.0 < 1e-8 && a.eq2.0 < 1e-9, "{name}");
        }
    }
}

#[test]
fn spheres_are_symmetric_and_randers_is_not() {
    for name in ["sphere2", "hyperbolic2"] {
        let c = case(name);
        let r = certify_symmetric(&c.s, &c.samples(8, 22)).unwrap();
        assert!(r.symmetric && r.residual_defn1 < 1e-6 && r.residual_eq1 < 1e-6, "{name}");
    }
    let c = case("randers2");
    let r = certify_symmetric(&c.s, &c.samples(8, 22)).unwrap();
    assert!(!r.symmetric);
    assert!(r.residual_defn1 > 1e-3);
}

#[test]
fn berwald_rows_have_vanishing_landsberg_derivative() {
    for name in ["quartic3", "flat_randers3"] {
        let (rows, _) = audit(name, 6);
        assert!(rows.iter().all(|a| a.eq2.0 < 1e-6), "{name}");
    }
}
