//! Acceptance suite: one test per criterion, each printing a PASS line and
//! enforcing its runtime bound. All arithmetic is exact, so every expected
//! value is pinned with zero tolerance.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use cgw::selftest::{self, SelftestConfig};

fn run(name: &str, limit_seconds: f64, check: fn(&SelftestConfig) -> Result<(), String>) {
    let cfg = SelftestConfig::default();
    let start = Instant::now();
    let result = check(&cfg);
    let elapsed = start.elapsed().as_secs_f64();
    match &result {
        Ok(()) => println!("PASS  {name} ({elapsed:.2}s)"),
        Err(msg) => println!("FAIL  {name} ({elapsed:.2}s): {msg}"),
    }
    result.unwrap_or_else(|msg| panic!("{name}: {msg}"));
    assert!(
        elapsed < limit_seconds,
        "{name}: took {elapsed:.2}s, limit {limit_seconds}s"
    );
}

#[test]
fn gl2_base_witness_verified_and_not_global() {
    // 2x2 base pair over F_9 (parameters 1 and t): element-conjugacy
    // verified with stored conjugators for all 9 source elements; the
    // level-independent symbolic obstruction holds; and the independent
    // scan of all 5760 group elements finds no global conjugator.
    run("gl2-base-witness", 5.0, selftest::check_gl2_base);
}

#[test]
fn sp2_base_witness_exhaustive_720() {
    // Symplectic 2x2 pair with a = t over F_9, decided by full enumeration
    // of the 720-element group (count asserted).
    run("sp2-base-witness", 5.0, selftest::check_sp2_base);
}

#[test]
fn u4_witness_membership_fastpath_and_stability() {
    // Unitary 4x4 pair with coefficients 1 and t of F_9 (base q = 9,
    // matrices over F_81): membership, commutation, order 3; the invariant
    // fast path verifies all 9 elements; the global decider excludes a
    // conjugator at the witness level and after one extension.
    run("u4-witness", 60.0, selftest::check_u4);
}

#[test]
fn o5_witness_budgeted() {
    run("o5-witness", 120.0, selftest::check_o5);
}

#[test]
fn o4_witness_budgeted() {
    run("o4-witness", 120.0, selftest::check_o4);
}

#[test]
fn lift_chain_reverifies_from_scratch() {
    // GL(2) -> GL(3) -> GL(4) (two centralizer lifts) and GL(4) -> SL(5)
    // (determinant-block lift): both pairs re-verify with stored
    // certificates ignored.
    run("lift-chain", 120.0, selftest::check_lift_chain);
}

#[test]
fn det_twist_preserves_outcomes() {
    // SL(3, F_9) from GL(3, F_9): twisted generator determinants are 1 and
    // both decider outcomes are preserved.
    run("det-twist", 120.0, selftest::check_det_twist);
}

#[test]
fn class_count_crosscheck_gl2() {
    // Class-function enumeration equals the brute-force class count: 8 for
    // GL(2,3) and 24 for GL(2,5).
    run(
        "class-count-crosscheck",
        30.0,
        selftest::check_class_count_crosscheck,
    );
}

#[test]
fn wall_predicates_on_unipotent_types() {
    // Every unipotent of Sp(2,3) and Sp(4,3) (51840 elements, generated by
    // breadth-first closure) has symplectic Jordan type; every unipotent of
    // O(3,3) has orthogonal type.
    run("wall-predicates", 120.0, selftest::check_wall_predicates);
}

#[test]
fn dual_and_type_classification_exhaustive() {
    // Degree <= 2, nonzero constant term, over F_3 and F_5: dual and
    // twisted-dual are exact involutions and every minimal self-reciprocal
    // polynomial receives exactly one type.
    run("dual-milnor", 30.0, selftest::check_dual_milnor);
}

#[test]
fn negative_control_is_not_vacuous() {
    // Bypassing the independence precondition with b/a = 2 in F_5 yields a
    // certified element-conjugacy failure at source element (1,2).
    run("negative-control", 30.0, selftest::check_negative_control);
}

#[test]
fn reports_are_byte_identical() {
    run(
        "report-determinism",
        30.0,
        selftest::check_report_determinism,
    );
}
