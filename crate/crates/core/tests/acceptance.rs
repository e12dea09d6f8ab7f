//! Acceptance suite: every criterion prints one pass/fail line and asserts.
//! The same runners back the CLI's `verify-corpus` command.

use desing::verify;

fn check(report: verify::CriterionReport) {
    println!("{report}");
    assert!(report.pass, "{report}");
}

#[test]
fn criterion_1_hilbert_basis_oracle_equivalence() {
    check(verify::criterion_1_hilbert_oracle());
}

#[test]
fn criterion_2_toric_resolution() {
    check(verify::criterion_2_toric_resolution());
}

#[test]
fn criterion_3_barycentric_projectivity() {
    check(verify::criterion_3_barycentric_projectivity());
}

#[test]
fn criterion_4_a1_end_to_end() {
    check(verify::criterion_4_a1_end_to_end());
}

#[test]
fn criterion_5_belyi_descent() {
    check(verify::criterion_5_belyi_descent());
}

#[test]
fn criterion_6_separation_descent() {
    check(verify::criterion_6_separation_descent());
}

#[test]
fn criterion_7_normal_form_soundness() {
    check(verify::criterion_7_normal_forms());
}

#[test]
fn criterion_8_compatible_family() {
    check(verify::criterion_8_compatible_family());
}
