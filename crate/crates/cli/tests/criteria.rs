//! Acceptance criteria, one test each; every test prints its PASS/FAIL line.

use std::io::Write;
use std::sync::OnceLock;

use cuspsum_core::acceptance::{self, Outcome};
use cuspsum_core::coefficients::{generate_delta_coefficients, CoefficientTable};

const SEED: u64 = 7;

fn table() -> &'static CoefficientTable {
    static T: OnceLock<CoefficientTable> = OnceLock::new();
    T.get_or_init(|| generate_delta_coefficients(acceptance::COEFF_N_MAX).unwrap())
}

fn ladder_table() -> &'static CoefficientTable {
    static T: OnceLock<CoefficientTable> = OnceLock::new();
    T.get_or_init(|| generate_delta_coefficients(acceptance::required_n_max()).unwrap())
}

/// Writes straight to stderr so the line shows even when the test passes.
fn report(o: Outcome) {
    let _ = writeln!(std::io::stderr(), "{}", o.line());
    assert!(o.passed, "{}", o.line());
}

#[test]
fn criterion_01_coefficient_exactness() {
    report(acceptance::coefficient_exactness().0);
}

#[test]
fn criterion_02_deligne_bound() {
    report(acceptance::deligne_bound(table()));
}

#[test]
fn criterion_03_mean_square_residual() {
    report(acceptance::rankin_selberg(table()));
}

#[test]
fn criterion_04_long_sum_growth() {
    report(acceptance::wilton_jutila(table()));
}

#[test]
fn criterion_05_main_term_truncation() {
    report(acceptance::voronoi_truncation(table()));
}

/// Companion invariant of criterion 5, reported here rather than in `check-all`.
#[test]
fn criterion_05s_short_window_constant() {
    report(acceptance::voronoi_short_window_constant(ladder_table()));
}

#[test]
fn criterion_06_moment_oracle() {
    report(acceptance::moment_oracle(table(), SEED));
}

#[test]
fn criterion_07_second_moment() {
    report(acceptance::second_moment(ladder_table()));
}

#[test]
fn criterion_08_fourth_moment() {
    report(acceptance::fourth_moment(ladder_table()));
}

#[test]
fn criterion_09_spacing() {
    report(acceptance::spacing_counts());
}

#[test]
fn criterion_10_census() {
    report(acceptance::census(table()));
}

#[test]
fn criterion_11_bombieri() {
    report(acceptance::bombieri(SEED));
}

#[test]
fn criterion_12_branch_continuity() {
    report(acceptance::branch_continuity());
}

#[test]
fn criterion_13a_command_reruns() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(cuspsum_tool::CACHE_DIR_ENV, dir.path());
    report(cuspsum_tool::run::cli_determinism());
}

#[test]
fn criterion_13b_parallel_moments() {
    report(acceptance::parallel_determinism(table()));
}

/// `check-all` exits nonzero exactly when its table has a failing row.
#[test]
fn check_all_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_cuspsum"))
        .arg("check-all")
        .env("CUSPSUM_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    let out = String::from_utf8(o.stdout).unwrap();
    let _ = std::io::stderr().write_all(out.as_bytes());
    let rows = out.lines().skip(1).count();
    assert_eq!(rows, 14);
    let any_fail = out.lines().any(|l| l.contains(",FAIL,"));
    assert_eq!(o.status.code(), Some(if any_fail { 1 } else { 0 }));
}
