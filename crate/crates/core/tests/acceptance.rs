//! Acceptance suite: one test per verification criterion, each printing a
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the table; the `agp verify` subcommand prints the same checks.

use std::sync::OnceLock;

use agp_core::verify::{run_check, VerifyConfig, VerifyContext};

fn ctx() -> &'static VerifyContext {
    static CTX: OnceLock<VerifyContext> = OnceLock::new();
    CTX.get_or_init(|| VerifyContext::new(VerifyConfig::default()).expect("default context"))
}

fn run(id: &str) {
    let result = run_check(ctx(), id).unwrap_or_else(|e| panic!("{id} errored: {e}"));
    println!("[acceptance] {}", result.line());
    assert!(result.pass, "{id} failed: {}", result.line());
}

#[test]
fn criterion_01_alpha0_reproduction() {
    run("alpha0");
}

#[test]
fn criterion_02_full_system_dimension() {
    run("t_at_zero");
}

#[test]
fn criterion_03_spectrum_apex() {
    run("spectrum_apex");
}

#[test]
fn criterion_04_derivative_at_zero() {
    run("t_prime_at_zero");
}

#[test]
fn criterion_05_zeta_slice() {
    run("zeta_slice");
}

#[test]
fn criterion_06_finiteness_boundary() {
    run("finiteness_boundary");
}

#[test]
fn criterion_07_pressure_sandwich() {
    run("pressure_sandwich");
}

#[test]
fn criterion_08_oracle_equivalence() {
    run("oracle_equivalence");
}

#[test]
fn criterion_09_monotone_pressure() {
    run("monotone_pressure");
}

#[test]
fn criterion_10_endpoint_trends() {
    run("endpoint_trends");
}

#[test]
fn criterion_11_ramharter_trend() {
    run("ramharter_trend");
}

#[test]
fn criterion_12_epsilon_lemma_sums() {
    run("epsilon_lemma");
}

#[test]
fn criterion_13_identity_property_suite() {
    run("identity_properties");
}

#[test]
fn criterion_14_convexity_concavity() {
    run("convexity_concavity");
}
