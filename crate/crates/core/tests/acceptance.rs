//! Release criteria, one test per criterion. Each prints its pass/fail
//! line so `cargo test --test acceptance -- --nocapture` gives the full
//! report.
//!
//! Two checks document known limits and fail by design of the checked
//! property, not by implementation defect:
//!
//! * `criterion_04`: the greedy scheduler's selected-user count is not
//!   monotone in the overlap threshold for every individual spectrum
//!   matrix. A user that survives pruning only at a larger threshold can
//!   out-rank the previous pick and then prune every remaining candidate;
//!   roughly 6% of random matrices (and about 2% of model-generated ones)
//!   exhibit a drop. The first-pick and pairwise-overlap clauses hold with
//!   zero violations, and the mean selected count is monotone.
//! * `criterion_05`: at this antenna count the sum-rate-versus-threshold
//!   curve rises from the 0.02 endpoint to an interior peak and falls
//!   steeply toward 0.98, but the rise is smaller than two standard
//!   errors at 100 drops. The fall is significant by a wide margin.

use std::sync::Mutex;

use cusbf::acceptance;

// The complexity-trend criterion measures wall-clock scaling while the
// Monte Carlo criteria saturate every core through rayon; running the
// criteria concurrently would corrupt the timings. One lock serializes
// them regardless of the test harness thread count.
static SERIAL: Mutex<()> = Mutex::new(());

fn run(make: impl FnOnce() -> acceptance::CriterionResult) {
    let _guard = SERIAL.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let result = make();
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_szego_convergence() {
    run(acceptance::szego_convergence);
}

#[test]
fn criterion_02_zf_nulling() {
    run(acceptance::zf_nulling);
}

#[test]
fn criterion_03_covariance_oracle() {
    run(acceptance::covariance_oracle);
}

#[test]
fn criterion_04_scheduler_invariants() {
    run(acceptance::scheduler_invariants);
}

#[test]
fn criterion_05_epsilon_sweep_shape() {
    run(acceptance::epsilon_sweep_shape);
}

#[test]
fn criterion_06_multiuser_diversity() {
    run(acceptance::multiuser_diversity);
}

#[test]
fn criterion_07_scheme_ordering() {
    run(acceptance::scheme_ordering);
}

#[test]
fn criterion_08_noise_power() {
    run(acceptance::noise_power_value);
}

#[test]
fn criterion_09_sweep_determinism() {
    run(acceptance::sweep_determinism);
}

#[test]
fn criterion_10_complexity_trend() {
    run(acceptance::complexity_trend);
}
