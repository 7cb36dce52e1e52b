//! Shared fixtures for the benchmarks.

use hyplyap_core::{linear_example, LinearExample, WeightSpec};

/// The published-parameter linear setup at a configurable grid size.
pub fn linear_fixture(cells: usize, final_time: f64) -> (LinearExample, WeightSpec) {
    let ex = linear_example(cells, 0.75, final_time, 0.5, 0.5, 0.01).expect("valid preset");
    (ex, WeightSpec::exponential_2x2(1.0, 1.0, 0.575))
}
