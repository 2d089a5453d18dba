#![allow(dead_code)]

use persuade_core::{InformationStructure, SignalLabel, ValueDistribution};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

/// Fixed-seed configuration so every run draws the same cases.
pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Support points with continuous values in `[0, 10)` and positive masses.
pub fn dist(max_m: usize, max_k: usize) -> impl Strategy<Value = ValueDistribution> {
    (1..=max_m, 1..=max_k).prop_flat_map(|(m, k)| {
        (
            proptest::collection::vec(proptest::collection::vec(0.0f64..10.0, m), k),
            proptest::collection::vec(0.05f64..1.0, k),
        )
            .prop_filter_map("duplicate support point", move |(support, weights)| {
                let total: f64 = weights.iter().sum();
                let prob = weights.iter().map(|w| w / total).collect();
                ValueDistribution::new(m, support, prob).ok()
            })
    })
}

/// A distribution together with a random (possibly fractional) structure.
pub fn dist_with_info(
    max_m: usize,
    max_k: usize,
    max_s: usize,
) -> impl Strategy<Value = (ValueDistribution, InformationStructure)> {
    (dist(max_m, max_k), 1..=max_s).prop_flat_map(|(d, s)| {
        let k = d.len();
        proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, s), k).prop_filter_map(
            "row without weight",
            move |mut w| {
                for row in &mut w {
                    // sparse-ish kernels: drop small weights
                    for x in row.iter_mut() {
                        if *x < 0.3 {
                            *x = 0.0;
                        }
                    }
                    if row.iter().all(|&x| x == 0.0) {
                        row[0] = 1.0;
                    }
                }
                let labels = (0..s).map(SignalLabel::Id).collect();
                InformationStructure::from_weights(labels, w).ok().map(|i| (d.clone(), i))
            },
        )
    })
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
