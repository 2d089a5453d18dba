//! Virtual-value upper bounds for two posterior types.
//!
//! Routing `λ` units of flow from the source type `a` to the other type `b`
//! turns `b`'s values into virtual values
//! `φ(b) = ν(b) − (λ / r(b))·(ν(a) − ν(b))` while `φ(a) = ν(a)`. For any
//! `λ ∈ [0, r(a)]` the optimal revenue is at most `Σ_s r(s)·max(0, max_i φ_i(s))`.

use crate::model::SignalStats;
use crate::{Error, Result};

/// Flow-based bound with flow from signal 0 into signal 1.
pub fn dual_bound_two_signals(stats: &SignalStats, flow_mass: f64) -> Result<f64> {
    dual_bound_directed(stats, 0, flow_mass)
}

pub fn dual_bound_directed(stats: &SignalStats, source: usize, flow_mass: f64) -> Result<f64> {
    if stats.num_signals() != 2 {
        return Err(Error::DimensionMismatch {
            what: "signal count",
            expected: 2,
            found: stats.num_signals(),
        });
    }
    if source > 1 {
        return Err(Error::InvalidParameter("source must be signal 0 or 1".into()));
    }
    let a = source;
    let b = 1 - source;
    let cap = stats.r[a];
    if !(0.0..=cap * (1.0 + 1e-12)).contains(&flow_mass) {
        return Err(Error::InvalidParameter(alloc::format!(
            "flow mass {flow_mass} outside [0, {cap}]"
        )));
    }
    let scale = flow_mass / stats.r[b];
    let phi_a = stats.nu[a].iter().fold(0.0f64, |acc, &v| acc.max(v));
    let phi_b = stats.nu[b]
        .iter()
        .zip(&stats.nu[a])
        .fold(0.0f64, |acc, (&vb, &va)| acc.max(vb - scale * (va - vb)));
    Ok(stats.r[a] * phi_a + stats.r[b] * phi_b)
}

/// Smallest of the zero-flow bound and the two full-flow bounds.
pub fn min_flow_dual_bound(stats: &SignalStats) -> Result<f64> {
    let zero = dual_bound_directed(stats, 0, 0.0)?;
    let forward = dual_bound_directed(stats, 0, stats.r[0])?;
    let backward = dual_bound_directed(stats, 1, stats.r[1])?;
    Ok(zero.min(forward).min(backward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::instances;
    use crate::model::{optimal_welfare, signal_stats};
    use crate::InformationStructure;

    #[test]
    fn fully_revealing_hardness_instance() {
        let eps = 0.01;
        let d = instances::two_item_hardness(eps).unwrap();
        let stats = signal_stats(&d, &InformationStructure::full_disclosure(2)).unwrap();
        let bound = dual_bound_directed(&stats, 1, stats.r[1]).unwrap();
        assert!(bound <= 2.0 + 2.0 * eps + 1e-9, "bound = {bound}");
        assert!((min_flow_dual_bound(&stats).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_flow_is_first_best() {
        let d = instances::two_item_hardness(0.01).unwrap();
        let stats = signal_stats(&d, &InformationStructure::full_disclosure(2)).unwrap();
        let b = dual_bound_two_signals(&stats, 0.0).unwrap();
        assert!((b - optimal_welfare(&d)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let one = SignalStats::new(vec![1.0], vec![vec![1.0]]).unwrap();
        assert!(dual_bound_two_signals(&one, 0.0).is_err());
        let two = SignalStats::new(vec![0.5, 0.5], vec![vec![1.0], vec![2.0]]).unwrap();
        assert!(dual_bound_two_signals(&two, 0.6).is_err());
        assert!(dual_bound_directed(&two, 2, 0.0).is_err());
    }
}
