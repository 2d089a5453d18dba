//! Distributional conditions under which horizontal disclosure with posted
//! prices extracts the full surplus.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::disclosure::{horizontal_disclosure, top_item_profile};
use crate::model::{PricingMechanism, ValueDistribution};
use crate::{Error, Result, DEFAULT_TOL};

/// Largest `m` accepted by [`is_exchangeable`].
pub const MAX_EXCHANGEABLE_M: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionCheck {
    pub holds: bool,
    /// First violating pair, if any.
    pub witness: Option<(usize, usize)>,
}

impl ConditionCheck {
    fn pass() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    fn fail(a: usize, b: usize) -> Self {
        Self {
            holds: false,
            witness: Some((a, b)),
        }
    }
}

/// `E[v_i | top = i] ≥ E[v_i | top = j]` for every product `i` and every other
/// nonempty class `j`. The witness is the first failing `(i, j)`.
pub fn full_surplus_condition(dist: &ValueDistribution) -> ConditionCheck {
    let profile = top_item_profile(dist);
    let classes: Vec<usize> = profile.nonempty().collect();
    for &i in &classes {
        let own = profile.own(i).expect("nonempty class");
        for &j in &classes {
            if j == i {
                continue;
            }
            let other = profile.nu(i, j).expect("nonempty class");
            if own < other - DEFAULT_TOL * other.abs().max(1.0) {
                return ConditionCheck::fail(i, j);
            }
        }
    }
    ConditionCheck::pass()
}

/// [`own_mean_pricing`], refused when the full-surplus condition fails.
pub fn full_surplus_mechanism(dist: &ValueDistribution) -> Result<PricingMechanism> {
    let check = full_surplus_condition(dist);
    if let Some((i, j)) = check.witness {
        return Err(Error::ConditionFailed(i, j));
    }
    Ok(own_mean_pricing(dist))
}

/// Horizontal disclosure with each product priced at its own-class mean.
pub fn own_mean_pricing(dist: &ValueDistribution) -> PricingMechanism {
    let profile = top_item_profile(dist);
    let prices = (0..dist.m())
        .map(|i| profile.own(i).unwrap_or(f64::INFINITY))
        .collect();
    PricingMechanism::new(horizontal_disclosure(dist), prices)
}

fn find_point(dist: &ValueDistribution, v: &[f64]) -> Option<usize> {
    dist.support().iter().position(|p| p.as_slice() == v)
}

/// Log-submodularity `f(v)·f(v′) ≥ f(v∧v′)·f(v∨v′)` over all support pairs,
/// with `f` extended by zero off the support. The witness holds the support
/// indices of the first failing pair.
pub fn is_negatively_affiliated(dist: &ValueDistribution) -> ConditionCheck {
    let k = dist.len();
    let f = dist.prob();
    for a in 0..k {
        for b in a + 1..k {
            let va = dist.point(a);
            let vb = dist.point(b);
            let meet: Vec<f64> = va.iter().zip(vb).map(|(x, y)| x.min(*y)).collect();
            let join: Vec<f64> = va.iter().zip(vb).map(|(x, y)| x.max(*y)).collect();
            let fm = find_point(dist, &meet).map_or(0.0, |i| f[i]);
            let fj = find_point(dist, &join).map_or(0.0, |i| f[i]);
            if f[a] * f[b] < fm * fj - 1e-15 {
                return ConditionCheck::fail(a, b);
            }
        }
    }
    ConditionCheck::pass()
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..m).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..m).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Invariance of the joint distribution under every permutation of the
/// coordinates: permuted points must exist in the support with masses equal
/// within `1e-12`.
pub fn is_exchangeable(dist: &ValueDistribution) -> Result<bool> {
    let m = dist.m();
    if m > MAX_EXCHANGEABLE_M {
        return Err(Error::SizeLimit {
            what: "products",
            limit: MAX_EXCHANGEABLE_M,
            found: m,
        });
    }
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| lex(dist.point(a), dist.point(b)));
    let mut permuted = vec![0.0; m];
    for perm in permutations(m).iter().skip(1) {
        for k in 0..dist.len() {
            let v = dist.point(k);
            for (slot, &i) in permuted.iter_mut().zip(perm) {
                *slot = v[i];
            }
            let found = order
                .binary_search_by(|&j| lex(dist.point(j), &permuted))
                .ok()
                .map(|pos| order[pos]);
            match found {
                Some(j) if (dist.prob()[j] - dist.prob()[k]).abs() <= 1e-12 => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::model::{induce_mechanism, optimal_welfare, revenue};

    #[test]
    fn no_full_surplus_witness() {
        let check = full_surplus_condition(&instances::appendix_no_full_surplus());
        assert!(!check.holds);
        assert_eq!(check.witness, Some((0, 1)));
        assert!(matches!(
            full_surplus_mechanism(&instances::appendix_no_full_surplus()),
            Err(Error::ConditionFailed(0, 1))
        ));
    }

    #[test]
    fn arc_condition_depends_on_n() {
        for n in 1..=2 {
            let d = instances::hart_nisan_arc(n, 0.05).unwrap();
            assert!(full_surplus_condition(&d).holds, "n = {n}");
        }
        // the y > x class carries mass of order ε^(n/2+1), so its conditional
        // mean of product 0 dwarfs the mean of the x ≥ y class
        for n in 3..=6 {
            let d = instances::hart_nisan_arc(n, 0.05).unwrap();
            assert_eq!(full_surplus_condition(&d).witness, Some((0, 1)), "n = {n}");
        }
    }

    #[test]
    fn iid_two_point_grid() {
        let d = ValueDistribution::new(
            2,
            vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![2.0, 1.0], vec![2.0, 2.0]],
            vec![0.25; 4],
        )
        .unwrap();
        let mech = full_surplus_mechanism(&d).unwrap();
        let rev = revenue(&d, &induce_mechanism(&d, &mech).unwrap()).unwrap();
        assert!((rev - 1.75).abs() < 1e-9);
        assert!((optimal_welfare(&d) - 1.75).abs() < 1e-12);
    }

    #[test]
    fn ties_can_break_the_condition_for_exchangeable_values() {
        // (2,2) is assigned to product 0 by the lowest-index rule, so class 0
        // is {(2,2),(1,0)} and class 1 is {(0,1)}: E[v_1 | class 1] = 1 while
        // E[v_1 | class 0] = 4/3.
        let d = ValueDistribution::new(
            2,
            vec![vec![2.0, 2.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![0.5, 0.25, 0.25],
        )
        .unwrap();
        assert!(is_exchangeable(&d).unwrap());
        assert_eq!(full_surplus_condition(&d).witness, Some((1, 0)));
    }

    #[test]
    fn affiliation_examples() {
        let grid = ValueDistribution::new(
            2,
            vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![2.0, 1.0], vec![2.0, 2.0]],
            vec![0.4, 0.1, 0.1, 0.4],
        )
        .unwrap();
        let check = is_negatively_affiliated(&grid);
        assert!(!check.holds);
        assert_eq!(check.witness, Some((1, 2)));

        let independent = ValueDistribution::new(
            2,
            vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![2.0, 1.0], vec![2.0, 2.0]],
            vec![0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4],
        )
        .unwrap();
        assert!(is_negatively_affiliated(&independent).holds);

        assert!(is_negatively_affiliated(&instances::appendix_no_full_surplus()).holds);
    }

    #[test]
    fn exchangeability() {
        let pair = ValueDistribution::new(2, vec![vec![3.0, 1.0], vec![1.0, 3.0]], vec![0.5, 0.5]).unwrap();
        assert!(is_exchangeable(&pair).unwrap());
        assert!(!is_exchangeable(&instances::tight_uniform_example(0.1).unwrap()).unwrap());
        let one = ValueDistribution::new(1, vec![vec![3.0], vec![1.0]], vec![0.2, 0.8]).unwrap();
        assert!(is_exchangeable(&one).unwrap());
        let wide = ValueDistribution::new(9, vec![vec![1.0; 9]], vec![1.0]).unwrap();
        assert!(is_exchangeable(&wide).is_err());
    }

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(5).len(), 120);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
    }
}
