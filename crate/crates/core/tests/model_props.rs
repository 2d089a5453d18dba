mod common;

use common::{close, dist, dist_with_info};
use persuade_core::model::{
    audit_ic_ir, buyer_choice, induce_mechanism, optimal_welfare, pricing_revenue, revenue,
    signal_stats, welfare,
};
use persuade_core::{instances, InformationStructure, Mechanism, PricingMechanism, TieBreak};
use proptest::prelude::*;

fn prices(m: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(prop_oneof![4 => 0.0f64..10.0, 1 => Just(f64::INFINITY)], m)
}

proptest! {
    #![proptest_config(common::config(1000))]

    #[test]
    fn bayes_plausibility((d, info) in dist_with_info(4, 6, 4)) {
        let stats = signal_stats(&d, &info).unwrap();
        let total: f64 = stats.r.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let prior = d.prior_mean();
        for (a, b) in stats.mean().iter().zip(&prior) {
            prop_assert!(close(*a, *b, 1e-12), "{a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(common::config(300))]

    #[test]
    fn induced_pricing_is_ic_ir((d, info) in dist_with_info(4, 6, 4), seed in any::<u64>()) {
        let m = d.m();
        let p: Vec<f64> = (0..m).map(|i| ((seed >> (8 * i)) & 0xff) as f64 / 25.0).collect();
        let pricing = PricingMechanism::new(info, p);
        let mech = induce_mechanism(&d, &pricing).unwrap();
        let report = audit_ic_ir(&d, &mech, 1e-9).unwrap();
        prop_assert!(report.is_clean(), "{:?}", report);
        prop_assert!(report.max_violation <= 1e-9 * d.scale().max(1.0));
        let rev = revenue(&d, &mech).unwrap();
        prop_assert!(close(rev, pricing_revenue(&d, &pricing).unwrap(), 1e-12));
    }

    #[test]
    fn revenue_below_welfare_below_first_best(
        (d, info) in dist_with_info(4, 6, 4),
        p in prices(4),
    ) {
        let pricing = PricingMechanism::new(info, p[..d.m()].to_vec());
        let mech = induce_mechanism(&d, &pricing).unwrap();
        let rev = revenue(&d, &mech).unwrap();
        let wel = welfare(&d, &mech).unwrap();
        prop_assert!(rev <= wel + 1e-9 * d.scale().max(1.0));
        prop_assert!(wel <= optimal_welfare(&d) + 1e-9 * d.scale().max(1.0));
    }

    #[test]
    fn merging_signals_preserves_the_mean((d, info) in dist_with_info(4, 6, 4)) {
        prop_assume!(info.num_signals() >= 2);
        let merged = info.merge(0, info.num_signals() - 1).unwrap();
        let before = signal_stats(&d, &info).unwrap();
        let after = signal_stats(&d, &merged).unwrap();
        prop_assert_eq!(after.num_signals(), before.num_signals() - 1);
        for (a, b) in before.mean().iter().zip(after.mean()) {
            prop_assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn buyer_choice_is_a_best_response(
        nu in proptest::collection::vec(0.0f64..10.0, 1..5),
        p in prices(4),
    ) {
        let p = &p[..nu.len()];
        let c = buyer_choice(&nu, p, TieBreak::SellerOptimal);
        let best = nu.iter().zip(p).map(|(v, q)| v - q).fold(0.0f64, f64::max);
        match c.product {
            Some(i) => {
                prop_assert!(nu[i] - p[i] >= best - 1e-9);
                prop_assert_eq!(c.payment, p[i]);
            }
            None => {
                prop_assert!(best <= 1e-9);
                prop_assert_eq!(c.payment, 0.0);
            }
        }
    }

    #[test]
    fn first_best_is_expected_maximum(d in dist(4, 6)) {
        // full disclosure with zero prices realises the maximum at every point
        let pricing = PricingMechanism::uniform(InformationStructure::full_disclosure(d.len()), d.m(), 0.0);
        let mech = induce_mechanism(&d, &pricing).unwrap();
        prop_assert!(close(welfare(&d, &mech).unwrap(), optimal_welfare(&d), 1e-12));
    }
}

#[test]
fn example_one_audits() {
    let d = instances::example_complex_info();
    let info = InformationStructure::from_partition(&[0, 1, 1]);
    let honest = induce_mechanism(&d, &PricingMechanism::new(info.clone(), vec![9.0, 4.0])).unwrap();
    assert!(audit_ic_ir(&d, &honest, 1e-9).unwrap().is_clean());

    // forcing the top signal to buy product 0 at 10 leaves it with zero
    // utility while the pooled option offers 1
    let forced = Mechanism::new(
        info,
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![10.0, 4.0],
    )
    .unwrap();
    let report = audit_ic_ir(&d, &forced, 1e-9).unwrap();
    assert_eq!(report.ic_violations.len(), 1);
    assert_eq!(report.ic_violations[0].signal, 0);
    assert!((report.ic_violations[0].gain - 1.0).abs() < 1e-12);
    assert!(revenue(&d, &forced).is_err());
}

#[test]
fn single_signal_has_no_deviation() {
    let d = instances::appendix_horizontal_subopt(4).unwrap();
    let best = d.prior_mean().into_iter().fold(0.0, f64::max);
    let mech = induce_mechanism(
        &d,
        &PricingMechanism::uniform(InformationStructure::no_information(d.len()), d.m(), best),
    )
    .unwrap();
    assert!(audit_ic_ir(&d, &mech, 1e-9).unwrap().is_clean());
}
