//! Constructive pricing mechanisms with approximation certificates.

pub mod conditions;
mod two_price;

pub use conditions::{
    full_surplus_condition, full_surplus_mechanism, is_exchangeable, is_negatively_affiliated,
    own_mean_pricing, ConditionCheck,
};
pub use two_price::{two_price, TwoPriceParams, RIGHT_SHIFT};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::disclosure::{horizontal_disclosure, max_uniform_price, top_item_profile};
use crate::model::{
    optimal_welfare, pricing_revenue, signal_stats, InformationStructure, PricingMechanism,
    ValueDistribution,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Uniform price at the largest price that still sells with probability one.
    Uniform,
    /// Two-price construction, low-welfare case.
    LowWelfare,
    /// Two-price construction, high welfare with a large flow.
    FlowSaturated,
    /// Two-price construction, high welfare with a small flow.
    FlowDeficient,
    /// No branch verified; only the uniform guarantee applies.
    FallbackUniform,
    /// Best of three for two products: product 0 alone, no information.
    M1,
    /// Best of three: product 1 alone, no information.
    M2,
    /// Best of three: horizontal disclosure with two prices.
    M3,
    FullSurplus,
    /// OPT-Wel is zero; nothing is sold.
    Degenerate,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Uniform => "uniform",
            Branch::LowWelfare => "low-welfare",
            Branch::FlowSaturated => "flow-saturated",
            Branch::FlowDeficient => "flow-deficient",
            Branch::FallbackUniform => "fallback-uniform",
            Branch::M1 => "m1",
            Branch::M2 => "m2",
            Branch::M3 => "m3",
            Branch::FullSurplus => "full-surplus",
            Branch::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub name: String,
    pub revenue: f64,
}

/// A constructed mechanism together with the guarantee it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionCertificate {
    pub branch: Branch,
    pub mechanism: PricingMechanism,
    /// Fraction of OPT-Wel the revenue is certified to reach.
    pub guarantee: f64,
    pub revenue: f64,
    pub opt_wel: f64,
    /// Every mechanism evaluated on the way, with its revenue.
    pub candidates: Vec<Candidate>,
}

impl ConstructionCertificate {
    pub fn ratio(&self) -> f64 {
        if self.opt_wel > 0.0 {
            self.revenue / self.opt_wel
        } else {
            1.0
        }
    }

    /// `revenue ≥ guarantee·OPT-Wel − 1e-6`.
    pub fn holds(&self) -> bool {
        self.revenue >= self.guarantee * self.opt_wel - 1e-6
    }
}

fn degenerate(dist: &ValueDistribution) -> ConstructionCertificate {
    ConstructionCertificate {
        branch: Branch::Degenerate,
        mechanism: PricingMechanism::empty(dist),
        guarantee: 0.0,
        revenue: 0.0,
        opt_wel: 0.0,
        candidates: Vec::new(),
    }
}

/// Uniform price on every product under the pooling plan at `p*`. The price
/// is lowered to the smallest pooled own-product posterior when bisection
/// left it a hair above.
pub fn uniform_half(dist: &ValueDistribution) -> Result<ConstructionCertificate> {
    let opt_wel = optimal_welfare(dist);
    if opt_wel <= 0.0 {
        return Ok(degenerate(dist));
    }
    let (p_star, plan) = max_uniform_price(dist)?;
    let stats = signal_stats(dist, &plan.info)?;
    // the signal of product i ∈ I₊ is the only one whose label contains i
    let mut price = p_star;
    for (s, label) in plan.info.signals().iter().enumerate() {
        for &i in &plan.i_plus {
            if label.contains_product(i) {
                price = price.min(stats.nu[s][i]);
            }
        }
    }
    let mechanism = PricingMechanism::uniform(plan.info, dist.m(), price);
    let revenue = pricing_revenue(dist, &mechanism)?;
    Ok(ConstructionCertificate {
        branch: Branch::Uniform,
        mechanism,
        guarantee: 0.5,
        revenue,
        opt_wel,
        candidates: vec![Candidate {
            name: "uniform".into(),
            revenue,
        }],
    })
}

/// For two products: the better of selling product 0 alone at its prior
/// mean, product 1 alone at its prior mean, and horizontal disclosure with
/// the two prices from the three-mechanism argument.
pub fn best_of_three_two_products(dist: &ValueDistribution) -> Result<ConstructionCertificate> {
    if dist.m() != 2 {
        return Err(Error::DimensionMismatch {
            what: "products",
            expected: 2,
            found: dist.m(),
        });
    }
    let opt_wel = optimal_welfare(dist);
    if opt_wel <= 0.0 {
        return Ok(degenerate(dist));
    }
    let mean = dist.prior_mean();
    let none = InformationStructure::no_information(dist.len());
    let m1 = PricingMechanism::new(none.clone(), vec![mean[0], f64::INFINITY]);
    let m2 = PricingMechanism::new(none, vec![f64::INFINITY, mean[1]]);
    let m3 = three_mechanism(dist);

    let mut best: Option<(Branch, PricingMechanism, f64)> = None;
    let mut candidates = Vec::with_capacity(3);
    for (branch, mech) in [(Branch::M1, m1), (Branch::M2, m2), (Branch::M3, m3)] {
        let revenue = pricing_revenue(dist, &mech)?;
        candidates.push(Candidate {
            name: branch.as_str().into(),
            revenue,
        });
        if best.as_ref().is_none_or(|b| revenue > b.2 + 1e-12) {
            best = Some((branch, mech, revenue));
        }
    }
    let (branch, mechanism, revenue) = best.expect("three candidates");
    Ok(ConstructionCertificate {
        branch,
        mechanism,
        guarantee: 2.0 / 3.0,
        revenue,
        opt_wel,
        candidates,
    })
}

fn three_mechanism(dist: &ValueDistribution) -> PricingMechanism {
    let profile = top_item_profile(dist);
    let info = horizontal_disclosure(dist);
    let prices = match (profile.own(0), profile.own(1)) {
        (Some(_), Some(_)) => {
            // relabel so that `hi` has the larger own-class mean
            let (lo, hi) = if profile.own(1) >= profile.own(0) { (0, 1) } else { (1, 0) };
            let nu = |i, j| profile.nu(i, j).expect("nonempty class");
            let p_lo = nu(lo, lo);
            let p_hi = nu(hi, hi) - (nu(lo, hi) - nu(lo, lo)).max(0.0);
            let mut p = [0.0; 2];
            p[lo] = p_lo;
            p[hi] = p_hi;
            vec![p[0], p[1]]
        }
        (own0, own1) => vec![own0.unwrap_or(f64::INFINITY), own1.unwrap_or(f64::INFINITY)],
    };
    PricingMechanism::new(info, prices)
}
