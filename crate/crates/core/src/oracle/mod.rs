//! Brute-force ground truth at desk scale: LP and flow solvers, the
//! optimal-menu LP, exhaustive and grid searches over information
//! structures, and a flow-based dual bound for two posterior types.

pub mod binary;
pub mod dual;
pub mod flow;
pub mod lp;
pub mod menu;
pub mod partition;
pub mod pricing;

use alloc::string::String;
use alloc::vec::Vec;

use crate::approx::{
    best_of_three_two_products, full_surplus_condition, full_surplus_mechanism, two_price,
    uniform_half, Candidate, TwoPriceParams,
};
use crate::model::{
    audit_ic_ir, induce_mechanism, optimal_welfare, revenue, signal_stats, InformationStructure,
    Mechanism, PricingMechanism, ValueDistribution,
};
use crate::{Error, Result};

pub use binary::GridConfig;
pub use partition::DEFAULT_MAX_SUPPORT;

/// Tolerance at which the winning witness is re-audited.
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    OptWel,
    DualFlow,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::OptWel => "opt-wel",
            Provenance::DualFlow => "dual-flow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub source: String,
    pub mechanism: Mechanism,
}

/// Two-sided bracket on the optimal revenue.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleBound {
    pub lower: f64,
    pub lower_witness: Witness,
    pub upper: f64,
    pub upper_provenance: Provenance,
    /// For two support points: the smallest flow dual bound on the fully
    /// revealing structure (both directions and zero flow). It bounds what
    /// full disclosure can earn, not the joint design, so it never replaces
    /// `upper`.
    pub dual_flow: Option<f64>,
}

impl OracleBound {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// `lower ≤ upper + 1e-6`.
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper + 1e-6
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub max_support: usize,
    pub grid: GridConfig,
    pub two_price: TwoPriceParams,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            max_support: DEFAULT_MAX_SUPPORT,
            grid: GridConfig::default(),
            two_price: TwoPriceParams::default(),
        }
    }
}

/// Full bracket together with the revenue of every lower-bound source.
#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub bound: OracleBound,
    pub sources: Vec<Candidate>,
}

/// Lower bound: best of the partition search, the binary grid (two support
/// points only) and every constructive mechanism. Upper bound: OPT-Wel.
pub fn certify(dist: &ValueDistribution, options: &CertifyOptions) -> Result<Certification> {
    let partition = partition::best_partition_design(dist, options.max_support)?;
    let mut witnesses: Vec<(String, f64, Mechanism)> = Vec::new();
    witnesses.push(("partition".into(), partition.revenue, partition.mechanism));

    let mut push_pricing = |name: &str, pricing: &PricingMechanism| -> Result<()> {
        let mech = induce_mechanism(dist, pricing)?;
        let rev = revenue(dist, &mech)?;
        witnesses.push((name.into(), rev, mech));
        Ok(())
    };
    push_pricing("uniform", &uniform_half(dist)?.mechanism)?;
    push_pricing("two-price", &two_price(dist, &options.two_price)?.mechanism)?;
    if dist.m() == 2 {
        push_pricing("best-of-three", &best_of_three_two_products(dist)?.mechanism)?;
    }
    if full_surplus_condition(dist).holds {
        push_pricing("full-surplus", &full_surplus_mechanism(dist)?)?;
    }

    let mut dual_flow = None;
    if dist.len() == 2 {
        let b = binary::binary_support_optimal(dist, options.grid)?;
        witnesses.push((b.lower_witness.source, b.lower, b.lower_witness.mechanism));
        let stats = signal_stats(dist, &InformationStructure::full_disclosure(2))?;
        dual_flow = Some(dual::min_flow_dual_bound(&stats)?);
    }

    let mut best = 0;
    for (i, w) in witnesses.iter().enumerate() {
        if w.1 > witnesses[best].1 + 1e-12 {
            best = i;
        }
    }
    let sources = witnesses
        .iter()
        .map(|(name, rev, _)| Candidate {
            name: name.clone(),
            revenue: *rev,
        })
        .collect();
    let (source, lower, mechanism) = witnesses.swap_remove(best);
    let audit = audit_ic_ir(dist, &mechanism, WITNESS_TOL)?;
    if !audit.is_clean() {
        return Err(Error::RejectedMechanism {
            max_violation: audit.max_violation,
        });
    }
    let bound = OracleBound {
        lower,
        lower_witness: Witness { source, mechanism },
        upper: optimal_welfare(dist),
        upper_provenance: Provenance::OptWel,
        dual_flow,
    };
    Ok(Certification { bound, sources })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn fast() -> CertifyOptions {
        CertifyOptions {
            grid: GridConfig::coarse(0.02),
            ..CertifyOptions::default()
        }
    }

    #[test]
    fn no_full_surplus_bracket() {
        let c = certify(&instances::appendix_no_full_surplus(), &fast()).unwrap();
        assert!((c.bound.lower - 7.0).abs() < 1e-3, "{}", c.bound.lower);
        assert!((c.bound.upper - 7.5).abs() < 1e-12);
        assert!(c.bound.gap() > 0.4);
    }

    #[test]
    fn exchangeable_pair_is_tight() {
        let d = ValueDistribution::new(2, alloc::vec![alloc::vec![3.0, 1.0], alloc::vec![1.0, 3.0]], alloc::vec![0.5, 0.5]).unwrap();
        let c = certify(&d, &fast()).unwrap();
        assert!((c.bound.lower - 3.0).abs() < 1e-9);
        assert!((c.bound.upper - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lottery_instance() {
        let c = certify(&instances::appendix_pricing_subopt(), &fast()).unwrap();
        assert!(c.bound.lower >= 12.25 - 1e-3);
        assert!(c.bound.is_consistent());
    }

    #[test]
    fn size_limit() {
        let d = instances::hart_nisan_arc(8, 0.05).unwrap();
        assert!(matches!(certify(&d, &fast()), Err(Error::SizeLimit { .. })));
    }
}
