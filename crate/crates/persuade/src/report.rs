//! `solve` and `check`: every construction and oracle run on one instance.

use persuade_core::approx::{
    best_of_three_two_products, full_surplus_condition, full_surplus_mechanism, is_exchangeable,
    is_negatively_affiliated, two_price, uniform_half, ConditionCheck, ConstructionCertificate,
    TwoPriceParams,
};
use persuade_core::model::{optimal_welfare, pricing_revenue};
use persuade_core::oracle::{certify, Certification, CertifyOptions, GridConfig};
use persuade_core::ValueDistribution;
use serde_json::{json, Value};

use crate::format::{Cell, Table};
use crate::io::{bound_json, certificate_json};

/// Largest support size handed to the oracle.
pub const ORACLE_MAX_SUPPORT: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Absolute slack, scaled by `max(1, OPT-Wel)`, allowed in every check.
    pub tolerance: f64,
    pub grid: GridConfig,
    pub two_price: TwoPriceParams,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            grid: GridConfig::default(),
            two_price: TwoPriceParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        pass,
        detail,
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub name: Option<String>,
    pub m: usize,
    pub k: usize,
    pub opt_wel: f64,
    /// `(method, certificate)` in the order they ran.
    pub constructions: Vec<(String, ConstructionCertificate)>,
    pub condition: ConditionCheck,
    pub full_surplus_revenue: Option<f64>,
    pub oracle: Option<Certification>,
    pub checks: Vec<Check>,
}

impl SolveReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn certificate(&self, method: &str) -> Option<&ConstructionCertificate> {
        self.constructions.iter().find(|(m, _)| m == method).map(|(_, c)| c)
    }

    pub fn to_json(&self, dist: &ValueDistribution) -> persuade_core::Result<Value> {
        let mut constructions = serde_json::Map::new();
        for (method, cert) in &self.constructions {
            constructions.insert(method.clone(), certificate_json(dist, cert)?);
        }
        Ok(json!({
            "instance": { "name": self.name, "m": self.m, "K": self.k },
            "opt_wel": self.opt_wel,
            "constructions": constructions,
            "full_surplus": {
                "holds": self.condition.holds,
                "witness": self.condition.witness.map(|(i, j)| [i, j]),
                "revenue": self.full_surplus_revenue,
            },
            "oracle": self.oracle.as_ref().map(|c| bound_json(&c.bound)),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name, "pass": c.pass, "detail": c.detail,
            })).collect::<Vec<_>>(),
            "pass": self.passed(),
        }))
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["method", "branch", "revenue", "ratio", "guarantee"]);
        for (method, cert) in &self.constructions {
            t.push(vec![
                method.as_str().into(),
                cert.branch.as_str().into(),
                cert.revenue.into(),
                cert.ratio().into(),
                cert.guarantee.into(),
            ]);
        }
        if let Some(rev) = self.full_surplus_revenue {
            t.push(vec!["full-surplus".into(), "full-surplus".into(), rev.into(), ratio(rev, self.opt_wel).into(), 1.0.into()]);
        }
        if let Some(c) = &self.oracle {
            let b = &c.bound;
            t.push(vec!["oracle-lower".into(), b.lower_witness.source.as_str().into(), b.lower.into(), ratio(b.lower, self.opt_wel).into(), Cell::Empty]);
            t.push(vec!["oracle-upper".into(), b.upper_provenance.as_str().into(), b.upper.into(), ratio(b.upper, self.opt_wel).into(), Cell::Empty]);
        }
        t
    }

    pub fn checks_table(&self) -> Table {
        let mut t = Table::new(&["check", "pass", "detail"]);
        for c in &self.checks {
            t.push(vec![c.name.as_str().into(), c.pass.into(), c.detail.as_str().into()]);
        }
        t
    }
}

fn ratio(x: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        x / opt
    } else {
        1.0
    }
}

pub fn solve(dist: &ValueDistribution, opts: &SolveOptions) -> persuade_core::Result<SolveReport> {
    let opt_wel = optimal_welfare(dist);
    let tol = opts.tolerance * opt_wel.max(1.0);
    let mut checks = Vec::new();
    let mut constructions = Vec::new();

    let uniform = uniform_half(dist)?;
    checks.push(check(
        "uniform-half",
        uniform.revenue >= 0.5 * opt_wel - tol,
        format!("revenue {} vs 0.5·OPT-Wel {}", uniform.revenue, 0.5 * opt_wel),
    ));
    let two = two_price(dist, &opts.two_price)?;
    checks.push(check(
        "two-price-vs-uniform",
        two.revenue >= uniform.revenue - tol,
        format!("{} vs {}", two.revenue, uniform.revenue),
    ));
    checks.push(check(
        "two-price-guarantee",
        two.revenue >= two.guarantee * opt_wel - tol,
        format!("branch {} guarantee {}", two.branch.as_str(), two.guarantee),
    ));
    constructions.push(("uniform".to_string(), uniform));
    constructions.push(("two-price".to_string(), two));

    if dist.m() == 2 {
        let three = best_of_three_two_products(dist)?;
        let sum: f64 = three.candidates.iter().map(|c| c.revenue).sum();
        checks.push(check(
            "best-of-three",
            three.revenue >= 2.0 / 3.0 * opt_wel - tol && sum >= 2.0 * opt_wel - tol,
            format!("best {} sum {} OPT-Wel {}", three.revenue, sum, opt_wel),
        ));
        constructions.push(("best-of-three".to_string(), three));
    }

    let condition = full_surplus_condition(dist);
    let full_surplus_revenue = if condition.holds {
        let rev = pricing_revenue(dist, &full_surplus_mechanism(dist)?)?;
        checks.push(check(
            "full-surplus",
            (rev - opt_wel).abs() <= tol,
            format!("revenue {rev} vs OPT-Wel {opt_wel}"),
        ));
        Some(rev)
    } else {
        None
    };

    let oracle = if dist.len() <= ORACLE_MAX_SUPPORT {
        let options = CertifyOptions {
            max_support: ORACLE_MAX_SUPPORT,
            grid: opts.grid,
            two_price: opts.two_price,
        };
        let c = certify(dist, &options)?;
        let best_construction = constructions
            .iter()
            .map(|(_, cert)| cert.revenue)
            .chain(full_surplus_revenue)
            .fold(0.0, f64::max);
        checks.push(check(
            "oracle-bracket",
            c.bound.lower <= c.bound.upper + tol && c.bound.lower >= best_construction - tol,
            format!("[{}, {}]", c.bound.lower, c.bound.upper),
        ));
        Some(c)
    } else {
        None
    };

    Ok(SolveReport {
        name: dist.name().map(str::to_owned),
        m: dist.m(),
        k: dist.len(),
        opt_wel,
        constructions,
        condition,
        full_surplus_revenue,
        oracle,
        checks,
    })
}

/// The three distributional conditions with their witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub full_surplus: ConditionCheck,
    pub negatively_affiliated: ConditionCheck,
    /// `None` when there are too many products to enumerate permutations.
    pub exchangeable: Option<bool>,
}

impl ConditionReport {
    /// The full-surplus condition is the one with an operational consequence.
    pub fn passed(&self) -> bool {
        self.full_surplus.holds
    }

    pub fn table(&self) -> Table {
        let witness = |c: &ConditionCheck| -> Cell {
            c.witness.map_or(Cell::Empty, |(i, j)| format!("({i}, {j})").into())
        };
        let mut t = Table::new(&["condition", "holds", "witness"]);
        t.push(vec!["full-surplus".into(), self.full_surplus.holds.into(), witness(&self.full_surplus)]);
        t.push(vec![
            "negatively-affiliated".into(),
            self.negatively_affiliated.holds.into(),
            witness(&self.negatively_affiliated),
        ]);
        t.push(vec!["exchangeable".into(), self.exchangeable.into(), Cell::Empty]);
        t
    }

    pub fn to_json(&self) -> Value {
        let c = |c: &ConditionCheck| json!({ "holds": c.holds, "witness": c.witness.map(|(i, j)| [i, j]) });
        json!({
            "full_surplus": c(&self.full_surplus),
            "negatively_affiliated": c(&self.negatively_affiliated),
            "exchangeable": self.exchangeable,
        })
    }
}

pub fn check_conditions(dist: &ValueDistribution) -> ConditionReport {
    ConditionReport {
        full_surplus: full_surplus_condition(dist),
        negatively_affiliated: is_negatively_affiliated(dist),
        exchangeable: is_exchangeable(dist).ok(),
    }
}
