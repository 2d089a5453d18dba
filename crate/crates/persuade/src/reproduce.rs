//! Claimed values for the named instances and the random-instance
//! properties, each recomputed and compared against its tolerance.

use std::sync::OnceLock;

use anyhow::Result;
use persuade_core::approx::{
    best_of_three_two_products, full_surplus_condition, is_exchangeable, own_mean_pricing,
    two_price, uniform_half, Branch, ConstructionCertificate, TwoPriceParams,
};
use persuade_core::disclosure::{horizontal_disclosure, is_coarse_horizontal, max_uniform_price};
use persuade_core::instances::{self, generate, Family, GeneratorSpec};
use persuade_core::model::{
    audit_ic_ir, induce_mechanism, optimal_welfare, pricing_revenue, revenue, signal_stats,
};
use persuade_core::oracle::binary::{binary_sweep, binary_support_optimal};
use persuade_core::oracle::dual::{dual_bound_directed, dual_bound_two_signals, min_flow_dual_bound};
use persuade_core::oracle::menu::{optimal_mechanism, optimal_menu_lp};
use persuade_core::oracle::partition::{best_partition_design, efficient_partition_design};
use persuade_core::oracle::pricing::best_pricing;
use persuade_core::oracle::{certify, CertifyOptions, GridConfig};
use persuade_core::InformationStructure;

use crate::format::{Cell, Table};

pub const CRITERIA: std::ops::RangeInclusive<u8> = 1..=11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }

    fn holds(self, computed: f64, paper: f64, tol: f64) -> bool {
        match self {
            Relation::Eq => (computed - paper).abs() <= tol,
            Relation::Le => computed <= paper + tol,
            Relation::Ge => computed >= paper - tol,
            Relation::Lt => computed < paper,
            Relation::Gt => computed > paper,
        }
    }
}

/// One claim: `computed relation paper` within `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub criterion: u8,
    pub id: String,
    pub paper: f64,
    pub relation: Relation,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

impl Row {
    pub fn compare(criterion: u8, id: &str, paper: f64, relation: Relation, computed: f64, tolerance: f64) -> Self {
        Self {
            criterion,
            id: id.into(),
            paper,
            relation,
            computed,
            tolerance,
            pass: relation.holds(computed, paper, tolerance),
            note: String::new(),
        }
    }

    /// `passed` of `total` instances satisfied the property.
    pub fn count(criterion: u8, id: &str, passed: usize, total: usize) -> Self {
        Self::compare(criterion, id, total as f64, Relation::Eq, passed as f64, 0.0)
            .with_note(format!("{passed}/{total} instances"))
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if self.note.is_empty() {
            self.note = note;
        } else {
            self.note = format!("{}; {note}", self.note);
        }
        self
    }
}

pub fn table(rows: &[Row]) -> Table {
    let mut t = Table::new(&["criterion", "claim", "paper", "relation", "computed", "tolerance", "pass", "note"]);
    for r in rows {
        t.push(vec![
            Cell::Int(r.criterion as i64),
            r.id.as_str().into(),
            r.paper.into(),
            r.relation.symbol().into(),
            r.computed.into(),
            r.tolerance.into(),
            r.pass.into(),
            r.note.as_str().into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy)]
pub struct ReproduceOptions {
    /// First seed of every random sample; instance `i` uses `seed + i`.
    pub seed: u64,
    pub correlated: usize,
    pub two_product: usize,
    pub full_surplus: usize,
    pub binary: usize,
    pub two_signal: usize,
    /// Grid for the global bracket on the no-full-surplus example.
    pub certify_grid: GridConfig,
    /// Grid for the two-signal sweeps on the lottery example.
    pub sweep_grid: GridConfig,
    /// Base grid for the random two-point instances.
    pub binary_grid: GridConfig,
    pub two_price: TwoPriceParams,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            correlated: 500,
            two_product: 500,
            full_surplus: 200,
            binary: 100,
            two_signal: 200,
            certify_grid: GridConfig::default(),
            sweep_grid: GridConfig::coarse(0.01),
            binary_grid: GridConfig::coarse(0.05),
            two_price: TwoPriceParams::default(),
        }
    }
}

struct Sample {
    opt_wel: f64,
    uniform: ConstructionCertificate,
    two_price: ConstructionCertificate,
    contained: bool,
}

/// Runs the criteria and caches the random sample the uniform and two-price
/// criteria share.
pub struct Reproducer {
    opts: ReproduceOptions,
    sample: OnceLock<Vec<Sample>>,
}

fn seeds(base: u64, n: usize) -> impl Iterator<Item = u64> {
    (0..n as u64).map(move |i| base.wrapping_add(i))
}

impl Reproducer {
    pub fn new(opts: ReproduceOptions) -> Self {
        Self {
            opts,
            sample: OnceLock::new(),
        }
    }

    pub fn run(&self, criteria: &[u8]) -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for &c in criteria {
            rows.extend(self.criterion(c)?);
        }
        Ok(rows)
    }

    pub fn all(&self) -> Result<Vec<Row>> {
        self.run(&CRITERIA.collect::<Vec<_>>())
    }

    pub fn criterion(&self, n: u8) -> Result<Vec<Row>> {
        match n {
            1 => example_one(),
            2 => lottery(&self.opts),
            3 => tight_uniform(),
            4 => self.uniform_property(),
            5 => self.two_price_property(),
            6 => two_products(&self.opts),
            7 => full_surplus(&self.opts),
            8 => arc(),
            9 => horizontal_subopt(),
            10 => no_full_surplus(&self.opts),
            11 => oracle_coherence(&self.opts),
            other => anyhow::bail!("no criterion {other}; expected 1..=11"),
        }
    }

    fn sample(&self) -> Result<&[Sample]> {
        if let Some(s) = self.sample.get() {
            return Ok(s);
        }
        let mut out = Vec::with_capacity(self.opts.correlated);
        for seed in seeds(self.opts.seed, self.opts.correlated) {
            let dist = generate(&GeneratorSpec::with_ranges(Family::Correlated, (1, 5), (1, 12), seed))?;
            let (_, plan) = max_uniform_price(&dist)?;
            out.push(Sample {
                opt_wel: optimal_welfare(&dist),
                uniform: uniform_half(&dist)?,
                two_price: two_price(&dist, &self.opts.two_price)?,
                contained: is_coarse_horizontal(&dist, &plan.info),
            });
        }
        Ok(self.sample.get_or_init(|| out))
    }

    fn uniform_property(&self) -> Result<Vec<Row>> {
        let sample = self.sample()?;
        let n = sample.len();
        let ok = sample.iter().filter(|s| s.uniform.revenue >= 0.5 * s.opt_wel - 1e-6).count();
        let min = sample.iter().map(|s| s.uniform.ratio()).fold(f64::INFINITY, f64::min);
        let contained = sample.iter().filter(|s| s.contained).count();
        Ok(vec![
            Row::compare(4, "uniform-half-min-ratio", 0.5, Relation::Ge, min, 1e-6)
                .with_note(format!("{ok}/{n} instances clear 0.5·OPT-Wel − 1e-6")),
            Row::count(4, "coarse-containment", contained, n),
        ])
    }

    fn two_price_property(&self) -> Result<Vec<Row>> {
        let sample = self.sample()?;
        let n = sample.len();
        let min_gain = sample
            .iter()
            .map(|s| s.two_price.revenue - s.uniform.revenue)
            .fold(f64::INFINITY, f64::min);
        let target = 0.5017;
        let certified: Vec<&Sample> = sample
            .iter()
            .filter(|s| !matches!(s.two_price.branch, Branch::FallbackUniform | Branch::Degenerate))
            .collect();
        let ok = certified
            .iter()
            .filter(|s| s.two_price.revenue >= target * s.opt_wel - 1e-6)
            .count();
        let min_certified = certified.iter().map(|s| s.two_price.ratio()).fold(f64::INFINITY, f64::min);
        let min_all = sample.iter().map(|s| s.two_price.ratio()).fold(f64::INFINITY, f64::min);
        let p = &self.opts.two_price;
        Ok(vec![
            Row::compare(5, "two-price-minus-uniform", 0.0, Relation::Ge, min_gain, 1e-9),
            Row::compare(5, "two-price-certified-min-ratio", target, Relation::Ge, min_certified, 1e-6).with_note(format!(
                "{ok}/{} certified branches clear the target; {} fall back; min ratio over all {min_all}",
                certified.len(),
                n - certified.len()
            )),
            Row::compare(5, "two-price-closing-inequality", p.target(), Relation::Gt, p.closing_lhs(), 0.0)
                .with_note(format!("c = {}, w̄ = {}", p.c(), p.w_bar())),
        ])
    }
}

fn example_one() -> Result<Vec<Row>> {
    let d = instances::example_complex_info();
    let pooled = best_partition_design(&d, 8)?.revenue;
    let efficient = efficient_partition_design(&d, 8)?.revenue;
    let none = optimal_menu_lp(&signal_stats(&d, &InformationStructure::no_information(d.len()))?)?.revenue;
    Ok(vec![
        Row::compare(1, "ex1-pooling-rev", 5.0, Relation::Ge, pooled, 1e-9),
        Row::compare(1, "ex1-efficient-rev", 4.4, Relation::Eq, efficient, 1e-9),
        Row::compare(1, "ex1-no-info-rev", 4.4, Relation::Eq, none, 1e-9),
    ])
}

fn lottery(opts: &ReproduceOptions) -> Result<Vec<Row>> {
    let d = instances::appendix_pricing_subopt();
    let (menu, _) = optimal_mechanism(&d, &InformationStructure::full_disclosure(d.len()))?;
    let sweep = binary_sweep(&d, opts.sweep_grid, |s| Ok(best_pricing(s, None)?.revenue))?;
    let mask = [false, true, true];
    let branch = binary_sweep(&d, opts.sweep_grid, |s| Ok(best_pricing(s, Some(&mask))?.revenue))?;
    Ok(vec![
        Row::compare(2, "a6-lottery", 12.25, Relation::Eq, menu, 1e-9),
        Row::compare(2, "ex2-pricing-sweep", 12.0, Relation::Le, sweep.value, 1e-6)
            .with_note(format!("best at α = {:?}", sweep.alpha)),
        Row::compare(2, "a6-products-23", 10.5, Relation::Le, branch.value, 1e-6)
            .with_note(format!("best at α = {:?}", branch.alpha)),
    ])
}

fn tight_uniform() -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for eps in [0.1, 0.01] {
        let d = instances::tight_uniform_example(eps)?;
        let full = best_pricing(&signal_stats(&d, &InformationStructure::full_disclosure(d.len()))?, None)?.revenue;
        let uniform = uniform_half(&d)?;
        rows.push(Row::compare(3, &format!("tight-full-pricing(eps={eps})"), 2.0 - eps, Relation::Eq, full, 1e-9));
        rows.push(Row::compare(3, &format!("tight-uniform-rev(eps={eps})"), 1.0, Relation::Le, uniform.revenue, 1e-9));
        if eps == 0.01 {
            rows.push(Row::compare(3, "tight-uniform-ratio(eps=0.01)", 0.5026, Relation::Le, uniform.ratio(), 0.0));
        }
    }
    Ok(rows)
}

fn two_products(opts: &ReproduceOptions) -> Result<Vec<Row>> {
    let n = opts.two_product;
    let (mut sum_ok, mut best_ok) = (0, 0);
    let (mut min_sum, mut min_best) = (f64::INFINITY, f64::INFINITY);
    for seed in seeds(opts.seed, n) {
        let family = if seed % 2 == 0 { Family::Correlated } else { Family::TwoScale };
        let d = generate(&GeneratorSpec::with_ranges(family, (2, 2), (2, 12), seed))?;
        let cert = best_of_three_two_products(&d)?;
        let opt = optimal_welfare(&d);
        let sum: f64 = cert.candidates.iter().map(|c| c.revenue).sum();
        sum_ok += usize::from(sum >= 2.0 * opt - 1e-6);
        best_ok += usize::from(cert.revenue >= 2.0 / 3.0 * opt - 1e-6);
        min_sum = min_sum.min(sum / opt);
        min_best = min_best.min(cert.ratio());
    }
    let eps = 0.01;
    let d = instances::two_item_hardness(eps)?;
    let stats = signal_stats(&d, &InformationStructure::full_disclosure(d.len()))?;
    let dual = dual_bound_directed(&stats, 1, stats.r[1])?;
    let opt = optimal_welfare(&d);
    Ok(vec![
        Row::compare(6, "three-mechanism-sum-min-ratio", 2.0, Relation::Ge, min_sum, 1e-6)
            .with_note(format!("{sum_ok}/{n} instances clear 2·OPT-Wel − 1e-6")),
        Row::compare(6, "best-of-three-min-ratio", 2.0 / 3.0, Relation::Ge, min_best, 1e-6)
            .with_note(format!("{best_ok}/{n} instances")),
        Row::compare(6, "lemma2-dual", 2.0 + 2.0 * eps, Relation::Le, dual, 1e-9),
        Row::compare(6, "lemma2-opt-wel", 3.0 - eps, Relation::Eq, opt, 1e-9)
            .with_note(format!("gap OPT-Wel / dual = {}", opt / dual)),
    ])
}

struct SurplusTally {
    condition: usize,
    revenue: usize,
    audit: usize,
    witnesses: Vec<(u64, usize, usize)>,
}

fn surplus_tally(family: Family, m: (usize, usize), size: (usize, usize), opts: &ReproduceOptions) -> Result<SurplusTally> {
    let mut t = SurplusTally {
        condition: 0,
        revenue: 0,
        audit: 0,
        witnesses: Vec::new(),
    };
    for seed in seeds(opts.seed, opts.full_surplus) {
        let d = generate(&GeneratorSpec::with_ranges(family, m, size, seed))?;
        let check = full_surplus_condition(&d);
        if let Some((i, j)) = check.witness {
            t.witnesses.push((seed, i, j));
        }
        t.condition += usize::from(check.holds);
        let mech = induce_mechanism(&d, &own_mean_pricing(&d))?;
        let rev = revenue(&d, &mech)?;
        t.revenue += usize::from((rev - optimal_welfare(&d)).abs() <= 1e-9 * d.scale().max(1.0));
        t.audit += usize::from(audit_ic_ir(&d, &mech, 1e-9)?.is_clean());
    }
    Ok(t)
}

fn full_surplus(opts: &ReproduceOptions) -> Result<Vec<Row>> {
    let n = opts.full_surplus;
    let mut rows = Vec::new();
    let neg = surplus_tally(Family::NegAffiliated, (2, 4), (2, 3), opts)?;
    let failures = |t: &SurplusTally| -> String {
        let list: Vec<String> = t.witnesses.iter().take(5).map(|(s, i, j)| format!("seed {s}: ({i}, {j})")).collect();
        if list.is_empty() {
            String::new()
        } else {
            format!("condition fails at {}", list.join(", "))
        }
    };
    rows.push(Row::count(7, "neg-affiliated-condition", neg.condition, n).with_note(failures(&neg)));
    rows.push(Row::count(7, "neg-affiliated-revenue-equals-opt-wel", neg.revenue, n));
    rows.push(Row::count(7, "neg-affiliated-audit-clean", neg.audit, n));
    let exch = surplus_tally(Family::Exchangeable, (1, 4), (1, 4), opts)?;
    let mut exchangeable = 0;
    for seed in seeds(opts.seed, n) {
        let d = generate(&GeneratorSpec::with_ranges(Family::Exchangeable, (1, 4), (1, 4), seed))?;
        exchangeable += usize::from(is_exchangeable(&d)?);
    }
    rows.push(Row::count(7, "exchangeable-check", exchangeable, n));
    rows.push(Row::count(7, "exchangeable-condition", exch.condition, n).with_note(failures(&exch)));
    rows.push(Row::count(7, "exchangeable-revenue-equals-opt-wel", exch.revenue, n));
    rows.push(Row::count(7, "exchangeable-audit-clean", exch.audit, n));
    Ok(rows)
}

fn arc() -> Result<Vec<Row>> {
    let eps = 0.05;
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for n in [2, 4, 6] {
        let d = instances::hart_nisan_arc(n, eps)?;
        let opt = optimal_welfare(&d);
        let rev = pricing_revenue(&d, &own_mean_pricing(&d))?;
        let holds = full_surplus_condition(&d);
        rows.push(
            Row::compare(8, &format!("arc-full-surplus(n={n})"), opt, Relation::Eq, rev, 1e-9)
                .with_note(format!("condition holds: {}", holds.holds)),
        );
        let stats = signal_stats(&d, &InformationStructure::full_disclosure(d.len()))?;
        let pricing = best_pricing(&stats, None)?.revenue;
        let menu = optimal_menu_lp(&stats)?.revenue;
        ratios.push((n, pricing / menu));
    }
    for w in ratios.windows(2) {
        let ((n0, r0), (n1, r1)) = (w[0], w[1]);
        rows.push(
            Row::compare(8, &format!("arc-pricing-menu-ratio(n={n1})"), r0, Relation::Lt, r1, 0.0)
                .with_note(format!("ratio at n={n0} is the reference")),
        );
    }
    Ok(rows)
}

fn horizontal_subopt() -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for n in [3, 5, 8] {
        let d = instances::appendix_horizontal_subopt(n)?;
        let norm = 1.0 - 0.5f64.powi(n as i32);
        let none = optimal_menu_lp(&signal_stats(&d, &InformationStructure::no_information(d.len()))?)?.revenue;
        let horizontal = optimal_menu_lp(&signal_stats(&d, &horizontal_disclosure(&d))?)?.revenue;
        let ratio = none / horizontal;
        rows.push(Row::compare(9, &format!("b1-no-info(n={n})"), n as f64 / norm, Relation::Ge, none, 1e-6));
        rows.push(Row::compare(9, &format!("b1-horizontal-menu(n={n})"), 1.0 / norm, Relation::Le, horizontal, 1e-6 + 1e-5));
        rows.push(Row::compare(9, &format!("b1-ratio(n={n})"), n as f64, Relation::Eq, ratio, 0.01 * n as f64));
    }
    Ok(rows)
}

fn no_full_surplus(opts: &ReproduceOptions) -> Result<Vec<Row>> {
    let d = instances::appendix_no_full_surplus();
    let (horizontal, _) = optimal_mechanism(&d, &horizontal_disclosure(&d))?;
    let options = CertifyOptions {
        grid: opts.certify_grid,
        two_price: opts.two_price,
        ..CertifyOptions::default()
    };
    let b = certify(&d, &options)?.bound;
    Ok(vec![
        Row::compare(10, "b2-horizontal-opt", 5.5, Relation::Eq, horizontal, 1e-9),
        Row::compare(10, "b2-certify-lower", 7.0, Relation::Eq, b.lower, 1e-3)
            .with_note(format!("witness {}", b.lower_witness.source)),
        Row::compare(10, "b2-certify-upper", 7.5, Relation::Eq, b.upper, 1e-9)
            .with_note(b.upper_provenance.as_str()),
        Row::compare(10, "b2-strict-gap", 0.0, Relation::Gt, b.upper - b.lower, 0.0),
    ])
}

fn oracle_coherence(opts: &ReproduceOptions) -> Result<Vec<Row>> {
    let n = opts.binary;
    let (mut below, mut monotone) = (0, 0);
    let mut worst = f64::NEG_INFINITY;
    for seed in seeds(opts.seed, n) {
        let d = generate(&GeneratorSpec::with_ranges(Family::Correlated, (1, 3), (2, 2), seed))?;
        let opt = optimal_welfare(&d);
        let bound = binary_support_optimal(&d, opts.binary_grid)?;
        below += usize::from(bound.lower <= opt + 1e-6);
        worst = worst.max(bound.lower - opt);
        let design = binary_sweep(&d, opts.binary_grid, |s| Ok(optimal_menu_lp(s)?.revenue))?;
        let coarse = binary_sweep(&d, opts.binary_grid.without_refinement(), |s| Ok(optimal_menu_lp(s)?.revenue))?;
        monotone += usize::from(design.value >= design.base_value && design.value >= coarse.value - 1e-12);
    }
    let m = opts.two_signal;
    let mut dominated = 0;
    for seed in seeds(opts.seed, m) {
        let d = generate(&GeneratorSpec::with_ranges(Family::Correlated, (1, 4), (2, 2), seed ^ 0x5eed))?;
        let stats = signal_stats(&d, &InformationStructure::full_disclosure(2))?;
        let menu = optimal_menu_lp(&stats)?.revenue;
        let tol = 1e-9 * stats.scale().max(1.0);
        let bounds = [
            min_flow_dual_bound(&stats)?,
            dual_bound_two_signals(&stats, 0.0)?,
            dual_bound_two_signals(&stats, 0.5 * stats.r[0])?,
            dual_bound_two_signals(&stats, stats.r[0])?,
            dual_bound_directed(&stats, 1, stats.r[1])?,
        ];
        dominated += usize::from(bounds.iter().all(|&b| b >= menu - tol));
    }
    Ok(vec![
        Row::count(11, "oracle-binary-below-opt-wel", below, n).with_note(format!("max lower − OPT-Wel = {worst}")),
        Row::count(11, "oracle-refinement-monotone", monotone, n),
        Row::count(11, "oracle-dual-dominates-menu", dominated, m),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Relation::Eq.holds(1.0, 1.0 + 1e-10, 1e-9));
        assert!(!Relation::Le.holds(2.0, 1.0, 0.5));
        assert!(Relation::Ge.holds(0.9, 1.0, 0.1));
        assert!(!Relation::Lt.holds(1.0, 1.0, 1.0));
        assert!(Relation::Gt.holds(1.0 + 1e-12, 1.0, 0.0));
    }

    #[test]
    fn counts_and_notes() {
        let r = Row::count(4, "x", 3, 4).with_note("more");
        assert!(!r.pass);
        assert_eq!(r.note, "3/4 instances; more");
        assert!(Row::count(4, "y", 0, 0).pass);
    }

    #[test]
    fn named_examples() {
        let rep = Reproducer::new(ReproduceOptions::default());
        let rows = rep.run(&[1, 3]).unwrap();
        let ex1 = rows.iter().find(|r| r.id == "ex1-pooling-rev").unwrap();
        assert!(ex1.pass && (ex1.computed - 5.0).abs() < 1e-9);
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
        assert!(rep.criterion(12).is_err());
    }
}
