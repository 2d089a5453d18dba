//! The buyer/seller model: value distributions, information structures,
//! posterior statistics, mechanisms and the functionals evaluated on them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{scaled_tol, Error, Result, DEFAULT_TOL};

/// Probability masses must add up to one within this bound.
pub const MASS_TOL: f64 = 1e-12;

/// Finite-support joint distribution of the buyer's values for `m` products.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueDistribution {
    m: usize,
    support: Vec<Vec<f64>>,
    prob: Vec<f64>,
    name: Option<String>,
}

impl ValueDistribution {
    pub fn new(m: usize, support: Vec<Vec<f64>>, prob: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution("m must be at least 1".into()));
        }
        if support.is_empty() {
            return Err(Error::InvalidDistribution("support is empty".into()));
        }
        if support.len() != prob.len() {
            return Err(Error::DimensionMismatch {
                what: "prob",
                expected: support.len(),
                found: prob.len(),
            });
        }
        for (k, v) in support.iter().enumerate() {
            if v.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "support point",
                    expected: m,
                    found: v.len(),
                });
            }
            if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "support point {k} has invalid value {x}"
                )));
            }
        }
        for (k, &f) in prob.iter().enumerate() {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "probability {k} is {f}, must be positive"
                )));
            }
        }
        let total: f64 = prob.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        for a in 0..support.len() {
            for b in a + 1..support.len() {
                if support[a] == support[b] {
                    return Err(Error::InvalidDistribution(format!(
                        "support points {a} and {b} coincide"
                    )));
                }
            }
        }
        Ok(Self {
            m,
            support,
            prob,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Number of products.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.support[k]
    }

    pub fn prior_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.m];
        for (v, &f) in self.support.iter().zip(&self.prob) {
            for (acc, &x) in mean.iter_mut().zip(v) {
                *acc += f * x;
            }
        }
        mean
    }

    /// Product with the highest value at support point `k`; ties go to the
    /// lowest index.
    pub fn top_item(&self, k: usize) -> usize {
        argmax_lowest(&self.support[k])
    }

    pub fn max_value(&self, k: usize) -> f64 {
        self.support[k].iter().copied().fold(0.0, f64::max)
    }

    /// Largest value anywhere in the support.
    pub fn scale(&self) -> f64 {
        (0..self.len()).map(|k| self.max_value(k)).fold(0.0, f64::max)
    }
}

pub(crate) fn argmax_lowest(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Opaque signal identifier. Coarse horizontal disclosure labels each signal
/// by the (sorted) set of products it may stand for.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SignalLabel {
    Id(usize),
    Products(Vec<usize>),
}

impl SignalLabel {
    pub fn products(mut items: Vec<usize>) -> Self {
        items.sort_unstable();
        items.dedup();
        SignalLabel::Products(items)
    }

    pub fn contains_product(&self, i: usize) -> bool {
        match self {
            SignalLabel::Id(_) => false,
            SignalLabel::Products(set) => set.binary_search(&i).is_ok(),
        }
    }
}

impl fmt::Display for SignalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalLabel::Id(id) => write!(f, "s{id}"),
            SignalLabel::Products(set) => {
                f.write_str("{")?;
                for (n, i) in set.iter().enumerate() {
                    if n > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{i}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// A finite signal set together with a row-stochastic kernel from support
/// points to signals.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationStructure {
    signals: Vec<SignalLabel>,
    kernel: Vec<Vec<f64>>,
}

impl InformationStructure {
    /// Validates the kernel and drops signals that are never sent.
    pub fn new(signals: Vec<SignalLabel>, kernel: Vec<Vec<f64>>) -> Result<Self> {
        if kernel.is_empty() {
            return Err(Error::InvalidInformation("kernel has no rows".into()));
        }
        for (k, row) in kernel.iter().enumerate() {
            if row.len() != signals.len() {
                return Err(Error::DimensionMismatch {
                    what: "kernel row",
                    expected: signals.len(),
                    found: row.len(),
                });
            }
            if let Some(x) = row
                .iter()
                .find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0 + MASS_TOL)
            {
                return Err(Error::InvalidInformation(format!(
                    "kernel row {k} has entry {x} outside [0, 1]"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > MASS_TOL {
                return Err(Error::InvalidInformation(format!(
                    "kernel row {k} sums to {total}"
                )));
            }
        }
        let keep: Vec<usize> = (0..signals.len())
            .filter(|&s| kernel.iter().any(|row| row[s] > 0.0))
            .collect();
        let signals = keep.iter().map(|&s| signals[s].clone()).collect();
        let kernel = kernel
            .iter()
            .map(|row| keep.iter().map(|&s| row[s]).collect())
            .collect();
        Ok(Self { signals, kernel })
    }

    /// Builds a structure from unnormalised non-negative weights; each row is
    /// divided by its sum. Rows must have positive total weight.
    pub fn from_weights(signals: Vec<SignalLabel>, weights: Vec<Vec<f64>>) -> Result<Self> {
        let mut kernel = Vec::with_capacity(weights.len());
        for (k, row) in weights.into_iter().enumerate() {
            let total: f64 = row.iter().map(|w| w.max(0.0)).sum();
            if !(total > 0.0) || !total.is_finite() {
                return Err(Error::InvalidInformation(format!(
                    "row {k} has no positive weight"
                )));
            }
            kernel.push(row.into_iter().map(|w| w.max(0.0) / total).collect());
        }
        Self::new(signals, kernel)
    }

    /// One signal, sent always.
    pub fn no_information(support_size: usize) -> Self {
        Self {
            signals: vec![SignalLabel::Id(0)],
            kernel: vec![vec![1.0]; support_size],
        }
    }

    /// One signal per support point.
    pub fn full_disclosure(support_size: usize) -> Self {
        let kernel = (0..support_size)
            .map(|k| {
                let mut row = vec![0.0; support_size];
                row[k] = 1.0;
                row
            })
            .collect();
        Self {
            signals: (0..support_size).map(SignalLabel::Id).collect(),
            kernel,
        }
    }

    /// Deterministic structure sending support point `k` to block `blocks[k]`.
    pub fn from_partition(blocks: &[usize]) -> Self {
        let count = blocks.iter().copied().max().map_or(0, |b| b + 1);
        let kernel = blocks
            .iter()
            .map(|&b| {
                let mut row = vec![0.0; count];
                row[b] = 1.0;
                row
            })
            .collect();
        let signals = (0..count).map(SignalLabel::Id).collect();
        // blocks may skip indices, so go through pruning
        Self::new(signals, kernel).expect("partition kernel is stochastic")
    }

    pub fn signals(&self) -> &[SignalLabel] {
        &self.signals
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn num_signals(&self) -> usize {
        self.signals.len()
    }

    pub fn support_size(&self) -> usize {
        self.kernel.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.kernel
            .iter()
            .all(|row| row.iter().all(|&x| x == 0.0 || x == 1.0))
    }

    /// Garbling that merges signal `b` into signal `a`.
    pub fn merge(&self, a: usize, b: usize) -> Result<Self> {
        let n = self.num_signals();
        if a >= n || b >= n || a == b {
            return Err(Error::InvalidParameter(format!(
                "cannot merge signals {a} and {b} of {n}"
            )));
        }
        let signals = (0..n)
            .filter(|&s| s != b)
            .map(|s| self.signals[s].clone())
            .collect();
        let kernel = self
            .kernel
            .iter()
            .map(|row| {
                (0..n)
                    .filter(|&s| s != b)
                    .map(|s| if s == a { row[a] + row[b] } else { row[s] })
                    .collect()
            })
            .collect();
        Ok(Self { signals, kernel })
    }
}

/// Ex-ante probability and posterior mean vector of each signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalStats {
    pub r: Vec<f64>,
    pub nu: Vec<Vec<f64>>,
}

impl SignalStats {
    /// Posterior statistics given directly, e.g. for a posterior type space
    /// that does not come from a distribution.
    pub fn new(r: Vec<f64>, nu: Vec<Vec<f64>>) -> Result<Self> {
        if r.is_empty() || r.len() != nu.len() {
            return Err(Error::DimensionMismatch {
                what: "posterior list",
                expected: r.len(),
                found: nu.len(),
            });
        }
        let m = nu[0].len();
        if m == 0 || nu.iter().any(|v| v.len() != m) {
            return Err(Error::InvalidParameter(
                "posterior vectors must share a positive length".into(),
            ));
        }
        if r.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "signal probabilities must be positive".into(),
            ));
        }
        let total: f64 = r.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "signal probabilities sum to {total}"
            )));
        }
        Ok(Self { r, nu })
    }

    pub fn num_signals(&self) -> usize {
        self.r.len()
    }

    pub fn m(&self) -> usize {
        self.nu[0].len()
    }

    /// Σ_s r(s)·ν(s); equals the prior mean for stats derived from a distribution.
    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.m()];
        for (&r, nu) in self.r.iter().zip(&self.nu) {
            for (acc, &x) in mean.iter_mut().zip(nu) {
                *acc += r * x;
            }
        }
        mean
    }

    pub fn scale(&self) -> f64 {
        self.nu
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0, |a: f64, &x| a.max(x.abs()))
    }
}

/// Signal probabilities and posterior means under `info`.
pub fn signal_stats(dist: &ValueDistribution, info: &InformationStructure) -> Result<SignalStats> {
    if info.support_size() != dist.len() {
        return Err(Error::DimensionMismatch {
            what: "kernel rows",
            expected: dist.len(),
            found: info.support_size(),
        });
    }
    let s_count = info.num_signals();
    let m = dist.m();
    let mut r = vec![0.0; s_count];
    let mut weighted = vec![vec![0.0; m]; s_count];
    for (k, row) in info.kernel().iter().enumerate() {
        let f = dist.prob()[k];
        let v = dist.point(k);
        for (s, &q) in row.iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            let w = f * q;
            r[s] += w;
            for (acc, &x) in weighted[s].iter_mut().zip(v) {
                *acc += w * x;
            }
        }
    }
    let nu = weighted
        .into_iter()
        .zip(&r)
        .map(|(w, &rs)| w.into_iter().map(|x| x / rs).collect())
        .collect();
    Ok(SignalStats { r, nu })
}

/// Per-signal allocation (a sub-probability vector over products) and payment.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    info: InformationStructure,
    alloc: Vec<Vec<f64>>,
    price: Vec<f64>,
}

impl Mechanism {
    pub fn new(info: InformationStructure, alloc: Vec<Vec<f64>>, price: Vec<f64>) -> Result<Self> {
        let s_count = info.num_signals();
        if alloc.len() != s_count || price.len() != s_count {
            return Err(Error::DimensionMismatch {
                what: "mechanism signals",
                expected: s_count,
                found: alloc.len().min(price.len()),
            });
        }
        for (s, x) in alloc.iter().enumerate() {
            if x.iter().any(|&xi| !(-MASS_TOL..=1.0 + MASS_TOL).contains(&xi)) {
                return Err(Error::InvalidParameter(format!(
                    "allocation of signal {s} leaves [0, 1]"
                )));
            }
            let total: f64 = x.iter().sum();
            if total > 1.0 + MASS_TOL {
                return Err(Error::InvalidParameter(format!(
                    "allocation of signal {s} sums to {total}"
                )));
            }
        }
        if price.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("payments must be finite".into()));
        }
        Ok(Self { info, alloc, price })
    }

    pub fn info(&self) -> &InformationStructure {
        &self.info
    }

    pub fn alloc(&self) -> &[Vec<f64>] {
        &self.alloc
    }

    pub fn price(&self) -> &[f64] {
        &self.price
    }
}

/// How the buyer resolves indifference between utility-maximising options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Highest payment among the maximisers, then lowest product index.
    #[default]
    SellerOptimal,
    /// Lowest product index among the maximisers.
    LowestIndex,
}

/// Deterministic per-product prices on top of an information structure.
/// An infinite price means the product is not offered.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingMechanism {
    pub info: InformationStructure,
    pub prices: Vec<f64>,
    pub tie_break: TieBreak,
}

impl PricingMechanism {
    pub fn new(info: InformationStructure, prices: Vec<f64>) -> Self {
        Self {
            info,
            prices,
            tie_break: TieBreak::SellerOptimal,
        }
    }

    pub fn uniform(info: InformationStructure, m: usize, price: f64) -> Self {
        Self::new(info, vec![price; m])
    }

    /// Nothing offered, no information.
    pub fn empty(dist: &ValueDistribution) -> Self {
        Self::new(
            InformationStructure::no_information(dist.len()),
            vec![f64::INFINITY; dist.m()],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Choice {
    pub product: Option<usize>,
    pub payment: f64,
}

/// Best response of a buyer with posterior mean `nu` to posted `prices`.
/// The buyer purchases at zero surplus.
pub fn buyer_choice(nu: &[f64], prices: &[f64], tie_break: TieBreak) -> Choice {
    let scale = nu
        .iter()
        .chain(prices.iter().filter(|p| p.is_finite()))
        .fold(0.0f64, |a, &x| a.max(x.abs()));
    let tol = scaled_tol(1e-12, scale);
    let mut best: Option<(usize, f64)> = None;
    for (i, (&value, &price)) in nu.iter().zip(prices).enumerate() {
        if !price.is_finite() {
            continue;
        }
        let surplus = value - price;
        if surplus < -tol {
            continue;
        }
        best = match best {
            None => Some((i, surplus)),
            Some((j, s)) => {
                if surplus > s + tol {
                    Some((i, surplus))
                } else if surplus >= s - tol
                    && tie_break == TieBreak::SellerOptimal
                    && price > prices[j]
                {
                    Some((i, surplus.max(s)))
                } else {
                    Some((j, s))
                }
            }
        };
    }
    match best {
        Some((i, _)) => Choice {
            product: Some(i),
            payment: prices[i],
        },
        None => Choice {
            product: None,
            payment: 0.0,
        },
    }
}

/// The direct mechanism implemented by a pricing mechanism under buyer best response.
pub fn induce_mechanism(dist: &ValueDistribution, pricing: &PricingMechanism) -> Result<Mechanism> {
    if pricing.prices.len() != dist.m() {
        return Err(Error::DimensionMismatch {
            what: "prices",
            expected: dist.m(),
            found: pricing.prices.len(),
        });
    }
    if pricing.prices.iter().any(|p| p.is_nan() || *p < 0.0) {
        return Err(Error::InvalidParameter("prices must be non-negative".into()));
    }
    let stats = signal_stats(dist, &pricing.info)?;
    let mut alloc = Vec::with_capacity(stats.num_signals());
    let mut price = Vec::with_capacity(stats.num_signals());
    for nu in &stats.nu {
        let choice = buyer_choice(nu, &pricing.prices, pricing.tie_break);
        let mut x = vec![0.0; dist.m()];
        if let Some(i) = choice.product {
            x[i] = 1.0;
        }
        alloc.push(x);
        price.push(choice.payment);
    }
    Mechanism::new(pricing.info.clone(), alloc, price)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcViolation {
    pub signal: usize,
    pub deviation: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrViolation {
    pub signal: usize,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    pub ic_violations: Vec<IcViolation>,
    pub ir_violations: Vec<IrViolation>,
    pub max_violation: f64,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.ic_violations.is_empty() && self.ir_violations.is_empty()
    }
}

pub fn interim_utility(nu: &[f64], alloc: &[f64], payment: f64) -> f64 {
    nu.iter().zip(alloc).map(|(v, x)| v * x).sum::<f64>() - payment
}

/// Checks every IC and IR constraint of `mech` against posteriors derived from
/// `dist`. `tol` is relative to the largest posterior value or payment (and
/// absolute below 1).
pub fn audit_ic_ir(dist: &ValueDistribution, mech: &Mechanism, tol: f64) -> Result<AuditReport> {
    let stats = signal_stats(dist, mech.info())?;
    Ok(audit_stats(&stats, mech.alloc(), mech.price(), tol))
}

pub(crate) fn audit_stats(
    stats: &SignalStats,
    alloc: &[Vec<f64>],
    price: &[f64],
    tol: f64,
) -> AuditReport {
    let scale = price.iter().fold(stats.scale(), |a, &p| a.max(p.abs()));
    let tol = scaled_tol(tol, scale);
    let mut report = AuditReport::default();
    for (s, nu) in stats.nu.iter().enumerate() {
        let own = interim_utility(nu, &alloc[s], price[s]);
        if own < -tol {
            report.ir_violations.push(IrViolation {
                signal: s,
                utility: own,
            });
        }
        report.max_violation = report.max_violation.max(-own);
        for t in 0..stats.num_signals() {
            if t == s {
                continue;
            }
            let gain = interim_utility(nu, &alloc[t], price[t]) - own;
            if gain > tol {
                report.ic_violations.push(IcViolation {
                    signal: s,
                    deviation: t,
                    gain,
                });
            }
            report.max_violation = report.max_violation.max(gain);
        }
    }
    report
}

fn ensure_valid(dist: &ValueDistribution, mech: &Mechanism) -> Result<()> {
    let report = audit_ic_ir(dist, mech, DEFAULT_TOL)?;
    if report.is_clean() {
        Ok(())
    } else {
        Err(Error::RejectedMechanism {
            max_violation: report.max_violation,
        })
    }
}

/// Expected payment. Rejects mechanisms that fail the IC/IR audit.
pub fn revenue(dist: &ValueDistribution, mech: &Mechanism) -> Result<f64> {
    ensure_valid(dist, mech)?;
    let stats = signal_stats(dist, mech.info())?;
    Ok(stats.r.iter().zip(mech.price()).map(|(r, p)| r * p).sum())
}

/// Expected realised value of the allocated product, using true values
/// rather than posteriors. Rejects mechanisms that fail the IC/IR audit.
pub fn welfare(dist: &ValueDistribution, mech: &Mechanism) -> Result<f64> {
    ensure_valid(dist, mech)?;
    let mut total = 0.0;
    for (k, row) in mech.info().kernel().iter().enumerate() {
        let v = dist.point(k);
        let f = dist.prob()[k];
        for (s, &q) in row.iter().enumerate() {
            if q > 0.0 {
                let value: f64 = v.iter().zip(&mech.alloc()[s]).map(|(a, b)| a * b).sum();
                total += f * q * value;
            }
        }
    }
    Ok(total)
}

/// E[max_i v_i], attained by full disclosure with every product free.
pub fn optimal_welfare(dist: &ValueDistribution) -> f64 {
    (0..dist.len())
        .map(|k| dist.prob()[k] * dist.max_value(k))
        .sum()
}

/// Revenue of a pricing mechanism under buyer best response. Pricing plus best
/// response is IC/IR by construction, so no audit is run.
pub fn pricing_revenue(dist: &ValueDistribution, pricing: &PricingMechanism) -> Result<f64> {
    let stats = signal_stats(dist, &pricing.info)?;
    Ok(stats
        .nu
        .iter()
        .zip(&stats.r)
        .map(|(nu, r)| r * buyer_choice(nu, &pricing.prices, pricing.tie_break).payment)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(ValueDistribution::new(2, vec![vec![1.0, 2.0]], vec![0.9]).is_err());
        assert!(ValueDistribution::new(2, vec![vec![1.0]], vec![1.0]).is_err());
        assert!(ValueDistribution::new(1, vec![vec![-1.0]], vec![1.0]).is_err());
        assert!(
            ValueDistribution::new(1, vec![vec![1.0], vec![1.0]], vec![0.5, 0.5]).is_err(),
            "duplicates are rejected"
        );
        assert!(ValueDistribution::new(1, vec![vec![1.0], vec![2.0]], vec![1.0, 0.0]).is_err());
        assert!(ValueDistribution::new(0, vec![vec![]], vec![1.0]).is_err());
    }

    #[test]
    fn stats_for_fully_revealing_hardness_instance() {
        let eps = 0.01;
        let dist = instances::two_item_hardness(eps).unwrap();
        let stats = signal_stats(&dist, &InformationStructure::full_disclosure(2)).unwrap();
        assert!(close(stats.r[0], 1.0 - eps) && close(stats.r[1], eps));
        assert_eq!(stats.nu[0], vec![1.0, 0.0]);
        assert!(close(stats.nu[1][0], 1.0 / eps) && close(stats.nu[1][1], 2.0 / eps));
    }

    #[test]
    fn no_information_gives_prior_mean() {
        let dist = instances::example_complex_info();
        let stats = signal_stats(&dist, &InformationStructure::no_information(3)).unwrap();
        assert_eq!(stats.r, vec![1.0]);
        let mean = dist.prior_mean();
        assert!(close(stats.nu[0][0], mean[0]) && close(stats.nu[0][1], mean[1]));
        assert!(close(mean[0], 4.4) && close(mean[1], 4.2));
    }

    #[test]
    fn pooled_signal_posterior() {
        let dist = instances::example_complex_info();
        let info = InformationStructure::from_partition(&[0, 1, 1]);
        let stats = signal_stats(&dist, &info).unwrap();
        assert!(close(stats.nu[1][0], 3.0) && close(stats.nu[1][1], 4.0));
        assert!(close(stats.r[1], 0.8));
    }

    #[test]
    fn zero_mass_signals_are_pruned() {
        let info = InformationStructure::new(
            vec![SignalLabel::Id(0), SignalLabel::Id(1), SignalLabel::Id(2)],
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(info.signals(), &[SignalLabel::Id(0), SignalLabel::Id(2)]);
        assert!(InformationStructure::new(vec![SignalLabel::Id(0)], vec![vec![0.5]]).is_err());
    }

    #[test]
    fn buyer_choice_examples() {
        let c = buyer_choice(&[3.0, 4.0], &[9.0, 4.0], TieBreak::SellerOptimal);
        assert_eq!(c.product, Some(1));
        assert_eq!(c.payment, 4.0);

        let c = buyer_choice(&[5.0, 5.0], &[f64::INFINITY; 2], TieBreak::SellerOptimal);
        assert_eq!(c.product, None);
        assert_eq!(c.payment, 0.0);

        let c = buyer_choice(&[10.0, 5.0], &[9.0, 4.0], TieBreak::SellerOptimal);
        assert_eq!((c.product, c.payment), (Some(0), 9.0));
        let c = buyer_choice(&[5.0, 10.0], &[4.0, 9.0], TieBreak::SellerOptimal);
        assert_eq!((c.product, c.payment), (Some(1), 9.0));
        let c = buyer_choice(&[5.0, 10.0], &[4.0, 9.0], TieBreak::LowestIndex);
        assert_eq!((c.product, c.payment), (Some(0), 4.0));

        // equal payments at a tie go to the lowest index
        let c = buyer_choice(&[2.0, 2.0], &[1.0, 1.0], TieBreak::SellerOptimal);
        assert_eq!(c.product, Some(0));
    }

    fn example_one_pricing() -> PricingMechanism {
        PricingMechanism::new(
            InformationStructure::from_partition(&[0, 1, 1]),
            vec![9.0, 4.0],
        )
    }

    #[test]
    fn example_one_mechanism() {
        let dist = instances::example_complex_info();
        let mech = induce_mechanism(&dist, &example_one_pricing()).unwrap();
        assert_eq!(mech.alloc()[0], vec![1.0, 0.0]);
        assert_eq!(mech.alloc()[1], vec![0.0, 1.0]);
        assert_eq!(mech.price(), &[9.0, 4.0]);
        assert!(audit_ic_ir(&dist, &mech, DEFAULT_TOL).unwrap().is_clean());
        assert!((revenue(&dist, &mech).unwrap() - 5.0).abs() < 1e-12);
        assert!((welfare(&dist, &mech).unwrap() - 5.2).abs() < 1e-12);
        assert!((optimal_welfare(&dist) - 5.6).abs() < 1e-12);
    }

    #[test]
    fn forced_purchase_at_too_high_price_breaks_ic() {
        let dist = instances::example_complex_info();
        let info = InformationStructure::from_partition(&[0, 1, 1]);
        let mech = Mechanism::new(
            info.clone(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![10.0, 4.0],
        )
        .unwrap();
        let report = audit_ic_ir(&dist, &mech, DEFAULT_TOL).unwrap();
        assert_eq!(report.ic_violations.len(), 1);
        let v = report.ic_violations[0];
        assert_eq!((v.signal, v.deviation), (0, 1));
        assert!((v.gain - 1.0).abs() < 1e-12);
        assert!(matches!(
            revenue(&dist, &mech),
            Err(Error::RejectedMechanism { .. })
        ));

        let cheaper =
            Mechanism::new(info, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![8.0, 4.0]).unwrap();
        assert!(audit_ic_ir(&dist, &cheaper, DEFAULT_TOL).unwrap().is_clean());
        assert!(revenue(&dist, &cheaper).unwrap() < 5.0);
    }

    #[test]
    fn example_two_lottery_menu() {
        let dist = instances::example_lottery_opt();
        let mech = Mechanism::new(
            InformationStructure::full_disclosure(2),
            vec![vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5]],
            vec![20.0, 4.5],
        )
        .unwrap();
        assert!((revenue(&dist, &mech).unwrap() - 12.25).abs() < 1e-12);
    }

    #[test]
    fn zero_prices_and_empty_allocations() {
        let dist = instances::example_complex_info();
        let info = InformationStructure::full_disclosure(3);
        let free = induce_mechanism(&dist, &PricingMechanism::uniform(info.clone(), 2, 0.0)).unwrap();
        assert_eq!(revenue(&dist, &free).unwrap(), 0.0);
        let empty = Mechanism::new(info, vec![vec![0.0; 2]; 3], vec![0.0; 3]).unwrap();
        assert_eq!(welfare(&dist, &empty).unwrap(), 0.0);
    }

    #[test]
    fn tight_example_full_disclosure_pricing() {
        let dist = instances::tight_uniform_example(0.1).unwrap();
        let pricing =
            PricingMechanism::new(InformationStructure::full_disclosure(2), vec![10.0, 1.0]);
        let mech = induce_mechanism(&dist, &pricing).unwrap();
        assert_eq!(mech.alloc()[0], vec![0.0, 1.0]);
        assert_eq!(mech.price()[0], 1.0);
        assert_eq!(mech.alloc()[1], vec![1.0, 0.0]);
        assert!((mech.price()[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn no_information_uniform_price_sells_best_prior_product() {
        let dist = instances::example_complex_info();
        let pricing = PricingMechanism::uniform(InformationStructure::no_information(3), 2, 4.4);
        let mech = induce_mechanism(&dist, &pricing).unwrap();
        assert_eq!(mech.alloc()[0], vec![1.0, 0.0]);
    }

    #[test]
    fn optimal_welfare_examples() {
        let eps = 0.01;
        let d = instances::two_item_hardness(eps).unwrap();
        assert!((optimal_welfare(&d) - (3.0 - eps)).abs() < 1e-12);
        let point = ValueDistribution::new(2, vec![vec![5.0, 4.0]], vec![1.0]).unwrap();
        assert_eq!(optimal_welfare(&point), 5.0);
        assert_eq!(optimal_welfare(&instances::appendix_no_full_surplus()), 7.5);
    }

    #[test]
    fn merging_signals_preserves_mean() {
        let dist = instances::example_complex_info();
        let info = InformationStructure::full_disclosure(3);
        let merged = info.merge(0, 2).unwrap();
        let a = signal_stats(&dist, &info).unwrap().mean();
        let b = signal_stats(&dist, &merged).unwrap().mean();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
