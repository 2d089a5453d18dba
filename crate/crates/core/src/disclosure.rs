//! Horizontal and coarse horizontal disclosure, and the pooling program that
//! determines the largest uniform price selling with probability one.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{optimal_welfare, InformationStructure, SignalLabel, ValueDistribution};
use crate::oracle::lp::{LinearProgram, LpStatus, Sense};
use crate::{Error, Result};

/// Sale probabilities at or above this count as "sells with probability one".
pub const SALE_TOL: f64 = 1e-9;

/// Support partitioned by top item.
#[derive(Debug, Clone, PartialEq)]
pub struct TopItemProfile {
    /// `top[k]`: highest-valued product at support point `k`, ties to the lowest index.
    pub top: Vec<usize>,
    pub class_mass: Vec<f64>,
    /// `nu_cond[j]` is `E[v | top = j]`, `None` for empty classes. So the
    /// conditional mean of product `i` given top item `j` is `nu_cond[j][i]`.
    pub nu_cond: Vec<Option<Vec<f64>>>,
}

impl TopItemProfile {
    /// `E[v_i | top = j]`.
    pub fn nu(&self, i: usize, j: usize) -> Option<f64> {
        self.nu_cond[j].as_ref().map(|v| v[i])
    }

    /// `E[v_j | top = j]`, or `None` for an empty class.
    pub fn own(&self, j: usize) -> Option<f64> {
        self.nu(j, j)
    }

    pub fn nonempty(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.class_mass.len()).filter(|&j| self.class_mass[j] > 0.0)
    }

    /// Products whose class is nonempty and whose own conditional mean is at least `p`.
    pub fn i_plus(&self, p: f64) -> Vec<usize> {
        self.nonempty()
            .filter(|&j| self.own(j).unwrap_or(0.0) >= p)
            .collect()
    }

    /// Nonempty classes outside `i_plus(p)`.
    pub fn i_minus(&self, p: f64) -> Vec<usize> {
        self.nonempty()
            .filter(|&j| self.own(j).unwrap_or(0.0) < p)
            .collect()
    }
}

pub fn top_item_profile(dist: &ValueDistribution) -> TopItemProfile {
    let m = dist.m();
    let top: Vec<usize> = (0..dist.len()).map(|k| dist.top_item(k)).collect();
    let mut class_mass = vec![0.0; m];
    let mut sums = vec![vec![0.0; m]; m];
    for (k, &j) in top.iter().enumerate() {
        let f = dist.prob()[k];
        class_mass[j] += f;
        for (acc, &x) in sums[j].iter_mut().zip(dist.point(k)) {
            *acc += f * x;
        }
    }
    let nu_cond = sums
        .into_iter()
        .zip(&class_mass)
        .map(|(s, &mass)| (mass > 0.0).then(|| s.into_iter().map(|x| x / mass).collect()))
        .collect();
    TopItemProfile {
        top,
        class_mass,
        nu_cond,
    }
}

/// One signal per nonempty top-item class, labelled by that product.
pub fn horizontal_disclosure(dist: &ValueDistribution) -> InformationStructure {
    let profile = top_item_profile(dist);
    let classes: Vec<usize> = profile.nonempty().collect();
    let signals = classes.iter().map(|&j| SignalLabel::products(vec![j])).collect();
    let kernel = profile
        .top
        .iter()
        .map(|&j| classes.iter().map(|&c| if c == j { 1.0 } else { 0.0 }).collect())
        .collect();
    InformationStructure::new(signals, kernel).expect("horizontal kernel is deterministic")
}

/// `(Wel₊(p), Wel₋(p))`: expected top value over types whose top item is in
/// `I₊(p)`, respectively `I₋(p)`.
pub fn wel_split(dist: &ValueDistribution, p: f64) -> (f64, f64) {
    split_by(dist, |profile, j| profile.own(j).unwrap_or(0.0) >= p)
}

/// Right limit of [`wel_split`] at `p`: the split with `I₊` taken strictly above `p`.
pub fn wel_split_right(dist: &ValueDistribution, p: f64) -> (f64, f64) {
    split_by(dist, |profile, j| profile.own(j).unwrap_or(0.0) > p)
}

fn split_by(dist: &ValueDistribution, plus: impl Fn(&TopItemProfile, usize) -> bool) -> (f64, f64) {
    let profile = top_item_profile(dist);
    let mut hi = 0.0;
    let mut lo = 0.0;
    for k in 0..dist.len() {
        let w = dist.prob()[k] * dist.max_value(k);
        if plus(&profile, profile.top[k]) {
            hi += w;
        } else {
            lo += w;
        }
    }
    (hi, lo)
}

/// Optimal pooling of below-price types into above-price signals at a
/// uniform price.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolingPlan {
    pub price: f64,
    pub i_plus: Vec<usize>,
    pub i_minus: Vec<usize>,
    /// `transport[k][i]`: mass of support point `k` sent to the signal of product `i`.
    pub transport: Vec<Vec<f64>>,
    pub sale_probability: f64,
    /// The coarse horizontal disclosure realising the plan.
    pub info: InformationStructure,
}

impl PoolingPlan {
    pub fn pooled_mass(&self) -> f64 {
        self.transport.iter().flatten().sum()
    }
}

/// Largest sale probability reachable at uniform price `p` by pooling
/// `I₋(p)` types into `I₊(p)` signals.
pub fn max_sale_pooling(dist: &ValueDistribution, p: f64) -> Result<PoolingPlan> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter("pooling price must be positive".into()));
    }
    let profile = top_item_profile(dist);
    pooling_with_profile(dist, &profile, p)
}

pub(crate) fn pooling_with_profile(
    dist: &ValueDistribution,
    profile: &TopItemProfile,
    p: f64,
) -> Result<PoolingPlan> {
    let m = dist.m();
    let kk = dist.len();
    let i_plus = profile.i_plus(p);
    let i_minus = profile.i_minus(p);
    let mut transport = vec![vec![0.0; m]; kk];

    if !i_plus.is_empty() && !i_minus.is_empty() {
        let sources: Vec<usize> = (0..kk)
            .filter(|&k| i_minus.contains(&profile.top[k]))
            .collect();
        let nv = sources.len() * i_plus.len();
        let var = |a: usize, b: usize| a * i_plus.len() + b;
        let mut lp = LinearProgram::new(nv);
        for j in 0..nv {
            lp.set_objective(j, 1.0);
        }
        for (a, &k) in sources.iter().enumerate() {
            let terms: Vec<(usize, f64)> = (0..i_plus.len()).map(|b| (var(a, b), 1.0)).collect();
            lp.add_sparse(&terms, Sense::Le, dist.prob()[k]);
        }
        for (b, &i) in i_plus.iter().enumerate() {
            let budget: f64 = (0..kk)
                .filter(|&k| profile.top[k] == i)
                .map(|k| dist.prob()[k] * (dist.point(k)[i] - p))
                .sum();
            let terms: Vec<(usize, f64)> = sources
                .iter()
                .enumerate()
                .map(|(a, &k)| (var(a, b), p - dist.point(k)[i]))
                .collect();
            lp.add_sparse(&terms, Sense::Le, budget.max(0.0));
        }
        let sol = lp.solve()?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Internal("pooling LP is always feasible and bounded".into()));
        }
        for (a, &k) in sources.iter().enumerate() {
            let f = dist.prob()[k];
            let mut row: Vec<f64> = (0..i_plus.len())
                .map(|b| {
                    let t = sol.x[var(a, b)];
                    if t > 1e-15 { t } else { 0.0 }
                })
                .collect();
            let total: f64 = row.iter().sum();
            if total > f {
                row.iter_mut().for_each(|t| *t *= f / total);
            }
            for (b, &i) in i_plus.iter().enumerate() {
                transport[k][i] = row[b];
            }
        }
    }

    let plus_mass: f64 = i_plus.iter().map(|&i| profile.class_mass[i]).sum();
    let pooled: f64 = transport.iter().flatten().sum();
    let sale_probability = if i_plus.is_empty() { 0.0 } else { plus_mass + pooled };
    let info = coarse_structure(dist, profile, &transport);
    Ok(PoolingPlan {
        price: p,
        i_plus,
        i_minus,
        transport,
        sale_probability,
        info,
    })
}

/// One signal per nonempty top-item class. `transport[k][i]` mass of support
/// point `k` is moved into the signal of class `i`, whose label then also
/// lists the top item of `k`; the rest of `k` stays in its own class signal.
pub(crate) fn coarse_structure(
    dist: &ValueDistribution,
    profile: &TopItemProfile,
    transport: &[Vec<f64>],
) -> InformationStructure {
    let m = dist.m();
    let classes: Vec<usize> = profile.nonempty().collect();
    let mut signal_of = vec![usize::MAX; m];
    for (s, &j) in classes.iter().enumerate() {
        signal_of[j] = s;
    }
    let mut labels: Vec<Vec<usize>> = classes.iter().map(|&j| vec![j]).collect();
    let mut kernel = vec![vec![0.0; classes.len()]; dist.len()];
    for k in 0..dist.len() {
        let j = profile.top[k];
        let f = dist.prob()[k];
        let mut sent = 0.0;
        for i in 0..m {
            let t = transport[k][i];
            if t > 0.0 && i != j && signal_of[i] != usize::MAX {
                let q = t / f;
                kernel[k][signal_of[i]] += q;
                sent += q;
                if !labels[signal_of[i]].contains(&j) {
                    labels[signal_of[i]].push(j);
                }
            }
        }
        kernel[k][signal_of[j]] += (1.0 - sent).max(0.0);
    }
    let signals = labels.into_iter().map(SignalLabel::products).collect();
    InformationStructure::new(signals, kernel).expect("pooling kernel is stochastic")
}

/// Every signal a support point can receive lists that point's top item.
pub fn is_coarse_horizontal(dist: &ValueDistribution, info: &InformationStructure) -> bool {
    info.support_size() == dist.len()
        && info.kernel().iter().enumerate().all(|(k, row)| {
            let top = dist.top_item(k);
            row.iter()
                .zip(info.signals())
                .all(|(&q, label)| q == 0.0 || label.contains_product(top))
        })
}

/// `p*` together with its certified plan.
pub fn max_uniform_price(dist: &ValueDistribution) -> Result<(f64, PoolingPlan)> {
    let profile = top_item_profile(dist);
    if optimal_welfare(dist) <= 0.0 {
        let plan = PoolingPlan {
            price: 0.0,
            i_plus: Vec::new(),
            i_minus: Vec::new(),
            transport: vec![vec![0.0; dist.m()]; dist.len()],
            sale_probability: 0.0,
            info: InformationStructure::no_information(dist.len()),
        };
        return Ok((0.0, plan));
    }
    let mut candidates: Vec<f64> = profile.nonempty().filter_map(|j| profile.own(j)).collect();
    candidates.extend(dist.support().iter().flatten().copied());
    candidates.extend(dist.prior_mean());
    candidates.retain(|&c| c > 0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let sells = |p: f64| -> Result<Option<PoolingPlan>> {
        let plan = pooling_with_profile(dist, &profile, p)?;
        Ok((plan.sale_probability >= 1.0 - SALE_TOL).then_some(plan))
    };

    // sale probability is non-increasing in p: bisect over the sorted candidates
    let (mut lo, mut hi) = (0usize, candidates.len());
    let mut best: Option<(usize, PoolingPlan)> = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match sells(candidates[mid])? {
            Some(plan) => {
                best = Some((mid, plan));
                lo = mid + 1;
            }
            None => hi = mid,
        }
    }
    let (idx, mut plan) = best.ok_or_else(|| {
        Error::Internal("the smallest own-class mean always sells with probability one".into())
    })?;
    if let Some(&next) = candidates.get(idx + 1) {
        let (mut a, mut b) = (candidates[idx], next);
        while b - a > 1e-9 {
            let mid = 0.5 * (a + b);
            match sells(mid)? {
                Some(found) => {
                    plan = found;
                    a = mid;
                }
                None => b = mid,
            }
        }
    }
    Ok((plan.price, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::model::signal_stats;

    #[test]
    fn example_one_profile() {
        let p = top_item_profile(&instances::example_complex_info());
        assert_eq!(p.top, vec![0, 0, 1]);
        assert!((p.own(0).unwrap() - 22.0 / 3.0).abs() < 1e-12);
        assert!((p.own(1).unwrap() - 3.0).abs() < 1e-12);
        assert!((p.class_mass[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_profile() {
        let d = ValueDistribution::new(2, vec![vec![3.0, 1.0], vec![1.0, 3.0]], vec![0.5, 0.5]).unwrap();
        let p = top_item_profile(&d);
        assert_eq!((p.own(0), p.own(1)), (Some(3.0), Some(3.0)));
        assert_eq!((p.nu(1, 0), p.nu(0, 1)), (Some(1.0), Some(1.0)));
    }

    #[test]
    fn arc_class_masses() {
        let eps = 0.1;
        let n = 4;
        let p = top_item_profile(&instances::hart_nisan_arc(n, eps).unwrap());
        // points 0..=2 have x ≥ y, points 3..=4 have y > x
        let norm = 1.0 - libm::pow(eps, (n + 1) as f64);
        let mass = |i: i32| (libm::pow(eps, i as f64) - libm::pow(eps, (i + 1) as f64)) / norm;
        let first: f64 = (0..=2).map(mass).sum();
        assert!((p.class_mass[0] - first).abs() < 1e-12);
        assert!((p.class_mass[1] - (mass(3) + mass(4))).abs() < 1e-12);
    }

    #[test]
    fn horizontal_structures() {
        let b1 = instances::appendix_horizontal_subopt(3).unwrap();
        let h = horizontal_disclosure(&b1);
        assert_eq!(h.num_signals(), 3);
        assert_eq!(h, InformationStructure::new(h.signals().to_vec(), InformationStructure::full_disclosure(3).kernel().to_vec()).unwrap());

        let point = ValueDistribution::new(2, vec![vec![1.0, 2.0]], vec![1.0]).unwrap();
        assert_eq!(horizontal_disclosure(&point).num_signals(), 1);

        let b2 = instances::appendix_no_full_surplus();
        let h = horizontal_disclosure(&b2);
        assert_eq!(h.num_signals(), 2);
        assert!(h.is_deterministic());
    }

    #[test]
    fn wel_split_tight_example() {
        let d = instances::tight_uniform_example(0.1).unwrap();
        let (hi, lo) = wel_split(&d, 1.5);
        assert!((hi - 1.0).abs() < 1e-12 && (lo - 0.9).abs() < 1e-12);
        let (hi, lo) = wel_split(&d, 0.0);
        assert_eq!(lo, 0.0);
        assert!((hi - optimal_welfare(&d)).abs() < 1e-12);
        assert_eq!(wel_split(&d, 100.0).0, 0.0);
    }

    #[test]
    fn tight_example_pooling() {
        let d = instances::tight_uniform_example(0.1).unwrap();
        let plan = max_sale_pooling(&d, 1.0).unwrap();
        assert_eq!(plan.i_plus, vec![0, 1]);
        assert!((plan.sale_probability - 1.0).abs() < 1e-12);
        assert_eq!(plan.pooled_mass(), 0.0);

        let plan = max_sale_pooling(&d, 1.5).unwrap();
        assert_eq!(plan.i_plus, vec![0]);
        let t = plan.transport[0][0];
        assert!((t - 0.85 / 1.5).abs() < 1e-9, "t = {t}");
        assert!((plan.sale_probability - (0.1 + 0.85 / 1.5)).abs() < 1e-9);
    }

    #[test]
    fn pooled_posterior_clears_price() {
        let d = instances::tight_uniform_example(0.1).unwrap();
        let plan = max_sale_pooling(&d, 1.5).unwrap();
        let stats = signal_stats(&d, &plan.info).unwrap();
        let s = plan
            .info
            .signals()
            .iter()
            .position(|l| *l == SignalLabel::Products(vec![0, 1]))
            .unwrap();
        assert!(stats.nu[s][0] >= 1.5 - 1e-9);
    }

    #[test]
    fn empty_i_plus() {
        let d = instances::tight_uniform_example(0.1).unwrap();
        let plan = max_sale_pooling(&d, 50.0).unwrap();
        assert!(plan.i_plus.is_empty());
        assert_eq!(plan.sale_probability, 0.0);
        assert!(max_sale_pooling(&d, 0.0).is_err());
    }

    #[test]
    fn uniform_price_examples() {
        let d = instances::tight_uniform_example(0.1).unwrap();
        let (p, plan) = max_uniform_price(&d).unwrap();
        assert!((p - 1.0).abs() < 1e-9, "p* = {p}");
        assert!(plan.sale_probability >= 1.0 - 1e-9);

        let single = ValueDistribution::new(1, vec![vec![1.0], vec![3.0]], vec![0.5, 0.5]).unwrap();
        let (p, _) = max_uniform_price(&single).unwrap();
        assert!((p - 2.0).abs() < 1e-9);

        let zero = ValueDistribution::new(2, vec![vec![0.0, 0.0]], vec![1.0]).unwrap();
        assert_eq!(max_uniform_price(&zero).unwrap().0, 0.0);
    }

    #[test]
    fn example_one_uniform_price_matches_grid() {
        let d = instances::example_complex_info();
        let (p, _) = max_uniform_price(&d).unwrap();
        let mut best = 0.0;
        for i in 1..=10_000 {
            let q = i as f64 * 1e-3;
            if max_sale_pooling(&d, q).unwrap().sale_probability >= 1.0 - SALE_TOL {
                best = q;
            }
        }
        assert!(p >= best - 1e-9 && p < best + 1e-3 + 1e-9, "p* = {p}, grid = {best}");
    }
}
