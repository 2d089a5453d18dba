use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{degenerate, uniform_half, Branch, Candidate, ConstructionCertificate};
use crate::disclosure::{
    coarse_structure, horizontal_disclosure, max_uniform_price, top_item_profile, wel_split,
    TopItemProfile,
};
use crate::model::{
    optimal_welfare, pricing_revenue, signal_stats, InformationStructure, PricingMechanism,
    ValueDistribution,
};
use crate::oracle::flow::bipartite_max_flow;
use crate::oracle::pricing::pricing_revenue_stats;
use crate::{scaled_tol, Error, Result};

/// Offset above `p*` at which `Wel₊` and `Wel₋` are evaluated.
pub const RIGHT_SHIFT: f64 = 1e-6;

/// Constants of the two-price construction. `c` and `w̄` are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPriceParams {
    pub delta: f64,
    pub delta_hat: f64,
    pub k: u32,
}

impl Default for TwoPriceParams {
    fn default() -> Self {
        Self {
            delta: 0.0068,
            delta_hat: 0.925,
            k: 11,
        }
    }
}

impl TwoPriceParams {
    pub fn new(delta: f64, delta_hat: f64, k: u32) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) || !(delta_hat > 0.0 && delta_hat < 1.0) || k < 2 {
            return Err(Error::InvalidParameter(format!(
                "need 0 < δ < 1, 0 < δ̂ < 1 and k ≥ 2, got ({delta}, {delta_hat}, {k})"
            )));
        }
        Ok(Self { delta, delta_hat, k })
    }

    /// `2/(2−δ)`: revenue multiple of `p*` the second case must reach.
    pub fn target(&self) -> f64 {
        2.0 / (2.0 - self.delta)
    }

    /// `1/(2−δ)`.
    pub fn guarantee(&self) -> f64 {
        1.0 / (2.0 - self.delta)
    }

    /// Capacity multiplier of the `I₋` side.
    pub fn c(&self) -> f64 {
        let k = self.k as f64;
        let t = self.target();
        (k / 2.0 - t) / (t - self.delta_hat)
    }

    /// Flow threshold separating the two sub-cases.
    pub fn w_bar(&self) -> f64 {
        let k = self.k as f64;
        let d = self.delta;
        let lifted = self.target() * (1.0 + (1.0 - (k + 1.0) * d) / k);
        (lifted - 1.0 + (k + 1.0) * d) / (self.c() + 1.0 - k)
    }

    /// Left side of the closing inequality of the small-flow case.
    pub fn closing_lhs(&self) -> f64 {
        let k = self.k as f64;
        let w = self.w_bar();
        0.5 * (1.0 - (k + 1.0) * self.delta - w * k)
            + (1.0 - 2.0 / k - self.c() * w) * self.delta_hat
    }

    /// The constants are admissible and the closing inequality clears `2/(2−δ)`.
    pub fn verifies(&self) -> bool {
        let c = self.c();
        let w = self.w_bar();
        c.is_finite() && c > 0.0 && w.is_finite() && w > 0.0 && self.closing_lhs() > self.target()
    }
}

struct Scored {
    name: String,
    mechanism: PricingMechanism,
    revenue: f64,
}

/// Two-price mechanism on a coarse horizontal disclosure targeting
/// `1/(2−δ)` of OPT-Wel. The certificate records the branch of the case
/// analysis that verified numerically on this instance; when none does the
/// branch is [`Branch::FallbackUniform`] and only the uniform bound of one
/// half is claimed. The returned mechanism is the best of every candidate
/// tried, including the uniform one.
pub fn two_price(dist: &ValueDistribution, params: &TwoPriceParams) -> Result<ConstructionCertificate> {
    let opt_wel = optimal_welfare(dist);
    if opt_wel <= 0.0 {
        return Ok(degenerate(dist));
    }
    let base = uniform_half(dist)?;
    let (p_star, plan) = max_uniform_price(dist)?;
    let profile = top_item_profile(dist);
    let tol = scaled_tol(1e-9, dist.scale());
    let (wel_plus, wel_minus) = wel_split(dist, p_star + RIGHT_SHIFT);
    let welfare_bounded = wel_plus <= p_star + tol && wel_minus <= p_star + RIGHT_SHIFT + tol;

    let mut scored = vec![Scored {
        name: "uniform".into(),
        mechanism: base.mechanism.clone(),
        revenue: base.revenue,
    }];

    let target = params.target() * p_star;
    let (branch, verified) = if wel_minus <= (1.0 - params.delta) * p_star + tol {
        let ok = wel_plus <= p_star + tol && base.revenue >= p_star - tol;
        (Branch::LowWelfare, ok)
    } else {
        let i_plus: Vec<usize> = profile
            .nonempty()
            .filter(|&i| profile.own(i).unwrap_or(0.0) > p_star)
            .collect();
        let i_minus: Vec<usize> = profile
            .nonempty()
            .filter(|&i| profile.own(i).unwrap_or(0.0) <= p_star)
            .collect();
        let k = params.k as f64;
        let own = |i: usize| profile.own(i).expect("nonempty class");
        let nu = |i: usize, j: usize| profile.nu(i, j).expect("nonempty class");
        let left: Vec<usize> = i_plus
            .iter()
            .copied()
            .filter(|&i| own(i) >= k * p_star && i_minus.iter().any(|&j| own(i) <= 2.0 * nu(j, i)))
            .collect();
        let left_cap: Vec<f64> = left.iter().map(|&i| profile.class_mass[i]).collect();
        let right_cap: Vec<f64> = i_minus.iter().map(|&j| params.c() * profile.class_mass[j]).collect();
        let mut edges = Vec::new();
        for (a, &i) in left.iter().enumerate() {
            for (b, &j) in i_minus.iter().enumerate() {
                if own(j) >= params.delta_hat * p_star && nu(j, i) >= 0.5 * own(i) {
                    edges.push((a, b));
                }
            }
        }
        let flow = bipartite_max_flow(&left_cap, &right_cap, &edges);

        if flow.value >= params.w_bar() {
            let mut transport = vec![vec![0.0; dist.m()]; dist.len()];
            for &(a, b) in &edges {
                let (i, j) = (left[a], i_minus[b]);
                let share = flow.flow[a][b] / profile.class_mass[i];
                if share <= 0.0 {
                    continue;
                }
                for kk in (0..dist.len()).filter(|&kk| profile.top[kk] == i) {
                    transport[kk][j] += share * dist.prob()[kk];
                }
            }
            let info = coarse_structure(dist, &profile, &transport);
            let mechanism = PricingMechanism::uniform(info, dist.m(), target);
            let revenue = pricing_revenue(dist, &mechanism)?;
            scored.push(Scored {
                name: "flow-pooling".into(),
                mechanism,
                revenue,
            });
            let ok = welfare_bounded && params.verifies() && revenue >= target - tol;
            (Branch::FlowSaturated, ok)
        } else {
            let saturated: Vec<usize> = i_minus
                .iter()
                .enumerate()
                .filter(|&(b, _)| right_cap[b] > 0.0 && flow.right_load[b] >= right_cap[b] - 1e-12)
                .map(|(_, &j)| j)
                .collect();
            let info = diluted_structure(dist, &profile, &i_plus, &i_minus, k * p_star);
            let prices = (0..dist.m())
                .map(|j| {
                    if i_plus.contains(&j) || saturated.contains(&j) {
                        k * p_star / 2.0
                    } else {
                        params.delta_hat * p_star
                    }
                })
                .collect();
            let mechanism = PricingMechanism::new(info, prices);
            let revenue = pricing_revenue(dist, &mechanism)?;
            scored.push(Scored {
                name: "diluted-two-price".into(),
                mechanism,
                revenue,
            });
            let ok = welfare_bounded && params.verifies() && revenue >= target - tol;
            (Branch::FlowDeficient, ok)
        }
    };

    let mut structures = vec![
        ("horizontal", horizontal_disclosure(dist)),
        ("pooling", plan.info.clone()),
    ];
    for s in scored.iter().skip(1) {
        structures.push(("construction", s.mechanism.info.clone()));
    }
    for (name, info) in structures {
        if let Some(found) = best_two_price(dist, &profile, &info, p_star)? {
            scored.push(Scored {
                name: format!("two-price/{name}"),
                mechanism: found.0,
                revenue: found.1,
            });
        }
    }

    let mut best = 0;
    for (i, s) in scored.iter().enumerate() {
        if s.revenue > scored[best].revenue + 1e-12 {
            best = i;
        }
    }
    let candidates = scored
        .iter()
        .map(|s| Candidate {
            name: s.name.clone(),
            revenue: s.revenue,
        })
        .collect();
    let Scored { mechanism, revenue, .. } = scored.swap_remove(best);
    let (branch, guarantee) = if verified {
        (branch, params.guarantee().max(revenue / opt_wel))
    } else {
        (Branch::FallbackUniform, 0.5)
    };
    Ok(ConstructionCertificate {
        branch,
        mechanism,
        guarantee,
        revenue,
        opt_wel,
        candidates,
    })
}

/// Pools `I₋` mass into the signal of every `I₊` product whose own-class
/// mean exceeds `cap`, bringing that posterior down to `cap`.
fn diluted_structure(
    dist: &ValueDistribution,
    profile: &TopItemProfile,
    i_plus: &[usize],
    i_minus: &[usize],
    cap: f64,
) -> InformationStructure {
    let mut available: Vec<f64> = (0..dist.len())
        .map(|k| if i_minus.contains(&profile.top[k]) { dist.prob()[k] } else { 0.0 })
        .collect();
    let mut transport = vec![vec![0.0; dist.m()]; dist.len()];
    for &i in i_plus {
        let mass = profile.class_mass[i];
        let mut weighted = mass * profile.own(i).expect("nonempty class");
        let mut total = mass;
        for k in 0..dist.len() {
            let excess = weighted - cap * total;
            if excess <= 0.0 {
                break;
            }
            let v = dist.point(k)[i];
            if available[k] <= 0.0 || v >= cap {
                continue;
            }
            let t = (excess / (cap - v)).min(available[k]);
            transport[k][i] += t;
            available[k] -= t;
            weighted += t * v;
            total += t;
        }
    }
    coarse_structure(dist, profile, &transport)
}

/// Best price pair `(h, l)` on `info`: products whose own-class mean is at
/// least `h` are priced at `h`, the rest at `l` (or withheld). `l` ranges
/// over the posterior coordinates and `p*`; `h` additionally over the prices
/// `ν_i(s) − max(0, max_j ν_j(s) − l)` that keep signal `s` on product `i`.
fn best_two_price(
    dist: &ValueDistribution,
    profile: &TopItemProfile,
    info: &InformationStructure,
    p_star: f64,
) -> Result<Option<(PricingMechanism, f64)>> {
    let stats = signal_stats(dist, info)?;
    let mut levels: Vec<f64> = stats.nu.iter().flatten().copied().filter(|&x| x > 0.0).collect();
    if p_star > 0.0 {
        levels.push(p_star);
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let m = dist.m();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut prices = vec![0.0; m];
    let mut highs = Vec::new();
    for l in levels.iter().copied().chain([f64::INFINITY]) {
        highs.clear();
        highs.extend(levels.iter().copied().filter(|&h| h >= l));
        if l.is_finite() {
            for nu in &stats.nu {
                for (i, &vi) in nu.iter().enumerate() {
                    let gap = nu
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .fold(0.0f64, |acc, (_, &vj)| acc.max(vj - l));
                    let h = vi - gap;
                    if h >= l && h > 0.0 {
                        highs.push(h);
                    }
                }
            }
        }
        for &h in &highs {
            for j in 0..m {
                let high = profile.own(j).is_some_and(|o| o >= h);
                prices[j] = if high { h } else { l };
            }
            let rev = pricing_revenue_stats(&stats, &prices);
            if best.as_ref().is_none_or(|b| rev > b.1 + 1e-12) {
                best = Some((prices.clone(), rev));
            }
        }
    }
    match best {
        Some((prices, _)) => {
            let mechanism = PricingMechanism::new(info.clone(), prices);
            let revenue = pricing_revenue(dist, &mechanism)?;
            Ok(Some((mechanism, revenue)))
        }
        None => Ok(None),
    }
}
