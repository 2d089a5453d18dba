//! Revenue-optimal deterministic prices for a fixed posterior type space.
//!
//! Every price vector induces an assignment of signals to products (or to no
//! purchase). For a fixed assignment the feasible prices form a polyhedron, so
//! the best price vector is found by one small LP per assignment. Strict
//! preferences are relaxed to weak ones; the resulting prices are then
//! re-evaluated under buyer best response, which can only raise revenue.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{buyer_choice, SignalStats, TieBreak};
use crate::oracle::lp::{LinearProgram, LpStatus, Sense};
use crate::{Error, Result};

/// Upper limit on the number of enumerated assignments.
pub const MAX_ASSIGNMENTS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct PricingSolution {
    pub revenue: f64,
    /// Infinite for products not offered.
    pub prices: Vec<f64>,
}

/// Revenue of posted `prices` over the posterior type space.
pub fn pricing_revenue_stats(stats: &SignalStats, prices: &[f64]) -> f64 {
    stats
        .nu
        .iter()
        .zip(&stats.r)
        .map(|(nu, r)| r * buyer_choice(nu, prices, TieBreak::SellerOptimal).payment)
        .sum()
}

/// Best deterministic prices, offering only the products flagged in `offer`
/// (all products when `None`).
pub fn best_pricing(stats: &SignalStats, offer: Option<&[bool]>) -> Result<PricingSolution> {
    let m = stats.m();
    let ns = stats.num_signals();
    let allowed: Vec<usize> = match offer {
        Some(mask) if mask.len() != m => {
            return Err(Error::DimensionMismatch {
                what: "product mask",
                expected: m,
                found: mask.len(),
            })
        }
        Some(mask) => (0..m).filter(|&i| mask[i]).collect(),
        None => (0..m).collect(),
    };
    let options = allowed.len() + 1;
    let count = (0..ns).try_fold(1usize, |acc, _| acc.checked_mul(options));
    let count = match count {
        Some(c) if c <= MAX_ASSIGNMENTS => c,
        _ => {
            return Err(Error::SizeLimit {
                what: "pricing assignments",
                limit: MAX_ASSIGNMENTS,
                found: usize::MAX,
            })
        }
    };

    let mut best = PricingSolution {
        revenue: 0.0,
        prices: vec![f64::INFINITY; m],
    };
    let mut assign = vec![0usize; ns];
    for code in 0..count {
        let mut c = code;
        for a in assign.iter_mut() {
            *a = c % options;
            c /= options;
        }
        // option 0 = no purchase, option o ≥ 1 = allowed[o - 1]
        let mut used = vec![false; m];
        for &a in &assign {
            if a > 0 {
                used[allowed[a - 1]] = true;
            }
        }
        if let Some(prices) = assignment_prices(stats, &assign, &allowed, &used)? {
            let revenue = pricing_revenue_stats(stats, &prices);
            if revenue > best.revenue + 1e-12 {
                best = PricingSolution { revenue, prices };
            }
        }
    }
    Ok(best)
}

fn assignment_prices(
    stats: &SignalStats,
    assign: &[usize],
    allowed: &[usize],
    used: &[bool],
) -> Result<Option<Vec<f64>>> {
    let m = stats.m();
    let offered: Vec<usize> = (0..m).filter(|&i| used[i]).collect();
    let mut prices = vec![f64::INFINITY; m];
    if offered.is_empty() {
        return Ok(Some(prices));
    }
    let var = |i: usize| offered.iter().position(|&j| j == i).expect("offered product");
    let mut lp = LinearProgram::new(offered.len());
    for (s, &a) in assign.iter().enumerate() {
        let nu = &stats.nu[s];
        if a == 0 {
            for &j in &offered {
                // ν_j(s) − p_j ≤ 0
                lp.add_sparse(&[(var(j), 1.0)], Sense::Ge, nu[j]);
            }
        } else {
            let i = allowed[a - 1];
            lp.set_objective(var(i), lp.objective()[var(i)] + stats.r[s]);
            lp.add_sparse(&[(var(i), 1.0)], Sense::Le, nu[i]);
            for &j in &offered {
                if j != i {
                    // ν_i − p_i ≥ ν_j − p_j
                    lp.add_sparse(&[(var(i), 1.0), (var(j), -1.0)], Sense::Le, nu[i] - nu[j]);
                }
            }
        }
    }
    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => {
            for (v, &i) in offered.iter().enumerate() {
                prices[i] = sol.x[v].max(0.0);
            }
            Ok(Some(prices))
        }
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Internal("pricing LP is bounded by posterior values".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_signal_posts_best_mean() {
        let stats = SignalStats::new(vec![1.0], vec![vec![4.4, 4.2]]).unwrap();
        let sol = best_pricing(&stats, None).unwrap();
        assert!((sol.revenue - 4.4).abs() < 1e-9);
    }

    #[test]
    fn two_posteriors() {
        // posteriors (10,5) w.p. 0.2 and (3,4) w.p. 0.8: prices (9,4) give 5
        let stats = SignalStats::new(vec![0.2, 0.8], vec![vec![10.0, 5.0], vec![3.0, 4.0]]).unwrap();
        let sol = best_pricing(&stats, None).unwrap();
        assert!((sol.revenue - 5.0).abs() < 1e-9, "{}", sol.revenue);
        let only_first = best_pricing(&stats, Some(&[true, false])).unwrap();
        // price 10 to one type (2) or 3 to both (3)
        assert!((only_first.revenue - 3.0).abs() < 1e-9);
        assert!(only_first.prices[1].is_infinite());
    }

    #[test]
    fn agrees_with_price_grid() {
        let stats = SignalStats::new(
            vec![0.3, 0.5, 0.2],
            vec![vec![1.0, 2.5], vec![3.0, 0.5], vec![2.0, 2.0]],
        )
        .unwrap();
        let sol = best_pricing(&stats, None).unwrap();
        let mut grid_best = 0.0f64;
        for a in 0..=60 {
            for b in 0..=60 {
                let p = [a as f64 * 0.05, b as f64 * 0.05];
                grid_best = grid_best.max(pricing_revenue_stats(&stats, &p));
            }
        }
        assert!(sol.revenue >= grid_best - 1e-9);
        assert!((pricing_revenue_stats(&stats, &sol.prices) - sol.revenue).abs() < 1e-12);
    }
}
