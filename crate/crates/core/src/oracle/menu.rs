//! Revenue-optimal menus for a fixed posterior type space.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{signal_stats, InformationStructure, Mechanism, SignalStats, ValueDistribution};
use crate::oracle::lp::{LinearProgram, LpStatus, Sense};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MenuSolution {
    pub revenue: f64,
    pub alloc: Vec<Vec<f64>>,
    pub price: Vec<f64>,
}

impl MenuSolution {
    pub fn into_mechanism(self, info: InformationStructure) -> Result<Mechanism> {
        Mechanism::new(info, self.alloc, self.price)
    }
}

/// Which allocation variables the menu program may use.
#[derive(Debug, Clone, Copy)]
pub enum AllocRule<'a> {
    Any,
    /// Only products flagged `true` may be allocated.
    Products(&'a [bool]),
    /// Allocations fixed per signal; only payments are chosen.
    Fixed(&'a [Vec<f64>]),
}

/// Maximises `Σ r(s)·p(s)` over lotteries `x(s)` and payments `p(s)` subject
/// to IC and IR between all posterior types.
pub fn optimal_menu_lp(stats: &SignalStats) -> Result<MenuSolution> {
    menu_lp(stats, AllocRule::Any)
}

pub fn menu_lp(stats: &SignalStats, rule: AllocRule<'_>) -> Result<MenuSolution> {
    let ns = stats.num_signals();
    let m = stats.m();
    if let AllocRule::Products(mask) = rule {
        if mask.len() != m {
            return Err(Error::DimensionMismatch {
                what: "product mask",
                expected: m,
                found: mask.len(),
            });
        }
    }
    if let AllocRule::Fixed(alloc) = rule {
        if alloc.len() != ns || alloc.iter().any(|x| x.len() != m) {
            return Err(Error::DimensionMismatch {
                what: "fixed allocation",
                expected: ns,
                found: alloc.len(),
            });
        }
    }

    // x(s,i) is either a variable or a constant
    let mut xvar: Vec<Vec<Option<usize>>> = vec![vec![None; m]; ns];
    let mut xconst = vec![vec![0.0; m]; ns];
    let mut nv = 0;
    for s in 0..ns {
        for i in 0..m {
            match rule {
                AllocRule::Any => {
                    xvar[s][i] = Some(nv);
                    nv += 1;
                }
                AllocRule::Products(mask) => {
                    if mask[i] {
                        xvar[s][i] = Some(nv);
                        nv += 1;
                    }
                }
                AllocRule::Fixed(alloc) => xconst[s][i] = alloc[s][i],
            }
        }
    }
    // work in units of the largest posterior value
    let unit = stats.scale().max(f64::MIN_POSITIVE);
    let nu: Vec<Vec<f64>> = stats.nu.iter().map(|v| v.iter().map(|x| x / unit).collect()).collect();
    // utilities u(s) = ν(s)·x(s) − p(s) replace the free payments
    let uvar = |s: usize| nv + s;
    let mut lp = LinearProgram::new(nv + ns);
    let mut constant = 0.0;
    for s in 0..ns {
        lp.set_objective(uvar(s), -stats.r[s]);
        for i in 0..m {
            match xvar[s][i] {
                Some(j) => {
                    lp.set_objective(j, stats.r[s] * nu[s][i]);
                }
                None => constant += stats.r[s] * nu[s][i] * xconst[s][i],
            }
        }
    }

    for s in 0..ns {
        let vars: Vec<(usize, f64)> = xvar[s].iter().flatten().map(|&j| (j, 1.0)).collect();
        if !vars.is_empty() {
            lp.add_sparse(&vars, Sense::Le, 1.0);
        }
        // IC: u(s) − u(t) − (ν(s) − ν(t))·x(t) ≥ 0; IR is u(s) ≥ 0
        for t in 0..ns {
            if t == s {
                continue;
            }
            let mut terms = vec![(uvar(s), 1.0), (uvar(t), -1.0)];
            let mut rhs = 0.0;
            for i in 0..m {
                let gap = nu[s][i] - nu[t][i];
                match xvar[t][i] {
                    Some(j) => terms.push((j, -gap)),
                    None => rhs += gap * xconst[t][i],
                }
            }
            lp.add_sparse(&terms, Sense::Ge, rhs);
        }
    }

    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Internal("menu LP: the zero menu is always feasible".into()));
    }
    let mut alloc = xconst.clone();
    for s in 0..ns {
        for i in 0..m {
            if let Some(j) = xvar[s][i] {
                alloc[s][i] = sol.x[j].clamp(0.0, 1.0);
            }
        }
        let total: f64 = alloc[s].iter().sum();
        if total > 1.0 {
            alloc[s].iter_mut().for_each(|x| *x /= total);
        }
    }
    let price: Vec<f64> = (0..ns)
        .map(|s| {
            let value: f64 = (0..m)
                .map(|i| nu[s][i] * xvar[s][i].map_or(xconst[s][i], |j| sol.x[j]))
                .sum();
            (value - sol.x[uvar(s)]) * unit
        })
        .collect();
    Ok(MenuSolution {
        revenue: (sol.objective + constant) * unit,
        alloc,
        price,
    })
}

/// Optimal menu for the posteriors induced by `info`, packaged as a mechanism.
pub fn optimal_mechanism(
    dist: &ValueDistribution,
    info: &InformationStructure,
) -> Result<(f64, Mechanism)> {
    let stats = signal_stats(dist, info)?;
    let sol = optimal_menu_lp(&stats)?;
    let revenue = sol.revenue;
    Ok((revenue, sol.into_mechanism(info.clone())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::model::{audit_ic_ir, revenue};

    #[test]
    fn full_disclosure_lottery_instance() {
        let d = instances::example_lottery_opt();
        let (rev, mech) = optimal_mechanism(&d, &InformationStructure::full_disclosure(2)).unwrap();
        assert!((rev - 12.25).abs() < 1e-9, "rev = {rev}");
        assert!(audit_ic_ir(&d, &mech, 1e-9).unwrap().is_clean());
        assert!((revenue(&d, &mech).unwrap() - 12.25).abs() < 1e-9);
    }

    #[test]
    fn single_type_sells_best_product() {
        let stats = SignalStats::new(vec![1.0], vec![vec![2.0, 7.0, 3.0]]).unwrap();
        let sol = optimal_menu_lp(&stats).unwrap();
        assert!((sol.revenue - 7.0).abs() < 1e-9);
        assert!((sol.alloc[0][1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn example_one_partition_menu() {
        let d = instances::example_complex_info();
        let info = InformationStructure::from_partition(&[0, 1, 1]);
        let (rev, _) = optimal_mechanism(&d, &info).unwrap();
        assert!((rev - 5.0).abs() < 1e-9, "rev = {rev}");
    }

    #[test]
    fn fixed_allocation_and_masks() {
        let stats = SignalStats::new(vec![0.5, 0.5], vec![vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let fixed = [vec![1.0, 0.0], vec![0.0, 1.0]];
        let sol = menu_lp(&stats, AllocRule::Fixed(&fixed)).unwrap();
        assert!((sol.revenue - 2.5).abs() < 1e-9);
        let sol = menu_lp(&stats, AllocRule::Products(&[false, true])).unwrap();
        assert!((sol.revenue - 1.0).abs() < 1e-9, "{}", sol.revenue);
        assert!(menu_lp(&stats, AllocRule::Products(&[true])).is_err());
    }

    #[test]
    fn wide_value_range_beats_pricing() {
        use crate::oracle::pricing::best_pricing;
        for n in 2..=6 {
            let d = instances::hart_nisan_arc(n, 0.05).unwrap();
            let stats = signal_stats(&d, &InformationStructure::full_disclosure(d.len())).unwrap();
            let pricing = best_pricing(&stats, None).unwrap().revenue;
            let menu = optimal_menu_lp(&stats).unwrap().revenue;
            assert!(menu >= pricing - 1e-12, "n = {n}: menu {menu} < pricing {pricing}");
        }
    }
}
