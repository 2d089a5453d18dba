//! Joint design of information and menu for two support points.
//!
//! With two types two signals suffice, so a structure is described by
//! `(α₁, α₂)`, the probability each type is sent signal 0. Relabelling the
//! signals maps `(α₁, α₂)` to `(1 − α₁, 1 − α₂)`, so only `α₁ + α₂ ≤ 1` is swept.

use alloc::vec;

use crate::model::{optimal_welfare, signal_stats, InformationStructure, SignalLabel, SignalStats, ValueDistribution};
use crate::oracle::menu::optimal_menu_lp;
use crate::oracle::{OracleBound, Provenance, Witness};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Base grid spacing on `[0, 1]`.
    pub step: f64,
    /// Number of local refinement rounds; each shrinks the spacing tenfold.
    pub refine_levels: usize,
    /// Points on each side of the incumbent in a refinement round.
    pub local_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            refine_levels: 3,
            local_points: 10,
        }
    }
}

impl GridConfig {
    pub fn coarse(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub fn without_refinement(self) -> Self {
        Self {
            refine_levels: 0,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDesign {
    pub value: f64,
    pub alpha: (f64, f64),
    /// Best value seen on the base grid, before refinement.
    pub base_value: f64,
}

pub fn binary_structure(a1: f64, a2: f64) -> InformationStructure {
    InformationStructure::new(
        vec![SignalLabel::Id(0), SignalLabel::Id(1)],
        vec![vec![a1, 1.0 - a1], vec![a2, 1.0 - a2]],
    )
    .expect("binary kernel is stochastic")
}

/// Maximises `eval` over binary structures by grid sweep plus local refinement.
pub fn binary_sweep(
    dist: &ValueDistribution,
    config: GridConfig,
    mut eval: impl FnMut(&SignalStats) -> Result<f64>,
) -> Result<BinaryDesign> {
    if dist.len() != 2 {
        return Err(Error::DimensionMismatch {
            what: "support size",
            expected: 2,
            found: dist.len(),
        });
    }
    if !(config.step > 0.0 && config.step <= 1.0) {
        return Err(Error::InvalidParameter("grid step must lie in (0, 1]".into()));
    }
    let n = libm::round(1.0 / config.step) as usize;
    let point = |i: usize| (i as f64 / n as f64).min(1.0);
    let mut value_at = |a1: f64, a2: f64| -> Result<f64> {
        let stats = signal_stats(dist, &binary_structure(a1, a2))?;
        eval(&stats)
    };

    let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
    for i in 0..=n {
        for j in 0..=n - i {
            let (a1, a2) = (point(i), point(j));
            let v = value_at(a1, a2)?;
            if v > best.0 + 1e-12 {
                best = (v, (a1, a2));
            }
        }
    }
    let base_value = best.0;
    let mut h = 1.0 / n as f64;
    for _ in 0..config.refine_levels {
        h /= 10.0;
        let (c1, c2) = best.1;
        let l = config.local_points as i64;
        for di in -l..=l {
            for dj in -l..=l {
                let a1 = c1 + di as f64 * h;
                let a2 = c2 + dj as f64 * h;
                if !(0.0..=1.0).contains(&a1) || !(0.0..=1.0).contains(&a2) {
                    continue;
                }
                let v = value_at(a1, a2)?;
                if v > best.0 + 1e-12 {
                    best = (v, (a1, a2));
                }
            }
        }
    }
    Ok(BinaryDesign {
        value: best.0,
        alpha: best.1,
        base_value,
    })
}

/// Best optimal-menu revenue over binary structures; the upper side is OPT-Wel.
pub fn binary_support_optimal(dist: &ValueDistribution, config: GridConfig) -> Result<OracleBound> {
    let design = binary_sweep(dist, config, |stats| Ok(optimal_menu_lp(stats)?.revenue))?;
    let info = binary_structure(design.alpha.0, design.alpha.1);
    let stats = signal_stats(dist, &info)?;
    let sol = optimal_menu_lp(&stats)?;
    let mechanism = sol.into_mechanism(info)?;
    Ok(OracleBound {
        lower: design.value,
        lower_witness: Witness {
            source: "binary-grid".into(),
            mechanism,
        },
        upper: optimal_welfare(dist),
        upper_provenance: Provenance::OptWel,
        dual_flow: None,
    })
}
