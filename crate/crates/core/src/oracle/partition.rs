//! Exhaustive search over deterministic information structures.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{signal_stats, InformationStructure, Mechanism, ValueDistribution};
use crate::oracle::menu::{menu_lp, AllocRule};
use crate::oracle::pricing::best_pricing;
use crate::{Error, Result};

pub const DEFAULT_MAX_SUPPORT: usize = 8;

/// Set partitions of `{0..n}` as restricted-growth strings, in lexicographic order.
#[derive(Debug, Clone)]
pub struct Partitions {
    current: Vec<usize>,
    max_prefix: Vec<usize>,
    done: bool,
}

impl Partitions {
    pub fn new(n: usize) -> Self {
        Self {
            current: vec![0; n],
            max_prefix: vec![0; n],
            done: false,
        }
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let n = self.current.len();
        // advance: rightmost position that can grow
        let mut pos = None;
        for i in (1..n).rev() {
            if self.current[i] <= self.max_prefix[i - 1] {
                pos = Some(i);
                break;
            }
        }
        match pos {
            None => self.done = true,
            Some(i) => {
                self.current[i] += 1;
                self.max_prefix[i] = self.max_prefix[i - 1].max(self.current[i]);
                for j in i + 1..n {
                    self.current[j] = 0;
                    self.max_prefix[j] = self.max_prefix[i];
                }
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionDesign {
    pub revenue: f64,
    /// Block index of each support point.
    pub blocks: Vec<usize>,
    pub mechanism: Mechanism,
}

fn check_size(dist: &ValueDistribution, max_support: usize) -> Result<()> {
    if dist.len() > max_support {
        return Err(Error::SizeLimit {
            what: "support size",
            limit: max_support,
            found: dist.len(),
        });
    }
    Ok(())
}

fn search(
    dist: &ValueDistribution,
    max_support: usize,
    mut eval: impl FnMut(&[usize], &InformationStructure) -> Result<Option<(f64, Mechanism)>>,
) -> Result<PartitionDesign> {
    check_size(dist, max_support)?;
    let mut best: Option<PartitionDesign> = None;
    for blocks in Partitions::new(dist.len()) {
        let info = InformationStructure::from_partition(&blocks);
        if let Some((revenue, mechanism)) = eval(&blocks, &info)? {
            if best.as_ref().is_none_or(|b| revenue > b.revenue + 1e-12) {
                best = Some(PartitionDesign {
                    revenue,
                    blocks,
                    mechanism,
                });
            }
        }
    }
    best.ok_or_else(|| Error::Internal("no admissible partition".into()))
}

/// Best optimal-menu revenue over all deterministic information structures.
pub fn best_partition_design(dist: &ValueDistribution, max_support: usize) -> Result<PartitionDesign> {
    search(dist, max_support, |_, info| {
        let stats = signal_stats(dist, info)?;
        let sol = menu_lp(&stats, AllocRule::Any)?;
        Ok(Some((sol.revenue, sol.into_mechanism(info.clone())?)))
    })
}

/// Best revenue when every type must receive its top item: blocks are
/// restricted to a single top-item class and each block is allocated that item.
pub fn efficient_partition_design(
    dist: &ValueDistribution,
    max_support: usize,
) -> Result<PartitionDesign> {
    let m = dist.m();
    let top: Vec<usize> = (0..dist.len()).map(|k| dist.top_item(k)).collect();
    search(dist, max_support, |blocks, info| {
        let count = blocks.iter().max().map_or(0, |b| b + 1);
        let mut block_top = vec![None; count];
        for (k, &b) in blocks.iter().enumerate() {
            match block_top[b] {
                None => block_top[b] = Some(top[k]),
                Some(t) if t != top[k] => return Ok(None),
                _ => {}
            }
        }
        let alloc: Vec<Vec<f64>> = block_top
            .iter()
            .map(|t| {
                let mut x = vec![0.0; m];
                x[t.expect("every block is nonempty")] = 1.0;
                x
            })
            .collect();
        let stats = signal_stats(dist, info)?;
        let sol = menu_lp(&stats, AllocRule::Fixed(&alloc))?;
        Ok(Some((sol.revenue, sol.into_mechanism(info.clone())?)))
    })
}

/// Best deterministic-pricing revenue over all deterministic information structures.
pub fn best_pricing_partition(
    dist: &ValueDistribution,
    max_support: usize,
) -> Result<(f64, Vec<usize>, Vec<f64>)> {
    check_size(dist, max_support)?;
    let mut best = (f64::NEG_INFINITY, Vec::new(), Vec::new());
    for blocks in Partitions::new(dist.len()) {
        let info = InformationStructure::from_partition(&blocks);
        let stats = signal_stats(dist, &info)?;
        let sol = best_pricing(&stats, None)?;
        if sol.revenue > best.0 + 1e-12 {
            best = (sol.revenue, blocks, sol.prices);
        }
    }
    Ok(best)
}
