//! Ratio sweeps over generator seeds.

use persuade_core::approx::{two_price, uniform_half, TwoPriceParams};
use persuade_core::instances::{generate, GeneratorSpec};
use persuade_core::model::optimal_welfare;
use persuade_core::oracle::{certify, CertifyOptions, GridConfig};
use rayon::prelude::*;

use crate::format::{Cell, Table};
use crate::report::ORACLE_MAX_SUPPORT;

pub const COLUMNS: [&str; 9] = [
    "seed",
    "family",
    "K",
    "m",
    "opt_wel",
    "uniform_ratio",
    "two_price_ratio",
    "oracle_lower_ratio",
    "error",
];

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// The spec's own seed is the first seed of the sweep.
    pub spec: GeneratorSpec,
    pub count: usize,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    /// Run the oracle on instances with at most this many support points.
    pub oracle_max_support: usize,
    pub grid: GridConfig,
    pub two_price: TwoPriceParams,
    pub tolerance: f64,
}

impl BenchOptions {
    pub fn new(spec: GeneratorSpec, count: usize) -> Self {
        Self {
            spec,
            count,
            jobs: 0,
            oracle_max_support: ORACLE_MAX_SUPPORT,
            grid: GridConfig::coarse(0.05),
            two_price: TwoPriceParams::default(),
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub seed: u64,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub opt_wel: Option<f64>,
    pub uniform_ratio: Option<f64>,
    pub two_price_ratio: Option<f64>,
    pub oracle_lower_ratio: Option<f64>,
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(seed: u64, error: String) -> Self {
        Self {
            seed,
            k: None,
            m: None,
            opt_wel: None,
            uniform_ratio: None,
            two_price_ratio: None,
            oracle_lower_ratio: None,
            error: Some(error),
        }
    }
}

fn ratio(x: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        x / opt
    } else {
        1.0
    }
}

fn run_one(opts: &BenchOptions, seed: u64) -> BenchRow {
    let spec = opts.spec.with_seed(seed);
    let eval = || -> persuade_core::Result<BenchRow> {
        let d = generate(&spec)?;
        let opt = optimal_welfare(&d);
        let uniform = uniform_half(&d)?;
        let two = two_price(&d, &opts.two_price)?;
        let oracle = if d.len() <= opts.oracle_max_support {
            let options = CertifyOptions {
                max_support: opts.oracle_max_support,
                grid: opts.grid,
                two_price: opts.two_price,
            };
            Some(ratio(certify(&d, &options)?.bound.lower, opt))
        } else {
            None
        };
        Ok(BenchRow {
            seed,
            k: Some(d.len()),
            m: Some(d.m()),
            opt_wel: Some(opt),
            uniform_ratio: Some(ratio(uniform.revenue, opt)),
            two_price_ratio: Some(ratio(two.revenue, opt)),
            oracle_lower_ratio: oracle,
            error: None,
        })
    };
    eval().unwrap_or_else(|e| BenchRow::failed(seed, e.to_string()))
}

/// Rows in seed order regardless of how many threads ran them.
pub fn bench(opts: &BenchOptions) -> anyhow::Result<Vec<BenchRow>> {
    let seeds: Vec<u64> = (0..opts.count as u64).map(|i| opts.spec.seed.wrapping_add(i)).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build()?;
    Ok(pool.install(|| seeds.par_iter().map(|&s| run_one(opts, s)).collect()))
}

/// Ratio floors every row must clear: uniform ≥ 1/2, two-price ≥ uniform,
/// oracle lower bound ≤ OPT-Wel.
pub fn rows_pass(rows: &[BenchRow], tolerance: f64) -> bool {
    rows.iter().all(|r| {
        r.error.is_none()
            && r.uniform_ratio.is_some_and(|u| u >= 0.5 - tolerance)
            && r.two_price_ratio.zip(r.uniform_ratio).is_some_and(|(t, u)| t >= u - tolerance)
            && r.oracle_lower_ratio.is_none_or(|o| o <= 1.0 + tolerance)
    })
}

fn aggregate(values: impl Iterator<Item = Option<f64>>) -> (Option<f64>, Option<f64>) {
    let v: Vec<f64> = values.flatten().collect();
    if v.is_empty() {
        return (None, None);
    }
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    (Some(min), Some(v.iter().sum::<f64>() / v.len() as f64))
}

/// Per-seed rows followed by `min` and `mean` rows; just the header when the
/// sweep is empty.
pub fn table(family: &str, rows: &[BenchRow]) -> Table {
    let mut t = Table::new(&COLUMNS);
    for r in rows {
        t.push(vec![
            r.seed.into(),
            family.into(),
            r.k.into(),
            r.m.into(),
            r.opt_wel.into(),
            r.uniform_ratio.into(),
            r.two_price_ratio.into(),
            r.oracle_lower_ratio.into(),
            r.error.clone().into(),
        ]);
    }
    if rows.is_empty() {
        return t;
    }
    let columns: [fn(&BenchRow) -> Option<f64>; 3] = [|r| r.uniform_ratio, |r| r.two_price_ratio, |r| r.oracle_lower_ratio];
    let stats: Vec<(Option<f64>, Option<f64>)> = columns.iter().map(|f| aggregate(rows.iter().map(f))).collect();
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    for (label, pick) in [("min", 0), ("mean", 1)] {
        let value = |i: usize| -> Cell { if pick == 0 { stats[i].0 } else { stats[i].1 }.into() };
        t.push(vec![
            label.into(),
            family.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            value(0),
            value(1),
            value(2),
            if errors > 0 { format!("{errors} errors").into() } else { Cell::Empty },
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use persuade_core::instances::Family;

    fn opts(count: usize, jobs: usize) -> BenchOptions {
        let spec = GeneratorSpec::with_ranges(Family::Correlated, (1, 3), (1, 5), 40);
        BenchOptions {
            jobs,
            ..BenchOptions::new(spec, count)
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let a = bench(&opts(12, 1)).unwrap();
        let b = bench(&opts(12, 4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|r| r.seed).collect::<Vec<_>>(), (40..52).collect::<Vec<_>>());
        assert!(rows_pass(&a, 1e-6));
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let rows = bench(&opts(0, 1)).unwrap();
        assert_eq!(table("correlated", &rows).to_csv(), COLUMNS.join(",") + "\n");
        assert!(rows_pass(&rows, 1e-6));
    }

    #[test]
    fn aggregates_follow_rows() {
        let rows = bench(&opts(5, 2)).unwrap();
        let t = table("correlated", &rows);
        assert_eq!(t.rows.len(), 7);
        let min = rows.iter().filter_map(|r| r.uniform_ratio).fold(f64::INFINITY, f64::min);
        assert_eq!(t.rows[5][0], Cell::Text("min".into()));
        assert_eq!(t.rows[5][5], Cell::Num(min));
    }

    #[test]
    fn generator_errors_land_in_the_error_column() {
        let mut o = opts(2, 1);
        o.spec.family = Family::Exchangeable;
        o.spec.m = (9, 9);
        let rows = bench(&o).unwrap();
        assert!(rows.iter().all(|r| r.error.is_some()));
        assert!(!rows_pass(&rows, 1e-6));
    }
}
