use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::conditions::{is_negatively_affiliated, permutations};
use crate::model::ValueDistribution;
use crate::{Error, Result};

/// Attempts allowed to the rejection sampler for negatively affiliated grids.
pub const REJECTION_BUDGET: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Arbitrary support points with a common factor and random masses.
    Correlated,
    /// Mostly low types plus rare types with one very high value.
    TwoScale,
    /// Log-submodular masses on a full product grid.
    NegAffiliated,
    /// Random multisets expanded over all coordinate permutations.
    Exchangeable,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Correlated => "correlated",
            Family::TwoScale => "two-scale",
            Family::NegAffiliated => "neg-affiliated",
            Family::Exchangeable => "exchangeable",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correlated" => Ok(Family::Correlated),
            "two-scale" => Ok(Family::TwoScale),
            "neg-affiliated" => Ok(Family::NegAffiliated),
            "exchangeable" => Ok(Family::Exchangeable),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// Everything needed to reproduce a random instance.
///
/// `m` and `size` are inclusive ranges; the actual values are drawn from the
/// seeded stream. `size` is the support size for `correlated` and
/// `two-scale`, the number of values per coordinate for `neg-affiliated`, and
/// the number of multisets for `exchangeable`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub m: (usize, usize),
    pub size: (usize, usize),
    /// Mass of the rare types (`two-scale`).
    pub eps: f64,
    /// Strength of the submodular tilt (`neg-affiliated`); 0 gives a product measure.
    pub tilt: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, m: usize, size: usize, seed: u64) -> Self {
        Self {
            family,
            m: (m, m),
            size: (size, size),
            eps: 0.01,
            tilt: 2.0,
            seed,
        }
    }

    pub fn with_ranges(family: Family, m: (usize, usize), size: (usize, usize), seed: u64) -> Self {
        Self {
            m,
            size,
            ..Self::new(family, 1, 1, seed)
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (usize, usize)| lo >= 1 && lo <= hi;
        if !ok(self.m) || !ok(self.size) {
            return Err(Error::InvalidParameter(format!(
                "ranges must satisfy 1 ≤ lo ≤ hi (m = {:?}, size = {:?})",
                self.m, self.size
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if !(self.tilt >= 0.0 && self.tilt.is_finite()) {
            return Err(Error::InvalidParameter("tilt must be non-negative".into()));
        }
        Ok(())
    }
}

fn fmt_range(f: &mut fmt::Formatter<'_>, key: &str, (lo, hi): (usize, usize)) -> fmt::Result {
    if lo == hi {
        write!(f, "{key}={lo}")
    } else {
        write!(f, "{key}={lo}..{hi}")
    }
}

/// `family:m=2..5,k=3,eps=0.01,tilt=2,seed=7`
impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family.as_str())?;
        fmt_range(f, "m", self.m)?;
        f.write_str(",")?;
        fmt_range(f, "k", self.size)?;
        write!(f, ",eps={},tilt={},seed={}", self.eps, self.tilt, self.seed)
    }
}

fn parse_range(value: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("bad range {value:?}"));
    match value.split_once("..") {
        Some((a, b)) => Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
        None => {
            let x = value.parse().map_err(|_| bad())?;
            Ok((x, x))
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses `family[:key=value,...]` with keys `m`, `k` (alias `size`,
    /// `levels`, `count`), `eps`, `tilt` and `seed`. Unspecified keys default
    /// to `m=2`, `k=4`, `eps=0.01`, `tilt=2`, `seed=0`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = match s.split_once(':') {
            Some((f, r)) => (f, r),
            None => (s, ""),
        };
        let mut spec = GeneratorSpec::new(family.trim().parse()?, 2, 4, 0);
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got {item:?}")))?;
            let bad = || Error::InvalidParameter(format!("bad value for {key}: {value:?}"));
            match key.trim() {
                "m" => spec.m = parse_range(value)?,
                "k" | "size" | "levels" | "count" => spec.size = parse_range(value)?,
                "eps" => spec.eps = value.parse().map_err(|_| bad())?,
                "tilt" => spec.tilt = value.parse().map_err(|_| bad())?,
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                other => return Err(Error::InvalidParameter(format!("unknown key {other:?}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<ValueDistribution> {
    match spec.family {
        Family::Correlated => random_correlated(spec),
        Family::TwoScale => random_two_scale(spec),
        Family::NegAffiliated => random_neg_affiliated(spec),
        Family::Exchangeable => random_exchangeable(spec),
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi)
}

/// Positive weights normalised to sum to one.
fn masses(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -libm::log(1.0 - rng.gen::<f64>()) + 1e-3)
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn finish(spec: &GeneratorSpec, m: usize, support: Vec<Vec<f64>>, prob: Vec<f64>) -> Result<ValueDistribution> {
    Ok(ValueDistribution::new(m, support, prob)?.with_name(spec.to_string()))
}

pub fn random_correlated(spec: &GeneratorSpec) -> Result<ValueDistribution> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = draw(&mut rng, spec.m);
    let k = draw(&mut rng, spec.size);
    let rho: f64 = rng.gen();
    let scale: Vec<f64> = (0..m).map(|_| 1.0 + 9.0 * rng.gen::<f64>()).collect();
    let support = (0..k)
        .map(|_| {
            let z: f64 = rng.gen();
            scale
                .iter()
                .map(|&s| s * (rho * z + (1.0 - rho) * rng.gen::<f64>()))
                .collect()
        })
        .collect();
    let prob = masses(&mut rng, k);
    finish(spec, m, support, prob)
}

/// Shape of the worst case for uniform pricing: most mass on types valuing
/// the last product near 1, and mass about `eps` on types valuing product 0
/// near `1/eps`. Needs at least two support points.
pub fn random_two_scale(spec: &GeneratorSpec) -> Result<ValueDistribution> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = draw(&mut rng, spec.m);
    let k = draw(&mut rng, spec.size).max(2);
    let high = (k / 3).max(1);
    let low = k - high;
    let eps = spec.eps;
    let mut support = Vec::with_capacity(k);
    for _ in 0..low {
        let mut v: Vec<f64> = (0..m).map(|_| 0.05 * rng.gen::<f64>()).collect();
        v[m - 1] = 1.0 + 0.05 * rng.gen::<f64>();
        support.push(v);
    }
    for _ in 0..high {
        let mut v: Vec<f64> = (0..m).map(|_| 1.0 + 0.05 * rng.gen::<f64>()).collect();
        v[0] = (0.9 + 0.1 * rng.gen::<f64>()) / eps;
        support.push(v);
    }
    let mut prob: Vec<f64> = masses(&mut rng, low).into_iter().map(|f| f * (1.0 - eps)).collect();
    prob.extend(masses(&mut rng, high).into_iter().map(|f| f * eps));
    let total: f64 = prob.iter().sum();
    prob.iter_mut().for_each(|f| *f /= total);
    finish(spec, m, support, prob)
}

/// Full product grid with a product measure tilted by `−a_ij·u_i·u_j` terms
/// (`a_ij ≥ 0`, `u` increasing), which keeps the log-mass submodular.
/// Every candidate is re-checked and rejected if the check fails.
pub fn random_neg_affiliated(spec: &GeneratorSpec) -> Result<ValueDistribution> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = draw(&mut rng, spec.m);
    let levels = draw(&mut rng, spec.size);
    let grid: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let mut vals: Vec<f64> = (0..levels).map(|_| 10.0 * rng.gen::<f64>()).collect();
            vals.sort_by(f64::total_cmp);
            vals
        })
        .collect();
    let count = levels.checked_pow(m as u32).ok_or(Error::SizeLimit {
        what: "grid size",
        limit: usize::MAX,
        found: usize::MAX,
    })?;
    let index = |mut c: usize| -> Vec<usize> {
        (0..m)
            .map(|_| {
                let l = c % levels;
                c /= levels;
                l
            })
            .collect()
    };
    let support: Vec<Vec<f64>> = (0..count)
        .map(|c| index(c).iter().enumerate().map(|(i, &l)| grid[i][l]).collect())
        .collect();
    let denom = (levels.max(2) - 1) as f64;

    for _ in 0..REJECTION_BUDGET {
        let marg: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..levels).map(|_| libm::log(0.1 + rng.gen::<f64>())).collect())
            .collect();
        let mut pair = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                pair[i][j] = spec.tilt * rng.gen::<f64>();
            }
        }
        let logf: Vec<f64> = (0..count)
            .map(|c| {
                let l = index(c);
                let mut x: f64 = (0..m).map(|i| marg[i][l[i]]).sum();
                for i in 0..m {
                    for j in i + 1..m {
                        x -= pair[i][j] * (l[i] as f64 / denom) * (l[j] as f64 / denom);
                    }
                }
                x
            })
            .collect();
        let top = logf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = logf.iter().map(|&x| libm::exp(x - top)).collect();
        let total: f64 = raw.iter().sum();
        let prob: Vec<f64> = raw.into_iter().map(|w| w / total).collect();
        let dist = finish(spec, m, support.clone(), prob)?;
        if is_negatively_affiliated(&dist).holds {
            return Ok(dist);
        }
    }
    Err(Error::RejectionBudget {
        attempts: REJECTION_BUDGET,
    })
}

/// Random value multisets, each spread evenly over all of its orderings.
pub fn random_exchangeable(spec: &GeneratorSpec) -> Result<ValueDistribution> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = draw(&mut rng, spec.m);
    if m > 8 {
        return Err(Error::SizeLimit {
            what: "products",
            limit: 8,
            found: m,
        });
    }
    let count = draw(&mut rng, spec.size);
    let perms = permutations(m);
    let weights = masses(&mut rng, count);
    let mut support = Vec::with_capacity(count * perms.len());
    let mut prob = Vec::with_capacity(count * perms.len());
    for w in weights {
        let base: Vec<f64> = (0..m).map(|_| 10.0 * rng.gen::<f64>()).collect();
        for p in &perms {
            support.push(p.iter().map(|&i| base[i]).collect());
            prob.push(w / perms.len() as f64);
        }
    }
    finish(spec, m, support, prob)
}
