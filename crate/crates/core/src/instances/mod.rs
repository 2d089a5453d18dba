//! Named instances and seeded random generators.

mod random;

pub use random::{
    generate, random_correlated, random_exchangeable, random_neg_affiliated, random_two_scale,
    Family, GeneratorSpec, REJECTION_BUDGET,
};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::model::ValueDistribution;
use crate::{Error, Result};

/// ε used by [`appendix_horizontal_subopt`].
pub const HORIZONTAL_SUBOPT_EPS: f64 = 1e-6;

fn build(name: &str, m: usize, support: Vec<Vec<f64>>, prob: Vec<f64>) -> ValueDistribution {
    ValueDistribution::new(m, support, prob)
        .expect("built-in instance is valid")
        .with_name(name)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")))
    }
}

/// {(10,5): 0.2, (6,5): 0.4, (0,3): 0.4}
pub fn example_complex_info() -> ValueDistribution {
    build(
        "ex1",
        2,
        vec![vec![10.0, 5.0], vec![6.0, 5.0], vec![0.0, 3.0]],
        vec![0.2, 0.4, 0.4],
    )
}

/// {(0,20,9): ½, (4,0,5): ½}
pub fn example_lottery_opt() -> ValueDistribution {
    build(
        "ex2",
        3,
        vec![vec![0.0, 20.0, 9.0], vec![4.0, 0.0, 5.0]],
        vec![0.5, 0.5],
    )
}

/// Points `(1/ε)^i·(cos(iπ/2n), sin(iπ/2n))` with mass proportional to
/// `ε^i − ε^(i+1)`, `i = 0..=n`.
pub fn hart_nisan_arc(n: usize, eps: f64) -> Result<ValueDistribution> {
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::InvalidParameter("arc needs n ≥ 1".into()));
    }
    let norm = 1.0 - libm::pow(eps, (n + 1) as f64);
    let mut support = Vec::with_capacity(n + 1);
    let mut prob = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let radius = libm::pow(1.0 / eps, i as f64);
        let angle = i as f64 * PI / (2 * n) as f64;
        support.push(vec![
            (radius * libm::cos(angle)).max(0.0),
            (radius * libm::sin(angle)).max(0.0),
        ]);
        prob.push((libm::pow(eps, i as f64) - libm::pow(eps, (i + 1) as f64)) / norm);
    }
    Ok(build(&format!("arc(n={n},eps={eps})"), 2, support, prob))
}

/// {(0,1): 1−ε, (1/ε,1): ε}
pub fn tight_uniform_example(eps: f64) -> Result<ValueDistribution> {
    check_eps(eps)?;
    Ok(build(
        &format!("tight-uniform(eps={eps})"),
        2,
        vec![vec![0.0, 1.0], vec![1.0 / eps, 1.0]],
        vec![1.0 - eps, eps],
    ))
}

/// {(1,0): 1−ε, (1/ε,2/ε): ε}
pub fn two_item_hardness(eps: f64) -> Result<ValueDistribution> {
    check_eps(eps)?;
    Ok(build(
        &format!("lemma2(eps={eps})"),
        2,
        vec![vec![1.0, 0.0], vec![1.0 / eps, 2.0 / eps]],
        vec![1.0 - eps, eps],
    ))
}

/// Same values as [`example_lottery_opt`].
pub fn appendix_pricing_subopt() -> ValueDistribution {
    example_lottery_opt().with_name("a6")
}

/// `n` products and `n` profiles: profile `i` (1-based) has value `2^i` on
/// every product except `i`, where it is `2^i + ε`, and probability
/// `1 / (2^i (1 − 2^−n))`. ε is [`HORIZONTAL_SUBOPT_EPS`].
pub fn appendix_horizontal_subopt(n: usize) -> Result<ValueDistribution> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n ≥ 1".into()));
    }
    let norm = 1.0 - libm::pow(2.0, -(n as f64));
    let mut support = Vec::with_capacity(n);
    let mut prob = Vec::with_capacity(n);
    for i in 1..=n {
        let base = libm::pow(2.0, i as f64);
        let mut v = vec![base; n];
        v[i - 1] += HORIZONTAL_SUBOPT_EPS;
        support.push(v);
        prob.push(1.0 / (base * norm));
    }
    Ok(build(&format!("b1(n={n},eps={HORIZONTAL_SUBOPT_EPS})"), n, support, prob))
}

/// {(5,4): ½, (9,10): ½}
pub fn appendix_no_full_surplus() -> ValueDistribution {
    build(
        "b2",
        2,
        vec![vec![5.0, 4.0], vec![9.0, 10.0]],
        vec![0.5, 0.5],
    )
}

/// Built-in example identifiers accepted by [`builtin`].
pub const BUILTIN_IDS: [&str; 8] = ["ex1", "ex2", "arc", "tight-uniform", "lemma2", "a6", "b1", "b2"];

/// Looks up a built-in instance. `eps` and `n` apply to the parametrised ones
/// and default to 0.01 (0.05 for `arc`) and 4 (3 for `b1`).
pub fn builtin(id: &str, eps: Option<f64>, n: Option<usize>) -> Result<ValueDistribution> {
    match id {
        "ex1" => Ok(example_complex_info()),
        "ex2" => Ok(example_lottery_opt()),
        "arc" => hart_nisan_arc(n.unwrap_or(4), eps.unwrap_or(0.05)),
        "tight-uniform" => tight_uniform_example(eps.unwrap_or(0.01)),
        "lemma2" => two_item_hardness(eps.unwrap_or(0.01)),
        "a6" => Ok(appendix_pricing_subopt()),
        "b1" => appendix_horizontal_subopt(n.unwrap_or(3)),
        "b2" => Ok(appendix_no_full_surplus()),
        other => Err(Error::InvalidParameter(format!("unknown example id {other:?}"))),
    }
}
