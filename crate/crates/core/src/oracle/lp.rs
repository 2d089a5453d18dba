//! Dense two-phase primal simplex.
//!
//! Entering variables follow Bland's rule and the leaving row comes from a
//! Harris ratio test, which prefers the largest pivot among rows that are
//! nearly tied. Rows are equilibrated before the tableau is built and the
//! tableau is periodically rebuilt from the original rows. The returned vertex
//! is a deterministic function of the input.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `maximize c·x` subject to linear rows and per-variable bounds.
/// Bounds default to `[0, +inf)`; either side may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Constraint>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective at `x`; meaningful only when `status` is `Optimal`.
    pub objective: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("LP dimension mismatch: expected {expected} coefficients, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("LP contains a non-finite coefficient")]
    NonFinite,
    #[error("variable {0} has an empty bound interval")]
    EmptyBounds(usize),
    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),
    #[error("simplex lost numerical accuracy")]
    Numerical,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_objective(&mut self, j: usize, c: f64) -> &mut Self {
        self.objective[j] = c;
        self
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn set_free(&mut self, j: usize) -> &mut Self {
        self.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.rows.push(Constraint { coeffs, sense, rhs });
        self
    }

    pub fn add_sparse(&mut self, terms: &[(usize, f64)], sense: Sense, rhs: f64) -> &mut Self {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.add_row(coeffs, sense, rhs)
    }

    /// Returns the LP with its rows in a different order.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let mut out = self.clone();
        out.rows = order.iter().map(|&r| self.rows[r].clone()).collect();
        out
    }

    /// Multiplies row `r` by a positive factor.
    pub fn scale_row(&mut self, r: usize, factor: f64) {
        let row = &mut self.rows[r];
        row.coeffs.iter_mut().for_each(|a| *a *= factor);
        row.rhs *= factor;
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for row in &self.rows {
            if row.coeffs.len() != n {
                return Err(LpError::DimensionMismatch {
                    expected: n,
                    found: row.coeffs.len(),
                });
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite);
            }
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(LpError::NonFinite);
            }
            if lo > hi {
                return Err(LpError::EmptyBounds(j));
            }
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        solve(self)
    }
}

const PIVOT_TOL: f64 = 1e-10;
/// Primal slack allowed in the ratio test when choosing a larger pivot.
const HARRIS_TOL: f64 = 1e-12;
/// Relative to the largest objective coefficient.
const COST_TOL: f64 = 1e-13;
/// Reduced profits below this (relative) are treated as noise when no pivot exists.
const NOISE_TOL: f64 = 1e-9;
/// Pivots between rebuilds of the tableau from the original rows.
const REFACTOR_EVERY: usize = 50;

#[derive(Clone, Copy)]
enum VarMap {
    /// x = shift + y
    Shift(usize, f64),
    /// x = shift - y
    Flip(usize, f64),
    /// x = y⁺ - y⁻
    Split(usize, usize),
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        if lo.is_finite() {
            maps.push(VarMap::Shift(ncols, lo));
            if hi.is_finite() {
                bound_rows.push((ncols, hi - lo));
            }
            ncols += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Flip(ncols, hi));
            ncols += 1;
        } else {
            maps.push(VarMap::Split(ncols, ncols + 1));
            ncols += 2;
        }
    }

    // transformed rows over the non-negative columns
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::with_capacity(lp.rows.len() + bound_rows.len());
    for row in &lp.rows {
        let mut a = vec![0.0; ncols];
        let mut rhs = row.rhs;
        for (j, &coef) in row.coeffs.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift(c, s) => {
                    a[c] += coef;
                    rhs -= coef * s;
                }
                VarMap::Flip(c, s) => {
                    a[c] -= coef;
                    rhs -= coef * s;
                }
                VarMap::Split(p, q) => {
                    a[p] += coef;
                    a[q] -= coef;
                }
            }
        }
        rows.push((a, row.sense, rhs));
    }
    for &(c, width) in &bound_rows {
        let mut a = vec![0.0; ncols];
        a[c] = 1.0;
        rows.push((a, Sense::Le, width));
    }

    let mut cost = vec![0.0; ncols];
    for (j, &c) in lp.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shift(col, _) => cost[col] += c,
            VarMap::Flip(col, _) => cost[col] -= c,
            VarMap::Split(p, q) => {
                cost[p] += c;
                cost[q] -= c;
            }
        }
    }

    // equilibrate, drop empty rows, make right-hand sides non-negative
    let mut kept: Vec<(Vec<f64>, Sense, f64)> = Vec::with_capacity(rows.len());
    for (mut a, mut sense, mut rhs) in rows {
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            let tol = 1e-9 * rhs.abs().max(1.0);
            let ok = match sense {
                Sense::Le => rhs >= -tol,
                Sense::Ge => rhs <= tol,
                Sense::Eq => rhs.abs() <= tol,
            };
            if !ok {
                return Ok(infeasible(n));
            }
            continue;
        }
        a.iter_mut().for_each(|x| *x /= scale);
        rhs /= scale;
        // a zero right-hand side lets a slack start in the basis
        if rhs < 0.0 || rhs == 0.0 && sense == Sense::Ge {
            a.iter_mut().for_each(|x| *x = -*x);
            rhs = -rhs;
            sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
        kept.push((a, sense, rhs));
    }

    let m = kept.len();
    let n_slack = kept.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = kept.iter().filter(|r| r.1 != Sense::Le).count();
    let art_start = ncols + n_slack;
    let total = art_start + n_art;
    let width = total + 1;

    let mut t = Tableau {
        m,
        width,
        data: vec![0.0; m * width],
        original: Vec::new(),
        basis: vec![0; m],
        d: vec![0.0; width],
        since_refactor: 0,
    };
    let mut slack = ncols;
    let mut art = art_start;
    for (r, (a, sense, rhs)) in kept.iter().enumerate() {
        let row = &mut t.data[r * width..(r + 1) * width];
        row[..ncols].copy_from_slice(a);
        row[total] = *rhs;
        match sense {
            Sense::Le => {
                row[slack] = 1.0;
                t.basis[r] = slack;
                slack += 1;
            }
            Sense::Ge => {
                row[slack] = -1.0;
                slack += 1;
                row[art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
            Sense::Eq => {
                row[art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
        }
    }

    t.original = t.data.clone();
    let limit = 20_000 + 50 * (m + total);
    let mut iterations = 0;

    if n_art > 0 {
        // phase 1: maximise -Σ artificials
        let mut phase1 = vec![0.0; total];
        phase1[art_start..].iter_mut().for_each(|c| *c = -1.0);
        t.price_out(&phase1);
        match t.run(total, &phase1, &mut iterations, limit)? {
            Phase::Optimal => {}
            Phase::Unbounded => return Err(LpError::Numerical),
        }
        let max_rhs = kept.iter().fold(1.0f64, |a, r| a.max(r.2));
        if t.d[total] > 1e-8 * max_rhs {
            return Ok(infeasible(n));
        }
        // pivot remaining artificials out of the basis where possible
        for r in 0..m {
            if t.basis[r] < art_start {
                continue;
            }
            let row = &t.data[r * width..(r + 1) * width];
            if let Some(j) = (0..art_start).find(|&j| row[j].abs() > 1e-9) {
                t.pivot(r, j);
            }
        }
    }

    // phase 2
    let mut phase2 = vec![0.0; total];
    phase2[..ncols].copy_from_slice(&cost);
    t.price_out(&phase2);
    // artificial columns never re-enter
    let status = match t.run(art_start, &phase2, &mut iterations, limit)? {
        Phase::Optimal => LpStatus::Optimal,
        Phase::Unbounded => LpStatus::Unbounded,
    };

    let mut y = vec![0.0; ncols];
    for r in 0..m {
        let b = t.basis[r];
        if b < ncols {
            y[b] = t.data[r * width + total].max(0.0);
        }
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift(c, s) => s + y[c],
            VarMap::Flip(c, s) => s - y[c],
            VarMap::Split(p, q) => y[p] - y[q],
        })
        .collect();
    let objective = if status == LpStatus::Optimal {
        lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum()
    } else {
        f64::INFINITY
    };
    Ok(LpSolution {
        status,
        objective,
        x,
    })
}

fn infeasible(n: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        objective: f64::NEG_INFINITY,
        x: vec![0.0; n],
    }
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    /// The tableau before any pivot, used to rebuild `data` for the current basis.
    original: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced profits; the last entry is minus the objective value.
    d: Vec<f64>,
    since_refactor: usize,
}

impl Tableau {
    /// Reduced profits `c − c_B·B⁻¹A` for the current basis.
    fn price_out(&mut self, cost: &[f64]) {
        let w = self.width;
        self.d.iter_mut().for_each(|x| *x = 0.0);
        self.d[..cost.len()].copy_from_slice(cost);
        for r in 0..self.m {
            let cb = cost.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (dj, &a) in self.d.iter_mut().zip(&self.data[r * w..(r + 1) * w]) {
                    *dj -= cb * a;
                }
            }
        }
    }

    /// Recomputes `B⁻¹[A | b]` from the original rows by Gauss–Jordan
    /// elimination with partial pivoting. Leaves the tableau untouched when
    /// the basis looks singular.
    fn refactor(&mut self, cost: &[f64]) {
        let (m, w) = (self.m, self.width);
        let mut data = self.original.clone();
        let mut basis = vec![usize::MAX; m];
        for &col in &self.basis {
            let pick = (0..m)
                .filter(|&r| basis[r] == usize::MAX)
                .max_by(|&a, &b| data[a * w + col].abs().total_cmp(&data[b * w + col].abs()));
            let Some(r) = pick else { return };
            let p = data[r * w + col];
            if p.abs() < 1e-12 {
                return;
            }
            for x in &mut data[r * w..(r + 1) * w] {
                *x /= p;
            }
            for q in 0..m {
                if q == r {
                    continue;
                }
                let f = data[q * w + col];
                if f != 0.0 {
                    for j in 0..w {
                        data[q * w + j] -= f * data[r * w + j];
                    }
                    data[q * w + col] = 0.0;
                }
            }
            basis[r] = col;
        }
        for r in 0..m {
            let b = &mut data[r * w + w - 1];
            if *b < 0.0 {
                *b = 0.0;
            }
        }
        self.data = data;
        self.basis = basis;
        self.price_out(cost);
        self.since_refactor = 0;
    }

    fn run(
        &mut self,
        enter_limit: usize,
        cost: &[f64],
        iterations: &mut usize,
        limit: usize,
    ) -> Result<Phase, LpError> {
        let rhs = self.width - 1;
        let cmax = cost.iter().fold(0.0, |a: f64, c| a.max(c.abs())).max(f64::MIN_POSITIVE);
        let tol = COST_TOL * cmax;
        // columns whose tiny reduced profit has no usable pivot
        let mut skipped = vec![false; enter_limit];
        loop {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor(cost);
            }
            let Some(e) = (0..enter_limit).find(|&j| self.d[j] > tol && !skipped[j]) else {
                if self.since_refactor > 0 {
                    // confirm optimality on a freshly computed tableau
                    self.refactor(cost);
                    if self.since_refactor == 0 && (0..enter_limit).any(|j| self.d[j] > tol && !skipped[j]) {
                        continue;
                    }
                }
                return Ok(Phase::Optimal);
            };
            let column = |r: usize| self.data[r * self.width + e];
            let ratio = |r: usize| self.data[r * self.width + rhs] / column(r);
            // Harris ratio test: the largest pivot within a small feasibility slack
            let eligible: Vec<usize> = (0..self.m).filter(|&r| column(r) > PIVOT_TOL).collect();
            let bound = eligible
                .iter()
                .map(|&r| (self.data[r * self.width + rhs].max(0.0) + HARRIS_TOL) / column(r))
                .fold(f64::INFINITY, f64::min);
            let leave = eligible
                .into_iter()
                .filter(|&r| ratio(r) <= bound)
                .max_by(|&a, &b| column(a).total_cmp(&column(b)).then(self.basis[b].cmp(&self.basis[a])))
                .map(|r| (r, ratio(r)));
            let Some((r, _)) = leave else {
                if self.d[e] < NOISE_TOL * cmax {
                    skipped[e] = true;
                    continue;
                }
                return Ok(Phase::Unbounded);
            };
            skipped.iter_mut().for_each(|x| *x = false);
            self.pivot(r, e);
            self.since_refactor += 1;
            *iterations += 1;
            if *iterations > limit {
                return Err(LpError::IterationLimit(limit));
            }
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let p = self.data[r * w + e];
        for x in &mut self.data[r * w..(r + 1) * w] {
            *x /= p;
        }
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[e];
            if f != 0.0 {
                for (x, &a) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * a;
                }
                row[e] = 0.0;
            }
        }
        let f = self.d[e];
        if f != 0.0 {
            for (x, &a) in self.d.iter_mut().zip(prow.iter()) {
                *x -= f * a;
            }
            self.d[e] = 0.0;
        }
        self.basis[r] = e;
    }
}
