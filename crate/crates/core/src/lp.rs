//! Exact-rational linear programming.
//!
//! A dense two-phase tableau simplex with Bland's anti-cycling rule. All
//! arithmetic is over arbitrary-precision rationals, so optima, primal and
//! dual solutions are exact and every solve is cross-checked against strong
//! duality and complementary slackness with zero tolerance. Matrix games sit
//! on top of this as `maximin`.
//!
//! Sizes here are desk scale (at most a few thousand columns), which is why a
//! dense tableau without presolve or scaling is the right tool.

use crate::error::{Error, Result};
use crate::game::Game;
use crate::rational::{is_exact_distribution, Rat};
use num::traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// Maximize `objective . x` subject to `matrix[k] . x  (sense_k)  rhs_k` and
/// the per-variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<Rat>,
    pub matrix: Vec<Vec<Rat>>,
    pub senses: Vec<ConstraintSense>,
    pub rhs: Vec<Rat>,
    pub bounds: Vec<VarBound>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: Rat,
    pub primal: Vec<Rat>,
    /// One multiplier per constraint. For a maximization problem the duals of
    /// `<=` rows are nonnegative, those of `>=` rows nonpositive, and those of
    /// equalities are free.
    pub dual: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(Error::InvalidProgram(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        let m = self.matrix.len();
        if self.senses.len() != m || self.rhs.len() != m {
            return Err(Error::InvalidProgram(
                "constraint matrix, senses, and rhs must have equal length".to_string(),
            ));
        }
        for (k, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidProgram(format!(
                    "constraint {k} has {} coefficients for {n} variables",
                    row.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    /// Expanded structural column: original variable index and sign.
    Structural(usize, bool),
    Slack(usize),
    Surplus(usize),
    Artificial(usize),
}

struct Simplex {
    /// `m x (ncols+1)` constraint rows, rhs in the last cell.
    rows: Vec<Vec<Rat>>,
    /// Phase-2 objective row: `z_j - c_j` entries, current value in the last cell.
    obj: Vec<Rat>,
    /// Phase-1 objective row, present while artificials are being driven to 0.
    phase1: Option<Vec<Rat>>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    ncols: usize,
}

struct Unbounded;

impl Simplex {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        debug_assert!(!pivot.is_zero());
        if !pivot.is_one() {
            for cell in self.rows[row].iter_mut() {
                if !cell.is_zero() {
                    *cell /= &pivot;
                }
            }
        }
        let pivot_row = self.rows[row].clone();
        for (r, target) in self.rows.iter_mut().enumerate() {
            if r != row {
                eliminate(target, &pivot_row, col);
            }
        }
        eliminate(&mut self.obj, &pivot_row, col);
        if let Some(p1) = &mut self.phase1 {
            eliminate(p1, &pivot_row, col);
        }
        self.basis[row] = col;
    }

    /// Bland's rule: entering column is the lowest index with negative
    /// reduced cost; leaving row is the minimum-ratio row, ties broken by the
    /// lowest basic variable index.
    fn run(
        &mut self,
        use_phase1_row: bool,
        allow_artificial_entering: bool,
    ) -> std::result::Result<(), Unbounded> {
        loop {
            let objrow: &Vec<Rat> = if use_phase1_row {
                self.phase1.as_ref().expect("phase-1 row present")
            } else {
                &self.obj
            };
            let entering = (0..self.ncols).find(|&j| {
                (allow_artificial_entering || !matches!(self.kinds[j], ColKind::Artificial(_)))
                    && objrow[j].is_negative()
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if a.is_positive() {
                    let ratio = &self.rows[r][self.ncols] / a;
                    let better = match &leave {
                        None => true,
                        Some((best_r, best)) => {
                            ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Unbounded);
            };
            self.pivot(row, col);
            self.trace(use_phase1_row);
        }
    }

    fn trace(&self, phase1: bool) {
        if std::env::var_os("XEQ_LP_TRACE").is_none() {
            return;
        }
        let row = if phase1 {
            self.phase1.as_ref().unwrap()
        } else {
            &self.obj
        };
        eprintln!(
            "lp trace: phase{} value {} basis {:?}",
            if phase1 { 1 } else { 2 },
            row[self.ncols],
            self.basis
        );
    }
}

fn eliminate(target: &mut [Rat], pivot_row: &[Rat], col: usize) {
    let factor = target[col].clone();
    if factor.is_zero() {
        return;
    }
    for (t, p) in target.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *t -= &factor * p;
        }
    }
}

/// Solves the program exactly. Infeasible and unbounded are outcomes, not
/// errors; `Err` is reserved for malformed input.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.objective.len();
    let m = lp.matrix.len();

    // Expand free variables into differences of two nonnegative columns.
    let mut kinds: Vec<ColKind> = Vec::new();
    for (v, b) in lp.bounds.iter().enumerate() {
        kinds.push(ColKind::Structural(v, true));
        if *b == VarBound::Free {
            kinds.push(ColKind::Structural(v, false));
        }
    }
    let n_struct = kinds.len();

    // Normalize each row to nonnegative rhs, remembering the sign flip.
    let mut flipped = vec![false; m];
    let mut senses = lp.senses.to_vec();
    for k in 0..m {
        if lp.rhs[k].is_negative() {
            flipped[k] = true;
            senses[k] = match senses[k] {
                ConstraintSense::Le => ConstraintSense::Ge,
                ConstraintSense::Ge => ConstraintSense::Le,
                ConstraintSense::Eq => ConstraintSense::Eq,
            };
        }
    }

    // Assign slack / surplus / artificial columns.
    let mut slack_col = vec![usize::MAX; m];
    let mut art_col = vec![usize::MAX; m];
    for k in 0..m {
        match senses[k] {
            ConstraintSense::Le => {
                slack_col[k] = kinds.len();
                kinds.push(ColKind::Slack(k));
            }
            ConstraintSense::Ge => {
                kinds.push(ColKind::Surplus(k));
            }
            ConstraintSense::Eq => {}
        }
    }
    for k in 0..m {
        if senses[k] != ConstraintSense::Le {
            art_col[k] = kinds.len();
            kinds.push(ColKind::Artificial(k));
        }
    }
    let ncols = kinds.len();

    // Build tableau rows.
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for k in 0..m {
        let mut row = vec![Rat::zero(); ncols + 1];
        for (j, kind) in kinds.iter().enumerate() {
            match kind {
                ColKind::Structural(v, positive) => {
                    let mut a = lp.matrix[k][*v].clone();
                    if !*positive {
                        a = -a;
                    }
                    if flipped[k] {
                        a = -a;
                    }
                    row[j] = a;
                }
                ColKind::Slack(r) if *r == k => row[j] = Rat::one(),
                ColKind::Surplus(r) if *r == k => row[j] = -Rat::one(),
                ColKind::Artificial(r) if *r == k => row[j] = Rat::one(),
                _ => {}
            }
        }
        row[ncols] = if flipped[k] {
            -lp.rhs[k].clone()
        } else {
            lp.rhs[k].clone()
        };
        basis.push(if art_col[k] != usize::MAX {
            art_col[k]
        } else {
            slack_col[k]
        });
        rows.push(row);
    }

    // Phase-2 objective row: z_j - c_j under the initial basis (cost zero).
    let mut obj = vec![Rat::zero(); ncols + 1];
    for (j, kind) in kinds.iter().enumerate() {
        if let ColKind::Structural(v, positive) = kind {
            obj[j] = if *positive {
                -lp.objective[*v].clone()
            } else {
                lp.objective[*v].clone()
            };
        }
    }

    let need_phase1 = art_col.iter().any(|&c| c != usize::MAX);
    let phase1 = if need_phase1 {
        let mut p1 = vec![Rat::zero(); ncols + 1];
        for k in 0..m {
            if art_col[k] != usize::MAX {
                for (cell, a) in p1.iter_mut().zip(&rows[k]) {
                    *cell -= a;
                }
            }
        }
        for (j, kind) in kinds.iter().enumerate() {
            if matches!(kind, ColKind::Artificial(_)) {
                p1[j] += Rat::one();
            }
        }
        Some(p1)
    } else {
        None
    };

    let mut t = Simplex {
        rows,
        obj,
        phase1,
        basis,
        kinds,
        ncols,
    };

    if need_phase1 {
        if t.run(true, true).is_err() {
            unreachable!("phase-1 objective is bounded above by zero");
        }
        let feasible = t.phase1.as_ref().unwrap()[ncols].is_zero();
        if !feasible {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive basic artificials out; rows where that is impossible are
        // redundant and get dropped.
        let mut removed_rows: Vec<usize> = Vec::new();
        for r in 0..t.rows.len() {
            if matches!(t.kinds[t.basis[r]], ColKind::Artificial(_)) {
                debug_assert!(t.rows[r][ncols].is_zero());
                let pivot_col = (0..ncols).find(|&j| {
                    !matches!(t.kinds[j], ColKind::Artificial(_)) && !t.rows[r][j].is_zero()
                });
                match pivot_col {
                    Some(j) => t.pivot(r, j),
                    None => removed_rows.push(r),
                }
            }
        }
        for &r in removed_rows.iter().rev() {
            t.rows.remove(r);
            t.basis.remove(r);
        }
        t.phase1 = None;
    }

    if t.run(false, false).is_err() {
        return Ok(LpOutcome::Unbounded);
    }

    // Primal values of the expanded columns.
    let mut expanded = vec![Rat::zero(); ncols];
    for (r, &b) in t.basis.iter().enumerate() {
        expanded[b] = t.rows[r][ncols].clone();
    }
    let mut primal = vec![Rat::zero(); n];
    for (j, kind) in t.kinds.iter().enumerate().take(n_struct) {
        if let ColKind::Structural(v, positive) = kind {
            if *positive {
                primal[*v] += &expanded[j];
            } else {
                primal[*v] -= &expanded[j];
            }
        }
    }

    // Duals from the reduced costs of each constraint's reference column.
    let mut dual = vec![Rat::zero(); m];
    for k in 0..m {
        let reference = if art_col[k] != usize::MAX {
            art_col[k]
        } else {
            slack_col[k]
        };
        let mut y = t.obj[reference].clone();
        if flipped[k] {
            y = -y;
        }
        dual[k] = y;
    }

    let value = t.obj[ncols].clone();
    let solution = LpSolution {
        value,
        primal,
        dual,
    };
    cross_check(lp, &solution).map_err(Error::InvalidProgram)?;
    Ok(LpOutcome::Optimal(solution))
}

/// Exact optimality certificate check: primal feasibility, dual feasibility,
/// complementary slackness, and strong duality, all with zero tolerance.
fn cross_check(lp: &LinearProgram, sol: &LpSolution) -> std::result::Result<(), String> {
    let n = lp.objective.len();
    for (v, x) in sol.primal.iter().enumerate() {
        if lp.bounds[v] == VarBound::NonNegative && x.is_negative() {
            return Err(format!("primal variable {v} negative"));
        }
    }
    for (k, row) in lp.matrix.iter().enumerate() {
        let lhs = dot(row, &sol.primal);
        let ok = match lp.senses[k] {
            ConstraintSense::Le => lhs <= lp.rhs[k],
            ConstraintSense::Eq => lhs == lp.rhs[k],
            ConstraintSense::Ge => lhs >= lp.rhs[k],
        };
        if !ok {
            return Err(format!("primal constraint {k} violated"));
        }
        let y = &sol.dual[k];
        let sign_ok = match lp.senses[k] {
            ConstraintSense::Le => !y.is_negative(),
            ConstraintSense::Ge => !y.is_positive(),
            ConstraintSense::Eq => true,
        };
        if !sign_ok {
            return Err(format!("dual multiplier {k} has the wrong sign"));
        }
        if !y.is_zero() && lhs != lp.rhs[k] {
            return Err(format!("complementary slackness fails on constraint {k}"));
        }
    }
    for v in 0..n {
        let col_dual: Rat = lp
            .matrix
            .iter()
            .zip(&sol.dual)
            .fold(Rat::zero(), |acc, (row, y)| acc + &row[v] * y);
        let slack = &col_dual - &lp.objective[v];
        match lp.bounds[v] {
            VarBound::Free => {
                if !slack.is_zero() {
                    return Err(format!("dual constraint for free variable {v} not tight"));
                }
            }
            VarBound::NonNegative => {
                if slack.is_negative() {
                    return Err(format!("dual constraint for variable {v} violated"));
                }
                if !sol.primal[v].is_zero() && !slack.is_zero() {
                    return Err(format!("complementary slackness fails on variable {v}"));
                }
            }
        }
    }
    let primal_value = dot(&lp.objective, &sol.primal);
    let dual_value = dot(&lp.rhs, &sol.dual);
    if primal_value != sol.value || dual_value != sol.value {
        return Err("strong duality violated".to_string());
    }
    Ok(())
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// A matrix game: the maximizer picks rows, the minimizer picks columns, and
/// the entry is the maximizer's payoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSumGame {
    rows: usize,
    cols: usize,
    payoff: Vec<Rat>,
}

impl ZeroSumGame {
    pub fn new(rows: usize, cols: usize, payoff: Vec<Rat>) -> Result<ZeroSumGame> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidProgram(
                "matrix game needs at least one row and column".to_string(),
            ));
        }
        if payoff.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "payoff has {} entries for a {rows}x{cols} game",
                payoff.len()
            )));
        }
        Ok(ZeroSumGame { rows, cols, payoff })
    }

    pub fn from_matrix(matrix: Vec<Vec<Rat>>) -> Result<ZeroSumGame> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, |r| r.len());
        if matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged payoff matrix".to_string()));
        }
        let payoff = matrix.into_iter().flatten().collect();
        ZeroSumGame::new(rows, cols, payoff)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rat {
        &self.payoff[row * self.cols + col]
    }

    /// Maximizer's expected payoff under mixed strategies for both sides.
    pub fn mixed_value(&self, row_mix: &[Rat], col_mix: &[Rat]) -> Rat {
        let mut total = Rat::zero();
        for (r, p) in row_mix.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mut inner = Rat::zero();
            for (c, q) in col_mix.iter().enumerate() {
                if !q.is_zero() {
                    inner += self.entry(r, c) * q;
                }
            }
            total += p * inner;
        }
        total
    }

    /// Presents the matrix game as a two-player `Game` with tensors
    /// `(u, -u)`; both strategy sets must have at least two elements.
    pub fn to_game(&self) -> Result<Game> {
        let mut u = vec![Rat::zero(); self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                u[r + self.rows * c] = self.entry(r, c).clone();
            }
        }
        let neg = u.iter().map(|x| -x.clone()).collect();
        Game::new(vec![self.rows, self.cols], vec![u, neg])
    }
}

/// Exact value and one deterministic vertex-optimal mixed strategy per side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximinSolution {
    pub value: Rat,
    pub max_strategy: Vec<Rat>,
    pub min_strategy: Vec<Rat>,
}

/// Solves `max_sigma min_theta sigma^T M theta` as a linear program. The
/// minimizer's optimal strategy comes from the dual, so the pair satisfies
/// strong duality exactly (asserted).
pub fn maximin(zs: &ZeroSumGame) -> MaximinSolution {
    let r = zs.rows();
    let c = zs.cols();
    // Variables: lambda_0..lambda_{r-1} >= 0, v free. Maximize v subject to
    // sum_i lambda_i M[i][col] - v >= 0 for each col, sum lambda = 1.
    let mut objective = vec![Rat::zero(); r + 1];
    objective[r] = Rat::one();
    let mut matrix = Vec::with_capacity(c + 1);
    let mut senses = Vec::with_capacity(c + 1);
    let mut rhs = Vec::with_capacity(c + 1);
    for col in 0..c {
        let mut row = Vec::with_capacity(r + 1);
        for i in 0..r {
            row.push(zs.entry(i, col).clone());
        }
        row.push(-Rat::one());
        matrix.push(row);
        senses.push(ConstraintSense::Ge);
        rhs.push(Rat::zero());
    }
    let mut sum_row = vec![Rat::one(); r];
    sum_row.push(Rat::zero());
    matrix.push(sum_row);
    senses.push(ConstraintSense::Eq);
    rhs.push(Rat::one());
    let mut bounds = vec![VarBound::NonNegative; r];
    bounds.push(VarBound::Free);

    let lp = LinearProgram {
        objective,
        matrix,
        senses,
        rhs,
        bounds,
    };
    let outcome = solve_lp(&lp).expect("well-formed maximin program");
    let sol = match outcome {
        LpOutcome::Optimal(sol) => sol,
        _ => unreachable!("matrix games always have a value"),
    };
    let max_strategy: Vec<Rat> = sol.primal[..r].to_vec();
    let min_strategy: Vec<Rat> = sol.dual[..c].iter().map(|y| -y.clone()).collect();
    let value = sol.value;

    assert!(
        is_exact_distribution(&max_strategy),
        "maximin primal is not a distribution"
    );
    assert!(
        is_exact_distribution(&min_strategy),
        "maximin dual is not a distribution"
    );
    // Strong duality, checked directly on the game.
    let guarantee = (0..c)
        .map(|col| {
            (0..r).fold(Rat::zero(), |acc, i| {
                acc + &max_strategy[i] * zs.entry(i, col)
            })
        })
        .min()
        .expect("at least one column");
    let exposure = (0..r)
        .map(|row| {
            (0..c).fold(Rat::zero(), |acc, j| {
                acc + &min_strategy[j] * zs.entry(row, j)
            })
        })
        .max()
        .expect("at least one row");
    assert_eq!(guarantee, value, "maximizer guarantee differs from value");
    assert_eq!(exposure, value, "minimizer exposure differs from value");

    MaximinSolution {
        value,
        max_strategy,
        min_strategy,
    }
}

/// Is `sigma` a good reply to `theta`, i.e. does it earn at least the value
/// of the game against it?
pub fn is_good_reply(zs: &ZeroSumGame, sigma: &[Rat], theta: &[Rat]) -> Result<bool> {
    if sigma.len() != zs.rows() || theta.len() != zs.cols() {
        return Err(Error::Dimension(
            "strategy lengths differ from the game".to_string(),
        ));
    }
    if !is_exact_distribution(sigma) || !is_exact_distribution(theta) {
        return Err(Error::InvalidStrategy(
            "inputs must be mixed strategies".to_string(),
        ));
    }
    let value = maximin(zs).value;
    Ok(zs.mixed_value(sigma, theta) >= value)
}

/// Is the finite set `sigmas` good against every column mix? Equivalently,
/// does the game restricted to convex combinations of `sigmas` still achieve
/// the full value?
pub fn is_good_set_finite(zs: &ZeroSumGame, sigmas: &[Vec<Rat>]) -> Result<bool> {
    if sigmas.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one strategy".to_string(),
        ));
    }
    for s in sigmas {
        if s.len() != zs.rows() {
            return Err(Error::Dimension(
                "strategy length differs from the game".to_string(),
            ));
        }
        if !is_exact_distribution(s) {
            return Err(Error::InvalidStrategy(
                "inputs must be mixed strategies".to_string(),
            ));
        }
    }
    let mut payoff = Vec::with_capacity(sigmas.len() * zs.cols());
    for s in sigmas {
        for col in 0..zs.cols() {
            payoff.push((0..zs.rows()).fold(Rat::zero(), |acc, r| acc + &s[r] * zs.entry(r, col)));
        }
    }
    let restricted = ZeroSumGame::new(sigmas.len(), zs.cols(), payoff)?;
    Ok(maximin(&restricted).value >= maximin(zs).value)
}
