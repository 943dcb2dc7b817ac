//! Equilibrium verification and solvers.
//!
//! Verifiers are exact: a profile or distribution either satisfies every
//! deviation inequality with rational arithmetic or it does not, and the
//! report carries the worst violation and a witness. The correlated
//! equilibrium solver is a plain LP over the deviation inequalities. The
//! exchangeable equilibrium solver runs column generation: master iterates
//! over convex weights on group-invariant product columns, the pricing step
//! turns the master's dual deviation mix into a fresh invariant column with
//! exact pairing zero, which strictly improves the master until the value
//! reaches zero (or the iteration budget runs out, in which case the best
//! certificate and its residual are returned).

use crate::deviation::{
    column_value_with_tables, deviation_game, invariant_good_reply, payoff_tables,
    DeviationDistribution, DeviationIndex, DeviationSpace,
};
use crate::error::{Error, Result};
use crate::game::{best_responses, product_to_joint, Game, JointDistribution, ProductProfile};
use crate::group::{act_on_profile, ave_joint, GroupAction};
use crate::lp::{
    maximin, solve_lp, ConstraintSense, LinearProgram, LpOutcome, VarBound, ZeroSumGame,
};
use crate::rational::{is_exact_distribution, Rat};
use num::traits::{One, Signed, Zero};

/// Who gains, and how, when an equilibrium check fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A pure deviation beats the player's mixed strategy.
    PureDeviation { player: usize, to: usize },
    /// Switching a recommendation `from -> to` gains in expectation.
    Deviation {
        player: usize,
        from: usize,
        to: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub verdict: bool,
    /// Largest expected deviation gain; nonpositive exactly when the verdict
    /// holds.
    pub worst_violation: Rat,
    pub witness: Option<Witness>,
}

impl EquilibriumReport {
    fn from_scan(worst: Rat, witness: Option<Witness>) -> EquilibriumReport {
        let verdict = !worst.is_positive();
        EquilibriumReport {
            verdict,
            worst_violation: worst,
            witness: if verdict { None } else { witness },
        }
    }
}

/// Exact Nash check: no player may gain by any pure deviation.
pub fn verify_nash(game: &Game, profile: &ProductProfile) -> Result<EquilibriumReport> {
    if !profile.matches(game) {
        return Err(Error::Dimension(
            "profile shape differs from game".to_string(),
        ));
    }
    let tables = payoff_tables(game, profile);
    let mut worst: Option<Rat> = None;
    let mut witness = None;
    for (i, table) in tables.iter().enumerate() {
        let current: Rat = profile
            .strategy(i)
            .iter()
            .zip(table)
            .fold(Rat::zero(), |acc, (p, e)| acc + p * e);
        for (t, e) in table.iter().enumerate() {
            let gain = e - &current;
            if worst.as_ref().is_none_or(|w| gain > *w) {
                witness = Some(Witness::PureDeviation { player: i, to: t });
                worst = Some(gain);
            }
        }
    }
    Ok(EquilibriumReport::from_scan(
        worst.expect("at least one player"),
        witness,
    ))
}

/// Exact correlated equilibrium check over all `(player, from, to)`
/// deviations.
pub fn verify_ce(game: &Game, dist: &JointDistribution) -> Result<EquilibriumReport> {
    if !dist.matches(game) {
        return Err(Error::Dimension(
            "distribution shape differs from game".to_string(),
        ));
    }
    let space = DeviationSpace::of_game(game);
    let counts = game.strategy_counts();
    // gains[deviation] = sum over profiles recommending `from` of
    // prob * (u_i(to, s_-i) - u_i(s)).
    let mut gains = vec![Rat::zero(); space.len()];
    for (idx, p) in dist.probs().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let s = game.profile_of_index(idx);
        for (i, &c) in counts.iter().enumerate() {
            let stride: usize = counts[..i].iter().product();
            let u_s = game.utility(i, idx);
            for t in 0..c {
                if t == s[i] {
                    continue;
                }
                let switched = idx + t * stride - s[i] * stride;
                let d = space.index(DeviationIndex {
                    player: i,
                    from: s[i],
                    to: t,
                });
                gains[d] += p * (game.utility(i, switched) - u_s);
            }
        }
    }
    let mut worst: Option<Rat> = None;
    let mut witness = None;
    for d in space.iter().filter(|d| d.from != d.to) {
        let gain = &gains[space.index(d)];
        if worst.as_ref().is_none_or(|w| gain > w) {
            worst = Some(gain.clone());
            witness = Some(Witness::Deviation {
                player: d.player,
                from: d.from,
                to: d.to,
            });
        }
    }
    Ok(EquilibriumReport::from_scan(
        worst.expect("at least two strategies"),
        witness,
    ))
}

/// Correlated equilibrium check through the conditional characterization:
/// every recommendation with positive marginal must be a best response to
/// the conditional distribution of the others. Agrees with `verify_ce` on
/// every input; the violation scale is the marginal-weighted gain, so the
/// two reports carry the same worst positive violation.
pub fn verify_ce_conditional(game: &Game, dist: &JointDistribution) -> Result<EquilibriumReport> {
    if !dist.matches(game) {
        return Err(Error::Dimension(
            "distribution shape differs from game".to_string(),
        ));
    }
    let counts = game.strategy_counts();
    let n = game.player_count();
    let mut worst = Rat::zero();
    let mut witness = None;
    let mut verdict = true;
    for i in 0..n {
        let marginal = dist.marginal(i);
        let stride: usize = counts[..i].iter().product();
        for r in 0..counts[i] {
            if marginal[r].is_zero() {
                continue;
            }
            // Conditional distribution over the opponents' profiles given the
            // recommendation r, in the same layout `best_responses` expects.
            let opp_len: usize = counts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &c)| c)
                .product();
            let mut cond = Vec::with_capacity(opp_len);
            for o in 0..opp_len {
                let low = o % stride;
                let high = o / stride;
                let idx = low + r * stride + high * stride * counts[i];
                cond.push(&dist.probs()[idx] / &marginal[r]);
            }
            let (best, set) = best_responses(game, i, &cond)?;
            if !set.contains(&r) {
                verdict = false;
            }
            let own = crate::game::pure_payoffs_against(game, i, &cond)?[r].clone();
            let gain = &marginal[r] * (&best - &own);
            if gain > worst {
                worst = gain;
                let to = *set.first().expect("best response set nonempty");
                witness = Some(Witness::Deviation {
                    player: i,
                    from: r,
                    to,
                });
            }
        }
    }
    Ok(EquilibriumReport {
        verdict,
        worst_violation: worst,
        witness: if verdict { None } else { witness },
    })
}

/// Solves for a correlated equilibrium by LP over the deviation
/// inequalities, optionally maximizing a profile weighting. The output is
/// guaranteed to pass `verify_ce` (asserted); the polytope is never empty.
pub fn solve_ce(game: &Game, objective: Option<&[Rat]>) -> Result<JointDistribution> {
    let profiles = game.profile_count();
    if let Some(obj) = objective {
        if obj.len() != profiles {
            return Err(Error::Dimension(format!(
                "objective has {} entries, profile space has {profiles}",
                obj.len()
            )));
        }
    }
    let zs = deviation_game(game);
    let space = DeviationSpace::of_game(game);
    let mut matrix = Vec::new();
    let mut senses = Vec::new();
    let mut rhs = Vec::new();
    for d in space.iter().filter(|d| d.from != d.to) {
        let col = space.index(d);
        let row: Vec<Rat> = (0..profiles).map(|s| -zs.entry(s, col).clone()).collect();
        matrix.push(row);
        senses.push(ConstraintSense::Le);
        rhs.push(Rat::zero());
    }
    matrix.push(vec![Rat::one(); profiles]);
    senses.push(ConstraintSense::Eq);
    rhs.push(Rat::one());
    let lp = LinearProgram {
        objective: objective
            .map(|o| o.to_vec())
            .unwrap_or_else(|| vec![Rat::zero(); profiles]),
        matrix,
        senses,
        rhs,
        bounds: vec![VarBound::NonNegative; profiles],
    };
    let dist = match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => JointDistribution::new(game, sol.primal)?,
        LpOutcome::Infeasible => {
            unreachable!("the correlated equilibrium polytope is never empty")
        }
        LpOutcome::Unbounded => {
            unreachable!("objective over the probability simplex is bounded")
        }
    };
    let report = verify_ce(game, &dist)?;
    assert!(
        report.verdict,
        "solver output failed the exact equilibrium check"
    );
    Ok(dist)
}

/// Group-averages a correlated equilibrium. The input must verify; the
/// output is exactly invariant and verifies again (both checked).
pub fn symmetrize_ce(
    game: &Game,
    group: &GroupAction,
    ce: &JointDistribution,
) -> Result<JointDistribution> {
    if !group.matches(game) {
        return Err(Error::Dimension(
            "group does not act on this game".to_string(),
        ));
    }
    let before = verify_ce(game, ce)?;
    if !before.verdict {
        return Err(Error::NotAnEquilibrium(format!(
            "input violates a deviation inequality by {}",
            before.worst_violation
        )));
    }
    let averaged = ave_joint(group, ce)?;
    let after = verify_ce(game, &averaged)?;
    assert!(
        after.verdict,
        "group average of a correlated equilibrium must stay one"
    );
    Ok(averaged)
}

/// A finite mixture of group-invariant product distributions whose mixed
/// joint distribution is a correlated equilibrium up to `epsilon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XECertificate {
    pub columns: Vec<ProductProfile>,
    pub weights: Vec<Rat>,
    /// Bound on the mixture's worst deviation gain.
    pub epsilon: Rat,
}

impl XECertificate {
    pub fn mixture(&self, game: &Game) -> Result<JointDistribution> {
        if self.columns.is_empty() {
            return Err(Error::InvalidCertificate("no columns".to_string()));
        }
        let mut acc = vec![Rat::zero(); game.profile_count()];
        for (col, w) in self.columns.iter().zip(&self.weights) {
            let joint = product_to_joint(game, col)?;
            for (a, p) in acc.iter_mut().zip(joint.probs()) {
                *a += w * p;
            }
        }
        JointDistribution::new(game, acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XeTermination {
    Converged,
    IterationLimit,
    /// The pricing step produced a column already present.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct XeSolve {
    pub certificate: XECertificate,
    /// `max(0, -master value)` at the final iteration.
    pub residual: Rat,
    pub iterations: usize,
    pub termination: XeTermination,
}

impl XeSolve {
    pub fn converged(&self) -> bool {
        self.termination == XeTermination::Converged
    }
}

#[derive(Debug, Clone)]
pub struct XeOptions {
    pub epsilon: Rat,
    pub max_iters: usize,
}

impl Default for XeOptions {
    fn default() -> Self {
        XeOptions {
            epsilon: Rat::zero(),
            max_iters: 500,
        }
    }
}

/// Column generation for an exchangeable equilibrium certificate.
///
/// Master: over convex weights on the current invariant product columns,
/// maximize the worst payoff against any deviation column. Pricing: the
/// master's dual is a deviation mix `y`; the invariant good reply to `y`
/// pairs to exactly zero, beating the master value strictly while it is
/// negative. The initial column is the uniform profile, which is invariant
/// under any action.
pub fn solve_xe(game: &Game, group: &GroupAction, opts: &XeOptions) -> Result<XeSolve> {
    if !group.matches(game) {
        return Err(Error::Dimension(
            "group does not act on this game".to_string(),
        ));
    }
    if opts.epsilon.is_negative() {
        return Err(Error::InvalidArgument(
            "epsilon must be nonnegative".to_string(),
        ));
    }
    if opts.max_iters == 0 {
        return Err(Error::InvalidArgument(
            "need at least one iteration".to_string(),
        ));
    }
    let space = DeviationSpace::of_game(game);
    let mut columns = vec![ProductProfile::uniform(game)];
    let mut rows: Vec<Vec<Rat>> = vec![master_row(game, &space, &columns[0])];
    let mut previous_value: Option<Rat> = None;

    for iteration in 1..=opts.max_iters {
        let master = ZeroSumGame::new(rows.len(), space.len(), rows.concat())
            .expect("master matrix is well-formed");
        let sol = maximin(&master);
        if let Some(prev) = &previous_value {
            assert!(sol.value >= *prev, "master value must be non-decreasing");
        }
        previous_value = Some(sol.value.clone());

        if sol.value >= -opts.epsilon.clone() {
            return Ok(finish(
                game,
                group,
                columns,
                sol.max_strategy,
                sol.value,
                iteration,
                XeTermination::Converged,
                &opts.epsilon,
            ));
        }
        let y = DeviationDistribution::new(game, sol.min_strategy)?;
        let reply = invariant_good_reply(game, group, &y)?;
        if columns.contains(&reply) {
            return Ok(finish(
                game,
                group,
                columns,
                sol.max_strategy,
                sol.value,
                iteration,
                XeTermination::Stalled,
                &opts.epsilon,
            ));
        }
        rows.push(master_row(game, &space, &reply));
        columns.push(reply);

        if iteration == opts.max_iters {
            // Re-solve once more for the final report.
            let master = ZeroSumGame::new(rows.len(), space.len(), rows.concat())
                .expect("master matrix is well-formed");
            let sol = maximin(&master);
            let termination = if sol.value >= -opts.epsilon.clone() {
                XeTermination::Converged
            } else {
                XeTermination::IterationLimit
            };
            return Ok(finish(
                game,
                group,
                columns,
                sol.max_strategy,
                sol.value,
                iteration,
                termination,
                &opts.epsilon,
            ));
        }
    }
    unreachable!("loop returns before exhausting the iteration range")
}

fn master_row(game: &Game, space: &DeviationSpace, column: &ProductProfile) -> Vec<Rat> {
    let tables = payoff_tables(game, column);
    space
        .iter()
        .map(|d| column_value_with_tables(column, &tables, d))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn finish(
    game: &Game,
    group: &GroupAction,
    columns: Vec<ProductProfile>,
    weights: Vec<Rat>,
    value: Rat,
    iterations: usize,
    termination: XeTermination,
    epsilon: &Rat,
) -> XeSolve {
    let residual = if value.is_negative() {
        -value
    } else {
        Rat::zero()
    };
    // Zero-weight columns carry no mass; drop them for a minimal certificate.
    let mut kept_columns = Vec::new();
    let mut kept_weights = Vec::new();
    for (c, w) in columns.into_iter().zip(weights) {
        if !w.is_zero() {
            kept_columns.push(c);
            kept_weights.push(w);
        }
    }
    let certificate = XECertificate {
        columns: kept_columns,
        weights: kept_weights,
        epsilon: residual.clone(),
    };
    if termination == XeTermination::Converged {
        let report = verify_certificate(game, group, &certificate)
            .expect("solver-built certificate is structurally valid");
        assert!(
            report.worst_violation <= *epsilon,
            "converged certificate must verify within epsilon"
        );
    }
    XeSolve {
        certificate,
        residual,
        iterations,
        termination,
    }
}

/// Checks a certificate structurally (weights form a distribution, every
/// column is an invariant product profile of the game), then re-verifies the
/// mixture as a correlated equilibrium with zero tolerance.
pub fn verify_certificate(
    game: &Game,
    group: &GroupAction,
    cert: &XECertificate,
) -> Result<EquilibriumReport> {
    if !group.matches(game) {
        return Err(Error::Dimension(
            "group does not act on this game".to_string(),
        ));
    }
    if cert.columns.is_empty() || cert.columns.len() != cert.weights.len() {
        return Err(Error::InvalidCertificate(format!(
            "{} columns with {} weights",
            cert.columns.len(),
            cert.weights.len()
        )));
    }
    if !is_exact_distribution(&cert.weights) {
        return Err(Error::InvalidCertificate(
            "weights must be nonnegative and sum to exactly 1".to_string(),
        ));
    }
    for (k, col) in cert.columns.iter().enumerate() {
        if !col.matches(game) {
            return Err(Error::InvalidCertificate(format!(
                "column {k} does not fit the game"
            )));
        }
        for (i, v) in col.strategies().iter().enumerate() {
            if !is_exact_distribution(v) {
                return Err(Error::InvalidCertificate(format!(
                    "column {k}, player {}: not a mixed strategy",
                    i + 1
                )));
            }
        }
        for (gi, g) in group.elements().iter().enumerate() {
            if act_on_profile(g, group.space(), col)? != *col {
                return Err(Error::InvalidCertificate(format!(
                    "column {k} is not invariant under group element {gi}"
                )));
            }
        }
    }
    let mixture = cert.mixture(game)?;
    verify_ce(game, &mixture)
}
