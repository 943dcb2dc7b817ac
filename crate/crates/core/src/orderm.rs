//! Order-m exchangeable equilibria.
//!
//! Column generation over the deviation game of the contracted m-th power.
//! Invariance under copy permutations forces every admissible product column
//! to be the m-fold i.i.d. lift of a single group-invariant base profile, so
//! the pricing step searches the base profile space. The pricing objective
//! (the lifted column's payoff against the master's dual deviation mix) is a
//! polynomial in the base profile, not a linear function, and its
//! utility-independent zeros can have irrational coordinates, so no exact
//! rational pricing rule exists. The oracle therefore hunts a zero of the
//! pairing in floating point: multi-start projected gradient descent on the
//! squared pairing with a deterministic seed ladder, after which the found
//! profile is snapped back to small rationals and the certificate is
//! re-verified exactly a posteriori on both powers.

use crate::algebra::{
    contracted_power, lift_profile_to_power, power, power_action, PowerGame, DEFAULT_CELL_CAP,
};
use crate::deviation::{
    column_value_with_tables, payoff_tables, DeviationDistribution, DeviationSpace,
};
use crate::equilibria::{
    solve_xe, verify_ce, EquilibriumReport, XECertificate, XeOptions, XeTermination,
};
use crate::error::{Error, Result};
use crate::game::{Game, ProductProfile};
use crate::group::GroupAction;
use crate::lp::{maximin, ZeroSumGame};
use crate::rational::{rat_to_f64, rationalize, Rat};
use num::traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RATIONALIZE_MAX_DEN: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct OrderMOptions {
    pub epsilon: f64,
    pub max_iters: usize,
    /// Size of the oracle's deterministic seed ladder.
    pub starts: usize,
    pub cell_cap: usize,
}

impl Default for OrderMOptions {
    fn default() -> Self {
        OrderMOptions {
            epsilon: 1e-6,
            max_iters: 500,
            starts: 16,
            cell_cap: DEFAULT_CELL_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrderMSolve {
    /// Certificate whose columns are product profiles of the m-th power
    /// (every copy of player i playing the same base strategy).
    pub certificate: XECertificate,
    /// The base-game profiles the columns lift.
    pub base_columns: Vec<ProductProfile>,
    pub residual: Rat,
    pub iterations: usize,
    pub termination: XeTermination,
    /// Exact check of the mixture on the contracted power.
    pub report_contracted: EquilibriumReport,
    /// Exact check of the mixture on the plain power.
    pub report_power: EquilibriumReport,
}

impl OrderMSolve {
    pub fn converged(&self) -> bool {
        self.termination == XeTermination::Converged
    }
}

/// The oracle's answer for one dual query.
#[derive(Debug, Clone)]
pub struct OracleReply {
    /// Group-invariant base profile, one float vector per player.
    pub profile: Vec<Vec<f64>>,
    /// Pairing of the lifted profile with the queried deviation mix.
    pub objective: f64,
}

/// Seeks a group-invariant base profile whose m-fold lift pairs to zero with
/// `y` (a deviation mix of the contracted power). Multi-start projected
/// gradient descent on the squared pairing; the best start wins, ties going
/// to the lowest seed.
pub fn oracle_best_response(
    base: &Game,
    group: &GroupAction,
    contracted: &PowerGame,
    y: &DeviationDistribution,
    opts: &OrderMOptions,
) -> Result<OracleReply> {
    if !group.matches(base) {
        return Err(Error::Dimension(
            "group does not act on the base game".to_string(),
        ));
    }
    if opts.starts == 0 {
        return Err(Error::InvalidArgument(
            "need at least one oracle start".to_string(),
        ));
    }
    let eval = PairingEval::new(base, contracted, y);
    let counts = base.strategy_counts().to_vec();
    let flat_len: usize = counts.iter().sum();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for seed in 0..opts.starts {
        let mut x = if seed == 0 {
            counts
                .iter()
                .flat_map(|&c| std::iter::repeat_n(1.0 / c as f64, c))
                .collect::<Vec<f64>>()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
            (0..flat_len).map(|_| rng.gen_range(0.01..1.0)).collect()
        };
        project(group, &counts, &mut x);
        descend(&eval, group, &counts, &mut x);
        let value = eval.pairing(&x).abs();
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, x));
        }
    }
    let (_, x) = best.expect("at least one start");
    let objective = eval.pairing(&x);
    let mut profile = Vec::with_capacity(counts.len());
    let mut offset = 0;
    for &c in &counts {
        profile.push(x[offset..offset + c].to_vec());
        offset += c;
    }
    Ok(OracleReply { profile, objective })
}

/// Gradient descent on the squared pairing with step halving; stops at
/// stationarity 1e-10 or a resolved root.
fn descend(eval: &PairingEval, group: &GroupAction, counts: &[usize], x: &mut Vec<f64>) {
    let n = x.len();
    let h = 1e-6;
    let mut step = 0.5;
    for _ in 0..600 {
        let f = eval.pairing(x);
        if f.abs() < 1e-13 {
            break;
        }
        let mut grad = vec![0.0; n];
        let mut norm = 0.0;
        for k in 0..n {
            let saved = x[k];
            x[k] = saved + h;
            let up = eval.pairing(x);
            x[k] = saved - h;
            let down = eval.pairing(x);
            x[k] = saved;
            // d(f^2)/dx_k = 2 f df/dx_k.
            grad[k] = 2.0 * f * (up - down) / (2.0 * h);
            norm += grad[k] * grad[k];
        }
        if norm.sqrt() < 1e-10 {
            break;
        }
        let mut improved = false;
        while step > 1e-14 {
            let mut candidate: Vec<f64> = x.iter().zip(&grad).map(|(v, g)| v - step * g).collect();
            project(group, counts, &mut candidate);
            if eval.pairing(&candidate).powi(2) < f * f {
                *x = candidate;
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
}

/// Feasibility map: average over the group in flat coordinates, then project
/// each player's block onto the probability simplex. Both maps are
/// permutation-equivariant, so the result is group-invariant.
fn project(group: &GroupAction, counts: &[usize], x: &mut Vec<f64>) {
    let order = group.order() as f64;
    let averaged: Vec<f64> = (0..x.len())
        .map(|c| {
            group
                .elements()
                .iter()
                .map(|g| x[g.apply_flat(c)])
                .sum::<f64>()
                / order
        })
        .collect();
    *x = averaged;
    let mut offset = 0;
    for &c in counts {
        simplex_project(&mut x[offset..offset + c]);
        offset += c;
    }
}

/// Euclidean projection onto the probability simplex.
fn simplex_project(v: &mut [f64]) {
    let n = v.len();
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite coordinates"));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        acc += u;
        let candidate = (acc - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    for value in v.iter_mut() {
        *value = (*value - tau).max(0.0);
    }
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        for value in v.iter_mut() {
            *value /= total;
        }
    } else {
        let uniform = 1.0 / n as f64;
        for value in v.iter_mut() {
            *value = uniform;
        }
    }
}

/// Float evaluation of the pairing between the i.i.d. lift of a base profile
/// and a fixed deviation mix on the contracted power.
struct PairingEval {
    utilities: Vec<Vec<f64>>,
    counts: Vec<usize>,
    /// (weight, player, from-tuple, to-tuple) for the support of `y`.
    support: Vec<(f64, usize, Vec<usize>, Vec<usize>)>,
}

impl PairingEval {
    fn new(base: &Game, contracted: &PowerGame, y: &DeviationDistribution) -> PairingEval {
        let utilities = (0..base.player_count())
            .map(|i| base.utilities(i).iter().map(rat_to_f64).collect())
            .collect();
        let space = DeviationSpace::new(contracted.game.strategy_counts());
        let mut support = Vec::new();
        for (idx, w) in y.probs().iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let d = space.decode(idx);
            if d.from == d.to {
                continue;
            }
            support.push((
                rat_to_f64(w),
                d.player,
                contracted.tuple_of_index(d.player, d.from),
                contracted.tuple_of_index(d.player, d.to),
            ));
        }
        PairingEval {
            utilities,
            counts: base.strategy_counts().to_vec(),
            support,
        }
    }

    /// `E_i[a]` tables against the profile in flat coordinates.
    fn tables(&self, flat: &[f64]) -> Vec<Vec<f64>> {
        let n = self.counts.len();
        let offsets: Vec<usize> = {
            let mut acc = 0;
            self.counts
                .iter()
                .map(|&c| {
                    let o = acc;
                    acc += c;
                    o
                })
                .collect()
        };
        let profile_count: usize = self.counts.iter().product();
        let mut tables: Vec<Vec<f64>> = self.counts.iter().map(|&c| vec![0.0; c]).collect();
        for idx in 0..profile_count {
            let mut digits = Vec::with_capacity(n);
            let mut rem = idx;
            for &c in &self.counts {
                digits.push(rem % c);
                rem /= c;
            }
            let full: f64 = digits
                .iter()
                .enumerate()
                .map(|(i, &s)| flat[offsets[i] + s])
                .product();
            for i in 0..n {
                let own = flat[offsets[i] + digits[i]];
                if own == 0.0 {
                    // Recompute the opponents' mass without player i.
                    let others: f64 = digits
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(j, &s)| flat[offsets[j] + s])
                        .product();
                    tables[i][digits[i]] += others * self.utilities[i][idx];
                } else {
                    tables[i][digits[i]] += (full / own) * self.utilities[i][idx];
                }
            }
        }
        tables
    }

    fn pairing(&self, flat: &[f64]) -> f64 {
        let tables = self.tables(flat);
        let offsets: Vec<usize> = {
            let mut acc = 0;
            self.counts
                .iter()
                .map(|&c| {
                    let o = acc;
                    acc += c;
                    o
                })
                .collect()
        };
        let mut total = 0.0;
        for (w, i, from, to) in &self.support {
            let mass: f64 = from.iter().map(|&s| flat[offsets[*i] + s]).product();
            if mass == 0.0 {
                continue;
            }
            let swing: f64 = from
                .iter()
                .zip(to)
                .map(|(&r, &t)| tables[*i][r] - tables[*i][t])
                .sum();
            total += w * mass * swing;
        }
        total
    }
}

/// Snaps the oracle's float profile to exact rationals: clamp, rationalize
/// each coordinate with a bounded denominator, renormalize exactly.
fn snap_profile(base: &Game, floats: &[Vec<f64>]) -> Result<ProductProfile> {
    let mut strategies = Vec::with_capacity(floats.len());
    for vec in floats {
        let mut rats: Vec<Rat> = vec
            .iter()
            .map(|&v| rationalize(v.max(0.0), RATIONALIZE_MAX_DEN))
            .collect();
        let total: Rat = rats.iter().fold(Rat::zero(), |a, b| a + b);
        if total.is_zero() {
            return Err(Error::InvalidArgument(
                "oracle returned a zero vector".to_string(),
            ));
        }
        for r in rats.iter_mut() {
            *r /= &total;
        }
        strategies.push(rats);
    }
    ProductProfile::new(base, strategies)
}

/// Column generation for an order-m exchangeable equilibrium certificate.
/// For m = 1 this reduces exactly to `solve_xe`.
pub fn solve_order_m_xe(
    base: &Game,
    group: &GroupAction,
    m: usize,
    opts: &OrderMOptions,
) -> Result<OrderMSolve> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "order must be at least 1".to_string(),
        ));
    }
    if opts.epsilon < 0.0 {
        return Err(Error::InvalidArgument(
            "epsilon must be nonnegative".to_string(),
        ));
    }
    if !group.matches(base) {
        return Err(Error::Dimension(
            "group does not act on the base game".to_string(),
        ));
    }
    if m == 1 {
        // The contracted and plain first powers are the base game itself, so
        // the exact-rational path applies verbatim.
        let epsilon = rationalize(opts.epsilon, RATIONALIZE_MAX_DEN);
        let solve = solve_xe(
            base,
            group,
            &XeOptions {
                epsilon,
                max_iters: opts.max_iters,
            },
        )?;
        let mixture = solve.certificate.mixture(base)?;
        let report = verify_ce(base, &mixture)?;
        return Ok(OrderMSolve {
            base_columns: solve.certificate.columns.clone(),
            certificate: solve.certificate,
            residual: solve.residual,
            iterations: solve.iterations,
            termination: solve.termination,
            report_contracted: report.clone(),
            report_power: report,
        });
    }

    let contracted = contracted_power(base, m, opts.cell_cap)?;
    let plain = power(base, m, opts.cell_cap)?;
    let space = DeviationSpace::new(contracted.game.strategy_counts());
    let epsilon_rat = rationalize(opts.epsilon, RATIONALIZE_MAX_DEN);

    let mut base_columns = vec![ProductProfile::uniform(base)];
    let mut rows: Vec<Vec<Rat>> = vec![contracted_row(&contracted, &base_columns[0], &space)];
    let mut previous_value: Option<Rat> = None;

    for iteration in 1..=opts.max_iters {
        let master = ZeroSumGame::new(rows.len(), space.len(), rows.concat())
            .expect("master matrix is well-formed");
        let sol = maximin(&master);
        if let Some(prev) = &previous_value {
            assert!(sol.value >= *prev, "master value must be non-decreasing");
        }
        previous_value = Some(sol.value.clone());

        if sol.value >= -epsilon_rat.clone() {
            return finish_order_m(
                base,
                group,
                &contracted,
                &plain,
                base_columns,
                sol.max_strategy,
                sol.value,
                iteration,
                XeTermination::Converged,
                opts,
            );
        }
        let y = DeviationDistribution::new(&contracted.game, sol.min_strategy)?;
        let reply = oracle_best_response(base, group, &contracted, &y, opts)?;
        let snapped = snap_profile(base, &reply.profile)?;
        let lifted = lift_profile_to_power(&contracted, &snapped);
        let exact_pairing = {
            let tables = payoff_tables(&contracted.game, &lifted);
            let mut total = Rat::zero();
            for (idx, w) in y.probs().iter().enumerate() {
                if !w.is_zero() {
                    total += w * column_value_with_tables(&lifted, &tables, space.decode(idx));
                }
            }
            total
        };
        let stalled = exact_pairing <= sol.value.clone() + epsilon_rat.clone()
            || base_columns.contains(&snapped);
        if stalled {
            return finish_order_m(
                base,
                group,
                &contracted,
                &plain,
                base_columns,
                sol.max_strategy,
                sol.value,
                iteration,
                XeTermination::Stalled,
                opts,
            );
        }
        rows.push(contracted_row(&contracted, &snapped, &space));
        base_columns.push(snapped);

        if iteration == opts.max_iters {
            let master = ZeroSumGame::new(rows.len(), space.len(), rows.concat())
                .expect("master matrix is well-formed");
            let sol = maximin(&master);
            let termination = if sol.value >= -epsilon_rat.clone() {
                XeTermination::Converged
            } else {
                XeTermination::IterationLimit
            };
            return finish_order_m(
                base,
                group,
                &contracted,
                &plain,
                base_columns,
                sol.max_strategy,
                sol.value,
                iteration,
                termination,
                opts,
            );
        }
    }
    unreachable!("loop returns before exhausting the iteration range")
}

fn contracted_row(
    contracted: &PowerGame,
    base_profile: &ProductProfile,
    space: &DeviationSpace,
) -> Vec<Rat> {
    let lifted = lift_profile_to_power(contracted, base_profile);
    let tables = payoff_tables(&contracted.game, &lifted);
    space
        .iter()
        .map(|d| column_value_with_tables(&lifted, &tables, d))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn finish_order_m(
    base: &Game,
    group: &GroupAction,
    contracted: &PowerGame,
    plain: &PowerGame,
    base_columns: Vec<ProductProfile>,
    weights: Vec<Rat>,
    value: Rat,
    iterations: usize,
    termination: XeTermination,
    opts: &OrderMOptions,
) -> Result<OrderMSolve> {
    let residual = if value.is_negative() {
        -value
    } else {
        Rat::zero()
    };
    let mut kept_base = Vec::new();
    let mut kept_weights = Vec::new();
    for (c, w) in base_columns.into_iter().zip(weights) {
        if !w.is_zero() {
            kept_base.push(c);
            kept_weights.push(w);
        }
    }
    let power_columns: Vec<ProductProfile> = kept_base
        .iter()
        .map(|c| lift_profile_to_power(plain, c))
        .collect();
    let certificate = XECertificate {
        columns: power_columns,
        weights: kept_weights,
        epsilon: residual.clone(),
    };

    // A posteriori verification on both powers, exact on the snapped
    // rationals. The certificate's own invariance is checked against the
    // full product action.
    let mixture_power = certificate.mixture(&plain.game)?;
    let report_power = verify_ce(&plain.game, &mixture_power)?;
    let mixture_contracted = mixture_power.reshape(contracted.game.strategy_counts().to_vec())?;
    let report_contracted = verify_ce(&contracted.game, &mixture_contracted)?;
    if termination == XeTermination::Converged {
        let action = power_action(plain, base, group)?;
        let report = crate::equilibria::verify_certificate(&plain.game, &action, &certificate)?;
        let eps = rationalize(opts.epsilon, RATIONALIZE_MAX_DEN);
        assert!(
            report.worst_violation <= eps && report_contracted.worst_violation <= eps,
            "converged order-m certificate must verify within epsilon on both powers"
        );
    }
    Ok(OrderMSolve {
        certificate,
        base_columns: kept_base,
        residual,
        iterations,
        termination,
        report_contracted,
        report_power,
    })
}
