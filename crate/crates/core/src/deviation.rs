//! The deviation game and its good replies.
//!
//! For a game with n players the associated two-player zero-sum game pits a
//! maximizer choosing strategy profiles against a minimizer choosing
//! unilateral deviations `(i, r, t)`: "if player i was told r, switch to t".
//! The maximizer's payoff against such a column is the deviation loss
//! `u_i(s) - u_i(t, s_-i)` when `s_i = r`, else zero. Correlated equilibria
//! are exactly the maximizer strategies guaranteeing payoff >= 0 against
//! every column, and the game's value is zero.
//!
//! The constructive side: for any minimizer mix `y` there is a *product*
//! reply with expected payoff exactly zero, assembled from per-player square
//! response games whose maximin strategies balance the deviation flow. With a
//! symmetry group present, averaging the minimizer mix and the reply yields a
//! group-invariant reply with the same exact-zero guarantee.

use crate::error::{Error, Result};
use crate::game::{opponent_product, pure_payoffs_against, Game, ProductProfile};
use crate::group::{ave_profile, GroupAction, GroupElement, StrategySpace};
use crate::lp::{maximin, ZeroSumGame};
use crate::rational::{is_exact_distribution, Rat};
use num::traits::{One, Signed, Zero};

/// One unilateral deviation: player `player` switches from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeviationIndex {
    pub player: usize,
    pub from: usize,
    pub to: usize,
}

/// Flat layout of all deviations: players outer, `from` middle, `to` inner.
/// Self-deviations (`from == to`) are kept; their columns are identically
/// zero, which keeps the index arithmetic trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationSpace {
    counts: Vec<usize>,
    offsets: Vec<usize>,
}

impl DeviationSpace {
    pub fn new(counts: &[usize]) -> DeviationSpace {
        let mut offsets = Vec::with_capacity(counts.len());
        let mut acc = 0;
        for &c in counts {
            offsets.push(acc);
            acc += c * c;
        }
        DeviationSpace {
            counts: counts.to_vec(),
            offsets,
        }
    }

    pub fn of_game(game: &Game) -> DeviationSpace {
        DeviationSpace::new(game.strategy_counts())
    }

    pub fn len(&self) -> usize {
        self.counts.iter().map(|c| c * c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn index(&self, d: DeviationIndex) -> usize {
        debug_assert!(d.from < self.counts[d.player] && d.to < self.counts[d.player]);
        self.offsets[d.player] + d.from * self.counts[d.player] + d.to
    }

    pub fn decode(&self, idx: usize) -> DeviationIndex {
        let player = match self.offsets.binary_search(&idx) {
            Ok(p) => p,
            Err(p) => p - 1,
        };
        let rem = idx - self.offsets[player];
        let c = self.counts[player];
        DeviationIndex {
            player,
            from: rem / c,
            to: rem % c,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = DeviationIndex> + '_ {
        (0..self.len()).map(|idx| self.decode(idx))
    }
}

/// A probability distribution over deviations; the per-player blocks are the
/// minimizer's `(from, to)` weight matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationDistribution {
    space: DeviationSpace,
    probs: Vec<Rat>,
}

impl DeviationDistribution {
    pub fn new(game: &Game, probs: Vec<Rat>) -> Result<DeviationDistribution> {
        let space = DeviationSpace::of_game(game);
        if probs.len() != space.len() {
            return Err(Error::Dimension(format!(
                "deviation vector has {} entries, space has {}",
                probs.len(),
                space.len()
            )));
        }
        if !is_exact_distribution(&probs) {
            return Err(Error::InvalidDistribution(
                "deviation weights must be nonnegative and sum to 1".to_string(),
            ));
        }
        Ok(DeviationDistribution { space, probs })
    }

    /// Point mass on a single deviation.
    pub fn point_mass(game: &Game, d: DeviationIndex) -> DeviationDistribution {
        let space = DeviationSpace::of_game(game);
        let mut probs = vec![Rat::zero(); space.len()];
        probs[space.index(d)] = Rat::one();
        DeviationDistribution { space, probs }
    }

    pub fn space(&self) -> &DeviationSpace {
        &self.space
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }

    /// Player `i`'s block as a dense `c_i x c_i` row-major matrix.
    pub fn player_block(&self, player: usize) -> Vec<Rat> {
        let c = self.space.counts[player];
        let start = self.space.offsets[player];
        self.probs[start..start + c * c].to_vec()
    }
}

/// Builds the deviation game: rows are the profiles of `game` in linear-index
/// order, columns the deviation space.
pub fn deviation_game(game: &Game) -> ZeroSumGame {
    let space = DeviationSpace::of_game(game);
    let rows = game.profile_count();
    let cols = space.len();
    let counts = game.strategy_counts();
    let mut payoff = vec![Rat::zero(); rows * cols];
    for (row, s) in game.profiles().enumerate() {
        let s_idx = game.profile_index(&s);
        for (i, &c) in counts.iter().enumerate() {
            let stride: usize = counts[..i].iter().product();
            let u_s = game.utility(i, s_idx);
            for t in 0..c {
                if t == s[i] {
                    continue;
                }
                let dev_idx = s_idx + t * stride - s[i] * stride;
                let col = space.index(DeviationIndex {
                    player: i,
                    from: s[i],
                    to: t,
                });
                payoff[row * cols + col] = u_s - game.utility(i, dev_idx);
            }
        }
    }
    ZeroSumGame::new(rows, cols, payoff).expect("profile and deviation spaces are nonempty")
}

/// The square response game for one player's deviation weights `w` (a
/// `dim x dim` row-major matrix, entrywise nonnegative, no normalization
/// required). The diagonal entry at `s` is the total weight flowing out of
/// `s`; the off-diagonal entry `(s, t)` is minus the weight of `s -> t`.
/// Its maximin strategies are the flow-balanced distributions and its value
/// is zero.
pub fn response_game(dim: usize, weights: &[Rat]) -> Result<ZeroSumGame> {
    if weights.len() != dim * dim {
        return Err(Error::Dimension(format!(
            "weight matrix has {} entries, expected {}",
            weights.len(),
            dim * dim
        )));
    }
    if let Some(bad) = weights.iter().position(|w| w.is_negative()) {
        return Err(Error::InvalidArgument(format!(
            "negative deviation weight at flat index {bad}"
        )));
    }
    let mut payoff = vec![Rat::zero(); dim * dim];
    for s in 0..dim {
        for t in 0..dim {
            if s == t {
                let mut out = Rat::zero();
                for r in 0..dim {
                    if r != s {
                        out += &weights[s * dim + r];
                    }
                }
                payoff[s * dim + t] = out;
            } else {
                payoff[s * dim + t] = -weights[s * dim + t].clone();
            }
        }
    }
    ZeroSumGame::new(dim, dim, payoff)
}

/// Expected pure-strategy payoffs `E_i[a] = u_i(a, rho_-i)` for every player.
pub(crate) fn payoff_tables(game: &Game, profile: &ProductProfile) -> Vec<Vec<Rat>> {
    (0..game.player_count())
        .map(|i| {
            let opp = opponent_product(game, i, profile);
            pure_payoffs_against(game, i, &opp).expect("profile matches game")
        })
        .collect()
}

/// Maximizer payoff of a product profile against a single deviation column:
/// `rho_i(r) * (E_i[r] - E_i[t])`.
pub fn column_value(game: &Game, profile: &ProductProfile, d: DeviationIndex) -> Rat {
    let tables = payoff_tables(game, profile);
    column_value_with_tables(profile, &tables, d)
}

pub(crate) fn column_value_with_tables(
    profile: &ProductProfile,
    tables: &[Vec<Rat>],
    d: DeviationIndex,
) -> Rat {
    let p = &profile.strategy(d.player)[d.from];
    if p.is_zero() {
        return Rat::zero();
    }
    p * (&tables[d.player][d.from] - &tables[d.player][d.to])
}

/// Maximizer payoff of a product profile against a deviation mix.
pub fn pairing(game: &Game, profile: &ProductProfile, y: &DeviationDistribution) -> Rat {
    let tables = payoff_tables(game, profile);
    let mut total = Rat::zero();
    for (idx, w) in y.probs().iter().enumerate() {
        if !w.is_zero() {
            total += w * column_value_with_tables(profile, &tables, y.space().decode(idx));
        }
    }
    total
}

/// The constructive zero-payoff reply to `y`: player i plays the
/// deterministic maximin of the response game built from y's block i.
/// The exact identity `pairing(reply, y) == 0` is asserted.
pub fn good_reply(game: &Game, y: &DeviationDistribution) -> Result<ProductProfile> {
    if y.space().counts != game.strategy_counts() {
        return Err(Error::Dimension(
            "deviation space differs from the game".to_string(),
        ));
    }
    let mut strategies = Vec::with_capacity(game.player_count());
    for (i, &c) in game.strategy_counts().iter().enumerate() {
        let gamma = response_game(c, &y.player_block(i))?;
        strategies.push(maximin(&gamma).max_strategy);
    }
    let reply = ProductProfile::new(game, strategies)?;
    assert!(
        pairing(game, &reply, y).is_zero(),
        "good reply must pair to exactly zero"
    );
    Ok(reply)
}

/// Permutation of the deviation space induced by a group element:
/// `(i, r, t) -> (g.i, g.r, g.t)`.
pub(crate) fn deviation_permutation(
    space: &StrategySpace,
    dev: &DeviationSpace,
    g: &GroupElement,
) -> Vec<usize> {
    (0..dev.len())
        .map(|idx| {
            let d = dev.decode(idx);
            let (j, from) = g.apply(space, d.player, d.from);
            let (j2, to) = g.apply(space, d.player, d.to);
            debug_assert_eq!(j, j2);
            dev.index(DeviationIndex {
                player: j,
                from,
                to,
            })
        })
        .collect()
}

/// The induced player-trivial action of `group` on the deviation game,
/// presented on the two-player `Game` form (maximizer block = profiles,
/// minimizer block = deviations). Returns the materialized game too.
pub fn deviation_action(game: &Game, group: &GroupAction) -> Result<(Game, GroupAction)> {
    if !group.matches(game) {
        return Err(Error::Dimension(
            "group does not act on this game".to_string(),
        ));
    }
    let zs = deviation_game(game);
    let gamma_game = zs.to_game()?;
    let gamma_space = StrategySpace::of_game(&gamma_game);
    let base_space = group.space();
    let dev = DeviationSpace::of_game(game);
    let rows = game.profile_count();

    let mut elements = Vec::with_capacity(group.order());
    for g in group.elements() {
        let profile_perm = crate::group::profile_permutation(g, base_space);
        let dev_perm = deviation_permutation(base_space, &dev, g);
        let mut map = Vec::with_capacity(rows + dev.len());
        map.extend(profile_perm);
        map.extend(dev_perm.iter().map(|&d| rows + d));
        elements.push(GroupElement::new(&gamma_space, map)?);
    }
    Ok((
        gamma_game,
        GroupAction::from_parts_unchecked(gamma_space, elements),
    ))
}

/// Group average of a deviation mix under the induced action:
/// `(y . g)(d) = y(g . d)`.
pub fn average_deviations(
    game: &Game,
    group: &GroupAction,
    y: &DeviationDistribution,
) -> Result<DeviationDistribution> {
    if !group.matches(game) {
        return Err(Error::Dimension(
            "group does not act on this game".to_string(),
        ));
    }
    let dev = DeviationSpace::of_game(game);
    let mut acc = vec![Rat::zero(); dev.len()];
    for g in group.elements() {
        let perm = deviation_permutation(group.space(), &dev, g);
        for (d, a) in acc.iter_mut().enumerate() {
            *a += &y.probs()[perm[d]];
        }
    }
    let order = Rat::from_integer(group.order().into());
    for a in acc.iter_mut() {
        *a /= &order;
    }
    DeviationDistribution::new(game, acc)
}

/// Group-invariant zero-payoff reply: average `y` over the induced deviation
/// action, take the constructive reply, then average the reply itself over
/// the group. The result is exactly invariant and still pairs to zero with
/// the *original* `y` (asserted); the latter holds because the response-game
/// construction commutes with relabeling strategies, so the translated
/// replies share the reply's exact-zero guarantee and averaging stays inside
/// it.
pub fn invariant_good_reply(
    game: &Game,
    group: &GroupAction,
    y: &DeviationDistribution,
) -> Result<ProductProfile> {
    let averaged = average_deviations(game, group, y)?;
    let reply = good_reply(game, &averaged)?;
    let invariant = ave_profile(group, &reply)?;
    assert!(
        pairing(game, &invariant, y).is_zero(),
        "invariant reply must pair to exactly zero"
    );
    Ok(invariant)
}
