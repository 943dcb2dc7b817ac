//! Finite normal-form games with exact rational utilities, together with the
//! two probability objects defined over them: joint distributions on strategy
//! profiles and per-player mixed-strategy profiles.

use crate::error::{Error, Result};
use crate::rational::{is_exact_distribution, Rat};
use num::traits::{One, Signed, Zero};

/// A finite game: `n >= 2` players, each with at least two pure strategies,
/// and one dense utility tensor per player.
///
/// Strategy profiles are addressed by a single linear index in which player
/// 1's strategy varies fastest and player n's slowest:
/// `index(s) = s_1 + s_2*c_1 + s_3*c_1*c_2 + ...`. Every tensor, joint
/// distribution, and emitted file in this crate uses that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    strategy_counts: Vec<usize>,
    names: Option<Vec<Vec<String>>>,
    /// `utilities[i][profile_index]` is player i's payoff.
    utilities: Vec<Vec<Rat>>,
}

impl Game {
    pub fn new(strategy_counts: Vec<usize>, utilities: Vec<Vec<Rat>>) -> Result<Game> {
        Self::with_names(strategy_counts, None, utilities)
    }

    pub fn with_names(
        strategy_counts: Vec<usize>,
        names: Option<Vec<Vec<String>>>,
        utilities: Vec<Vec<Rat>>,
    ) -> Result<Game> {
        let n = strategy_counts.len();
        if n < 2 {
            return Err(Error::InvalidGame(format!(
                "need at least 2 players, got {n}"
            )));
        }
        if let Some(bad) = strategy_counts.iter().position(|&c| c < 2) {
            return Err(Error::InvalidGame(format!(
                "player {} has {} strategies, need at least 2",
                bad + 1,
                strategy_counts[bad]
            )));
        }
        let profiles = strategy_counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .ok_or_else(|| Error::InvalidGame("profile count overflows".to_string()))?;
        if utilities.len() != n {
            return Err(Error::InvalidGame(format!(
                "expected {n} utility tensors, got {}",
                utilities.len()
            )));
        }
        for (i, u) in utilities.iter().enumerate() {
            if u.len() != profiles {
                return Err(Error::InvalidGame(format!(
                    "player {}'s tensor has {} entries, expected {profiles}",
                    i + 1,
                    u.len()
                )));
            }
        }
        if let Some(ns) = &names {
            if ns.len() != n {
                return Err(Error::InvalidGame(
                    "label list length != player count".to_string(),
                ));
            }
            for (i, labels) in ns.iter().enumerate() {
                if labels.len() != strategy_counts[i] {
                    return Err(Error::InvalidGame(format!(
                        "player {} has {} labels for {} strategies",
                        i + 1,
                        labels.len(),
                        strategy_counts[i]
                    )));
                }
            }
        }
        Ok(Game {
            strategy_counts,
            names,
            utilities,
        })
    }

    /// A two-player game from the row player's matrix `a` and the column
    /// player's matrix `b`, both indexed `[row][col]`.
    pub fn bimatrix(a: Vec<Vec<Rat>>, b: Vec<Vec<Rat>>) -> Result<Game> {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        if b.len() != rows || b.iter().any(|r| r.len() != cols) || a.iter().any(|r| r.len() != cols)
        {
            return Err(Error::InvalidGame("bimatrix shapes differ".to_string()));
        }
        let mut u1 = vec![Rat::zero(); rows * cols];
        let mut u2 = vec![Rat::zero(); rows * cols];
        for (r, (ra, rb)) in a.iter().zip(&b).enumerate() {
            for c in 0..cols {
                u1[r + rows * c] = ra[c].clone();
                u2[r + rows * c] = rb[c].clone();
            }
        }
        Game::new(vec![rows, cols], vec![u1, u2])
    }

    pub fn player_count(&self) -> usize {
        self.strategy_counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.strategy_counts
    }

    pub fn names(&self) -> Option<&Vec<Vec<String>>> {
        self.names.as_ref()
    }

    /// Label of one strategy, falling back to its index.
    pub fn strategy_label(&self, player: usize, strategy: usize) -> String {
        match &self.names {
            Some(ns) => ns[player][strategy].clone(),
            None => strategy.to_string(),
        }
    }

    pub fn profile_count(&self) -> usize {
        self.strategy_counts.iter().product()
    }

    pub fn utility(&self, player: usize, profile_index: usize) -> &Rat {
        &self.utilities[player][profile_index]
    }

    pub fn utilities(&self, player: usize) -> &[Rat] {
        &self.utilities[player]
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.strategy_counts.len());
        let mut idx = 0;
        let mut stride = 1;
        for (s, c) in profile.iter().zip(&self.strategy_counts) {
            debug_assert!(s < c);
            idx += s * stride;
            stride *= c;
        }
        idx
    }

    pub fn profile_of_index(&self, mut index: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.strategy_counts.len());
        for &c in &self.strategy_counts {
            out.push(index % c);
            index /= c;
        }
        out
    }

    /// Iterates all profiles in linear-index order.
    pub fn profiles(&self) -> ProfileIter {
        ProfileIter {
            counts: self.strategy_counts.clone(),
            next: Some(vec![0; self.strategy_counts.len()]),
        }
    }
}

/// Iterator over all pure profiles of a game, player 1 fastest.
pub struct ProfileIter {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for ProfileIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut bump = current.clone();
        let mut done = true;
        for i in 0..bump.len() {
            if bump[i] + 1 < self.counts[i] {
                bump[i] += 1;
                for slot in bump.iter_mut().take(i) {
                    *slot = 0;
                }
                done = false;
                break;
            }
        }
        if !done {
            self.next = Some(bump);
        }
        Some(current)
    }
}

/// A probability distribution over the strategy profiles of a game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    shape: Vec<usize>,
    probs: Vec<Rat>,
}

impl JointDistribution {
    pub fn new(game: &Game, probs: Vec<Rat>) -> Result<JointDistribution> {
        Self::with_shape(game.strategy_counts().to_vec(), probs)
    }

    pub fn with_shape(shape: Vec<usize>, probs: Vec<Rat>) -> Result<JointDistribution> {
        let profiles: usize = shape.iter().product();
        if probs.len() != profiles {
            return Err(Error::Dimension(format!(
                "distribution has {} entries, profile space has {profiles}",
                probs.len()
            )));
        }
        if !is_exact_distribution(&probs) {
            return Err(Error::InvalidDistribution(
                "entries must be nonnegative and sum to exactly 1".to_string(),
            ));
        }
        Ok(JointDistribution { shape, probs })
    }

    pub fn uniform(game: &Game) -> JointDistribution {
        let m = game.profile_count();
        let p = Rat::one() / Rat::from_integer(m.into());
        JointDistribution {
            shape: game.strategy_counts().to_vec(),
            probs: vec![p; m],
        }
    }

    /// Point mass on one pure profile.
    pub fn point_mass(game: &Game, profile: &[usize]) -> JointDistribution {
        let mut probs = vec![Rat::zero(); game.profile_count()];
        probs[game.profile_index(profile)] = Rat::one();
        JointDistribution {
            shape: game.strategy_counts().to_vec(),
            probs,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }

    pub fn matches(&self, game: &Game) -> bool {
        self.shape == game.strategy_counts()
    }

    /// Reinterprets the same flat probability vector over a different
    /// factorization of the same profile space (the two power games share
    /// their profile space, for example).
    pub fn reshape(&self, shape: Vec<usize>) -> Result<JointDistribution> {
        let profiles: usize = shape.iter().product();
        if profiles != self.probs.len() {
            return Err(Error::Dimension(format!(
                "cannot reshape {} entries into profile space of {profiles}",
                self.probs.len()
            )));
        }
        Ok(JointDistribution {
            shape,
            probs: self.probs.clone(),
        })
    }

    /// Marginal distribution of one player's recommendation.
    pub fn marginal(&self, player: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.shape[player]];
        let stride: usize = self.shape[..player].iter().product();
        let count = self.shape[player];
        for (idx, p) in self.probs.iter().enumerate() {
            out[(idx / stride) % count] += p;
        }
        out
    }
}

/// One mixed strategy per player (a product distribution presented as its
/// factors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductProfile {
    strategies: Vec<Vec<Rat>>,
}

impl ProductProfile {
    pub fn new(game: &Game, strategies: Vec<Vec<Rat>>) -> Result<ProductProfile> {
        if strategies.len() != game.player_count() {
            return Err(Error::Dimension(format!(
                "profile has {} components, game has {} players",
                strategies.len(),
                game.player_count()
            )));
        }
        for (i, (v, &c)) in strategies.iter().zip(game.strategy_counts()).enumerate() {
            if v.len() != c {
                return Err(Error::Dimension(format!(
                    "player {}'s strategy has {} entries, expected {c}",
                    i + 1,
                    v.len()
                )));
            }
            if !is_exact_distribution(v) {
                return Err(Error::InvalidStrategy(format!(
                    "player {}'s vector must be nonnegative and sum to 1",
                    i + 1
                )));
            }
        }
        Ok(ProductProfile { strategies })
    }

    pub fn uniform(game: &Game) -> ProductProfile {
        let strategies = game
            .strategy_counts()
            .iter()
            .map(|&c| vec![Rat::one() / Rat::from_integer(c.into()); c])
            .collect();
        ProductProfile { strategies }
    }

    /// Every player plays one pure strategy.
    pub fn pure(game: &Game, profile: &[usize]) -> ProductProfile {
        let strategies = profile
            .iter()
            .zip(game.strategy_counts())
            .map(|(&s, &c)| {
                let mut v = vec![Rat::zero(); c];
                v[s] = Rat::one();
                v
            })
            .collect();
        ProductProfile { strategies }
    }

    pub(crate) fn from_parts_unchecked(strategies: Vec<Vec<Rat>>) -> ProductProfile {
        ProductProfile { strategies }
    }

    pub fn strategies(&self) -> &[Vec<Rat>] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &[Rat] {
        &self.strategies[player]
    }

    pub fn player_count(&self) -> usize {
        self.strategies.len()
    }

    pub fn matches(&self, game: &Game) -> bool {
        self.strategies.len() == game.player_count()
            && self
                .strategies
                .iter()
                .zip(game.strategy_counts())
                .all(|(v, &c)| v.len() == c)
    }

    /// The profile as one flat vector over the disjoint union of strategy
    /// sets, player 1's block first. Group averaging happens in this space.
    pub fn flatten(&self) -> Vec<Rat> {
        self.strategies.iter().flatten().cloned().collect()
    }

    pub fn unflatten(game: &Game, flat: &[Rat]) -> Result<ProductProfile> {
        let total: usize = game.strategy_counts().iter().sum();
        if flat.len() != total {
            return Err(Error::Dimension(format!(
                "flat vector has {} entries, expected {total}",
                flat.len()
            )));
        }
        let mut strategies = Vec::with_capacity(game.player_count());
        let mut offset = 0;
        for &c in game.strategy_counts() {
            strategies.push(flat[offset..offset + c].to_vec());
            offset += c;
        }
        ProductProfile::new(game, strategies)
    }
}

/// Exact expected utility of `player` under a joint distribution.
pub fn expected_utility(game: &Game, player: usize, dist: &JointDistribution) -> Result<Rat> {
    if player >= game.player_count() {
        return Err(Error::InvalidArgument(format!("no player {player}")));
    }
    if !dist.matches(game) {
        return Err(Error::Dimension(
            "distribution shape differs from game".to_string(),
        ));
    }
    Ok(game
        .utilities(player)
        .iter()
        .zip(dist.probs())
        .fold(Rat::zero(), |acc, (u, p)| acc + u * p))
}

/// The joint distribution `pi(s) = prod_i rho_i(s_i)` induced by a product
/// profile.
pub fn product_to_joint(game: &Game, profile: &ProductProfile) -> Result<JointDistribution> {
    if !profile.matches(game) {
        return Err(Error::Dimension(
            "profile shape differs from game".to_string(),
        ));
    }
    let mut probs = Vec::with_capacity(game.profile_count());
    for s in game.profiles() {
        let p = s
            .iter()
            .enumerate()
            .fold(Rat::one(), |acc, (i, &si)| acc * &profile.strategy(i)[si]);
        probs.push(p);
    }
    JointDistribution::new(game, probs)
}

/// True iff the game has two players and the utility tensors sum to zero.
pub fn is_zero_sum(game: &Game) -> bool {
    game.player_count() == 2
        && game
            .utilities(0)
            .iter()
            .zip(game.utilities(1))
            .all(|(a, b)| (a + b).is_zero())
}

/// Exact expected utilities `u_i(a, opponents)` for every pure strategy `a`
/// of `player`, where `opponent_probs` is a distribution over the profiles of
/// the other players (remaining players in increasing order, the first of
/// them varying fastest).
pub fn pure_payoffs_against(
    game: &Game,
    player: usize,
    opponent_probs: &[Rat],
) -> Result<Vec<Rat>> {
    let n = game.player_count();
    if player >= n {
        return Err(Error::InvalidArgument(format!("no player {player}")));
    }
    let expected: usize = game
        .strategy_counts()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != player)
        .map(|(_, &c)| c)
        .product();
    if opponent_probs.len() != expected {
        return Err(Error::Dimension(format!(
            "opponent distribution has {} entries, expected {expected}",
            opponent_probs.len()
        )));
    }
    let counts = game.strategy_counts();
    let mut values = vec![Rat::zero(); counts[player]];
    let mut others = vec![0usize; n];
    for p in opponent_probs {
        for (a, value) in values.iter_mut().enumerate() {
            if !p.is_zero() {
                others[player] = a;
                *value += p * game.utility(player, game.profile_index(&others));
            }
        }
        // Advance the opponents' odometer (skipping `player`).
        for i in (0..n).filter(|&i| i != player) {
            if others[i] + 1 < counts[i] {
                others[i] += 1;
                for j in (0..i).filter(|&j| j != player) {
                    others[j] = 0;
                }
                break;
            } else {
                others[i] = 0;
            }
        }
    }
    Ok(values)
}

/// Best-response value and the full set of pure strategies attaining it,
/// sorted ascending. Exact comparison, no tolerance.
pub fn best_responses(
    game: &Game,
    player: usize,
    opponent_probs: &[Rat],
) -> Result<(Rat, Vec<usize>)> {
    if !opponent_probs.iter().all(|p| !p.is_negative())
        || !opponent_probs
            .iter()
            .fold(Rat::zero(), |a, b| a + b)
            .is_one()
    {
        return Err(Error::InvalidDistribution(
            "opponent distribution must be nonnegative and sum to 1".to_string(),
        ));
    }
    let values = pure_payoffs_against(game, player, opponent_probs)?;
    let best = values.iter().max().expect("strategy set nonempty").clone();
    let set = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == best)
        .map(|(a, _)| a)
        .collect();
    Ok((best, set))
}

/// Distribution over the opponents' profiles when they independently play
/// their components of `profile`.
pub fn opponent_product(game: &Game, player: usize, profile: &ProductProfile) -> Vec<Rat> {
    let n = game.player_count();
    let len: usize = game
        .strategy_counts()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != player)
        .map(|(_, &c)| c)
        .product();
    let mut out = Vec::with_capacity(len);
    let counts = game.strategy_counts();
    let mut others: Vec<usize> = vec![0; n];
    for _ in 0..len {
        let mut p = Rat::one();
        for i in (0..n).filter(|&i| i != player) {
            p *= &profile.strategy(i)[others[i]];
        }
        out.push(p);
        for i in (0..n).filter(|&i| i != player) {
            if others[i] + 1 < counts[i] {
                others[i] += 1;
                for j in (0..i).filter(|&j| j != player) {
                    others[j] = 0;
                }
                break;
            } else {
                others[i] = 0;
            }
        }
    }
    out
}

/// Exact payoff equivalence of two mixed strategies for `player`: equal
/// payoffs for every player against every pure opponent profile.
pub fn is_payoff_equivalent(
    game: &Game,
    player: usize,
    sigma: &[Rat],
    tau: &[Rat],
) -> Result<bool> {
    let c = game.strategy_counts()[player];
    if sigma.len() != c || tau.len() != c {
        return Err(Error::Dimension(
            "mixed strategy length differs from strategy count".to_string(),
        ));
    }
    if !is_exact_distribution(sigma) || !is_exact_distribution(tau) {
        return Err(Error::InvalidStrategy(
            "inputs must be mixed strategies".to_string(),
        ));
    }
    let n = game.player_count();
    let counts = game.strategy_counts();
    let mut others = vec![0usize; n];
    let opp_count: usize = counts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != player)
        .map(|(_, &c)| c)
        .product();
    for _ in 0..opp_count {
        for j in 0..n {
            let mut lhs = Rat::zero();
            let mut rhs = Rat::zero();
            for a in 0..c {
                others[player] = a;
                let u = game.utility(j, game.profile_index(&others));
                lhs += &sigma[a] * u;
                rhs += &tau[a] * u;
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
        for i in (0..n).filter(|&i| i != player) {
            if others[i] + 1 < counts[i] {
                others[i] += 1;
                for j in (0..i).filter(|&j| j != player) {
                    others[j] = 0;
                }
                break;
            } else {
                others[i] = 0;
            }
        }
    }
    Ok(true)
}
