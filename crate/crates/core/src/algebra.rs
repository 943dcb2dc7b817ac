//! Constructions on games: powers, contracted powers, copy actions,
//! projection and lifting between the distribution spaces, the tensor-sum
//! symmetrization, and Nash extraction from symmetric equilibria of the
//! symmetrized game.
//!
//! Index conventions, fixed once and used bit-exactly everywhere:
//! - The m-th power has `m * n` players ordered `(1,1), (1,2), ...,
//!   (1,m), (2,1), ...` (base player major, copy minor), each keeping the
//!   base strategy set.
//! - The contracted m-th power keeps the n base players; player i's strategy
//!   is an m-tuple over `C_i` with copy 1 varying fastest in its linear
//!   index.
//! - With these two orders the flat profile spaces of the two powers
//!   coincide index-for-index, so a joint distribution on one reinterprets
//!   as a joint distribution on the other by `reshape` alone.

use crate::error::{Error, Result};
use crate::game::{product_to_joint, Game, JointDistribution, ProductProfile};
use crate::group::{
    close_group_capped, GroupAction, GroupElement, StrategySpace, DEFAULT_CLOSURE_CAP,
};
use crate::rational::Rat;
use num::traits::{One, Zero};

/// Default cap on materialized profile-space sizes.
pub const DEFAULT_CELL_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    /// Independent copies with disjoint player groups (`m * n` players).
    Power,
    /// One player group playing all copies (`n` players, tuple strategies).
    Contracted,
}

/// A materialized power of a base game, with its index maps.
#[derive(Debug, Clone)]
pub struct PowerGame {
    pub kind: PowerKind,
    pub copies: usize,
    pub base_counts: Vec<usize>,
    pub game: Game,
}

impl PowerGame {
    /// Power player index of base player `i`, copy `j`.
    pub fn power_player(&self, i: usize, j: usize) -> usize {
        i * self.copies + j
    }

    /// Contracted strategy index of the copy tuple `s_i^1..s_i^m`.
    pub fn tuple_index(&self, player: usize, tuple: &[usize]) -> usize {
        let c = self.base_counts[player];
        tuple.iter().rev().fold(0, |acc, &s| acc * c + s)
    }

    /// Copy tuple of a contracted strategy index.
    pub fn tuple_of_index(&self, player: usize, mut index: usize) -> Vec<usize> {
        let c = self.base_counts[player];
        let mut out = Vec::with_capacity(self.copies);
        for _ in 0..self.copies {
            out.push(index % c);
            index /= c;
        }
        out
    }
}

fn checked_profile_count(counts: &[usize], cap: usize) -> Result<usize> {
    let mut total = 1usize;
    for &c in counts {
        total = total
            .checked_mul(c)
            .filter(|&t| t <= cap)
            .ok_or(Error::CellCap {
                needed: usize::MAX,
                cap,
            })?;
    }
    Ok(total)
}

/// The m-th power: `m` independent copies with disjoint player groups.
pub fn power(game: &Game, m: usize, cap: usize) -> Result<PowerGame> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one copy".to_string()));
    }
    let n = game.player_count();
    let base_counts = game.strategy_counts().to_vec();
    let counts: Vec<usize> = base_counts
        .iter()
        .flat_map(|&c| std::iter::repeat_n(c, m))
        .collect();
    let profiles = checked_profile_count(&counts, cap)?;

    let mut utilities = vec![vec![Rat::zero(); profiles]; n * m];
    let mut digits = vec![0usize; n * m];
    for idx in 0..profiles {
        {
            let mut rem = idx;
            for (d, &c) in digits.iter_mut().zip(&counts) {
                *d = rem % c;
                rem /= c;
            }
        }
        for j in 0..m {
            // Base profile of copy j.
            let mut base_profile = Vec::with_capacity(n);
            for i in 0..n {
                base_profile.push(digits[i * m + j]);
            }
            let base_idx = game.profile_index(&base_profile);
            for i in 0..n {
                utilities[i * m + j][idx] = game.utility(i, base_idx).clone();
            }
        }
    }
    let names = game.names().map(|ns| {
        (0..n)
            .flat_map(|i| std::iter::repeat_n(ns[i].clone(), m))
            .collect()
    });
    let materialized = Game::with_names(counts, names, utilities)?;
    Ok(PowerGame {
        kind: PowerKind::Power,
        copies: m,
        base_counts,
        game: materialized,
    })
}

/// The contracted m-th power: the base players each play all `m` copies, and
/// their utility is the sum over copies.
pub fn contracted_power(game: &Game, m: usize, cap: usize) -> Result<PowerGame> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one copy".to_string()));
    }
    let n = game.player_count();
    let base_counts = game.strategy_counts().to_vec();
    let counts: Vec<usize> = base_counts
        .iter()
        .map(|&c| {
            (0..m)
                .try_fold(1usize, |acc, _| acc.checked_mul(c))
                .unwrap_or(usize::MAX)
        })
        .collect();
    if counts.contains(&usize::MAX) {
        return Err(Error::CellCap {
            needed: usize::MAX,
            cap,
        });
    }
    let profiles = checked_profile_count(&counts, cap)?;

    let mut utilities = vec![vec![Rat::zero(); profiles]; n];
    let mut tuple_digits = vec![vec![0usize; m]; n];
    for idx in 0..profiles {
        {
            let mut rem = idx;
            for (i, &c) in counts.iter().enumerate() {
                let mut t = rem % c;
                rem /= c;
                for j in 0..m {
                    tuple_digits[i][j] = t % base_counts[i];
                    t /= base_counts[i];
                }
            }
        }
        for j in 0..m {
            let mut base_profile = Vec::with_capacity(n);
            for row in tuple_digits.iter() {
                base_profile.push(row[j]);
            }
            let base_idx = game.profile_index(&base_profile);
            for i in 0..n {
                utilities[i][idx] += game.utility(i, base_idx);
            }
        }
    }
    let materialized = Game::new(counts, utilities)?;
    Ok(PowerGame {
        kind: PowerKind::Contracted,
        copies: m,
        base_counts,
        game: materialized,
    })
}

/// Group element on the power game induced by a base element `g` and a copy
/// permutation `sigma`: `(i, j, s) -> (g.i, sigma(j), g.s)`.
fn power_element(
    pg: &PowerGame,
    base_space: &StrategySpace,
    g: &GroupElement,
    sigma: &[usize],
) -> GroupElement {
    let space = StrategySpace::of_game(&pg.game);
    let m = pg.copies;
    let n = pg.base_counts.len();
    let mut map = vec![0usize; space.total()];
    match pg.kind {
        PowerKind::Power => {
            for i in 0..n {
                for j in 0..m {
                    for s in 0..pg.base_counts[i] {
                        let (gi, gs) = g.apply(base_space, i, s);
                        map[space.flat(pg.power_player(i, j), s)] =
                            space.flat(pg.power_player(gi, sigma[j]), gs);
                    }
                }
            }
        }
        PowerKind::Contracted => {
            for i in 0..n {
                let count: usize = pg.game.strategy_counts()[i];
                for t in 0..count {
                    let tuple = pg.tuple_of_index(i, t);
                    let mut gi_final = 0;
                    let mut image = vec![0usize; m];
                    for j in 0..m {
                        let (gi, gs) = g.apply(base_space, i, tuple[j]);
                        gi_final = gi;
                        image[sigma[j]] = gs;
                    }
                    map[space.flat(i, t)] = space.flat(gi_final, pg.tuple_index(gi_final, &image));
                }
            }
        }
    }
    GroupElement::new(&space, map).expect("induced power maps are valid elements")
}

/// The `G x S_m` action on a power game, generated by the base elements
/// applied to all copies at once plus the copy transposition and cycle.
pub fn power_action(pg: &PowerGame, base: &Game, group: &GroupAction) -> Result<GroupAction> {
    if !group.matches(base) {
        return Err(Error::Dimension(
            "group does not act on the base game".to_string(),
        ));
    }
    let base_space = group.space();
    let m = pg.copies;
    let identity_copy: Vec<usize> = (0..m).collect();
    let mut generators = Vec::new();
    for g in group.elements() {
        generators.push(power_element(pg, base_space, g, &identity_copy));
    }
    if m > 1 {
        let ident = GroupElement::identity(base_space);
        let mut transpose: Vec<usize> = identity_copy.clone();
        transpose.swap(0, 1);
        generators.push(power_element(pg, base_space, &ident, &transpose));
        let cycle: Vec<usize> = (0..m).map(|j| (j + 1) % m).collect();
        generators.push(power_element(pg, base_space, &ident, &cycle));
    }
    close_group_capped(&pg.game, &generators, DEFAULT_CLOSURE_CAP)
}

/// Marginalizes a distribution over `m` copies down to the first `p` copies.
/// The input may be shaped for either power; the output is shaped for the
/// `p`-th power of the same kind.
pub fn marginalize(
    pg: &PowerGame,
    dist: &JointDistribution,
    p: usize,
) -> Result<JointDistribution> {
    let m = pg.copies;
    if p == 0 || p >= m {
        return Err(Error::InvalidArgument(format!("need 0 < p < {m}, got {p}")));
    }
    if dist.shape() != pg.game.strategy_counts() {
        return Err(Error::Dimension(
            "distribution shape differs from the power game".to_string(),
        ));
    }
    let n = pg.base_counts.len();
    let out_counts: Vec<usize> = match pg.kind {
        PowerKind::Power => pg
            .base_counts
            .iter()
            .flat_map(|&c| std::iter::repeat_n(c, p))
            .collect(),
        PowerKind::Contracted => pg.base_counts.iter().map(|&c| c.pow(p as u32)).collect(),
    };
    let out_len: usize = out_counts.iter().product();
    let mut probs = vec![Rat::zero(); out_len];
    for (idx, prob) in dist.probs().iter().enumerate() {
        if prob.is_zero() {
            continue;
        }
        // Extract per-(player, copy) digits from the flat index, then keep
        // the first p copies. Both kinds share digit order.
        let mut rem = idx;
        let mut out_idx = 0usize;
        let mut out_stride = 1usize;
        for i in 0..n {
            for j in 0..m {
                let d = rem % pg.base_counts[i];
                rem /= pg.base_counts[i];
                if j < p {
                    out_idx += d * out_stride;
                    out_stride *= pg.base_counts[i];
                }
            }
        }
        probs[out_idx] += prob;
    }
    JointDistribution::with_shape(out_counts, probs)
}

/// The i.i.d. m-fold lift of a base product profile, as a joint distribution
/// over the power profile space (shaped for the plain power).
pub fn diagonal_lift(
    base: &Game,
    profile: &ProductProfile,
    m: usize,
    cap: usize,
) -> Result<JointDistribution> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one copy".to_string()));
    }
    if !profile.matches(base) {
        return Err(Error::Dimension(
            "profile shape differs from the base game".to_string(),
        ));
    }
    let lifted = lift_profile_to_power(&power(base, m, cap)?, profile);
    let pg = power(base, m, cap)?;
    product_to_joint(&pg.game, &lifted)
}

/// The product profile of a power game obtained by giving every copy of
/// player i the base strategy `rho_i` (for the plain power), or player i the
/// m-fold product vector (for the contracted power).
pub fn lift_profile_to_power(pg: &PowerGame, profile: &ProductProfile) -> ProductProfile {
    let m = pg.copies;
    match pg.kind {
        PowerKind::Power => {
            let strategies = profile
                .strategies()
                .iter()
                .flat_map(|v| std::iter::repeat_n(v.clone(), m))
                .collect();
            ProductProfile::from_parts_unchecked(strategies)
        }
        PowerKind::Contracted => {
            let strategies = (0..pg.base_counts.len())
                .map(|i| {
                    let base_vec = profile.strategy(i);
                    let count = pg.game.strategy_counts()[i];
                    (0..count)
                        .map(|t| {
                            pg.tuple_of_index(i, t)
                                .iter()
                                .fold(Rat::one(), |acc, &s| acc * &base_vec[s])
                        })
                        .collect()
                })
                .collect();
            ProductProfile::from_parts_unchecked(strategies)
        }
    }
}

/// The tensor-sum symmetrization: every player plays a full base profile,
/// and utilities are summed over all assignments of the players to roles.
/// Returns the symmetrized game with its player-transitive action (the base
/// elements acting diagonally plus the player permutations); both
/// compatibility and transitivity are checked before returning.
pub fn symmetrize_game(
    game: &Game,
    group: &GroupAction,
    cap: usize,
) -> Result<(Game, GroupAction)> {
    if !group.matches(game) {
        return Err(Error::Dimension(
            "group does not act on this game".to_string(),
        ));
    }
    let n = game.player_count();
    let base_profiles = game.profile_count();
    let counts = vec![base_profiles; n];
    let total = checked_profile_count(&counts, cap)?;

    // u_i(s^1..s^n) = sum over role assignments tau of
    // u_{tau(i)} at the diagonal profile of tau * s.
    let permutations = all_permutations(n);
    let mut utilities = vec![vec![Rat::zero(); total]; n];
    let mut choice = vec![0usize; n];
    for idx in 0..total {
        {
            let mut rem = idx;
            for slot in choice.iter_mut() {
                *slot = rem % base_profiles;
                rem /= base_profiles;
            }
        }
        let decoded: Vec<Vec<usize>> = choice.iter().map(|&c| game.profile_of_index(c)).collect();
        for tau in &permutations {
            // d(tau * s)_k = s^{tau^{-1}(k)}_k; build it via tau directly:
            // component k comes from the player whose image under tau is k.
            let mut diag = vec![0usize; n];
            for (source, &target) in tau.iter().enumerate() {
                diag[target] = decoded[source][target];
            }
            let u_idx = game.profile_index(&diag);
            for i in 0..n {
                utilities[i][idx] += game.utility(tau[i], u_idx);
            }
        }
    }
    let sym = Game::new(counts, utilities)?;

    // Generators on the symmetrized strategy space: base elements act on
    // every coordinate's inner profile; player permutations move the
    // coordinates wholesale.
    let sym_space = StrategySpace::of_game(&sym);
    let base_space = group.space();
    let mut generators = Vec::new();
    for g in group.elements() {
        let mut map = vec![0usize; sym_space.total()];
        for i in 0..n {
            for c in 0..base_profiles {
                let profile = game.profile_of_index(c);
                let moved = g.apply_profile(base_space, &profile);
                map[sym_space.flat(i, c)] = sym_space.flat(i, game.profile_index(&moved));
            }
        }
        generators.push(GroupElement::new(&sym_space, map)?);
    }
    for tau in player_permutation_generators(n) {
        let mut map = vec![0usize; sym_space.total()];
        for i in 0..n {
            for c in 0..base_profiles {
                map[sym_space.flat(i, c)] = sym_space.flat(tau[i], c);
            }
        }
        generators.push(GroupElement::new(&sym_space, map)?);
    }
    let action = close_group_capped(&sym, &generators, DEFAULT_CLOSURE_CAP)?;
    if let Err(v) = crate::group::validate_action(&sym, &action) {
        return Err(Error::InvalidGame(format!(
            "symmetrization action failed utility compatibility at element {}, player {}, profile {:?}",
            v.element, v.player, v.profile
        )));
    }
    let class = crate::group::classify_action(&action);
    assert!(
        class.player_transitive,
        "symmetrized action must be player transitive"
    );
    Ok((sym, action))
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permutations(&mut current, n, &mut out);
    out.sort();
    out
}

fn heap_permutations(arr: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(arr.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(arr, k - 1, out);
        if k.is_multiple_of(2) {
            arr.swap(i, k - 1);
        } else {
            arr.swap(0, k - 1);
        }
    }
}

fn player_permutation_generators(n: usize) -> Vec<Vec<usize>> {
    if n < 2 {
        return Vec::new();
    }
    let mut transpose: Vec<usize> = (0..n).collect();
    transpose.swap(0, 1);
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    if n == 2 {
        vec![transpose]
    } else {
        vec![transpose, cycle]
    }
}

/// Extracts a Nash equilibrium of the base game from a symmetric Nash
/// equilibrium `(rho, ..., rho)` of the symmetrized game: the per-role
/// marginals of `rho` form the product equilibrium,
/// checked exactly before returning.
pub fn extract_nash_from_sym(
    base: &Game,
    sym: &Game,
    sym_profile: &ProductProfile,
) -> Result<ProductProfile> {
    if !sym_profile.matches(sym) {
        return Err(Error::Dimension(
            "profile shape differs from the symmetrized game".to_string(),
        ));
    }
    let n = base.player_count();
    if sym.player_count() != n
        || sym
            .strategy_counts()
            .iter()
            .any(|&c| c != base.profile_count())
    {
        return Err(Error::InvalidArgument(
            "symmetrized game shape does not match the base game".to_string(),
        ));
    }
    let first = sym_profile.strategy(0);
    for i in 1..n {
        if sym_profile.strategy(i) != first {
            return Err(Error::InvalidArgument(
                "profile is not symmetric: players differ".to_string(),
            ));
        }
    }
    let report = crate::equilibria::verify_nash(sym, sym_profile)?;
    if !report.verdict {
        return Err(Error::NotAnEquilibrium(format!(
            "symmetric profile violates the equilibrium inequalities by {}",
            report.worst_violation
        )));
    }
    // Per-role marginals of the common distribution over base profiles.
    let mut strategies = Vec::with_capacity(n);
    for i in 0..n {
        let mut marg = vec![Rat::zero(); base.strategy_counts()[i]];
        for (c, p) in first.iter().enumerate() {
            if !p.is_zero() {
                let profile = base.profile_of_index(c);
                marg[profile[i]] += p;
            }
        }
        strategies.push(marg);
    }
    let extracted = ProductProfile::new(base, strategies)?;
    let base_report = crate::equilibria::verify_nash(base, &extracted)?;
    assert!(
        base_report.verdict,
        "marginals of a symmetric equilibrium must form a base equilibrium"
    );
    Ok(extracted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{act_on_joint, classify_action, close_group, validate_action};
    use crate::rational::{rat, ratio};

    fn matching_pennies() -> Game {
        let a = vec![vec![rat(1), rat(-1)], vec![rat(-1), rat(1)]];
        let b = vec![vec![rat(-1), rat(1)], vec![rat(1), rat(-1)]];
        Game::bimatrix(a, b).unwrap()
    }

    fn asymmetric() -> Game {
        let a = vec![vec![rat(0), rat(2)], vec![rat(2), rat(1)]];
        let b = vec![vec![rat(3), rat(0)], vec![rat(0), rat(1)]];
        Game::bimatrix(a, b).unwrap()
    }

    fn mp_four_cycle(space: &StrategySpace) -> GroupElement {
        GroupElement::from_pairs(
            space,
            &[
                ((0, 0), (1, 0)),
                ((1, 0), (0, 1)),
                ((0, 1), (1, 1)),
                ((1, 1), (0, 0)),
            ],
        )
        .unwrap()
    }

    fn mp_flip(space: &StrategySpace) -> GroupElement {
        GroupElement::from_pairs(
            space,
            &[
                ((0, 0), (0, 1)),
                ((0, 1), (0, 0)),
                ((1, 0), (1, 1)),
                ((1, 1), (1, 0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn power_utilities_read_off_the_right_copy() {
        let mp = matching_pennies();
        let pg = power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(pg.game.player_count(), 4);
        assert_eq!(pg.game.profile_count(), 16);
        // Player (1,2) = power player 1: utility of copy 2 only.
        // Profile: copy 1 = (H,T), copy 2 = (H,H).
        let profile_idx = pg.game.profile_index(&[0, 0, 1, 0]);
        assert_eq!(*pg.game.utility(pg.power_player(0, 1), profile_idx), rat(1));
        // Copy 1 pays (H,T) = -1 for player (1,1).
        assert_eq!(
            *pg.game.utility(pg.power_player(0, 0), profile_idx),
            rat(-1)
        );
    }

    #[test]
    fn contracted_power_sums_copies() {
        let mp = matching_pennies();
        let pg = contracted_power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(pg.game.player_count(), 2);
        assert_eq!(pg.game.strategy_counts(), &[4, 4]);
        // Player 1 plays (H,H), player 2 plays (H,T): copies pay 1 and -1.
        let p1 = pg.tuple_index(0, &[0, 0]);
        let p2 = pg.tuple_index(1, &[0, 1]);
        let idx = pg.game.profile_index(&[p1, p2]);
        assert_eq!(*pg.game.utility(0, idx), rat(0));
        assert_eq!(*pg.game.utility(1, idx), rat(0));
        // (H,H) vs (H,H): both copies pay 1 to player 1.
        let idx = pg.game.profile_index(&[p1, pg.tuple_index(1, &[0, 0])]);
        assert_eq!(*pg.game.utility(0, idx), rat(2));
        assert_eq!(*pg.game.utility(1, idx), rat(-2));
    }

    #[test]
    fn both_powers_share_the_flat_profile_space() {
        let g = asymmetric();
        let m = 2;
        let pw = power(&g, m, DEFAULT_CELL_CAP).unwrap();
        let ct = contracted_power(&g, m, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(pw.game.profile_count(), ct.game.profile_count());
        // Contracted utility = sum over copies of the power utilities of the
        // same flat profile.
        for idx in 0..ct.game.profile_count() {
            for i in 0..2 {
                let total: Rat = (0..m)
                    .map(|j| pw.game.utility(pw.power_player(i, j), idx).clone())
                    .fold(Rat::zero(), |a, b| a + b);
                assert_eq!(*ct.game.utility(i, idx), total);
            }
        }
    }

    #[test]
    fn first_power_is_the_base_game() {
        let g = asymmetric();
        let pw = power(&g, 1, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(pw.game.strategy_counts(), g.strategy_counts());
        for i in 0..2 {
            assert_eq!(pw.game.utilities(i), g.utilities(i));
        }
        let ct = contracted_power(&g, 1, DEFAULT_CELL_CAP).unwrap();
        for i in 0..2 {
            assert_eq!(ct.game.utilities(i), g.utilities(i));
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = asymmetric();
        assert!(matches!(power(&g, 2, 10), Err(Error::CellCap { .. })));
        assert!(matches!(
            contracted_power(&g, 2, 10),
            Err(Error::CellCap { .. })
        ));
    }

    #[test]
    fn power_action_orders() {
        let mp = matching_pennies();
        let space = StrategySpace::of_game(&mp);
        let flip_group = close_group(&mp, &[mp_flip(&space)]).unwrap();
        let cycle_group = close_group(&mp, &[mp_four_cycle(&space)]).unwrap();
        let trivial = close_group(&mp, &[]).unwrap();

        let pw = power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(power_action(&pw, &mp, &flip_group).unwrap().order(), 4);
        assert_eq!(power_action(&pw, &mp, &trivial).unwrap().order(), 2);
        assert_eq!(power_action(&pw, &mp, &cycle_group).unwrap().order(), 8);

        let ct = contracted_power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(power_action(&ct, &mp, &cycle_group).unwrap().order(), 8);
    }

    #[test]
    fn power_actions_are_valid_on_both_kinds() {
        let mp = matching_pennies();
        let space = StrategySpace::of_game(&mp);
        let group = close_group(&mp, &[mp_four_cycle(&space)]).unwrap();
        for pg in [
            power(&mp, 2, DEFAULT_CELL_CAP).unwrap(),
            contracted_power(&mp, 2, DEFAULT_CELL_CAP).unwrap(),
        ] {
            let action = power_action(&pg, &mp, &group).unwrap();
            assert!(validate_action(&pg.game, &action).is_ok());
        }
    }

    #[test]
    fn copy_permutations_fix_the_same_joint_distributions() {
        // The pure copy action (trivial base group) must induce identical
        // orbit partitions of the flat profile space for both kinds.
        let mp = matching_pennies();
        let trivial = close_group(&mp, &[]).unwrap();
        let pw = power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        let ct = contracted_power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        let act_pw = power_action(&pw, &mp, &trivial).unwrap();
        let act_ct = power_action(&ct, &mp, &trivial).unwrap();
        let orbit = |action: &GroupAction| {
            let total = 16;
            let mut label = vec![usize::MAX; total];
            let mut next = 0;
            for start in 0..total {
                if label[start] != usize::MAX {
                    continue;
                }
                let mut stack = vec![start];
                label[start] = next;
                while let Some(x) = stack.pop() {
                    for g in action.elements() {
                        let perm = crate::group::profile_permutation(g, action.space());
                        let y = perm.iter().position(|&img| img == x).unwrap();
                        for cand in [perm[x], y] {
                            if label[cand] == usize::MAX {
                                label[cand] = next;
                                stack.push(cand);
                            }
                        }
                    }
                }
                next += 1;
            }
            label
        };
        assert_eq!(orbit(&act_pw), orbit(&act_ct));
    }

    #[test]
    fn contracted_invariant_products_exceed_power_ones() {
        // A contracted product with perfectly correlated copies is invariant
        // under copy swaps but is not an independent lift.
        let mp = matching_pennies();
        let ct = contracted_power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        let trivial = close_group(&mp, &[]).unwrap();
        let action = power_action(&ct, &mp, &trivial).unwrap();
        let correlated = ProductProfile::new(
            &ct.game,
            vec![
                vec![ratio(1, 2), rat(0), rat(0), ratio(1, 2)],
                vec![ratio(1, 2), rat(0), rat(0), ratio(1, 2)],
            ],
        )
        .unwrap();
        for g in action.elements() {
            assert_eq!(
                crate::group::act_on_profile(g, action.space(), &correlated).unwrap(),
                correlated
            );
        }
        // Its joint over the shared profile space is not a product over the
        // power players: the power-player marginals are uniform, and the
        // product of uniform marginals is the uniform distribution, which
        // differs from this joint.
        let joint = product_to_joint(&ct.game, &correlated).unwrap();
        let as_power = joint.reshape(vec![2, 2, 2, 2]).unwrap();
        let pw = power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        let uniform = JointDistribution::uniform(&pw.game);
        assert_ne!(as_power, uniform);
        for player in 0..4 {
            assert_eq!(as_power.marginal(player), vec![ratio(1, 2), ratio(1, 2)]);
        }
    }

    #[test]
    fn lift_then_marginalize_recovers_the_product() {
        let g = asymmetric();
        let rho = ProductProfile::new(
            &g,
            vec![
                vec![ratio(1, 4), ratio(3, 4)],
                vec![ratio(1, 3), ratio(2, 3)],
            ],
        )
        .unwrap();
        let lifted = diagonal_lift(&g, &rho, 2, DEFAULT_CELL_CAP).unwrap();
        let pw = power(&g, 2, DEFAULT_CELL_CAP).unwrap();
        let margin = marginalize(&pw, &lifted, 1).unwrap();
        let direct = product_to_joint(&g, &rho).unwrap();
        assert_eq!(margin.probs(), direct.probs());

        // Uniform marginalizes to uniform; point masses project to the first
        // copy's profile.
        let uniform = JointDistribution::uniform(&pw.game);
        assert_eq!(
            marginalize(&pw, &uniform, 1).unwrap().probs(),
            JointDistribution::uniform(&g).probs()
        );
        let point = JointDistribution::point_mass(&pw.game, &[0, 1, 1, 0]);
        let projected = marginalize(&pw, &point, 1).unwrap();
        assert_eq!(
            projected.probs(),
            JointDistribution::point_mass(&g, &[0, 1]).probs()
        );

        // Copy counts outside 0 < p < m are rejected.
        assert!(marginalize(&pw, &uniform, 0).is_err());
        assert!(marginalize(&pw, &uniform, 2).is_err());
    }

    #[test]
    fn pure_equilibria_survive_symmetrization_round_trip() {
        // (0,0) is a pure equilibrium of this game; its point mass over base
        // profiles is a symmetric equilibrium of the symmetrization, and
        // extraction recovers the pure profile.
        let a = vec![vec![rat(1), rat(2)], vec![rat(0), rat(0)]];
        let b = vec![vec![rat(1), rat(0)], vec![rat(2), rat(0)]];
        let g = Game::bimatrix(a, b).unwrap();
        let trivial = close_group(&g, &[]).unwrap();
        let (sym, _) = symmetrize_game(&g, &trivial, DEFAULT_CELL_CAP).unwrap();
        let mut rho = vec![rat(0); 4];
        rho[g.profile_index(&[0, 0])] = rat(1);
        let sym_profile = ProductProfile::new(&sym, vec![rho.clone(), rho]).unwrap();
        let extracted = extract_nash_from_sym(&g, &sym, &sym_profile).unwrap();
        assert_eq!(extracted, ProductProfile::pure(&g, &[0, 0]));
    }

    #[test]
    fn diagonal_lift_is_copy_invariant() {
        let mp = matching_pennies();
        let rho = ProductProfile::new(
            &mp,
            vec![
                vec![ratio(1, 3), ratio(2, 3)],
                vec![ratio(1, 5), ratio(4, 5)],
            ],
        )
        .unwrap();
        let lifted = diagonal_lift(&mp, &rho, 2, DEFAULT_CELL_CAP).unwrap();
        let pw = power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
        let trivial = close_group(&mp, &[]).unwrap();
        let action = power_action(&pw, &mp, &trivial).unwrap();
        for g in action.elements() {
            assert_eq!(act_on_joint(g, action.space(), &lifted).unwrap(), lifted);
        }
        // Uniform base profile lifts to the uniform distribution.
        let uniform_lift =
            diagonal_lift(&mp, &ProductProfile::uniform(&mp), 2, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(uniform_lift, JointDistribution::uniform(&pw.game));
        // A pure profile lifts to the point mass on its diagonal.
        let pure_lift = diagonal_lift(
            &mp,
            &ProductProfile::pure(&mp, &[0, 1]),
            2,
            DEFAULT_CELL_CAP,
        )
        .unwrap();
        assert_eq!(
            pure_lift,
            JointDistribution::point_mass(&pw.game, &[0, 0, 1, 1])
        );
    }

    #[test]
    fn symmetrization_of_the_asymmetric_game() {
        let g = asymmetric();
        let trivial = close_group(&g, &[]).unwrap();
        let (sym, action) = symmetrize_game(&g, &trivial, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(sym.player_count(), 2);
        assert_eq!(sym.strategy_counts(), &[4, 4]);
        // u_1^Sym((a,b),(c,d)) = A[a,d] + B[c,b]; at all-zero coordinates,
        // A[0,0] + B[0,0] = 0 + 3.
        let s1 = g.profile_index(&[0, 0]);
        let idx = sym.profile_index(&[s1, s1]);
        assert_eq!(*sym.utility(0, idx), rat(3));
        // And a mixed coordinate: s^1 = (a=1, b=0), s^2 = (c=0, d=1):
        // u_1 = A[1,1] + B[0,0] = 1 + 3.
        let sa = g.profile_index(&[1, 0]);
        let sb = g.profile_index(&[0, 1]);
        let idx = sym.profile_index(&[sa, sb]);
        assert_eq!(*sym.utility(0, idx), rat(1) + rat(3));

        let class = classify_action(&action);
        assert!(class.player_transitive);
        assert!(validate_action(&sym, &action).is_ok());
    }

    #[test]
    fn nash_extraction_round_trip() {
        let g = asymmetric();
        let trivial = close_group(&g, &[]).unwrap();
        let (sym, _) = symmetrize_game(&g, &trivial, DEFAULT_CELL_CAP).unwrap();
        // rho = product of the unique base equilibrium, as a distribution
        // over base profiles.
        let p = [ratio(1, 4), ratio(3, 4)];
        let q = [ratio(1, 3), ratio(2, 3)];
        let mut rho = vec![rat(0); 4];
        for a in 0..2 {
            for b in 0..2 {
                rho[g.profile_index(&[a, b])] = &p[a] * &q[b];
            }
        }
        let sym_profile = ProductProfile::new(&sym, vec![rho.clone(), rho]).unwrap();
        let extracted = extract_nash_from_sym(&g, &sym, &sym_profile).unwrap();
        assert_eq!(extracted.strategy(0), &p);
        assert_eq!(extracted.strategy(1), &q);

        // Asymmetric inputs and non-equilibria are rejected.
        let mut other = vec![rat(0); 4];
        other[0] = rat(1);
        let bad =
            ProductProfile::new(&sym, vec![vec![rat(1), rat(0), rat(0), rat(0)], other]).unwrap();
        assert!(extract_nash_from_sym(&g, &sym, &bad).is_err());
    }
}
