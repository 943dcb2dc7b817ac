//! Finite permutation groups acting on games.
//!
//! A group element permutes the disjoint union of the players' strategy sets
//! while respecting its block structure: each player's strategy set is carried
//! bijectively onto some player's strategy set, which induces a permutation of
//! the players. A group action on a game additionally leaves utilities
//! invariant, which `validate_action` checks exactly.
//!
//! Groups are stored as explicit element lists (desk-scale orders), which
//! makes exact averaging over the group a finite sum.

use crate::error::{Error, Result};
use crate::game::{Game, JointDistribution, ProductProfile};
use crate::rational::Rat;
use num::traits::Zero;

pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// A `(player, strategy) -> (player, strategy)` entry of a point map.
pub type MappingPair = ((usize, usize), (usize, usize));

/// A permutation of the disjoint union of strategy sets, stored on flat
/// indices (player 1's strategies first), together with the player
/// permutation it induces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElement {
    strategy_map: Vec<usize>,
    player_map: Vec<usize>,
}

/// Flat layout of the disjoint union of strategy sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySpace {
    counts: Vec<usize>,
    offsets: Vec<usize>,
}

impl StrategySpace {
    pub fn new(counts: &[usize]) -> StrategySpace {
        let mut offsets = Vec::with_capacity(counts.len());
        let mut acc = 0;
        for &c in counts {
            offsets.push(acc);
            acc += c;
        }
        StrategySpace {
            counts: counts.to_vec(),
            offsets,
        }
    }

    pub fn of_game(game: &Game) -> StrategySpace {
        StrategySpace::new(game.strategy_counts())
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn flat(&self, player: usize, strategy: usize) -> usize {
        debug_assert!(strategy < self.counts[player]);
        self.offsets[player] + strategy
    }

    pub fn unflat(&self, flat: usize) -> (usize, usize) {
        let player = match self.offsets.binary_search(&flat) {
            Ok(p) => p,
            Err(p) => p - 1,
        };
        (player, flat - self.offsets[player])
    }
}

impl GroupElement {
    /// Builds an element from the flat strategy permutation, checking that it
    /// is a bijection mapping each player's block onto a single player's
    /// block of equal size.
    pub fn new(space: &StrategySpace, strategy_map: Vec<usize>) -> Result<GroupElement> {
        let total = space.total();
        if strategy_map.len() != total {
            return Err(Error::InvalidGroupElement(format!(
                "map has {} points, strategy space has {total}",
                strategy_map.len()
            )));
        }
        let mut seen = vec![false; total];
        for &img in &strategy_map {
            if img >= total {
                return Err(Error::InvalidGroupElement(format!(
                    "image {img} out of range"
                )));
            }
            if seen[img] {
                return Err(Error::InvalidGroupElement(format!(
                    "image {img} repeated, not a bijection"
                )));
            }
            seen[img] = true;
        }
        let n = space.counts().len();
        let mut player_map = vec![usize::MAX; n];
        for i in 0..n {
            for s in 0..space.counts()[i] {
                let (j, _) = space.unflat(strategy_map[space.flat(i, s)]);
                if player_map[i] == usize::MAX {
                    player_map[i] = j;
                } else if player_map[i] != j {
                    return Err(Error::InvalidGroupElement(format!(
                        "player {}'s strategies map to several players",
                        i + 1
                    )));
                }
            }
            if space.counts()[player_map[i]] != space.counts()[i] {
                return Err(Error::InvalidGroupElement(format!(
                    "player {} maps onto a block of different size",
                    i + 1
                )));
            }
        }
        Ok(GroupElement {
            strategy_map,
            player_map,
        })
    }

    /// Builds an element from `(player, strategy) -> (player, strategy)`
    /// pairs; unmentioned points stay fixed.
    pub fn from_pairs(space: &StrategySpace, pairs: &[MappingPair]) -> Result<GroupElement> {
        let total = space.total();
        let mut map: Vec<usize> = (0..total).collect();
        let mut touched = vec![false; total];
        for &((fp, fs), (tp, ts)) in pairs {
            if fp >= space.counts().len() || tp >= space.counts().len() {
                return Err(Error::InvalidGroupElement(
                    "player index out of range".to_string(),
                ));
            }
            if fs >= space.counts()[fp] || ts >= space.counts()[tp] {
                return Err(Error::InvalidGroupElement(
                    "strategy index out of range".to_string(),
                ));
            }
            let from = space.flat(fp, fs);
            if touched[from] {
                return Err(Error::InvalidGroupElement(format!(
                    "point ({fp},{fs}) mapped twice"
                )));
            }
            touched[from] = true;
            map[from] = space.flat(tp, ts);
        }
        GroupElement::new(space, map)
    }

    pub fn identity(space: &StrategySpace) -> GroupElement {
        let total = space.total();
        GroupElement {
            strategy_map: (0..total).collect(),
            player_map: (0..space.counts().len()).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.strategy_map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self` after `other`: `(self.compose(other))(x) = self(other(x))`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let strategy_map = other
            .strategy_map
            .iter()
            .map(|&x| self.strategy_map[x])
            .collect();
        let player_map = other
            .player_map
            .iter()
            .map(|&p| self.player_map[p])
            .collect();
        GroupElement {
            strategy_map,
            player_map,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        let mut strategy_map = vec![0; self.strategy_map.len()];
        for (i, &x) in self.strategy_map.iter().enumerate() {
            strategy_map[x] = i;
        }
        let mut player_map = vec![0; self.player_map.len()];
        for (i, &p) in self.player_map.iter().enumerate() {
            player_map[p] = i;
        }
        GroupElement {
            strategy_map,
            player_map,
        }
    }

    /// Image of a flat strategy point.
    pub fn apply_flat(&self, flat: usize) -> usize {
        self.strategy_map[flat]
    }

    /// Image of a `(player, strategy)` point.
    pub fn apply(&self, space: &StrategySpace, player: usize, strategy: usize) -> (usize, usize) {
        space.unflat(self.strategy_map[space.flat(player, strategy)])
    }

    pub fn apply_player(&self, player: usize) -> usize {
        self.player_map[player]
    }

    pub fn player_map(&self) -> &[usize] {
        &self.player_map
    }

    pub fn strategy_map(&self) -> &[usize] {
        &self.strategy_map
    }

    /// The induced map on strategy profiles: `(g.s)_{g.i} = g.(s_i)`.
    pub fn apply_profile(&self, space: &StrategySpace, profile: &[usize]) -> Vec<usize> {
        let mut out = vec![0; profile.len()];
        for (i, &s) in profile.iter().enumerate() {
            let (j, t) = self.apply(space, i, s);
            out[j] = t;
        }
        out
    }
}

/// A finite group acting on the strategy space of one game, stored as a
/// complete element list in a deterministic order (identity first, then
/// breadth-first layers from the generators, each layer sorted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    space: StrategySpace,
    elements: Vec<GroupElement>,
}

impl GroupAction {
    pub fn trivial(game: &Game) -> GroupAction {
        let space = StrategySpace::of_game(game);
        let identity = GroupElement::identity(&space);
        GroupAction {
            space,
            elements: vec![identity],
        }
    }

    pub fn space(&self) -> &StrategySpace {
        &self.space
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn matches(&self, game: &Game) -> bool {
        self.space.counts() == game.strategy_counts()
    }

    pub(crate) fn from_parts_unchecked(
        space: StrategySpace,
        elements: Vec<GroupElement>,
    ) -> GroupAction {
        GroupAction { space, elements }
    }
}

/// Closes the generators under composition, capped at `cap` elements.
pub fn close_group_capped(
    game: &Game,
    generators: &[GroupElement],
    cap: usize,
) -> Result<GroupAction> {
    let space = StrategySpace::of_game(game);
    for g in generators {
        if g.strategy_map.len() != space.total() {
            return Err(Error::InvalidGroupElement(
                "generator does not act on this game's strategy space".to_string(),
            ));
        }
    }
    let mut elements = vec![GroupElement::identity(&space)];
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut discovered = Vec::new();
        for x in &frontier {
            for g in generators {
                let y = x.compose(g);
                if !elements.contains(&y) && !discovered.contains(&y) {
                    discovered.push(y);
                }
            }
        }
        discovered.sort();
        if elements.len() + discovered.len() > cap {
            return Err(Error::ClosureCap(cap));
        }
        elements.extend(discovered.iter().cloned());
        frontier = discovered;
    }
    Ok(GroupAction { space, elements })
}

pub fn close_group(game: &Game, generators: &[GroupElement]) -> Result<GroupAction> {
    close_group_capped(game, generators, DEFAULT_CLOSURE_CAP)
}

/// A witness that some element breaks utility compatibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionViolation {
    pub element: usize,
    pub player: usize,
    pub profile: Vec<usize>,
}

/// Checks `u_{g.i}(g.s) = u_i(s)` exactly for every element, player, and
/// profile. `Ok(())` means the group really acts on the game.
pub fn validate_action(
    game: &Game,
    group: &GroupAction,
) -> std::result::Result<(), ActionViolation> {
    let space = group.space();
    for (gi, g) in group.elements().iter().enumerate() {
        for s in game.profiles() {
            let gs = g.apply_profile(space, &s);
            let gs_idx = game.profile_index(&gs);
            let s_idx = game.profile_index(&s);
            for i in 0..game.player_count() {
                if game.utility(g.apply_player(i), gs_idx) != game.utility(i, s_idx) {
                    return Err(ActionViolation {
                        element: gi,
                        player: i,
                        profile: s,
                    });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionClass {
    pub player_trivial: bool,
    pub player_transitive: bool,
}

/// Classifies the induced player permutations: trivial means every element
/// fixes every player; transitive means every player reaches every other.
pub fn classify_action(group: &GroupAction) -> ActionClass {
    let n = group.space().counts().len();
    let player_trivial = group
        .elements()
        .iter()
        .all(|g| g.player_map().iter().enumerate().all(|(i, &j)| i == j));
    // Orbit of player 0 under the listed elements; the orbits partition the
    // players, so full transitivity is equivalent to one orbit.
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        for g in group.elements() {
            let j = g.apply_player(i);
            if !reached[j] {
                reached[j] = true;
                frontier.push(j);
            }
        }
    }
    ActionClass {
        player_trivial,
        player_transitive: reached.iter().all(|&r| r),
    }
}

/// Right action on joint distributions: `(pi . g)(s) = pi(g . s)`.
pub fn act_on_joint(
    g: &GroupElement,
    space: &StrategySpace,
    dist: &JointDistribution,
) -> Result<JointDistribution> {
    if dist.shape() != space.counts() {
        return Err(Error::Dimension(
            "distribution shape differs from the action's game".to_string(),
        ));
    }
    let perm = profile_permutation(g, space);
    let probs = perm.iter().map(|&img| dist.probs()[img].clone()).collect();
    JointDistribution::with_shape(dist.shape().to_vec(), probs)
}

/// `perm[index(s)] = index(g . s)`.
pub fn profile_permutation(g: &GroupElement, space: &StrategySpace) -> Vec<usize> {
    let counts = space.counts();
    let total: usize = counts.iter().product();
    let mut perm = Vec::with_capacity(total);
    let mut profile = vec![0usize; counts.len()];
    for _ in 0..total {
        let image = g.apply_profile(space, &profile);
        let mut idx = 0;
        let mut stride = 1;
        for (s, c) in image.iter().zip(counts) {
            idx += s * stride;
            stride *= c;
        }
        perm.push(idx);
        for i in 0..counts.len() {
            if profile[i] + 1 < counts[i] {
                profile[i] += 1;
                for slot in profile.iter_mut().take(i) {
                    *slot = 0;
                }
                break;
            } else {
                profile[i] = 0;
            }
        }
    }
    perm
}

/// Right action on product profiles, the pullback in flat coordinates:
/// `(rho . g)_i(s_i) = rho_{g.i}(g.s_i)`. Commutes with `product_to_joint`.
pub fn act_on_profile(
    g: &GroupElement,
    space: &StrategySpace,
    profile: &ProductProfile,
) -> Result<ProductProfile> {
    let flat = profile.flatten();
    if flat.len() != space.total() {
        return Err(Error::Dimension(
            "profile shape differs from the action's game".to_string(),
        ));
    }
    let moved: Vec<Rat> = (0..flat.len())
        .map(|c| flat[g.apply_flat(c)].clone())
        .collect();
    let mut strategies = Vec::with_capacity(space.counts().len());
    let mut offset = 0;
    for &c in space.counts() {
        strategies.push(moved[offset..offset + c].to_vec());
        offset += c;
    }
    Ok(ProductProfile::from_parts_unchecked(strategies))
}

/// Group average of a joint distribution; the result is exactly invariant.
pub fn ave_joint(group: &GroupAction, dist: &JointDistribution) -> Result<JointDistribution> {
    let mut acc = vec![Rat::zero(); dist.probs().len()];
    for g in group.elements() {
        let moved = act_on_joint(g, group.space(), dist)?;
        for (a, p) in acc.iter_mut().zip(moved.probs()) {
            *a += p;
        }
    }
    let order = Rat::from_integer(group.order().into());
    for a in acc.iter_mut() {
        *a /= &order;
    }
    JointDistribution::with_shape(dist.shape().to_vec(), acc)
}

/// Group average of a product profile taken coordinate-wise in the flat
/// strategy space. Permutation averaging preserves each player's unit mass,
/// so the result is again a product profile, and it is exactly invariant.
pub fn ave_profile(group: &GroupAction, profile: &ProductProfile) -> Result<ProductProfile> {
    let space = group.space();
    let flat = profile.flatten();
    if flat.len() != space.total() {
        return Err(Error::Dimension(
            "profile shape differs from the action's game".to_string(),
        ));
    }
    let mut acc = vec![Rat::zero(); flat.len()];
    for g in group.elements() {
        for (c, a) in acc.iter_mut().enumerate() {
            *a += &flat[g.apply_flat(c)];
        }
    }
    let order = Rat::from_integer(group.order().into());
    for a in acc.iter_mut() {
        *a /= &order;
    }
    let mut strategies = Vec::with_capacity(space.counts().len());
    let mut offset = 0;
    for &c in space.counts() {
        strategies.push(acc[offset..offset + c].to_vec());
        offset += c;
    }
    Ok(ProductProfile::from_parts_unchecked(strategies))
}

/// The subgroup of elements fixing `player`, in the parent's element order.
pub fn stabilizer(group: &GroupAction, player: usize) -> GroupAction {
    let elements = group
        .elements()
        .iter()
        .filter(|g| g.apply_player(player) == player)
        .cloned()
        .collect();
    GroupAction {
        space: group.space().clone(),
        elements,
    }
}
