//! Fixture games and groups shared by the integration suites.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use xeq_core::game::{Game, JointDistribution};
use xeq_core::group::{close_group, GroupAction, GroupElement, StrategySpace};
use xeq_core::rational::{rat, ratio, Rat};

/// Chicken: A = [[4,1],[5,0]], B = A^T.
pub fn chicken() -> Game {
    let a = vec![vec![rat(4), rat(1)], vec![rat(5), rat(0)]];
    let b = vec![vec![rat(4), rat(5)], vec![rat(1), rat(0)]];
    Game::bimatrix(a, b).unwrap()
}

/// Matching pennies with strategy labels H, T.
pub fn matching_pennies() -> Game {
    let a = vec![vec![rat(1), rat(-1)], vec![rat(-1), rat(1)]];
    let b = vec![vec![rat(-1), rat(1)], vec![rat(1), rat(-1)]];
    let g = Game::bimatrix(a, b).unwrap();
    Game::with_names(
        g.strategy_counts().to_vec(),
        Some(vec![
            vec!["H".into(), "T".into()],
            vec!["H".into(), "T".into()],
        ]),
        vec![g.utilities(0).to_vec(), g.utilities(1).to_vec()],
    )
    .unwrap()
}

/// The 2x2 game with a unique mixed equilibrium p=(1/4,3/4), q=(1/3,2/3).
pub fn asymmetric() -> Game {
    let a = vec![vec![rat(0), rat(2)], vec![rat(2), rat(1)]];
    let b = vec![vec![rat(3), rat(0)], vec![rat(0), rat(1)]];
    Game::bimatrix(a, b).unwrap()
}

/// The 3x3 symmetric bimatrix game A = B^T = [[1,1,1],[1,1,1],[0,0,2]]
/// whose first two strategies are payoff equivalent, labeled a, b, c.
pub fn duplicate_strategy_game() -> Game {
    let a = vec![
        vec![rat(1), rat(1), rat(1)],
        vec![rat(1), rat(1), rat(1)],
        vec![rat(0), rat(0), rat(2)],
    ];
    let b = vec![
        vec![rat(1), rat(1), rat(0)],
        vec![rat(1), rat(1), rat(0)],
        vec![rat(1), rat(1), rat(2)],
    ];
    let g = Game::bimatrix(a, b).unwrap();
    Game::with_names(
        g.strategy_counts().to_vec(),
        Some(vec![
            vec!["a".into(), "b".into(), "c".into()],
            vec!["a".into(), "b".into(), "c".into()],
        ]),
        vec![g.utilities(0).to_vec(), g.utilities(1).to_vec()],
    )
    .unwrap()
}

/// The 2x2 symmetric bimatrix game with payoffs (r,r),(s,0)/(0,s),(0,0).
pub fn two_parameter_game(r: i64, s: i64) -> Game {
    let a = vec![vec![rat(r), rat(s)], vec![rat(0), rat(0)]];
    let b = vec![vec![rat(r), rat(0)], vec![rat(s), rat(0)]];
    Game::bimatrix(a, b).unwrap()
}

/// The n-player cyclic game: u_i = 1 when s_i = s_{i-1} + 1 (indices and
/// strategies mod n).
pub fn cyclic_game(n: usize) -> Game {
    let counts = vec![n; n];
    let profile_count = n.pow(n as u32);
    let mut utilities = vec![vec![rat(0); profile_count]; n];
    let mut profile = vec![0usize; n];
    for idx in 0..profile_count {
        {
            let mut rem = idx;
            for slot in profile.iter_mut() {
                *slot = rem % n;
                rem /= n;
            }
        }
        for i in 0..n {
            let prev = profile[(i + n - 1) % n];
            if profile[i] == (prev + 1) % n {
                utilities[i][idx] = rat(1);
            }
        }
    }
    Game::new(counts, utilities).unwrap()
}

/// The player swap on a two-player game with equal strategy counts.
pub fn swap_group(game: &Game) -> GroupAction {
    let space = StrategySpace::of_game(game);
    let c = game.strategy_counts()[0];
    let mut pairs = Vec::new();
    for s in 0..c {
        pairs.push(((0, s), (1, s)));
        pairs.push(((1, s), (0, s)));
    }
    close_group(game, &[GroupElement::from_pairs(&space, &pairs).unwrap()]).unwrap()
}

/// The order-4 group generated by the cycle H1 -> H2 -> T1 -> T2 on
/// matching pennies.
pub fn mp_four_cycle_group(mp: &Game) -> GroupAction {
    let space = StrategySpace::of_game(mp);
    let h = GroupElement::from_pairs(
        &space,
        &[
            ((0, 0), (1, 0)),
            ((1, 0), (0, 1)),
            ((0, 1), (1, 1)),
            ((1, 1), (0, 0)),
        ],
    )
    .unwrap();
    close_group(mp, &[h]).unwrap()
}

/// The player-trivial order-2 group flipping heads and tails.
pub fn mp_flip_group(mp: &Game) -> GroupAction {
    let space = StrategySpace::of_game(mp);
    let g = GroupElement::from_pairs(
        &space,
        &[
            ((0, 0), (0, 1)),
            ((0, 1), (0, 0)),
            ((1, 0), (1, 1)),
            ((1, 1), (1, 0)),
        ],
    )
    .unwrap();
    close_group(mp, &[g]).unwrap()
}

/// The strategy-increment and player-rotation generators of the cyclic game.
pub fn cyclic_group(game: &Game) -> GroupAction {
    let n = game.player_count();
    let space = StrategySpace::of_game(game);
    let mut increment = Vec::new();
    let mut rotate = Vec::new();
    for i in 0..n {
        for s in 0..n {
            increment.push(((i, s), (i, (s + 1) % n)));
            rotate.push(((i, s), ((i + 1) % n, s)));
        }
    }
    let g = GroupElement::from_pairs(&space, &increment).unwrap();
    let h = GroupElement::from_pairs(&space, &rotate).unwrap();
    close_group(game, &[g, h]).unwrap()
}

/// W1 = (1/4)[[1,0,1],[0,0,0],[1,0,1]] on the duplicate-strategy game.
pub fn w1(game: &Game) -> JointDistribution {
    distribution_from_square(
        game,
        &[
            [ratio(1, 4), rat(0), ratio(1, 4)],
            [rat(0), rat(0), rat(0)],
            [ratio(1, 4), rat(0), ratio(1, 4)],
        ],
    )
}

/// W2 = (1/4)[[1,0,0],[0,0,1],[0,1,1]]: one mass moved between payoff
/// equivalent strategies, and no longer an equilibrium.
pub fn w2(game: &Game) -> JointDistribution {
    distribution_from_square(
        game,
        &[
            [ratio(1, 4), rat(0), rat(0)],
            [rat(0), rat(0), ratio(1, 4)],
            [rat(0), ratio(1, 4), ratio(1, 4)],
        ],
    )
}

pub fn distribution_from_square(game: &Game, m: &[[Rat; 3]; 3]) -> JointDistribution {
    let mut probs = vec![rat(0); 9];
    for (r, row) in m.iter().enumerate() {
        for (c, p) in row.iter().enumerate() {
            probs[game.profile_index(&[r, c])] = p.clone();
        }
    }
    JointDistribution::new(game, probs).unwrap()
}

/// The anti-diagonal half/half distribution on chicken.
pub fn chicken_anti_diagonal(game: &Game) -> JointDistribution {
    let mut probs = vec![rat(0); 4];
    probs[game.profile_index(&[0, 1])] = ratio(1, 2);
    probs[game.profile_index(&[1, 0])] = ratio(1, 2);
    JointDistribution::new(game, probs).unwrap()
}

/// Deterministic rational vector of the given length: nonnegative entries
/// summing to exactly one, numerators drawn from the rng.
pub fn random_distribution(rng: &mut impl rand::Rng, len: usize) -> Vec<Rat> {
    loop {
        let nums: Vec<i64> = (0..len).map(|_| rng.gen_range(0..30)).collect();
        let total: i64 = nums.iter().sum();
        if total == 0 {
            continue;
        }
        return nums.into_iter().map(|n| ratio(n, total)).collect();
    }
}
