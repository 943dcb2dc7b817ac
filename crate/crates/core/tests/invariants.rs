//! Cross-module structural properties checked on the fixture games with
//! seeded randomization.

mod common;

use common::*;
use num::traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xeq_core::algebra::{
    contracted_power, lift_profile_to_power, power, power_action, DEFAULT_CELL_CAP,
};
use xeq_core::deviation::{column_value, deviation_action, DeviationSpace};
use xeq_core::dnn::{dnn_membership, DnnVerdict, DEFAULT_DNN_TOL};
use xeq_core::equilibria::{
    solve_ce, solve_xe, verify_ce, verify_ce_conditional, verify_nash, XeOptions,
};
use xeq_core::game::{best_responses, product_to_joint, Game, JointDistribution, ProductProfile};
use xeq_core::group::{ave_joint, GroupAction};
use xeq_core::json;
use xeq_core::lp::maximin;
use xeq_core::rational::{rat, ratio, Rat};

fn base_fixtures() -> Vec<(String, Game)> {
    vec![
        ("chicken".into(), chicken()),
        ("matching pennies".into(), matching_pennies()),
        ("asymmetric 2x2".into(), asymmetric()),
        ("duplicate-strategy 3x3".into(), duplicate_strategy_game()),
        ("two-parameter (1,2)".into(), two_parameter_game(1, 2)),
        ("cyclic n=3".into(), cyclic_game(3)),
    ]
}

#[test]
fn conditional_and_direct_ce_checks_agree_on_random_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, game) in base_fixtures() {
        for k in 0..100 {
            let d =
                JointDistribution::new(&game, random_distribution(&mut rng, game.profile_count()))
                    .unwrap();
            let direct = verify_ce(&game, &d).unwrap();
            let conditional = verify_ce_conditional(&game, &d).unwrap();
            assert_eq!(direct.verdict, conditional.verdict, "{name}, sample {k}");
        }
        // And on group averages of the samples, which are often on the
        // boundary of the polytope.
        let ce = solve_ce(&game, None).unwrap();
        assert_eq!(
            verify_ce(&game, &ce).unwrap().verdict,
            verify_ce_conditional(&game, &ce).unwrap().verdict
        );
    }
}

#[test]
fn solved_equilibria_pair_nonnegatively_with_every_deviation() {
    // A correlated equilibrium is exactly a maximizer strategy of the
    // deviation game guaranteeing payoff >= 0 against every column.
    for (name, game) in base_fixtures() {
        let ce = solve_ce(&game, None).unwrap();
        let zs = xeq_core::deviation::deviation_game(&game);
        for col in 0..zs.cols() {
            let value: Rat = (0..zs.rows())
                .map(|r| zs.entry(r, col) * &ce.probs()[r])
                .fold(Rat::zero(), |a, b| a + b);
            assert!(!value.is_negative(), "{name}, column {col}");
        }
    }
}

#[test]
fn deviation_actions_validate_on_every_fixture() {
    let mp = matching_pennies();
    let cases: Vec<(Game, GroupAction)> = vec![
        (chicken(), swap_group(&chicken())),
        (mp.clone(), mp_four_cycle_group(&mp)),
        (mp.clone(), mp_flip_group(&mp)),
        (
            duplicate_strategy_game(),
            swap_group(&duplicate_strategy_game()),
        ),
        (two_parameter_game(1, 2), swap_group(&two_parameter_game(1, 2))),
        (cyclic_game(3), cyclic_group(&cyclic_game(3))),
    ];
    for (game, group) in cases {
        let (gamma_game, action) = deviation_action(&game, &group).unwrap();
        assert!(xeq_core::group::validate_action(&gamma_game, &action).is_ok());
        let class = xeq_core::group::classify_action(&action);
        assert!(class.player_trivial);
    }
}

/// Direct conditional best-response check for the power game: every copy's
/// recommendation must be a best response in the base game to the
/// conditional distribution of the other players' same-copy
/// recommendations.
fn power_ce_by_conditionals(base: &Game, m: usize, dist: &JointDistribution) -> bool {
    let n = base.player_count();
    let counts = base.strategy_counts();
    for i in 0..n {
        for j in 0..m {
            // Strides of (player, copy) coordinates in the flat index.
            for r in 0..counts[i] {
                // Conditional over the other players' copy-j strategies given
                // X_i^j = r, accumulated by direct marginalization.
                let opp_len: usize = counts
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != i)
                    .map(|(_, &c)| c)
                    .product();
                let mut cond = vec![Rat::zero(); opp_len];
                let mut mass = Rat::zero();
                for (idx, p) in dist.probs().iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    // Decode (player, copy) digits.
                    let mut rem = idx;
                    let mut digits = vec![0usize; n * m];
                    for pl in 0..n {
                        for cp in 0..m {
                            digits[pl * m + cp] = rem % counts[pl];
                            rem /= counts[pl];
                        }
                    }
                    if digits[i * m + j] != r {
                        continue;
                    }
                    mass += p;
                    let mut o_idx = 0;
                    let mut stride = 1;
                    for pl in (0..n).filter(|&pl| pl != i) {
                        o_idx += digits[pl * m + j] * stride;
                        stride *= counts[pl];
                    }
                    cond[o_idx] += p;
                }
                if mass.is_zero() {
                    continue;
                }
                for c in cond.iter_mut() {
                    *c /= &mass;
                }
                let (_, set) = best_responses(base, i, &cond).unwrap();
                if !set.contains(&r) {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn power_equilibria_match_the_per_copy_conditional_characterization() {
    let mp = matching_pennies();
    let pw = power(&mp, 2, DEFAULT_CELL_CAP).unwrap();
    let trivial = GroupAction::trivial(&mp);
    let copy_action = power_action(&pw, &mp, &trivial).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut checked_both_verdicts = (false, false);
    for _ in 0..60 {
        let raw = JointDistribution::new(
            &pw.game,
            random_distribution(&mut rng, pw.game.profile_count()),
        )
        .unwrap();
        // Test invariant distributions (the characterization's setting).
        let d = ave_joint(&copy_action, &raw).unwrap();
        let direct = verify_ce(&pw.game, &d).unwrap().verdict;
        let conditional = power_ce_by_conditionals(&mp, 2, &d);
        assert_eq!(direct, conditional);
        if direct {
            checked_both_verdicts.0 = true;
        } else {
            checked_both_verdicts.1 = true;
        }
    }
    // The uniform distribution is an equilibrium of the power game, so both
    // verdicts occur across the sample set.
    let uniform = JointDistribution::uniform(&pw.game);
    assert!(verify_ce(&pw.game, &uniform).unwrap().verdict);
    assert!(power_ce_by_conditionals(&mp, 2, &uniform));
    assert!(
        checked_both_verdicts.1,
        "sampling never produced a violating distribution"
    );
}

#[test]
fn nash_of_power_products_holds_on_the_contracted_power() {
    // Prop-style chain on 2x2 fixtures with m = 2: an independent-lift Nash
    // point of the power game is Nash on the contracted power too.
    for (name, game) in [
        ("matching pennies", matching_pennies()),
        ("asymmetric", asymmetric()),
    ] {
        let pw = power(&game, 2, DEFAULT_CELL_CAP).unwrap();
        let ct = contracted_power(&game, 2, DEFAULT_CELL_CAP).unwrap();
        let ne = match name {
            "matching pennies" => ProductProfile::new(
                &game,
                vec![
                    vec![ratio(1, 2), ratio(1, 2)],
                    vec![ratio(1, 2), ratio(1, 2)],
                ],
            )
            .unwrap(),
            _ => ProductProfile::new(
                &game,
                vec![
                    vec![ratio(1, 4), ratio(3, 4)],
                    vec![ratio(1, 3), ratio(2, 3)],
                ],
            )
            .unwrap(),
        };
        let lifted_pw = lift_profile_to_power(&pw, &ne);
        assert!(
            verify_nash(&pw.game, &lifted_pw).unwrap().verdict,
            "{name} power"
        );
        let lifted_ct = lift_profile_to_power(&ct, &ne);
        assert!(
            verify_nash(&ct.game, &lifted_ct).unwrap().verdict,
            "{name} contracted"
        );
    }
}

#[test]
fn certificate_mixtures_of_symmetric_bimatrix_games_are_doubly_nonnegative() {
    // For swap-symmetric 2-player games with at most 4 strategies, every
    // certificate mixture is a mixture of symmetric outer products, hence
    // doubly nonnegative.
    for (name, game) in [
        ("chicken", chicken()),
        ("duplicate-strategy", duplicate_strategy_game()),
        ("two-parameter (1,2)", two_parameter_game(1, 2)),
    ] {
        let group = swap_group(&game);
        let solve = solve_xe(&game, &group, &XeOptions::default()).unwrap();
        assert!(solve.converged(), "{name}");
        let mixture = solve.certificate.mixture(&game).unwrap();
        let matrix = json::distribution_as_matrix(&game, &mixture).unwrap();
        let report = dnn_membership(&matrix, DEFAULT_DNN_TOL).unwrap();
        assert_ne!(report.verdict, DnnVerdict::NonMember, "{name}");
    }
}

#[test]
fn xe_and_good_set_views_coincide_on_matching_pennies() {
    // The uniform invariant product alone is a good set in the deviation
    // game of matching pennies: its restricted game already achieves the
    // full value 0.
    let mp = matching_pennies();
    let zs = xeq_core::deviation::deviation_game(&mp);
    let uniform = product_to_joint(&mp, &ProductProfile::uniform(&mp)).unwrap();
    assert!(xeq_core::lp::is_good_set_finite(&zs, &[uniform.probs().to_vec()]).unwrap());
    assert_eq!(maximin(&zs).value, rat(0));
}

#[test]
fn uniform_column_values_match_dense_pairing_on_fixtures() {
    // The closed-form column pairing used by the solvers agrees with the
    // dense matrix contraction on every fixture.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, game) in base_fixtures() {
        let zs = xeq_core::deviation::deviation_game(&game);
        let space = DeviationSpace::of_game(&game);
        for _ in 0..10 {
            let strategies: Vec<Vec<Rat>> = game
                .strategy_counts()
                .iter()
                .map(|&c| random_distribution(&mut rng, c))
                .collect();
            let profile = ProductProfile::new(&game, strategies).unwrap();
            let joint = product_to_joint(&game, &profile).unwrap();
            for d in space.iter() {
                let dense: Rat = (0..zs.rows())
                    .map(|r| zs.entry(r, space.index(d)) * &joint.probs()[r])
                    .fold(Rat::zero(), |a, b| a + b);
                assert_eq!(column_value(&game, &profile, d), dense, "{name}");
            }
        }
    }
}
