mod common;

use num_rational::Rational64;
use proptest::prelude::*;

use rrsynth_core::meanpayoff::{
    karp_max_mean, max_mean_all, mpg_oracle, solve_mpg, MeanPayoffGame, DEFAULT_BUDGET,
};
use rrsynth_core::Player;

fn restricted_min(g: &MeanPayoffGame, moves: &[Option<usize>]) -> Vec<Rational64> {
    max_mean_all(&g.restrict(Player::One, moves).negated())
        .into_iter()
        .map(|x| -x.unwrap())
        .collect()
}

fn restricted_max(g: &MeanPayoffGame, moves: &[Option<usize>]) -> Vec<Rational64> {
    max_mean_all(&g.restrict(Player::Zero, moves))
        .into_iter()
        .map(Option::unwrap)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn solver_matches_enumeration(seed in any::<u64>(), n in 1usize..=6, w in 0i64..=10) {
        let g = common::random_mpg(&mut common::rng(seed), n, w);
        let sol = solve_mpg(&g).unwrap();
        prop_assert_eq!(&sol.values, &mpg_oracle(&g, DEFAULT_BUDGET).unwrap());
        prop_assert_eq!(restricted_max(&g, &sol.strategy_0), sol.values.clone());
        prop_assert_eq!(restricted_min(&g, &sol.strategy_1), sol.values.clone());
        for v in &sol.values {
            prop_assert!(*v >= Rational64::from_integer(-w) && *v <= Rational64::from_integer(w));
        }
    }

    #[test]
    fn shift_and_scale(seed in any::<u64>(), n in 1usize..=6, c in -5i64..=5, m in 1i64..=7) {
        let g = common::random_mpg(&mut common::rng(seed), n, 10);
        let base = solve_mpg(&g).unwrap();
        let shifted = solve_mpg(&g.map_weights(|x| x + c)).unwrap();
        let scaled = solve_mpg(&g.map_weights(|x| x * m)).unwrap();
        for v in 0..n {
            prop_assert_eq!(shifted.values[v], base.values[v] + c);
            prop_assert_eq!(scaled.values[v], base.values[v] * m);
        }
        // The base strategies stay optimal after a shift.
        let h = g.map_weights(|x| x + c);
        prop_assert_eq!(restricted_max(&h, &base.strategy_0), shifted.values.clone());
        prop_assert_eq!(restricted_min(&h, &base.strategy_1), shifted.values);
    }

    #[test]
    fn one_player_games_are_cycle_means(seed in any::<u64>(), n in 1usize..=7) {
        let g = common::random_mpg(&mut common::rng(seed), n, 10);
        let all_one = g.arena().vertices().iter().all(|x| x.owner == Player::One);
        let sol = solve_mpg(&g).unwrap();
        if all_one {
            for v in 0..n {
                prop_assert_eq!(Some(sol.values[v]), karp_max_mean(&g.graph(), v));
            }
        }
    }
}

#[test]
fn oracle_budget_is_enforced() {
    let g = common::random_mpg(&mut common::rng(7), 6, 3);
    let branching: u64 = (0..6)
        .filter(|&v| g.arena().owner(v) == Player::Zero)
        .map(|v| g.arena().successors(v).len() as u64)
        .product();
    if branching > 1 {
        assert!(mpg_oracle(&g, branching - 1).is_err());
    }
    assert!(mpg_oracle(&g, branching).is_ok());
}
