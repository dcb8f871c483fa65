//! Brute-force values by enumerating Player 0's positional strategies.

use num_rational::Rational64;

use super::karp::max_mean_all;
use super::MeanPayoffGame;
use crate::arena::{Player, VertexId};
use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// `min_σ` of the maximum mean cycle reachable in the σ-restricted graph,
/// over all positional strategies σ of Player 0.
pub fn mpg_oracle(game: &MeanPayoffGame, budget: u64) -> Result<Vec<Rational64>> {
    let arena = game.arena();
    let owned: Vec<VertexId> = (0..arena.len())
        .filter(|&v| arena.owner(v) == Player::Zero)
        .collect();
    let mut count: u64 = 1;
    for &v in &owned {
        count = count
            .checked_mul(arena.successors(v).len() as u64)
            .filter(|&c| c <= budget)
            .ok_or(Error::BudgetExceeded { budget })?;
    }
    let mut choice = vec![0usize; owned.len()];
    let mut moves: Vec<Option<VertexId>> = vec![None; arena.len()];
    let mut best: Vec<Option<Rational64>> = vec![None; arena.len()];
    loop {
        for (i, &v) in owned.iter().enumerate() {
            moves[v] = Some(arena.successors(v)[choice[i]]);
        }
        let vals = max_mean_all(&game.restrict(Player::Zero, &moves));
        for v in 0..arena.len() {
            let x = vals[v].expect("dead-end-free graphs always have a cycle");
            best[v] = Some(best[v].map_or(x, |b| b.min(x)));
        }
        // Next strategy in mixed radix.
        let mut i = 0;
        loop {
            if i == owned.len() {
                return Ok(best.into_iter().map(Option::unwrap).collect());
            }
            choice[i] += 1;
            if choice[i] < arena.successors(owned[i]).len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
