//! Mean-payoff games. Player 0 minimizes the limit superior of the average
//! edge weight, Player 1 maximizes the limit inferior.

mod energy;
mod karp;
mod oracle;
mod solve;

pub use energy::{solve_energy, EnergySolution};
pub use karp::{karp_max_mean, karp_min_mean, max_mean_all, max_mean_all_masked, WeightedDigraph};
pub use oracle::{mpg_oracle, DEFAULT_BUDGET};
pub use solve::{solve_mpg, MpgSolution};

use num_rational::Rational64;

use crate::arena::{Arena, Player, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanPayoffGame {
    arena: Arena,
    /// `weights[v][i]` belongs to the edge `v -> arena.successors(v)[i]`.
    weights: Vec<Vec<i64>>,
}

impl MeanPayoffGame {
    pub fn new(arena: Arena, weights: Vec<Vec<i64>>) -> Result<MeanPayoffGame> {
        if weights.len() != arena.len()
            || (0..arena.len()).any(|v| weights[v].len() != arena.successors(v).len())
        {
            return Err(Error::InvalidGame(
                "every edge needs exactly one weight".into(),
            ));
        }
        Ok(MeanPayoffGame { arena, weights })
    }

    pub fn from_fn(arena: Arena, weight: impl Fn(VertexId, VertexId) -> i64) -> MeanPayoffGame {
        let weights = (0..arena.len())
            .map(|u| arena.successors(u).iter().map(|&v| weight(u, v)).collect())
            .collect();
        MeanPayoffGame { arena, weights }
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<i64> {
        let i = self.arena.successors(u).binary_search(&v).ok()?;
        Some(self.weights[u][i])
    }

    /// Largest absolute edge weight.
    pub fn max_abs_weight(&self) -> i64 {
        self.weights
            .iter()
            .flatten()
            .map(|w| w.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn map_weights(&self, f: impl Fn(i64) -> i64) -> MeanPayoffGame {
        MeanPayoffGame {
            arena: self.arena.clone(),
            weights: self
                .weights
                .iter()
                .map(|ws| ws.iter().map(|&w| f(w)).collect())
                .collect(),
        }
    }

    /// The one-player graph left when `player` follows `moves` on its own
    /// vertices.
    pub fn restrict(&self, player: Player, moves: &[Option<VertexId>]) -> WeightedDigraph {
        let mut g = WeightedDigraph::new(self.arena.len());
        for u in 0..self.arena.len() {
            for (&v, &w) in self.arena.successors(u).iter().zip(&self.weights[u]) {
                if self.arena.owner(u) != player || moves[u] == Some(v) {
                    g.add_edge(u, v, w);
                }
            }
        }
        g
    }

    pub fn graph(&self) -> WeightedDigraph {
        let mut g = WeightedDigraph::new(self.arena.len());
        for u in 0..self.arena.len() {
            for (&v, &w) in self.arena.successors(u).iter().zip(&self.weights[u]) {
                g.add_edge(u, v, w);
            }
        }
        g
    }
}

/// Mean weight of the cycle of the lasso `prefix · cycle^ω`; the prefix
/// does not matter. Fails if a step is not an edge.
pub fn lasso_mean(g: &MeanPayoffGame, cycle: &[VertexId]) -> Result<Rational64> {
    if cycle.is_empty() {
        return Err(Error::InvalidLasso("empty cycle".into()));
    }
    let mut sum = 0i64;
    for i in 0..cycle.len() {
        let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        sum += g.weight(u, v).ok_or_else(|| {
            Error::InvalidLasso(format!(
                "no edge `{}` -> `{}`",
                g.arena.name(u),
                g.arena.name(v)
            ))
        })?;
    }
    Ok(Rational64::new(sum, cycle.len() as i64))
}
