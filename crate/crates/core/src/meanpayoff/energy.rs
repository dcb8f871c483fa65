//! Energy games solved with small progress measures.
//!
//! The energy player wins from `v` if some finite initial credit keeps the
//! running sum of weights nonnegative forever. The least progress measure
//! is the minimal such credit, or `None` (top) where it does not exist.

use std::collections::VecDeque;

use crate::arena::{Arena, Player, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergySolution {
    /// Minimal initial credit, `None` where the energy player loses.
    pub credit: Vec<Option<u64>>,
    /// Energy player's moves on its own vertices with finite credit.
    pub moves: Vec<Option<VertexId>>,
}

impl EnergySolution {
    pub fn wins(&self, v: VertexId) -> bool {
        self.credit[v].is_some()
    }
}

/// `weights[v][i]` is the weight of the edge to `arena.successors(v)[i]`.
pub fn solve_energy(arena: &Arena, weights: &[Vec<i64>], player: Player) -> EnergySolution {
    let n = arena.len();
    let bound: u64 = weights
        .iter()
        .map(|ws| ws.iter().map(|&w| (-w).max(0) as u64).max().unwrap_or(0))
        .sum();
    const TOP: u64 = u64::MAX;
    let lift = |x: u64, w: i64| -> u64 {
        if x == TOP {
            return TOP;
        }
        let y = x as i128 - w as i128;
        if y <= 0 {
            0
        } else if y as u128 > bound as u128 {
            TOP
        } else {
            y as u64
        }
    };
    let mut f = vec![0u64; n];
    let value_at = |f: &[u64], v: VertexId| -> u64 {
        let options = arena
            .successors(v)
            .iter()
            .zip(&weights[v])
            .map(|(&u, &w)| lift(f[u], w));
        if arena.owner(v) == player {
            options.min().unwrap()
        } else {
            options.max().unwrap()
        }
    };
    let mut queued = vec![true; n];
    let mut queue: VecDeque<VertexId> = (0..n).collect();
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        if f[v] == TOP {
            continue;
        }
        let new = value_at(&f, v);
        if new > f[v] {
            f[v] = new;
            for &u in arena.predecessors(v) {
                if !queued[u] && f[u] != TOP {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let moves = (0..n)
        .map(|v| {
            if arena.owner(v) != player || f[v] == TOP {
                return None;
            }
            arena
                .successors(v)
                .iter()
                .zip(&weights[v])
                .find(|&(&u, &w)| lift(f[u], w) <= f[v])
                .map(|(&u, _)| u)
        })
        .collect();
    EnergySolution {
        credit: f.into_iter().map(|x| (x != TOP).then_some(x)).collect(),
        moves,
    }
}
