//! Exact mean-payoff values through energy-game threshold queries.
//!
//! `ν(v) ≤ p/q` holds iff Player 0 wins the energy game with weights
//! `p − q·w`, and `ν(v) ≥ p/q` iff Player 1 wins the one with `q·w − p`.
//! Values are rationals with denominator at most `|V|`, located by integer
//! bisection followed by a galloping descent of the Stern–Brocot tree.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use num_rational::Rational64;

use super::energy::solve_energy;
use super::karp::max_mean_all;
use super::MeanPayoffGame;
use crate::arena::{Player, VertexId};
use crate::error::{Error, Result};

/// Values and optimal positional strategies. Each strategy is defined on
/// the vertices of its player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpgSolution {
    pub values: Vec<Rational64>,
    pub strategy_0: Vec<Option<VertexId>>,
    pub strategy_1: Vec<Option<VertexId>>,
}

struct Threshold {
    /// `ν(v)` compared with the threshold.
    cmp: Vec<Ordering>,
    moves_0: Vec<Option<VertexId>>,
    moves_1: Vec<Option<VertexId>>,
}

struct Search<'a> {
    game: &'a MeanPayoffGame,
    cache: HashMap<Rational64, Rc<Threshold>>,
}

impl<'a> Search<'a> {
    fn query(&mut self, t: Rational64) -> Result<Rc<Threshold>> {
        if let Some(hit) = self.cache.get(&t) {
            return Ok(hit.clone());
        }
        let (p, q) = (*t.numer(), *t.denom());
        let arena = self.game.arena();
        let at_most = solve_energy(
            arena,
            &self.game.map_weights(|w| p - q * w).weights,
            Player::Zero,
        );
        let at_least = solve_energy(
            arena,
            &self.game.map_weights(|w| q * w - p).weights,
            Player::One,
        );
        let cmp = (0..arena.len())
            .map(|v| match (at_most.wins(v), at_least.wins(v)) {
                (true, true) => Ok(Ordering::Equal),
                (true, false) => Ok(Ordering::Less),
                (false, true) => Ok(Ordering::Greater),
                (false, false) => Err(Error::Unverified(format!(
                    "threshold {t} is decided by neither player at `{}`",
                    arena.name(v)
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        let entry = Rc::new(Threshold {
            cmp,
            moves_0: at_most.moves,
            moves_1: at_least.moves,
        });
        self.cache.insert(t, entry.clone());
        Ok(entry)
    }

    fn compare(&mut self, v: VertexId, t: Rational64) -> Result<Ordering> {
        Ok(self.query(t)?.cmp[v])
    }

    fn value(&mut self, v: VertexId) -> Result<Rational64> {
        // Every value lies between the smallest and the largest weight.
        let ws = || self.game.weights().iter().flatten().copied();
        let (mut lo, mut hi) = (ws().min().unwrap_or(0), ws().max().unwrap_or(0));
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match self.compare(v, mid.into())? {
                Ordering::Equal => return Ok(mid.into()),
                Ordering::Less => hi = mid,
                Ordering::Greater => lo = mid,
            }
        }
        for z in [lo, hi] {
            if self.compare(v, z.into())? == Ordering::Equal {
                return Ok(z.into());
            }
        }
        self.stern_brocot(v, (lo, 1), (hi, 1))
    }

    /// Descends from the open interval `(a/b, c/d)` of Farey neighbours.
    fn stern_brocot(
        &mut self,
        v: VertexId,
        (mut a, mut b): (i64, i64),
        (mut c, mut d): (i64, i64),
    ) -> Result<Rational64> {
        let max_den = self.game.arena().len() as i64;
        loop {
            if b + d > max_den {
                return Err(Error::Unverified(format!(
                    "no candidate value between {a}/{b} and {c}/{d} at `{}`",
                    self.game.arena().name(v)
                )));
            }
            let mediant = Rational64::new(a + c, b + d);
            match self.compare(v, mediant)? {
                Ordering::Equal => return Ok(mediant),
                Ordering::Less => {
                    // ν < (c + k·a)/(d + k·b) for k = 1; find the largest such k.
                    let cand = |k: i64| (c + k * a, d + k * b);
                    let k = self.gallop(v, cand, (max_den - d) / b, Ordering::Less)?;
                    match k {
                        Gallop::Hit(r) => return Ok(r),
                        Gallop::Run(k) => (c, d) = cand(k),
                    }
                }
                Ordering::Greater => {
                    let cand = |k: i64| (a + k * c, b + k * d);
                    let k = self.gallop(v, cand, (max_den - b) / d, Ordering::Greater)?;
                    match k {
                        Gallop::Hit(r) => return Ok(r),
                        Gallop::Run(k) => (a, b) = cand(k),
                    }
                }
            }
        }
    }

    /// Largest `k ≤ k_max` with `ν` on side `dir` of `cand(k)`, given that
    /// this holds for `k = 1`.
    fn gallop(
        &mut self,
        v: VertexId,
        cand: impl Fn(i64) -> (i64, i64),
        k_max: i64,
        dir: Ordering,
    ) -> Result<Gallop> {
        let probe = |this: &mut Self, k: i64| -> Result<Option<bool>> {
            let (n, d) = cand(k);
            let r = Rational64::new(n, d);
            let o = this.compare(v, r)?;
            Ok(if o == Ordering::Equal {
                None
            } else {
                Some(o == dir)
            })
        };
        let (mut good, mut bad) = (1i64, k_max + 1);
        let mut k = 2;
        while k <= k_max {
            match probe(self, k)? {
                None => return Ok(Gallop::Hit(ratio(cand(k)))),
                Some(true) => good = k,
                Some(false) => {
                    bad = k;
                    break;
                }
            }
            k *= 2;
        }
        while bad - good > 1 {
            let mid = good + (bad - good) / 2;
            match probe(self, mid)? {
                None => return Ok(Gallop::Hit(ratio(cand(mid)))),
                Some(true) => good = mid,
                Some(false) => bad = mid,
            }
        }
        Ok(Gallop::Run(good))
    }
}

enum Gallop {
    Hit(Rational64),
    Run(i64),
}

fn ratio((n, d): (i64, i64)) -> Rational64 {
    Rational64::new(n, d)
}

/// Solves the game exactly and checks the result: fixing either strategy
/// and evaluating the remaining one-player graph must reproduce the values.
pub fn solve_mpg(game: &MeanPayoffGame) -> Result<MpgSolution> {
    let n = game.arena().len();
    let mut search = Search {
        game,
        cache: HashMap::new(),
    };
    let mut values = Vec::with_capacity(n);
    for v in 0..n {
        values.push(search.value(v)?);
    }
    let mut strategy_0 = vec![None; n];
    let mut strategy_1 = vec![None; n];
    for v in 0..n {
        let t = search.query(values[v])?;
        match game.arena().owner(v) {
            Player::Zero => strategy_0[v] = t.moves_0[v],
            Player::One => strategy_1[v] = t.moves_1[v],
        }
    }
    let mut sol = MpgSolution {
        values,
        strategy_0,
        strategy_1,
    };
    if !verify(game, &sol, Player::Zero) {
        repair(game, &mut sol, Player::Zero)?;
    }
    if !verify(game, &sol, Player::One) {
        repair(game, &mut sol, Player::One)?;
    }
    Ok(sol)
}

/// Values of the one-player graph left by fixing `player`'s strategy, from
/// that player's point of view.
fn restricted_values(
    game: &MeanPayoffGame,
    sol: &MpgSolution,
    player: Player,
) -> Vec<Option<Rational64>> {
    match player {
        Player::Zero => max_mean_all(&game.restrict(Player::Zero, &sol.strategy_0)),
        Player::One => max_mean_all(&game.restrict(Player::One, &sol.strategy_1).negated())
            .into_iter()
            .map(|x| x.map(|r| -r))
            .collect(),
    }
}

fn verify(game: &MeanPayoffGame, sol: &MpgSolution, player: Player) -> bool {
    let got = restricted_values(game, sol, player);
    (0..sol.values.len()).all(|v| got[v] == Some(sol.values[v]))
}

/// Local edge fixing: at each of `player`'s vertices whose restricted value
/// is off, move to the next successor that keeps the value class, until
/// the check passes or every candidate has been tried.
fn repair(game: &MeanPayoffGame, sol: &mut MpgSolution, player: Player) -> Result<()> {
    let arena = game.arena();
    let n = arena.len();
    let keeps = |u: VertexId, v: VertexId| match player {
        Player::Zero => sol.values[v] <= sol.values[u],
        Player::One => sol.values[v] >= sol.values[u],
    };
    let candidates: Vec<Vec<VertexId>> = (0..n)
        .map(|u| {
            if arena.owner(u) != player {
                return Vec::new();
            }
            arena
                .successors(u)
                .iter()
                .copied()
                .filter(|&v| keeps(u, v))
                .collect()
        })
        .collect();
    let max_rounds = candidates.iter().map(Vec::len).sum::<usize>() + 1;
    for _ in 0..max_rounds {
        let got = restricted_values(game, sol, player);
        let bad: Vec<VertexId> = (0..n)
            .filter(|&u| arena.owner(u) == player && got[u] != Some(sol.values[u]))
            .collect();
        if bad.is_empty() && verify(game, sol, player) {
            return Ok(());
        }
        if bad.is_empty() {
            break;
        }
        let moves = match player {
            Player::Zero => &mut sol.strategy_0,
            Player::One => &mut sol.strategy_1,
        };
        for u in bad {
            let list = &candidates[u];
            if list.is_empty() {
                continue;
            }
            let next = match moves[u].and_then(|m| list.iter().position(|&x| x == m)) {
                Some(i) => list[(i + 1) % list.len()],
                None => list[0],
            };
            moves[u] = Some(next);
        }
    }
    Err(Error::Unverified(format!(
        "strategy of player {player} does not reproduce the computed values"
    )))
}
