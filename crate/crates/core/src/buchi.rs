//! Attractors, Büchi games and the request-response to Büchi reduction.

use std::collections::VecDeque;

use num_bigint::BigUint;

use crate::arena::{
    product, Arena, FiniteStateStrategy, MemoryStructure, Player, StateId, VertexId,
    DEFAULT_SIZE_LIMIT,
};
use crate::error::{Error, Result};
use crate::rr::RrGame;

/// Result of an attractor computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attractor {
    pub set: Vec<bool>,
    /// Distance to the target in attractor layers; `None` outside the set.
    pub rank: Vec<Option<usize>>,
    /// For the attracting player's vertices outside the target: the
    /// lowest-indexed successor of strictly smaller rank.
    pub moves: Vec<Option<VertexId>>,
}

/// The `player`-attractor of `target`, optionally inside the subgame
/// induced by `within` (edges leaving it are ignored).
pub fn attractor(
    arena: &Arena,
    target: &[bool],
    player: Player,
    within: Option<&[bool]>,
) -> Attractor {
    let n = arena.len();
    let inside = |v: VertexId| within.is_none_or(|w| w[v]);
    let mut rank: Vec<Option<usize>> = vec![None; n];
    let mut missing: Vec<usize> = (0..n)
        .map(|v| arena.successors(v).iter().filter(|&&u| inside(u)).count())
        .collect();
    let mut queue = VecDeque::new();
    for v in (0..n).filter(|&v| target[v] && inside(v)) {
        rank[v] = Some(0);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        let r = rank[v].unwrap();
        for &u in arena.predecessors(v) {
            if !inside(u) || rank[u].is_some() {
                continue;
            }
            missing[u] -= 1;
            if arena.owner(u) == player || missing[u] == 0 {
                rank[u] = Some(r + 1);
                queue.push_back(u);
            }
        }
    }
    let moves = (0..n)
        .map(|v| match rank[v] {
            Some(r) if r > 0 && arena.owner(v) == player => arena
                .successors(v)
                .iter()
                .copied()
                .find(|&u| inside(u) && rank[u].is_some_and(|ru| ru < r)),
            _ => None,
        })
        .collect();
    Attractor {
        set: rank.iter().map(Option::is_some).collect(),
        rank,
        moves,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiGame {
    pub arena: Arena,
    pub accepting: Vec<bool>,
}

/// Winning regions and positional strategies, each defined on the owner's
/// vertices inside the owner's region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub winning_0: Vec<bool>,
    pub winning_1: Vec<bool>,
    pub strategy_0: Vec<Option<VertexId>>,
    pub strategy_1: Vec<Option<VertexId>>,
}

impl SolveResult {
    pub fn region(&self, player: Player) -> &[bool] {
        match player {
            Player::Zero => &self.winning_0,
            Player::One => &self.winning_1,
        }
    }
}

pub fn solve_buchi(game: &BuchiGame) -> SolveResult {
    let arena = &game.arena;
    let n = arena.len();
    let mut alive = vec![true; n];
    let mut strategy_1: Vec<Option<VertexId>> = vec![None; n];
    let mut winning_1 = vec![false; n];
    loop {
        let target: Vec<bool> = (0..n).map(|v| alive[v] && game.accepting[v]).collect();
        let reach = attractor(arena, &target, Player::Zero, Some(&alive));
        let trap: Vec<bool> = (0..n).map(|v| alive[v] && !reach.set[v]).collect();
        if !trap.contains(&true) {
            let mut strategy_0 = reach.moves;
            for v in (0..n).filter(|&v| alive[v] && arena.owner(v) == Player::Zero) {
                if strategy_0[v].is_none() {
                    strategy_0[v] = arena.successors(v).iter().copied().find(|&u| alive[u]);
                }
            }
            return SolveResult {
                winning_0: alive,
                winning_1,
                strategy_0,
                strategy_1,
            };
        }
        let escape = attractor(arena, &trap, Player::One, Some(&alive));
        for v in (0..n).filter(|&v| escape.set[v]) {
            if arena.owner(v) == Player::One {
                strategy_1[v] = if trap[v] {
                    arena.successors(v).iter().copied().find(|&u| trap[u])
                } else {
                    escape.moves[v]
                };
            }
            winning_1[v] = true;
        }
        for v in (0..n).filter(|&v| escape.set[v]) {
            alive[v] = false;
        }
    }
}

/// Memory for the request-response to Büchi reduction. States are triples
/// `(R, c, f)`: open requests, a cyclic counter over the conditions and a
/// flag raised whenever the counter moves. Games with fewer than two
/// conditions are padded with empty ones.
#[derive(Clone, Debug)]
pub struct RrBuchiMemory {
    pub memory: MemoryStructure,
    pub conditions: usize,
}

impl RrBuchiMemory {
    pub fn encode(&self, open: usize, counter: usize, flag: bool) -> StateId {
        (open * self.conditions + counter) * 2 + usize::from(flag)
    }

    /// `(open-set bitmask, 0-based counter, flag)`
    pub fn decode(&self, m: StateId) -> (usize, usize, bool) {
        (
            m / 2 / self.conditions,
            (m / 2) % self.conditions,
            m % 2 == 1,
        )
    }
}

const MAX_BUCHI_CONDITIONS: usize = 20;

pub fn rr_buchi_memory(game: &RrGame) -> Result<RrBuchiMemory> {
    let k = game.k().max(2);
    if k > MAX_BUCHI_CONDITIONS {
        return Err(Error::SizeLimit {
            what: "reduction memory".into(),
            needed: (k as u128) << (k + 1),
            limit: (MAX_BUCHI_CONDITIONS as u128) << (MAX_BUCHI_CONDITIONS + 1),
        });
    }
    let n = game.s();
    let bits = |select: &dyn Fn(usize) -> bool| -> usize {
        (0..game.k())
            .filter(|&j| select(j))
            .fold(0, |acc, j| acc | (1 << j))
    };
    let conds = game.conditions();
    let requested: Vec<usize> = (0..n).map(|v| bits(&|j| conds[j].request[v])).collect();
    let answered: Vec<usize> = (0..n).map(|v| bits(&|j| conds[j].response[v])).collect();
    let mut labels = Vec::with_capacity(k << (k + 1));
    for open in 0..1usize << k {
        let set: Vec<String> = (0..k)
            .filter(|j| open >> j & 1 == 1)
            .map(|j| (j + 1).to_string())
            .collect();
        for c in 0..k {
            for f in 0..2 {
                labels.push(format!("{{{}}}|{}|{f}", set.join(","), c + 1));
            }
        }
    }
    let enc = move |open: usize, c: usize, f: bool| (open * k + c) * 2 + usize::from(f);
    let memory = MemoryStructure::new(
        labels,
        n,
        |v| enc(requested[v] & !answered[v], 0, false),
        |m, v| {
            let (open, c) = (m / 2 / k, (m / 2) % k);
            let next = (open | requested[v]) & !answered[v];
            let kept = open & next;
            let c2 = if kept >> c & 1 == 1 { c } else { (c + 1) % k };
            enc(next, c2, c2 != c)
        },
    );
    Ok(RrBuchiMemory {
        memory,
        conditions: k,
    })
}

/// Winning regions of a request-response game with finite-state strategies
/// for both players over the reduction memory.
#[derive(Clone, Debug)]
pub struct RrSolution {
    pub winning_0: Vec<bool>,
    pub winning_1: Vec<bool>,
    pub strategy_0: FiniteStateStrategy,
    pub strategy_1: FiniteStateStrategy,
}

impl RrSolution {
    pub fn region(&self, player: Player) -> &[bool] {
        match player {
            Player::Zero => &self.winning_0,
            Player::One => &self.winning_1,
        }
    }
}

pub fn solve_rr(game: &RrGame) -> Result<RrSolution> {
    solve_rr_with_limit(game, DEFAULT_SIZE_LIMIT)
}

/// The Büchi game on the product of the arena with the reduction memory.
/// Product vertex `(v, m)` has id `v * |M| + m`; it is accepting when the
/// counter just moved.
pub fn rr_to_buchi(game: &RrGame, limit: usize) -> Result<(BuchiGame, RrBuchiMemory)> {
    let reduction = rr_buchi_memory(game)?;
    let prod = product(game.arena(), &reduction.memory, limit)?;
    let accepting = (0..prod.arena.len())
        .map(|x| prod.split(x).1 % 2 == 1)
        .collect();
    Ok((
        BuchiGame {
            arena: prod.arena,
            accepting,
        },
        reduction,
    ))
}

pub fn solve_rr_with_limit(game: &RrGame, limit: usize) -> Result<RrSolution> {
    let arena = game.arena();
    let (buchi, reduction) = rr_to_buchi(game, limit)?;
    let mem = &reduction.memory;
    let size = mem.size();
    let solved = solve_buchi(&buchi);
    let n = arena.len();
    let winning_0: Vec<bool> = (0..n)
        .map(|v| solved.winning_0[v * size + mem.init(v)])
        .collect();
    let winning_1 = winning_0.iter().map(|w| !w).collect();
    let lift = |player: Player, moves: &[Option<VertexId>]| {
        FiniteStateStrategy::new(arena, player, mem.clone(), |v, m| {
            moves[v * size + m]
                .map(|x| x / size)
                .unwrap_or(arena.successors(v)[0])
        })
    };
    Ok(RrSolution {
        winning_0,
        winning_1,
        strategy_0: lift(Player::Zero, &solved.strategy_0)?,
        strategy_1: lift(Player::One, &solved.strategy_1)?,
    })
}

/// `Σ_j f_j(s·k·2^k)`: an upper bound on the value of some winning strategy
/// from every vertex of Player 0's winning region.
pub fn value_bound(game: &RrGame) -> BigUint {
    let k = game.k();
    if k == 0 {
        return BigUint::default();
    }
    let arg = BigUint::from(game.s()) * k * (BigUint::from(1u8) << k);
    game.penalties().iter().map(|f| f.eval_big(&arg)).sum()
}
