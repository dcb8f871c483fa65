//! Optimal strategies through the capped waiting-vector mean-payoff game.
//!
//! The memory tracks waiting vectors up to per-condition caps and falls into
//! an absorbing sink once a cap is exceeded. Edges leaving a state weigh the
//! penalty of its waiting vector; sink edges weigh one more than the largest
//! penalty, so a play that hits the sink is worse than every other.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::arena::{
    Arena, FiniteStateStrategy, MemoryStructure, Player, StateId, Vertex, VertexId,
    DEFAULT_SIZE_LIMIT,
};
use crate::bounds::synthesis_thresholds;
use crate::error::{Error, Result};
use crate::meanpayoff::{karp_max_mean, max_mean_all, solve_mpg, MeanPayoffGame, WeightedDigraph};
use crate::rr::{
    penalty_of, step_capped_slice, waiting_step, CappedWaiting, RrGame, ValueResult, WaitingVector,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// The thresholds that guarantee unconditional optimality.
    Theoretical,
    /// Caps chosen by the caller.
    User,
    /// Caps lowered to keep the product within the size limit.
    SizeLimited,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Theoretical => "theoretical",
            Provenance::User => "user",
            Provenance::SizeLimited => "size-limited",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Thresholds {
    pub caps: Vec<u64>,
    pub provenance: Provenance,
}

impl Thresholds {
    pub fn user(caps: Vec<u64>) -> Result<Thresholds> {
        if caps.contains(&0) {
            return Err(Error::BadParams("caps must be at least 1".into()));
        }
        Ok(Thresholds {
            caps,
            provenance: Provenance::User,
        })
    }

    pub fn uniform(k: usize, cap: u64) -> Result<Thresholds> {
        Thresholds::user(vec![cap; k])
    }

    /// The exact synthesis thresholds; fails if one does not fit in 64 bits.
    pub fn theoretical(game: &RrGame) -> Result<Thresholds> {
        let caps = synthesis_thresholds(game)?
            .iter()
            .map(|t| {
                t.to_u64().ok_or_else(|| Error::SizeLimit {
                    what: "synthesis threshold".into(),
                    needed: t.to_u128().unwrap_or(u128::MAX),
                    limit: u64::MAX as u128,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Thresholds {
            caps,
            provenance: Provenance::Theoretical,
        })
    }

    /// `min(theoretical, requested, largest uniform cap within the limit)`
    /// per condition, labelled by whichever bound decided.
    pub fn resolve(game: &RrGame, requested: Option<&[u64]>, limit: usize) -> Result<Thresholds> {
        if let Some(r) = requested {
            if r.len() != game.k() {
                return Err(Error::BadParams(format!(
                    "{} caps given for {} conditions",
                    r.len(),
                    game.k()
                )));
            }
            Thresholds::user(r.to_vec())?;
        }
        let theory: Vec<BigUint> = synthesis_thresholds(game)?;
        let mut caps: Vec<u64> = theory
            .iter()
            .map(|t| t.to_u64().unwrap_or(u64::MAX))
            .collect();
        let mut provenance = Provenance::Theoretical;
        if let Some(r) = requested {
            for (c, &u) in caps.iter_mut().zip(r) {
                if u < *c {
                    *c = u;
                    provenance = Provenance::User;
                }
            }
        }
        if memory_states(&caps).is_none_or(|m| m * game.s() as u128 > limit as u128) {
            let fit = largest_uniform_cap(game.s(), game.k(), limit);
            if fit == 0 {
                return Err(Error::SizeLimit {
                    what: "waiting-vector product".into(),
                    needed: game.s() as u128 * (1u128 << game.k().min(100)),
                    limit: limit as u128,
                });
            }
            for c in caps.iter_mut() {
                *c = (*c).min(fit);
            }
            provenance = Provenance::SizeLimited;
        }
        Ok(Thresholds { caps, provenance })
    }
}

/// `∏ (cap_j + 1) + 1`, or `None` on overflow.
fn memory_states(caps: &[u64]) -> Option<u128> {
    caps.iter()
        .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128 + 1))
        .and_then(|p| p.checked_add(1))
}

fn largest_uniform_cap(s: usize, k: usize, limit: usize) -> u64 {
    let fits = |c: u64| memory_states(&vec![c; k]).is_some_and(|m| m * s as u128 <= limit as u128);
    if !fits(1) {
        return 0;
    }
    let (mut lo, mut hi) = (1u64, 2u64);
    while fits(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The capped waiting-vector memory. Vectors are numbered in mixed radix
/// with the first condition most significant; the sink comes last.
#[derive(Clone, Debug)]
pub struct WaitingMemory {
    caps: Vec<u64>,
    strides: Vec<usize>,
    vectors: usize,
    memory: MemoryStructure,
}

impl WaitingMemory {
    pub fn new(game: &RrGame, caps: &[u64]) -> Result<WaitingMemory> {
        WaitingMemory::with_limit(game, caps, DEFAULT_SIZE_LIMIT)
    }

    pub fn with_limit(game: &RrGame, caps: &[u64], limit: usize) -> Result<WaitingMemory> {
        if caps.len() != game.k() {
            return Err(Error::BadParams(format!(
                "{} caps given for {} conditions",
                caps.len(),
                game.k()
            )));
        }
        if caps.contains(&0) {
            return Err(Error::BadParams("caps must be at least 1".into()));
        }
        let states = memory_states(caps);
        let needed = states.and_then(|m| m.checked_mul(game.s() as u128));
        if needed.is_none_or(|x| x > limit as u128) {
            return Err(Error::SizeLimit {
                what: "waiting-vector product".into(),
                needed: needed.unwrap_or(u128::MAX),
                limit: limit as u128,
            });
        }
        let vectors = states.unwrap() as usize - 1;
        let mut strides = vec![1usize; caps.len()];
        for j in (0..caps.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * (caps[j + 1] as usize + 1);
        }
        let mut wm = WaitingMemory {
            caps: caps.to_vec(),
            strides,
            vectors,
            memory: MemoryStructure::trivial(0),
        };
        let labels = (0..=vectors).map(|m| wm.decode(m).to_string()).collect();
        let zero = vec![0u64; caps.len()];
        wm.memory = MemoryStructure::new(
            labels,
            game.s(),
            |v| wm.encode(&step_capped_slice(&zero, v, game, caps).expect("caps are positive")),
            |m, v| {
                if m == wm.sink() {
                    return m;
                }
                let t = wm.times(m);
                step_capped_slice(&t, v, game, caps).map_or(wm.sink(), |t| wm.encode(&t))
            },
        );
        Ok(wm)
    }

    pub fn caps(&self) -> &[u64] {
        &self.caps
    }

    pub fn memory(&self) -> &MemoryStructure {
        &self.memory
    }

    pub fn size(&self) -> usize {
        self.vectors + 1
    }

    pub fn sink(&self) -> StateId {
        self.vectors
    }

    pub fn encode(&self, t: &[u64]) -> StateId {
        t.iter()
            .zip(&self.strides)
            .map(|(&x, &s)| x as usize * s)
            .sum()
    }

    fn times(&self, m: StateId) -> Vec<u64> {
        self.strides
            .iter()
            .zip(&self.caps)
            .map(|(&s, &c)| ((m / s) % (c as usize + 1)) as u64)
            .collect()
    }

    pub fn decode(&self, m: StateId) -> CappedWaiting {
        if m == self.sink() {
            CappedWaiting::Sink
        } else {
            CappedWaiting::Vector(WaitingVector(self.times(m)))
        }
    }

    /// `1 + Σ f_j(cap_j)`, the weight of every sink edge.
    pub fn sink_weight(&self, game: &RrGame) -> Result<i64> {
        to_weight(penalty_of(&self.caps, game.penalties())?.checked_add(1))
    }

    /// Weight of the edges leaving a product vertex with memory state `m`.
    pub fn weight(&self, game: &RrGame, m: StateId) -> Result<i64> {
        if m == self.sink() {
            self.sink_weight(game)
        } else {
            to_weight(Some(penalty_of(&self.times(m), game.penalties())?))
        }
    }
}

fn to_weight(x: Option<u64>) -> Result<i64> {
    x.and_then(|x| i64::try_from(x).ok())
        .ok_or_else(|| Error::Overflow("edge weight does not fit in i64".into()))
}

/// The waiting-vector mean-payoff game over the full product.
#[derive(Clone, Debug)]
pub struct RrMpg {
    pub game: MeanPayoffGame,
    pub memory: WaitingMemory,
    /// Ids of the product vertices, `v * |M| + m`.
    pub vertices: Vec<(VertexId, StateId)>,
}

impl RrMpg {
    pub fn max_weight(&self) -> i64 {
        self.game
            .weights()
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// Builds the product of the arena with the memory, restricted to the
/// vertices for which `keep` holds (the kept set must be closed under
/// successors).
fn build_mpg(
    game: &RrGame,
    wm: WaitingMemory,
    keep: Option<&dyn Fn(usize) -> bool>,
) -> Result<RrMpg> {
    let arena = game.arena();
    let size = wm.size();
    let all = arena.len() * size;
    let mut ids: Vec<usize> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    for x in 0..all {
        if keep.is_none_or(|k| k(x)) {
            index.insert(x, ids.len());
            ids.push(x);
        }
    }
    let mem = wm.memory();
    let mut vertices = Vec::with_capacity(ids.len());
    let mut edges = Vec::new();
    let mut state_weight: Vec<i64> = Vec::with_capacity(ids.len());
    for (i, &x) in ids.iter().enumerate() {
        let (v, m) = (x / size, x % size);
        vertices.push(Vertex {
            name: format!("{}@{m}", arena.name(v)),
            owner: arena.owner(v),
        });
        for &u in arena.successors(v) {
            let y = u * size + mem.update(m, u);
            let j = *index.get(&y).ok_or_else(|| {
                Error::InvalidGame("kept product vertices are not closed under successors".into())
            })?;
            edges.push((i, j));
        }
        state_weight.push(wm.weight(game, m)?);
    }
    let product = Arena::from_parts(vertices, edges)?;
    let mpg = MeanPayoffGame::from_fn(product, |i, _| state_weight[i]);
    Ok(RrMpg {
        game: mpg,
        memory: wm,
        vertices: ids.iter().map(|&x| (x / size, x % size)).collect(),
    })
}

/// The full product of the arena with the capped waiting-vector memory.
pub fn rr_to_mpg(game: &RrGame, caps: &Thresholds) -> Result<RrMpg> {
    rr_to_mpg_with_limit(game, caps, DEFAULT_SIZE_LIMIT)
}

pub fn rr_to_mpg_with_limit(game: &RrGame, caps: &Thresholds, limit: usize) -> Result<RrMpg> {
    let wm = WaitingMemory::with_limit(game, &caps.caps, limit)?;
    build_mpg(game, wm, None)
}

/// Product vertices reachable from the `(v, init(v))` starts.
fn reachable_states(game: &RrGame, wm: &WaitingMemory) -> Vec<bool> {
    let arena = game.arena();
    let size = wm.size();
    let mem = wm.memory();
    let mut seen = vec![false; arena.len() * size];
    let mut queue = VecDeque::new();
    for v in 0..arena.len() {
        let x = v * size + mem.init(v);
        if !seen[x] {
            seen[x] = true;
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        let (v, m) = (x / size, x % size);
        for &u in arena.successors(v) {
            let y = u * size + mem.update(m, u);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

#[derive(Clone, Debug)]
pub struct SynthesisOutcome {
    /// Player 0's strategy over the waiting-vector memory.
    pub strategy: FiniteStateStrategy,
    pub values: Vec<ValueResult>,
    pub thresholds: Thresholds,
    /// Vertices of the mean-payoff game that was solved.
    pub mpg_vertices: usize,
    pub max_weight: i64,
}

/// Solves the waiting-vector game on the part of the product reachable from
/// the initial states and reads off values and Player 0's strategy.
///
/// No strategy whose waiting times stay within the caps does better. At the
/// theoretical thresholds the result is optimal among all strategies.
pub fn synthesize_optimal(game: &RrGame, caps: &Thresholds) -> Result<SynthesisOutcome> {
    synthesize_optimal_with_limit(game, caps, DEFAULT_SIZE_LIMIT)
}

pub fn synthesize_optimal_with_limit(
    game: &RrGame,
    caps: &Thresholds,
    limit: usize,
) -> Result<SynthesisOutcome> {
    let wm = WaitingMemory::with_limit(game, &caps.caps, limit)?;
    let reach = reachable_states(game, &wm);
    let rr = build_mpg(game, wm, Some(&|x| reach[x]))?;
    let sink_weight = rr.memory.sink_weight(game)?;
    let sol = solve_mpg(&rr.game)?;

    let arena = game.arena();
    let size = rr.memory.size();
    let mut position: HashMap<(VertexId, StateId), usize> = HashMap::new();
    for (i, &vm) in rr.vertices.iter().enumerate() {
        position.insert(vm, i);
    }
    let mem = rr.memory.memory().clone();
    let values = (0..arena.len())
        .map(|v| {
            let i = position[&(v, mem.init(v))];
            let val = sol.values[i];
            if val >= sink_weight.into() {
                ValueResult::Infinite
            } else {
                ValueResult::Finite(val)
            }
        })
        .collect();
    let strategy = FiniteStateStrategy::new(arena, Player::Zero, mem, |v, m| {
        match position.get(&(v, m)).and_then(|&i| sol.strategy_0[i]) {
            Some(j) => rr.vertices[j].0,
            None => arena.successors(v)[0],
        }
    })?;
    debug_assert_eq!(size, strategy.size());
    Ok(SynthesisOutcome {
        strategy,
        values,
        thresholds: caps.clone(),
        mpg_vertices: rr.game.arena().len(),
        max_weight: rr.max_weight(),
    })
}

/// `val(σ, from)`: the worst value Player 1 can force against `sigma`.
///
/// Waiting times are tracked up to `|V|·|M| + 1`. Exceeding that means some
/// `(vertex, memory)` pair repeated while a request stayed open, and Player 1
/// can repeat that loop forever, so the value is infinite. Otherwise the
/// value is the maximum mean penalty over reachable cycles.
pub fn evaluate_strategy(
    game: &RrGame,
    sigma: &FiniteStateStrategy,
    from: VertexId,
) -> Result<ValueResult> {
    let arena = game.arena();
    if sigma.player() != Player::Zero {
        return Err(Error::IncompatibleStrategy(
            "only Player 0 strategies can be evaluated".into(),
        ));
    }
    if sigma.memory().vertex_count() != arena.len() {
        return Err(Error::IncompatibleStrategy(format!(
            "strategy is defined over {} vertices, arena has {}",
            sigma.memory().vertex_count(),
            arena.len()
        )));
    }
    if from >= arena.len() {
        return Err(Error::UnknownVertex(format!("#{from}")));
    }
    let mem = sigma.memory();
    let cap = (arena.len() as u64)
        .checked_mul(mem.size() as u64)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::Overflow("evaluation cap".into()))?;
    let caps = vec![cap; game.k()];

    type State = (VertexId, StateId, Vec<u64>);
    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let start = (from, mem.init(from), game.initial_waiting(from).0);
    index.insert(start.clone(), 0);
    states.push(start);
    let mut next = 0;
    while next < states.len() {
        let (v, m, t) = states[next].clone();
        let moves: Vec<VertexId> = if arena.owner(v) == Player::Zero {
            vec![sigma.next_move(v, m)]
        } else {
            arena.successors(v).to_vec()
        };
        for u in moves {
            let Some(t2) = step_capped_slice(&t, u, game, &caps) else {
                return Ok(ValueResult::Infinite);
            };
            let s2 = (u, mem.update(m, u), t2);
            let j = match index.get(&s2) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    index.insert(s2.clone(), j);
                    states.push(s2);
                    j
                }
            };
            edges.push((next, j));
        }
        next += 1;
    }
    let weights = states
        .iter()
        .map(|(_, _, t)| penalty_of(t, game.penalties()))
        .collect::<Result<Vec<u64>>>()?;
    let mut g = WeightedDigraph::new(states.len());
    for (a, b) in edges {
        g.add_edge(a, b, to_weight(Some(weights[a]))?);
    }
    let best = karp_max_mean(&g, 0).expect("dead-end-free graphs always have a cycle");
    Ok(ValueResult::Finite(best))
}

/// Reference values on the waiting-vector game, computed without the
/// mean-payoff solver: the least value over Player 0's positional product
/// strategies of the maximum mean cycle reachable from `(v, init(v))`.
///
/// Value iteration proposes positional strategies for both players. Karp's
/// algorithm evaluates them, which yields an achievable value for Player 0
/// and a lower bound that Player 1 can enforce. Where the two differ, a
/// branch-and-bound search over the strategies that are reachable from the
/// start closes the gap. `budget` limits the number of search nodes per
/// start vertex.
pub fn rr_oracle_optimal(
    game: &RrGame,
    caps: &Thresholds,
    budget: u64,
) -> Result<Vec<ValueResult>> {
    oracle_with_rounds(game, caps, budget, 14)
}

/// With `rounds == 0` every start vertex is settled by the search alone.
#[doc(hidden)]
pub fn oracle_with_rounds(
    game: &RrGame,
    caps: &Thresholds,
    budget: u64,
    rounds: u32,
) -> Result<Vec<ValueResult>> {
    let wm = WaitingMemory::new(game, &caps.caps)?;
    let sink_weight = wm.sink_weight(game)?;
    let g = StateGraph::new(game, &wm)?;
    let (upper, lower) = g.certificates(rounds);
    let mut out = Vec::with_capacity(game.s());
    for (v, &root) in g.roots.iter().enumerate() {
        let best = if upper[root] == lower[root] {
            upper[root]
        } else {
            let mut bb = BranchAndBound {
                g: &g,
                lower: &lower,
                root,
                choice: vec![None; g.len()],
                best: upper[root],
                nodes: 0,
                budget,
            };
            bb.search()?;
            bb.best
        };
        debug_assert!(best >= lower[root], "vertex {v}");
        out.push(if best >= sink_weight.into() {
            ValueResult::Infinite
        } else {
            ValueResult::Finite(best)
        });
    }
    Ok(out)
}

/// The part of the product reachable from the initial states.
struct StateGraph {
    owner: Vec<Player>,
    succ: Vec<Vec<usize>>,
    weight: Vec<i64>,
    roots: Vec<usize>,
}

impl StateGraph {
    fn new(game: &RrGame, wm: &WaitingMemory) -> Result<StateGraph> {
        let arena = game.arena();
        let mem = wm.memory();
        let size = wm.size();
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut ids: Vec<usize> = Vec::new();
        let mut intern = |x: usize, ids: &mut Vec<usize>| {
            *index.entry(x).or_insert_with(|| {
                ids.push(x);
                ids.len() - 1
            })
        };
        let roots: Vec<usize> = (0..arena.len())
            .map(|v| intern(v * size + mem.init(v), &mut ids))
            .collect();
        let mut succ = Vec::new();
        let mut i = 0;
        while i < ids.len() {
            let (v, m) = (ids[i] / size, ids[i] % size);
            let next = arena
                .successors(v)
                .iter()
                .map(|&u| intern(u * size + mem.update(m, u), &mut ids))
                .collect();
            succ.push(next);
            i += 1;
        }
        let mut weight = Vec::with_capacity(ids.len());
        for &x in &ids {
            weight.push(wm.weight(game, x % size)?);
        }
        Ok(StateGraph {
            owner: ids.iter().map(|&x| arena.owner(x / size)).collect(),
            succ,
            weight,
            roots,
        })
    }

    fn len(&self) -> usize {
        self.succ.len()
    }

    /// Everyone except `player` keeps all moves; `player` follows `moves`.
    fn restrict(&self, player: Player, moves: &[usize]) -> WeightedDigraph {
        let mut g = WeightedDigraph::new(self.len());
        for x in 0..self.len() {
            if self.owner[x] == player {
                g.add_edge(x, moves[x], self.weight[x]);
            } else {
                for &y in &self.succ[x] {
                    g.add_edge(x, y, self.weight[x]);
                }
            }
        }
        g
    }

    /// Greedy strategies from `n`-step values.
    fn greedy(&self, values: &[i64]) -> (Vec<usize>, Vec<usize>) {
        let pick = |x: usize, better: fn(i64, i64) -> bool| {
            let mut best = self.succ[x][0];
            for &y in &self.succ[x][1..] {
                if better(values[y], values[best]) {
                    best = y;
                }
            }
            best
        };
        let n = self.len();
        (
            (0..n).map(|x| pick(x, |a, b| a < b)).collect(),
            (0..n).map(|x| pick(x, |a, b| a > b)).collect(),
        )
    }

    /// Per state, a value Player 0 achieves and a value Player 1 enforces,
    /// tightened over rounds of value iteration until they meet at every
    /// root or the rounds run out.
    fn certificates(&self, rounds: u32) -> (Vec<Rational64>, Vec<Rational64>) {
        let n = self.len();
        let mut upper = vec![Rational64::from_integer(i64::MAX); n];
        let mut lower = vec![Rational64::from_integer(i64::MIN); n];
        let mut values = vec![0i64; n];
        let mut steps = 0usize;
        for round in 0..rounds {
            let target = 16usize << round;
            while steps < target {
                values = (0..n)
                    .map(|x| {
                        let next = self.succ[x].iter().map(|&y| values[y]);
                        let best = match self.owner[x] {
                            Player::Zero => next.min(),
                            Player::One => next.max(),
                        };
                        self.weight[x].saturating_add(best.unwrap())
                    })
                    .collect();
                steps += 1;
            }
            let (sigma, tau) = self.greedy(&values);
            let up = max_mean_all(&self.restrict(Player::Zero, &sigma));
            let low = max_mean_all(&self.restrict(Player::One, &tau).negated());
            for x in 0..n {
                upper[x] = upper[x].min(up[x].expect("dead-end free"));
                lower[x] = lower[x].max(-low[x].expect("dead-end free"));
            }
            if self.roots.iter().all(|&r| upper[r] == lower[r]) {
                break;
            }
        }
        (upper, lower)
    }
}

struct BranchAndBound<'a> {
    g: &'a StateGraph,
    lower: &'a [Rational64],
    root: usize,
    choice: Vec<Option<usize>>,
    best: Rational64,
    nodes: u64,
    budget: u64,
}

impl BranchAndBound<'_> {
    /// A lower bound on every completion of the current partial strategy,
    /// and the first Player 0 state reached that has no move yet.
    fn bound(&self) -> (Rational64, Option<usize>) {
        let g = self.g;
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut order = vec![self.root];
        local.insert(self.root, 0);
        let mut edges = Vec::new();
        let mut open = None;
        let mut bound = self.lower[self.root];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            bound = bound.max(self.lower[x]);
            let targets: &[usize] = match (g.owner[x], self.choice[x]) {
                (Player::One, _) => &g.succ[x],
                (Player::Zero, Some(j)) => std::slice::from_ref(&g.succ[x][j]),
                (Player::Zero, None) => {
                    open.get_or_insert(x);
                    &[]
                }
            };
            for &y in targets {
                let j = *local.entry(y).or_insert_with(|| {
                    order.push(y);
                    order.len() - 1
                });
                edges.push((i, j, g.weight[x]));
            }
            i += 1;
        }
        let closed = WeightedDigraph::from_edges(order.len(), edges);
        if let Some(c) = karp_max_mean(&closed, 0) {
            bound = bound.max(c);
        }
        (bound, open)
    }

    fn search(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        let (bound, open) = self.bound();
        if bound >= self.best {
            return Ok(());
        }
        let Some(x) = open else {
            // Every reachable state is decided, so the bound is exact.
            self.best = bound;
            return Ok(());
        };
        for j in 0..self.g.succ[x].len() {
            self.choice[x] = Some(j);
            self.search()?;
        }
        self.choice[x] = None;
        Ok(())
    }
}

/// Who chooses Player 1's moves during a [`playout`].
pub enum Adversary<'a> {
    Strategy(&'a FiniteStateStrategy),
    /// Successors for each Player 1 vertex with more than one successor, in
    /// order. Forced moves do not consume the script.
    Script(Vec<VertexId>),
    /// Called at each Player 1 vertex with more than one successor.
    Interactive(&'a mut dyn FnMut(&[PlayStep], VertexId) -> Result<VertexId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayStep {
    pub vertex: VertexId,
    pub waiting: WaitingVector,
    pub penalty: u64,
}

/// Plays `steps` positions from `from` with `sigma0` against `adversary`.
pub fn playout(
    game: &RrGame,
    sigma0: &FiniteStateStrategy,
    mut adversary: Adversary<'_>,
    from: VertexId,
    steps: usize,
) -> Result<Vec<PlayStep>> {
    let arena = game.arena();
    for s in std::iter::once(sigma0).chain(match &adversary {
        Adversary::Strategy(s) => Some(*s),
        _ => None,
    }) {
        if s.memory().vertex_count() != arena.len() {
            return Err(Error::IncompatibleStrategy(
                "strategy is defined over a different arena".into(),
            ));
        }
    }
    if sigma0.player() != Player::Zero {
        return Err(Error::IncompatibleStrategy(
            "the first strategy must belong to Player 0".into(),
        ));
    }
    if let Adversary::Strategy(s) = &adversary {
        if s.player() != Player::One {
            return Err(Error::IncompatibleStrategy(
                "the adversary strategy must belong to Player 1".into(),
            ));
        }
    }
    if from >= arena.len() {
        return Err(Error::UnknownVertex(format!("#{from}")));
    }
    let mut out: Vec<PlayStep> = Vec::with_capacity(steps);
    if steps == 0 {
        return Ok(out);
    }
    let mut v = from;
    let mut m0 = sigma0.memory().init(v);
    let mut m1 = match &adversary {
        Adversary::Strategy(s) => s.memory().init(v),
        _ => 0,
    };
    let mut t = game.initial_waiting(v);
    let mut script_pos = 0usize;
    loop {
        let penalty = penalty_of(&t.0, game.penalties())?;
        out.push(PlayStep {
            vertex: v,
            waiting: t.clone(),
            penalty,
        });
        if out.len() == steps {
            return Ok(out);
        }
        let next = match arena.owner(v) {
            Player::Zero => sigma0.next_move(v, m0),
            Player::One if arena.successors(v).len() == 1 => arena.successors(v)[0],
            Player::One => match &mut adversary {
                Adversary::Strategy(s) => s.next_move(v, m1),
                Adversary::Script(script) => {
                    let u = *script
                        .get(script_pos)
                        .ok_or(Error::ScriptExhausted(script_pos))?;
                    script_pos += 1;
                    if u >= arena.len() || !arena.has_edge(v, u) {
                        return Err(Error::IllegalScriptedMove {
                            from: arena.name(v).to_string(),
                            to: if u < arena.len() {
                                arena.name(u).to_string()
                            } else {
                                format!("#{u}")
                            },
                        });
                    }
                    u
                }
                Adversary::Interactive(ask) => {
                    let u = ask(&out, v)?;
                    if u >= arena.len() || !arena.has_edge(v, u) {
                        return Err(Error::IllegalScriptedMove {
                            from: arena.name(v).to_string(),
                            to: format!("#{u}"),
                        });
                    }
                    u
                }
            },
        };
        m0 = sigma0.memory().update(m0, next);
        if let Adversary::Strategy(s) = &adversary {
            m1 = s.memory().update(m1, next);
        }
        t = waiting_step(&t, next, game);
        v = next;
    }
}
