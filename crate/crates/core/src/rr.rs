//! Request-response conditions, waiting times, penalties and play values.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::arena::{Arena, LassoPlay, PlayPrefix, VertexId};
use crate::error::{Error, Result};

/// A strictly increasing penalty function on waiting times.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PenaltyFn {
    Identity,
    /// `n ↦ slope·n + offset`
    Affine {
        slope: u64,
        offset: u64,
    },
    /// Explicit values for `0..len`, continued with slope 1 after the last entry.
    Table(Vec<u64>),
}

impl PenaltyFn {
    pub fn affine(slope: u64, offset: u64) -> Result<PenaltyFn> {
        let f = PenaltyFn::Affine { slope, offset };
        f.validate()?;
        Ok(f)
    }

    pub fn table(values: Vec<u64>) -> Result<PenaltyFn> {
        let f = PenaltyFn::Table(values);
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PenaltyFn::Identity => Ok(()),
            PenaltyFn::Affine { slope, .. } if *slope == 0 => Err(Error::InvalidPenalty(
                "affine slope must be positive".into(),
            )),
            PenaltyFn::Affine { .. } => Ok(()),
            PenaltyFn::Table(t) if t.is_empty() => {
                Err(Error::InvalidPenalty("empty penalty table".into()))
            }
            PenaltyFn::Table(t) if t.windows(2).any(|w| w[0] >= w[1]) => Err(
                Error::InvalidPenalty("penalty table must be strictly increasing".into()),
            ),
            PenaltyFn::Table(_) => Ok(()),
        }
    }

    /// `f(n)`, or `None` on u64 overflow.
    pub fn eval(&self, n: u64) -> Option<u64> {
        match self {
            PenaltyFn::Identity => Some(n),
            PenaltyFn::Affine { slope, offset } => slope.checked_mul(n)?.checked_add(*offset),
            PenaltyFn::Table(t) => {
                let last = t.len() as u64 - 1;
                if n <= last {
                    Some(t[n as usize])
                } else {
                    t[last as usize].checked_add(n - last)
                }
            }
        }
    }

    pub fn eval_big(&self, n: &BigUint) -> BigUint {
        match self {
            PenaltyFn::Identity => n.clone(),
            PenaltyFn::Affine { slope, offset } => n * *slope + *offset,
            PenaltyFn::Table(t) => {
                let last = t.len() - 1;
                match n.to_usize() {
                    Some(i) if i <= last => BigUint::from(t[i]),
                    _ => BigUint::from(t[last]) + (n - last),
                }
            }
        }
    }

    pub fn floor(&self) -> u64 {
        self.eval(0).expect("f(0) fits in u64")
    }

    /// `max{n : f(n) ≤ v}`.
    pub fn pseudo_inverse(&self, v: &BigUint) -> Result<BigUint> {
        let floor = self.floor();
        if *v < BigUint::from(floor) {
            return Err(Error::BelowRange {
                value: v.to_string(),
                floor: floor.to_string(),
            });
        }
        Ok(match self {
            PenaltyFn::Identity => v.clone(),
            PenaltyFn::Affine { slope, offset } => (v - *offset) / *slope,
            PenaltyFn::Table(t) => {
                let last = t.len() - 1;
                if *v >= BigUint::from(t[last]) {
                    BigUint::from(last) + (v - t[last])
                } else {
                    let i = t.partition_point(|&x| BigUint::from(x) <= *v);
                    BigUint::from(i - 1)
                }
            }
        })
    }
}

impl fmt::Display for PenaltyFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PenaltyFn::Identity => write!(f, "identity"),
            PenaltyFn::Affine { slope, offset } => write!(f, "affine {slope} {offset}"),
            PenaltyFn::Table(t) => {
                write!(f, "table")?;
                for x in t {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
        }
    }
}

/// `max{n : f(n) ≤ v}`.
pub fn penalty_pseudo_inverse(f: &PenaltyFn, v: &BigUint) -> Result<BigUint> {
    f.pseudo_inverse(v)
}

/// One request-response pair `(Q_j, P_j)` as membership vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RrCondition {
    pub request: Vec<bool>,
    pub response: Vec<bool>,
}

impl RrCondition {
    pub fn new(n: usize, request: &[VertexId], response: &[VertexId]) -> RrCondition {
        let mut c = RrCondition::empty(n);
        for &v in request {
            c.request[v] = true;
        }
        for &v in response {
            c.response[v] = true;
        }
        c
    }

    pub fn empty(n: usize) -> RrCondition {
        RrCondition {
            request: vec![false; n],
            response: vec![false; n],
        }
    }

    pub fn from_names(arena: &Arena, request: &[&str], response: &[&str]) -> Result<RrCondition> {
        let ids = |names: &[&str]| {
            names
                .iter()
                .map(|n| arena.require(n))
                .collect::<Result<Vec<_>>>()
        };
        Ok(RrCondition::new(
            arena.len(),
            &ids(request)?,
            &ids(response)?,
        ))
    }

    /// `v ∈ Q_j ∖ P_j`
    pub fn opens(&self, v: VertexId) -> bool {
        self.request[v] && !self.response[v]
    }

    pub fn requests(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.request.len()).filter(|&v| self.request[v])
    }

    pub fn responses(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.response.len()).filter(|&v| self.response[v])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RrGame {
    arena: Arena,
    conditions: Vec<RrCondition>,
    penalties: Vec<PenaltyFn>,
}

impl RrGame {
    pub fn new(
        arena: Arena,
        conditions: Vec<RrCondition>,
        penalties: Vec<PenaltyFn>,
    ) -> Result<RrGame> {
        if conditions.len() != penalties.len() {
            return Err(Error::InvalidGame(format!(
                "{} conditions but {} penalty functions",
                conditions.len(),
                penalties.len()
            )));
        }
        for (j, c) in conditions.iter().enumerate() {
            if c.request.len() != arena.len() || c.response.len() != arena.len() {
                return Err(Error::InvalidGame(format!(
                    "condition {} is not defined over the arena's vertices",
                    j + 1
                )));
            }
        }
        for f in &penalties {
            f.validate()?;
        }
        Ok(RrGame {
            arena,
            conditions,
            penalties,
        })
    }

    /// A game with identity penalties on every condition.
    pub fn with_identity(arena: Arena, conditions: Vec<RrCondition>) -> Result<RrGame> {
        let penalties = vec![PenaltyFn::Identity; conditions.len()];
        RrGame::new(arena, conditions, penalties)
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn conditions(&self) -> &[RrCondition] {
        &self.conditions
    }

    pub fn penalties(&self) -> &[PenaltyFn] {
        &self.penalties
    }

    /// Number of conditions.
    pub fn k(&self) -> usize {
        self.conditions.len()
    }

    /// Number of vertices.
    pub fn s(&self) -> usize {
        self.arena.len()
    }

    pub fn with_penalties(&self, penalties: Vec<PenaltyFn>) -> Result<RrGame> {
        RrGame::new(self.arena.clone(), self.conditions.clone(), penalties)
    }

    /// The same game with empty conditions appended until there are `k`.
    pub fn padded(&self, k: usize) -> RrGame {
        let mut g = self.clone();
        while g.conditions.len() < k {
            g.conditions.push(RrCondition::empty(g.s()));
            g.penalties.push(PenaltyFn::Identity);
        }
        g
    }

    /// Waiting vector of the one-vertex prefix `v`.
    pub fn initial_waiting(&self, v: VertexId) -> WaitingVector {
        waiting_step(&WaitingVector::zero(self.k()), v, self)
    }
}

/// Per-condition waiting times of a play prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaitingVector(pub Vec<u64>);

impl WaitingVector {
    pub fn zero(k: usize) -> WaitingVector {
        WaitingVector(vec![0; k])
    }

    /// Componentwise `self ≤ other`.
    pub fn dominated_by(&self, other: &WaitingVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn times(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for WaitingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// A waiting vector bounded by caps, or the sink `⊥` once a cap is exceeded.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CappedWaiting {
    Vector(WaitingVector),
    Sink,
}

impl fmt::Display for CappedWaiting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CappedWaiting::Vector(t) => t.fmt(f),
            CappedWaiting::Sink => write!(f, "bot"),
        }
    }
}

#[inline]
fn step_one(t: u64, requested: bool, responded: bool) -> u64 {
    match (t, requested && !responded, responded) {
        (0, true, _) => 1,
        (0, false, _) => 0,
        (_, _, true) => 0,
        (t, _, false) => t + 1,
    }
}

/// One step of the waiting-time recurrence.
pub fn waiting_step(t: &WaitingVector, v: VertexId, game: &RrGame) -> WaitingVector {
    WaitingVector(
        t.0.iter()
            .zip(&game.conditions)
            .map(|(&tj, c)| step_one(tj, c.request[v], c.response[v]))
            .collect(),
    )
}

/// The capped recurrence: `⊥` as soon as some `t_j = cap_j` is not answered
/// at `v`. `⊥` is absorbing.
pub fn waiting_step_capped(
    t: &CappedWaiting,
    v: VertexId,
    game: &RrGame,
    caps: &[u64],
) -> CappedWaiting {
    match t {
        CappedWaiting::Sink => CappedWaiting::Sink,
        CappedWaiting::Vector(t) => step_capped_slice(&t.0, v, game, caps)
            .map(|x| CappedWaiting::Vector(WaitingVector(x)))
            .unwrap_or(CappedWaiting::Sink),
    }
}

pub(crate) fn step_capped_slice(
    t: &[u64],
    v: VertexId,
    game: &RrGame,
    caps: &[u64],
) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(t.len());
    for ((&tj, c), &cap) in t.iter().zip(&game.conditions).zip(caps) {
        if tj >= cap && !c.response[v] {
            return None;
        }
        out.push(step_one(tj, c.request[v], c.response[v]));
    }
    Some(out)
}

/// `p(w) = Σ_j f_j(w_j(w))`.
pub fn prefix_penalty(t: &WaitingVector, penalties: &[PenaltyFn]) -> Result<u64> {
    penalty_of(&t.0, penalties)
}

pub(crate) fn penalty_of(t: &[u64], penalties: &[PenaltyFn]) -> Result<u64> {
    let mut sum = 0u64;
    for (&tj, f) in t.iter().zip(penalties) {
        sum = f
            .eval(tj)
            .and_then(|x| sum.checked_add(x))
            .ok_or_else(|| Error::Overflow("penalty does not fit in 64 bits".into()))?;
    }
    Ok(sum)
}

/// Waiting vector and penalty after each position of `w`.
pub fn annotate_prefix(game: &RrGame, w: &PlayPrefix) -> Result<Vec<(WaitingVector, u64)>> {
    if w.vertices().iter().any(|&v| v >= game.s()) {
        return Err(Error::InvalidPrefix(
            "prefix is not over the game's arena".into(),
        ));
    }
    annotate_vertices(game, w.vertices())
}

pub(crate) fn annotate_vertices(
    game: &RrGame,
    w: &[VertexId],
) -> Result<Vec<(WaitingVector, u64)>> {
    let mut t = WaitingVector::zero(game.k());
    let mut out = Vec::with_capacity(w.len());
    for &v in w {
        t = waiting_step(&t, v, game);
        let p = prefix_penalty(&t, game.penalties())?;
        out.push((t.clone(), p));
    }
    Ok(out)
}

/// A play or strategy value: an exact rational, or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueResult {
    Finite(Rational64),
    Infinite,
}

impl ValueResult {
    pub fn is_finite(&self) -> bool {
        matches!(self, ValueResult::Finite(_))
    }

    pub fn finite(&self) -> Option<Rational64> {
        match self {
            ValueResult::Finite(r) => Some(*r),
            ValueResult::Infinite => None,
        }
    }

    pub fn ratio(num: i64, den: i64) -> ValueResult {
        ValueResult::Finite(Rational64::new(num, den))
    }
}

impl fmt::Display for ValueResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueResult::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            ValueResult::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ValueResult::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for ValueResult {
    type Err = Error;

    fn from_str(s: &str) -> Result<ValueResult> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ValueResult::Infinite);
        }
        let bad = || Error::BadParams(format!("not a value: `{s}`"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(ValueResult::ratio(n, d))
    }
}

/// `sum / len` reduced to lowest terms, as a value.
pub(crate) fn mean_value(sum: u128, len: u128) -> Result<ValueResult> {
    let g = sum.gcd(&len);
    let (n, d) = if g.is_zero() {
        (0, 1)
    } else {
        (sum / g, len / g)
    };
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(n), Ok(d)) => Ok(ValueResult::ratio(n, d)),
        _ => Err(Error::Overflow(
            "value does not fit in 64-bit rationals".into(),
        )),
    }
}

/// Value of the ultimately periodic play `prefix · cycle^ω`.
///
/// When the play is finite-valued every waiting time stays at most
/// `|prefix| + |cycle|`, so the default cap is one more than that; passing a
/// waiting time beyond the cap means some request stays open forever.
pub fn lasso_value(game: &RrGame, play: &LassoPlay, start_cap: Option<u64>) -> Result<ValueResult> {
    let (prefix, cycle) = (play.prefix(), play.cycle());
    if prefix.iter().chain(cycle).any(|&v| v >= game.s()) {
        return Err(Error::InvalidLasso(
            "lasso is not over the game's arena".into(),
        ));
    }
    let cap = start_cap.unwrap_or((prefix.len() + cycle.len()) as u64 + 1);

    let mut t = WaitingVector::zero(game.k());
    for &v in prefix {
        t = waiting_step(&t, v, game);
    }
    let mut seen: HashMap<(usize, WaitingVector), usize> = HashMap::new();
    let mut penalties: Vec<u64> = Vec::new();
    let mut i = 0usize;
    loop {
        t = waiting_step(&t, cycle[i], game);
        if t.0.iter().any(|&x| x > cap) {
            return Ok(ValueResult::Infinite);
        }
        let step = penalties.len();
        if let Some(&start) = seen.get(&(i, t.clone())) {
            let period = &penalties[start..];
            let sum: u128 = period.iter().map(|&p| p as u128).sum();
            return mean_value(sum, period.len() as u128);
        }
        penalties.push(prefix_penalty(&t, game.penalties())?);
        seen.insert((i, t.clone()), step);
        i = (i + 1) % cycle.len();
    }
}
