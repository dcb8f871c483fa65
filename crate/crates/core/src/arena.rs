//! Game graphs, plays, memory structures and finite-state strategies.
//!
//! Vertices are dense indices in declaration order; names only matter for
//! I/O. Successor lists are kept sorted so that "lowest-indexed successor"
//! tie-breaking is a plain `first()`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type StateId = usize;

/// Upper bound on the number of vertices of an eagerly built product arena.
pub const DEFAULT_SIZE_LIMIT: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Zero,
    One,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Zero => Player::One,
            Player::One => Player::Zero,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Player::Zero => 0,
            Player::One => 1,
        }
    }

    pub fn from_index(i: u8) -> Option<Player> {
        match i {
            0 => Some(Player::Zero),
            1 => Some(Player::One),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub owner: Player,
}

/// Unvalidated arena description, as read from a file.
#[derive(Clone, Debug, Default)]
pub struct RawArena {
    pub vertices: Vec<(String, Player)>,
    pub edges: Vec<(String, String)>,
}

/// A finite game graph in which every vertex has at least one successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    vertices: Vec<Vertex>,
    succ: Vec<Vec<VertexId>>,
    pred: Vec<Vec<VertexId>>,
    index: HashMap<String, VertexId>,
}

/// Checks the well-formedness rules and builds an [`Arena`].
pub fn validate_arena(raw: &RawArena) -> Result<Arena> {
    let mut index = HashMap::with_capacity(raw.vertices.len());
    for (i, (name, _)) in raw.vertices.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::DuplicateVertex(name.clone()));
        }
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (a, b) in &raw.edges {
        match (index.get(a), index.get(b)) {
            (Some(&u), Some(&v)) => edges.push((u, v)),
            _ => return Err(Error::DanglingEdge(a.clone(), b.clone())),
        }
    }
    let vertices = raw
        .vertices
        .iter()
        .map(|(name, owner)| Vertex {
            name: name.clone(),
            owner: *owner,
        })
        .collect();
    Arena::from_parts(vertices, edges)
}

impl Arena {
    /// Builds an arena from indexed vertices and edges. Duplicate edges are
    /// merged.
    pub fn from_parts(
        vertices: Vec<Vertex>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Arena> {
        let n = vertices.len();
        let mut index = HashMap::with_capacity(n);
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.name.clone()));
            }
        }
        let mut succ = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                let name = |x: usize| {
                    vertices
                        .get(x)
                        .map(|v| v.name.clone())
                        .unwrap_or_else(|| format!("#{x}"))
                };
                return Err(Error::DanglingEdge(name(u), name(v)));
            }
            succ[u].push(v);
        }
        for list in &mut succ {
            list.sort_unstable();
            list.dedup();
        }
        if let Some(v) = (0..n).find(|&v| succ[v].is_empty()) {
            return Err(Error::DeadEndVertex(vertices[v].name.clone()));
        }
        let mut pred = vec![Vec::new(); n];
        for (u, list) in succ.iter().enumerate() {
            for &v in list {
                pred[v].push(u);
            }
        }
        Ok(Arena {
            vertices,
            succ,
            pred,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.vertices[v].name
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.vertices[v].owner
    }

    pub fn id_of(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<VertexId> {
        self.id_of(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.pred[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)))
    }

    /// Vertices reachable from any of `starts`.
    pub fn reachable_from(&self, starts: impl IntoIterator<Item = VertexId>) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<VertexId> = Vec::new();
        for s in starts {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for &v in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Sub-arena induced by `keep`. Returns the new arena and, for each new
    /// vertex, its id in `self`. Fails if a kept vertex loses all successors.
    pub fn restrict(&self, keep: &[bool]) -> Result<(Arena, Vec<VertexId>)> {
        let old_ids: Vec<VertexId> = (0..self.len()).filter(|&v| keep[v]).collect();
        let mut new_id = vec![usize::MAX; self.len()];
        for (i, &v) in old_ids.iter().enumerate() {
            new_id[v] = i;
        }
        let vertices = old_ids.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges: Vec<_> = old_ids
            .iter()
            .flat_map(|&u| {
                let new_id = &new_id;
                self.succ[u]
                    .iter()
                    .filter(move |&&v| keep[v])
                    .map(move |&v| (new_id[u], new_id[v]))
            })
            .collect();
        Ok((Arena::from_parts(vertices, edges)?, old_ids))
    }
}

/// A finite, nonempty path through an arena.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlayPrefix(Vec<VertexId>);

impl PlayPrefix {
    pub fn new(arena: &Arena, vertices: Vec<VertexId>) -> Result<PlayPrefix> {
        if vertices.is_empty() {
            return Err(Error::InvalidPrefix("empty prefix".into()));
        }
        check_path(arena, &vertices).map_err(Error::InvalidPrefix)?;
        Ok(PlayPrefix(vertices))
    }

    pub fn from_names(arena: &Arena, names: &[&str]) -> Result<PlayPrefix> {
        let ids = names
            .iter()
            .map(|n| arena.require(n))
            .collect::<Result<Vec<_>>>()?;
        PlayPrefix::new(arena, ids)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> VertexId {
        *self.0.last().expect("prefixes are nonempty")
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }
}

fn check_path(arena: &Arena, vertices: &[VertexId]) -> std::result::Result<(), String> {
    if let Some(&v) = vertices.iter().find(|&&v| v >= arena.len()) {
        return Err(format!("vertex index {v} out of range"));
    }
    for w in vertices.windows(2) {
        if !arena.has_edge(w[0], w[1]) {
            return Err(format!(
                "no edge `{}` -> `{}`",
                arena.name(w[0]),
                arena.name(w[1])
            ));
        }
    }
    Ok(())
}

/// An ultimately periodic play `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoPlay {
    prefix: Vec<VertexId>,
    cycle: Vec<VertexId>,
}

impl LassoPlay {
    pub fn new(arena: &Arena, prefix: Vec<VertexId>, cycle: Vec<VertexId>) -> Result<LassoPlay> {
        if cycle.is_empty() {
            return Err(Error::InvalidLasso("empty cycle".into()));
        }
        let mut whole = prefix.clone();
        whole.extend_from_slice(&cycle);
        whole.push(cycle[0]);
        check_path(arena, &whole).map_err(Error::InvalidLasso)?;
        Ok(LassoPlay { prefix, cycle })
    }

    pub fn from_names(arena: &Arena, prefix: &[&str], cycle: &[&str]) -> Result<LassoPlay> {
        let ids = |names: &[&str]| {
            names
                .iter()
                .map(|n| arena.require(n))
                .collect::<Result<Vec<_>>>()
        };
        LassoPlay::new(arena, ids(prefix)?, ids(cycle)?)
    }

    pub fn prefix(&self) -> &[VertexId] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[VertexId] {
        &self.cycle
    }

    /// Vertex at position `n` of the infinite play.
    pub fn at(&self, n: usize) -> VertexId {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The same play with `offset` cycle vertices moved into the prefix.
    pub fn rotated(&self, offset: usize) -> LassoPlay {
        let l = self.cycle.len();
        let offset = offset % l;
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.cycle[..offset]);
        let cycle = (0..l).map(|i| self.cycle[(offset + i) % l]).collect();
        LassoPlay { prefix, cycle }
    }

    /// The same play with the cycle written out `times` times.
    pub fn unrolled(&self, times: usize) -> LassoPlay {
        assert!(times >= 1);
        LassoPlay {
            prefix: self.prefix.clone(),
            cycle: self.cycle.repeat(times),
        }
    }
}

/// A memory structure `(M, init, update)` over an arena with `n` vertices.
/// States are `0..size`; labels are only used for I/O.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryStructure {
    labels: Vec<String>,
    init: Vec<StateId>,
    update: Vec<StateId>,
    vertex_count: usize,
}

impl MemoryStructure {
    /// Tabulates `init` and `update`. Panics if either returns an
    /// out-of-range state.
    pub fn new(
        labels: Vec<String>,
        vertex_count: usize,
        init: impl Fn(VertexId) -> StateId,
        update: impl Fn(StateId, VertexId) -> StateId,
    ) -> MemoryStructure {
        let size = labels.len();
        assert!(size > 0, "memory structures need at least one state");
        let init: Vec<_> = (0..vertex_count).map(&init).collect();
        let mut table = Vec::with_capacity(size * vertex_count);
        for m in 0..size {
            for v in 0..vertex_count {
                table.push(update(m, v));
            }
        }
        assert!(init.iter().chain(&table).all(|&m| m < size));
        MemoryStructure {
            labels,
            init,
            update: table,
            vertex_count,
        }
    }

    pub(crate) fn from_tables(
        labels: Vec<String>,
        init: Vec<StateId>,
        update: Vec<StateId>,
    ) -> Result<MemoryStructure> {
        let size = labels.len();
        let vertex_count = init.len();
        if size == 0 {
            return Err(Error::IncompatibleStrategy("memory has no states".into()));
        }
        if update.len() != size * vertex_count {
            return Err(Error::IncompatibleStrategy(
                "update table has the wrong size".into(),
            ));
        }
        if init.iter().chain(&update).any(|&m| m >= size) {
            return Err(Error::IncompatibleStrategy(
                "memory table refers to an unknown state".into(),
            ));
        }
        Ok(MemoryStructure {
            labels,
            init,
            update,
            vertex_count,
        })
    }

    /// The one-state memory: strategies using it are positional.
    pub fn trivial(vertex_count: usize) -> MemoryStructure {
        MemoryStructure::new(vec!["0".into()], vertex_count, |_| 0, |_, _| 0)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn label(&self, m: StateId) -> &str {
        &self.labels[m]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn init(&self, v: VertexId) -> StateId {
        self.init[v]
    }

    pub fn update(&self, m: StateId, v: VertexId) -> StateId {
        self.update[m * self.vertex_count + v]
    }

    /// `update*`: the state reached after reading `w`.
    pub fn update_star(&self, w: &[VertexId]) -> Option<StateId> {
        let (&first, rest) = w.split_first()?;
        Some(
            rest.iter()
                .fold(self.init(first), |m, &v| self.update(m, v)),
        )
    }
}

/// A strategy implemented by a memory structure and a next-move function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStateStrategy {
    player: Player,
    memory: MemoryStructure,
    next: Vec<Option<VertexId>>,
}

impl FiniteStateStrategy {
    /// Tabulates `next_move` on every `(v, m)` with `v` owned by `player` and
    /// checks that each move follows an edge.
    pub fn new(
        arena: &Arena,
        player: Player,
        memory: MemoryStructure,
        next_move: impl Fn(VertexId, StateId) -> VertexId,
    ) -> Result<FiniteStateStrategy> {
        let n = arena.len();
        let mut next = vec![None; memory.size() * n];
        for m in 0..memory.size() {
            for v in (0..n).filter(|&v| arena.owner(v) == player) {
                next[m * n + v] = Some(next_move(v, m));
            }
        }
        FiniteStateStrategy::from_table(arena, player, memory, next)
    }

    pub(crate) fn from_table(
        arena: &Arena,
        player: Player,
        memory: MemoryStructure,
        next: Vec<Option<VertexId>>,
    ) -> Result<FiniteStateStrategy> {
        let n = arena.len();
        if memory.vertex_count() != n {
            return Err(Error::IncompatibleStrategy(format!(
                "memory is defined over {} vertices, arena has {n}",
                memory.vertex_count()
            )));
        }
        if next.len() != memory.size() * n {
            return Err(Error::IncompatibleStrategy(
                "next-move table has the wrong size".into(),
            ));
        }
        for m in 0..memory.size() {
            for v in 0..n {
                let entry = next[m * n + v];
                if arena.owner(v) != player {
                    continue;
                }
                match entry {
                    Some(u) if u < n && arena.has_edge(v, u) => {}
                    Some(u) => {
                        return Err(Error::IncompatibleStrategy(format!(
                            "move `{}` -> #{u} in state `{}` is not an edge",
                            arena.name(v),
                            memory.label(m)
                        )))
                    }
                    None => {
                        return Err(Error::IncompatibleStrategy(format!(
                            "no move for `{}` in state `{}`",
                            arena.name(v),
                            memory.label(m)
                        )))
                    }
                }
            }
        }
        Ok(FiniteStateStrategy {
            player,
            memory,
            next,
        })
    }

    /// A memoryless strategy given by one successor per owned vertex.
    pub fn positional(
        arena: &Arena,
        player: Player,
        choice: impl Fn(VertexId) -> VertexId,
    ) -> Result<FiniteStateStrategy> {
        FiniteStateStrategy::new(
            arena,
            player,
            MemoryStructure::trivial(arena.len()),
            |v, _| choice(v),
        )
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn memory(&self) -> &MemoryStructure {
        &self.memory
    }

    pub fn size(&self) -> usize {
        self.memory.size()
    }

    /// Next move at owned vertex `v` in memory state `m`.
    pub fn next_move(&self, v: VertexId, m: StateId) -> VertexId {
        self.next[m * self.memory.vertex_count() + v]
            .expect("next_move is only defined on the strategy owner's vertices")
    }
}

/// An arena × memory product with vertex ids `v * |M| + m`.
#[derive(Clone, Debug)]
pub struct Product {
    pub arena: Arena,
    pub memory_size: usize,
}

impl Product {
    pub fn id(&self, v: VertexId, m: StateId) -> VertexId {
        v * self.memory_size + m
    }

    pub fn split(&self, x: VertexId) -> (VertexId, StateId) {
        (x / self.memory_size, x % self.memory_size)
    }
}

/// The expanded arena `A × M`: `((v,m),(v',m'))` is an edge iff `(v,v')` is
/// one and `update(m, v') = m'`. Product vertices are named `name@m`.
pub fn product(arena: &Arena, mem: &MemoryStructure, limit: usize) -> Result<Product> {
    assert_eq!(mem.vertex_count(), arena.len(), "memory/arena mismatch");
    let size = mem.size();
    let needed = arena.len() as u128 * size as u128;
    if needed > limit as u128 {
        return Err(Error::SizeLimit {
            what: "product arena".into(),
            needed,
            limit: limit as u128,
        });
    }
    let mut vertices = Vec::with_capacity(needed as usize);
    for v in arena.vertices() {
        for m in 0..size {
            vertices.push(Vertex {
                name: format!("{}@{m}", v.name),
                owner: v.owner,
            });
        }
    }
    let mut edges = Vec::with_capacity(arena.edge_count() * size);
    for (u, v) in arena.edges() {
        for m in 0..size {
            edges.push((u * size + m, v * size + mem.update(m, v)));
        }
    }
    Ok(Product {
        arena: Arena::from_parts(vertices, edges)?,
        memory_size: size,
    })
}

/// The extended play prefix `(ρ0, m0)(ρ1, m1)…` with `m0 = init(ρ0)`.
pub fn extend_prefix(
    arena: &Arena,
    mem: &MemoryStructure,
    w: &[VertexId],
) -> Result<Vec<(VertexId, StateId)>> {
    let (&first, _) = w
        .split_first()
        .ok_or_else(|| Error::InvalidPrefix("empty prefix".into()))?;
    check_path(arena, w).map_err(Error::InvalidPrefix)?;
    let mut m = mem.init(first);
    let mut out = Vec::with_capacity(w.len());
    out.push((first, m));
    for &v in &w[1..] {
        m = mem.update(m, v);
        out.push((v, m));
    }
    Ok(out)
}

pub fn project(extended: &[(VertexId, StateId)]) -> Vec<VertexId> {
    extended.iter().map(|&(v, _)| v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(vertices: &[(&str, u8)], edges: &[(&str, &str)]) -> RawArena {
        RawArena {
            vertices: vertices
                .iter()
                .map(|(n, o)| (n.to_string(), Player::from_index(*o).unwrap()))
                .collect(),
            edges: edges
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }

    #[test]
    fn smallest_legal_arena() {
        let a = validate_arena(&raw(&[("v", 0)], &[("v", "v")])).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.successors(0), &[0]);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            validate_arena(&raw(&[("v", 0)], &[])),
            Err(Error::DeadEndVertex("v".into()))
        );
        assert_eq!(
            validate_arena(&raw(&[("v", 0)], &[("v", "w")])),
            Err(Error::DanglingEdge("v".into(), "w".into()))
        );
        assert_eq!(
            validate_arena(&raw(&[("v", 0), ("v", 1)], &[("v", "v")])),
            Err(Error::DuplicateVertex("v".into()))
        );
    }

    fn triangle() -> Arena {
        validate_arena(&raw(
            &[("a", 0), ("b", 1), ("c", 0)],
            &[("a", "b"), ("b", "c"), ("b", "a"), ("c", "a")],
        ))
        .unwrap()
    }

    fn counter_memory(n: usize, size: usize) -> MemoryStructure {
        MemoryStructure::new(
            (0..size).map(|m| m.to_string()).collect(),
            n,
            |v| v % size,
            move |m, v| (m + v + 1) % size,
        )
    }

    #[test]
    fn product_with_trivial_memory_is_a_copy() {
        let a = triangle();
        let p = product(&a, &MemoryStructure::trivial(3), DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(p.arena.len(), 3);
        let edges: Vec<_> = p.arena.edges().collect();
        assert_eq!(edges, a.edges().collect::<Vec<_>>());
        assert_eq!(p.arena.name(1), "b@0");
    }

    #[test]
    fn product_cardinality_and_edges() {
        let a = triangle();
        let mem = counter_memory(3, 4);
        let p = product(&a, &mem, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(p.arena.len(), 12);
        for x in 0..p.arena.len() {
            let (v, m) = p.split(x);
            assert_eq!(p.arena.owner(x), a.owner(v));
            let expected: Vec<_> = a
                .successors(v)
                .iter()
                .map(|&u| p.id(u, mem.update(m, u)))
                .collect();
            let mut expected = expected;
            expected.sort_unstable();
            assert_eq!(p.arena.successors(x), expected.as_slice());
        }
    }

    #[test]
    fn product_size_limit() {
        let a = triangle();
        let err = product(&a, &counter_memory(3, 4), 11).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { needed: 12, .. }));
    }

    #[test]
    fn extend_and_project() {
        let a = triangle();
        let mem = counter_memory(3, 4);
        assert_eq!(
            extend_prefix(&a, &mem, &[1]).unwrap(),
            vec![(1, mem.init(1))]
        );
        let w = vec![0, 1, 2, 0, 1, 0];
        let ext = extend_prefix(&a, &mem, &w).unwrap();
        assert_eq!(project(&ext), w);
        for n in 0..w.len() {
            assert_eq!(ext[n].1, mem.update_star(&w[..=n]).unwrap());
        }
        assert!(matches!(
            extend_prefix(&a, &mem, &[0, 2]),
            Err(Error::InvalidPrefix(_))
        ));
        let ext = extend_prefix(&a, &MemoryStructure::trivial(3), &w).unwrap();
        assert!(ext.iter().all(|&(_, m)| m == 0));
    }

    #[test]
    fn strategy_moves_must_follow_edges() {
        let a = triangle();
        assert!(
            FiniteStateStrategy::positional(&a, Player::Zero, |v| if v == 0 { 1 } else { 0 })
                .is_ok()
        );
        let err = FiniteStateStrategy::positional(&a, Player::Zero, |_| 2).unwrap_err();
        assert!(matches!(err, Error::IncompatibleStrategy(_)));
    }

    #[test]
    fn lasso_rotation_and_unrolling() {
        let a = triangle();
        let l = LassoPlay::new(&a, vec![0], vec![1, 2, 0]).unwrap();
        let r = l.rotated(2);
        assert_eq!(r.prefix(), &[0, 1, 2]);
        assert_eq!(r.cycle(), &[0, 1, 2]);
        for n in 0..20 {
            assert_eq!(l.at(n), r.at(n));
            assert_eq!(l.at(n), l.unrolled(3).at(n));
        }
        assert!(LassoPlay::new(&a, vec![], vec![0, 2]).is_err());
        assert!(LassoPlay::new(&a, vec![], vec![]).is_err());
    }
}
