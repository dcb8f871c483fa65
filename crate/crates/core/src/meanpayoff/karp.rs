//! Maximum mean cycles with exact rational results.

use num_rational::Rational64;

/// A directed graph with integer edge weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedDigraph {
    succ: Vec<Vec<(usize, i64)>>,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> WeightedDigraph {
        WeightedDigraph {
            succ: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut g = WeightedDigraph::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: i64) {
        self.succ[u].push((v, w));
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, u: usize) -> &[(usize, i64)] {
        &self.succ[u]
    }

    pub fn negated(&self) -> WeightedDigraph {
        WeightedDigraph {
            succ: self
                .succ
                .iter()
                .map(|l| l.iter().map(|&(v, w)| (v, -w)).collect())
                .collect(),
        }
    }

    pub fn reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Strongly connected components among vertices with `mask[v]`, in
    /// reverse topological order (every component comes after all the
    /// components it can reach).
    pub fn sccs(&self, mask: Option<&[bool]>) -> Vec<Vec<usize>> {
        let n = self.len();
        let inside = |v: usize| mask.is_none_or(|m| m[v]);
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut next = 0usize;
        let mut call: Vec<(usize, usize)> = Vec::new();
        for root in (0..n).filter(|&v| inside(v)) {
            if index[root] != usize::MAX {
                continue;
            }
            call.push((root, 0));
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (u, ref mut i)) = call.last_mut() {
                if let Some(&(v, _)) = self.succ[u].get(*i) {
                    *i += 1;
                    if !inside(v) {
                        continue;
                    }
                    if index[v] == usize::MAX {
                        index[v] = next;
                        low[v] = next;
                        next += 1;
                        stack.push(v);
                        on_stack[v] = true;
                        call.push((v, 0));
                    } else if on_stack[v] {
                        low[u] = low[u].min(index[v]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[u]);
                    }
                    if low[u] == index[u] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp.push(w);
                            if w == u {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
        out
    }
}

/// `a/b < c/d` for positive denominators.
fn less(a: i128, b: i128, c: i128, d: i128) -> bool {
    a * d < c * b
}

/// Karp's algorithm on one strongly connected component, keeping two rows
/// of the walk table at a time. `None` if the component has no edge.
fn component_max_mean(
    g: &WeightedDigraph,
    comp: &[usize],
    local: &[usize],
    comp_of: &[usize],
) -> Option<Rational64> {
    let n = comp.len();
    let id = comp_of[comp[0]];
    let in_comp = |v: usize| comp_of[v] == id;
    let step = |row: &[Option<i128>]| -> Vec<Option<i128>> {
        let mut next = vec![None; n];
        for (i, &u) in comp.iter().enumerate() {
            let Some(d) = row[i] else { continue };
            for &(v, w) in g.successors(u) {
                if in_comp(v) {
                    let j = local[v];
                    let cand = d + w as i128;
                    if next[j].is_none_or(|x| cand > x) {
                        next[j] = Some(cand);
                    }
                }
            }
        }
        next
    };
    let mut first = vec![None; n];
    first[0] = Some(0i128);

    let mut row = first.clone();
    for _ in 0..n {
        row = step(&row);
    }
    let last = row;
    if last.iter().all(Option::is_none) {
        return None;
    }

    // best[v] = min_k (D_n(v) - D_k(v)) / (n - k), as (num, den).
    let mut best: Vec<Option<(i128, i128)>> = vec![None; n];
    let mut row = first;
    for k in 0..n {
        for v in 0..n {
            if let (Some(dn), Some(dk)) = (last[v], row[v]) {
                let cand = (dn - dk, (n - k) as i128);
                if best[v].is_none_or(|(a, b)| less(cand.0, cand.1, a, b)) {
                    best[v] = Some(cand);
                }
            }
        }
        row = step(&row);
    }
    let (num, den) =
        best.into_iter()
            .flatten()
            .reduce(|x, y| if less(x.0, x.1, y.0, y.1) { y } else { x })?;
    Some(Rational64::new(
        i64::try_from(num).expect("cycle weight fits in i64"),
        den as i64,
    ))
}

/// For every vertex with `mask[v]`: the maximum mean weight of a cycle
/// reachable from it inside the mask, or `None` if there is none.
pub fn max_mean_all_masked(g: &WeightedDigraph, mask: Option<&[bool]>) -> Vec<Option<Rational64>> {
    let n = g.len();
    let inside = |v: usize| mask.is_none_or(|m| m[v]);
    let mut local = vec![usize::MAX; n];
    let mut comp_of = vec![usize::MAX; n];
    let mut value: Vec<Option<Rational64>> = vec![None; n];
    let comps = g.sccs(mask);
    let mut comp_value: Vec<Option<Rational64>> = Vec::with_capacity(comps.len());
    for (ci, comp) in comps.iter().enumerate() {
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i;
            comp_of[v] = ci;
        }
        let mut best = component_max_mean(g, comp, &local, &comp_of);
        for &u in comp {
            for &(v, _) in g.successors(u) {
                if inside(v) && comp_of[v] != ci {
                    best = best.max(comp_value[comp_of[v]]);
                }
            }
        }
        comp_value.push(best);
        for &v in comp {
            value[v] = best;
        }
    }
    value
}

pub fn max_mean_all(g: &WeightedDigraph) -> Vec<Option<Rational64>> {
    max_mean_all_masked(g, None)
}

/// Maximum mean weight over cycles reachable from `source`.
pub fn karp_max_mean(g: &WeightedDigraph, source: usize) -> Option<Rational64> {
    let reach = g.reachable(source);
    max_mean_all_masked(g, Some(&reach))[source]
}

/// Minimum mean weight over cycles reachable from `source`.
pub fn karp_min_mean(g: &WeightedDigraph, source: usize) -> Option<Rational64> {
    karp_max_mean(&g.negated(), source).map(|r| -r)
}
