//! Built-in example games and the hand-written strategies that go with them.

use crate::arena::{Arena, FiniteStateStrategy, MemoryStructure, Player, Vertex, VertexId};
use crate::error::{Error, Result};
use crate::rr::{RrCondition, RrGame};

fn arena(vertices: &[(&str, Player)], edges: &[(&str, &str)]) -> Arena {
    let vs: Vec<Vertex> = vertices
        .iter()
        .map(|&(name, owner)| Vertex {
            name: name.to_string(),
            owner,
        })
        .collect();
    let id = |n: &str| vertices.iter().position(|&(m, _)| m == n).unwrap();
    Arena::from_parts(vs, edges.iter().map(|&(a, b)| (id(a), id(b)))).expect("built-in arena")
}

/// Player 1 requests one or both conditions at `q`; Player 0 answers one of
/// them (or none) at `p`.
pub fn fig1() -> RrGame {
    use Player::*;
    let a = arena(
        &[
            ("q", One),
            ("r1", One),
            ("r12", One),
            ("r2", One),
            ("p", Zero),
            ("p1", Zero),
            ("p2", Zero),
            ("e", Zero),
        ],
        &[
            ("q", "r1"),
            ("q", "r12"),
            ("q", "r2"),
            ("r1", "p"),
            ("r12", "p"),
            ("r2", "p"),
            ("p", "p1"),
            ("p", "p2"),
            ("p", "e"),
            ("p1", "e"),
            ("p2", "e"),
            ("e", "q"),
        ],
    );
    let c1 = RrCondition::from_names(&a, &["r1", "r12"], &["p1"]).unwrap();
    let c2 = RrCondition::from_names(&a, &["r2", "r12"], &["p2"]).unwrap();
    RrGame::with_identity(a, vec![c1, c2]).unwrap()
}

/// Player 0 owns everything: a two-step loop answering condition 1 and a
/// four-step loop answering condition 2, both through `v`.
pub fn fig2() -> RrGame {
    use Player::*;
    let a = arena(
        &[
            ("v", Zero),
            ("r", Zero),
            ("l1", Zero),
            ("l2", Zero),
            ("l3", Zero),
        ],
        &[
            ("v", "r"),
            ("r", "v"),
            ("v", "l1"),
            ("l1", "l2"),
            ("l2", "l3"),
            ("l3", "v"),
        ],
    );
    let c1 = RrCondition::from_names(&a, &["v"], &["r"]).unwrap();
    let c2 = RrCondition::from_names(&a, &["v"], &["l3"]).unwrap();
    RrGame::with_identity(a, vec![c1, c2]).unwrap()
}

/// `k` blades around the hub `h`. Blade `j` answers condition `j` at `c_j`;
/// Player 1 then either re-requests every smaller condition through `v_j`
/// or stops in the sink `s_j`, which answers every larger condition.
pub fn blades(k: usize) -> Result<RrGame> {
    if k < 2 {
        return Err(Error::BadParams(format!("blades needs k >= 2, got {k}")));
    }
    let mut vertices = vec![
        Vertex {
            name: "i".into(),
            owner: Player::Zero,
        },
        Vertex {
            name: "h".into(),
            owner: Player::Zero,
        },
    ];
    let mut edges = vec![(0, 1)];
    for j in 0..k {
        let (c, s, v) = blade_ids(j);
        for (name, _) in [("c", c), ("s", s), ("v", v)] {
            vertices.push(Vertex {
                name: format!("{name}{}", j + 1),
                owner: Player::One,
            });
        }
        edges.extend([(1, c), (c, s), (c, v), (v, 1), (s, s)]);
    }
    let a = Arena::from_parts(vertices, edges)?;
    let n = a.len();
    let conditions = (0..k)
        .map(|j| {
            let mut cond = RrCondition::empty(n);
            cond.request[0] = true;
            cond.response[blade_ids(j).0] = true;
            for l in 0..k {
                let (_, s, v) = blade_ids(l);
                if j > l {
                    cond.response[s] = true;
                }
                if j < l {
                    cond.request[v] = true;
                }
            }
            cond
        })
        .collect();
    RrGame::with_identity(a, conditions)
}

/// Ids of `c_j, s_j, v_j` (0-based `j`) in [`blades`].
pub fn blade_ids(j: usize) -> (VertexId, VertexId, VertexId) {
    (2 + 3 * j, 3 + 3 * j, 4 + 3 * j)
}

pub fn gen_builtin(name: &str, k: Option<usize>) -> Result<RrGame> {
    match name {
        "fig1" => Ok(fig1()),
        "fig2" => Ok(fig2()),
        "blades" => blades(k.unwrap_or(4)),
        other => Err(Error::BadParams(format!("unknown built-in game `{other}`"))),
    }
}

/// Player 0 on [`fig1`] answering condition 1 and condition 2 in turn.
/// Memory state 0 means condition 1 is answered next.
pub fn fig1_alternating(game: &RrGame) -> Result<FiniteStateStrategy> {
    let a = game.arena();
    let (p, p1, p2) = (a.require("p")?, a.require("p1")?, a.require("p2")?);
    let mem = MemoryStructure::new(
        vec!["answer1".into(), "answer2".into()],
        a.len(),
        |v| usize::from(v == p1),
        |m, v| {
            if v == p1 {
                1
            } else if v == p2 {
                0
            } else {
                m
            }
        },
    );
    FiniteStateStrategy::new(a, Player::Zero, mem, |v, m| {
        if v == p {
            [p1, p2][m]
        } else {
            a.successors(v)[0]
        }
    })
}

/// Player 0 on [`fig2`] using only the loop through `r`.
pub fn fig2_right_loop(game: &RrGame) -> Result<FiniteStateStrategy> {
    let a = game.arena();
    let (v, r) = (a.require("v")?, a.require("r")?);
    FiniteStateStrategy::positional(
        a,
        Player::Zero,
        |x| if x == v { r } else { a.successors(x)[0] },
    )
}

/// Memory tracking the set of open requests, as a bitmask over conditions.
pub fn open_requests_memory(game: &RrGame) -> MemoryStructure {
    let k = game.k();
    assert!(k < 20, "open-request memory is exponential in k");
    let n = game.s();
    let mask = |select: &dyn Fn(&RrCondition) -> bool| -> usize {
        game.conditions()
            .iter()
            .enumerate()
            .filter(|(_, c)| select(c))
            .fold(0, |acc, (j, _)| acc | (1 << j))
    };
    let requested: Vec<usize> = (0..n).map(|v| mask(&|c| c.request[v])).collect();
    let answered: Vec<usize> = (0..n).map(|v| mask(&|c| c.response[v])).collect();
    MemoryStructure::new(
        (0..1usize << k).map(|m| format!("{m:0k$b}")).collect(),
        n,
        |v| requested[v] & !answered[v],
        |m, v| (m | requested[v]) & !answered[v],
    )
}

/// Player 0 on [`blades`]: at the hub enter the blade of the smallest open
/// condition, or the first blade when nothing is open.
pub fn blades_smallest_open(game: &RrGame) -> Result<FiniteStateStrategy> {
    let a = game.arena();
    let hub = a.require("h")?;
    FiniteStateStrategy::new(a, Player::Zero, open_requests_memory(game), |v, m| {
        if v == hub {
            let j = if m == 0 {
                0
            } else {
                m.trailing_zeros() as usize
            };
            blade_ids(j).0
        } else {
            a.successors(v)[0]
        }
    })
}

/// Player 1 on [`blades`]: always leave a blade through `v_j`.
pub fn blades_always_revisit(game: &RrGame) -> Result<FiniteStateStrategy> {
    let a = game.arena();
    let k = game.k();
    FiniteStateStrategy::positional(a, Player::One, |v| {
        match (0..k).find(|&j| blade_ids(j).0 == v) {
            Some(j) => blade_ids(j).2,
            None => a.successors(v)[0],
        }
    })
}
