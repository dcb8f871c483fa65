//! Graphviz output. Player 0 vertices are circles, Player 1 vertices are
//! boxes. Output order follows vertex ids, so equal inputs give equal text.

use std::fmt::Write as _;

use crate::arena::{Arena, Player, VertexId};
use crate::buchi::BuchiGame;
use crate::meanpayoff::MeanPayoffGame;
use crate::rr::RrGame;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn render(
    arena: &Arena,
    node_extra: impl Fn(VertexId) -> Option<String>,
    accepting: Option<&[bool]>,
    edge_label: impl Fn(VertexId, usize) -> Option<String>,
) -> String {
    let mut out = String::from("digraph G {\n");
    for v in 0..arena.len() {
        let shape = match arena.owner(v) {
            Player::Zero => "circle",
            Player::One => "box",
        };
        let label = match node_extra(v) {
            Some(extra) => format!("{}\n{}", arena.name(v), extra),
            None => arena.name(v).to_string(),
        };
        let _ = write!(out, "  n{v} [shape={shape}, label={}", quote(&label));
        if accepting.is_some_and(|a| a[v]) {
            out.push_str(", peripheries=2");
        }
        out.push_str("];\n");
    }
    for u in 0..arena.len() {
        for (i, &v) in arena.successors(u).iter().enumerate() {
            match edge_label(u, i) {
                Some(l) => {
                    let _ = writeln!(out, "  n{u} -> n{v} [label={}];", quote(&l));
                }
                None => {
                    let _ = writeln!(out, "  n{u} -> n{v};");
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn arena_dot(arena: &Arena) -> String {
    render(arena, |_| None, None, |_, _| None)
}

/// Vertices carry their condition memberships, e.g. `Q1 P2`.
pub fn game_dot(game: &RrGame) -> String {
    render(
        game.arena(),
        |v| {
            let mut tags = Vec::new();
            for (j, c) in game.conditions().iter().enumerate() {
                if c.request[v] {
                    tags.push(format!("Q{}", j + 1));
                }
                if c.response[v] {
                    tags.push(format!("P{}", j + 1));
                }
            }
            (!tags.is_empty()).then(|| tags.join(" "))
        },
        None,
        |_, _| None,
    )
}

/// Accepting vertices are drawn with a double border.
pub fn buchi_dot(game: &BuchiGame) -> String {
    render(&game.arena, |_| None, Some(&game.accepting), |_, _| None)
}

/// Every edge is labelled with its weight.
pub fn mpg_dot(game: &MeanPayoffGame) -> String {
    render(
        game.arena(),
        |_| None,
        None,
        |u, i| Some(game.weights()[u][i].to_string()),
    )
}
