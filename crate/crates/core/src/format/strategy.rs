//! JSON strategy files.
//!
//! Tables are indexed by memory state, then by vertex in the order of
//! `vertices`. `next` holds the chosen successor on the owner's vertices and
//! `null` elsewhere.

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, FiniteStateStrategy, MemoryStructure, Player};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyDoc {
    player: u8,
    vertices: Vec<String>,
    memory: Vec<String>,
    init: Vec<usize>,
    update: Vec<Vec<usize>>,
    next: Vec<Vec<Option<String>>>,
}

pub fn write_strategy(arena: &Arena, sigma: &FiniteStateStrategy) -> String {
    let mem = sigma.memory();
    let n = arena.len();
    let doc = StrategyDoc {
        player: sigma.player().index(),
        vertices: (0..n).map(|v| arena.name(v).to_string()).collect(),
        memory: mem.labels().to_vec(),
        init: (0..n).map(|v| mem.init(v)).collect(),
        update: (0..mem.size())
            .map(|m| (0..n).map(|v| mem.update(m, v)).collect())
            .collect(),
        next: (0..mem.size())
            .map(|m| {
                (0..n)
                    .map(|v| {
                        (arena.owner(v) == sigma.player())
                            .then(|| arena.name(sigma.next_move(v, m)).to_string())
                    })
                    .collect()
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("strategy documents serialize");
    text.push('\n');
    text
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(e.line(), e.column(), e.to_string())
}

/// Reads a strategy for `arena`. The vertex list must name the arena's
/// vertices, in any order.
pub fn parse_strategy(arena: &Arena, text: &str) -> Result<FiniteStateStrategy> {
    let doc: StrategyDoc = serde_json::from_str(text).map_err(json_error)?;
    let n = arena.len();
    let player = match doc.player {
        0 => Player::Zero,
        1 => Player::One,
        p => return Err(Error::IncompatibleStrategy(format!("unknown player {p}"))),
    };
    if doc.vertices.len() != n {
        return Err(Error::IncompatibleStrategy(format!(
            "strategy lists {} vertices, arena has {n}",
            doc.vertices.len()
        )));
    }
    // position in the file -> arena id
    let ids = doc
        .vertices
        .iter()
        .map(|name| {
            arena
                .id_of(name)
                .ok_or_else(|| Error::IncompatibleStrategy(format!("unknown vertex `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut seen = vec![false; n];
    for &v in &ids {
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::IncompatibleStrategy(format!(
                "vertex `{}` listed twice",
                arena.name(v)
            )));
        }
    }
    let size = doc.memory.len();
    let row_check = |what: &str, len: usize| {
        if len != size {
            return Err(Error::IncompatibleStrategy(format!(
                "{what} has {len} rows for {size} memory states"
            )));
        }
        Ok(())
    };
    row_check("update", doc.update.len())?;
    row_check("next", doc.next.len())?;
    if doc.init.len() != n
        || doc.update.iter().any(|r| r.len() != n)
        || doc.next.iter().any(|r| r.len() != n)
    {
        return Err(Error::IncompatibleStrategy(
            "every table row needs one entry per vertex".into(),
        ));
    }
    let mut init = vec![0; n];
    let mut update = vec![0; size * n];
    let mut next = vec![None; size * n];
    for (i, &v) in ids.iter().enumerate() {
        init[v] = doc.init[i];
        for m in 0..size {
            update[m * n + v] = doc.update[m][i];
            next[m * n + v] = match &doc.next[m][i] {
                Some(name) => Some(arena.id_of(name).ok_or_else(|| {
                    Error::IncompatibleStrategy(format!("unknown vertex `{name}`"))
                })?),
                None => None,
            };
        }
    }
    let memory = MemoryStructure::from_tables(doc.memory, init, update)?;
    FiniteStateStrategy::from_table(arena, player, memory, next)
}
