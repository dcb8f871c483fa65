//! The line-oriented game file.
//!
//! ```text
//! # comments run to the end of the line
//! [defaults]
//! penalty = identity
//!
//! [vertices]
//! q 1
//! p 0
//!
//! [edges]
//! q -> p
//! p -> q p
//!
//! [conditions]
//! request: q; response: p; penalty: affine 2 1
//! ```
//!
//! Owners are `0` or `1`. Penalties are `identity`, `affine <slope>
//! <offset>` or `table <f(0)> <f(1)> ...`. A condition without a penalty
//! uses the default, which itself defaults to `identity`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::arena::{Player, RawArena, VertexId};
use crate::error::{Error, Result};
use crate::rr::{PenaltyFn, RrCondition, RrGame};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Defaults,
    Vertices,
    Edges,
    Conditions,
}

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    /// 1-based character column.
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut col = 0;
    let mut start_col = 0;
    for (i, c) in line.char_indices() {
        col += 1;
        let special = matches!(c, ';' | ':' | '=');
        if c.is_whitespace() || special {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: start_col,
                });
            }
            if special {
                out.push(Token {
                    text: &line[i..i + 1],
                    column: col,
                });
            }
        } else if start.is_none() {
            start = Some(i);
            start_col = col;
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: start_col,
        });
    }
    out
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn end_column(line: &str) -> usize {
    line.chars().count() + 1
}

fn parse_u64(tok: Token<'_>, line: usize) -> Result<u64> {
    tok.text.parse().map_err(|_| {
        Error::parse(
            line,
            tok.column,
            format!("expected a number, found `{}`", tok.text),
        )
    })
}

fn parse_penalty(toks: &[Token<'_>], line: usize, eol: usize) -> Result<PenaltyFn> {
    let Some(head) = toks.first() else {
        return Err(Error::parse(line, eol, "missing penalty"));
    };
    let args = &toks[1..];
    let semantic = |e: Error| Error::Semantic {
        line,
        source: Box::new(e),
    };
    match head.text {
        "identity" => {
            if let Some(t) = args.first() {
                return Err(Error::parse(
                    line,
                    t.column,
                    "`identity` takes no arguments",
                ));
            }
            Ok(PenaltyFn::Identity)
        }
        "affine" => {
            if args.len() != 2 {
                let col = args.get(2).map_or(eol, |t| t.column);
                return Err(Error::parse(
                    line,
                    col,
                    "`affine` takes a slope and an offset",
                ));
            }
            let slope = parse_u64(args[0], line)?;
            let offset = parse_u64(args[1], line)?;
            PenaltyFn::affine(slope, offset).map_err(semantic)
        }
        "table" => {
            let values = args
                .iter()
                .map(|&t| parse_u64(t, line))
                .collect::<Result<Vec<_>>>()?;
            PenaltyFn::table(values).map_err(semantic)
        }
        other => Err(Error::parse(
            line,
            head.column,
            format!("unknown penalty `{other}`"),
        )),
    }
}

struct ConditionLine {
    line: usize,
    request: Vec<(String, usize)>,
    response: Vec<(String, usize)>,
    penalty: Option<PenaltyFn>,
}

fn parse_condition(toks: &[Token<'_>], line: usize, eol: usize) -> Result<ConditionLine> {
    let mut out = ConditionLine {
        line,
        request: Vec::new(),
        response: Vec::new(),
        penalty: None,
    };
    let mut seen: Vec<&str> = Vec::new();
    for field in toks.split(|t| t.text == ";") {
        let Some(key) = field.first() else {
            continue;
        };
        if field.get(1).map(|t| t.text) != Some(":") {
            let col = field.get(1).map_or(eol, |t| t.column);
            return Err(Error::parse(
                line,
                col,
                format!("expected `:` after `{}`", key.text),
            ));
        }
        if seen.contains(&key.text) {
            return Err(Error::parse(
                line,
                key.column,
                format!("duplicate key `{}`", key.text),
            ));
        }
        let rest = &field[2..];
        if let Some(bad) = rest.iter().find(|t| t.text == ":" || t.text == "=") {
            return Err(Error::parse(
                line,
                bad.column,
                format!("unexpected `{}`", bad.text),
            ));
        }
        let names = || {
            rest.iter()
                .map(|t| (t.text.to_string(), t.column))
                .collect()
        };
        match key.text {
            "request" => out.request = names(),
            "response" => out.response = names(),
            "penalty" => {
                let end = toks
                    .iter()
                    .find(|t| t.text == ";" && t.column > key.column)
                    .map_or(eol, |t| t.column);
                out.penalty = Some(parse_penalty(rest, line, end)?);
            }
            other => {
                return Err(Error::parse(
                    line,
                    key.column,
                    format!("unknown key `{other}`"),
                ));
            }
        }
        seen.push(key.text);
    }
    for required in ["request", "response"] {
        if !seen.contains(&required) {
            return Err(Error::parse(line, eol, format!("missing `{required}`")));
        }
    }
    Ok(out)
}

/// Parses a game file. Syntax errors carry a line and column; semantic
/// errors carry the line of the offending declaration.
pub fn parse_game(text: &str) -> Result<RrGame> {
    let mut section: Option<Section> = None;
    let mut default_penalty: Option<PenaltyFn> = None;
    let mut raw = RawArena::default();
    let mut vertex_line: HashMap<String, usize> = HashMap::new();
    let mut edge_lines: Vec<(usize, String, usize, String, usize)> = Vec::new();
    let mut conditions: Vec<ConditionLine> = Vec::new();

    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(full);
        let eol = end_column(body.trim_end());
        let toks = tokens(body);
        let Some(first) = toks.first() else {
            continue;
        };
        if first.text.starts_with('[') {
            let header = body.trim();
            section = Some(match header {
                "[defaults]" => Section::Defaults,
                "[vertices]" => Section::Vertices,
                "[edges]" => Section::Edges,
                "[conditions]" => Section::Conditions,
                _ => {
                    return Err(Error::parse(
                        line,
                        first.column,
                        format!("unknown section `{header}`"),
                    ))
                }
            });
            continue;
        }
        let Some(sec) = section else {
            return Err(Error::parse(
                line,
                first.column,
                "expected a section header",
            ));
        };
        match sec {
            Section::Defaults => {
                if first.text != "penalty" {
                    return Err(Error::parse(
                        line,
                        first.column,
                        format!("unknown key `{}`", first.text),
                    ));
                }
                if toks.get(1).map(|t| t.text) != Some("=") {
                    let col = toks.get(1).map_or(eol, |t| t.column);
                    return Err(Error::parse(line, col, "expected `=`"));
                }
                default_penalty = Some(parse_penalty(&toks[2..], line, eol)?);
            }
            Section::Vertices => {
                let Some(owner) = toks.get(1) else {
                    return Err(Error::parse(line, eol, "expected an owner (0 or 1)"));
                };
                let player = match owner.text {
                    "0" => Player::Zero,
                    "1" => Player::One,
                    other => {
                        return Err(Error::parse(
                            line,
                            owner.column,
                            format!("owner must be 0 or 1, found `{other}`"),
                        ))
                    }
                };
                if let Some(extra) = toks.get(2) {
                    return Err(Error::parse(line, extra.column, "unexpected token"));
                }
                check_name(first, line)?;
                if vertex_line.insert(first.text.to_string(), line).is_some() {
                    return Err(Error::Semantic {
                        line,
                        source: Box::new(Error::DuplicateVertex(first.text.to_string())),
                    });
                }
                raw.vertices.push((first.text.to_string(), player));
            }
            Section::Edges => {
                if toks.get(1).map(|t| t.text) != Some("->") {
                    let col = toks.get(1).map_or(eol, |t| t.column);
                    return Err(Error::parse(line, col, "expected `->`"));
                }
                if toks.len() < 3 {
                    return Err(Error::parse(line, eol, "expected at least one target"));
                }
                for t in &toks[2..] {
                    check_name(t, line)?;
                    edge_lines.push((
                        line,
                        first.text.to_string(),
                        first.column,
                        t.text.to_string(),
                        t.column,
                    ));
                }
            }
            Section::Conditions => conditions.push(parse_condition(&toks, line, eol)?),
        }
    }

    let semantic = |line: usize, e: Error| Error::Semantic {
        line,
        source: Box::new(e),
    };
    for (line, u, _, v, _) in &edge_lines {
        if !vertex_line.contains_key(u) || !vertex_line.contains_key(v) {
            return Err(semantic(*line, Error::DanglingEdge(u.clone(), v.clone())));
        }
        raw.edges.push((u.clone(), v.clone()));
    }
    let arena = crate::arena::validate_arena(&raw).map_err(|e| {
        let line = match &e {
            Error::DeadEndVertex(v) | Error::DuplicateVertex(v) | Error::UnknownVertex(v) => {
                vertex_line.get(v).copied().unwrap_or(0)
            }
            _ => 0,
        };
        semantic(line, e)
    })?;
    let default_penalty = default_penalty.unwrap_or(PenaltyFn::Identity);
    let mut conds = Vec::with_capacity(conditions.len());
    let mut penalties = Vec::with_capacity(conditions.len());
    for c in conditions {
        let ids = |names: &[(String, usize)]| -> Result<Vec<VertexId>> {
            names
                .iter()
                .map(|(n, _)| arena.require(n).map_err(|e| semantic(c.line, e)))
                .collect()
        };
        conds.push(RrCondition::new(
            arena.len(),
            &ids(&c.request)?,
            &ids(&c.response)?,
        ));
        penalties.push(c.penalty.unwrap_or_else(|| default_penalty.clone()));
    }
    RrGame::new(arena, conds, penalties).map_err(|e| semantic(0, e))
}

fn check_name(tok: &Token<'_>, line: usize) -> Result<()> {
    match tok
        .text
        .chars()
        .position(|c| matches!(c, '[' | ']' | ',' | '{' | '}' | '"'))
    {
        Some(i) => Err(Error::parse(
            line,
            tok.column + i,
            format!("invalid character in vertex name `{}`", tok.text),
        )),
        None if tok.text == "->" => {
            Err(Error::parse(line, tok.column, "`->` is not a vertex name"))
        }
        None => Ok(()),
    }
}

/// Writes a game in the format read by [`parse_game`]. Equal games give
/// identical text.
pub fn write_game(game: &RrGame) -> String {
    let a = game.arena();
    let mut out = String::new();
    out.push_str("[vertices]\n");
    for v in a.vertices() {
        let _ = writeln!(out, "{} {}", v.name, v.owner);
    }
    out.push_str("\n[edges]\n");
    for u in 0..a.len() {
        let targets: Vec<&str> = a.successors(u).iter().map(|&v| a.name(v)).collect();
        let _ = writeln!(out, "{} -> {}", a.name(u), targets.join(" "));
    }
    if game.k() > 0 {
        out.push_str("\n[conditions]\n");
    }
    for (c, f) in game.conditions().iter().zip(game.penalties()) {
        let names = |set: &mut dyn Iterator<Item = VertexId>| {
            set.map(|v| a.name(v)).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(
            out,
            "request: {}; response: {}; penalty: {}",
            names(&mut c.requests()),
            names(&mut c.responses()),
            f
        );
    }
    out
}
