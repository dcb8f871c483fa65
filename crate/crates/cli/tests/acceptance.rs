//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line to
//! stderr (uncaptured) and then asserts the outcome.

use std::collections::HashSet;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use rrsynth_core::arena::Vertex;
use rrsynth_core::bounds::{
    annotate_with_vertices, dickson_bound, dickson_bound_closed, find_dickson_pair,
};
use rrsynth_core::buchi::solve_rr;
use rrsynth_core::format::{write_game, write_strategy};
use rrsynth_core::meanpayoff::{
    lasso_mean, max_mean_all, mpg_oracle, solve_mpg, MeanPayoffGame, DEFAULT_BUDGET,
};
use rrsynth_core::{
    games, lasso_value, rr_to_mpg, synthesize_optimal, waiting_step, Arena, LassoPlay, PlayPrefix,
    Player, RrCondition, RrGame, Thresholds, ValueResult,
};

const BIN: &str = env!("CARGO_BIN_EXE_rrsynth");

fn report(n: u32, ok: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let ok_time = elapsed < limit;
    let verdict = if ok && ok_time { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {n}: {verdict} ({:.2}s, limit {}s) {detail}",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n}: {detail}");
    assert!(ok_time, "criterion {n}: took {elapsed:?}, limit {limit:?}");
}

fn rrsynth(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn save(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `name value` lines.
fn value_table(text: &str) -> Vec<(String, ValueResult)> {
    text.lines()
        .filter_map(|l| {
            let (name, v) = l.split_once(' ')?;
            Some((name.to_string(), parse_value(v.trim())?))
        })
        .collect()
}

fn parse_value(v: &str) -> Option<ValueResult> {
    if v == "inf" {
        Some(ValueResult::Infinite)
    } else {
        v.parse::<Rational64>().ok().map(ValueResult::Finite)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_arena(rng: &mut impl Rng, n: usize, max_out: usize) -> Arena {
    let vertices = (0..n)
        .map(|i| Vertex {
            name: format!("v{i}"),
            owner: if rng.gen_bool(0.5) {
                Player::Zero
            } else {
                Player::One
            },
        })
        .collect();
    let all: Vec<usize> = (0..n).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        let d = rng.gen_range(1..=max_out.min(n));
        edges.extend(all.choose_multiple(rng, d).map(|&v| (u, v)));
    }
    Arena::from_parts(vertices, edges).unwrap()
}

fn random_rr(rng: &mut impl Rng, n: usize, k: usize) -> RrGame {
    let arena = random_arena(rng, n, 2);
    let conditions = (0..k)
        .map(|_| {
            let req: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
            let resp: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            RrCondition::new(n, &req, &resp)
        })
        .collect();
    RrGame::with_identity(arena, conditions).unwrap()
}

fn random_mpg(rng: &mut impl Rng, n: usize, w: i64) -> MeanPayoffGame {
    let arena = random_arena(rng, n, 3);
    let weights = (0..n)
        .map(|u| {
            arena
                .successors(u)
                .iter()
                .map(|_| rng.gen_range(-w..=w))
                .collect()
        })
        .collect();
    MeanPayoffGame::new(arena, weights).unwrap()
}

#[test]
fn criterion_01_alternating_strategy_value() {
    let t = Instant::now();
    let dir = TempDir::new().unwrap();
    let g = games::fig1();
    let game = save(&dir, "fig1.rrg", &write_game(&g));
    let sigma = games::fig1_alternating(&g).unwrap();
    let strat = save(&dir, "alt.json", &write_strategy(g.arena(), &sigma));
    let out = rrsynth(&["eval", s(&game), "--strategy", s(&strat)]);
    let table = value_table(&stdout(&out));
    let want = ValueResult::Finite(Rational64::new(56, 10));
    let ok = out.status.success() && table.len() == 8 && table.iter().all(|(_, v)| *v == want);
    report(
        1,
        ok,
        t.elapsed(),
        Duration::from_secs(1),
        &format!(
            "eval values {:?}",
            table.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_02_optimal_matches_oracle_at_cap_12() {
    let t = Instant::now();
    let dir = TempDir::new().unwrap();
    let game = save(&dir, "fig1.rrg", &write_game(&games::fig1()));
    let opt = rrsynth(&["optimal", s(&game), "--cap", "12", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&opt.stdout).unwrap();
    let values: Vec<(String, ValueResult)> = doc["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["vertex"].as_str().unwrap().to_string(),
                parse_value(e["value"].as_str().unwrap()).unwrap(),
            )
        })
        .collect();
    let oracle = rrsynth(&[
        "oracle",
        s(&game),
        "--cap",
        "12",
        "--budget",
        "1000000",
        "--compare",
    ]);
    let oracle_values = value_table(&stdout(&oracle));
    let q = values.iter().find(|(n, _)| n == "q").map(|(_, v)| *v);
    let ok = opt.status.success()
        && oracle.status.success()
        && doc["caps"] == serde_json::json!([12, 12])
        && values.len() == 8
        && values == oracle_values
        && q.is_some_and(|q| q <= ValueResult::Finite(Rational64::new(56, 10)));
    report(
        2,
        ok,
        t.elapsed(),
        Duration::from_secs(120),
        &format!(
            "oracle exit {:?}, value at q {}",
            oracle.status.code(),
            q.map_or("missing".into(), |v| v.to_string())
        ),
    );
}

/// Hub visits up to and including the one that enters `c_k`.
fn blades_first_answer(dir: &TempDir, k: usize) -> Option<usize> {
    let g = games::blades(k).unwrap();
    let game = save(dir, &format!("blades{k}.rrg"), &write_game(&g));
    let sigma = save(
        dir,
        &format!("smallest{k}.json"),
        &write_strategy(g.arena(), &games::blades_smallest_open(&g).unwrap()),
    );
    let tau = save(
        dir,
        &format!("revisit{k}.json"),
        &write_strategy(g.arena(), &games::blades_always_revisit(&g).unwrap()),
    );
    let steps = (3usize << k) + 10;
    let out = rrsynth(&[
        "play",
        s(&game),
        "--strategy",
        s(&sigma),
        "--adversary",
        s(&tau),
        "--from",
        "i",
        "--steps",
        &steps.to_string(),
    ]);
    if !out.status.success() {
        return None;
    }
    let target = format!("c{k}");
    let mut hub = 0;
    for line in stdout(&out).lines().skip(1) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        match cols.get(1).copied() {
            Some("h") => hub += 1,
            Some(v) if v == target => return Some(hub),
            _ => {}
        }
    }
    None
}

/// The waiting time of condition `k` just before `c_k` is first entered.
fn blades_wait_before_answer(k: usize) -> Option<u64> {
    let g = games::blades(k).unwrap();
    let sigma = games::blades_smallest_open(&g).unwrap();
    let tau = games::blades_always_revisit(&g).unwrap();
    let i = g.arena().require("i").unwrap();
    let trace = rrsynth_core::playout(
        &g,
        &sigma,
        rrsynth_core::Adversary::Strategy(&tau),
        i,
        (3usize << k) + 10,
    )
    .ok()?;
    let ck = games::blade_ids(k - 1).0;
    let at = trace.iter().position(|p| p.vertex == ck)?;
    Some(trace[at - 1].waiting.times()[k - 1])
}

#[test]
fn criterion_03_blades_lower_bound() {
    let t = Instant::now();
    let dir = TempDir::new().unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for k in [3usize, 4] {
        let want = (1usize << k) - 1;
        let got = blades_first_answer(&dir, k);
        let wait = blades_wait_before_answer(k);
        ok &= got == Some(want);
        detail.push(format!(
            "k={k}: condition {k} first answered at hub visit {} (expected {want}), \
             waiting time before the answer {}",
            got.map_or("never".into(), |h| h.to_string()),
            wait.map_or("?".into(), |w| w.to_string()),
        ));
        let game = save(
            &dir,
            &format!("solve{k}.rrg"),
            &write_game(&games::blades(k).unwrap()),
        );
        let out = rrsynth(&["solve", s(&game)]);
        let w0 = stdout(&out)
            .lines()
            .find_map(|l| l.strip_prefix("W0:").map(str::to_string))
            .unwrap_or_default();
        let i_in_w0 = out.status.success() && w0.split_whitespace().any(|v| v == "i");
        ok &= i_in_w0;
        detail.push(format!("k={k}: i in W0: {i_in_w0}"));
    }
    report(
        3,
        ok,
        t.elapsed(),
        Duration::from_secs(1),
        &detail.join("; "),
    );
}

#[test]
fn criterion_04_dickson_recursion() {
    let t = Instant::now();
    let mut bad = Vec::new();
    for s in 1..=10u64 {
        if dickson_bound(s, 0) != (s + 1).into() {
            bad.push(format!("b({s},0)"));
        }
    }
    if dickson_bound(2, 1) != 10u32.into() {
        bad.push("b(2,1)".into());
    }
    if dickson_bound(2, 2) != 131u32.into() {
        bad.push("b(2,2)".into());
    }
    for s in 1..=4u64 {
        for k in 1..=4usize {
            if dickson_bound(s, k) > dickson_bound_closed(s, k).unwrap() {
                bad.push(format!("closed form below recursion at ({s},{k})"));
            }
        }
    }
    report(
        4,
        bad.is_empty(),
        t.elapsed(),
        Duration::from_secs(1),
        &format!("failures: {bad:?}"),
    );
}

fn has_pair(g: &RrGame, play: Vec<usize>) -> bool {
    let n = play.len();
    let w = PlayPrefix::new(g.arena(), play).unwrap();
    let annotated = annotate_with_vertices(g, &w).unwrap();
    find_dickson_pair(&annotated, 0..n).is_some()
}

fn all_plays(a: &Arena, len: usize, play: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if play.len() == len {
        visit(play);
        return;
    }
    let next: Vec<usize> = match play.last() {
        None => (0..a.len()).collect(),
        Some(&v) => a.successors(v).to_vec(),
    };
    for u in next {
        play.push(u);
        all_plays(a, len, play, visit);
        play.pop();
    }
}

#[test]
fn criterion_05_dickson_pairs_in_long_plays() {
    let t = Instant::now();
    let mut r = rng(5);
    let (mut plays, mut counterexamples) = (0u64, 0u64);
    for s in [2usize, 3] {
        let len: usize = dickson_bound(s as u64, 1).try_into().unwrap();
        for _ in 0..50 {
            let g = random_rr(&mut r, s, 1);
            let a = g.arena().clone();
            if s == 2 {
                all_plays(&a, len, &mut Vec::new(), &mut |p| {
                    plays += 1;
                    if !has_pair(&g, p.to_vec()) {
                        counterexamples += 1;
                    }
                });
            } else {
                for _ in 0..10_000 {
                    let mut p = vec![r.gen_range(0..s)];
                    while p.len() < len {
                        let v = *a.successors(*p.last().unwrap()).choose(&mut r).unwrap();
                        p.push(v);
                    }
                    plays += 1;
                    if !has_pair(&g, p) {
                        counterexamples += 1;
                    }
                }
            }
        }
    }
    report(
        5,
        counterexamples == 0,
        t.elapsed(),
        Duration::from_secs(60),
        &format!("{plays} plays checked, {counterexamples} without a dickson pair"),
    );
}

#[test]
fn criterion_06_winning_strategy_bounds() {
    let t = Instant::now();
    let dir = TempDir::new().unwrap();
    let g = games::fig1();
    let game = save(&dir, "fig1.rrg", &write_game(&g));
    let strat = dir.path().join("win.json");
    let solved = rrsynth(&["solve", s(&game), "-o", s(&strat)]);
    let eval = rrsynth(&["eval", s(&game), "--strategy", s(&strat)]);
    let table = value_table(&stdout(&eval));
    let bound = ValueResult::Finite(128.into());
    let values_ok = solved.status.success()
        && eval.status.success()
        && table.len() == 8
        && table.iter().all(|(_, v)| *v <= bound);

    // Explore (vertex, memory, waiting vector) under the strategy.
    let sigma = solve_rr(&g).unwrap().strategy_0;
    let limit = (g.s() * g.k()) as u64 * (1 << g.k());
    let a = g.arena();
    let mem = sigma.memory();
    let mut seen = HashSet::new();
    let mut stack: Vec<_> = (0..a.len())
        .map(|v| (v, mem.init(v), g.initial_waiting(v)))
        .collect();
    let mut worst = 0;
    while let Some(x) = stack.pop() {
        if seen.len() > 1_000_000 || !seen.insert(x.clone()) {
            continue;
        }
        let (v, m, w) = x;
        worst = worst.max(w.times().iter().copied().max().unwrap_or(0));
        if worst > limit {
            break;
        }
        let moves = if a.owner(v) == Player::Zero {
            vec![sigma.next_move(v, m)]
        } else {
            a.successors(v).to_vec()
        };
        for u in moves {
            stack.push((u, mem.update(m, u), waiting_step(&w, u, &g)));
        }
    }
    let ok = values_ok && worst <= limit && seen.len() <= 1_000_000;
    report(
        6,
        ok,
        t.elapsed(),
        Duration::from_secs(5),
        &format!(
            "eval values {:?}, {} product states, largest waiting time {worst} (bound {limit})",
            table.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>(),
            seen.len()
        ),
    );
}

#[test]
fn criterion_07_mpg_solver_soundness() {
    let t = Instant::now();
    let mut r = rng(7);
    let mut bad = Vec::new();
    for i in 0..200 {
        let n = r.gen_range(1..=6);
        let w = r.gen_range(0..=10);
        let g = random_mpg(&mut r, n, w);
        let sol = solve_mpg(&g).unwrap();
        if sol.values != mpg_oracle(&g, DEFAULT_BUDGET).unwrap() {
            bad.push(format!("game {i}: oracle disagrees"));
        }
        let against_0: Vec<Rational64> = max_mean_all(&g.restrict(Player::Zero, &sol.strategy_0))
            .into_iter()
            .map(Option::unwrap)
            .collect();
        let against_1: Vec<Rational64> =
            max_mean_all(&g.restrict(Player::One, &sol.strategy_1).negated())
                .into_iter()
                .map(|x| -x.unwrap())
                .collect();
        if against_0 != sol.values || against_1 != sol.values {
            bad.push(format!("game {i}: strategies not self-consistent"));
        }
        for c in [-3i64, 5] {
            for m in [2i64, 7] {
                let h = g.map_weights(|x| m * x + c);
                let want: Vec<Rational64> = sol.values.iter().map(|v| v * m + c).collect();
                if solve_mpg(&h).unwrap().values != want {
                    bad.push(format!("game {i}: shift {c} scale {m}"));
                }
            }
        }
    }
    report(
        7,
        bad.is_empty(),
        t.elapsed(),
        Duration::from_secs(120),
        &format!("200 games, failures: {bad:?}"),
    );
}

#[test]
fn criterion_08_product_lassos_match_play_values() {
    let t = Instant::now();
    let g = games::fig1();
    let p = rr_to_mpg(&g, &Thresholds::user(vec![5, 5]).unwrap()).unwrap();
    let size = p.memory.size();
    let sink = p.memory.sink();
    let sink_weight = Rational64::from(p.memory.sink_weight(&g).unwrap());
    let arena = p.game.arena();
    let mem = p.memory.memory();
    let mut r = rng(8);
    let (mut clean, mut sunk, mut bad) = (0, 0, Vec::new());
    for n in 0..1000 {
        let v = r.gen_range(0..g.s());
        let mut walk = vec![v * size + mem.init(v)];
        let start = loop {
            let x = *arena
                .successors(*walk.last().unwrap())
                .choose(&mut r)
                .unwrap();
            if let Some(i) = walk.iter().position(|&y| y == x) {
                break i;
            }
            walk.push(x);
        };
        let mean = lasso_mean(&p.game, &walk[start..]).unwrap();
        if walk.iter().any(|&x| p.vertices[x].1 == sink) {
            sunk += 1;
            if mean != sink_weight {
                bad.push(format!("lasso {n}: sink lasso has mean {mean}"));
            }
        } else {
            clean += 1;
            let proj: Vec<usize> = walk.iter().map(|&x| p.vertices[x].0).collect();
            let play =
                LassoPlay::new(g.arena(), proj[..start].to_vec(), proj[start..].to_vec()).unwrap();
            let value = lasso_value(&g, &play, None).unwrap();
            if value != ValueResult::Finite(mean) {
                bad.push(format!(
                    "lasso {n}: product mean {mean}, play value {value}"
                ));
            }
        }
    }
    let ok = bad.is_empty() && clean > 0 && sunk > 0;
    report(
        8,
        ok,
        t.elapsed(),
        Duration::from_secs(60),
        &format!("{clean} lassos avoid the sink, {sunk} reach it; failures: {bad:?}"),
    );
}

#[test]
fn criterion_09_infinite_values() {
    let t = Instant::now();
    let dir = TempDir::new().unwrap();
    let g = games::fig2();
    let game = save(&dir, "fig2.rrg", &write_game(&g));
    let strat = save(
        &dir,
        "right.json",
        &write_strategy(g.arena(), &games::fig2_right_loop(&g).unwrap()),
    );
    let eval = rrsynth(&["eval", s(&game), "--strategy", s(&strat), "--from", "v"]);
    let right_inf = eval.status.success() && stdout(&eval).trim() == "v inf";

    // W1 is empty on this game, so the region check also runs on a game
    // where Player 1 wins somewhere and on random games.
    let weighted = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/weighted.rrg");
    let mut checked = 0;
    let mut bad = Vec::new();
    for path in [game.clone(), weighted] {
        let solved = stdout(&rrsynth(&["solve", s(&path)]));
        let w1: Vec<String> = solved
            .lines()
            .find_map(|l| l.strip_prefix("W1:"))
            .unwrap_or_default()
            .split_whitespace()
            .map(String::from)
            .collect();
        let values = value_table(&stdout(&rrsynth(&["optimal", s(&path)])));
        for v in &w1 {
            checked += 1;
            if !values
                .iter()
                .any(|(n, x)| n == v && *x == ValueResult::Infinite)
            {
                bad.push(format!("{}: {v}", path.display()));
            }
        }
    }
    let mut r = rng(9);
    for i in 0..100 {
        let n = r.gen_range(1..=5);
        let k = r.gen_range(1..=2);
        let rg = random_rr(&mut r, n, k);
        let w1 = solve_rr(&rg).unwrap().winning_1;
        let vals = synthesize_optimal(&rg, &Thresholds::uniform(k, 3).unwrap())
            .unwrap()
            .values;
        for v in (0..n).filter(|&v| w1[v]) {
            checked += 1;
            if vals[v] != ValueResult::Infinite {
                bad.push(format!("random game {i}: vertex {v}"));
            }
        }
    }
    report(
        9,
        right_inf && bad.is_empty(),
        t.elapsed(),
        Duration::from_secs(1),
        &format!(
            "right-loop value: {}; {checked} W1 vertices checked, failures: {bad:?}",
            stdout(&eval).trim()
        ),
    );
}

#[test]
fn criterion_10_cap_sweep_is_monotone() {
    let t = Instant::now();
    let g = games::fig1();
    let theory = Thresholds::theoretical(&g).unwrap();
    let full: u64 = theory.caps.iter().map(|c| c + 1).product::<u64>() + 1;
    let mut prev: Option<Vec<ValueResult>> = None;
    let mut bad = Vec::new();
    let mut at_q = Vec::new();
    for cap in 4..=12 {
        let vals = synthesize_optimal(&g, &Thresholds::uniform(2, cap).unwrap())
            .unwrap()
            .values;
        at_q.push(format!("{cap}:{}", vals[0]));
        if let Some(p) = &prev {
            for v in 0..g.s() {
                if vals[v] > p[v] {
                    bad.push(format!("cap {cap}, vertex {}", g.arena().name(v)));
                }
            }
        }
        prev = Some(vals);
    }
    report(
        10,
        bad.is_empty(),
        t.elapsed(),
        Duration::from_secs(300),
        &format!(
            "values at q by cap [{}]; theoretical caps {:?} would need {} product vertices; \
             increases: {bad:?}",
            at_q.join(" "),
            theory.caps,
            full * g.s() as u64
        ),
    );
}
