use std::fs;
use std::io::{self, BufRead, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rrsynth_core::arena::DEFAULT_SIZE_LIMIT;
use rrsynth_core::bounds::{dickson_bound, dickson_bound_closed, synthesis_thresholds};
use rrsynth_core::buchi::{rr_to_buchi, solve_rr, value_bound};
use rrsynth_core::format::{
    buchi_dot, game_dot, mpg_dot, parse_game, parse_strategy, write_game, write_strategy,
};
use rrsynth_core::optimal::{rr_to_mpg_with_limit, synthesize_optimal_with_limit};
use rrsynth_core::{
    evaluate_strategy, games, lasso_value, playout, rr_oracle_optimal, Adversary, ErrorKind,
    FiniteStateStrategy, LassoPlay, PlayStep, Provenance, RrGame, Thresholds, ValueResult,
    VertexId,
};

/// Product size used to derive caps when none are forced.
const DEFAULT_OPTIMAL_LIMIT: usize = 10_000;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] rrsynth_core::Error),
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        source: rrsynth_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) | CliError::InFile { source: e, .. } => match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Semantic => 2,
                ErrorKind::Limit => 3,
            },
            CliError::Io { .. } | CliError::Usage(_) => 1,
            CliError::Mismatch(_) => 4,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "rrsynth",
    version,
    about = "Request-response games: winning regions, values and optimal strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CapArgs {
    /// Waiting-time cap: `N` for every condition or `j=N` for condition j (1-based).
    #[arg(long = "cap", value_name = "N | j=N")]
    caps: Vec<String>,
    /// Largest product (vertices) used to derive caps.
    #[arg(long, value_name = "N")]
    size_limit: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a game and print its parameters and bounds.
    Check { game: PathBuf },
    /// Winning regions and a finite-state winning strategy.
    Solve {
        game: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Values per vertex and an optimal strategy.
    Optimal {
        game: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
        /// Use the thresholds that guarantee optimality among all strategies.
        #[arg(long, conflicts_with = "caps")]
        theoretical: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Value of a strategy from one or all vertices.
    Eval {
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        from: Option<String>,
    },
    /// Value of the play `prefix · cycle^ω`.
    Value {
        game: PathBuf,
        /// `v1,v2;c1,c2,...`
        #[arg(long)]
        lasso: String,
    },
    /// Brute-force values on the capped game.
    Oracle {
        game: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Compare with `optimal`; exit with status 4 on any difference.
        #[arg(long)]
        compare: bool,
    },
    /// The bound b(s,k) and its closed form.
    Dickson {
        s: u64,
        k: usize,
        #[arg(long)]
        closed: bool,
    },
    /// Write a built-in game.
    Gen {
        name: Builtin,
        #[arg(long)]
        k: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Play a strategy against an adversary and annotate each position.
    #[command(group = ArgGroup::new("opponent").required(true))]
    Play {
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Player 1 strategy file.
        #[arg(long, group = "opponent")]
        adversary: Option<PathBuf>,
        /// Player 1 choices, one per vertex with several successors.
        #[arg(long, group = "opponent", value_delimiter = ',')]
        script: Option<Vec<String>>,
        /// Ask for each Player 1 choice on standard input.
        #[arg(long, group = "opponent")]
        interactive: bool,
    },
    /// Graphviz output of the game or of a product.
    Dot {
        game: PathBuf,
        #[arg(long)]
        product: Option<ProductKind>,
        #[command(flatten)]
        caps: CapArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Fig1,
    Fig2,
    Blades,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProductKind {
    Buchi,
    Mpg,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_game(path: &Path) -> Result<RrGame> {
    parse_game(&read(path)?).map_err(|source| CliError::InFile {
        path: path.to_path_buf(),
        source,
    })
}

fn load_strategy(game: &RrGame, path: &Path) -> Result<FiniteStateStrategy> {
    Ok(parse_strategy(game.arena(), &read(path)?)?)
}

fn vertex(game: &RrGame, name: &str) -> Result<VertexId> {
    Ok(game.arena().require(name)?)
}

/// Per-condition caps from `--cap` flags; `None` where no cap was given.
fn requested_caps(game: &RrGame, args: &[String]) -> Result<Option<Vec<u64>>> {
    if args.is_empty() {
        return Ok(None);
    }
    let bad =
        |a: &str| CliError::Usage(format!("invalid cap `{a}`: expected N or j=N with N >= 1"));
    let mut caps = vec![u64::MAX; game.k()];
    for a in args {
        match a.split_once('=') {
            Some((j, n)) => {
                let j: usize = j.trim().parse().map_err(|_| bad(a))?;
                let n: u64 = n.trim().parse().map_err(|_| bad(a))?;
                if j == 0 || j > game.k() || n == 0 {
                    return Err(bad(a));
                }
                caps[j - 1] = n;
            }
            None => {
                let n: u64 = a.trim().parse().map_err(|_| bad(a))?;
                if n == 0 {
                    return Err(bad(a));
                }
                caps.iter_mut().for_each(|c| *c = n);
            }
        }
    }
    Ok(Some(caps))
}

fn resolve_caps(game: &RrGame, args: &CapArgs) -> Result<(Thresholds, usize)> {
    let requested = requested_caps(game, &args.caps)?;
    // Caps forced for every condition are only bounded by an explicit limit.
    let all_forced = requested
        .as_ref()
        .is_some_and(|r| r.iter().all(|&c| c != u64::MAX));
    let limit = match args.size_limit {
        Some(l) => l,
        None if all_forced => DEFAULT_SIZE_LIMIT,
        None => DEFAULT_OPTIMAL_LIMIT,
    };
    let t = Thresholds::resolve(game, requested.as_deref(), limit)?;
    Ok((t, limit))
}

fn caps_line(t: &Thresholds) -> String {
    let caps: Vec<String> = t.caps.iter().map(u64::to_string).collect();
    format!("caps: {} ({})", caps.join(" "), t.provenance)
}

fn value_lines(game: &RrGame, values: &[ValueResult]) -> String {
    let a = game.arena();
    (0..a.len())
        .map(|v| format!("{} {}\n", a.name(v), values[v]))
        .collect()
}

fn big(n: &impl std::fmt::Display) -> String {
    let s = n.to_string();
    if s.len() > 40 {
        format!("<{} digits>", s.len())
    } else {
        s
    }
}

fn names(game: &RrGame, set: &[bool]) -> String {
    let a = game.arena();
    (0..a.len())
        .filter(|&v| set[v])
        .map(|v| a.name(v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(cli: Cli) -> Result<String> {
    let mut out = String::new();
    match cli.command {
        Command::Check { game } => {
            let g = load_game(&game)?;
            let t: Vec<String> = synthesis_thresholds(&g)?.iter().map(big).collect();
            out += &format!(
                "vertices: {}\nedges: {}\nconditions: {}\ns: {}\nk: {}\nval_G: {}\nt_max: {}\n",
                g.s(),
                g.arena().edge_count(),
                g.k(),
                g.s(),
                g.k(),
                big(&value_bound(&g)),
                t.join(" ")
            );
        }
        Command::Solve { game, output } => {
            let g = load_game(&game)?;
            let sol = solve_rr(&g)?;
            out += &format!(
                "W0: {}\nW1: {}\nmemory states: {}\n",
                names(&g, &sol.winning_0),
                names(&g, &sol.winning_1),
                sol.strategy_0.size()
            );
            if let Some(path) = output {
                write(&path, &write_strategy(g.arena(), &sol.strategy_0))?;
            }
        }
        Command::Optimal {
            game,
            caps,
            theoretical,
            output,
            json,
        } => {
            let g = load_game(&game)?;
            let (t, limit) = if theoretical {
                (
                    Thresholds::theoretical(&g)?,
                    caps.size_limit.unwrap_or(DEFAULT_SIZE_LIMIT),
                )
            } else {
                resolve_caps(&g, &caps)?
            };
            let res = synthesize_optimal_with_limit(&g, &t, limit)?;
            let unconditional = t.provenance == Provenance::Theoretical;
            if json {
                let a = g.arena();
                let doc = json!({
                    "caps": t.caps,
                    "provenance": t.provenance.to_string(),
                    "unconditional": unconditional,
                    "mpg_vertices": res.mpg_vertices,
                    "max_weight": res.max_weight,
                    "values": (0..a.len())
                        .map(|v| json!({"vertex": a.name(v), "value": res.values[v].to_string()}))
                        .collect::<Vec<_>>(),
                });
                out += &serde_json::to_string_pretty(&doc).expect("json values serialize");
                out.push('\n');
            } else {
                out += &caps_line(&t);
                out.push('\n');
                out += if unconditional {
                    "optimal among all strategies\n"
                } else {
                    "optimal among cap-bounded strategies\n"
                };
                out += &format!(
                    "mean-payoff game: {} vertices, max weight {}\n",
                    res.mpg_vertices, res.max_weight
                );
                out += &value_lines(&g, &res.values);
            }
            if let Some(path) = output {
                write(&path, &write_strategy(g.arena(), &res.strategy))?;
            }
        }
        Command::Eval {
            game,
            strategy,
            from,
        } => {
            let g = load_game(&game)?;
            let sigma = load_strategy(&g, &strategy)?;
            let starts: Vec<VertexId> = match from {
                Some(v) => vec![vertex(&g, &v)?],
                None => (0..g.s()).collect(),
            };
            for v in starts {
                let val = evaluate_strategy(&g, &sigma, v)?;
                out += &format!("{} {val}\n", g.arena().name(v));
            }
        }
        Command::Value { game, lasso } => {
            let g = load_game(&game)?;
            let (prefix, cycle) = lasso
                .split_once(';')
                .ok_or_else(|| CliError::Usage("lasso must look like `v1,v2;c1,c2`".into()))?;
            let list = |s: &str| -> Vec<String> {
                s.split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(String::from)
                    .collect()
            };
            let (p, c) = (list(prefix), list(cycle));
            let p: Vec<&str> = p.iter().map(String::as_str).collect();
            let c: Vec<&str> = c.iter().map(String::as_str).collect();
            let play = LassoPlay::from_names(g.arena(), &p, &c)?;
            out += &format!("{}\n", lasso_value(&g, &play, None)?);
        }
        Command::Oracle {
            game,
            caps,
            budget,
            compare,
        } => {
            let g = load_game(&game)?;
            let (t, limit) = resolve_caps(&g, &caps)?;
            let values = rr_oracle_optimal(&g, &t, budget)?;
            out += &caps_line(&t);
            out.push('\n');
            out += &value_lines(&g, &values);
            if compare {
                let res = synthesize_optimal_with_limit(&g, &t, limit)?;
                let diffs: Vec<String> = (0..g.s())
                    .filter(|&v| values[v] != res.values[v])
                    .map(|v| {
                        format!(
                            "mismatch at {}: optimal {}, oracle {}",
                            g.arena().name(v),
                            res.values[v],
                            values[v]
                        )
                    })
                    .collect();
                if !diffs.is_empty() {
                    print!("{out}");
                    return Err(CliError::Mismatch(diffs.join("\n")));
                }
                out += "optimal agrees at every vertex\n";
            }
        }
        Command::Dickson { s, k, closed } => {
            let b = dickson_bound(s, k);
            out += &format!("b({s},{k}) = {}\n", big(&b));
            if closed {
                let c = dickson_bound_closed(s, k)?;
                out += &format!("closed form = {}\n", big(&c));
                out += &format!(
                    "recursion <= closed form: {}\n",
                    if b <= c { "yes" } else { "no" }
                );
            }
        }
        Command::Gen { name, k, output } => {
            let name = match name {
                Builtin::Fig1 => "fig1",
                Builtin::Fig2 => "fig2",
                Builtin::Blades => "blades",
            };
            let text = write_game(&games::gen_builtin(name, k)?);
            match output {
                Some(path) => write(&path, &text)?,
                None => out += &text,
            }
        }
        Command::Play {
            game,
            strategy,
            from,
            steps,
            adversary,
            script,
            interactive,
        } => {
            let g = load_game(&game)?;
            let sigma = load_strategy(&g, &strategy)?;
            let start = vertex(&g, &from)?;
            let tau;
            let trace = if let Some(path) = adversary {
                tau = load_strategy(&g, &path)?;
                playout(&g, &sigma, Adversary::Strategy(&tau), start, steps)?
            } else if interactive {
                let stdin = io::stdin();
                let mut lines = stdin.lock().lines();
                let mut asked = 0usize;
                let mut ask = |_: &[PlayStep], v: VertexId| -> rrsynth_core::Result<VertexId> {
                    let a = g.arena();
                    let options: Vec<&str> = a.successors(v).iter().map(|&u| a.name(u)).collect();
                    loop {
                        eprint!(
                            "at {}, Player 1 moves to [{}]: ",
                            a.name(v),
                            options.join(" ")
                        );
                        let _ = io::stderr().flush();
                        let Some(Ok(line)) = lines.next() else {
                            return Err(rrsynth_core::Error::ScriptExhausted(asked));
                        };
                        match a.id_of(line.trim()) {
                            Some(u) if a.has_edge(v, u) => {
                                asked += 1;
                                return Ok(u);
                            }
                            _ => eprintln!("not a successor of {}", a.name(v)),
                        }
                    }
                };
                playout(&g, &sigma, Adversary::Interactive(&mut ask), start, steps)?
            } else {
                let moves = script
                    .unwrap_or_default()
                    .iter()
                    .map(|m| vertex(&g, m))
                    .collect::<Result<Vec<_>>>()?;
                playout(&g, &sigma, Adversary::Script(moves), start, steps)?
            };
            out += "step vertex waiting penalty\n";
            for (i, s) in trace.iter().enumerate() {
                out += &format!(
                    "{i} {} {} {}\n",
                    g.arena().name(s.vertex),
                    s.waiting,
                    s.penalty
                );
            }
        }
        Command::Dot {
            game,
            product,
            caps,
        } => {
            let g = load_game(&game)?;
            out += &match product {
                None => game_dot(&g),
                Some(ProductKind::Buchi) => {
                    let limit = caps.size_limit.unwrap_or(DEFAULT_SIZE_LIMIT);
                    buchi_dot(&rr_to_buchi(&g, limit)?.0)
                }
                Some(ProductKind::Mpg) => {
                    let (t, limit) = resolve_caps(&g, &caps)?;
                    mpg_dot(&rr_to_mpg_with_limit(&g, &t, limit)?.game)
                }
            };
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
