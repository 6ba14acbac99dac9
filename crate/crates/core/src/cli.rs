//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a verification failed, `2` bad usage or input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dynamics::check_unique_convergence;
use crate::equilibria::{
    build_line_spe, build_ring2_ne, build_ring_special, build_tree_spe, growth_reward,
    min_spanning_incentive, ring_special_profile, GrowthTable,
};
use crate::error::Error;
use crate::game::GameSpec;
use crate::stage::{
    best_response_cycle, is_nash, is_subgame_perfect, iterated_strict_dominance, pure_nash,
    reduce_to_normal_form, DeviationWitness, History, ProfileFile, Stage2Resolution,
    StrategyProfile, Verdict,
};
use crate::topology::{Shape, Topology};
use crate::Reward;

#[derive(Debug, Parser)]
#[command(
    name = "route-incentives",
    version,
    about = "Route-distribution incentive games"
)]
struct Cli {
    /// Seed for randomized schedules.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write each artifact into this directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Output format for stdout; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyKind {
    #[value(alias = "tree-spe")]
    LineSpe,
    RingSpecial,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeKind {
    Line,
    Tree,
    Ring2,
    RingSpecial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Nash,
    Spe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Resolution {
    Searched,
    Literal,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the asynchronous protocol under random fair schedules.
    Simulate {
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long)]
        rd: Option<Reward>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, value_enum, default_value = "line-spe")]
        strategy: StrategyKind,
        /// Profile file for `--strategy file`.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Tabulate the incentive-growth function.
    Growth {
        #[arg(long)]
        max_k: usize,
    },
    /// Stage-1 payoff matrix of the 3-stage ring.
    RingMatrix {
        #[arg(long)]
        rd: Reward,
        #[arg(long, value_enum, default_value = "searched")]
        resolution: Resolution,
    },
    /// Smallest reward with a spanning equilibrium, by exhaustive search.
    MinIncentive {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        bound: Reward,
    },
    /// Build an equilibrium profile file.
    Construct {
        #[arg(long, value_enum)]
        shape: ShapeKind,
        #[arg(long)]
        rd: Option<Reward>,
        /// Number of stages.
        #[arg(long)]
        depth: Option<usize>,
        /// Tree topology for `--shape tree`.
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a profile file for Nash or subgame perfection.
    Verify {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum, default_value = "spe")]
        mode: Mode,
    },
}

/// Outcome of a command: stdout text, artifacts and whether a check failed.
struct Output {
    stdout: String,
    artifacts: Vec<(String, String)>,
    failed: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Game(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Game(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            if let Some(dir) = &cli.out_dir {
                if let Err(e) = write_artifacts(dir, &o.artifacts) {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            }
            let _ = out.write_all(o.stdout.as_bytes());
            i32::from(o.failed)
        }
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(CliError::Game(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn write_artifacts(dir: &Path, artifacts: &[(String, String)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in artifacts {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).or_else(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_topology(path: &Path) -> CliResult<Topology> {
    Ok(Topology::from_json(&read(path)?)?)
}

fn load_profile(path: &Path) -> CliResult<(GameSpec, StrategyProfile)> {
    Ok(ProfileFile::from_json(&read(path)?)?.into_parts()?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn pick(
    format: Option<Format>,
    default: Format,
    allowed: &[Format],
    command: &str,
) -> CliResult<Format> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        usage(format!("{command} cannot emit {f:?} output"))
    }
}

fn execute(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Growth { max_k } => growth(cli, *max_k),
        Command::RingMatrix { rd, resolution } => ring_matrix(cli, *rd, *resolution),
        Command::MinIncentive { topology, bound } => min_incentive(cli, topology, *bound),
        Command::Construct {
            shape,
            rd,
            depth,
            topology,
            out,
        } => construct(
            cli,
            *shape,
            *rd,
            *depth,
            topology.as_deref(),
            out.as_deref(),
        ),
        Command::Verify { profile, mode } => verify(cli, profile, *mode),
        Command::Simulate {
            topology,
            rd,
            trials,
            strategy,
            profile,
        } => simulate(
            cli,
            topology.as_deref(),
            *rd,
            *trials,
            *strategy,
            profile.as_deref(),
        ),
    }
}

fn growth(cli: &Cli, max_k: usize) -> CliResult<Output> {
    let f = pick(
        cli.format,
        Format::Csv,
        &[Format::Csv, Format::Json],
        "growth",
    )?;
    let table = GrowthTable::new(max_k);
    let csv = table.to_csv();
    let json = pretty(&table.to_json_value());
    Ok(Output {
        stdout: if f == Format::Csv {
            csv.clone()
        } else {
            json.clone()
        },
        artifacts: vec![("growth.csv".into(), csv), ("growth.json".into(), json)],
        failed: false,
    })
}

fn cells(v: &[(Reward, Reward)]) -> Value {
    json!(v
        .iter()
        .map(|(a, b)| [a.to_string(), b.to_string()])
        .collect::<Vec<_>>())
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn ring_matrix(cli: &Cli, rd: Reward, resolution: Resolution) -> CliResult<Output> {
    let f = pick(
        cli.format,
        Format::Json,
        &[Format::Csv, Format::Json],
        "ring-matrix",
    )?;
    let g = GameSpec::new(Topology::ring(3)?, rd);
    let res = match resolution {
        Resolution::Searched => Stage2Resolution::Searched,
        Resolution::Literal => Stage2Resolution::Literal,
    };
    let m = reduce_to_normal_form(&g, res)?;
    let d = iterated_strict_dominance(&m);
    let ne = pure_nash(&m);
    let start = (d.reduced.rows[0], d.reduced.cols[0]);
    let walk = best_response_cycle(&m, start)?;
    let summary = json!({
        "rd": rd.to_string(),
        "resolution": match resolution { Resolution::Searched => "searched", Resolution::Literal => "literal" },
        "note": m.note,
        "rows": strings(&m.rows),
        "cols": strings(&m.cols),
        "payoffs": m.payoffs.iter()
            .map(|r| r.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "reduced_actions": {"rows": strings(&d.reduced.rows), "cols": strings(&d.reduced.cols)},
        "eliminated": d.eliminated.iter()
            .map(|e| json!({"side": e.side, "action": e.action.to_string()}))
            .collect::<Vec<_>>(),
        "pure_ne": cells(&ne),
        "br_cycle": {
            "start": cells(&[start])[0],
            "path": cells(&walk.path),
            "cycle": cells(&walk.cycle),
            "length": walk.cycle.len().to_string(),
            "fixed_point": walk.fixed_point,
        },
    });
    let csv = m.to_csv();
    let json = pretty(&summary);
    Ok(Output {
        stdout: if f == Format::Csv {
            csv.clone()
        } else {
            json.clone()
        },
        artifacts: vec![
            (format!("ring_matrix_rd{rd}.csv"), csv),
            (format!("ring_matrix_rd{rd}.json"), json),
        ],
        failed: false,
    })
}

fn min_incentive(cli: &Cli, topology: &Path, bound: Reward) -> CliResult<Output> {
    let f = pick(
        cli.format,
        Format::Json,
        &[Format::Json, Format::Dot],
        "min-incentive",
    )?;
    let t = load_topology(topology)?;
    let found = min_spanning_incentive(&t, bound)?;
    let value = match &found {
        Some(e) => json!({
            "rd": e.rd.to_string(),
            "bound": bound.to_string(),
            "on_path": e.actions.iter()
                .map(|(id, a)| (id.to_string(), json!(strings(a))))
                .collect::<serde_json::Map<_, _>>(),
            "tree": e.outcome.to_json_value(),
        }),
        None => json!({"rd": "none", "bound": bound.to_string()}),
    };
    let json = pretty(&value);
    let mut artifacts = vec![("min_incentive.json".into(), json.clone())];
    let dot = found.as_ref().map(|e| e.outcome.to_dot());
    if let Some(d) = &dot {
        artifacts.push(("min_incentive.dot".into(), d.clone()));
    }
    let stdout = match (f, dot) {
        (Format::Dot, Some(d)) => d,
        (Format::Dot, None) => "digraph outcome {\n}\n".into(),
        _ => json,
    };
    Ok(Output {
        stdout,
        artifacts,
        failed: false,
    })
}

fn construct(
    cli: &Cli,
    shape: ShapeKind,
    rd: Option<Reward>,
    depth: Option<usize>,
    topology: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<Output> {
    pick(cli.format, Format::Json, &[Format::Json], "construct")?;
    let need_rd = || rd.map_or_else(|| usage("--rd is required for this shape"), Ok);
    let need_depth = || depth.map_or_else(|| usage("--depth is required for this shape"), Ok);
    let (g, s) = match shape {
        ShapeKind::Line => {
            let (rd, k) = (need_rd()?, need_depth()?);
            (
                GameSpec::new(Topology::line(k)?, rd),
                build_line_spe(rd, k)?,
            )
        }
        ShapeKind::Tree => {
            let Some(path) = topology else {
                return usage("--topology is required for --shape tree");
            };
            let t = load_topology(path)?;
            let rd = need_rd()?;
            let s = build_tree_spe(rd, &t)?;
            (GameSpec::new(t, rd), s)
        }
        ShapeKind::Ring2 => {
            let rd = need_rd()?;
            (GameSpec::new(Topology::ring(2)?, rd), build_ring2_ne(rd)?)
        }
        ShapeKind::RingSpecial => {
            let k = need_depth()?;
            let (r, s) = build_ring_special(k)?;
            let r: Reward = r
                .try_into()
                .map_err(|_| Error::RewardOverflow(k.to_string()))?;
            if rd.is_some_and(|x| x != r) {
                return usage(format!("the special ring profile is built for rd = {r}"));
            }
            (GameSpec::new(Topology::ring(k)?, r), s)
        }
    };
    let text = ProfileFile::from_parts(&g, &s).to_json() + "\n";
    match out {
        Some(path) => {
            fs::write(path, &text)
                .or_else(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Output {
                stdout: String::new(),
                artifacts: vec![("profile.json".into(), text)],
                failed: false,
            })
        }
        None => Ok(Output {
            stdout: text.clone(),
            artifacts: vec![("profile.json".into(), text)],
            failed: false,
        }),
    }
}

fn witness_json(g: &GameSpec, w: &DeviationWitness) -> Value {
    let h: &History = &w.history;
    json!({
        "player": w.player.to_string(),
        "history": {
            "stage": h.stage().to_string(),
            "offers": g.topology().offer_slots(h.stage()).iter().zip(h.offers())
                .map(|((from, to), r)| json!({"from": from.to_string(), "to": to.to_string(), "reward": r.to_string()}))
                .collect::<Vec<_>>(),
        },
        "incoming": w.incoming.to_string(),
        "on_path": strings(&w.on_path),
        "alternative": strings(&w.alternative),
        "on_path_utility": w.on_path_utility.to_string(),
        "deviation_utility": w.deviation_utility.to_string(),
        "gain": w.gain().to_string(),
    })
}

fn verify(cli: &Cli, profile: &Path, mode: Mode) -> CliResult<Output> {
    pick(cli.format, Format::Json, &[Format::Json], "verify")?;
    let (g, s) = load_profile(profile)?;
    let v = match mode {
        Mode::Nash => is_nash(&g, &s, &History::root(&g))?,
        Mode::Spe => is_subgame_perfect(&g, &s)?,
    };
    let value = json!({
        "mode": match mode { Mode::Nash => "nash", Mode::Spe => "spe" },
        "rd": g.reward().to_string(),
        "holds": v.holds(),
        "witness": match &v {
            Verdict::Equilibrium => Value::Null,
            Verdict::Deviation(w) => witness_json(&g, w),
        },
    });
    let json = pretty(&value);
    Ok(Output {
        stdout: json.clone(),
        artifacts: vec![("verify.json".into(), json)],
        failed: !v.holds(),
    })
}

fn simulate(
    cli: &Cli,
    topology: Option<&Path>,
    rd: Option<Reward>,
    trials: usize,
    strategy: StrategyKind,
    profile: Option<&Path>,
) -> CliResult<Output> {
    let f = pick(
        cli.format,
        Format::Json,
        &[Format::Json, Format::Dot],
        "simulate",
    )?;
    if trials == 0 {
        return usage("--trials must be at least 1");
    }
    let (g, s) = match strategy {
        StrategyKind::File => {
            let Some(path) = profile else {
                return usage("--profile is required for --strategy file");
            };
            let (g, s) = load_profile(path)?;
            match rd {
                Some(r) => (g.with_reward(r), s),
                None => (g, s),
            }
        }
        StrategyKind::LineSpe | StrategyKind::RingSpecial => {
            let Some(path) = topology else {
                return usage("--topology is required unless --strategy file");
            };
            let t = load_topology(path)?;
            if strategy == StrategyKind::LineSpe {
                let Some(rd) = rd else {
                    return usage("--rd is required for --strategy line-spe");
                };
                let s = build_tree_spe(rd, &t)?;
                (GameSpec::new(t, rd), s)
            } else {
                t.require_shape(Shape::Ring)?;
                let star = growth_reward(t.depth())?;
                let rd = rd.unwrap_or(star);
                let s = ring_special_profile(&t, Default::default(), rd.max(star))?;
                (GameSpec::new(t, rd), s)
            }
        }
    };
    let check = check_unique_convergence(&g, &s, trials, cli.seed)?;
    let tree = match &check.counterexample {
        Some(c) => &c.report.outcome,
        None => &check.reference,
    };
    let value = json!({
        "rd": g.reward().to_string(),
        "trials": trials.to_string(),
        "seed": cli.seed.to_string(),
        "converged": check.converged,
        "unanimous": check.unanimous,
        "rounds": check.max_rounds_used.to_string(),
        "tree": tree.to_json_value(),
        "counterexample": check.counterexample.as_ref().map(|c| json!({
            "trial": c.trial.to_string(),
            "window": c.schedule.window().to_string(),
            "rounds": c.schedule.rounds().iter().map(|r| strings(&r.iter().collect::<Vec<_>>())).collect::<Vec<_>>(),
        })),
    });
    let json = pretty(&value);
    let dot = tree.to_dot();
    Ok(Output {
        stdout: if f == Format::Dot {
            dot.clone()
        } else {
            json.clone()
        },
        artifacts: vec![("simulate.json".into(), json), ("simulate.dot".into(), dot)],
        failed: !(check.converged && check.unanimous),
    })
}
