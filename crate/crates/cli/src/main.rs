//! `qce` command-line front end.
//!
//! Exit codes: 0 pass or equilibrium, 1 negative verdict, 2 input error,
//! 3 numeric failure.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qce::classical::{find_ce, player_objective, verify_ce, verify_efce, verify_ir_efce, welfare_objective};
use qce::games::{ExtensiveFormGame, NormalFormGame, DEFAULT_STRATEGY_CAP};
use qce::io::{
    read_json, to_json, CircuitsFile, DeviceFile, GameFile, InstanceFile, OutcomeFile, ProtocolFile, SearchFile,
    StateFile,
};
use qce::quantum::{
    appendix_d_report, canonicalize, infeasibility_search, lookahead_deviation_value, qce_to_ce,
    simulate_extensive_qce, simulate_normal_qce, verify_canonical_qce_with, verify_extensive_qce, QceInstance,
    QceVerifyOptions, QuantumState, DEFAULT_PLAN_CAP,
};
use qce::scenarios::{
    export_scenario, ghz_classical, ghz_quantum, list_scenarios, run_scenario, ScenarioOptions, RESIDUAL_FLOOR,
};
use qce::{Error, Verdict};

#[derive(Parser, Debug)]
#[command(name = "qce", version, about = "Classical and quantum correlated equilibrium analyses")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Tolerance for incentive checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Restart budget for randomized searches.
    #[arg(long, global = true, default_value_t = 100)]
    restarts: usize,
    #[arg(long, global = true, default_value_t = qce::linalg::DEFAULT_MAX_QUBITS)]
    max_qubits: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Correlated equilibria of normal-form games.
    #[command(subcommand)]
    Ce(CeCommand),
    /// Extensive-form correlated equilibria.
    #[command(subcommand)]
    Efce(DeviceCommand),
    /// Extensive-form CE where the whole strategy is revealed up front.
    #[command(subcommand, name = "ir-efce")]
    IrEfce(DeviceCommand),
    /// Converts a game tree to its normal form.
    ToNormalForm { game: PathBuf },
    /// Quantum correlated equilibria.
    #[command(subcommand)]
    Qce(QceCommand),
    /// The GHZ game.
    #[command(subcommand)]
    Ghz(GhzCommand),
    /// Built-in reproduction scenarios.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Subcommand, Debug)]
enum CeCommand {
    /// Checks a correlating device against a normal-form game.
    Verify { game: PathBuf, device: PathBuf },
    /// Finds a correlated equilibrium by linear programming.
    Find {
        game: PathBuf,
        /// `welfare` or `player:N`.
        #[arg(long)]
        objective: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum DeviceCommand {
    /// Checks a strategy device against a game tree.
    Verify { game: PathBuf, device: PathBuf },
}

#[derive(Args, Debug)]
struct InstanceArgs {
    state: PathBuf,
    game: PathBuf,
    /// Circuits file; every player measures their leading qubits if absent.
    #[arg(long)]
    circuits: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum QceCommand {
    /// Outcome distribution of a shared state and circuits.
    Simulate(InstanceArgs),
    /// Rewrites an instance so every player only measures.
    Canonicalize(InstanceArgs),
    /// Checks that no player gains by replacing their circuit.
    Verify(InstanceArgs),
    /// The classical device induced by an instance.
    ToCe(InstanceArgs),
    /// Residuals of a two-player state against the 0/6 target system.
    CheckState { state: PathBuf },
    /// Local search for a state meeting the 0/6 target system.
    Search {
        #[arg(long, default_value_t = 1)]
        row_qubits: usize,
        #[arg(long, default_value_t = 1)]
        col_qubits: usize,
    },
    /// Outcome distribution of a protocol on a game tree.
    SimulateExtensive { game: PathBuf, protocol: PathBuf },
    /// Best lookahead deviation of one player against a protocol.
    Lookahead {
        game: PathBuf,
        protocol: PathBuf,
        #[arg(long)]
        player: usize,
        #[arg(long, default_value_t = DEFAULT_PLAN_CAP)]
        plan_cap: usize,
    },
    /// Checks every player of a tree protocol against the tested deviation families.
    VerifyExtensive {
        game: PathBuf,
        protocol: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PLAN_CAP)]
        plan_cap: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GhzMode {
    Quantum,
    Classical,
}

#[derive(Subcommand, Debug)]
enum GhzCommand {
    /// Win probabilities of the shared-state protocol or of every classical profile.
    Simulate {
        #[arg(long, value_enum)]
        mode: GhzMode,
    },
}

#[derive(Subcommand, Debug)]
enum ScenarioCommand {
    List,
    /// Runs one scenario, or all of them with `--all`.
    Run {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        name: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Writes a scenario's input files to a directory.
    Export {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        name: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        dir: PathBuf,
    },
}

/// A finished analysis: the two renderings and whether it passed.
struct Report {
    human: String,
    machine: String,
    passed: bool,
}

impl Report {
    fn new<T: Serialize>(value: &T, human: String, passed: bool) -> Self {
        Self { human, machine: to_json(value), passed }
    }
}

fn normal_game(path: &Path) -> qce::Result<NormalFormGame> {
    read_json::<GameFile>(path)?.into_game()?.normal()
}

fn tree_game(path: &Path) -> qce::Result<ExtensiveFormGame> {
    read_json::<GameFile>(path)?.into_game()?.extensive()
}

fn instance(args: &InstanceArgs, g: &Global) -> qce::Result<QceInstance> {
    let state: QuantumState = read_json::<StateFile>(&args.state)?.to_state(g.max_qubits)?;
    let game = normal_game(&args.game)?;
    match &args.circuits {
        Some(path) => QceInstance::new(game, state, read_json::<CircuitsFile>(path)?.to_circuits()?),
        None => QceInstance::canonical(game, state),
    }
}

fn objective(g: &NormalFormGame, spec: Option<&str>) -> qce::Result<Option<Vec<f64>>> {
    let Some(spec) = spec else { return Ok(None) };
    if spec == "welfare" {
        return Ok(Some(welfare_objective(g)));
    }
    let player =
        spec.strip_prefix("player:").and_then(|n| n.parse::<usize>().ok()).filter(|&n| n < g.players()).ok_or_else(
            || Error::Parse(format!("objective `{spec}`: expected `welfare` or `player:N` with N < {}", g.players())),
        )?;
    Ok(Some(player_objective(g, player)))
}

fn equilibrium(report: &qce::EquilibriumReport) -> Report {
    Report::new(report, report.to_string(), report.verdict == Verdict::Equilibrium)
}

fn run(cli: &Cli) -> qce::Result<Report> {
    let g = &cli.global;
    Ok(match &cli.command {
        Command::Ce(CeCommand::Verify { game, device }) => {
            let game = normal_game(game)?;
            let mu = read_json::<DeviceFile>(device)?.to_normal(&game)?;
            equilibrium(&verify_ce(&game, &mu, g.eps)?)
        }
        Command::Ce(CeCommand::Find { game, objective: spec }) => {
            let game = normal_game(game)?;
            let obj = objective(&game, spec.as_deref())?;
            let mu = find_ce(&game, obj.as_deref())?;
            let file = DeviceFile::from_normal(&game, &mu);
            Report::new(&file, render::device(&file, &game.expected_payoffs(&mu)), true)
        }
        Command::Efce(DeviceCommand::Verify { game, device }) => {
            let game = tree_game(game)?;
            let mu = read_json::<DeviceFile>(device)?.to_strategies(&game)?;
            equilibrium(&verify_efce(&game, &mu, g.eps)?)
        }
        Command::IrEfce(DeviceCommand::Verify { game, device }) => {
            let game = tree_game(game)?;
            let mu = read_json::<DeviceFile>(device)?.to_strategies(&game)?;
            equilibrium(&verify_ir_efce(&game, &mu, g.eps)?)
        }
        Command::ToNormalForm { game } => {
            let conv = tree_game(game)?.to_normal_form(DEFAULT_STRATEGY_CAP)?;
            let file = GameFile::from_normal(&conv.game);
            Report::new(&file, render::normal_game(&conv.game), true)
        }
        Command::Qce(cmd) => run_qce(cmd, g)?,
        Command::Ghz(GhzCommand::Simulate { mode: GhzMode::Quantum }) => {
            let rep = ghz_quantum()?;
            let wins = rep.branches.iter().all(|b| (b.win_probability - 1.0).abs() <= g.eps);
            Report::new(&rep, render::ghz_quantum(&rep), wins)
        }
        Command::Ghz(GhzCommand::Simulate { mode: GhzMode::Classical }) => {
            let rep = ghz_classical();
            Report::new(&rep, render::ghz_classical(&rep), !rep.every_profile_defeated)
        }
        Command::Scenario(cmd) => run_scenarios(cmd, g)?,
    })
}

fn run_qce(cmd: &QceCommand, g: &Global) -> qce::Result<Report> {
    Ok(match cmd {
        QceCommand::Simulate(args) => {
            let inst = instance(args, g)?;
            let dist = simulate_normal_qce(&inst)?;
            let file = OutcomeFile::from_profiles(&inst.game, &dist);
            Report::new(&file, render::outcomes(&file, &inst.game.expected_payoffs(&dist)), true)
        }
        QceCommand::Canonicalize(args) => {
            let canon = canonicalize(&instance(args, g)?)?;
            let file = InstanceFile::from_instance(&canon);
            Report::new(&file, render::instance(&file), true)
        }
        QceCommand::Verify(args) => {
            let inst = instance(args, g)?;
            let opts = QceVerifyOptions { seed: g.seed, ..QceVerifyOptions::new(g.eps) };
            equilibrium(&verify_canonical_qce_with(&inst, &opts)?)
        }
        QceCommand::ToCe(args) => {
            let inst = instance(args, g)?;
            let mu = qce_to_ce(&inst)?;
            let file = DeviceFile::from_normal(&inst.game, &mu);
            Report::new(&file, render::device(&file, &inst.game.expected_payoffs(&mu)), true)
        }
        QceCommand::CheckState { state } => {
            let state = read_json::<StateFile>(state)?.to_state(g.max_qubits)?;
            let rep = appendix_d_report(&state)?;
            Report::new(&rep, render::constraints(&rep, g.eps), rep.passes(g.eps))
        }
        QceCommand::Search { row_qubits, col_qubits } => {
            let res = infeasibility_search(*row_qubits, *col_qubits, g.restarts, g.seed)?;
            let file = SearchFile::from_result(&res);
            Report::new(&file, render::search(&file), file.min_residual >= RESIDUAL_FLOOR)
        }
        QceCommand::SimulateExtensive { game, protocol } => {
            let game = tree_game(game)?;
            let proto = read_json::<ProtocolFile>(protocol)?.to_protocol(&game, g.max_qubits)?;
            let out = simulate_extensive_qce(&game, &proto)?;
            let payoffs = game.expected_payoffs(&out.distribution);
            let file = OutcomeFile::from_leaves(&game, &out.distribution, out.warnings);
            Report::new(&file, render::outcomes(&file, &payoffs), true)
        }
        QceCommand::Lookahead { game, protocol, player, plan_cap } => {
            let game = tree_game(game)?;
            if *player >= game.players() {
                return Err(Error::Parse(format!("--player {player}: the game has {} players", game.players())));
            }
            let proto = read_json::<ProtocolFile>(protocol)?.to_protocol(&game, g.max_qubits)?;
            let res = lookahead_deviation_value(&game, &proto, *player, *plan_cap)?;
            let human = render::lookahead(&res, &game, &proto);
            Report::new(&res, human, res.gain() <= g.eps)
        }
        QceCommand::VerifyExtensive { game, protocol, plan_cap } => {
            let game = tree_game(game)?;
            let proto = read_json::<ProtocolFile>(protocol)?.to_protocol(&game, g.max_qubits)?;
            equilibrium(&verify_extensive_qce(&game, &proto, g.eps, *plan_cap)?)
        }
    })
}

fn run_scenarios(cmd: &ScenarioCommand, g: &Global) -> qce::Result<Report> {
    let opts = ScenarioOptions { eps: g.eps, restarts: g.restarts, seed: g.seed };
    Ok(match cmd {
        ScenarioCommand::List => {
            let names = list_scenarios();
            Report::new(&names, names.iter().map(|n| format!("{n}\n")).collect(), true)
        }
        ScenarioCommand::Run { name: Some(name), .. } => {
            let rep = run_scenario(name, &opts)?;
            Report::new(&rep, rep.to_string(), rep.passed)
        }
        ScenarioCommand::Run { name: None, .. } => {
            let reps = list_scenarios().into_iter().map(|n| run_scenario(n, &opts)).collect::<qce::Result<Vec<_>>>()?;
            let passed = reps.iter().all(|r| r.passed);
            let mut human: String = reps.iter().map(ToString::to_string).collect();
            human.push_str(&format!("{}/{} scenarios passed\n", reps.iter().filter(|r| r.passed).count(), reps.len()));
            Report::new(&reps, human, passed)
        }
        ScenarioCommand::Export { name, dir, .. } => {
            let names: Vec<String> = match name {
                Some(n) => vec![n.clone()],
                None => list_scenarios().into_iter().map(String::from).collect(),
            };
            std::fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
            let mut written = Vec::new();
            for n in &names {
                for (file, text) in export_scenario(n)? {
                    let path = dir.join(&file);
                    std::fs::write(&path, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    if !written.contains(&file) {
                        written.push(file);
                    }
                }
            }
            Report::new(&written, written.iter().map(|f| format!("wrote {}\n", dir.join(f).display())).collect(), true)
        }
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            let text = match cli.global.format {
                Format::Human => report.human,
                Format::Machine => report.machine + "\n",
            };
            if let Err(e) = emit(&text, cli.global.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) if e.is_numeric() => {
            eprintln!("numeric failure: {e}");
            eprintln!("{}", render::residual_dump(&e));
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
