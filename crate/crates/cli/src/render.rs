//! Human-readable renderings of the machine reports.

use std::fmt::Write;

use qce::games::{ExtensiveFormGame, NormalFormGame};
use qce::io::{DeviceFile, InstanceFile, OutcomeFile, ProfileRecord, SearchFile};
use qce::quantum::{ConstraintReport, ExtensiveProtocol, LookaheadResult};
use qce::scenarios::{GhzClassicalReport, GhzQuantumReport, RESIDUAL_FLOOR};
use qce::Error;

fn profile(p: &ProfileRecord) -> String {
    match p {
        ProfileRecord::Labels(l) => format!("({})", l.join(", ")),
        ProfileRecord::Choices(maps) => {
            let parts: Vec<String> =
                maps.iter().map(|m| m.iter().map(|(h, a)| format!("{h}={a}")).collect::<Vec<_>>().join(" ")).collect();
            format!("({})", parts.join(" | "))
        }
    }
}

fn payoff_line(out: &mut String, payoffs: &[f64]) {
    let cells: Vec<String> = payoffs.iter().map(|u| format!("{u:.10}")).collect();
    let _ = writeln!(out, "expected payoffs: [{}]", cells.join(", "));
}

pub fn device(file: &DeviceFile, payoffs: &[f64]) -> String {
    let mut out = String::new();
    for e in &file.entries {
        let _ = writeln!(out, "{:.12}  {}", e.probability, profile(&e.profile));
    }
    payoff_line(&mut out, payoffs);
    out
}

pub fn outcomes(file: &OutcomeFile, payoffs: &[f64]) -> String {
    let mut out = String::new();
    for e in &file.entries {
        let _ = writeln!(out, "{:.12}  {}", e.probability, e.outcome.join(", "));
    }
    payoff_line(&mut out, payoffs);
    for w in &file.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn normal_game(g: &NormalFormGame) -> String {
    let mut out = String::new();
    for i in 0..g.players() {
        let _ = writeln!(out, "player {i}: {}", g.action_labels(i).join(", "));
    }
    for p in g.profiles() {
        let cells: Vec<String> = g.payoffs(&p).iter().map(f64::to_string).collect();
        let _ = writeln!(out, "  ({}) -> [{}]", g.profile_labels(&p).join(", "), cells.join(", "));
    }
    out
}

pub fn instance(file: &InstanceFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "state: {} qubits, owners {:?}", file.state.qubits, file.state.partition);
    for (k, [re, im]) in file.state.amplitudes.iter().enumerate() {
        if re.abs() > 1e-15 || im.abs() > 1e-15 {
            let _ = writeln!(out, "  |{k:0w$b}>  {re:+.12} {im:+.12}i", w = file.state.qubits.max(1));
        }
    }
    for c in &file.circuits {
        let _ = writeln!(out, "player {} measures {:?} -> {}", c.owner, c.outputs, c.actions.join(", "));
    }
    out
}

pub fn constraints(rep: &ConstraintReport, eps: f64) -> String {
    let mut out = String::new();
    for (name, value) in rep.residuals() {
        let _ = writeln!(out, "{name:<28} {value:.3e}");
    }
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    let _ = writeln!(out, "row conditions: {}", verdict(rep.row_passes(eps)));
    let _ = writeln!(out, "column conditions: {}", verdict(rep.column_passes(eps)));
    let _ = writeln!(out, "all conditions: {}", verdict(rep.passes(eps)));
    out
}

pub fn search(file: &SearchFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "restarts: {}, evaluations: {}", file.restarts, file.evaluations);
    let _ = writeln!(out, "smallest residual: {:.6e} (floor {RESIDUAL_FLOOR:e})", file.min_residual);
    let b = &file.bound;
    let _ = writeln!(
        out,
        "trace bound at best point: Tr(CC^dagger)^2 = {:.6e} <= {:.6e} ({})",
        b.trace_cc,
        b.bound,
        if b.holds { "holds" } else { "violated" }
    );
    let _ = writeln!(
        out,
        "verdict: {}",
        if file.min_residual >= RESIDUAL_FLOOR { "no state found (pass)" } else { "residual below floor (FAIL)" }
    );
    out
}

pub fn lookahead(res: &LookaheadResult, game: &ExtensiveFormGame, protocol: &ExtensiveProtocol) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "player {}: on-path {:.10}, best lookahead {:.10}, gain {:.10} ({} plans)",
        res.player,
        res.on_path,
        res.value,
        res.gain(),
        res.plans_evaluated
    );
    if let Some(plan) = &res.plan {
        for m in plan.moves(game, protocol) {
            let _ = writeln!(out, "  when {} play {}", m.when, m.play);
        }
    }
    out
}

pub fn ghz_quantum(rep: &GhzQuantumReport) -> String {
    let mut out = String::new();
    for b in &rep.branches {
        let _ = writeln!(out, "input {}: win probability {:.12}", b.input, b.win_probability);
    }
    let _ = writeln!(out, "minimum over inputs: {:.12}", rep.min_win_probability);
    out
}

pub fn ghz_classical(rep: &GhzClassicalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "deterministic profiles: {}", rep.profiles);
    let _ = writeln!(
        out,
        "best win probability against uniform inputs: {} (outputs per input: {})",
        rep.max_win_probability,
        rep.best_profile.join(" ")
    );
    let _ = writeln!(out, "every profile loses on some input: {}", rep.every_profile_defeated);
    let _ = writeln!(out, "smallest payoff of a uniform Nate: {}", rep.min_nate_uniform_payoff);
    out
}

pub fn residual_dump(e: &Error) -> String {
    match e {
        Error::NoConvergence { sweeps, residual } => {
            format!("  sweeps: {sweeps}\n  off-diagonal residual: {residual:e}")
        }
        Error::NormDrift { norm } => format!("  norm: {norm:.17}\n  drift: {:e}", (norm - 1.0).abs()),
        Error::Solver(msg) => format!("  solver: {msg}"),
        other => format!("  {other}"),
    }
}
