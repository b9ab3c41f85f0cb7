use std::fs;
use std::path::Path;

use grover4d::algebraic::{
    closed_trace, optimal_iterations, reconstruct_state, rotation_angle, success_probability_closed,
};
use grover4d::averaging::{
    average_success_closed, average_success_exact_with, average_success_mc_with, sample_subset,
    AverageEstimate,
};
use grover4d::io::{parse_bipartite, parse_ensemble, parse_marked, parse_state};
use grover4d::mixed::{
    average_success_mixed_closed, bipartite_reduce, compare_partial_search, evolve_ensemble_with,
    max_success_fidelity, partial_search_equality, pseudo_pure_max, success_probability_mixed,
    BipartiteState,
};
use grover4d::numeric::max_abs_diff;
use grover4d::special::{classify, cylinder_geometry, CaseKind};
use grover4d::statevector::{trace_run_with, GroverRun};
use grover4d::{partition_stats, uniform_state, Error, Exec, MarkedSet, PureState};

use crate::args::{
    AverageArgs, AverageMethodArg, BipartiteArgs, ClassifyArgs, Command, CompareArgs, Format,
    MarkedSource, MixedArgs, OutputArgs, PseudoPureArgs, StateSource, TauArgs, TraceArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{trace_report, Cell, Report};

/// Residual limits enforced by `compare --check`.
pub const CHECK_PROBABILITY_TOLERANCE: f64 = 1e-12;
pub const CHECK_STATE_TOLERANCE: f64 = 1e-10;

/// The rendered artifact plus a failed numerical check, if any.
pub struct Outcome {
    pub text: String,
    pub output: Option<std::path::PathBuf>,
    pub check_failure: Option<String>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_state(src: &StateSource) -> CliResult<PureState> {
    match (&src.state, src.uniform) {
        (Some(path), None) => parse_state(&read(path)?).map_err(CliError::input("--state")),
        (None, Some(n)) => uniform_state(n).map_err(CliError::input("--uniform")),
        _ => Err(CliError::Usage(
            "exactly one of --state or --uniform is required".into(),
        )),
    }
}

fn resolve_marked(src: &MarkedSource, n: u32) -> CliResult<MarkedSet> {
    let given = [
        src.marked.is_some(),
        src.marked_file.is_some(),
        src.r.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(CliError::Usage(
            "exactly one of --marked, --marked-file or --r is required".into(),
        ));
    }
    if let Some(list) = &src.marked {
        return MarkedSet::new(n, list.clone()).map_err(CliError::input("--marked"));
    }
    if let Some(path) = &src.marked_file {
        return parse_marked(n, &read(path)?).map_err(CliError::input("--marked-file"));
    }
    let r = src.r.expect("checked above");
    let n_total = 1usize << n;
    if r == 0 || r > n_total {
        return Err(CliError::input("--r")(Error::InvalidCount { r, n_total }));
    }
    let seed = src.marked_seed.unwrap_or(0);
    MarkedSet::new(n, sample_subset(n_total, r, seed, 0)).map_err(CliError::input("--r"))
}

fn t_max_or_tau(t_max: Option<u64>, marked: &MarkedSet) -> CliResult<u64> {
    match t_max {
        Some(t) => Ok(t),
        None => Ok(optimal_iterations(marked.n_total(), marked.len())?),
    }
}

fn finish(report: Report, out: &OutputArgs) -> Outcome {
    Outcome {
        text: report.render(out.format),
        output: out.output.clone(),
        check_failure: None,
    }
}

pub fn run(command: &Command, exec: Exec) -> CliResult<Outcome> {
    match command {
        Command::Simulate(a) => simulate(a, exec),
        Command::ClosedForm(a) => closed_form(a),
        Command::Compare(a) => compare(a, exec),
        Command::Average(a) => average(a, exec),
        Command::Mixed(a) => mixed(a, exec),
        Command::Bipartite(a) => bipartite(a),
        Command::PseudoPure(a) => pseudo_pure(a),
        Command::Classify(a) => classify_cmd(a),
        Command::OptimalTau(a) => optimal_tau(a),
    }
}

fn simulate(a: &TraceArgs, exec: Exec) -> CliResult<Outcome> {
    let state = load_state(&a.state)?;
    let marked = resolve_marked(&a.marked, state.n())?;
    let t_max = t_max_or_tau(a.t_max, &marked)?;
    let trace = trace_run_with(exec, &state, &marked, t_max)?;
    Ok(finish(trace_report(&trace), &a.output))
}

fn closed_form(a: &TraceArgs) -> CliResult<Outcome> {
    let state = load_state(&a.state)?;
    let marked = resolve_marked(&a.marked, state.n())?;
    let t_max = t_max_or_tau(a.t_max, &marked)?;
    let trace = closed_trace(&state, &marked, t_max)?;
    Ok(finish(trace_report(&trace), &a.output))
}

fn compare(a: &CompareArgs, exec: Exec) -> CliResult<Outcome> {
    let state = load_state(&a.trace.state)?;
    let marked = resolve_marked(&a.trace.marked, state.n())?;
    let t_max = t_max_or_tau(a.trace.t_max, &marked)?;
    let stats = partition_stats(&state, &marked)?;
    let omega = rotation_angle(marked.n_total(), marked.len())?;
    let mut run = GroverRun::with_exec(exec, &state, &marked)?;
    let mut rows = Vec::with_capacity(t_max as usize + 1);
    let mut worst = (0.0f64, 0.0f64);
    loop {
        let t = run.t();
        let p_sim = run.success_probability();
        let p_closed = success_probability_closed(&stats, omega, t);
        let residual = (p_sim - p_closed).abs();
        let rebuilt = reconstruct_state(&state, &marked, t)?;
        let state_residual = max_abs_diff(rebuilt.amplitudes(), run.amplitudes());
        worst = (worst.0.max(residual), worst.1.max(state_residual));
        rows.push(vec![
            Cell::Int(t),
            Cell::Real(p_sim),
            Cell::Real(p_closed),
            Cell::Real(residual),
            Cell::Real(state_residual),
        ]);
        if t == t_max {
            break;
        }
        run.step();
    }
    let columns = vec!["t", "p_simulated", "p_closed", "residual", "state_residual"];
    let mut outcome = finish(Report::rows(columns, rows), &a.trace.output);
    if a.check && (worst.0 > CHECK_PROBABILITY_TOLERANCE || worst.1 > CHECK_STATE_TOLERANCE) {
        outcome.check_failure = Some(format!(
            "max residual {:e} (limit {CHECK_PROBABILITY_TOLERANCE:e}), max state residual {:e} (limit {CHECK_STATE_TOLERANCE:e})",
            worst.0, worst.1
        ));
    }
    Ok(outcome)
}

fn average(a: &AverageArgs, exec: Exec) -> CliResult<Outcome> {
    let state = load_state(&a.state)?;
    let n_total = state.n_total();
    if a.r == 0 || a.r > n_total {
        return Err(CliError::input("--r")(Error::InvalidCount {
            r: a.r,
            n_total,
        }));
    }
    let t_max = match a.t_max {
        Some(t) => t,
        None => optimal_iterations(n_total, a.r)?,
    };
    let method = a.method.unwrap_or(if a.samples.is_some() {
        AverageMethodArg::MonteCarlo
    } else {
        AverageMethodArg::Enumeration
    });
    let mut rows = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        let closed = average_success_closed(&state, a.r, t)?;
        let est = match method {
            AverageMethodArg::Enumeration => average_success_exact_with(exec, &state, a.r, t)?,
            AverageMethodArg::MonteCarlo => {
                let samples = a.samples.ok_or_else(|| {
                    CliError::Usage("--samples is required with --method monte-carlo".into())
                })?;
                average_success_mc_with(exec, &state, a.r, t, samples, a.seed)
                    .map_err(CliError::input("--samples"))?
            }
            AverageMethodArg::Closed => AverageEstimate {
                value: closed,
                std_error: 0.0,
                samples: 0,
                method: grover4d::averaging::AverageMethod::ClosedForm,
            },
        };
        rows.push(vec![
            Cell::Int(t),
            Cell::Real(est.value),
            Cell::Real(est.std_error),
            Cell::Int(est.samples),
            Cell::Text(est.method.as_str().into()),
            Cell::Real(closed),
        ]);
    }
    let columns = vec!["t", "average", "std_error", "samples", "method", "closed"];
    Ok(finish(Report::rows(columns, rows), &a.output))
}

fn mixed(a: &MixedArgs, exec: Exec) -> CliResult<Outcome> {
    let ens = parse_ensemble(&read(&a.state)?).map_err(CliError::input("--state"))?;
    let marked = resolve_marked(&a.marked, ens.n())?;
    let t_max = t_max_or_tau(a.t_max, &marked)?;
    let p_max = max_success_fidelity(&ens);
    let mut current = ens.clone();
    let mut rows = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        if t > 0 {
            current = evolve_ensemble_with(exec, &current, &marked, 1)?;
        }
        rows.push(vec![
            Cell::Int(t),
            Cell::Real(success_probability_mixed(&current, &marked, 0)?),
            Cell::Real(average_success_mixed_closed(&ens, marked.len(), t)?),
            Cell::Real(p_max),
        ]);
    }
    let columns = vec!["t", "p_success", "p_average_closed", "p_max"];
    Ok(finish(Report::rows(columns, rows), &a.output))
}

fn load_bipartite(a: &BipartiteArgs) -> CliResult<BipartiteState> {
    let text = read(&a.state)?;
    match parse_bipartite(&text) {
        Ok(st) => {
            for (flag, given, actual) in [
                ("--n-alice", a.n_alice, st.n_alice()),
                ("--k-bob", a.k_bob, st.k_bob()),
            ] {
                if let Some(g) = given.filter(|&g| g != actual) {
                    return Err(CliError::input(flag)(Error::DimensionMismatch {
                        expected: actual,
                        actual: g,
                    }));
                }
            }
            Ok(st)
        }
        Err(Error::Parse(bipartite_err)) => {
            let (Some(n_alice), Some(k_bob)) = (a.n_alice, a.k_bob) else {
                return Err(CliError::input("--state")(Error::Parse(bipartite_err)));
            };
            let joint = parse_state(&text).map_err(CliError::input("--state"))?;
            if joint.n() != n_alice + k_bob {
                return Err(CliError::input("--n-alice")(Error::DimensionMismatch {
                    expected: joint.n(),
                    actual: n_alice + k_bob,
                }));
            }
            BipartiteState::new(n_alice, k_bob, joint.into_amplitudes())
                .map_err(CliError::input("--state"))
        }
        Err(e) => Err(CliError::input("--state")(e)),
    }
}

fn bipartite(a: &BipartiteArgs) -> CliResult<Outcome> {
    let st = load_bipartite(a)?;
    let rep = compare_partial_search(&st, a.r).map_err(CliError::input("--r"))?;
    let columns = vec![
        "n_alice", "k_bob", "r", "p_ab", "p_a", "gap", "equality", "members",
    ];
    let row = vec![
        Cell::Int(st.n_alice().into()),
        Cell::Int(st.k_bob().into()),
        Cell::Int(a.r as u64),
        Cell::Real(rep.p_ab),
        Cell::Real(rep.p_a),
        Cell::Real(rep.gap),
        Cell::Bool(partial_search_equality(&st)),
        Cell::Int(bipartite_reduce(&st).len() as u64),
    ];
    Ok(finish(Report::record(columns, row), &a.output))
}

fn pseudo_pure(a: &PseudoPureArgs) -> CliResult<Outcome> {
    let psi = load_state(&a.state)?;
    let p_max = pseudo_pure_max(a.epsilon, &psi).map_err(CliError::input("--epsilon"))?;
    let row = vec![Cell::Real(a.epsilon), Cell::Real(p_max)];
    Ok(finish(
        Report::record(vec!["epsilon", "p_max"], row),
        &a.output,
    ))
}

fn classify_cmd(a: &ClassifyArgs) -> CliResult<Outcome> {
    let state = load_state(&a.state)?;
    let marked = resolve_marked(&a.marked, state.n())?;
    let label = classify(&state, &marked)?;
    let (radius, length) = if label.kind == CaseKind::SingleMarked && state.is_real(1e-12) {
        let g = cylinder_geometry(&state, marked.indices()[0])?;
        (Cell::Real(g.radius), Cell::Real(g.length))
    } else {
        (Cell::Null, Cell::Null)
    };
    let w = label.witness;
    let columns = vec![
        "kind", "psi_m", "psi_u", "eta_u", "eta_m", "radius", "length",
    ];
    let row = vec![
        Cell::Text(label.kind.as_str().into()),
        Cell::Real(w.psi_m),
        Cell::Real(w.psi_u),
        Cell::Real(w.eta_u),
        Cell::Real(w.eta_m),
        radius,
        length,
    ];
    Ok(finish(Report::record(columns, row), &a.output))
}

fn optimal_tau(a: &TauArgs) -> CliResult<Outcome> {
    if a.n == 0 || a.n > 62 {
        return Err(CliError::input("--n")(Error::InvalidQubitCount(a.n)));
    }
    let n_total = 1usize << a.n;
    let tau = optimal_iterations(n_total, a.r).map_err(CliError::input("--r"))?;
    let report = match a.output.format {
        Format::Csv => Report::scalar("tau", Cell::Int(tau)),
        Format::Json => Report::record(
            vec!["n", "r", "tau"],
            vec![Cell::Int(a.n.into()), Cell::Int(a.r as u64), Cell::Int(tau)],
        ),
    };
    Ok(finish(report, &a.output))
}
