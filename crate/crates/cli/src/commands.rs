//! Subcommand implementations. Each builds a JSON document (or CSV table)
//! embedding the resolved run configuration and writes it once.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use qframe::cyclic::{self, covariant_mutual_info_zm, superadditivity_gap, tensor_compose, zm_asymmetry};
use qframe::io::{self, PovmFile, StateFile, WitnessFile};
use qframe::povm::{covariant_povm, ensemble_states, mutual_info_of_povm, optimize_povm, OptimizerConfig};
use qframe::sampling::{plugin_mi, simulate_protocol};
use qframe::u1::{self, QuadratureSpec};
use qframe::{dft_profile, validate_state, GroupSpec, Rate, StandardStateF64};

use crate::probs::parse_probs;
use crate::{CliError, Command, Format, InputArgs, OutputArgs, SweepArgs, EXIT_NONCONVERGENCE};

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
struct InputRecord {
    group: GroupSpec,
    probs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
}

/// Everything that determines the output, echoed into every JSON document.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    subcommand: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    copies: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<GroupSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimizer: Option<OptimizerConfig>,
    format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    /// As requested; results do not depend on it.
    workers: Option<usize>,
}

impl RunConfig {
    fn new(subcommand: &'static str, output: &OutputArgs, workers: Option<usize>) -> Self {
        RunConfig {
            subcommand,
            input: None,
            a: None,
            b: None,
            copies: None,
            grid: None,
            group: None,
            trials: None,
            shots: None,
            seed: None,
            optimizer: None,
            format: output.format,
            out: output.out.as_ref().map(|p| p.display().to_string()),
            workers,
        }
    }
}

/// `u1` or `z<M>`; the U(1) cutoff comes from the number of probabilities.
fn parse_group(text: &str, labels: usize) -> CliResult<GroupSpec> {
    let lower = text.trim().to_ascii_lowercase();
    if lower == "u1" {
        return Ok(GroupSpec::u1(labels));
    }
    lower
        .strip_prefix('z')
        .and_then(|m| m.parse::<usize>().ok())
        .map(GroupSpec::cyclic)
        .ok_or_else(|| CliError::input(format!("unknown group '{text}', expected u1 or zM")))
}

fn same_kind(a: GroupSpec, b: GroupSpec) -> bool {
    matches!((a, b), (GroupSpec::U1 { .. }, GroupSpec::U1 { .. })) || a == b
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn load_state_file(path: &Path) -> CliResult<(StandardStateF64, InputRecord)> {
    let state = io::parse_state(&read_file(path)?)?;
    let record =
        InputRecord { group: state.group(), probs: state.probs().to_vec(), source: Some(path.display().to_string()) };
    Ok((state, record))
}

fn resolve_state(input: &InputArgs) -> CliResult<(StandardStateF64, InputRecord)> {
    match (&input.probs, &input.state) {
        (Some(list), None) => {
            let group_text = input.group.as_deref().ok_or_else(|| CliError::input("--probs requires --group"))?;
            let probs = parse_probs(list).map_err(CliError::input)?;
            let group = parse_group(group_text, probs.len())?;
            let state = validate_state(&probs, group)?;
            let record = InputRecord { group, probs: state.probs().to_vec(), source: None };
            Ok((state, record))
        }
        (None, Some(path)) => {
            let (state, record) = load_state_file(path)?;
            if let Some(g) = &input.group {
                let wanted = parse_group(g, state.len())?;
                if !same_kind(wanted, state.group()) {
                    return Err(CliError::input(format!("--group {g} does not match the state file")));
                }
            }
            Ok((state, record))
        }
        (Some(_), Some(_)) => Err(CliError::input("give either --probs or --state, not both")),
        (None, None) => Err(CliError::input("missing input: give --probs or --state")),
    }
}

fn parse_copies(sweep: &SweepArgs, default: &[usize]) -> CliResult<Vec<usize>> {
    let list = match (sweep.n, &sweep.n_list) {
        (Some(n), _) => vec![n],
        (None, Some(text)) => text
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::input(format!("bad copy number '{t}'"))))
            .collect::<CliResult<Vec<_>>>()?,
        (None, None) => default.to_vec(),
    };
    if list.is_empty() || list.contains(&0) {
        return Err(CliError::input("copy numbers must be positive"));
    }
    if list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::input("--n-list must be strictly increasing"));
    }
    Ok(list)
}

fn emit(output: &OutputArgs, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn emit_json(output: &OutputArgs, config: &RunConfig, mut body: Value) -> CliResult<()> {
    body["config"] = serde_json::to_value(config).expect("config serializes");
    let mut text = serde_json::to_string_pretty(&body).expect("values serialize");
    text.push('\n');
    emit(output, &text)
}

fn json_only(output: &OutputArgs, what: &str) -> CliResult<()> {
    if output.format == Format::Csv {
        return Err(CliError::input(format!("{what} has no CSV form; use --format json")));
    }
    Ok(())
}

/// Shortest round-trip text, in exponent form for very small or large values.
fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn fmt_rate(r: Rate<f64>) -> String {
    match r {
        Rate::Finite(x) => fmt_num(x),
        Rate::Infinite => "inf".into(),
    }
}

/// One row of the sweep table; deficits are blank for U(1).
struct SweepRow {
    copies: usize,
    h_bits: f64,
    h_deficit: Option<f64>,
    i_bits: f64,
    i_deficit: Option<f64>,
    lin_h: String,
    lin_i: String,
    target: String,
}

fn sweep_rows(state: &StandardStateF64, copies: &[usize], grid: Option<usize>) -> CliResult<Vec<SweepRow>> {
    match state.group() {
        GroupSpec::Cyclic { .. } => Ok(cyclic::zm_rate_series(state, copies)?
            .into_iter()
            .map(|p| SweepRow {
                copies: p.copies,
                h_bits: p.asymmetry_bits,
                h_deficit: Some(p.asymmetry_deficit_bits),
                i_bits: p.mi_bits,
                i_deficit: Some(p.mi_deficit_bits),
                lin_h: fmt_rate(p.lin_asym_per_copy),
                lin_i: fmt_rate(p.lin_mi_per_copy),
                target: fmt_rate(p.rate_target),
            })
            .collect()),
        GroupSpec::U1 { .. } => Ok(u1::u1_rate_series(state, copies, grid)?
            .into_iter()
            .map(|p| SweepRow {
                copies: p.copies,
                h_bits: p.asymmetry_bits,
                h_deficit: None,
                i_bits: p.mutual_info_bits,
                i_deficit: None,
                lin_h: fmt_num(p.lin_asymmetry_per_copy),
                lin_i: fmt_num(p.lin_mi_per_copy),
                target: fmt_num(p.variance_target),
            })
            .collect()),
    }
}

fn sweep_csv(rows: &[SweepRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::input(e.to_string());
    w.write_record(["N", "H_bits", "H_deficit", "I_bits", "I_deficit", "lin_H_per_N", "lin_I_per_N", "target"])
        .map_err(fail)?;
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.copies.to_string(),
            fmt_num(r.h_bits),
            opt(r.h_deficit),
            fmt_num(r.i_bits),
            opt(r.i_deficit),
            r.lin_h.clone(),
            r.lin_i.clone(),
            r.target.clone(),
        ])
        .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn default_copies(state: &StandardStateF64, command: &str) -> &'static [usize] {
    match (state.group(), command) {
        (GroupSpec::Cyclic { .. }, "rate") => &[8, 16, 32],
        (GroupSpec::U1 { .. }, "rate") => &[256, 1024, 4096],
        _ => &[1],
    }
}

fn sweep_command(
    name: &'static str,
    input: InputArgs,
    sweep: SweepArgs,
    output: OutputArgs,
    workers: Option<usize>,
) -> CliResult<u8> {
    let (state, record) = resolve_state(&input)?;
    let copies = parse_copies(&sweep, default_copies(&state, name))?;
    if let Some(k) = sweep.grid {
        QuadratureSpec::new(k)?;
    }
    let mut config = RunConfig::new(name, &output, workers);
    config.input = Some(record);
    config.copies = Some(copies.clone());
    config.grid = sweep.grid;
    if output.format == Format::Csv {
        let rows = sweep_rows(&state, &copies, sweep.grid)?;
        emit(&output, &sweep_csv(&rows)?)?;
        return Ok(0);
    }
    let body = match name {
        "asymmetry" => asymmetry_json(&state, &copies)?,
        "mi" => mi_json(&state, &copies, sweep.grid)?,
        _ => rate_json(&state, &copies, sweep.grid)?,
    };
    emit_json(&output, &config, body)?;
    Ok(0)
}

fn asymmetry_json(state: &StandardStateF64, copies: &[usize]) -> CliResult<Value> {
    let rows = copies
        .iter()
        .map(|&n| match state.group() {
            GroupSpec::Cyclic { .. } => {
                let a = zm_asymmetry(state, n)?;
                Ok(json!({ "N": n, "H_bits": a.bits, "H_deficit": a.deficit_bits }))
            }
            GroupSpec::U1 { .. } => Ok(json!({ "N": n, "H_bits": u1::u1_asymmetry(state, n)? })),
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(json!({ "results": rows }))
}

fn mi_json(state: &StandardStateF64, copies: &[usize], grid: Option<usize>) -> CliResult<Value> {
    let rows = copies
        .iter()
        .map(|&n| match state.group() {
            GroupSpec::Cyclic { .. } => {
                let i = covariant_mutual_info_zm(state, n)?;
                Ok(json!({ "N": n, "I_bits": i.bits, "I_deficit": i.deficit_bits }))
            }
            GroupSpec::U1 { .. } => {
                let quad = match grid {
                    Some(k) => QuadratureSpec::new(k)?,
                    None => QuadratureSpec::default_for(state, n),
                };
                let i = u1::covariant_mutual_info_u1(state, n, &quad)?;
                Ok(json!({ "N": n, "I_bits": i, "grid": quad.grid_points }))
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(json!({ "results": rows }))
}

fn rate_json(state: &StandardStateF64, copies: &[usize], grid: Option<usize>) -> CliResult<Value> {
    match state.group() {
        GroupSpec::Cyclic { .. } => {
            let profile = dft_profile(state)?;
            let series = cyclic::zm_rate_series(state, copies)?;
            Ok(json!({
                "rate_bits": Rate::from_modulus(profile.r_max),
                "r_max": profile.r_max,
                "maximizers": profile.maximizers,
                "degeneracy": profile.degeneracy,
                "series": series,
            }))
        }
        GroupSpec::U1 { .. } => {
            let series = u1::u1_rate_series(state, copies, grid)?;
            Ok(json!({
                "rate_bits": u1::regularized_asymmetry_u1(state)?,
                "variance": u1::number_variance(state)?,
                "gaussian_limits": u1::gaussian_limits_u1(state)?,
                "series": series,
            }))
        }
    }
}

fn superadd(a: PathBuf, b: PathBuf, output: OutputArgs, workers: Option<usize>) -> CliResult<u8> {
    json_only(&output, "superadd")?;
    let (sa, ra) = load_state_file(&a)?;
    let (sb, rb) = load_state_file(&b)?;
    let comp = tensor_compose(&sa, &sb)?;
    let gap = superadditivity_gap(&sa, &sb)?;
    let pa = dft_profile(&sa)?;
    let pb = dft_profile(&sb)?;
    let mut config = RunConfig::new("superadd", &output, workers);
    config.a = Some(ra);
    config.b = Some(rb);
    let body = json!({
        "r_max_a": pa.r_max,
        "r_max_b": pb.r_max,
        "moduli_a": pa.r,
        "moduli_b": pb.r,
        "omega_moduli": comp.omega_moduli,
        "composed": StateFile::from_state(&comp.composed),
        "rate_a": comp.rate_a,
        "rate_b": comp.rate_b,
        "rate_composed": comp.rate_composed,
        "gap_bits": gap,
    });
    emit_json(&output, &config, body)?;
    Ok(0)
}

fn search(group: String, trials: usize, seed: u64, output: OutputArgs, workers: Option<usize>) -> CliResult<u8> {
    json_only(&output, "search")?;
    let spec = parse_group(&group, 0)?;
    let GroupSpec::Cyclic { m } = spec else {
        return Err(CliError::input("search needs a cyclic group zM"));
    };
    let found = cyclic::search_superadditive::<f64>(m, trials, seed)?;
    let mut config = RunConfig::new("search", &output, workers);
    config.group = Some(spec);
    config.trials = Some(trials);
    config.seed = Some(seed);
    let witness = WitnessFile {
        a: StateFile::from_state(&found.a),
        b: StateFile::from_state(&found.b),
        gap_bits: found.gap_bits,
    };
    let mut body = serde_json::to_value(&witness).expect("witness serializes");
    body["trials"] = json!(trials);
    emit_json(&output, &config, body)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn optimize(
    input: InputArgs,
    copies: usize,
    restarts: usize,
    max_iters: usize,
    outcomes: Option<usize>,
    seed: u64,
    output: OutputArgs,
    workers: Option<usize>,
) -> CliResult<u8> {
    json_only(&output, "optimize")?;
    let (state, record) = resolve_state(&input)?;
    let m = state.cyclic_order()?;
    let cfg = OptimizerConfig { outcomes, restarts, max_iters, seed, ..OptimizerConfig::default() };
    let ens = ensemble_states(&state, copies)?;
    let result = optimize_povm(&ens, &cfg)?;
    let covariant = mutual_info_of_povm(&ens, &covariant_povm(m)?)?;
    let mut config = RunConfig::new("optimize", &output, workers);
    config.input = Some(record);
    config.copies = Some(vec![copies]);
    config.optimizer = Some(cfg);
    let body = json!({
        "N": copies,
        "mutual_info_bits": result.mutual_info_bits,
        "covariant_mi_bits": covariant,
        "holevo_bits": ens.holevo_quantity(),
        "converged": result.converged,
        "best_restart": result.best_restart,
        "restart_values": result.restart_values,
        "trace": result.trace,
        "povm": PovmFile::from_povm(&result.povm),
    });
    emit_json(&output, &config, body)?;
    Ok(if result.converged { 0 } else { EXIT_NONCONVERGENCE })
}

fn sample(
    input: InputArgs,
    copies: usize,
    shots: u64,
    seed: u64,
    output: OutputArgs,
    workers: Option<usize>,
) -> CliResult<u8> {
    let (state, record) = resolve_state(&input)?;
    let m = state.cyclic_order()?;
    let povm = covariant_povm(m)?;
    let rec = simulate_protocol(&state, copies, &povm, shots, seed)?;
    if output.format == Format::Csv {
        emit(&output, &rec.to_csv())?;
        return Ok(0);
    }
    let est = plugin_mi(&rec);
    let analytic = covariant_mutual_info_zm(&state, copies)?.bits;
    let mut config = RunConfig::new("sample", &output, workers);
    config.input = Some(record);
    config.copies = Some(vec![copies]);
    config.shots = Some(shots);
    config.seed = Some(seed);
    let body = json!({
        "record": rec,
        "plugin_bits": est.plugin_bits,
        "corrected_bits": est.corrected_bits,
        "analytic_bits": analytic,
    });
    emit_json(&output, &config, body)?;
    Ok(0)
}

pub fn run(command: Command, workers: Option<usize>) -> CliResult<u8> {
    match command {
        Command::Asymmetry { input, sweep, output } => sweep_command("asymmetry", input, sweep, output, workers),
        Command::Rate { input, sweep, output } => sweep_command("rate", input, sweep, output, workers),
        Command::Mi { input, sweep, output } => sweep_command("mi", input, sweep, output, workers),
        Command::Superadd { a, b, output } => superadd(a, b, output, workers),
        Command::Search { group, trials, seed, output } => search(group, trials, seed, output, workers),
        Command::Optimize { input, n, restarts, max_iters, outcomes, seed, output } => {
            optimize(input, n, restarts, max_iters, outcomes, seed, output, workers)
        }
        Command::Sample { input, n, shots, seed, output } => sample(input, n, shots, seed, output, workers),
    }
}
