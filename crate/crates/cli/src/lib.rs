//! Command-line frontend: circuit synthesis, verification, gate counting,
//! sampling and Grover coloring experiments.
//!
//! Every command writes its configuration (including the seed, where one
//! applies) and the tool version into its output, and never anything that
//! varies between runs, so repeated invocations are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use uniprep::grover::{run_search, ColoringProblem, GroverError, GrowthPolicy, Mode, WireLayout};
use uniprep::io::parse_problem;
use uniprep::prep::{
    predicted_two_wire_count, summation_two_wire_count, Phase, PrepPlan, PrepSpec,
};
use uniprep::qasm::export_qasm;
use uniprep::sim::MAX_WIRES;
use uniprep::{simulate, Gate, Polarity, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "uniprep", version, about = "Uniform superposition circuits and Grover coloring experiments")]
pub struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the preparation circuit for N states.
    Prep {
        n: u64,
        /// Also write the circuit as OpenQASM 2.0.
        #[arg(long, value_name = "PATH")]
        qasm: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Simulate the circuit for N states and check it is uniform.
    Verify {
        n: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// CSV of two-wire gate counts for N = 2..=MAX.
    Count {
        #[arg(long)]
        max: u64,
    },
    /// Measure the prepared state and print a CSV histogram.
    Sample {
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Grover coloring search on one graph; CSV of per-trial repetitions.
    Grover(GroverArgs),
    /// Both modes over a range of line-graph sizes; CSV of mean repetitions.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Restricted,
    Hadamard,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Restricted => Mode::Restricted,
            ModeArg::Hadamard => Mode::Hadamard,
        }
    }
}

#[derive(Debug, Args)]
pub struct GroverArgs {
    /// Problem JSON file.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["line", "colors"])]
    pub graph: Option<PathBuf>,
    /// Line graph with this many nodes (needs --colors).
    #[arg(long, requires = "colors")]
    pub line: Option<usize>,
    #[arg(long, requires = "line")]
    pub colors: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Restricted)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Growth factor of the repetition ceiling.
    #[arg(long, default_value_t = GrowthPolicy::DEFAULT_LAMBDA)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub colors: u64,
    /// Inclusive node range, e.g. `2..5`.
    #[arg(long, value_parser = parse_node_range)]
    pub nodes: RangeInclusive<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = GrowthPolicy::DEFAULT_LAMBDA)]
    pub lambda: f64,
}

fn parse_node_range(text: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got `{text}`"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad start `{a}`"))?;
    let b: usize = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad end `{b}`"))?;
    if a == 0 || b < a {
        return Err(format!("empty or invalid node range `{text}`"));
    }
    Ok(a..=b)
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Capacity(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Capacity(_) => EXIT_CAPACITY,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Capacity(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<GroverError> for CliError {
    fn from(e: GroverError) -> Self {
        match e {
            GroverError::Capacity { .. } => CliError::Capacity(e.to_string()),
            GroverError::Problem(p) => CliError::Usage(p.to_string()),
        }
    }
}

/// What a command produced: the main output text, any warnings for stderr
/// and the exit code.
#[derive(Debug, Default)]
pub struct Report {
    pub output: String,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

impl Report {
    fn ok(output: String) -> Self {
        Report {
            output,
            warnings: Vec::new(),
            exit_code: EXIT_OK,
        }
    }
}

/// Runs a parsed command. Side files (`--qasm`) are written here; the main
/// output is returned for the caller to route.
pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Prep { n, qasm, json } => cmd_prep(*n, qasm.as_ref(), *json),
        Command::Verify { n, tol, json } => cmd_verify(*n, *tol, *json),
        Command::Count { max } => cmd_count(*max),
        Command::Sample { n, shots, seed } => cmd_sample(*n, *shots, *seed),
        Command::Grover(args) => cmd_grover(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

/// `digits`-significant-digit decimal rendering.
fn significant(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.*}", (digits - 1) as usize);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn header(command: &str, config: &str) -> String {
    format!("# uniprep {VERSION} {command} {config}\n")
}

fn checked_spec(n: u64) -> Result<PrepSpec, CliError> {
    let spec = PrepSpec::new(n).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

fn simulable_spec(n: u64) -> Result<PrepSpec, CliError> {
    let spec = checked_spec(n)?;
    if spec.wires as usize > MAX_WIRES {
        return Err(CliError::Capacity(format!(
            "{n} states need {} wires, above the simulator ceiling of {MAX_WIRES}",
            spec.wires
        )));
    }
    Ok(spec)
}

#[derive(Serialize)]
struct GateRow {
    index: usize,
    phase: Phase,
    kind: &'static str,
    target: usize,
    control: Option<usize>,
    polarity: Option<Polarity>,
    theta: f64,
    closed_form: String,
}

#[derive(Serialize)]
struct PrepJson<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    n: u64,
    wires: u32,
    two_wire_gates: usize,
    qasm: Option<&'a str>,
    gates: Vec<GateRow>,
}

fn cmd_prep(n: u64, qasm: Option<&PathBuf>, json: bool) -> Result<Report, CliError> {
    checked_spec(n)?;
    let plan = PrepPlan::build(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let circuit = plan.circuit();
    if let Some(path) = qasm {
        fs::write(path, export_qasm(&circuit))
            .map_err(|e| CliError::Failed(format!("writing {}: {e}", path.display())))?;
    }
    let rows: Vec<GateRow> = plan
        .steps
        .iter()
        .enumerate()
        .map(|(index, step)| {
            let (kind, theta, control) = match &step.gate {
                Gate::Ry { theta, .. } => ("ry", *theta, None),
                Gate::Cry { theta, control, .. } => ("cry", *theta, Some(*control)),
                other => unreachable!("prep circuits hold rotations only, got {other}"),
            };
            GateRow {
                index,
                phase: step.phase,
                kind,
                target: step.gate.target().index(),
                control: control.map(|c| c.wire.index()),
                polarity: control.map(|c| c.polarity),
                theta,
                closed_form: step.ratio.closed_form(),
            }
        })
        .collect();

    let qasm_path = qasm.map(|p| p.display().to_string());
    if json {
        let doc = PrepJson {
            tool: "uniprep",
            version: VERSION,
            command: "prep",
            n,
            wires: plan.spec.wires,
            two_wire_gates: circuit.two_wire_gate_count(),
            qasm: qasm_path.as_deref(),
            gates: rows,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("plain data");
        text.push('\n');
        return Ok(Report::ok(text));
    }

    let mut out = header("prep", &format!("n={n}"));
    let _ = writeln!(
        out,
        "wires={} gates={} two_wire={}",
        plan.spec.wires,
        circuit.len(),
        circuit.two_wire_gate_count()
    );
    if circuit.is_empty() {
        let _ = writeln!(
            out,
            "empty circuit: {} already satisfies the target state",
            if n == 1 { "|0> on zero wires" } else { "the zero state" }
        );
    }
    for row in &rows {
        let control = match (row.control, row.polarity) {
            (Some(c), Some(Polarity::Positive)) => format!("ctrl q{c}"),
            (Some(c), Some(Polarity::Negative)) => format!("anti-ctrl q{c}"),
            _ => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{:>3}  {:<8}  {:<3}  q{:<3}  {:<12}  {:<20}  {}",
            row.index,
            format!("{:?}", row.phase).to_lowercase(),
            row.kind,
            row.target,
            control,
            significant(row.theta, 17),
            row.closed_form
        );
    }
    if let Some(path) = qasm_path {
        let _ = writeln!(out, "qasm written to {path}");
    }
    Ok(Report::ok(out))
}

#[derive(Serialize)]
struct VerifyJson {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    n: u64,
    tol: f64,
    wires: u32,
    two_wire_gates: usize,
    predicted_two_wire_gates: u64,
    max_probability_deviation: f64,
    max_outside_amplitude: f64,
    pass: bool,
}

fn cmd_verify(n: u64, tol: f64, json: bool) -> Result<Report, CliError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Usage(format!("tolerance must be a non-negative number, got {tol}")));
    }
    let spec = simulable_spec(n)?;
    let circuit = uniprep::generate(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let state = simulate(&circuit).map_err(|e| CliError::Capacity(e.to_string()))?;
    let target = 1.0 / n as f64;
    let (mut max_dev, mut max_outside) = (0.0f64, 0.0f64);
    for (k, amp) in state.amplitudes().iter().enumerate() {
        if (k as u64) < n {
            max_dev = max_dev.max((amp.norm_sqr() - target).abs());
        } else {
            max_outside = max_outside.max(amp.norm());
        }
    }
    let pass = max_dev <= tol && max_outside <= tol;
    let exit_code = if pass { EXIT_OK } else { EXIT_FAILED };
    let report = VerifyJson {
        tool: "uniprep",
        version: VERSION,
        command: "verify",
        n,
        tol,
        wires: spec.wires,
        two_wire_gates: circuit.two_wire_gate_count(),
        predicted_two_wire_gates: predicted_two_wire_count(n),
        max_probability_deviation: max_dev,
        max_outside_amplitude: max_outside,
        pass,
    };
    let output = if json {
        let mut text = serde_json::to_string_pretty(&report).expect("plain data");
        text.push('\n');
        text
    } else {
        let mut out = header("verify", &format!("n={n} tol={tol:e}"));
        let _ = writeln!(
            out,
            "wires={} gates={} two_wire={} predicted_two_wire={}",
            report.wires,
            circuit.len(),
            report.two_wire_gates,
            report.predicted_two_wire_gates
        );
        if report.two_wire_gates == 0 {
            let _ = writeln!(out, "no two-wire gates needed");
        }
        let _ = writeln!(out, "max |p(k) - 1/n|, k < n: {max_dev:e}");
        let _ = writeln!(out, "max |amp(k)|, k >= n:    {max_outside:e}");
        let _ = writeln!(out, "result: {}", if pass { "pass" } else { "FAIL" });
        out
    };
    Ok(Report {
        output,
        warnings: Vec::new(),
        exit_code,
    })
}

fn csv_text(rows: impl FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>) -> String {
    let mut buf = Vec::new();
    {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        rows(&mut writer).expect("writing to memory");
        writer.flush().expect("writing to memory");
    }
    String::from_utf8(buf).expect("csv output is utf-8")
}

fn cmd_count(max: u64) -> Result<Report, CliError> {
    if max < 2 {
        return Err(CliError::Usage(format!("--max must be at least 2, got {max}")));
    }
    checked_spec(max)?;
    let mut out = header("count", &format!("max={max}"));
    out.push_str(&csv_text(|w| {
        w.write_record(["n", "actual_two_wire", "closed_form", "sum_form", "agree"])?;
        for n in 2..=max {
            let actual = uniprep::generate(n)
                .expect("n within range")
                .two_wire_gate_count() as u64;
            let closed = predicted_two_wire_count(n);
            let sum = summation_two_wire_count(n).expect("n >= 2");
            let agree = actual == closed && sum >= 0 && sum as u64 == closed;
            w.write_record([
                n.to_string(),
                actual.to_string(),
                closed.to_string(),
                sum.to_string(),
                agree.to_string(),
            ])?;
        }
        Ok(())
    }));
    Ok(Report::ok(out))
}

fn cmd_sample(n: u64, shots: u64, seed: u64) -> Result<Report, CliError> {
    if shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".to_string()));
    }
    simulable_spec(n)?;
    let circuit = uniprep::generate(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let state = simulate(&circuit).map_err(|e| CliError::Capacity(e.to_string()))?;
    let hist = state.sample(shots, seed);
    let n_usize = n as usize;

    let mut out = header("sample", &format!("n={n} shots={shots} seed={seed} rng=chacha8"));
    out.push_str(&csv_text(|w| {
        w.write_record(["state", "count"])?;
        for k in 0..n_usize {
            w.write_record([k.to_string(), hist.count(k).to_string()])?;
        }
        Ok(())
    }));
    let counts: Vec<u64> = (0..n_usize).map(|k| hist.count(k)).collect();
    let expected = shots as f64 / n as f64;
    let _ = write!(
        out,
        "# summary min={} max={} expected={} outside={}",
        counts.iter().min().expect("n >= 1"),
        counts.iter().max().expect("n >= 1"),
        significant(expected, 10),
        hist.count_outside(n_usize)
    );
    if n >= 2 {
        let chi = hist.chi_square_uniform(n_usize);
        let _ = write!(
            out,
            " chi_square={} dof={} p_value={}",
            significant(chi.statistic, 10),
            chi.degrees_of_freedom,
            significant(chi.p_value, 10)
        );
    }
    out.push('\n');
    Ok(Report::ok(out))
}

fn load_problem(args: &GroverArgs) -> Result<(ColoringProblem, String), CliError> {
    match (&args.graph, args.line, args.colors) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
            let problem = parse_problem(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Ok((problem, format!("graph={}", path.display())))
        }
        (None, Some(nodes), Some(colors)) => {
            let problem =
                ColoringProblem::line(nodes, colors).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok((problem, format!("line={nodes} colors={colors}")))
        }
        _ => Err(CliError::Usage(
            "give either --graph PATH or --line K --colors C".to_string(),
        )),
    }
}

fn check_lambda(lambda: f64) -> Result<(), CliError> {
    if lambda.is_finite() && lambda > 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--lambda must be greater than 1, got {lambda}")))
    }
}

fn capacity_check(problem: &ColoringProblem) -> Result<WireLayout, CliError> {
    let layout = WireLayout::new(problem);
    if layout.total > MAX_WIRES {
        return Err(CliError::Capacity(format!(
            "layout needs {} wires ({} edge ancillas + 1 phase wire + {} register wires), above the simulator ceiling of {MAX_WIRES}",
            layout.total,
            layout.edge_ancillas.len(),
            layout.register_wire_count()
        )));
    }
    Ok(layout)
}

fn cmd_grover(args: &GroverArgs) -> Result<Report, CliError> {
    check_lambda(args.lambda)?;
    let (problem, source) = load_problem(args)?;
    let mode = Mode::from(args.mode);
    let space = problem
        .search_space_sizes()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let layout = capacity_check(&problem)?;
    let policy = GrowthPolicy::for_problem(&problem, mode)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .with_lambda(args.lambda);
    let stats = run_search(&problem, mode, &policy, args.trials, args.seed)?;

    let mut out = header(
        "grover",
        &format!(
            "{source} mode={mode} trials={} seed={} lambda={} cap={}",
            args.trials,
            args.seed,
            args.lambda,
            significant(policy.cap, 10)
        ),
    );
    let _ = writeln!(
        out,
        "# wires={} search_space_hadamard={} search_space_restricted={}",
        layout.total, space.hadamard, space.restricted
    );
    out.push_str(&csv_text(|w| {
        w.write_record(["trial", "repetitions", "attempts", "solved"])?;
        for o in &stats.outcomes {
            w.write_record([
                o.trial.to_string(),
                o.repetitions.to_string(),
                o.attempts.to_string(),
                o.solved.to_string(),
            ])?;
        }
        Ok(())
    }));
    let mean = stats
        .mean_repetitions()
        .map(|m| significant(m, 10))
        .unwrap_or_else(|| "nan".to_string());
    let _ = writeln!(
        out,
        "# summary mode={mode} trials={} solved={} mean_repetitions={mean}",
        stats.trials(),
        stats.successes()
    );
    Ok(Report::ok(out))
}

fn cmd_sweep(args: &SweepArgs) -> Result<Report, CliError> {
    check_lambda(args.lambda)?;
    let mut warnings = Vec::new();
    let mut out = header(
        "sweep",
        &format!(
            "colors={} nodes={}..{} trials={} seed={} lambda={}",
            args.colors,
            args.nodes.start(),
            args.nodes.end(),
            args.trials,
            args.seed,
            args.lambda
        ),
    );
    let mut rows = Vec::new();
    for nodes in args.nodes.clone() {
        let problem = ColoringProblem::line(nodes, args.colors)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if let Err(e) = capacity_check(&problem) {
            let note = format!("skipped nodes={nodes}: {}", e.message());
            let _ = writeln!(out, "# {note}");
            warnings.push(note);
            continue;
        }
        for mode in Mode::ALL {
            let policy = GrowthPolicy::for_problem(&problem, mode)
                .map_err(|e| CliError::Usage(e.to_string()))?
                .with_lambda(args.lambda);
            let stats = run_search(&problem, mode, &policy, args.trials, args.seed)?;
            let mean = stats
                .mean_repetitions()
                .map(|m| significant(m, 10))
                .unwrap_or_else(|| "nan".to_string());
            rows.push([
                nodes.to_string(),
                mode.to_string(),
                mean,
                args.trials.to_string(),
            ]);
        }
    }
    out.push_str(&csv_text(|w| {
        w.write_record(["nodes", "mode", "mean_repetitions", "trials"])?;
        for row in &rows {
            w.write_record(row)?;
        }
        Ok(())
    }));
    Ok(Report {
        output: out,
        warnings,
        exit_code: EXIT_OK,
    })
}

/// Parses `args`, runs the command and routes output. Returns the process
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            for w in &report.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let written = match &cli.out {
                Some(path) => fs::write(path, &report.output)
                    .map_err(|e| format!("writing {}: {e}", path.display())),
                None => stdout
                    .write_all(report.output.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILED;
            }
            report.exit_code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}
