//! The `quasilocal` command line.
//!
//! Exit codes: 0 success, 1 domain failure (inconsistent input or a failed
//! precondition), 2 I/O, parse or usage failure.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Error;
use crate::format::{
    box_to_json, format_value, measures_to_json, parse_box, parse_measures, write_box,
    write_measures,
};
use crate::model::{
    check_derived_relations, check_no_signaling, check_normalization, check_range, chsh_report,
    ensure_consistent, forward_map, MeasureVector, Violation, DEFAULT_EPS,
};
use crate::negativity::min_negativity;
use crate::quantum::{generate_probability_set, maximize_chsh, QubitScenario, TwoQubitState};
use crate::solver::{perfect_correlation_solution, solve, FreeParameters};

/// Environment variable overriding the default tolerance.
pub const EPS_ENV: &str = "QUASILOCAL_EPS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "quasilocal",
    version,
    about = "Signed local hidden-variable measures for two-party CHSH experiments"
)]
struct Cli {
    /// Absolute tolerance for consistency checks [default: $QUASILOCAL_EPS or 1e-9]
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check range, normalization, no-signaling and the derived relations
    Validate {
        /// Box file, or `-` for stdin
        input: PathBuf,
    },
    /// Report all eight CHSH values
    Chsh { input: PathBuf },
    /// Construct a measure vector reproducing a box
    #[command(group(ArgGroup::new("params").args(["free", "free_file"])))]
    Solve {
        input: PathBuf,
        /// Seven comma-separated weights for strategies 2,3,7,10,14,15,16
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        free: Option<Vec<f64>>,
        /// File holding the seven free weights
        #[arg(long)]
        free_file: Option<PathBuf>,
        /// Use the one-parameter family for boxes with p2 = p3 = 0
        #[arg(long, conflicts_with = "params")]
        perfect_correlation: bool,
        /// Weight of strategy 16 for --perfect-correlation
        #[arg(long, requires = "perfect_correlation", allow_negative_numbers = true)]
        m16: Option<f64>,
        /// Write the measure file here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the box predicted by a measure file
    Forward {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the least total negativity reproducing a box
    Negativity { input: PathBuf },
    /// Generate a Born-rule box for two qubits
    #[command(group(ArgGroup::new("mode").required(true).args(["angles", "maximize"])))]
    Qm {
        /// `singlet`, or four comma-separated amplitudes for |++>,|+->,|-+>,|-->;
        /// a complex amplitude is written `re:im`
        #[arg(long, default_value = "singlet")]
        state: String,
        /// Angles of a1 a2 b1 b2 in the x-z plane, degrees from +z
        #[arg(long, num_args = 4, allow_negative_numbers = true)]
        angles: Option<Vec<f64>>,
        /// Grid-search coplanar angles for the largest CHSH value
        #[arg(long)]
        maximize: bool,
        /// Grid step in degrees for --maximize
        #[arg(long, default_value_t = 5.0)]
        resolution: f64,
    },
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

enum Failure {
    Domain(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Parse { .. } | Error::Io(_) => Failure::Input(err.to_string()),
            _ => Failure::Domain(err.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Input(err.to_string())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Runs the command line with explicit streams; returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = err.render().to_string();
            let _ = if err.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
    };
    match dispatch(cli, &mut io) {
        Ok(code) => code,
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            EXIT_DOMAIN
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn resolve_eps(flag: Option<f64>) -> std::result::Result<f64, Failure> {
    let eps = match flag {
        Some(v) => v,
        None => match std::env::var(EPS_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Failure::Input(format!("{EPS_ENV}=`{s}` is not a number")))?,
            Err(_) => DEFAULT_EPS,
        },
    };
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Failure::Input(format!("tolerance {eps} must be finite and nonnegative")));
    }
    Ok(eps)
}

fn dispatch(cli: Cli, io: &mut Io) -> CmdResult {
    let eps = resolve_eps(cli.eps)?;
    let json = cli.format == OutputFormat::Json;
    match cli.command {
        Command::Validate { input } => cmd_validate(&input, eps, json, io),
        Command::Chsh { input } => cmd_chsh(&input, eps, json, io),
        Command::Solve {
            input,
            free,
            free_file,
            perfect_correlation,
            m16,
            out,
        } => {
            let mode = if perfect_correlation {
                SolveMode::PerfectCorrelation(m16.unwrap_or(0.0))
            } else if let Some(values) = free {
                SolveMode::General(free_params(&values)?)
            } else if let Some(path) = free_file {
                SolveMode::General(read_free_file(&path)?)
            } else {
                SolveMode::General(FreeParameters::zeros())
            };
            cmd_solve(&input, mode, out.as_deref(), eps, json, io)
        }
        Command::Forward { input, out } => cmd_forward(&input, out.as_deref(), json, io),
        Command::Negativity { input } => cmd_negativity(&input, eps, json, io),
        Command::Qm {
            state,
            angles,
            maximize,
            resolution,
        } => {
            let state = parse_state(&state)?;
            let angles = if maximize { None } else { angles };
            cmd_qm(&state, angles, resolution, json, io)
        }
    }
}

fn read_input(path: &Path, io: &mut Io) -> std::result::Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io.stdin.read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
    }
}

fn emit(out: Option<&Path>, text: &str, io: &mut Io) -> std::result::Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => Ok(io.stdout.write_all(text.as_bytes())?),
    }
}

fn emit_json(value: &Value, out: Option<&Path>, io: &mut Io) -> std::result::Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(out, &text, io)
}

fn free_params(values: &[f64]) -> std::result::Result<FreeParameters, Failure> {
    let arr: [f64; 7] = values.try_into().map_err(|_| {
        Failure::Input(format!("expected 7 free parameters, got {}", values.len()))
    })?;
    if arr.iter().any(|v| !v.is_finite()) {
        return Err(Failure::Input("free parameters must be finite".into()));
    }
    Ok(FreeParameters(arr))
}

fn read_free_file(path: &Path) -> std::result::Result<FreeParameters, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for token in content.split(|c: char| c.is_whitespace() || c == ',') {
            if token.is_empty() {
                continue;
            }
            let v: f64 = token.parse().map_err(|_| {
                Failure::Input(format!("{}: line {}: `{token}` is not a number", path.display(), n + 1))
            })?;
            values.push(v);
        }
    }
    free_params(&values)
}

fn parse_state(text: &str) -> std::result::Result<TwoQubitState, Failure> {
    if text.eq_ignore_ascii_case("singlet") {
        return Ok(TwoQubitState::singlet());
    }
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = |s: &str| Failure::Input(format!("`{s}` is not an amplitude (use `re` or `re:im`)"));
    if parts.len() != 4 {
        return Err(Failure::Input(format!(
            "state needs 4 amplitudes or `singlet`, got `{text}`"
        )));
    }
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for (slot, part) in amps.iter_mut().zip(&parts) {
        let (re, im) = match part.split_once(':') {
            Some((re, im)) => (re, im),
            None => (*part, "0"),
        };
        let re: f64 = re.trim().parse().map_err(|_| bad(part))?;
        let im: f64 = im.trim().parse().map_err(|_| bad(part))?;
        *slot = Complex64::new(re, im);
    }
    Ok(TwoQubitState::normalized(amps)?)
}

fn violations_json(v: &[Violation]) -> Value {
    Value::from(v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn cmd_validate(input: &Path, eps: f64, json: bool, io: &mut Io) -> CmdResult {
    let p = parse_box(&read_input(input, io)?)?;
    let checks = [
        ("range", check_range(&p, eps)),
        ("normalization", check_normalization(&p, eps)),
        ("no-signaling", check_no_signaling(&p, eps)),
        ("derived-relations", check_derived_relations(&p, eps)),
    ];
    let consistent = checks.iter().all(|(_, v)| v.is_empty());
    if json {
        let mut obj = serde_json::Map::new();
        for (name, v) in &checks {
            obj.insert(
                name.to_string(),
                json!({ "pass": v.is_empty(), "violations": violations_json(v) }),
            );
        }
        obj.insert("consistent".into(), Value::from(consistent));
        obj.insert("eps".into(), Value::from(eps));
        emit_json(&Value::Object(obj), None, io)?;
    } else {
        let mut text = String::new();
        for (name, v) in &checks {
            let verdict = if v.is_empty() { "PASS" } else { "FAIL" };
            text.push_str(&format!("{name:<18} {verdict}\n"));
            for violation in v {
                text.push_str(&format!("  {violation}\n"));
            }
        }
        let verdict = if consistent { "yes" } else { "no" };
        text.push_str(&format!("consistent: {verdict} (eps = {eps:e})\n"));
        emit(None, &text, io)?;
    }
    Ok(if consistent { EXIT_OK } else { EXIT_DOMAIN })
}

fn cmd_chsh(input: &Path, eps: f64, json: bool, io: &mut Io) -> CmdResult {
    let p = parse_box(&read_input(input, io)?)?;
    ensure_consistent(&p, eps)?;
    let report = chsh_report(&p, eps)?;
    if json {
        let variants: Vec<Value> = report
            .iter()
            .map(|(v, d, x)| json!({ "expression": v.label(), "delta": d, "violated": x }))
            .collect();
        let doc = json!({
            "variants": variants,
            "canonical_delta": report.canonical_delta(),
            "max_abs_delta": report.max_abs_delta,
            "violated": report.any_violated(),
        });
        emit_json(&doc, None, io)?;
    } else {
        let mut text = format!("{:<28} {:>22}  violated\n", "expression", "delta");
        for (v, d, x) in report.iter() {
            let flag = if x { "yes" } else { "no" };
            text.push_str(&format!("{:<28} {:>22}  {flag}\n", v.label(), format_value(d)));
        }
        text.push_str(&format!("max |delta|: {}\n", format_value(report.max_abs_delta)));
        let verdict = if report.any_violated() { "violated" } else { "satisfied" };
        text.push_str(&format!("chsh inequality: {verdict}\n"));
        emit(None, &text, io)?;
    }
    Ok(EXIT_OK)
}

enum SolveMode {
    General(FreeParameters),
    PerfectCorrelation(f64),
}

fn negativity_summary(m: &MeasureVector) -> Vec<String> {
    let negative = m.negative_strategies();
    let mut lines = vec![format!("sum of weights: {}", format_value(m.total()))];
    if negative.is_empty() {
        lines.push("negative weights: none".into());
    } else {
        let list: Vec<String> = negative
            .iter()
            .map(|s| format!("m{} ({s})", s.number()))
            .collect();
        lines.push(format!("negative weights: {}", list.join(", ")));
    }
    lines.push(format!("total negativity: {}", format_value(m.total_negativity())));
    lines
}

fn cmd_solve(
    input: &Path,
    mode: SolveMode,
    out: Option<&Path>,
    eps: f64,
    json: bool,
    io: &mut Io,
) -> CmdResult {
    let p = parse_box(&read_input(input, io)?)?;
    ensure_consistent(&p, eps)?;
    let (m, header) = match mode {
        SolveMode::General(f) => {
            let values: Vec<String> = f.values().iter().map(|v| format_value(*v)).collect();
            (solve(&p, &f, eps)?, format!("free parameters (m2 m3 m7 m10 m14 m15 m16): {}", values.join(" ")))
        }
        SolveMode::PerfectCorrelation(m16) => (
            perfect_correlation_solution(&p, m16, eps)?,
            format!("perfect-correlation family, m16 = {}", format_value(m16)),
        ),
    };
    if json {
        let mut doc = measures_to_json(&m);
        let negative: Vec<Value> = m
            .negative_strategies()
            .iter()
            .map(|s| Value::from(s.pattern()))
            .collect();
        doc["negative"] = Value::from(negative);
        doc["total_negativity"] = Value::from(m.total_negativity());
        emit_json(&doc, out, io)?;
    } else {
        let mut text = write_measures(&m, &[header]);
        for line in negativity_summary(&m) {
            text.push_str(&format!("# {line}\n"));
        }
        emit(out, &text, io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_forward(input: &Path, out: Option<&Path>, json: bool, io: &mut Io) -> CmdResult {
    let m = parse_measures(&read_input(input, io)?)?;
    let total = m.total();
    if (total - 1.0).abs() > DEFAULT_EPS {
        writeln!(io.stderr, "warning: measure weights sum to {}, not 1", format_value(total))?;
    }
    let p = forward_map(&m);
    if json {
        emit_json(&box_to_json(&p), out, io)?;
    } else {
        emit(out, &write_box(&p, &[]), io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_negativity(input: &Path, eps: f64, json: bool, io: &mut Io) -> CmdResult {
    let p = parse_box(&read_input(input, io)?)?;
    let r = min_negativity(&p, eps)?;
    if json {
        let doc = json!({
            "min_negativity": r.min_negativity,
            "lower_bound": r.lower_bound,
            "feasible": r.feasible,
            "witness_free_params": r.witness_free_params.values().to_vec(),
            "witness": measures_to_json(&r.witness)["measures"].clone(),
        });
        emit_json(&doc, None, io)?;
    } else {
        let free: Vec<String> = r
            .witness_free_params
            .values()
            .iter()
            .map(|v| format_value(*v))
            .collect();
        let comments = vec![
            format!("min_negativity: {}", format_value(r.min_negativity)),
            format!("lower_bound: {}", format_value(r.lower_bound)),
            format!("feasible: {}", if r.feasible { "yes" } else { "no" }),
            format!("witness free parameters: {}", free.join(" ")),
        ];
        emit(None, &write_measures(&r.witness, &comments), io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_qm(
    state: &TwoQubitState,
    angles: Option<Vec<f64>>,
    resolution: f64,
    json: bool,
    io: &mut Io,
) -> CmdResult {
    let mut comments = Vec::new();
    let (scenario, best) = match angles {
        Some(a) => {
            if a.len() != 4 || a.iter().any(|v| !v.is_finite()) {
                return Err(Failure::Input("--angles needs four finite values".into()));
            }
            (QubitScenario::coplanar(*state, a[0], a[1], a[2], a[3]), None)
        }
        None => {
            let m = maximize_chsh(state, resolution)?;
            (m.scenario, Some(m))
        }
    };
    let p = generate_probability_set(&scenario);
    let angle_list = match &best {
        Some(m) => m.angles.to_vec(),
        None => Vec::new(),
    };
    if let Some(m) = &best {
        comments.push(format!(
            "angles (deg): a1={} a2={} b1={} b2={}",
            angle_list[0], angle_list[1], angle_list[2], angle_list[3]
        ));
        comments.push(format!(
            "best chsh: {} ({})",
            format_value(m.best_delta),
            m.variant.label()
        ));
    }
    if json {
        let mut doc = box_to_json(&p);
        if let Some(m) = &best {
            doc["best_delta"] = Value::from(m.best_delta);
            doc["variant"] = Value::from(m.variant.label());
            doc["angles"] = Value::from(angle_list);
        }
        emit_json(&doc, None, io)?;
    } else {
        if let Some(m) = &best {
            writeln!(
                io.stderr,
                "best chsh {} at a1={} a2={} b1={} b2={} ({})",
                format_value(m.best_delta),
                m.angles[0],
                m.angles[1],
                m.angles[2],
                m.angles[3],
                m.variant.label()
            )?;
        }
        emit(None, &write_box(&p, &comments), io)?;
    }
    Ok(EXIT_OK)
}
