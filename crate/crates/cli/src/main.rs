use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fluxsw::sweep::{self, Cell, Format, Row, SweepConfig, SweepResult};
use fluxsw::Error;

#[derive(Parser)]
#[command(name = "fluxsw", version, about = "Effective couplings of flux qubits by exact Schrieffer-Wolff reduction")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a sweep and write one row per point.
    Sweep(SweepArgs),
    /// Evaluate a single point and print every reported quantity.
    Point(PointArgs),
    /// Run a sweep with the truncation check forced on and report each point's status.
    Check(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, short)]
    config: PathBuf,
    /// Multiply both basis truncations.
    #[arg(long)]
    truncation_scale: Option<f64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Override a configuration key, e.g. `--set qubit.alpha=0.7`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Axis value to evaluate when the configuration holds a sweep table.
    #[arg(long)]
    at: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

enum Failure {
    Config(String),
    AllFailed,
    Flagged,
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::AllFailed | Failure::Flagged => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(m) => Failure::Io(m),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_override(doc: &mut toml::Table, item: &str) -> Result<(), Failure> {
    let (key, raw) = item.split_once('=').ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got '{item}'")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Failure::Config(format!("bad key '{key}'")));
    }
    let mut table = doc;
    for p in &parts[..parts.len() - 1] {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| Failure::Config(format!("'{p}' in '{key}' is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

fn load(args: &CommonArgs, point: bool) -> Result<SweepConfig, Failure> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| Failure::Io(format!("{}: {e}", args.config.display())))?;
    let text = if args.set.is_empty() {
        text
    } else {
        let mut doc: toml::Table = text.parse().map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
        for item in &args.set {
            apply_override(&mut doc, item)?;
        }
        doc.to_string()
    };
    let parsed = if point { sweep::parse_point_config(&text) } else { sweep::parse_config(&text) };
    let mut cfg = parsed.map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    if let Some(s) = args.truncation_scale {
        if !(s.is_finite() && s > 0.0) {
            return Err(Failure::Config(format!("--truncation-scale must be positive, got {s}")));
        }
        cfg.settings.truncation_scale = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> fluxsw::Result<()>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            Ok(())
        }
    }
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut cfg = load(&args.common, false)?;
    if let Some(f) = args.format {
        cfg.format = match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        };
    }
    let result = sweep::run_sweep(&cfg)?;
    write_to(args.out.as_deref(), |w| sweep::emit(&result, cfg.format, w))?;
    let flagged = result.flagged();
    if flagged > 0 {
        eprintln!("{flagged} of {} points flagged", result.rows.len());
    }
    if result.all_failed() {
        return Err(Failure::AllFailed);
    }
    Ok(())
}

fn run_point(args: PointArgs) -> Result<(), Failure> {
    let mut cfg = load(&args.common, true)?;
    let value = match args.at {
        Some(v) => v,
        None if cfg.sweep.points == 1 => cfg.sweep.start,
        None => return Err(Failure::Config(format!("configuration sweeps {}; pass --at", cfg.sweep.axis.name()))),
    };
    cfg.sweep.start = value;
    cfg.sweep.stop = value;
    cfg.sweep.points = 1;
    let p = cfg.point(value);
    let outcome = sweep::evaluate_point(cfg.system, &p, &cfg.settings, cfg.analytics).map_err(|e| e.to_string());
    let failed = outcome.is_err();
    let result = SweepResult { config: cfg, rows: vec![Row { axis_value: value, gamma: p.gamma, outcome }] };
    if args.json {
        write_to(None, |w| sweep::emit_json(&result, w))?;
    } else {
        let mut out = String::new();
        for (name, cell) in sweep::columns().iter().zip(sweep::row_values(&result.rows[0])) {
            match cell {
                Cell::Num(x) => out.push_str(&format!("{name:<16} {x:.12e}\n")),
                Cell::Text(t) if !t.is_empty() => out.push_str(&format!("{name:<16} {t}\n")),
                _ => {}
            }
        }
        print!("{out}");
    }
    if failed {
        return Err(Failure::AllFailed);
    }
    Ok(())
}

fn run_check(args: CommonArgs) -> Result<(), Failure> {
    let mut cfg = load(&args, false)?;
    cfg.settings.convergence = true;
    let result = sweep::run_sweep(&cfg)?;
    let axis = cfg.sweep.axis.name();
    for row in &result.rows {
        let flags = row.flags();
        let status = if flags.is_empty() { "ok".to_string() } else { flags.join(";") };
        println!("{axis}={:<14.6e} {status}", row.axis_value);
    }
    let flagged = result.flagged();
    println!("{} points, {flagged} flagged", result.rows.len());
    if result.all_failed() {
        Err(Failure::AllFailed)
    } else if flagged > 0 {
        Err(Failure::Flagged)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let r = match cli.cmd {
        Cmd::Sweep(a) => run_sweep(a),
        Cmd::Point(a) => run_point(a),
        Cmd::Check(a) => run_check(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Io(m) => eprintln!("error: {m}"),
                Failure::AllFailed => eprintln!("error: every point failed"),
                Failure::Flagged => {}
            }
            ExitCode::from(f.code())
        }
    }
}
