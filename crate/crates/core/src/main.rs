use clap::{Args, Parser, Subcommand, ValueEnum};
use spinflip::cli_io::experiment::emit_overlay;
use spinflip::cli_io::sweep::{fig3_specs, RowIssue};
use spinflip::cli_io::{
    emit_table, load_experiment_points, overlay, parse_config_with_preset, run_single, run_sweep, Format, Preset,
    ResultTable, RunContext, SweepSpec,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "spinflip", version, about = "Spin-flip lifetimes of magnetically trapped atoms near metal films")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single configuration
    Lifetime(Common),
    /// Sweep one parameter as given by the config's sweep keys
    Sweep(Common),
    /// Lifetime vs distance above a 2 um film (needs background_rate in --config)
    Fig2(Common),
    /// Lifetime vs skin depth at 50 um, thick slab and 1 um film
    Fig3(Common),
    /// Compare the fig2 model with measured lifetimes
    Overlay {
        #[command(flatten)]
        common: Common,
        /// CSV with columns d_um,tau_s[,err_s]
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative quadrature tolerance, overrides the config
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

const GENERIC: u8 = 1;
const CONFIG: u8 = 2;
const NUMERICAL: u8 = 3;
const DATA: u8 = 4;

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

fn load_context(common: &Common, preset: Preset, required: bool) -> Result<RunContext, Failure> {
    let text = match &common.config {
        Some(path) => fs::read_to_string(path).map_err(|e| fail(CONFIG, format!("{}: {e}", path.display())))?,
        None if required => return Err(fail(CONFIG, "--config is required for this command")),
        None => String::new(),
    };
    let mut ctx = parse_config_with_preset(&text, preset).map_err(|e| fail(CONFIG, e))?;
    if let Some(tol) = common.tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(fail(CONFIG, format!("--tol must lie in (0, 1), got {tol}")));
        }
        ctx.rel_tol = tol;
    }
    Ok(ctx)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| fail(GENERIC, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `figure.csv` -> `figure_thick.csv`
fn series_path(out: &Path, series: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{series}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{series}"),
    };
    out.with_file_name(name)
}

/// Prints row problems to stderr; true if there were any.
fn report_issues(table: &ResultTable) -> bool {
    let mut any = false;
    for (value, issue) in table.issues() {
        any = true;
        let (kind, msg) = match issue {
            RowIssue::NotConverged(m) => ("not converged", m),
            RowIssue::Failed(m) => ("failed", m),
        };
        eprintln!("{}={value:e}: {kind}: {msg}", table.swept_name);
    }
    any
}

fn emit(tables: &[(Option<&str>, ResultTable)], common: &Common) -> Result<bool, Failure> {
    let format = common.format.into();
    let mut issues = false;
    let mut stdout = String::new();
    for (series, table) in tables {
        issues |= report_issues(table);
        let text = emit_table(table, format).map_err(|e| fail(GENERIC, e))?;
        match (&common.out, series) {
            (Some(out), Some(s)) => write_output(Some(&series_path(out, s)), &text)?,
            (Some(out), None) => write_output(Some(out), &text)?,
            (None, _) => {
                if !stdout.is_empty() && format == Format::Csv {
                    stdout.push('\n');
                }
                stdout.push_str(&text);
            }
        }
    }
    if common.out.is_none() {
        write_output(None, &stdout)?;
    }
    Ok(issues)
}

fn sweep_of(ctx: &RunContext) -> Result<SweepSpec, Failure> {
    SweepSpec::from_context(ctx).ok_or_else(|| fail(CONFIG, "missing required key 'sweep'"))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Lifetime(common) => {
            let ctx = load_context(&common, Preset::None, true)?;
            ctx.point(None).map_err(|e| fail(CONFIG, e))?;
            emit(&[(None, run_single(&ctx))], &common)
        }
        Command::Sweep(common) => {
            let ctx = load_context(&common, Preset::None, true)?;
            emit(&[(None, run_sweep(&sweep_of(&ctx)?))], &common)
        }
        Command::Fig2(common) => {
            let ctx = load_context(&common, Preset::Fig2, false)?;
            emit(&[(None, run_sweep(&sweep_of(&ctx)?))], &common)
        }
        Command::Fig3(common) => {
            let ctx = load_context(&common, Preset::Fig3, false)?;
            let specs = fig3_specs(&ctx).ok_or_else(|| fail(CONFIG, "missing required key 'sweep'"))?;
            let tables: Vec<_> = specs.iter().map(|(name, spec)| (Some(*name), run_sweep(spec))).collect();
            emit(&tables, &common)
        }
        Command::Overlay { common, data } => {
            let ctx = load_context(&common, Preset::Fig2, false)?;
            let text = fs::read_to_string(&data).map_err(|e| fail(DATA, format!("{}: {e}", data.display())))?;
            let points = load_experiment_points(&text).map_err(|e| fail(DATA, format!("{}: {e}", data.display())))?;
            if points.is_empty() {
                eprintln!("{}: no data points", data.display());
            }
            let rows = overlay(&ctx, &points);
            let missing = rows.iter().filter(|r| r.tau_model_s.is_none()).count();
            if missing > 0 {
                eprintln!("model failed at {missing} of {} points", rows.len());
            }
            write_output(common.out.as_deref(), &emit_overlay(&rows, common.format.into()))?;
            Ok(missing > 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(NUMERICAL),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
