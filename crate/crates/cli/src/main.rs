use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lienard_cli::render::{render_svg, Disc, RenderOptions};
use lienard_cli::report::{classify, At, ClassifyError, ClassifyOptions, VerifyMode};
use lienard_cli::spec::{SpecError, SystemSpecFile};
use lienard_cli::sweep::{run_sweep, summarize, write_sweep, GridSpec};

#[derive(Parser)]
#[command(name = "lienard", version, about = "Phase portraits of generalized Lienard systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a system spec file.
    Classify {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        at: At,
        #[arg(long, value_enum, default_value = "none")]
        verify: VerifyMode,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a phase portrait as SVG.
    Render {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "local")]
        disc: Disc,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 12)]
        orbits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Half-width of the local window.
        #[arg(long, default_value_t = 1.5)]
        radius: f64,
    },
    /// Classify every cell of a parameter grid.
    Sweep {
        grid: PathBuf,
        #[arg(long, env = "LIENARD_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(kind: &str, message: &str) -> ExitCode {
    let err = serde_json::json!({ "error": { "kind": kind, "message": message } });
    println!("{}", serde_json::to_string_pretty(&err).unwrap());
    eprintln!("error: {}", message);
    ExitCode::from(1)
}

fn fail_classify(e: &ClassifyError) -> ExitCode {
    fail(e.kind(), &e.to_string())
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), std::io::Error> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn load(path: &Path) -> Result<SystemSpecFile, ClassifyError> {
    Ok(SystemSpecFile::load(path)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify { input, at, verify, format, out } => {
            let report = match load(&input).and_then(|spec| classify(&spec, ClassifyOptions { at, verify })) {
                Ok(r) => r,
                Err(e) => return fail_classify(&e),
            };
            let text = match format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            if let Err(e) = emit(out.as_ref(), &text) {
                return fail("io", &e.to_string());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Render { input, disc, out, orbits, seed, radius } => {
            let at = if disc == Disc::Local { At::Origin } else { At::All };
            let spec = match load(&input) {
                Ok(s) => s,
                Err(e) => return fail_classify(&e),
            };
            if let Err(e) = classify(&spec, ClassifyOptions { at, verify: VerifyMode::None }) {
                return fail_classify(&e);
            }
            let sys = spec.system().expect("validated by classify");
            let opts = RenderOptions { disc, orbits, seed, radius, title: Some(sys.to_string()), ..Default::default() };
            if let Err(e) = std::fs::write(&out, render_svg(&sys, &opts)) {
                return fail("io", &e.to_string());
            }
            ExitCode::SUCCESS
        }
        Command::Sweep { grid, jobs, out } => {
            let grid = match GridSpec::load(&grid) {
                Ok(g) => g,
                Err(e) => return fail(SpecError::kind(&e), &e.to_string()),
            };
            let outcomes = run_sweep(&grid, jobs);
            let summary = summarize(&grid, &outcomes);
            if let Some(dir) = &out {
                if let Err(e) = write_sweep(dir, &summary, &outcomes) {
                    return fail("io", &e.to_string());
                }
            }
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            ExitCode::SUCCESS
        }
    }
}
