use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mvlab_cli::{error_response, execute, CliError, Command, Mode, Request};
use serde_json::Value;

/// Multiview geometry operations over JSON.
#[derive(Parser, Debug)]
#[command(name = "mvlab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Input document path, or `-` for stdin.
    input: Option<String>,
    /// Inline input document instead of a path.
    #[arg(long, conflicts_with = "input")]
    json: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Tolerance for float-mode rank and essential tests.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Views for `simulate`.
    #[arg(long, default_value_t = 2)]
    views: usize,
    /// World points for `simulate`.
    #[arg(long, default_value_t = 7)]
    points: usize,
    /// Write the output document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(cli: &Cli) -> Result<Option<Value>, CliError> {
    let text = match (&cli.json, cli.input.as_deref()) {
        (Some(s), _) => s.clone(),
        (None, Some("-")) => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
            s
        }
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {path}: {e}")))?,
        (None, None) => return Ok(None),
    };
    serde_json::from_str(&text).map(Some).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let response = match read_input(&cli) {
        Ok(input) => execute(&Request {
            command: cli.command,
            input,
            mode: cli.mode,
            tol: cli.tol,
            seed: cli.seed,
            views: cli.views,
            points: cli.points,
        }),
        Err(e) => error_response(Some(cli.command), &e),
    };
    let text = response.render();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("writing {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(response.status as u8)
}
