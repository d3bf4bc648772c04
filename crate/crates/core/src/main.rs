use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use seqsolve::automata::Caps;
use seqsolve::cli::bench::{bench, format_table, to_csv, BenchOptions, Suite, DEFAULT_TIMEOUT};
use seqsolve::cli::run::export;
use seqsolve::cli::{parse, run, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "seqsolve", version, about = "Sequence constraint solver")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the command inside a problem file.
    Check {
        file: PathBuf,
        /// Give up after this many seconds.
        #[arg(long)]
        timeout: Option<u64>,
        /// Caps as `states=N,paths=N`.
        #[arg(long)]
        caps: Option<String>,
        /// Word length bound for `(reduce)`.
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Run a benchmark suite and print a results table.
    Bench {
        #[arg(long)]
        suite: Suite,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Per-check timeout in seconds.
        #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs())]
        timeout: u64,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
    },
    /// Reduce a problem file and write the first instance as SMT-LIB.
    Export { file: PathBuf, out: PathBuf },
}

fn parse_caps(spec: &str) -> Result<Caps, String> {
    let mut caps = Caps::default();
    for item in spec.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{item}`"))?;
        let n: usize = v.parse().map_err(|e| format!("`{v}`: {e}"))?;
        match k {
            "states" => caps.max_states = n,
            "paths" => caps.max_paths = n,
            _ => return Err(format!("unknown cap `{k}`")),
        }
    }
    Ok(caps)
}

fn load(path: &PathBuf) -> Result<seqsolve::cli::ProblemFile, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse(&text).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })
}

fn fail(e: &CliError) -> ExitCode {
    let kind = if e.is_resource() { "resource" } else { "error" };
    eprintln!("{kind}: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Check {
            file,
            timeout,
            caps,
            bound,
        } => {
            let caps = match caps.as_deref().map(parse_caps).transpose() {
                Ok(c) => c.unwrap_or_default(),
                Err(m) => {
                    eprintln!("error: --caps: {m}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions {
                caps,
                timeout: timeout.map(Duration::from_secs),
                bound,
            };
            match load(&file).and_then(|f| run(&f, &opts)) {
                Ok(r) => {
                    print!("{r}");
                    ExitCode::from(r.verdict.exit_code() as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Cmd::Bench {
            suite,
            csv,
            timeout,
            repetitions,
        } => {
            let opts = BenchOptions {
                repetitions,
                timeout: Duration::from_secs(timeout),
                ..BenchOptions::default()
            };
            match bench(suite, &opts) {
                Ok(rows) => {
                    print!("{}", format_table(&rows));
                    if let Some(path) = csv {
                        if let Err(e) = std::fs::write(&path, to_csv(&rows)) {
                            return fail(&e.into());
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Cmd::Export { file, out } => match load(&file).and_then(|f| export(&f, &out)) {
            Ok(r) => {
                print!("{r}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
