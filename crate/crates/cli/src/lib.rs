//! The `cdaimo` command line, callable in-process for tests.

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use cdaimo_core::reasoner::explain;
use cdaimo_core::report::{write_diff, write_report, Format};
use cdaimo_core::scenario::{dump_kb, load_doc, parse_scenario, Override, ScenarioError};
use cdaimo_core::seed::{builtin_bound_axioms, seed_kb};
use cdaimo_core::{assess_doc, assess_loaded, Error as CoreError};
use cdaimo_service::{machine_report, whatif_report, ApiError};

pub const EXIT_OK: i32 = 0;
/// `check` found warnings but no errors.
pub const EXIT_WARNINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cdaimo", version, about = "Collateral damage assessment over AI-enabled military operations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and validate a scenario. Exit 0 when clean, 1 with warnings, 2 on errors.
    Check { file: PathBuf },
    /// Saturate a scenario and print the assessment report.
    Reason {
        file: PathBuf,
        /// Include proof trees for every reported flag.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Write the report to a file instead of stdout.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Re-run a scenario with data values replaced and show what changes.
    Whatif {
        file: PathBuf,
        /// `subject.property=value`, repeatable.
        #[arg(long = "set", required = true)]
        set: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Proof tree for one fact of the saturated scenario.
    Explain {
        file: PathBuf,
        /// `x : Class`, `s property o` or `s property value`.
        #[arg(long)]
        fact: String,
    },
    /// Print a scenario's knowledge base in scenario syntax.
    Dump {
        file: PathBuf,
        /// Dump after saturation; derived facts appear as comments.
        #[arg(long)]
        saturated: bool,
    },
    /// Print the seed ontology.
    Seed {
        #[arg(long, required = true)]
        dump: bool,
    },
    /// Serve the HTTP interface.
    Serve {
        #[arg(long, default_value_t = 8787)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(message: impl Into<String>) -> Self {
        Failure { code: EXIT_ERROR, message: message.into() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: &ScenarioError) -> Failure {
    Failure::new(format!("{}:{e}", path.display()))
}

fn core_failure(path: &Path, e: CoreError) -> Failure {
    match e {
        CoreError::Scenario(s) => located(path, &s),
        other => Failure::new(format!("{}: {other}", path.display())),
    }
}

fn api_failure(path: &Path, e: ApiError) -> Failure {
    match (e.line, e.column) {
        (Some(l), Some(c)) => Failure::new(format!("{}:{l}:{c}: {}: {}", path.display(), e.code, e.message)),
        _ => Failure::new(format!("{}: {}", path.display(), e.message)),
    }
}

/// Runs the command line with `args` (program name first). `color` allows
/// ANSI styling of text written to `out`.
pub fn cli_main(args: &[String], out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli.command, out, err, color) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::new(format!("write failed: {e}")))
}

fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> Result<i32, Failure> {
    match command {
        Command::Check { file } => {
            let text = read(&file)?;
            let doc = parse_scenario(&text).map_err(|e| located(&file, &e))?;
            let load = load_doc(&doc).map_err(|e| located(&file, &e))?;
            for w in &load.warnings {
                let line = w.line.map(|l| format!("{l}:")).unwrap_or_default();
                let _ = writeln!(err, "{}:{line} warning: {}", file.display(), w.violation.message);
            }
            emit(
                out,
                &format!(
                    "{}: scenario `{}`, {} individuals, {} rules, {} warnings\n",
                    file.display(),
                    load.id,
                    load.kb.individuals().count(),
                    load.axioms.len(),
                    load.warnings.len()
                ),
            )?;
            Ok(if load.warnings.is_empty() { EXIT_OK } else { EXIT_WARNINGS })
        }
        Command::Reason { file, trace, format, output } => {
            let text = read(&file)?;
            let rendered = match format {
                OutputFormat::Json => machine_report(&text, trace).map_err(|e| api_failure(&file, e))?,
                OutputFormat::Text => {
                    let doc = parse_scenario(&text).map_err(|e| located(&file, &e))?;
                    let a = assess_doc(&doc, trace).map_err(|e| core_failure(&file, e))?;
                    write_report(&a.report, Format::Text, color && output.is_none())
                }
            };
            match output {
                Some(path) => fs::write(&path, rendered).map_err(|e| Failure::new(format!("{}: {e}", path.display())))?,
                None => emit(out, &rendered)?,
            }
            Ok(EXIT_OK)
        }
        Command::Whatif { file, set, format } => {
            let text = read(&file)?;
            let doc = parse_scenario(&text).map_err(|e| located(&file, &e))?;
            let overrides = set
                .iter()
                .map(|s| s.parse::<Override>().map_err(|e| Failure::new(format!("--set {s}: {}", e.message))))
                .collect::<Result<Vec<_>, _>>()?;
            match format {
                OutputFormat::Json => emit(out, &whatif_report(&doc, &overrides, false).map_err(|e| api_failure(&file, e))?)?,
                OutputFormat::Text => {
                    let w = cdaimo_core::whatif(&doc, &overrides, false).map_err(|e| core_failure(&file, e))?;
                    emit(out, &write_diff(&w.diff))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Explain { file, fact } => {
            let text = read(&file)?;
            let doc = parse_scenario(&text).map_err(|e| located(&file, &e))?;
            let a = assess_doc(&doc, false).map_err(|e| core_failure(&file, e))?;
            let found = a.result.kb_after.find_fact(&fact).ok_or_else(|| Failure::new(format!("`{fact}` does not hold")))?;
            let tree = explain(&a.result, &found).map_err(|e| Failure::new(e.to_string()))?;
            emit(out, &tree.render())?;
            Ok(EXIT_OK)
        }
        Command::Dump { file, saturated } => {
            let text = read(&file)?;
            let doc = parse_scenario(&text).map_err(|e| located(&file, &e))?;
            let load = load_doc(&doc).map_err(|e| located(&file, &e))?;
            let dump = if saturated {
                let (id, axioms) = (load.id.clone(), load.axioms.clone());
                let a = assess_loaded(load, false).map_err(|e| core_failure(&file, e))?;
                dump_kb(&a.result.kb_after, &id, &axioms)
            } else {
                dump_kb(&load.kb, &load.id, &load.axioms)
            };
            emit(out, &dump)?;
            Ok(EXIT_OK)
        }
        Command::Seed { .. } => {
            let axioms: Vec<_> = builtin_bound_axioms().iter().map(|(id, ax)| (id.to_string(), ax.clone())).collect();
            emit(out, &dump_kb(&seed_kb(), "seed", &axioms))?;
            Ok(EXIT_OK)
        }
        Command::Serve { port, bind } => {
            let addr = SocketAddr::new(bind, port);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(e.to_string()))?;
            let _ = writeln!(err, "listening on http://{addr}");
            runtime.block_on(cdaimo_service::serve(addr)).map_err(|e| Failure::new(format!("{addr}: {e}")))?;
            Ok(EXIT_OK)
        }
    }
}
