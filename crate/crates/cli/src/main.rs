//! `vfx`: verify, run and certify small C functions.

use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use vfx_checker::{check, Verdict};
use vfx_core::arith::{format_model, ProveFailure};
use vfx_core::cbsem::{run_program, ExecResult, Outcome};
use vfx_core::certificate::emit;
use vfx_core::verify;
use vfx_lang::cert::Certificate;
use vfx_lang::parse::{parse_program, ParsedProgram, SourceProgram};
use vfx_lang::well_formed;

const OK: u8 = 0;
const VERIFY_FAILED: u8 = 1;
const USAGE: u8 = 2;
const STUCK: u8 = 3;
const FUEL: u8 = 4;
const REJECTED: u8 = 5;

const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "vfx", version, about = "Verify, run and certify small C functions")]
struct Cli {
    /// Colored diagnostics: auto, always or never.
    #[arg(long, env = "VFX_COLOR", default_value = "auto", global = true)]
    color: ColorChoice,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColorChoice {
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a function against its contract.
    Verify {
        file: PathBuf,
        /// Write a proof certificate to this path.
        #[arg(long, value_name = "PATH")]
        emit_cert: Option<PathBuf>,
        /// Print the proof steps.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check a proof certificate.
    Check {
        cert: PathBuf,
        /// Also require the certificate to match this source file.
        #[arg(long, value_name = "FILE")]
        source: Option<PathBuf>,
    },
    /// Run a parameterless function with the reference interpreter.
    Run {
        file: PathBuf,
        /// Maximum number of loop iterations.
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        /// Report how many loop iterations ran.
        #[arg(long)]
        stats: bool,
    },
    /// Print the verification formula.
    Sep {
        file: PathBuf,
        /// One-line s-expression instead of the indented form.
        #[arg(long)]
        canonical: bool,
    },
}

struct Ui {
    color: bool,
}

impl Ui {
    fn error(&self, msg: impl std::fmt::Display) {
        if self.color {
            eprintln!("\x1b[1;31merror\x1b[0m: {msg}");
        } else {
            eprintln!("error: {msg}");
        }
    }

    fn located(&self, path: &str, pos: impl std::fmt::Display, msg: impl std::fmt::Display) {
        if self.color {
            eprintln!("\x1b[1m{path}:{pos}\x1b[0m: \x1b[1;31merror\x1b[0m: {msg}");
        } else {
            eprintln!("{path}:{pos}: error: {msg}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ui = Ui {
        color: match cli.color {
            ColorChoice::Always => true,
            ColorChoice::Never => false,
            ColorChoice::Auto => std::io::stderr().is_terminal(),
        },
    };
    let code = match cli.command {
        Command::Verify {
            file,
            emit_cert,
            trace,
            format,
        } => cmd_verify(&ui, &file, emit_cert.as_deref(), trace, format),
        Command::Check { cert, source } => cmd_check(&ui, &cert, source.as_deref()),
        Command::Run { file, fuel, stats } => cmd_run(&ui, &file, fuel, stats),
        Command::Sep { file, canonical } => cmd_sep(&ui, &file, canonical),
    };
    ExitCode::from(code)
}

fn read(ui: &Ui, path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        ui.error(format_args!("cannot read {}: {e}", path.display()));
        USAGE
    })
}

fn load(ui: &Ui, path: &Path, text: &str) -> Result<ParsedProgram, u8> {
    let name = path.display().to_string();
    let parsed = parse_program(&SourceProgram::new(&name, text)).map_err(|e| {
        ui.located(&e.path, e.pos, &e.kind);
        USAGE
    })?;
    let diags = well_formed(&parsed.func);
    if !diags.is_empty() {
        for d in diags {
            ui.located(&name, parsed.sites.header, d);
        }
        return Err(USAGE);
    }
    Ok(parsed)
}

fn cmd_verify(ui: &Ui, path: &Path, cert_path: Option<&Path>, trace: bool, format: Format) -> u8 {
    let text = match read(ui, path) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let program = match load(ui, path, &text) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let name = path.display().to_string();
    let (_, result) = verify(&program.func);
    match result {
        Ok(proof) => {
            if let Some(out) = cert_path {
                let cert = emit(&program.func, &proof, &text);
                if let Err(e) = fs::write(out, cert.to_json()) {
                    ui.error(format_args!("cannot write {}: {e}", out.display()));
                    return USAGE;
                }
            }
            match format {
                Format::Json => {
                    let obj = json!({
                        "file": name,
                        "function": program.name,
                        "status": "verified",
                        "errors": 0,
                        "steps": proof.steps.len(),
                        "proof": if trace { Some(proof.lines()) } else { None },
                        "certificate": cert_path.map(|p| p.display().to_string()),
                    });
                    println!("{obj}");
                }
                Format::Text => {
                    if trace {
                        for line in proof.lines() {
                            println!("{line}");
                        }
                    }
                    println!("verified: 0 errors found");
                }
            }
            OK
        }
        Err(failure) => {
            let pos = program.sites.locate(&failure.site);
            match format {
                Format::Json => {
                    let obj = json!({
                        "file": name,
                        "function": program.name,
                        "status": "failed",
                        "errors": 1,
                        "error": failure_json(&failure, pos.line, pos.col),
                    });
                    println!("{obj}");
                }
                Format::Text => {
                    ui.located(&name, pos, &failure);
                    eprintln!("verification failed: 1 error found");
                }
            }
            VERIFY_FAILED
        }
    }
}

fn failure_json(f: &ProveFailure, line: u32, col: u32) -> serde_json::Value {
    use vfx_core::arith::ProveFailureReason as R;
    let (kind, obligation) = match &f.reason {
        R::Refuted(k) => ("refuted", Some(k.to_string())),
        R::Undecided(k, _) => ("undecided", Some(k.to_string())),
        R::Unreachable(_) => ("unreachable", None),
    };
    json!({
        "kind": kind,
        "obligation": obligation,
        "message": f.to_string(),
        "line": line,
        "column": col,
        "leaf": f.leaf,
        "path": f.path,
        "model": f.model.as_ref().map(format_model),
    })
}

fn cmd_check(ui: &Ui, cert_path: &Path, source: Option<&Path>) -> u8 {
    let text = match read(ui, cert_path) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let cert = match Certificate::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            ui.error(format_args!("rejected: {e}"));
            return REJECTED;
        }
    };
    let src_text = match source.map(|p| read(ui, p)).transpose() {
        Ok(t) => t,
        Err(c) => return c,
    };
    let src_name = source.map(|p| p.display().to_string()).unwrap_or_default();
    let src = src_text.as_deref().map(|t| SourceProgram::new(&src_name, t));
    match check(&cert, src.as_ref()) {
        Verdict::Accepted => {
            println!("accepted: {} steps replayed", cert.proof.len());
            OK
        }
        Verdict::Rejected(r) => {
            ui.error(format_args!("rejected: {r}"));
            REJECTED
        }
    }
}

fn cmd_run(ui: &Ui, path: &Path, fuel: u64, stats: bool) -> u8 {
    let text = match read(ui, path) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let program = match load(ui, path, &text) {
        Ok(p) => p,
        Err(c) => return c,
    };
    if !program.func.args.is_empty() {
        ui.located(
            &path.display().to_string(),
            program.sites.header,
            "only functions without parameters can be run",
        );
        return USAGE;
    }
    let (result, counters) = run_program(&program.func.body, fuel);
    let code = match result {
        ExecResult::Terminated(_, Outcome::Return(z)) => {
            println!("return {z}");
            OK
        }
        ExecResult::Terminated(_, Outcome::Normal) => unreachable!("a return is appended"),
        ExecResult::Stuck(reason) => {
            println!("stuck: {reason}");
            STUCK
        }
        ExecResult::FuelExhausted => {
            println!("fuel exhausted after {fuel}");
            FUEL
        }
    };
    if stats {
        println!("iterations: {}", counters.iterations);
    }
    code
}

fn cmd_sep(ui: &Ui, path: &Path, canonical: bool) -> u8 {
    let text = match read(ui, path) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let program = match load(ui, path, &text) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let sep = vfx_core::symexec::sym_exec_func(&program.func);
    if canonical {
        println!("{}", sep.canonical());
    } else {
        println!("{}", sep.pretty().trim_end());
    }
    OK
}
