use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qborel::dilog::SelfTestConfig;
use qborel::repbuild::all_preset_names;
use qborel::rewrite::BUILTIN_SCRIPTS;
use qborel::verify::{self, Check, CheckReport};
use qborel::{build_preset, builtin_script, Generator, Representation, TransformScript};

const REPORT_DIR_VAR: &str = "QBOREL_REPORT_DIR";

#[derive(Parser)]
#[command(
    name = "qborel",
    version,
    about = "Verify positive representations of quantum Borel algebras"
)]
struct Cli {
    /// Print the full JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a symbolic verification suite.
    Check {
        #[command(subcommand)]
        what: CheckCmd,
    },
    /// Tensor-square decomposition of the positive representation.
    Decompose {
        #[arg(long = "type")]
        typ: String,
        /// Write the per-generator rewriting trace to this file.
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Numerical quantum dilogarithm checks.
    Dilog {
        #[command(subcommand)]
        what: DilogCmd,
    },
    /// Inspect the bundled representations.
    Rep {
        #[command(subcommand)]
        what: RepCmd,
    },
    /// Run transformation scripts.
    Script {
        #[command(subcommand)]
        what: ScriptCmd,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Quantum group relations of a preset.
    Relations {
        #[arg(long)]
        preset: String,
    },
    /// GNS twists, flip and Coxeter move for a rank-two type.
    Gns {
        #[arg(long = "type")]
        typ: String,
    },
    /// Pairing data of the K_i and root vectors.
    Plane {
        #[arg(long)]
        preset: String,
    },
    /// Dual generators under b ↦ 1/b.
    Transcendental {
        #[arg(long)]
        preset: String,
    },
    /// Generator form of the A2 decomposition arguments.
    Repind {
        #[arg(long = "type", default_value = "A2")]
        typ: String,
    },
}

#[derive(Subcommand)]
enum DilogCmd {
    Selftest {
        #[arg(long, default_value_t = 0.75)]
        b: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Latex,
    Json,
    Text,
}

#[derive(Subcommand)]
enum RepCmd {
    Print {
        #[arg(long)]
        preset: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    List,
}

#[derive(Subcommand)]
enum ScriptCmd {
    /// Apply a script file (or bundled script name) to every generator.
    Apply {
        #[arg(long)]
        file: String,
        /// Preset name or path to a representation document.
        #[arg(long)]
        input: String,
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn run(cli: &Cli) -> AnyResult<bool> {
    let report = match &cli.cmd {
        Cmd::Check { what } => match what {
            CheckCmd::Relations { preset } => verify::suite_quantum_group_preset(preset)?,
            CheckCmd::Gns { typ } => verify::suite_gns(typ)?,
            CheckCmd::Plane { preset } => verify::suite_integrable_plane(&build_preset(preset)?)?,
            CheckCmd::Transcendental { preset } => verify::suite_transcendental(preset)?,
            CheckCmd::Repind { typ } => verify::suite_repind_script(typ)?,
        },
        Cmd::Decompose { typ, emit_trace } => {
            let r = verify::suite_decomposition(typ)?;
            if let Some(path) = emit_trace {
                write_json(path, &serde_json::to_value(&r.traces)?)?;
            }
            r
        }
        Cmd::Dilog {
            what: DilogCmd::Selftest { b, tol, samples },
        } => {
            let cfg = SelfTestConfig {
                tol: *tol,
                samples: *samples,
                ..SelfTestConfig::default()
            };
            verify::suite_dilog(*b, &cfg)?
        }
        Cmd::Rep { what } => {
            match what {
                RepCmd::Print { preset, format } => {
                    let rep = build_preset(preset)?;
                    match format {
                        Format::Latex => println!("{}", rep.to_latex()),
                        Format::Json => {
                            println!("{}", serde_json::to_string_pretty(&rep.to_json())?)
                        }
                        Format::Text => print_rep(&rep),
                    }
                }
                RepCmd::List => all_preset_names().iter().for_each(|n| println!("{n}")),
            }
            return Ok(true);
        }
        Cmd::Script {
            what: ScriptCmd::List,
        } => {
            BUILTIN_SCRIPTS.iter().for_each(|n| println!("{n}"));
            return Ok(true);
        }
        Cmd::Script {
            what:
                ScriptCmd::Apply {
                    file,
                    input,
                    emit_trace,
                },
        } => {
            let out = apply(file, input, cli.json)?;
            if let Some(path) = emit_trace {
                write_json(path, &serde_json::to_value(&out.traces)?)?;
            }
            out
        }
    };
    emit(&report, cli.json)?;
    Ok(report.passed)
}

fn apply(file: &str, input: &str, quiet: bool) -> AnyResult<CheckReport> {
    let start = std::time::Instant::now();
    let script = if Path::new(file).exists() {
        TransformScript::from_json_str(&std::fs::read_to_string(file)?)?
    } else {
        builtin_script(file)?
    };
    let rep = if Path::new(input).exists() {
        Representation::from_json(&serde_json::from_str(&std::fs::read_to_string(input)?)?)?
    } else {
        build_preset(input)?
    };
    let (checks, traces, result) = match qborel::apply_script_rep(&script, &rep) {
        Ok((out, traces)) => {
            let checks = traces
                .iter()
                .map(|(g, t)| {
                    Check::flag(format!("{g} rewritten"), true)
                        .with_detail(serde_json::json!({ "steps": t.len(), "result": g.parse::<Generator>().ok().and_then(|g| out.get(g)).map(|s| s.to_string()) }))
                })
                .collect();
            (checks, traces, Some(out))
        }
        Err(e) => (
            vec![Check::failed(format!("apply {}", script.name), &e)],
            Default::default(),
            None,
        ),
    };
    if let (Some(out), false) = (&result, quiet) {
        print_rep(out);
    }
    let mut report = CheckReport::new(
        "script",
        &format!("{} on {}", script.name, rep.name),
        checks,
        start,
    );
    report.traces = traces;
    Ok(report)
}

fn print_rep(rep: &Representation) {
    let vars: Vec<&str> = rep.space.vars().iter().map(|v| v.name.as_str()).collect();
    println!("{} [{}]", rep.name, vars.join(", "));
    for (g, s) in &rep.gens {
        if !matches!(g, Generator::KInv(_)) {
            println!("  {g} = {s}");
        }
    }
}

fn emit(report: &CheckReport, json: bool) -> AnyResult<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    } else {
        for c in &report.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            match (c.numeric_residual, c.tolerance) {
                (Some(r), Some(t)) => {
                    println!("{mark}  {}  residual {r:.3e} (tol {t:.0e})", c.name)
                }
                _ => match &c.residual {
                    Some(r) if !c.passed => println!("{mark}  {}  residual {r}", c.name),
                    _ => println!("{mark}  {}", c.name),
                },
            }
        }
        for n in &report.notes {
            println!("note: {n}");
        }
        let failed = report.failures().len();
        println!(
            "{} {} [{}]: {}/{} passed in {:.1} ms",
            report.suite,
            report.subject,
            if report.passed { "ok" } else { "FAILED" },
            report.checks.len() - failed,
            report.checks.len(),
            report.elapsed_ms
        );
    }
    if let Ok(dir) = std::env::var(REPORT_DIR_VAR) {
        let slug: String = report
            .subject
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '.' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        let path = PathBuf::from(dir).join(format!("{}-{}.json", report.suite, slug));
        write_json(&path, &report.to_json())?;
    }
    Ok(())
}

fn write_json(path: &Path, v: &serde_json::Value) -> AnyResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}
