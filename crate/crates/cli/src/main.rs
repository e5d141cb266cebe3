use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use morsecert_core::certify::{
    certify, read_json, state_to_doc, verify_report, CertifyOptions, InputsDoc, Mode, PolytopeDoc,
    Problem, Report,
};
use morsecert_core::polytope::f_vector_check;
use morsecert_core::state::{orbit, BadFaceSignature};
use morsecert_core::Error;

const WORKERS_ENV: &str = "MORSECERT_WORKERS";

#[derive(Parser)]
#[command(name = "morsecert", version, about = "Certify circle-valued Morse functions on cube complexes built from right-angled polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a certification and print the report.
    Certify {
        #[command(subcommand)]
        target: Target,
    },
    /// Replay every certificate in a structured report.
    Verify {
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Describe a built-in polytope, optionally exporting it as input files.
    Info {
        #[arg(value_enum)]
        which: Builtin,
        /// Write polytope.json, moves.json and state.json into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Target {
    P6(Common),
    P5(Common),
    Generic {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        moves: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Perfect)]
        mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    restarts: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads; defaults to $MORSECERT_WORKERS, then to all cores.
    #[arg(long)]
    parallel: Option<usize>,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fibration,
    Perfect,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    P6,
    P5,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(3),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Input(_) | Error::Parse { .. } | Error::Io(_)) => 2,
        Some(Error::Structural(_)) => 1,
        Some(Error::Internal(_)) => 3,
        None if e.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some()) => 2,
        None => 3,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Certify { target } => {
            let (problem, common) = match target {
                Target::P6(c) => (Problem::p6()?, c),
                Target::P5(c) => (Problem::p5()?, c),
                Target::Generic {
                    polytope,
                    moves,
                    state,
                    mode,
                    common,
                } => {
                    let inputs = InputsDoc {
                        polytope: read_json(&polytope)?,
                        moves: read_json(&moves)?,
                        state: read_json(&state)?,
                    };
                    let mode = match mode {
                        ModeArg::Fibration => Mode::Fibration,
                        ModeArg::Perfect => Mode::Perfect,
                    };
                    (Problem::generic(inputs, mode)?, common)
                }
            };
            let opts = CertifyOptions {
                seed: common.seed,
                restarts: common.restarts,
                workers: workers(common.parallel)?,
                timings: common.timings,
            };
            let report = certify(&problem, &opts)?;
            let doc = match common.format {
                Format::Text => report.to_text(),
                Format::Structured => report.to_structured(),
            };
            emit(&doc, common.output.as_deref())?;
            Ok(if report.outcome.certified { 0 } else { 1 })
        }
        Command::Verify { report, format } => {
            let text = std::fs::read_to_string(&report)
                .with_context(|| format!("reading {}", report.display()))?;
            let parsed = Report::from_structured(&text, &report.display().to_string())?;
            let outcome = verify_report(&parsed)?;
            let certified = parsed.outcome.certified;
            match format {
                Format::Text => {
                    for p in &outcome.problems {
                        println!("problem: {p}");
                    }
                    if outcome.ok() {
                        println!("replayed {} evidence items: report is consistent", outcome.replayed);
                        println!("{}", parsed.outcome.summary);
                    }
                }
                Format::Structured => {
                    let doc = serde_json::json!({
                        "consistent": outcome.ok(),
                        "certified": certified,
                        "replayed": outcome.replayed,
                        "problems": outcome.problems,
                    });
                    println!("{doc}");
                }
            }
            Ok(if outcome.ok() && certified { 0 } else { 1 })
        }
        Command::Info { which, export } => {
            let problem = match which {
                Builtin::P6 => Problem::p6()?,
                Builtin::P5 => Problem::p5()?,
            };
            print!("{}", describe(&problem));
            if let Some(dir) = export {
                export_inputs(&problem, &dir)?;
                println!("wrote polytope.json, moves.json, state.json to {}", dir.display());
            }
            Ok(0)
        }
    }
}

fn workers(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::input(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")).into()),
        Err(_) => Ok(None),
    }
}

fn emit(doc: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, doc).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn describe(problem: &Problem) -> String {
    let p = &problem.polytope;
    let m = &problem.moves;
    let fv = f_vector_check(p);
    let mut out = format!(
        "{}: dimension {}, {} facets, degrees {}..{}\n",
        p.name(),
        p.dimension(),
        p.facet_count(),
        fv.min_degree,
        fv.max_degree
    );
    out += &format!("cliques by size: {:?}\n", fv.clique_counts);
    out += &format!("ideal vertices: {}\n", p.ideal_vertices().len());
    for (b, block) in m.blocks().iter().enumerate() {
        let labels: Vec<&str> = block.iter().map(|&f| p.label(f)).collect();
        out += &format!("move {b}: {}\n", labels.join(" "));
    }
    let sigs: Vec<String> = morsecert_core::state::classify_bad_faces(p, m)
        .iter()
        .map(|(s, f): (&BadFaceSignature, _)| format!("{s} x{}", f.len()))
        .collect();
    out += &format!("bad faces: {}\n", sigs.join(", "));
    out += &format!("initial state: {}\n", problem.initial);
    out += &format!("orbit size: {}\n", orbit(&problem.initial, m).len());
    out
}

fn export_inputs(problem: &Problem, dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, value: serde_json::Value| {
        let path = dir.join(name);
        let text = serde_json::to_string_pretty(&value).expect("json") + "\n";
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    };
    write("polytope.json", serde_json::to_value(PolytopeDoc::from_polytope(&problem.polytope))?)?;
    write("moves.json", serde_json::to_value(problem.moves.blocks())?)?;
    write("state.json", serde_json::to_value(state_to_doc(&problem.initial))?)?;
    Ok(())
}
