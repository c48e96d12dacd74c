use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mell_cli::generate::{generate_ps, GeneratorConfig};
use mell_cli::io::{parse_desc, parse_structure, read_file, serialize_ps, Loaded};
use mell_cli::render::render_dot;
use mell_cli::report;
use mell_cli::CliError;
use mell_core::experiment::canonical_injective_atomic;
use mell_core::iso::{iso_ps, iso_structure};
use mell_core::ps::recover_boxes;
use mell_core::psexp::{eval_ps_experiment, sample_interpretation};
use mell_core::separation::{choose_k, separate, separate_connected, PsVerdict};
use mell_core::value::format_tuple;
use mell_core::{Atom, Indexed, Level};
use serde_json::json;

#[derive(Parser)]
#[command(name = "mell", version, about = "Proof-structures of multiplicative exponential linear logic")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Report the validity level and violated conditions.
    Validate { file: String },
    /// Print the class of a linear proof-structure.
    Classify { file: String },
    /// Print the depth of every port.
    Depth { file: String },
    /// Print the result of the canonical injective atomic k-experiment.
    Kpoint {
        file: String,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Evaluate an experiment description.
    Experiment { file: String, desc: String },
    /// Enumerate results of experiments with bounded copies and atoms.
    Sample {
        file: String,
        #[arg(long, default_value_t = 2)]
        max_copies: usize,
        #[arg(long, default_value = "a,b")]
        atom_pool: String,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Search an isomorphism of two numbered structures.
    Iso { a: String, b: String },
    /// Compare the linear proof-structures through their k-experiments.
    Separate { a: String, b: String },
    /// Compare connected proof-structures, boxes included.
    SeparateConnected { a: String, b: String },
    /// Rebuild the box function of a connected structure.
    RecoverBoxes { file: String },
    /// Print a Graphviz graph.
    Render { file: String },
    /// Print a random proof-structure.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        max_cells: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        no_weakening: bool,
    },
}

fn load(path: &str) -> Result<Loaded, CliError> {
    parse_structure(&read_file(path)?)
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn out(text: &str) {
    if let Err(e) = std::io::stdout().lock().write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: stdout: {e}");
        std::process::exit(2);
    }
}

fn emit(format: Format, text: String, data: serde_json::Value) {
    match format {
        Format::Json => out(&format!("{}\n", serde_json::to_string_pretty(&data).expect("json"))),
        _ => out(&text),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let fmt = cli.format;
    match cli.command {
        Command::Validate { file } => {
            let l = load(&file)?;
            let v = l.lps.structure().validate();
            let mut ok = v.level == Level::Lps;
            let mut notes: Vec<String> = v.violations.iter().map(|x| x.to_string()).collect();
            if ok && l.boxes.is_some() {
                if let Err(e) = l.ps() {
                    ok = false;
                    notes.push(e.to_string());
                }
            }
            let mut text = format!("{:?}\n", v.level).to_lowercase();
            for n in &notes {
                text.push_str(&format!("  {n}\n"));
            }
            emit(
                fmt,
                text,
                json!({ "level": format!("{:?}", v.level).to_lowercase(), "violations": notes, "valid": ok }),
            );
            Ok(ok)
        }
        Command::Classify { file } => {
            let c = load(&file)?.lps.structure().classify()?;
            emit(fmt, format!("{c}\n"), json!({ "class": c.name() }));
            Ok(true)
        }
        Command::Depth { file } => {
            let l = load(&file)?;
            let s = l.lps.structure();
            let mut depths = serde_json::Map::new();
            let mut text = String::new();
            for p in s.ports() {
                let d = s.depth(p)?;
                text.push_str(&format!("{p} {d}\n"));
                depths.insert(p.clone(), json!(d));
            }
            emit(fmt, text, serde_json::Value::Object(depths));
            Ok(true)
        }
        Command::Kpoint { file, k } => {
            let l = load(&file)?;
            let s = l.lps.structure();
            let k = k.unwrap_or_else(|| choose_k(s, s));
            let e = canonical_injective_atomic(&l.lps, k)?;
            let r = format_tuple(e.result());
            emit(fmt, format!("{r}\n"), json!({ "k": k, "result": r }));
            Ok(true)
        }
        Command::Experiment { file, desc } => {
            let r = load(&file)?.ps()?;
            let d = parse_desc(&read_file(&desc)?)?;
            let (_, result) = eval_ps_experiment(&r, &d)?;
            let t = format_tuple(&result);
            emit(fmt, format!("{t}\n"), json!({ "result": t }));
            Ok(true)
        }
        Command::Sample { file, max_copies, atom_pool, cap } => {
            let r = load(&file)?.ps()?;
            let pool: Vec<Atom> =
                atom_pool.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Atom::plain).collect();
            let smp = sample_interpretation(&r, &pool, max_copies, cap)?;
            let rows: Vec<String> = smp.results.iter().map(|t| format_tuple(t)).collect();
            let mut text = rows.join("\n");
            text.push('\n');
            if smp.truncated {
                text.push_str("(truncated)\n");
            }
            emit(fmt, text, json!({ "results": rows, "truncated": smp.truncated }));
            Ok(true)
        }
        Command::Iso { a, b } => {
            let (la, lb) = (load(&a)?, load(&b)?);
            let found = if la.boxes.is_some() && lb.boxes.is_some() {
                iso_ps(&la.ps()?, &lb.ps()?)
            } else {
                iso_structure(&la.lps, &lb.lps)
            };
            match found {
                Some(iso) => {
                    emit(fmt, report::iso_text(&iso), json!({ "outcome": "iso", "witness": report::iso_json(&iso) }));
                    Ok(true)
                }
                None => {
                    emit(fmt, "none\n".into(), json!({ "outcome": "none" }));
                    Ok(false)
                }
            }
        }
        Command::Separate { a, b } => {
            let (la, lb) = (load(&a)?, load(&b)?);
            let v = separate(&la.lps, &lb.lps)?;
            emit(fmt, report::verdict_text(&v), report::verdict_json(&v));
            Ok(v.is_same())
        }
        Command::SeparateConnected { a, b } => {
            let (ra, rb) = (load(&a)?.ps()?, load(&b)?.ps()?);
            let v = separate_connected(&ra, &rb)?;
            emit(fmt, report::connected_text(&v), report::connected_json(&v));
            Ok(v.lps.is_same() && !matches!(v.ps, PsVerdict::NotIso(_)))
        }
        Command::RecoverBoxes { file } => {
            let l = load(&file)?;
            let ps = recover_boxes(l.lps.structure())?;
            let r = Indexed::new(ps, l.lps.ind().clone())?;
            out(&serialize_ps(&r));
            Ok(true)
        }
        Command::Render { file } => {
            let l = load(&file)?;
            out(&render_dot(&l.lps));
            Ok(true)
        }
        Command::Generate { seed, max_cells, max_depth, connected, no_weakening } => {
            let cfg = GeneratorConfig {
                seed,
                max_cells,
                max_depth,
                connected,
                allow_weakening: !no_weakening && !connected,
                ..GeneratorConfig::default()
            };
            let r = generate_ps(&cfg);
            if fmt == Format::Dot {
                out(&render_dot(&r));
            } else {
                out(&serialize_ps(&r));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
