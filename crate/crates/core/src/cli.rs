//! Command-line interface: `check`, `docm`, `gen`, `slp`.
//!
//! Verdict runs print a machine-parsable `verdict=SAT|UNSAT` line and exit
//! with 0 when satisfied, 1 when not, and 2 on any error.

use crate::checker::{
    check_naive, check_naive_periodic, check_with_engine, unroll_horizon, Engine, Verdict,
    WordSource,
};
use crate::dataword::{parse_word, WordInput};
use crate::docm::parse_ocm;
use crate::formula::{parse as parse_formula, Formula};
use crate::generators::{
    eval_circuit, eval_pqss, eval_qbf, gen_circuit_mtl, gen_circuit_mtl_infinite, gen_circuit_smtl,
    gen_pqss_freezeltl, gen_pqss_tptl2, gen_qbf, parse_circuit, parse_pqss, parse_qbf,
    pqss_counting_word,
};
use crate::slp::{parse_slp, DEFAULT_EXPANSION_BUDGET};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(
    name = "pathcheck",
    version,
    about = "Path checking for MTL, SMTL, TPTL and FreezeLTL over data words"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputKind {
    Text,
    Record,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Word file: `word finite`, `word periodic`, or `slp` format.
    #[arg(long)]
    word: Option<PathBuf>,
    /// Period SLP for an infinite SLP-encoded word (the --word file, when
    /// given, is the prefix SLP).
    #[arg(long)]
    slp_period: Option<PathBuf>,
    /// Offset added to the period values per repetition (with --slp-period).
    #[arg(long, default_value = "0")]
    offset: String,
    /// Formula text.
    #[arg(long, conflicts_with = "formula_file")]
    formula: Option<String>,
    /// File containing the formula.
    #[arg(long)]
    formula_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Engine::Auto)]
    engine: Engine,
    /// Override the naive engine's evaluation window on infinite words.
    #[arg(long)]
    horizon: Option<u64>,
    /// Maximum number of points an SLP may be expanded to.
    #[arg(long, default_value_t = DEFAULT_EXPANSION_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = OutputKind::Text)]
    output: OutputKind,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a data word against a formula.
    Check(CheckArgs),
    /// Model-check a deterministic one-counter machine.
    Docm {
        /// Machine file in the `ocm unary|binary` format.
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, conflicts_with = "formula_file")]
        formula: Option<String>,
        #[arg(long)]
        formula_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputKind::Text)]
        output: OutputKind,
    },
    /// Generate a self-validating hard instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Operate on an SLP-compressed word.
    Slp {
        #[command(subcommand)]
        action: SlpAction,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// From a SAM2 circuit file; emits the finite MTL encoding by default.
    Circuit {
        #[arg(long)]
        file: PathBuf,
        /// Output path prefix; writes <out>.dw, <out>.formula, <out>.tptl,
        /// <out>.expected.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CircuitVariant::Mtl)]
        variant: CircuitVariant,
    },
    /// From a quantifier prefix (like `AEA`) and a propositional matrix
    /// over x1..xn.
    Qbf {
        #[arg(long)]
        prefix: String,
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// From a `pqss a=1,2 b=2` line (inline or in a file).
    Pqss {
        #[arg(long, conflicts_with = "file")]
        spec: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = PqssVariant::Freezeltl)]
        variant: PqssVariant,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CircuitVariant {
    Mtl,
    MtlInfinite,
    Smtl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PqssVariant {
    Tptl2,
    Freezeltl,
}

#[derive(Debug, Subcommand)]
enum SlpAction {
    /// Print the expanded word.
    Expand {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXPANSION_BUDGET)]
        budget: u64,
    },
    /// Print the smallest data value.
    Min { file: PathBuf },
    /// Print the largest data value.
    Max { file: PathBuf },
    /// Print the length of the generated word.
    Length { file: PathBuf },
    /// Print the point at a position.
    At {
        file: PathBuf,
        #[arg(long)]
        index: String,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, Failure> {
    match cmd {
        Command::Check(args) => cmd_check(args),
        Command::Docm {
            machine,
            formula,
            formula_file,
            output,
        } => cmd_docm(machine, formula, formula_file, output),
        Command::Gen { kind } => cmd_gen(kind),
        Command::Slp { action } => cmd_slp(action),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_formula(text: Option<String>, file: Option<PathBuf>) -> Result<Formula, Failure> {
    let text = match (text, file) {
        (Some(t), _) => t,
        (None, Some(p)) => read(&p)?,
        (None, None) => return Err(Failure("need --formula or --formula-file".into())),
    };
    Ok(parse_formula(text.trim())?)
}

/// Loads the word input; `.dw` and `.slp` contents are told apart by their
/// headers.
fn load_word(args: &CheckArgs) -> Result<WordSource, Failure> {
    if let Some(period_path) = &args.slp_period {
        let period = parse_slp(&read(period_path)?)?;
        let prefix = match &args.word {
            Some(p) => Some(parse_slp(&read(p)?)?),
            None => None,
        };
        let offset: BigUint = args
            .offset
            .parse()
            .map_err(|_| Failure("--offset must be a natural number".into()))?;
        return Ok(WordSource::SlpPeriodic {
            prefix,
            period,
            offset,
        });
    }
    let path = args
        .word
        .as_ref()
        .ok_or_else(|| Failure("need --word".into()))?;
    let text = read(path)?;
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if header.starts_with("slp") {
        Ok(WordSource::SlpFinite(parse_slp(&text)?))
    } else {
        match parse_word(&text)? {
            WordInput::Finite(w) => Ok(WordSource::Finite(w)),
            WordInput::Periodic(w) => Ok(WordSource::Periodic(w)),
        }
    }
}

fn engine_name(engine: Engine, source: &WordSource) -> &'static str {
    match engine {
        Engine::Auto => match source {
            WordSource::Finite(_) => "finite",
            WordSource::Periodic(_) => "auto",
            WordSource::SlpFinite(_) | WordSource::SlpPeriodic { .. } => "slp",
        },
        Engine::Naive => "naive",
        Engine::Finite => "finite",
        Engine::Periodic => "periodic",
        Engine::Slp => "slp",
        Engine::Tptl1 => "tptl1",
        Engine::Quasimono => "quasimono",
    }
}

fn report(
    verdict: &Verdict,
    engine: &str,
    horizon: Option<BigUint>,
    elapsed_ms: u128,
    output: OutputKind,
) -> ExitCode {
    match output {
        OutputKind::Text => {
            println!("{}", if verdict.satisfied { "SAT" } else { "UNSAT" });
            println!(
                "verdict={}",
                if verdict.satisfied { "SAT" } else { "UNSAT" }
            );
            if let Some(w) = &verdict.witness {
                if !w.is_empty() {
                    println!("witness={w:?}");
                }
            }
        }
        OutputKind::Record => {
            let mut rec = String::new();
            let _ = write!(
                rec,
                "verdict={} engine={engine}",
                if verdict.satisfied { "SAT" } else { "UNSAT" }
            );
            if let Some(h) = horizon {
                let _ = write!(rec, " horizon={h}");
            }
            let _ = write!(rec, " memo-entries={}", verdict.memo_entries);
            let _ = write!(rec, " elapsed-ms={elapsed_ms}");
            println!("{rec}");
        }
    }
    if verdict.satisfied {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, Failure> {
    let source = load_word(&args)?;
    let formula = load_formula(args.formula.clone(), args.formula_file.clone())?;
    let start = Instant::now();
    let (verdict, horizon) = match (&args.engine, &source) {
        // the naive engine expands SLPs and honors the horizon override
        (Engine::Naive, WordSource::Periodic(w)) => {
            let v = match args.horizon {
                Some(h) => check_naive(&w.expand(h), &formula),
                None => check_naive_periodic(w, &formula),
            };
            (v, Some(unroll_horizon(w, &formula)))
        }
        (Engine::Naive | Engine::Finite, WordSource::SlpFinite(g)) => {
            let w = g.expand(args.budget)?;
            (check_naive(&w, &formula), None)
        }
        _ => {
            let horizon = match &source {
                WordSource::Periodic(w) => Some(unroll_horizon(w, &formula)),
                _ => None,
            };
            (check_with_engine(args.engine, &source, &formula)?, horizon)
        }
    };
    let elapsed = start.elapsed().as_millis();
    Ok(report(
        &verdict,
        engine_name(args.engine, &source),
        horizon,
        elapsed,
        args.output,
    ))
}

fn cmd_docm(
    machine: PathBuf,
    formula: Option<String>,
    formula_file: Option<PathBuf>,
    output: OutputKind,
) -> Result<ExitCode, Failure> {
    let m = parse_ocm(&read(&machine)?)?;
    let f = load_formula(formula, formula_file)?;
    let start = Instant::now();
    let verdict = m.model_check(&f)?;
    let elapsed = start.elapsed().as_millis();
    Ok(report(&verdict, "docm", None, elapsed, output))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn emit_triple(
    out: &Path,
    word: &str,
    formula: &Formula,
    expected: bool,
) -> Result<ExitCode, Failure> {
    let base = out.to_string_lossy();
    write_file(&PathBuf::from(format!("{base}.dw")), word)?;
    write_file(
        &PathBuf::from(format!("{base}.formula")),
        &format!("{formula}\n"),
    )?;
    write_file(
        &PathBuf::from(format!("{base}.tptl")),
        &format!("{}\n", formula.desugar()),
    )?;
    let expected_line = format!("expected={}\n", if expected { "SAT" } else { "UNSAT" });
    write_file(&PathBuf::from(format!("{base}.expected")), &expected_line)?;
    println!("word={base}.dw formula={base}.formula tptl={base}.tptl");
    print!("{expected_line}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(kind: GenKind) -> Result<ExitCode, Failure> {
    match kind {
        GenKind::Circuit { file, out, variant } => {
            let c = parse_circuit(&read(&file)?)?;
            let expected = eval_circuit(&c);
            match variant {
                CircuitVariant::Mtl => {
                    let (word, f) = gen_circuit_mtl(&c);
                    emit_triple(&out, &word.to_string(), &f, expected)
                }
                CircuitVariant::MtlInfinite => {
                    let (word, f) = gen_circuit_mtl_infinite(&c);
                    emit_triple(&out, &word.to_string(), &f, expected)
                }
                CircuitVariant::Smtl => {
                    let (word, f) = gen_circuit_smtl(&c);
                    emit_triple(&out, &word.to_string(), &f, expected)
                }
            }
        }
        GenKind::Qbf {
            prefix,
            matrix,
            out,
        } => {
            let q = parse_qbf(&prefix, &matrix)?;
            let (word, f) = gen_qbf(&q);
            emit_triple(&out, &word.to_string(), &f, eval_qbf(&q))
        }
        GenKind::Pqss {
            spec,
            file,
            out,
            variant,
        } => {
            let text = match (spec, file) {
                (Some(s), _) => s,
                (None, Some(p)) => read(&p)?,
                (None, None) => return Err(Failure("need --spec or --file".into())),
            };
            let inst = parse_pqss(&text)?;
            let expected = eval_pqss(&inst);
            match variant {
                PqssVariant::Tptl2 => {
                    let f = gen_pqss_tptl2(&inst);
                    emit_triple(&out, &pqss_counting_word().to_string(), &f, expected)
                }
                PqssVariant::Freezeltl => {
                    let (word, f) = gen_pqss_freezeltl(&inst);
                    emit_triple(&out, &word.to_string(), &f, expected)
                }
            }
        }
    }
}

fn cmd_slp(action: SlpAction) -> Result<ExitCode, Failure> {
    match action {
        SlpAction::Expand { file, budget } => {
            let g = parse_slp(&read(&file)?)?;
            print!("{}", g.expand(budget)?);
        }
        SlpAction::Min { file } => {
            let g = parse_slp(&read(&file)?)?;
            println!("{}", g.min_value());
        }
        SlpAction::Max { file } => {
            let g = parse_slp(&read(&file)?)?;
            println!("{}", g.max_value());
        }
        SlpAction::Length { file } => {
            let g = parse_slp(&read(&file)?)?;
            println!("{}", g.length());
        }
        SlpAction::At { file, index } => {
            let g = parse_slp(&read(&file)?)?;
            let i: BigUint = index
                .parse()
                .map_err(|_| Failure("--index must be a natural number".into()))?;
            println!("{}", g.at(&i)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}
