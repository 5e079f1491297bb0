//! `qmeasure` command-line front end: reads JSON artifacts, writes JSON results.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use qmeasure::grade2::{inverse_roundtrip_check, positivity_correspondence, reconstruct, roundtrip_check};
use qmeasure::interference::{delta, grade_of, interference, is_grade_additive};
use qmeasure::kernel::{render_table, variation_growth_report};
use qmeasure::polymeasure::{polarization_recover, AdditivityViolation};
use qmeasure::random::Generator;
use qmeasure::{
    diagbox, BoxUnion, FiniteSpace, MSet, PolyMeasure, RawCylinderTable, SemivariationMode,
    SetFunction,
};

const DEFAULT_SEED: u64 = 0;
const DEFAULT_TRIALS: u64 = 64;
const DEFAULT_BOUND: i64 = 9;
const DEFAULT_KMAX: usize = 6;
const DEFAULT_MAX_GRADE: usize = 4;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Domain(#[from] qmeasure::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed JSON input: {0}")]
    Json(serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "qmeasure", version, about = "Exact grade-d measures, interference and polymeasures on finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Input JSON artifact (default: standard input)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file (default: standard output)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Setfn,
    Polymeasure,
    #[value(name = "grade2-measure")]
    Grade2Measure,
}

#[derive(Subcommand)]
enum Command {
    /// Test grade-d additivity of a set function, or find its grade
    CheckGrade {
        #[command(flatten)]
        io: Io,
        /// Grade to test; omit to search for the least grade
        #[arg(long)]
        grade: Option<usize>,
        /// Largest grade tried when searching
        #[arg(long, default_value_t = DEFAULT_MAX_GRADE)]
        d: usize,
    },
    /// Interference of a set function at disjoint sets
    Interference {
        #[command(flatten)]
        io: Io,
        /// Set key such as "0,2"; repeat for each argument
        #[arg(long = "set", required = true, num_args = 1)]
        sets: Vec<String>,
    },
    /// Difference operator: the set function T ↦ ν(T) − ν(S ∪ T) off S
    Delta {
        #[command(flatten)]
        io: Io,
        #[arg(long = "set")]
        set: String,
    },
    /// Symmetric bimeasure of a set function
    Reconstruct {
        #[command(flatten)]
        io: Io,
    },
    /// Round-trip check for a set function or a symmetric bimeasure
    Roundtrip {
        #[command(flatten)]
        io: Io,
    },
    /// Diagonal set function of a polymeasure
    Diagonal {
        #[command(flatten)]
        io: Io,
    },
    Symmetrize {
        #[command(flatten)]
        io: Io,
    },
    /// Recover the symmetric multilinear form of a set function at disjoint sets
    Polarize {
        #[command(flatten)]
        io: Io,
        #[arg(long = "set", required = true, num_args = 1)]
        sets: Vec<String>,
    },
    /// Marginal of a polymeasure in one slot
    Marginal {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        slot: usize,
    },
    Variation {
        #[command(flatten)]
        io: Io,
    },
    Semivariation {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
    },
    /// Slot-wise additivity of a raw cylinder table
    SeparateAdditivity {
        #[command(flatten)]
        io: Io,
    },
    /// Length of the diagonal trace of a box union
    DiagLength {
        #[command(flatten)]
        io: Io,
    },
    /// Variation growth of the Walsh block kernel
    KernelDemo {
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_KMAX)]
        kmax: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Seeded random artifact
    GenRandom {
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Atoms per space
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Rank of a polymeasure
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Numerators are drawn from [-bound, bound]
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: i64,
    },
}

/// A result object with a trailing `meta` block.
#[derive(Serialize)]
struct Out<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    meta: Value,
}

fn read_input<T: DeserializeOwned>(io: &Io) -> CliResult<T> {
    let text = match &io.input {
        Some(path) => fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io {
                path: "<stdin>".into(),
                source,
            })?;
            s
        }
    };
    serde_json::from_str(&text).map_err(CliError::Json)
}

fn write_output(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn emit<T: Serialize>(path: Option<&PathBuf>, body: &T, meta: Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(&Out { body, meta }).expect("serializable");
    text.push('\n');
    write_output(path, &text)
}

fn parse_sets(space: &FiniteSpace, keys: &[String]) -> CliResult<Vec<MSet>> {
    Ok(keys.iter().map(|k| space.set_from_key(k)).collect::<qmeasure::Result<_>>()?)
}

fn violation_json(v: &AdditivityViolation) -> Value {
    json!({
        "slot": v.slot,
        "sets": v.sets.iter().map(MSet::key).collect::<Vec<_>>(),
        "left": v.left.key(),
        "right": v.right.key(),
        "joint": v.joint,
        "split_sum": v.split_sum,
    })
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::CheckGrade { io, grade, d } => {
            let mu: SetFunction = read_input(&io)?;
            match grade {
                Some(g) => {
                    let report = is_grade_additive(&mu, g)?;
                    emit(io.output.as_ref(), &report, json!({"command": "check-grade"}))
                }
                None => {
                    let found = grade_of(&mu, d)?;
                    emit(io.output.as_ref(), &json!({"grade": found}), json!({"command": "check-grade", "d_max": d}))
                }
            }
        }
        Command::Interference { io, sets } => {
            let mu: SetFunction = read_input(&io)?;
            let sets = parse_sets(mu.space(), &sets)?;
            let value = interference(&mu, &sets)?;
            emit(io.output.as_ref(), &json!({"value": value}), json!({"command": "interference", "sets": sets.iter().map(MSet::key).collect::<Vec<_>>()}))
        }
        Command::Delta { io, set } => {
            let nu: SetFunction = read_input(&io)?;
            let s = nu.space().set_from_key(&set)?;
            let out = delta(&nu, &s)?;
            emit(io.output.as_ref(), &out, json!({"command": "delta", "set": s.key()}))
        }
        Command::Reconstruct { io } => {
            let mu: SetFunction = read_input(&io)?;
            emit(io.output.as_ref(), &reconstruct(&mu), json!({"command": "reconstruct"}))
        }
        Command::Roundtrip { io } => {
            let value: Value = read_input(&io)?;
            let meta = json!({"command": "roundtrip"});
            if value.get("tensor").is_some() {
                let lambda: PolyMeasure = serde_json::from_value(value).map_err(CliError::Json)?;
                let ok = inverse_roundtrip_check(&lambda)?;
                emit(io.output.as_ref(), &json!({"input": "polymeasure", "roundtrip": ok}), meta)
            } else {
                let mu: SetFunction = serde_json::from_value(value).map_err(CliError::Json)?;
                let ok = roundtrip_check(&mu);
                let positivity = if ok { Some(positivity_correspondence(&mu)?) } else { None };
                emit(
                    io.output.as_ref(),
                    &json!({"input": "setfn", "roundtrip": ok, "positivity_correspondence": positivity}),
                    meta,
                )
            }
        }
        Command::Diagonal { io } => {
            let lambda: PolyMeasure = read_input(&io)?;
            emit(io.output.as_ref(), &lambda.diagonal()?, json!({"command": "diagonal"}))
        }
        Command::Symmetrize { io } => {
            let lambda: PolyMeasure = read_input(&io)?;
            emit(io.output.as_ref(), &lambda.symmetrize()?, json!({"command": "symmetrize"}))
        }
        Command::Polarize { io, sets } => {
            let mu: SetFunction = read_input(&io)?;
            let sets = parse_sets(mu.space(), &sets)?;
            let value = polarization_recover(&mu, &sets)?;
            emit(io.output.as_ref(), &json!({"value": value}), json!({"command": "polarize", "sets": sets.iter().map(MSet::key).collect::<Vec<_>>()}))
        }
        Command::Marginal { io, slot } => {
            let lambda: PolyMeasure = read_input(&io)?;
            emit(io.output.as_ref(), &lambda.marginal(slot)?, json!({"command": "marginal", "slot": slot}))
        }
        Command::Variation { io } => {
            let lambda: PolyMeasure = read_input(&io)?;
            emit(io.output.as_ref(), &json!({"variation": lambda.variation()}), json!({"command": "variation"}))
        }
        Command::Semivariation { io, mode, seed, trials } => {
            let lambda: PolyMeasure = read_input(&io)?;
            let (mode, meta) = match mode {
                Mode::Exact => (SemivariationMode::Exact, json!({"command": "semivariation", "mode": "exact"})),
                Mode::Sampled => (
                    SemivariationMode::Sampled { seed, trials },
                    json!({"command": "semivariation", "mode": "sampled", "seed": seed, "trials": trials}),
                ),
            };
            let sv = lambda.semivariation(mode)?;
            emit(
                io.output.as_ref(),
                &json!({"semivariation": sv.value, "exact": sv.exact, "signs": sv.signs}),
                meta,
            )
        }
        Command::SeparateAdditivity { io } => {
            let table: RawCylinderTable = read_input(&io)?;
            let report = table.check_separate_additivity()?;
            emit(
                io.output.as_ref(),
                &json!({"additive": report.additive, "violation": report.violation.as_ref().map(violation_json)}),
                json!({"command": "separate-additivity"}),
            )
        }
        Command::DiagLength { io } => {
            let t: BoxUnion = read_input(&io)?;
            emit(io.output.as_ref(), &json!({"length": diagbox::diag_length(&t)}), json!({"command": "diag-length"}))
        }
        Command::KernelDemo { output, kmax, seed, trials, format } => {
            let rows = variation_growth_report(kmax, trials, seed)?;
            let meta = json!({"command": "kernel-demo", "kmax": kmax, "seed": seed, "trials": trials});
            let text = match format {
                Format::Table => format!("# {meta}\n{}", render_table(&rows)),
                Format::Json => {
                    let mut text = json!({"meta": meta}).to_string();
                    text.push('\n');
                    for row in &rows {
                        text.push_str(&serde_json::to_string(row).expect("serializable"));
                        text.push('\n');
                    }
                    text
                }
            };
            write_output(output.as_ref(), &text)
        }
        Command::GenRandom { output, kind, k, d, seed, bound } => {
            if bound < 0 {
                return Err(CliError::Usage(format!("--bound must be nonnegative, got {bound}")));
            }
            if !(1..=4).contains(&d) {
                return Err(qmeasure::Error::InvalidGrade(d, 4).into());
            }
            let space = FiniteSpace::lettered(k)?;
            let mut g = Generator::new(seed);
            let meta = |kind: &str| json!({"command": "gen-random", "kind": kind, "k": k, "d": d, "seed": seed, "bound": bound});
            let out = output.as_ref();
            match kind {
                Kind::Setfn => emit(out, &g.set_function(&space, bound), meta("setfn")),
                Kind::Grade2Measure => emit(out, &g.grade2_measure(&space, bound), meta("grade2-measure")),
                Kind::Polymeasure => {
                    let lambda = g.polymeasure(vec![space; d], bound)?;
                    emit(out, &lambda, meta("polymeasure"))
                }
            }
        }
    }
}

fn error_json(e: &CliError) -> Value {
    match e {
        CliError::Json(j) => json!({"error": e.to_string(), "line": j.line(), "column": j.column()}),
        _ => json!({"error": e.to_string()}),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            println!("{}", error_json(&e));
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
