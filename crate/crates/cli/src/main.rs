use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use futs_core::bisim::{largest_bisimulation, quotient_system};
use futs_core::logic::{
    bounded_logical_equiv, distinguishing_formula, satisfies, search_distinguishing, translate, Formula,
};
use futs_core::reduce::{
    apply_stage, pipeline, to_wts, verify_reduction, Reduction, Stage, VerifyMode, EXHAUSTIVE_LIMIT,
};
use futs_core::system::{Futs, Signature};
use futs_core::textio::{parse_formula, parse_system, write_formula, write_system};

#[derive(Parser)]
#[command(name = "futs", version, about = "Bisimulation, reductions and modal logic for FuTSs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Unlabelled,
    Tabular,
    Homogeneous,
    Nested,
    Flat,
    Wts,
}

impl Target {
    fn stage(self) -> Option<Stage> {
        match self {
            Target::Unlabelled => Some(Stage::Unlabel),
            Target::Tabular => Some(Stage::Tabularize),
            Target::Homogeneous => Some(Stage::Homogenize),
            Target::Nested => Some(Stage::Nest),
            Target::Flat => Some(Stage::Flatten),
            Target::Wts => None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the largest bisimulation.
    Bisim {
        file: PathBuf,
        /// Write the quotient system here.
        #[arg(long)]
        quotient: Option<PathBuf>,
    },
    /// Reduce a system and write the result.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short, long)]
        output: PathBuf,
        /// Write the carrier map as `source -> target` lines.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Evaluate a formula at every state, or at one.
    Check {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Compare two states.
    Equiv {
        file: PathBuf,
        x: String,
        y: String,
        /// Use the bounded logical-equivalence oracle and print a witness.
        #[arg(long)]
        logic: bool,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check that a reduction preserves and reflects bisimulations.
    #[command(alias = "verify-reduction")]
    Verify {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        /// Enumerate every equivalence relation on the source.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Translate a formula along a reduction.
    Translate {
        #[arg(long)]
        formula: String,
        /// A system file whose signature the formula is written against.
        #[arg(long)]
        sig: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
}

/// Carries a message and an exit status out of a subcommand.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn load(path: &Path) -> Result<Futs, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_system(&text).map_err(|ds| {
        let mut msg = String::new();
        for (k, d) in ds.iter().enumerate() {
            if k > 0 {
                msg.push('\n');
            }
            write!(msg, "{}:{d}", path.display()).unwrap();
        }
        Failure(msg)
    })
}

fn formula(text: &str, sig: &Signature) -> Result<Formula, Failure> {
    parse_formula(text, sig)
        .map_err(|ds| Failure(ds.iter().map(|d| format!("formula:{d}")).collect::<Vec<_>>().join("\n")))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn require_state(s: &Futs, x: &str) -> Result<(), Failure> {
    if s.states().contains(x) {
        Ok(())
    } else {
        Err(Failure(format!("unknown state `{x}`")))
    }
}

fn reduce(s: &Futs, to: Target) -> Result<Reduction, Failure> {
    Ok(match to.stage() {
        Some(stage) => apply_stage(stage, s)?,
        None => to_wts(s)?,
    })
}

fn run(cmd: Command, out: &mut impl io::Write) -> Outcome {
    match cmd {
        Command::Bisim { file, quotient } => {
            let s = load(&file)?;
            let p = largest_bisimulation(&s);
            writeln!(out, "{p}")?;
            if let Some(out) = quotient {
                write(&out, &write_system(&quotient_system(&s, &p)?))?;
            }
            Ok(true)
        }
        Command::Reduce { file, to, output, map } => {
            let s = load(&file)?;
            let r = reduce(&s, to)?;
            write(&output, &write_system(r.target()))?;
            if let Some(path) = map {
                let mut text = String::new();
                for (x, y) in r.carrier_map().mapping() {
                    writeln!(text, "{} -> {}", id(x), id(y)).unwrap();
                }
                write(&path, &text)?;
            }
            Ok(true)
        }
        Command::Check {
            file,
            formula: text,
            state,
        } => {
            let s = load(&file)?;
            let phi = formula(&text, s.signature())?;
            match state {
                Some(x) => {
                    require_state(&s, &x)?;
                    let holds = satisfies(&s, &x, &phi)?;
                    writeln!(out, "{}: {holds}", id(&x))?;
                    Ok(holds)
                }
                None => {
                    let sat = futs_core::logic::sat_set(&s, &phi)?;
                    for x in s.states() {
                        writeln!(out, "{}: {}", id(x), sat.contains(x))?;
                    }
                    Ok(true)
                }
            }
        }
        Command::Equiv {
            file,
            x,
            y,
            logic,
            depth,
        } => {
            let s = load(&file)?;
            require_state(&s, &x)?;
            require_state(&s, &y)?;
            if !logic {
                let same = largest_bisimulation(&s).related(&x, &y);
                writeln!(out, "{}", if same { "bisimilar" } else { "not bisimilar" })?;
                return Ok(same);
            }
            let same = bounded_logical_equiv(&s, depth, None)?.related(&x, &y);
            if same {
                writeln!(out, "logically equivalent")?;
                return Ok(true);
            }
            writeln!(out, "distinguished")?;
            print_witness(&s, &x, &y, out)?;
            Ok(false)
        }
        Command::Verify {
            file,
            to,
            exhaustive,
            seed,
            samples,
        } => {
            let s = load(&file)?;
            if exhaustive && s.states().len() > EXHAUSTIVE_LIMIT {
                return Err(Failure(format!(
                    "--exhaustive is limited to {EXHAUSTIVE_LIMIT} states, the input has {}; drop --exhaustive to sample relations instead",
                    s.states().len()
                )));
            }
            let r = reduce(&s, to)?;
            let mode = if exhaustive {
                VerifyMode::Exhaustive
            } else {
                VerifyMode::Sampled { seed, samples }
            };
            let report = verify_reduction(&r, mode)?;
            write!(out, "{report}")?;
            Ok(report.is_ok())
        }
        Command::Translate { formula: text, sig, to } => {
            let s = load(&sig)?;
            let phi = formula(&text, s.signature())?;
            let stages = match to.stage() {
                Some(stage) => vec![stage],
                None => pipeline(s.signature())?,
            };
            let mut sig = s.signature().clone();
            let mut translated = phi;
            for stage in stages {
                translated = translate(stage, &sig, &translated)?;
                sig = stage.target_signature(&sig)?;
            }
            writeln!(out, "{}", write_formula(&translated, &sig))?;
            Ok(true)
        }
    }
}

fn print_witness(s: &Futs, x: &str, y: &str, out: &mut impl io::Write) -> Result<(), Failure> {
    if s.signature().is_simple() {
        if let Ok(Some(phi)) = distinguishing_formula(s, x, y) {
            writeln!(out, "{}", write_formula(&phi, s.signature()))?;
            return Ok(());
        }
        if let Some(phi) = search_distinguishing(s, x, y)? {
            writeln!(out, "{}", write_formula(&phi, s.signature()))?;
            return Ok(());
        }
        writeln!(out, "no witness found")?;
        return Ok(());
    }
    let r = to_wts(s)?;
    let map = r.carrier_map().mapping();
    let t = r.target();
    match search_distinguishing(t, &map[x], &map[y])? {
        Some(phi) => {
            writeln!(out, "witness over the reduced weighted transition system:")?;
            writeln!(out, "{}", write_formula(&phi, t.signature()))?;
        }
        None => println!("no witness found over the reduced weighted transition system"),
    }
    Ok(())
}

fn id(x: &str) -> String {
    futs_core::weightfn::WeightTerm::leaf(x).to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &mut io::stdout().lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
