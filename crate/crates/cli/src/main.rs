use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use toric_core::format::{self, document, ModelRef, SystemRecord};
use toric_core::{
    augment, decompose_with, enumerate_minus_one_classes, enumerate_toric_systems, euler_char, euler_pairing,
    extract_blowdown, restandardize, toric_shadow_check, verify, verify_theorem, AugmentationStep, DecomposeOptions,
    DivisorClass, Error, ErrorCategory, ModelKind, NumK0Class, SurfaceModel, ToricSystem,
};

#[derive(Parser)]
#[command(name = "toric", version, about = "Picard lattices, toric systems and their decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Front,
    Middle,
    Back,
}

#[derive(Subcommand)]
enum Command {
    /// Print the record of a standard model (P2, F:d, dP:r).
    Model { desc: String },
    /// Euler characteristic of O(D).
    Chi {
        /// Descriptor or path to a model document.
        model: String,
        /// Divisor as a JSON array, e.g. "[1]".
        divisor: String,
    },
    /// Euler pairing chi(x, y). Classes are JSON objects {rk, c1, ch2x2}
    /// or bare arrays, read as line bundles.
    Pairing { model: String, x: String, y: String },
    /// Validate a toric-system document.
    CheckSystem { file: PathBuf },
    /// Check numerical exceptionality of a collection document.
    CheckCollection { file: PathBuf },
    /// Augment a toric system on the blow-up of its model.
    Augment {
        file: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Blow down the (-1)-entry at position m.
    Extract {
        file: PathBuf,
        #[arg(long)]
        m: usize,
        /// Express the result on a standard model.
        #[arg(long)]
        standard: bool,
    },
    /// Decompose a maximal-length system into augmentations.
    Decompose {
        file: PathBuf,
        /// Continue from F_1 down to P2 when possible.
        #[arg(long)]
        continue_to_plane: bool,
    },
    /// Replay a certificate and check it reproduces its target.
    Replay { certificate: PathBuf },
    /// Enumerate toric systems described by a spec document.
    Enumerate { spec: PathBuf },
    /// Decompose every system of an enumeration.
    VerifyTheorem { spec: PathBuf },
    /// List all (-1)-classes of a model.
    MinusOneClasses { model: String },
    /// Contract the self-intersection cycle of a toric system.
    Shadow { file: PathBuf },
}

/// Failures with their exit status.
enum Failure {
    Usage(String),
    Core(Error),
    /// The output was produced but reports a failed check.
    Negative(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<String, Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_model(arg: &str) -> Result<SurfaceModel, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(format::model_from_str(&read_file(path)?)?);
    }
    Ok(SurfaceModel::standard(ModelKind::parse(arg)?)?)
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Core(Error::Format(format!("{what}: {e}"))))
}

fn parse_class(model: &SurfaceModel, what: &str, text: &str) -> Result<NumK0Class, Failure> {
    if text.trim_start().starts_with('[') {
        let d: DivisorClass = parse_json(what, text)?;
        model.check_rank(&d)?;
        return Ok(NumK0Class::line_bundle(model, &d));
    }
    parse_json(what, text)
}

fn load_system(path: &Path) -> Result<ToricSystem, Failure> {
    Ok(format::system_from_str(&read_file(path)?)?)
}

#[derive(Serialize)]
struct SystemCheck {
    model: ModelRef,
    length: usize,
    maximal_length: bool,
    numerically_exceptional: bool,
    self_intersections: Vec<i64>,
    canonical_form: Vec<DivisorClass>,
}

#[derive(Serialize)]
struct CollectionCheck {
    model: ModelRef,
    length: usize,
    numerically_exceptional: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    toric_system: Option<Vec<DivisorClass>>,
}

#[derive(Serialize)]
struct BlowdownRecord {
    #[serde(flatten)]
    system: SystemRecord,
    exceptional: DivisorClass,
    step: AugmentationStep,
    /// Coordinates on the blow-up of the result to the input model.
    lift: toric_core::IntMatrix,
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Model { desc } => Ok(format::model_to_string(&SurfaceModel::standard(ModelKind::parse(&desc)?)?)?),
        Command::Chi { model, divisor } => {
            let model = load_model(&model)?;
            let d: DivisorClass = parse_json("divisor", &divisor)?;
            Ok(format!("{}\n", euler_char(&model, &d)?))
        }
        Command::Pairing { model, x, y } => {
            let model = load_model(&model)?;
            let x = parse_class(&model, "x", &x)?;
            let y = parse_class(&model, "y", &y)?;
            Ok(format!("{}\n", euler_pairing(&model, &x, &y)?))
        }
        Command::CheckSystem { file } => {
            let s = load_system(&file)?;
            let record = SystemCheck {
                model: ModelRef::from_model(s.model()),
                length: s.len(),
                maximal_length: s.is_maximal_length(),
                numerically_exceptional: s.is_num_exceptional()?,
                self_intersections: s.self_intersections(),
                canonical_form: s.canonical_form().divisors().to_vec(),
            };
            Ok(format::write(document::SYSTEM_CHECK, &record)?)
        }
        Command::CheckCollection { file } => {
            let c = format::collection_from_str(&read_file(&file)?)?;
            let (exceptional, failure, system) = match c.differences() {
                Ok(s) => (true, None, Some(s.divisors().to_vec())),
                Err(e @ (Error::NotExceptional { .. } | Error::Axiom(_))) => (false, Some(e.to_string()), None),
                Err(e) => return Err(e.into()),
            };
            let record = CollectionCheck {
                model: ModelRef::from_model(c.model()),
                length: c.len(),
                numerically_exceptional: exceptional,
                failure,
                toric_system: system,
            };
            let text = format::write(document::COLLECTION_CHECK, &record)?;
            if exceptional {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Negative("collection is not numerically exceptional".into()))
            }
        }
        Command::Augment { file, variant, m } => {
            let s = load_system(&file)?;
            let step = match (variant, m) {
                (VariantArg::Front, None) => AugmentationStep::FRONT,
                (VariantArg::Back, None) => AugmentationStep::BACK,
                (VariantArg::Middle, Some(m)) => AugmentationStep::middle(m),
                (VariantArg::Middle, None) => return Err(Failure::Usage("--variant middle needs --m".into())),
                (_, Some(_)) => return Err(Failure::Usage("--m is only valid with --variant middle".into())),
            };
            Ok(format::system_to_string(&augment(&s, step)?)?)
        }
        Command::Extract { file, m, standard } => {
            let s = load_system(&file)?;
            let down = extract_blowdown(&s, m)?;
            let mut system = down.system.clone();
            let mut lift = down.lift_matrix();
            if standard {
                let rs = restandardize(system.model())?;
                let inv = rs.isometry.inverse().expect("isometries are unimodular");
                let model = Arc::new(rs.model.clone());
                let divisors = system.divisors().iter().map(|d| rs.apply(d)).collect();
                system = ToricSystem::new(model, divisors)?;
                // lift ∘ (P⁻¹ ⊕ 1)
                let n = inv.rows();
                let mut block = toric_core::IntMatrix::identity(n + 1);
                for i in 0..n {
                    for j in 0..n {
                        block[(i, j)] = inv[(i, j)];
                    }
                }
                lift = lift.mul(&block);
            }
            let record = BlowdownRecord {
                system: SystemRecord::from_system(&system),
                exceptional: down.exceptional,
                step: down.step,
                lift,
            };
            Ok(format::write(document::BLOWDOWN, &record)?)
        }
        Command::Decompose { file, continue_to_plane } => {
            let s = load_system(&file)?;
            let cert = decompose_with(&s, DecomposeOptions { continue_to_plane })?;
            Ok(format::certificate_to_string(&cert)?)
        }
        Command::Replay { certificate } => {
            let cert = format::certificate_from_str(&read_file(&certificate)?)?;
            verify(&cert)?;
            Ok(format::system_to_string(&cert.target)?)
        }
        Command::Enumerate { spec } => {
            let spec = format::spec_from_str(&read_file(&spec)?)?;
            let e = enumerate_toric_systems(&spec)?;
            Ok(format::enumeration_to_string(&spec, &e)?)
        }
        Command::VerifyTheorem { spec } => {
            let spec = format::spec_from_str(&read_file(&spec)?)?;
            let report = verify_theorem(&spec)?;
            let text = format::report_to_string(&report)?;
            if report.is_clean() {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Negative(format!(
                    "{} decomposition failures, {} shadow failures",
                    report.failed, report.shadow_failures
                )))
            }
        }
        Command::MinusOneClasses { model } => {
            let model = load_model(&model)?;
            let classes = enumerate_minus_one_classes(&model)?;
            Ok(format::minus_one_to_string(&model, &classes)?)
        }
        Command::Shadow { file } => {
            let s = load_system(&file)?;
            Ok(format::shadow_to_string(&toric_shadow_check(&s)?)?)
        }
    }
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Malformed => 3,
        ErrorCategory::Validation => 4,
        ErrorCategory::Computation => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.category()))
        }
        Err(Failure::Negative(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(5)
        }
    }
}
