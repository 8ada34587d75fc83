//! The `hopfren` command line: argument parsing, dispatch and rendering.
//!
//! [`run`] never touches the process; it returns the exit code together with the text that
//! belongs on stdout and stderr, so the binary and the tests share one code path.

mod commands;
mod render;
mod selftest;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hopfren::Error;
use serde_json::{json, Value};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;

/// What a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "hopfren", version, about = "Exact Hopf-algebraic renormalization toolkit")]
struct Cli {
    /// Emit structured JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coproduct of a tree polynomial.
    Coprod(ExprArgs),
    /// Antipode of a tree polynomial.
    Antipode(ExprArgs),
    /// Birkhoff factorization of a character file.
    Birkhoff {
        #[command(flatten)]
        input: CharArgs,
        #[arg(long, value_enum, default_value_t = BirkhoffMethod::Bogoliubov)]
        method: BirkhoffMethod,
    },
    /// Renormalization-group flow F_t and β of a local character.
    Rg {
        #[command(flatten)]
        input: CharArgs,
    },
    /// Motion-integral residual [f, F]_λ and the Nijenhuis identity for two character files.
    NijenhuisCheck {
        /// Exactly two character files: the functional f and the Hamiltonian F.
        #[arg(long = "char", value_name = "FILE", num_args = 1, required = true)]
        chars: Vec<PathBuf>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
        #[arg(short = 'd', long)]
        degree: Option<u32>,
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Dyson-Schwinger equations.
    Dse {
        #[command(subcommand)]
        action: DseAction,
    },
    /// Hall set with foliages and standard decompositions.
    Hall {
        #[arg(long)]
        alphabet: String,
        #[arg(long, short = 'd', visible_alias = "degree")]
        max_degree: u32,
    },
    /// Lyndon words, or the Lyndon factorization of one word.
    Lyndon {
        #[arg(long)]
        alphabet: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        /// Factorize this word instead of listing.
        #[arg(long)]
        factor: Option<String>,
    },
    /// Word algebra operations.
    Words {
        /// Word alphabet; letters f1, f2, … of weights 1, 2, … by default.
        #[arg(long, global = true, default_value = "universal:16")]
        alphabet: String,
        #[arg(long, global = true, value_enum, default_value_t = PairingArg::Additive)]
        pairing: PairingArg,
        #[command(subcommand)]
        op: WordsOp,
    },
    /// Universal singular frame expansion.
    Usf {
        #[arg(long, default_value_t = 3)]
        order: u32,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
        #[command(subcommand)]
        action: Option<UsfAction>,
    },
    /// Runs the invariant suite.
    Selftest,
}

#[derive(Args, Debug)]
struct ExprArgs {
    /// A tree polynomial such as `f1[f1] - 1/2*f1 f1`.
    #[arg(allow_hyphen_values = true)]
    expr: String,
    /// Alphabet (`a,b`, `a:1,b:2` or `universal:N`); inferred from the labels when absent.
    #[arg(long)]
    alphabet: Option<String>,
}

#[derive(Args, Debug)]
struct CharArgs {
    /// Character definition file.
    #[arg(long = "char", value_name = "FILE")]
    file: PathBuf,
    /// Truncation degree; defaults to the degree declared in the file.
    #[arg(short = 'd', long)]
    degree: Option<u32>,
    #[arg(long)]
    alphabet: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BirkhoffMethod {
    Bogoliubov,
    Bch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PairingArg {
    Zero,
    Additive,
}

#[derive(Subcommand, Debug)]
enum DseAction {
    /// Solves for the coefficients c_0, …, c_N.
    Solve(DseArgs),
    /// Runs the Hopf subalgebra check and compares with the closed tree formula.
    Check(DseArgs),
    /// The ζ character on the all-words solution over prime letters.
    Zeta {
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long)]
        primes_upto: u64,
        #[arg(long, default_value = "multiset")]
        normalization: String,
        /// Word-length truncation.
        #[arg(long, default_value_t = 30)]
        max_len: u32,
    },
}

#[derive(Args, Debug)]
struct DseArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, short = 'd', visible_alias = "degree")]
    order: usize,
}

#[derive(Subcommand, Debug)]
enum WordsOp {
    /// Quasi-shuffle product u ⋆ v.
    Qsh {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Shuffle product.
    Shuffle {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Antipode of a word polynomial.
    Antipode {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Hoffman exponential.
    Exp {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Hoffman logarithm.
    Log {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Deconcatenation coproduct.
    Deconcat {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// The morphism π from trees to words.
    Pi {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Zhao's map from undecorated trees to quasi-symmetric functions.
    Zhao {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
}

#[derive(Subcommand, Debug)]
enum UsfAction {
    /// Checks the Hall-basis representation of the frame.
    CheckHall {
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub(crate) enum Failure {
    Core(Error),
    /// A core error located in an input file.
    InFile(String, Error),
    Io(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn error(&self) -> Option<&Error> {
        match self {
            Failure::Core(e) | Failure::InFile(_, e) => Some(e),
            _ => None,
        }
    }

    fn code(&self) -> i32 {
        match self.error() {
            Some(e) if !e.is_parse() => EXIT_SEMANTIC,
            _ => EXIT_PARSE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::InFile(file, e) => format!("{file}: {e}"),
            Failure::Io(m) | Failure::Usage(m) => m.clone(),
        }
    }

    fn to_json(&self) -> Value {
        let mut obj = json!({ "message": self.message() });
        let (kind, cert) = match self {
            Failure::Io(_) => ("io", None),
            Failure::Usage(_) => ("usage", None),
            Failure::Core(e) | Failure::InFile(_, e) => (error_kind(e), certificate(e)),
        };
        obj["kind"] = json!(kind);
        if let Some(Error::Parse { line, column, .. }) = self.error() {
            obj["line"] = json!(line);
            obj["column"] = json!(column);
        }
        if let Failure::InFile(file, _) = self {
            obj["file"] = json!(file);
        }
        if let Some(c) = cert {
            obj["certificate"] = c;
        }
        json!({ "error": obj })
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::UnknownDecoration(_) => "unknown_decoration",
        Error::PoleOverflow { .. } => "pole_overflow",
        Error::LimitDoesNotExist { .. } => "limit_does_not_exist",
        Error::InsufficientPrecision { .. } => "insufficient_precision",
        Error::InsufficientTruncation { .. } => "insufficient_truncation",
        Error::KindMismatch { .. } => "kind_mismatch",
        Error::AlphabetMismatch => "alphabet_mismatch",
        Error::NonLocal { .. } => "non_local",
        Error::BidegreeUndefined => "bidegree_undefined",
        Error::SafetyBound { .. } => "safety_bound",
        Error::NotHallMember(_) => "not_hall_member",
        Error::InvalidPairing(_) => "invalid_pairing",
        Error::TruncationOverflow { .. } => "truncation_overflow",
        Error::Invalid(_) => "invalid",
    }
}

/// The data that pins a semantic failure down.
fn certificate(e: &Error) -> Option<Value> {
    Some(match e {
        Error::PoleOverflow { order, bound } => json!({ "pole_order": order, "bound": bound }),
        Error::LimitDoesNotExist { pole_order } => json!({ "pole_order": pole_order }),
        Error::InsufficientPrecision { needed, known } => json!({ "needed": needed, "known": known }),
        Error::InsufficientTruncation { needed, available } => {
            json!({ "needed": needed, "available": available })
        }
        Error::KindMismatch { expected, found } => json!({ "expected": expected, "found": found }),
        Error::NonLocal { tree, pole_order } => json!({ "tree": tree, "pole_order": pole_order }),
        Error::SafetyBound { requested, bound } => json!({ "requested": requested, "bound": bound }),
        Error::NotHallMember(t) => json!({ "tree": t }),
        Error::TruncationOverflow { degree, order } => json!({ "degree": degree, "order": order }),
        _ => return None,
    })
}

/// Text or JSON produced by a command, plus its exit code.
pub(crate) struct Report {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Report {
    pub fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: EXIT_OK }
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let json_requested = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: rendered, stderr: String::new() }
                }
                _ => {
                    let message = rendered.trim_end().trim_start_matches("error: ").to_string();
                    failure_outcome(&Failure::Usage(message), json_requested)
                }
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(report) => Outcome {
            code: report.code,
            stdout: if cli.json {
                let mut s = serde_json::to_string_pretty(&report.json).expect("serializable");
                s.push('\n');
                s
            } else {
                report.text
            },
            stderr: String::new(),
        },
        Err(f) => failure_outcome(&f, cli.json),
    }
}

fn failure_outcome(f: &Failure, json: bool) -> Outcome {
    if json {
        let mut s = serde_json::to_string_pretty(&f.to_json()).expect("serializable");
        s.push('\n');
        Outcome { code: f.code(), stdout: s, stderr: String::new() }
    } else {
        let mut stderr = format!("error: {}\n", f.message());
        if let Some(c) = f.error().and_then(certificate) {
            stderr.push_str(&format!("certificate: {c}\n"));
        }
        Outcome { code: f.code(), stdout: String::new(), stderr }
    }
}

fn dispatch(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Coprod(a) => commands::coprod(&a.expr, a.alphabet.as_deref()),
        Command::Antipode(a) => commands::antipode(&a.expr, a.alphabet.as_deref()),
        Command::Birkhoff { input, method } => {
            let phi = load_char(&input.file, input.degree, input.alphabet.as_deref())?;
            commands::birkhoff(&phi, matches!(method, BirkhoffMethod::Bch))
        }
        Command::Rg { input } => {
            let phi = load_char(&input.file, input.degree, input.alphabet.as_deref())?;
            commands::rg(&phi)
        }
        Command::NijenhuisCheck { chars, lambda, degree, alphabet } => {
            if chars.len() != 2 {
                return Err(Failure::Usage(format!(
                    "nijenhuis-check takes exactly two --char files, got {}",
                    chars.len()
                )));
            }
            let lambda = hopfren::rational::parse_q(lambda)?;
            let f = load_char(&chars[0], *degree, alphabet.as_deref())?;
            let g = load_char(&chars[1], *degree, alphabet.as_deref())?;
            commands::nijenhuis(&f, &g, &lambda)
        }
        Command::Dse { action } => match action {
            DseAction::Solve(a) => commands::dse_solve(&load_dse(&a.spec)?, a.order),
            DseAction::Check(a) => commands::dse_check(&load_dse(&a.spec)?, a.order),
            DseAction::Zeta { s, primes_upto, normalization, max_len } => {
                commands::dse_zeta(*s, *primes_upto, normalization, *max_len)
            }
        },
        Command::Hall { alphabet, max_degree } => commands::hall(alphabet, *max_degree),
        Command::Lyndon { alphabet, max_len, factor } => {
            commands::lyndon(alphabet, *max_len, factor.as_deref())
        }
        Command::Words { alphabet, pairing, op } => {
            commands::words(alphabet, *pairing == PairingArg::Additive, op)
        }
        Command::Usf { order, max_weight, action } => match action {
            None => commands::usf(*order, *max_weight),
            Some(UsfAction::CheckHall { max_weight }) => commands::usf_check_hall(*max_weight),
        },
        Command::Selftest => Ok(selftest::run()),
    }
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", display_name(path))))
}

fn load_char(
    path: &Path,
    degree: Option<u32>,
    alphabet: Option<&str>,
) -> Result<hopfren::characters::Functional, Failure> {
    let src = read_file(path)?;
    let in_file = |e: Error| Failure::InFile(display_name(path), e);
    let alphabet = alphabet.map(hopfren::Alphabet::parse).transpose()?;
    let f = hopfren::characters::Functional::parse_file(&src, alphabet.as_ref()).map_err(in_file)?;
    match degree {
        Some(d) => Ok(f.restrict(d).map_err(in_file)?),
        None => Ok(f),
    }
}

fn load_dse(path: &Path) -> Result<hopfren::dse::DseSpec, Failure> {
    let src = read_file(path)?;
    hopfren::dse::DseSpec::parse(&src).map_err(|e| Failure::InFile(display_name(path), e))
}
