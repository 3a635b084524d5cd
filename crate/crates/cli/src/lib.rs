//! The `lsseq` command line and its HTTP server.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use lambda_sseq::chart::{chart_document, document_svg, page_chart, page_svg};
use lambda_sseq::lambda::{d_element, LambdaError};
use lambda_sseq::oracle::{lemma_checks, vanishing_check, verify_iso_dims};
use lambda_sseq::session::{SessionError, SessionFile};
use lambda_sseq::ss::{Bounds, Session, SignMode, SsError};
use lambda_sseq::unstable::{enumerate_basis, LengthSpec, UnstableFlavor};
use lambda_sseq::{Element, PrimeContext};

pub mod report;
pub mod server;

use report::{to_json, AssertionCreated, ClassReport, PropagationReport};

#[derive(Parser, Debug)]
#[command(name = "lsseq", version, about = "Mod-p lambda algebra and lower-central-series spectral sequences of spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the admissible normal form of a lambda expression.
    Normalize {
        #[arg(short)]
        p: u32,
        expr: String,
    },
    /// Print ∂ of a lambda expression.
    D {
        #[arg(short)]
        p: u32,
        expr: String,
    },
    /// List the admissible basis of Λ(n) or Λλ(n) up to a degree.
    Basis {
        #[arg(short)]
        p: u32,
        #[arg(short)]
        n: u32,
        #[arg(long, value_enum, default_value_t = FlavorArg::Full)]
        flavor: FlavorArg,
        /// Largest internal degree listed.
        #[arg(long)]
        degree: u32,
        /// Only words of this length (default: every length).
        #[arg(long)]
        length: Option<usize>,
    },
    /// Create a new session file.
    Init {
        #[arg(long)]
        session: PathBuf,
        #[arg(short)]
        p: u32,
        /// Comma-separated sphere dimensions.
        #[arg(long, value_delimiter = ',', required = true)]
        spheres: Vec<u32>,
        #[arg(long)]
        max_m: u32,
        #[arg(long)]
        max_length: usize,
        #[arg(long, default_value = "derivation")]
        sign_mode: SignMode,
        /// Overwrite an existing file.
        #[arg(long)]
        force: bool,
    },
    /// Print the chart of one page as JSON or SVG.
    Page {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        sphere: u32,
        #[arg(short)]
        r: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Record d^r(source) = target in the session ledger.
    Assert {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        sphere: u32,
        #[arg(short)]
        r: u32,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "")]
        note: String,
    },
    /// Remove a ledger entry (kept in the file as a tombstone).
    Delete {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        id: u64,
    },
    /// Apply the Leibniz rule on one page and record derived differentials.
    Propagate {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        sphere: u32,
        #[arg(short)]
        r: u32,
        #[arg(long)]
        sign_mode: Option<SignMode>,
    },
    /// Compose page classes: [a] over S^n with [b] over S^{m(a)}.
    Compose {
        #[arg(long)]
        session: PathBuf,
        #[arg(short)]
        r: u32,
        #[arg(long)]
        a_sphere: u32,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b_sphere: u32,
        #[arg(long)]
        b: String,
    },
    /// Simplicial cross-checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Export every chart of the session.
    ExportChart {
        #[arg(long)]
        session: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Last page exported (default: one past the highest asserted page).
        #[arg(long)]
        max_page: Option<u32>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Session to load; mutations are written back to it.
        #[arg(long)]
        session: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Compare π_m of the restricted Lie power with the lambda algebra.
    VerifyIso {
        #[arg(short)]
        p: u32,
        #[arg(short)]
        n: u32,
        #[arg(short)]
        l: u32,
        #[arg(long)]
        max_m: u32,
        #[arg(long)]
        json: bool,
    },
    /// Randomized checks of the Kleisli identities.
    Lemmas {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        json: bool,
    },
    /// Look for p-torsion in integral π_m L_i[S^n].
    Vanishing {
        #[arg(short)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        sphere: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<usize>,
        #[arg(long)]
        max_m: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FlavorArg {
    Full,
    LambdaTail,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Svg,
}

/// A failed command: malformed input exits 2, everything else 1.
#[derive(Debug)]
enum Failure {
    Parse(String),
    Engine(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Engine(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Engine(m) => m,
        }
    }
}

impl From<SsError> for Failure {
    fn from(e: SsError) -> Self {
        Failure::Engine(e.to_string())
    }
}

impl From<SessionError> for Failure {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Json(_) | SessionError::Version(_) | SessionError::Lambda(_) => Failure::Parse(e.to_string()),
            _ => Failure::Engine(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Engine(e.to_string())
    }
}

fn parse_failure(e: LambdaError) -> Failure {
    Failure::Parse(e.to_string())
}

fn prime(p: u32) -> Result<PrimeContext, Failure> {
    PrimeContext::new(p).map_err(parse_failure)
}

fn element(text: &str, ctx: &PrimeContext) -> Result<Element, Failure> {
    Element::parse(text, ctx).map_err(parse_failure)
}

fn load(path: &Path) -> Result<Session, Failure> {
    Ok(SessionFile::load(path)?.to_session()?)
}

fn save(s: &Session, path: &Path) -> Result<(), Failure> {
    Ok(SessionFile::from_session(s).save(path)?)
}

/// Run `lsseq` with the given arguments (program name first); returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Normalize { p, expr } => {
            let c = prime(p)?;
            writeln!(out, "{}", element(&expr, &c)?)?;
        }
        Command::D { p, expr } => {
            let c = prime(p)?;
            writeln!(out, "{}", d_element(&element(&expr, &c)?))?;
        }
        Command::Basis { p, n, flavor, degree, length } => {
            let c = prime(p)?;
            let flavor = match flavor {
                FlavorArg::Full => UnstableFlavor::full(n),
                FlavorArg::LambdaTail => UnstableFlavor::lambda_tail(n),
            };
            let length = length.map_or(LengthSpec::All, LengthSpec::Exactly);
            for w in enumerate_basis(flavor, degree, length, &c) {
                writeln!(out, "{w}")?;
            }
        }
        Command::Init { session, p, spheres, max_m, max_length, sign_mode, force } => {
            prime(p)?;
            if let Some(&n) = spheres.iter().find(|&&n| n < 2) {
                return Err(Failure::Parse(format!("sphere S^{n} is not available (need n ≥ 2)")));
            }
            if session.exists() && !force {
                return Err(Failure::Engine(format!("{} exists (use --force to overwrite)", session.display())));
            }
            let f = SessionFile::new(p, spheres, Bounds { max_m, max_length }, sign_mode);
            f.save(&session)?;
        }
        Command::Page { session, sphere, r, format } => {
            let mut s = load(&session)?;
            let page = page_chart(&mut s, sphere, r)?;
            match format {
                Format::Json => write!(out, "{}", to_json(&page))?,
                Format::Svg => write!(out, "{}", page_svg(&page, s.bounds()))?,
            }
        }
        Command::Assert { session, sphere, r, source, target, note } => {
            let mut s = load(&session)?;
            let (x, y) = (element(&source, s.ctx())?, element(&target, s.ctx())?);
            let id = s.assert_differential(sphere, r, &x, &y, &note)?;
            save(&s, &session)?;
            write!(out, "{}", to_json(&AssertionCreated { id, revision: s.revision() }))?;
        }
        Command::Delete { session, id } => {
            let mut s = load(&session)?;
            s.delete_assertion(id)?;
            save(&s, &session)?;
            writeln!(out, "{{\"revision\": {}}}", s.revision())?;
        }
        Command::Propagate { session, sphere, r, sign_mode } => {
            let mut s = load(&session)?;
            let before = s.revision();
            let prop = s.leibniz_propagate(sphere, r, sign_mode)?;
            if s.revision() != before {
                save(&s, &session)?;
            }
            write!(out, "{}", to_json(&PropagationReport::new(&prop, s.revision())))?;
        }
        Command::Compose { session, r, a_sphere, a, b_sphere, b } => {
            let mut s = load(&session)?;
            let (x, y) = (element(&a, s.ctx())?, element(&b, s.ctx())?);
            let ca = s.class(a_sphere, r, &x)?;
            let cb = s.class(b_sphere, r, &y)?;
            let ab = s.compose_classes(&ca, &cb)?;
            write!(out, "{}", to_json(&ClassReport::from(&ab)))?;
        }
        Command::Oracle(o) => return oracle(o, out),
        Command::ExportChart { session, format, max_page, output } => {
            let mut s = load(&session)?;
            let doc = chart_document(&mut s, max_page)?;
            let text = match format {
                Format::Json => doc.to_json(),
                Format::Svg => document_svg(&doc),
            };
            match output {
                Some(path) => std::fs::write(path, text)?,
                None => write!(out, "{text}")?,
            }
        }
        Command::Serve { port, host, session } => {
            let state = match &session {
                Some(path) => server::AppState::with_session(load(path)?, Some(path.clone())),
                None => server::AppState::empty(),
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(state, &host, port))?;
        }
    }
    Ok(0)
}

fn oracle_error(e: lambda_sseq::oracle::OracleError) -> Failure {
    Failure::Engine(e.to_string())
}

// Reports print as a table, or as JSON with --json. A failed check exits 1.
fn oracle(cmd: OracleCommand, out: &mut dyn Write) -> Result<i32, Failure> {
    let ok = match cmd {
        OracleCommand::VerifyIso { p, n, l, max_m, json } => {
            prime(p)?;
            let r = verify_iso_dims(p, n, l, max_m).map_err(oracle_error)?;
            if json {
                write!(out, "{}", to_json(&r))?;
            } else {
                write!(out, "{r}")?;
            }
            r.all_match()
        }
        OracleCommand::Lemmas { seed, trials, json } => {
            let r = lemma_checks(seed, trials);
            if json {
                write!(out, "{}", to_json(&r))?;
            } else {
                write!(out, "{r}")?;
            }
            r.all_passed()
        }
        OracleCommand::Vanishing { p, sphere, weights, max_m, json } => {
            prime(p)?;
            let r = vanishing_check(p, sphere, &weights, max_m).map_err(oracle_error)?;
            if json {
                write!(out, "{}", to_json(&r))?;
            } else {
                write!(out, "{r}")?;
            }
            r.no_p_torsion()
        }
    };
    Ok(if ok { 0 } else { 1 })
}
