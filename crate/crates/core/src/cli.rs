//! Command-line front end. Every command prints one JSON document to stdout,
//! except `teapot` without `--out`, which prints the CSV itself.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::classify::DEFAULT_ENUMERATION_CAP;
use crate::error::{Error, Result};
use crate::experiments::{with_thread_cap, DEFAULT_CIRCLE_TOL, DEFAULT_SEARCH_CAP};
use crate::graph::SignedGraph;
use crate::spectral::{
    char_poly, entropy, spectral_radius, spectrum, zeta_denominator, KneadingConvention,
};
use crate::word::Word;

/// Exit code for malformed command lines.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "kneadkit",
    version,
    about = "Signed orders, tuning and kneading spectra on signed graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct System {
    /// Built-in system name (unimodal, four-vertex, tree) or path to a JSON config
    system: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    Oriented,
    AsPrinted,
}

impl From<Convention> for KneadingConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Oriented => KneadingConvention::Oriented,
            Convention::AsPrinted => KneadingConvention::AsPrinted,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Periodicity, extremality, admissibility and dominance of a word
    Classify {
        #[command(flatten)]
        sys: System,
        word: String,
    },
    /// Compare two words as finite words and as periodic sequences
    Order {
        #[command(flatten)]
        sys: System,
        u: String,
        v: String,
    },
    /// Periodic words of length n starting at the top vertex, in increasing order
    Wn {
        #[command(flatten)]
        sys: System,
        n: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Audit the tunability conditions up to a length bound
    Tunable {
        #[command(flatten)]
        sys: System,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Tune the pair starting at `a` by the unimodal exponent `v`
    Tune {
        #[command(flatten)]
        sys: System,
        a: String,
        v: String,
    },
    /// Shortest renormalization of an extremal word, if any
    Renorm {
        #[command(flatten)]
        sys: System,
        word: String,
    },
    /// Certified dominant word beginning with w^n
    Dominant {
        #[command(flatten)]
        sys: System,
        word: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: usize,
    },
    /// Certified admissible concatenation w^n·v
    Concat {
        #[command(flatten)]
        sys: System,
        w: String,
        v: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Certified admissible word a^n·c·b^n
    Bridge {
        #[command(flatten)]
        sys: System,
        a: String,
        b: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: usize,
    },
    /// Markov partition and incidence matrix
    Markov {
        #[command(flatten)]
        sys: System,
        word: String,
    },
    /// Eigenvalues of the incidence matrix, split by the unit circle
    Spectrum {
        #[command(flatten)]
        sys: System,
        word: String,
        #[arg(long, default_value_t = DEFAULT_CIRCLE_TOL)]
        tol: f64,
    },
    /// det(I - tM) for the incidence matrix
    Zeta {
        #[command(flatten)]
        sys: System,
        word: String,
    },
    /// Kneading polynomial and the elimination polynomials behind it
    Kneadpoly {
        #[command(flatten)]
        sys: System,
        word: String,
        #[arg(long, value_enum, default_value_t = Convention::Oriented)]
        convention: Convention,
    },
    /// Match off-circle kneading roots against off-circle eigenvalues
    Match {
        #[command(flatten)]
        sys: System,
        word: String,
        #[arg(long, default_value_t = DEFAULT_CIRCLE_TOL)]
        tol: f64,
    },
    /// Eigenvalue and spectral radius pairs over admissible words
    Teapot {
        #[command(flatten)]
        sys: System,
        #[arg(long)]
        max_len: usize,
        /// Write CSV here and print a JSON summary instead
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Push the spectrum of v into words with the entropy of w
    Persist {
        #[command(flatten)]
        sys: System,
        w: String,
        v: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: usize,
    },
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse and run one command line. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = hoist_system_flag(args.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// `--system X` anywhere after the subcommand becomes the first positional.
fn hoist_system_flag(mut args: Vec<OsString>) -> Vec<OsString> {
    let mut found = None;
    let mut k = 2;
    while k < args.len() {
        let a = args[k].to_string_lossy().into_owned();
        if a == "--system" && k + 1 < args.len() {
            found = Some(args.remove(k + 1));
            args.remove(k);
        } else if let Some(rest) = a.strip_prefix("--system=") {
            found = Some(OsString::from(rest));
            args.remove(k);
        } else {
            k += 1;
        }
    }
    if let Some(sys) = found {
        let at = 2.min(args.len());
        args.insert(at, sys);
    }
    args
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn load(sys: &System) -> Result<SignedGraph> {
    SignedGraph::resolve(&sys.system)
}

fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Classify { sys, word } => {
            let g = load(&sys)?;
            let w = Word::parse(&g, &word)?;
            to_json(&g.classify(&w))
        }
        Command::Order { sys, u, v } => {
            let g = load(&sys)?;
            let (u, v) = (Word::parse(&g, &u)?, Word::parse(&g, &v)?);
            to_json(&json!({
                "u": u,
                "v": v,
                "sign_u": g.sign(&u),
                "sign_v": g.sign(&v),
                "finite": g.compare_words(&u, &v),
                "periodic": g.compare_periodic(&u, &v)?,
            }))
        }
        Command::Wn { sys, n, cap } => {
            let g = load(&sys)?;
            to_json(&json!({ "system": g.name(), "n": n, "words": g.enumerate_wn(n, cap)? }))
        }
        Command::Tunable { sys, max_len } => {
            let g = load(&sys)?;
            to_json(&g.check_tunable(max_len)?)
        }
        Command::Tune { sys, a, v } => {
            let g = load(&sys)?;
            let a = Word::parse(&g, &a)?;
            let v: Word = v.parse()?;
            let pair = g
                .find_tuning_pair(&a)?
                .ok_or_else(|| Error::NotTunable(a.to_string()))?;
            let word = g.tune(&pair, &v)?;
            to_json(&json!({ "pair": pair, "exponent": v, "word": word }))
        }
        Command::Renorm { sys, word } => {
            let g = load(&sys)?;
            let w = Word::parse(&g, &word)?;
            let found = g.detect_renormalization(&w)?;
            to_json(&json!({
                "word": w,
                "renormalizable": found.is_some(),
                "decomposition": found,
            }))
        }
        Command::Dominant { sys, word, n, cap } => {
            let g = load(&sys)?;
            let w = Word::parse(&g, &word)?;
            to_json(&g.make_dominant(&w, n, cap)?)
        }
        Command::Concat { sys, w, v, n } => {
            let g = load(&sys)?;
            let (w, v) = (Word::parse(&g, &w)?, Word::parse(&g, &v)?);
            to_json(&g.concat_admissible(&w, &v, n)?)
        }
        Command::Bridge { sys, a, b, n, cap } => {
            let g = load(&sys)?;
            let (a, b) = (Word::parse(&g, &a)?, Word::parse(&g, &b)?);
            to_json(&g.concat_bridge(&a, &b, n, cap)?)
        }
        Command::Markov { sys, word } => {
            let g = load(&sys)?;
            let w = Word::parse(&g, &word)?;
            let partition = g.markov_partition(&w)?;
            let matrix = g.incidence_matrix(&partition);
            let core = matrix.core();
            to_json(&json!({
                "partition": partition,
                "labels": matrix.labels.iter().map(|p| p.label()).collect::<Vec<_>>(),
                "matrix": matrix.entries.to_rows(),
                "trimmed": matrix.trimmed.iter().map(|p| p.label()).collect::<Vec<_>>(),
                "irreducible": matrix.is_irreducible(),
                "core_labels": core.labels.iter().map(|p| p.label()).collect::<Vec<_>>(),
                "core_irreducible": core.is_irreducible(),
            }))
        }
        Command::Spectrum { sys, word, tol } => {
            let g = load(&sys)?;
            let w = Word::parse(&g, &word)?;
            let m = g.markov_matrix(&w)?;
            to_json(&json!({
                "word": w,
                "char_poly": char_poly(&m.entries),
                "spectral_radius": spectral_radius(&m.entries)?,
                "entropy": entropy(&m.entries)?,
                "spectrum": spectrum::<f64>(&m.entries, tol)?,
            }))
        }
        Command::Zeta { sys, word } => {
            let g = load(&sys)?;
            let w = Word::parse(&g, &word)?;
            let m = g.markov_matrix(&w)?;
            let d = zeta_denominator(&m.entries);
            to_json(&json!({
                "word": w,
                "denominator": d,
                "pretty": format!("1/({})", d.pretty("t")),
            }))
        }
        Command::Kneadpoly {
            sys,
            word,
            convention,
        } => {
            let g = load(&sys)?;
            let w = Word::parse(&g, &word)?;
            let f = g.kneading_poly_with(&w, convention.into())?;
            to_json(&json!({
                "word": w,
                "convention": KneadingConvention::from(convention),
                "elimination_polys": g.elimination_polys()?,
                "kneading_poly": f,
                "pretty": f.pretty("λ"),
            }))
        }
        Command::Match { sys, word, tol } => {
            let g = load(&sys)?;
            let w = Word::parse(&g, &word)?;
            to_json(&g.match_off_circle(&w, tol)?)
        }
        Command::Teapot { sys, max_len, out } => {
            let g = load(&sys)?;
            let cloud = g.teapot_sweep(max_len)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path)?;
                    let mut w = std::io::BufWriter::new(file);
                    cloud.write_csv(&mut w)?;
                    std::io::Write::flush(&mut w)?;
                    to_json(&json!({
                        "system": cloud.system,
                        "max_len": cloud.max_len,
                        "circle_tol": cloud.circle_tol,
                        "words": cloud.words,
                        "rows": cloud.rows.len(),
                        "out": path.display().to_string(),
                    }))
                }
                None => Ok(cloud.to_csv()),
            }
        }
        Command::Persist {
            sys,
            w,
            v,
            eps,
            n_max,
            cap,
        } => {
            let g = load(&sys)?;
            let (w, v) = (Word::parse(&g, &w)?, Word::parse(&g, &v)?);
            to_json(&with_thread_cap(|| {
                g.run_persistence(&w, &v, eps, n_max, cap)
            })??)
        }
    }
}
