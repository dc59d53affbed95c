//! The `mrdikit` command-line front end. [`run`] takes the argument list and
//! output streams so it can be driven in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mrdi_core::algebra::{AlgebraError, AlgebraValue};
use mrdi_core::compress::{compress_subtree, decompress_all, decompress_subtree};
use mrdi_core::inspect::render;
use mrdi_core::migrate::{upgrade, UpgradeRegistry};
use mrdi_core::schema::builtin_schema_text;
use mrdi_core::{
    builtin_mrdi_schema, compile_schema, parse_document, MrdiDocument, Schema, Session, SessionError, Style, ValueTree,
};

/// Decimal `u64` seed for reproducible UUIDs.
pub const SEED_VAR: &str = "MRDIKIT_UUID_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }
}

fn failed(e: impl ToString) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "mrdikit", version, about = "Validate, inspect, convert and compute with .mrdi files")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Emit without whitespace
    #[arg(long, global = true)]
    compact: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check files against the schema and the reference rules
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// JSON schema to use instead of the built-in one
        #[arg(long, value_name = "FILE")]
        schema: Option<PathBuf>,
    },
    /// Print the annotated tree of a file
    Show { path: PathBuf },
    /// Load, save in a fresh session, load again and compare
    Roundtrip { path: PathBuf },
    /// Multiply a saved matrix with a saved vector
    Mulmv { matrix: PathBuf, vector: PathBuf },
    /// Apply upgrade scripts up to a namespace version
    Upgrade {
        path: PathBuf,
        #[arg(long, value_name = "VERSION", default_value = mrdi_core::session::DEFAULT_VERSION)]
        to: String,
    },
    /// Replace the subtree at a slash path by a compressed node
    Compress {
        path: PathBuf,
        #[arg(default_value = "/data")]
        tree_path: String,
    },
    /// Expand the compressed node at a path, or all of them
    Decompress { path: PathBuf, tree_path: Option<String> },
    /// Built-in JSON schema
    Schema {
        #[arg(long)]
        print: bool,
    },
}

/// Parses `args` (including the program name), executes the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn style(cli: &Cli) -> Style {
    if cli.compact {
        Style::Compact
    } else {
        Style::Pretty
    }
}

fn session() -> Result<Session, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Session::seeded)
            .map_err(|_| CliError::Usage(format!("{SEED_VAR} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(Session::new()),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn read_doc(path: &Path) -> Result<MrdiDocument, CliError> {
    parse_document(&read(path)?).map_err(|e| failed(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => writeln!(out, "{text}").map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Validate { paths, schema } => validate(paths, schema.as_deref(), out, err),
        Command::Show { path } => {
            let text = render(&read_doc(path)?);
            emit(cli, text.trim_end(), out)?;
            Ok(0)
        }
        Command::Roundtrip { path } => roundtrip(path, err),
        Command::Mulmv { matrix, vector } => {
            let doc = mulmv(matrix, vector)?;
            emit(cli, &doc.emit(style(cli)), out)?;
            Ok(0)
        }
        Command::Upgrade { path, to } => {
            let doc = read_doc(path)?;
            let ns = session()?.namespace().0.to_string();
            let up = upgrade(&doc, &ns, to, &UpgradeRegistry::builtin()).map_err(failed)?;
            emit(cli, &up.emit(style(cli)), out)?;
            Ok(0)
        }
        Command::Compress { path, tree_path } => {
            let doc = compress_subtree(&read_doc(path)?, tree_path).map_err(failed)?;
            emit(cli, &doc.emit(style(cli)), out)?;
            Ok(0)
        }
        Command::Decompress { path, tree_path } => {
            let doc = read_doc(path)?;
            let doc = match tree_path {
                Some(p) => decompress_subtree(&doc, p),
                None => decompress_all(&doc),
            }
            .map_err(failed)?;
            emit(cli, &doc.emit(style(cli)), out)?;
            Ok(0)
        }
        Command::Schema { print } => {
            if !print {
                return Err(CliError::Usage("nothing to do; use `schema --print`".into()));
            }
            let text = if cli.compact {
                ValueTree::parse(builtin_schema_text()).map_err(failed)?.emit(Style::Compact)
            } else {
                builtin_schema_text().trim_end().to_string()
            };
            emit(cli, &text, out)?;
            Ok(0)
        }
    }
}

/// With the built-in schema a file must also parse as a document with
/// resolvable references; a custom schema is the only check applied.
fn validate(
    paths: &[PathBuf],
    schema: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let custom: Option<Schema> = match schema {
        Some(p) => {
            let tree = ValueTree::parse(&read(p)?).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let s = compile_schema(&tree).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            for w in s.warnings() {
                let _ = writeln!(err, "warning: {}: {w}", p.display());
            }
            Some(s)
        }
        None => None,
    };
    let texts = paths.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    let mut bad = 0;
    for (path, text) in paths.iter().zip(&texts) {
        let mut lines = Vec::new();
        match ValueTree::parse(text) {
            Err(e) => lines.push(format!("/: json: {e}")),
            Ok(tree) => {
                let s = custom.as_ref().unwrap_or_else(|| builtin_mrdi_schema());
                lines.extend(s.validate(&tree).iter().map(ToString::to_string));
                if lines.is_empty() && custom.is_none() {
                    if let Err(e) = MrdiDocument::from_tree(&tree).and_then(|d| d.check_references()) {
                        lines.push(format!("/: document: {e}"));
                    }
                }
            }
        }
        if paths.len() > 1 {
            let _ = writeln!(out, "{}: {}", path.display(), if lines.is_empty() { "ok" } else { "invalid" });
        }
        for l in &lines {
            let _ = writeln!(out, "{l}");
        }
        if !lines.is_empty() {
            bad += 1;
        }
    }
    if bad > 0 {
        let _ = writeln!(err, "{bad} of {} file(s) failed validation", paths.len());
        return Ok(1);
    }
    Ok(0)
}

/// Reloading in the saving session must hand back the same parents, so a
/// second save there is byte-identical. A third session only has to agree
/// structurally.
fn roundtrip(path: &Path, err: &mut dyn Write) -> Result<i32, CliError> {
    let text = read(path)?;
    let value = session()?.load_str(&text).map_err(failed)?;
    let mut fresh = session()?;
    let saved = fresh.save_string(&value, Style::Pretty).map_err(failed)?;
    let again = fresh.load_str(&saved).map_err(failed)?;
    let resaved = fresh.save_string(&again, Style::Pretty).map_err(failed)?;
    let elsewhere = session()?.load_str(&saved).map_err(failed)?;
    if again.structurally_equal(&value) && elsewhere.structurally_equal(&value) && resaved == saved {
        Ok(0)
    } else {
        let _ = writeln!(err, "{}: reloaded value differs from the original", path.display());
        Ok(1)
    }
}

/// Loads both files into one session and saves `matrix * vector` from it,
/// so the output refers to the inputs' ring UUIDs.
pub fn mulmv(matrix: &Path, vector: &Path) -> Result<MrdiDocument, CliError> {
    let (mt, vt) = (read(matrix)?, read(vector)?);
    let mut s = session()?;
    let ctx = |p: &Path, e: SessionError| failed(format!("{}: {e}", p.display()));
    let m = s.load_str(&mt).map_err(|e| ctx(matrix, e))?;
    let v = s.load_str(&vt).map_err(|e| ctx(vector, e))?;
    let m = m
        .as_matrix()
        .ok_or_else(|| failed(format!("{}: expected a Matrix, found {}", matrix.display(), m.type_name())))?;
    let v = v
        .as_elem_vector()
        .ok_or_else(|| failed(format!("{}: expected a Vector, found {}", vector.display(), v.type_name())))?;
    let product = m.mul_vec(&v).map_err(|e| match e {
        AlgebraError::ParentMismatch { .. } => failed(format!(
            "the matrix and vector rings are not recognized as the same: their UUIDs differ, so the files \
             were not saved in one session or do not share a context ({e})"
        )),
        other => failed(other),
    })?;
    if product.is_empty() {
        return Err(failed("the product is an empty vector, which cannot be saved"));
    }
    s.save(&AlgebraValue::vector_of(product)).map_err(failed)
}
