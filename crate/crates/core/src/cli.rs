//! Command-line surface: argument parsing, JSON input, and the report
//! printed for each subcommand.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cartan::{CartanError, CartanMatrix, IndexSet, TypeKind};
use crate::cech::{e2_dims_with, CechError};
use crate::gradedlat::DimensionTable;
use crate::invariants::InvariantEngine;
use crate::mvss::{
    borel_image_dims, cohomology_with, conjecture_sum_check_with, format_matrix, prop51_change_of_basis, prop51_predicted_dims,
    MvssError,
};
use crate::weyl::{enumerate_subgroup, WeylError, DEFAULT_ORDER_CAP};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed input: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Mvss(#[from] MvssError),
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("bad subset {text:?}: {reason}")]
    Subset { text: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "kaccoh", version, about = "Rational cohomology of Kac–Moody classifying spaces from a Cartan matrix")]
pub struct Cli {
    /// JSON file `{"matrix": [[...], ...]}`; stdin when omitted or `-`.
    #[arg(short, long, global = true)]
    pub input: Option<PathBuf>,
    /// Largest cohomological degree reported.
    #[arg(long, default_value_t = 24, global = true)]
    pub max_degree: usize,
    /// Order of the maximal simplices, e.g. `1,2;1,3;2,3` (1-based).
    #[arg(long, global = true)]
    pub order: Option<String>,
    /// Largest Weyl group enumerated for the Molien cross-check.
    #[arg(long, default_value_t = DEFAULT_ORDER_CAP, global = true)]
    pub cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Type of the matrix and of its indecomposable blocks.
    Classify,
    /// Finite-type subsets and the maximal ones.
    Category,
    /// Dimensions of the invariants `P_J`.
    Invariants {
        /// Comma-separated 1-based indices; empty for all of `P`.
        #[arg(long, allow_hyphen_values = true)]
        subset: String,
    },
    /// Items of the inductive algorithm with their dimension tables.
    Cohomology,
    /// Compares the algorithm against the E_2 page of the Čech complex.
    OracleCheck,
    /// Residual of `P − (P_1 + … + P_n)` by polynomial degree.
    Conjecture,
    /// Image of the Borel map, by two methods.
    Borel,
    /// Change of weight basis splitting off `A_I`.
    Prop51 {
        #[arg(long, allow_hyphen_values = true)]
        subset: String,
    },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub command: Command,
    pub max_degree: usize,
    pub order: Option<String>,
    pub cap: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            input: c.input,
            command: c.command,
            max_degree: c.max_degree,
            order: c.order,
            cap: c.cap,
            format: c.format,
            output: c.output,
        }
    }
}

/// The rendered report and whether the run counts as a success.
#[derive(Clone, Debug)]
pub struct Report {
    pub body: String,
    pub ok: bool,
}

#[derive(Deserialize)]
struct Input {
    matrix: Vec<Vec<i64>>,
}

pub fn parse_matrix(text: &str) -> Result<CartanMatrix, CliError> {
    let input: Input = serde_json::from_str(text)?;
    Ok(CartanMatrix::validate(&input.matrix)?)
}

/// `"1,3"` → `{0,2}`. Also accepts `"13"` when every label is one digit.
pub fn parse_subset(text: &str, n: usize) -> Result<IndexSet, CliError> {
    let bad = |reason: String| CliError::Subset { text: text.to_string(), reason };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(IndexSet::EMPTY);
    }
    let parts: Vec<&str> = if trimmed.contains(',') {
        trimmed.split(',').map(str::trim).collect()
    } else {
        trimmed.split("").filter(|s| !s.is_empty()).collect()
    };
    let mut set = IndexSet::EMPTY;
    for p in parts {
        let label: usize = p.parse().map_err(|_| bad(format!("{p:?} is not an index")))?;
        if label == 0 || label > n {
            return Err(bad(format!("index {label} out of range 1..={n}")));
        }
        if set.contains(label - 1) {
            return Err(bad(format!("index {label} repeated")));
        }
        set = set.insert(label - 1);
    }
    Ok(set)
}

pub fn parse_order(text: &str, n: usize) -> Result<Vec<IndexSet>, CliError> {
    text.split(';').map(|s| parse_subset(s, n)).collect()
}

fn labels(sets: &[IndexSet]) -> Value {
    json!(sets.iter().map(|s| s.labels()).collect::<Vec<_>>())
}

fn list(sets: &[IndexSet]) -> String {
    sets.iter().map(|s| if s.is_empty() { "∅".to_string() } else { s.to_string() }).collect::<Vec<_>>().join(" ")
}

/// Aligned rows of numbers under a header of column labels.
fn grid(corner: &str, columns: &[String], rows: &[(String, Vec<String>)]) -> String {
    let lw = rows.iter().map(|r| r.0.chars().count()).chain([corner.chars().count()]).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns.len())
        .map(|k| rows.iter().filter_map(|r| r.1.get(k)).map(String::len).chain([columns[k].len()]).max().unwrap_or(1))
        .collect();
    let mut out = String::new();
    let line = |label: &str, cells: &[String]| {
        let mut s = format!("{label}{}", " ".repeat(lw - label.chars().count()));
        for (c, w) in cells.iter().zip(&widths) {
            let _ = write!(s, "  {c:>w$}");
        }
        s.trim_end().to_string()
    };
    out.push_str(&line(corner, columns));
    out.push('\n');
    for (label, cells) in rows {
        out.push_str(&line(label, cells));
        out.push('\n');
    }
    out
}

fn degree_grid(corner: &str, max_degree: usize, rows: &[(String, &DimensionTable)]) -> String {
    let columns: Vec<String> = (0..=max_degree).map(|d| d.to_string()).collect();
    let rows: Vec<(String, Vec<String>)> =
        rows.iter().map(|(l, t)| (l.clone(), t.0.iter().map(usize::to_string).collect())).collect();
    grid(corner, &columns, &rows)
}

fn classification(a: &CartanMatrix) -> Result<Value, CliError> {
    let label = a.classify();
    let mut blocks = Vec::new();
    for (set, kind) in &label.blocks {
        let mut b = json!({"indices": set.labels(), "type": kind.to_string()});
        if *kind == TypeKind::Finite {
            let sub = a.submatrix(*set).expect("nonempty block");
            let dynkin = sub.dynkin_type()?;
            b["dynkin"] = json!(dynkin[0].label);
        }
        blocks.push(b);
    }
    Ok(json!({"type": label.kind.to_string(), "decomposable": label.decomposable, "blocks": blocks}))
}

fn classification_text(v: &Value) -> String {
    let mut s = format!("type: {}", v["type"].as_str().unwrap_or(""));
    if v["decomposable"].as_bool() == Some(true) {
        s.push_str(" (decomposable)");
    }
    s.push('\n');
    for b in v["blocks"].as_array().into_iter().flatten() {
        let idx: Vec<String> = b["indices"].as_array().into_iter().flatten().map(|x| x.to_string()).collect();
        let _ = write!(s, "  block {{{}}}: {}", idx.join(","), b["type"].as_str().unwrap_or(""));
        if let Some(d) = b["dynkin"].as_str() {
            let _ = write!(s, " {d}");
        }
        s.push('\n');
    }
    s
}

fn emit(format: Format, value: Value, text: String, ok: bool) -> Report {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
        Format::Table => text,
    };
    Report { body, ok }
}

pub fn read_input(config: &RunConfig) -> Result<String, CliError> {
    match &config.input {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|source| CliError::Read { path: p.display().to_string(), source })
        }
        _ => std::io::read_to_string(std::io::stdin()).map_err(|source| CliError::Read { path: "stdin".into(), source }),
    }
}

pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    let a = parse_matrix(&read_input(config)?)?;
    run(config, &a)
}

/// Runs a subcommand on an already validated matrix.
pub fn run(config: &RunConfig, a: &CartanMatrix) -> Result<Report, CliError> {
    let n = a.rank();
    let dmax = config.max_degree;
    let order = config.order.as_deref().map(|o| parse_order(o, n)).transpose()?;
    let engine = || Arc::new(InvariantEngine::new(a.clone()));
    match &config.command {
        Command::Classify => {
            let v = classification(a)?;
            let text = classification_text(&v);
            Ok(emit(config.format, v, text, true))
        }
        Command::Category => {
            let cat = a.finite_subsets();
            let v = json!({"rank": n, "simplices": labels(&cat.simplices), "maximal": labels(&cat.maximal)});
            let text = format!(
                "simplices ({}): {}\nmaximal ({}): {}\n",
                cat.simplices.len(),
                list(&cat.simplices),
                cat.maximal.len(),
                list(&cat.maximal)
            );
            Ok(emit(config.format, v, text, true))
        }
        Command::Invariants { subset } => {
            let j = parse_subset(subset, n)?;
            let eng = engine();
            let poly = eng.dims(j, dmax / 2);
            let dims = DimensionTable::from_polynomial(&poly, 0, dmax);
            let mut v = json!({"subset": j.labels(), "dims": dims});
            let name = if j.is_empty() { "P".to_string() } else { format!("P_{j}") };
            let mut rows = vec![(name, &dims)];
            let molien_table;
            let mut ok = true;
            if a.is_finite_subset(j) {
                match enumerate_subgroup(a, j, config.cap) {
                    Ok(w) => {
                        let m = w.molien_dims(dmax / 2);
                        ok = m == poly;
                        molien_table = DimensionTable::from_polynomial(&m, 0, dmax);
                        v["weyl_order"] = json!(w.order());
                        v["molien"] = json!(molien_table);
                        v["molien_agrees"] = json!(ok);
                        rows.push(("Molien".to_string(), &molien_table));
                    }
                    Err(WeylError::CapExceeded { .. }) => v["molien"] = Value::Null,
                    Err(e) => return Err(e.into()),
                }
            }
            let text = degree_grid("degree", dmax, &rows);
            Ok(emit(config.format, v, text, ok))
        }
        Command::Cohomology => {
            let eng = engine();
            let r = cohomology_with(&eng, dmax, order.as_deref())?;
            let class = classification(a)?;
            let maximal = a.finite_subsets().maximal;
            let items: Vec<Value> = r
                .items
                .iter()
                .map(|i| {
                    json!({
                        "shift": i.item.shift,
                        "expr": i.item.to_string(),
                        "dims": i.dims,
                        "zero_up_to_cutoff": i.zero_up_to_cutoff,
                        "trivially_zero": i.trivially_zero,
                    })
                })
                .collect();
            let by_shift: serde_json::Map<String, Value> = r.by_shift.iter().map(|(k, t)| (k.to_string(), json!(t))).collect();
            let v = json!({
                "classification": class,
                "maximal": labels(&maximal),
                "order": labels(&r.order_used),
                "max_degree": dmax,
                "items": items,
                "total": r.total,
                "by_shift": by_shift,
            });
            let mut text = classification_text(&class);
            let _ = writeln!(text, "maximal simplices: {}", list(&maximal));
            let _ = writeln!(text, "order: {}", list(&r.order_used));
            let trivial = r.items.iter().filter(|i| i.trivially_zero).count();
            let _ = writeln!(text, "items: {} ({} trivially zero omitted)\n", r.items.len(), trivial);
            let mut rows: Vec<(String, &DimensionTable)> =
                r.items.iter().filter(|i| !i.trivially_zero).map(|i| (i.item.to_string(), &i.dims)).collect();
            rows.push(("total".to_string(), &r.total));
            text.push_str(&degree_grid("degree", dmax, &rows));
            Ok(emit(config.format, v, text, true))
        }
        Command::OracleCheck => {
            let eng = engine();
            let r = cohomology_with(&eng, dmax, order.as_deref())?;
            let e2 = e2_dims_with(&eng, &r.order_used, dmax)?;
            let mut columns = Vec::new();
            let mut mismatches = Vec::new();
            let mut rows: Vec<(String, DimensionTable)> = Vec::new();
            for col in 0..e2.d {
                let m = r.shift_table(col);
                let c = e2.column(col);
                let diff: Vec<usize> = (0..=dmax).filter(|&k| m.get(k) != c.get(k)).collect();
                for &k in &diff {
                    mismatches.push(format!("column {col} degree {k}: algorithm {} vs E_2 {}", m.get(k), c.get(k)));
                }
                columns.push(json!({"r": col, "algorithm": m, "e2": c, "match": diff.is_empty()}));
                rows.push((format!("r={col} algorithm"), m));
                rows.push((format!("r={col} E_2"), c));
            }
            let ok = mismatches.is_empty() && r.total == e2.total();
            rows.push(("total algorithm".to_string(), r.total.clone()));
            rows.push(("total E_2".to_string(), e2.total()));
            let v = json!({"match": ok, "max_degree": dmax, "order": labels(&r.order_used), "columns": columns, "total": r.total, "mismatches": mismatches});
            let mut text = if ok { format!("MATCH through degree {dmax}\n") } else { format!("MISMATCH through degree {dmax}\n") };
            for m in &mismatches {
                let _ = writeln!(text, "  {m}");
            }
            text.push('\n');
            let refs: Vec<(String, &DimensionTable)> = rows.iter().map(|(l, t)| (l.clone(), t)).collect();
            text.push_str(&degree_grid("degree", dmax, &refs));
            Ok(emit(config.format, v, text, ok))
        }
        Command::Conjecture => {
            let eng = engine();
            let residual = conjecture_sum_check_with(&eng, dmax / 2);
            let zero = residual.iter().all(|&x| x == 0);
            let v = json!({"max_poly_degree": dmax / 2, "residual": residual, "zero": zero});
            let columns: Vec<String> = (0..residual.len()).map(|d| d.to_string()).collect();
            let mut text = grid("polynomial degree", &columns, &[("residual".to_string(), residual.iter().map(usize::to_string).collect())]);
            text.push_str(if zero { "P = P_1 + … + P_n through this degree\n" } else { "nonzero residual\n" });
            Ok(emit(config.format, v, text, true))
        }
        Command::Borel => {
            let dims = borel_image_dims(a, dmax)?;
            let v = json!({"dims": dims, "methods_agree": true});
            let mut text = degree_grid("degree", dmax, &[("P^W".to_string(), &dims)]);
            text.push_str("joint fixed points equal the intersection over maximal simplices\n");
            Ok(emit(config.format, v, text, true))
        }
        Command::Prop51 { subset } => {
            let i = parse_subset(subset, n)?;
            match prop51_change_of_basis(a, i) {
                None => {
                    let v = json!({"subset": i.labels(), "result": "inconsistent"});
                    Ok(emit(config.format, v, "inconsistent\n".to_string(), true))
                }
                Some(cb) => {
                    let c = format_matrix(&cb.c);
                    let predicted = prop51_predicted_dims(a, i, dmax / 2);
                    let actual = engine().dims(i, dmax / 2);
                    let agrees = predicted == actual;
                    let v = json!({
                        "subset": i.labels(),
                        "complement": cb.complement.labels(),
                        "c": c,
                        "block_triangular": cb.block_triangular,
                        "predicted_dims": predicted,
                        "dims": actual,
                        "dims_agree": agrees,
                    });
                    let mut text = format!("C ({} x {}):\n", cb.c.rows(), cb.c.cols());
                    for row in &c {
                        let _ = writeln!(text, "  [{}]", row.join(", "));
                    }
                    let _ = writeln!(text, "block triangular: {}", cb.block_triangular);
                    let columns: Vec<String> = (0..actual.len()).map(|d| d.to_string()).collect();
                    text.push_str(&grid(
                        "polynomial degree",
                        &columns,
                        &[
                            (format!("P_{i}"), actual.iter().map(usize::to_string).collect()),
                            ("predicted".to_string(), predicted.iter().map(usize::to_string).collect()),
                        ],
                    ));
                    Ok(emit(config.format, v, text, cb.block_triangular && agrees))
                }
            }
        }
    }
}

/// Sizes the global worker pool from `KACCOH_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("KACCOH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Entry point shared by the binary: returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    configure_threads();
    let config = RunConfig::from(cli);
    match execute(&config) {
        Ok(report) => {
            let written = match &config.output {
                Some(p) => std::fs::write(p, &report.body).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => {
                    print!("{}", report.body);
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
                Ok(()) if report.ok => 0,
                Ok(()) => 1,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
