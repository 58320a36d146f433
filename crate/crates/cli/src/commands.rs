use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use kakeya_core::bounds::{dim2_known_bound, theorem1_bound};
use kakeya_core::field::{parse_field, prime_power, FieldSpec};
use kakeya_core::geometry::enumerate_directions;
use kakeya_core::kakeya::{build_union, incidence_stats, is_kakeya, random_assignment, Failure, Witness};
use kakeya_core::oracle::run_selftest;
use kakeya_core::pointset::PointSetFile;
use kakeya_core::search::{greedy_upper_bound, minimal_kakeya_exact_with, tightness_report, SearchOptions};
use kakeya_core::{OffsetAssignment, PointSet, Verdict};

/// Version tag carried by every JSON document the CLI emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits in decimal renderings of exact rationals.
const DECIMAL_DIGITS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "kakeya", version, about = "Exact computations with hyperplane Kakeya sets over finite fields")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the lower bounds over a grid of (q, n).
    Bound {
        /// Field orders: "4", "2..9" (inclusive) or "2,3,5".
        #[arg(long)]
        q: String,
        /// Dimensions, same syntax as --q.
        #[arg(long)]
        n: String,
    },
    /// List the hyperplane directions of F_q^n in canonical order.
    Directions {
        /// Field as "p^k" or a prime power q.
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: usize,
    },
    /// Check whether a point-set file is Kakeya.
    Verify {
        file: PathBuf,
        /// Plane dimension; defaults to hyperplanes (n - 1).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Build a union of one hyperplane per direction and write it as a point-set file.
    Construct {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: usize,
        /// Comma-separated levels in direction order.
        #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
        levels: Option<String>,
        /// Draw the levels uniformly from a seeded generator.
        #[arg(long)]
        seed: Option<u64>,
        /// Include the redundant coordinate list.
        #[arg(long)]
        points: bool,
    },
    /// Exact incidence statistics for a Kakeya set.
    Stats {
        file: PathBuf,
        /// Levels file (JSON list, or {"levels": [...]}); defaults to the verifier's witness.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Minimum Kakeya set size by branch-and-bound.
    Search {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: usize,
        /// Maximum number of branch nodes.
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Fix the levels of the standard-basis directions to 0.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        normalize: bool,
        /// Only run the randomized greedy upper bound.
        #[arg(long)]
        heuristic_only: bool,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the lower bound with exact minima over a grid.
    Tightness {
        #[arg(long)]
        q: String,
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        heuristic_only: bool,
    },
    /// Run the brute-force oracle checks at fixed small sizes.
    Selftest,
}

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, code: 0 }
    }
}

pub fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn with_schema(mut value: serde_json::Value) -> serde_json::Value {
    if let Some(obj) = value.as_object_mut() {
        obj.insert("schema".into(), json!(SCHEMA_VERSION));
    }
    value
}

/// Parses "a", "a..b" (inclusive) or "a,b,c".
pub fn parse_grid(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().with_context(|| format!("bad range start in {text:?}"))?;
        let hi: u64 = hi.trim().parse().with_context(|| format!("bad range end in {text:?}"))?;
        if lo > hi {
            bail!("empty range {text:?}");
        }
        Ok((lo..=hi).collect())
    } else {
        text.split(',')
            .map(|t| t.trim().parse().with_context(|| format!("bad value {t:?}")))
            .collect()
    }
}

fn field_arg(text: &str) -> Result<FieldSpec> {
    parse_field(text).map_err(|e| anyhow!("invalid --field {text:?}: {e}"))
}

fn load_point_set(path: &Path) -> Result<(FieldSpec, PointSet)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = PointSetFile::from_json(&text)?;
    Ok(file.decode()?)
}

fn parse_levels(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().with_context(|| format!("bad level {t:?}")))
        .collect()
}

fn load_levels(path: &Path) -> Result<Vec<u32>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("witness file is not JSON")?;
    let list = value.get("levels").unwrap_or(&value);
    serde_json::from_value(list.clone()).context("witness must be a list of levels")
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Bound { q, n } => cmd_bound(format, q, n),
        Command::Directions { field, n } => cmd_directions(format, field, *n),
        Command::Verify { file, k } => cmd_verify(format, file, *k),
        Command::Construct { field, n, levels, seed, points } => {
            cmd_construct(field, *n, levels.as_deref(), *seed, *points)
        }
        Command::Stats { file, witness } => cmd_stats(format, file, witness.as_deref()),
        Command::Search { field, n, budget, workers, normalize, heuristic_only, restarts, seed } => {
            let opts = SearchOptions { node_budget: *budget, workers: *workers, normalize: *normalize };
            cmd_search(format, field, *n, &opts, *heuristic_only, *restarts, *seed)
        }
        Command::Tightness { q, n, budget, workers, heuristic_only } => {
            let opts = SearchOptions { node_budget: *budget, workers: *workers, normalize: true };
            cmd_tightness(format, q, n, &opts, *heuristic_only)
        }
        Command::Selftest => cmd_selftest(format),
    }
}

#[derive(Serialize)]
struct BoundRow {
    q: u64,
    n: u64,
    numerator: String,
    denominator: String,
    decimal: String,
    ceiling: String,
    dim2_known_bound: Option<String>,
}

fn cmd_bound(format: Format, q: &str, n: &str) -> Result<Outcome> {
    let qs = parse_grid(q)?;
    let ns = parse_grid(n)?;
    if let Some(&bad) = qs.iter().find(|&&q| prime_power(q).is_none()) {
        bail!("q = {bad} is not a prime power");
    }
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        bail!("n = {bad} is outside the bound's range (n >= 2)");
    }
    let mut rows = Vec::new();
    for &q in &qs {
        for &n in &ns {
            let b = theorem1_bound(q, n as usize)?;
            rows.push(BoundRow {
                q,
                n,
                numerator: b.numer().to_string(),
                denominator: b.denom().to_string(),
                decimal: b.to_decimal(DECIMAL_DIGITS),
                ceiling: b.ceil().to_string(),
                dim2_known_bound: (n == 2).then(|| dim2_known_bound(q).map(|d| d.to_string())).transpose()?,
            });
        }
    }
    let text = match format {
        Format::Json => to_json(&json!({ "schema": SCHEMA_VERSION, "rows": rows })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["q", "n", "numerator", "denominator", "decimal", "ceiling"])?;
            for r in &rows {
                w.write_record([
                    r.q.to_string(),
                    r.n.to_string(),
                    r.numerator.clone(),
                    r.denominator.clone(),
                    r.decimal.clone(),
                    r.ceiling.clone(),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Text => {
            let mut s = format!("{:>4} {:>3} {:>24} {:>12} {:>32}  {}\n", "q", "n", "bound", "ceiling", "decimal", "q(q+1)/2");
            for r in &rows {
                let exact = if r.denominator == "1" {
                    r.numerator.clone()
                } else {
                    format!("{}/{}", r.numerator, r.denominator)
                };
                s += &format!(
                    "{:>4} {:>3} {:>24} {:>12} {:>32}  {}\n",
                    r.q,
                    r.n,
                    exact,
                    r.ceiling,
                    format!("{} (approx)", r.decimal),
                    r.dim2_known_bound.as_deref().unwrap_or("-"),
                );
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_directions(format: Format, field: &str, n: usize) -> Result<Outcome> {
    let field = field_arg(field)?;
    let dirs = enumerate_directions(&field, n)?;
    let text = match format {
        Format::Json => to_json(&json!({ "schema": SCHEMA_VERSION, "q": field.q(), "n": n, "count": dirs.len(), "directions": dirs })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["index".to_string()];
            header.extend((0..n).map(|i| format!("c{i}")));
            w.write_record(&header)?;
            for (i, d) in dirs.iter().enumerate() {
                let mut rec = vec![i.to_string()];
                rec.extend(d.normal().iter().map(|c| c.to_string()));
                w.write_record(&rec)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Text => dirs.iter().enumerate().map(|(i, d)| format!("#{i} {:?}\n", d.normal())).collect(),
    };
    Ok(Outcome::ok(text))
}

fn cmd_verify(format: Format, file: &Path, k: Option<usize>) -> Result<Outcome> {
    let (field, set) = load_point_set(file)?;
    let verdict = is_kakeya(&field, &set, k)?;
    let code = if verdict.is_kakeya() { 0 } else { 1 };
    let text = match format {
        Format::Json | Format::Csv => to_json(&with_schema(json!({
            "kakeya": verdict.is_kakeya(),
            "set_size": set.len(),
            "witness": verdict.assignment().map(|a| a.levels()),
            "verdict": verdict,
        }))),
        Format::Text => match &verdict {
            Verdict::Kakeya(Witness::Hyperplanes(a)) => {
                format!("KAKEYA\nwitness levels ({} directions): {:?}\n", a.len(), a.levels())
            }
            Verdict::Kakeya(Witness::Planes(ws)) => {
                let mut s = format!("KAKEYA\nwitness cosets ({} directions):\n", ws.len());
                for w in ws {
                    s += &format!("  basis {:?} + {:?}\n", w.direction.rows(), w.representative.coords);
                }
                s
            }
            Verdict::NotKakeya(Failure::Hyperplane { index, direction }) => {
                format!("NOT KAKEYA\nfailing direction #{index}: normal {:?}\n", direction.normal())
            }
            Verdict::NotKakeya(Failure::Plane(basis)) => {
                format!("NOT KAKEYA\nfailing direction: basis {:?}\n", basis.rows())
            }
        },
    };
    Ok(Outcome { text, code })
}

fn cmd_construct(field: &str, n: usize, levels: Option<&str>, seed: Option<u64>, points: bool) -> Result<Outcome> {
    let field = field_arg(field)?;
    let assignment = match (levels, seed) {
        (Some(levels), _) => OffsetAssignment::new(&field, n, parse_levels(levels)?)?,
        (None, Some(seed)) => random_assignment(&field, n, seed)?,
        (None, None) => bail!("either --levels or --seed is required"),
    };
    let set = build_union(&field, n, &assignment)?;
    let mut text = set.to_file(&field, points).to_json();
    text.push('\n');
    Ok(Outcome::ok(text))
}

fn cmd_stats(format: Format, file: &Path, witness: Option<&Path>) -> Result<Outcome> {
    let (field, set) = load_point_set(file)?;
    let assignment = match witness {
        Some(path) => OffsetAssignment::new(&field, set.n(), load_levels(path)?)?,
        None => match is_kakeya(&field, &set, None)? {
            Verdict::Kakeya(Witness::Hyperplanes(a)) => a,
            _ => {
                return Ok(Outcome { text: "NOT KAKEYA: no hyperplane witness exists\n".into(), code: 1 });
            }
        },
    };
    let r = incidence_stats(&field, &set, &assignment)?;
    let text = match format {
        Format::Json | Format::Csv => to_json(&json!({
            "schema": SCHEMA_VERSION,
            "q": r.q,
            "n": r.n,
            "s_count": r.s_count,
            "i_count": r.i_count,
            "w_count": r.w_count,
            "w_same_direction": r.w_same_direction,
            "w_distinct_directions": r.w_distinct_directions,
            "w_count_brute": r.w_count_brute,
            "cs_bound": r.cs_bound_unreduced(),
            "cs_bound_reduced": r.cs_bound.to_string(),
            "cs_bound_decimal": r.cs_bound.to_decimal(DECIMAL_DIGITS),
            "set_size": r.set_size,
            "witness": assignment,
        })),
        Format::Text => format!(
            "|S| = {}\n|I| = {}\n|W| = {} ({} same-direction + {} distinct-direction){}\n|I|^2/|W| = {} = {} ~ {} (approx)\n|E| = {}\n",
            r.s_count,
            r.i_count,
            r.w_count,
            r.w_same_direction,
            r.w_distinct_directions,
            r.w_count_brute.map(|b| format!(", triple enumeration {b}")).unwrap_or_default(),
            r.cs_bound_unreduced(),
            r.cs_bound,
            r.cs_bound.to_decimal(DECIMAL_DIGITS),
            r.set_size,
        ),
    };
    Ok(Outcome::ok(text))
}

fn cmd_search(
    format: Format,
    field: &str,
    n: usize,
    opts: &SearchOptions,
    heuristic_only: bool,
    restarts: usize,
    seed: u64,
) -> Result<Outcome> {
    let field = field_arg(field)?;
    let r = if heuristic_only {
        greedy_upper_bound(&field, n, restarts, seed)?
    } else {
        minimal_kakeya_exact_with(&field, n, opts)?
    };
    let code = if r.proof_of_optimality || heuristic_only { 0 } else { 3 };
    let text = match format {
        Format::Json | Format::Csv => to_json(&with_schema(serde_json::to_value(&r)?)),
        Format::Text => format!(
            "q = {}, n = {}\nminimum size: {}{}\nlower bound: {} (ceiling {})\nnodes explored: {}\nwitness levels: {:?}\n",
            r.q,
            r.n,
            r.min_size,
            if r.proof_of_optimality { " (optimal)" } else { " (upper bound, optimality not proven)" },
            r.lower_bound_used,
            r.lower_bound_used.ceil(),
            r.nodes_explored,
            r.witness.levels(),
        ),
    };
    Ok(Outcome { text, code })
}

fn cmd_tightness(format: Format, q: &str, n: &str, opts: &SearchOptions, heuristic_only: bool) -> Result<Outcome> {
    let qs = parse_grid(q)?;
    let ns = parse_grid(n)?;
    let grid: Vec<(u64, usize)> = qs.iter().flat_map(|&q| ns.iter().map(move |&n| (q, n as usize))).collect();
    let cells = tightness_report(&grid, opts, heuristic_only);
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let text = match format {
        Format::Json => to_json(&json!({ "schema": SCHEMA_VERSION, "cells": cells })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["q", "n", "bound", "ceiling", "best_size", "gap", "optimal", "status"])?;
            for c in &cells {
                w.write_record([
                    c.q.to_string(),
                    c.n.to_string(),
                    opt(c.bound.as_ref().map(|b| b.to_string())),
                    opt(c.ceiling.clone()),
                    opt(c.best_size.map(|s| s.to_string())),
                    opt(c.gap.map(|g| g.to_string())),
                    c.optimal.to_string(),
                    format!("{:?}", c.status).to_lowercase(),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Text => {
            let mut s = format!("{:>4} {:>3} {:>12} {:>8} {:>8} {:>5}  {}\n", "q", "n", "bound", "ceiling", "best", "gap", "status");
            for c in &cells {
                s += &format!(
                    "{:>4} {:>3} {:>12} {:>8} {:>8} {:>5}  {:?}{}\n",
                    c.q,
                    c.n,
                    opt(c.bound.as_ref().map(|b| b.to_string())),
                    opt(c.ceiling.clone()),
                    opt(c.best_size.map(|s| s.to_string())),
                    opt(c.gap.map(|g| g.to_string())),
                    c.status,
                    c.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default(),
                );
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_selftest(format: Format) -> Result<Outcome> {
    let checks = run_selftest();
    let all = checks.iter().all(|c| c.passed);
    let text = match format {
        Format::Json | Format::Csv => to_json(&json!({ "schema": SCHEMA_VERSION, "passed": all, "checks": checks })),
        Format::Text => checks
            .iter()
            .map(|c| format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect(),
    };
    Ok(Outcome { text, code: if all { 0 } else { 1 } })
}
