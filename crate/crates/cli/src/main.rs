//! Command-line front end: build fields, inspect graph structure, emit
//! curvature records, and run the cross-checking sweep.
//!
//! Exit codes: 0 success, 2 invalid input, 3 internal consistency failure
//! (independently computed answers disagree), 4 I/O error.

use std::path::{Path, PathBuf};
use std::process::exit;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use paley_core::field_cache::{build_field_cached, CacheError};
use paley_core::paley_graph::connected_by_divisibility;
use paley_core::report::{run_sweep, sample_edges};
use paley_core::{
    build_field, build_graph, CurvatureRecord, FieldStructure, PaleyGraph, ReportFormat,
    SweepConfig,
};

const EXIT_INVALID: i32 = 2;
const EXIT_INCONSISTENT: i32 = 3;
const EXIT_IO: i32 = 4;

#[derive(Parser)]
#[command(
    name = "paley",
    version,
    about = "Generalized Paley graphs: fields, connectivity, matchings, exact curvature"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build GF(p^n) and print its modulus and primitive element
    Field {
        /// Odd prime characteristic
        #[arg(long)]
        p: usize,
        /// Extension degree
        #[arg(long)]
        n: u32,
        /// Plain-text cache file to reuse or extend
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Build P(q, k) and print connectivity and component structure
    Graph {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: u32,
        /// Power whose residues form the connection set
        #[arg(long)]
        k: usize,
        /// Print the component report as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Compute curvature records over edges of P(q, k)
    Curvature {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: usize,
        /// Edge selection: "all" or "sample:N"
        #[arg(long, conflicts_with = "edge")]
        edges: Option<String>,
        /// One explicit edge "X,Y"
        #[arg(long)]
        edge: Option<String>,
        /// Also run the exact optimal-transport oracle per edge
        #[arg(long)]
        oracle: bool,
        /// Output format: csv or json
        #[arg(long, default_value = "csv")]
        format: String,
        /// Write to a file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sweep all admissible instances in a range and cross-check every claim
    Verify {
        /// key=value config file; flags below override it
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inclusive prime range "lo..hi"
        #[arg(long)]
        p_range: Option<String>,
        /// Inclusive degree range "lo..hi"
        #[arg(long)]
        n_range: Option<String>,
        /// Inclusive power range "lo..hi"
        #[arg(long)]
        k_range: Option<String>,
        /// Largest field size to touch
        #[arg(long)]
        q_cap: Option<usize>,
        /// Extra sampled edges per instance for curvature checks
        #[arg(long)]
        edge_sample: Option<usize>,
        /// Write the report to a file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
        /// Report format: csv or json
        #[arg(long)]
        format: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Field { p, n, cache } => cmd_field(p, n, cache.as_deref()),
        Cmd::Graph { p, n, k, json } => cmd_graph(p, n, k, json),
        Cmd::Curvature {
            p,
            n,
            k,
            edges,
            edge,
            oracle,
            format,
            output,
        } => cmd_curvature(p, n, k, edges, edge, oracle, &format, output.as_deref()),
        Cmd::Verify {
            config,
            p_range,
            n_range,
            k_range,
            q_cap,
            edge_sample,
            output,
            format,
        } => cmd_verify(
            config.as_deref(),
            [
                ("p_range", p_range),
                ("n_range", n_range),
                ("k_range", k_range),
                ("q_cap", q_cap.map(|v| v.to_string())),
                ("edge_sample", edge_sample.map(|v| v.to_string())),
                ("format", format),
            ],
            output,
        ),
    };
    exit(code);
}

fn invalid(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_INVALID
}

fn io_failure(msg: impl std::fmt::Display) -> i32 {
    eprintln!("i/o error: {msg}");
    EXIT_IO
}

/// Little-endian coefficients rendered as a readable polynomial in x.
fn render_poly(coeffs: &[usize]) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let term = match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}x^{i}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

fn cmd_field(p: usize, n: u32, cache: Option<&Path>) -> i32 {
    let field = match cache {
        Some(path) => match build_field_cached(p, n, path) {
            Ok(f) => f,
            Err(CacheError::Field(e)) => return invalid(e),
            Err(CacheError::Io(e)) => return io_failure(e),
        },
        None => match build_field(p, n) {
            Ok(f) => f,
            Err(e) => return invalid(e),
        },
    };
    print_field(&field);
    0
}

fn print_field(f: &FieldStructure) {
    println!("q = {}^{} = {}", f.p(), f.n(), f.q());
    println!(
        "modulus = {}  (coefficients {:?}, constant first)",
        render_poly(f.modulus_coeffs()),
        f.modulus_coeffs()
    );
    let theta = f.theta();
    println!(
        "theta = element {} = {}  (multiplicative order {})",
        theta,
        render_poly(&f.coeffs(theta)),
        f.element_order(theta).expect("theta is a unit")
    );
}

fn build(p: usize, n: u32, k: usize) -> Result<PaleyGraph, i32> {
    let f = build_field(p, n).map_err(|e| invalid(e))?;
    build_graph(Arc::new(f), k).map_err(|e| invalid(e))
}

fn cmd_graph(p: usize, n: u32, k: usize, json: bool) -> i32 {
    let g = match build(p, n, k) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let report = g.component_report();
    if json {
        println!("{}", report.to_json());
    } else {
        println!(
            "P({}, {}): degree {}, {} edges",
            g.q(),
            k,
            g.connection().len(),
            g.edge_count()
        );
        println!(
            "connected: {} (search), {} (divisibility)",
            report.connected,
            connected_by_divisibility(p, n, k)
        );
        if !report.connected {
            println!(
                "components: {} copies of P({}^{}, {}) on {} vertices each",
                report.component_count,
                p,
                report.a,
                report.k_prime,
                g.q() / report.component_count
            );
        }
    }
    if report.connected != connected_by_divisibility(p, n, k) {
        eprintln!("inconsistency: search and divisibility verdicts disagree");
        return EXIT_INCONSISTENT;
    }
    if let Err(detail) = g.check_component_structure(&report) {
        eprintln!("inconsistency: {detail}");
        return EXIT_INCONSISTENT;
    }
    0
}

fn parse_edge_list(
    g: &PaleyGraph,
    edges: Option<String>,
    edge: Option<String>,
) -> Result<Vec<(usize, usize)>, String> {
    if let Some(selector) = edge {
        let (x, y) = selector
            .split_once(',')
            .ok_or_else(|| format!("--edge wants \"X,Y\", got {selector:?}"))?;
        let x: usize = x.trim().parse().map_err(|_| format!("bad vertex {x:?}"))?;
        let y: usize = y.trim().parse().map_err(|_| format!("bad vertex {y:?}"))?;
        return Ok(vec![(x, y)]);
    }
    let selector = edges.unwrap_or_else(|| "all".to_string());
    if selector == "all" {
        let mut out = Vec::with_capacity(g.edge_count());
        for x in 0..g.q() {
            for &s in g.connection() {
                let y = g.field().add(x, s);
                if y > x {
                    out.push((x, y));
                }
            }
        }
        return Ok(out);
    }
    if let Some(count) = selector.strip_prefix("sample:") {
        let count: usize = count
            .parse()
            .map_err(|_| format!("bad sample count {count:?}"))?;
        if count == 0 {
            return Err("sample count must be at least 1".to_string());
        }
        let mut sampled = sample_edges(g, count - 1);
        sampled.sort_unstable();
        return Ok(sampled);
    }
    Err(format!("--edges wants \"all\" or \"sample:N\", got {selector:?}"))
}

fn cmd_curvature(
    p: usize,
    n: u32,
    k: usize,
    edges: Option<String>,
    edge: Option<String>,
    oracle: bool,
    format: &str,
    output: Option<&Path>,
) -> i32 {
    let format: ReportFormat = match format.parse() {
        Ok(f) => f,
        Err(e) => return invalid(e),
    };
    let g = match build(p, n, k) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let pairs = match parse_edge_list(&g, edges, edge) {
        Ok(pairs) => pairs,
        Err(e) => return invalid(e),
    };
    let mut records = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        match CurvatureRecord::compute(&g, x, y, oracle) {
            Ok(r) => records.push(r),
            Err(e) => return invalid(e),
        }
    }
    if let Some(r) = records.iter().find(|r| !r.formula_claimed) {
        eprintln!(
            "note: the containment hypothesis fails for k = {}, so the closed formula \
             is advisory on P({}, {})",
            r.k, r.q, r.k
        );
    }
    let body = match format {
        ReportFormat::Csv => {
            let mut out = String::from(CurvatureRecord::CSV_HEADER);
            out.push('\n');
            for r in &records {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
            out
        }
        ReportFormat::Json => {
            let rows: Vec<String> = records.iter().map(|r| format!("  {}", r.to_json())).collect();
            format!("[\n{}\n]\n", rows.join(",\n"))
        }
    };
    if let Some(path) = output {
        if let Err(e) = std::fs::write(path, &body) {
            return io_failure(format!("{}: {e}", path.display()));
        }
    } else {
        print!("{body}");
    }
    let disagreements = records.iter().filter(|r| !r.agree).count();
    if disagreements > 0 {
        eprintln!(
            "inconsistency: {disagreements} of {} records disagree across claimed routes",
            records.len()
        );
        return EXIT_INCONSISTENT;
    }
    0
}

fn cmd_verify(
    config: Option<&Path>,
    overrides: [(&str, Option<String>); 6],
    output: Option<PathBuf>,
) -> i32 {
    let mut cfg = match config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return io_failure(format!("{}: {e}", path.display())),
            };
            match SweepConfig::from_key_value_text(&text) {
                Ok(cfg) => cfg,
                Err(e) => return invalid(format!("{}: {e}", path.display())),
            }
        }
        None => SweepConfig::default(),
    };
    for (key, val) in overrides {
        if let Some(val) = val {
            if let Err(e) = cfg.set(key, &val) {
                return invalid(e);
            }
        }
    }
    if let Some(path) = output {
        cfg.output_path = Some(path);
    }
    let report = run_sweep(&cfg);
    let s = report.summary;
    let rendered = report.render(cfg.format);
    match &cfg.output_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                return io_failure(format!("{}: {e}", path.display()));
            }
            eprintln!("report written to {}", path.display());
        }
        None => print!("{rendered}"),
    }
    eprintln!(
        "instances {}, passed {}, failed {}, skipped {}",
        s.instances, s.passed, s.failed, s.skipped
    );
    if s.failed > 0 {
        EXIT_INCONSISTENT
    } else {
        0
    }
}
