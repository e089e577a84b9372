//! Parameter sweeps: enumerate every admissible instance in a range, run the
//! full battery of cross-checks (two connectivity routes, component
//! structure, cell balance, matching certificates against the augmenting
//! oracle, three-way curvature agreement, common-neighborhood constancy,
//! edge-transitivity spot checks), and emit a machine-readable report where
//! every failure carries a minimal reproduction.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::CurvatureRecord;
use crate::det_rng::SplitMix64;
use crate::finite_field::{build_field_with_cap, divisors, is_prime, DEFAULT_Q_CAP};
use crate::matching::{
    check_perfect_matching, edge_neighborhood, max_matching_size, perfect_matching_via_sorting,
    sort_cells, transport_matching,
};
use crate::paley_graph::{
    build_graph, connected_by_divisibility, sufficient_connectivity, PaleyGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format {other:?}; expected csv or json")),
        }
    }
}

/// Sweep ranges and output options. Ranges are inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub p_range: (usize, usize),
    pub n_range: (u32, u32),
    pub k_range: (usize, usize),
    pub q_cap: usize,
    pub edge_sample: usize,
    pub output_path: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            p_range: (3, 97),
            n_range: (1, 6),
            k_range: (1, 12),
            q_cap: 500,
            edge_sample: 10,
            output_path: None,
            format: ReportFormat::Csv,
        }
    }
}

impl SweepConfig {
    /// Parses a plain-text config: one `key=value` per line, `#` comments,
    /// range values written `lo..hi` (inclusive). Unknown keys are errors.
    pub fn from_key_value_text(text: &str) -> Result<SweepConfig, String> {
        let mut cfg = SweepConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| format!("line {lineno}: expected key=value, got {line:?}"))?;
            cfg.set(key.trim(), val.trim())
                .map_err(|e| format!("line {lineno}: {e}"))?;
        }
        Ok(cfg)
    }

    /// Sets one field by its config-file key. Shared between the file parser
    /// and command-line overrides.
    pub fn set(&mut self, key: &str, val: &str) -> Result<(), String> {
        match key {
            "p_range" => self.p_range = parse_range(val)?,
            "n_range" => {
                let (lo, hi) = parse_range(val)?;
                self.n_range = (lo as u32, hi as u32);
            }
            "k_range" => self.k_range = parse_range(val)?,
            "q_cap" => self.q_cap = val.parse().map_err(|_| format!("bad q_cap {val:?}"))?,
            "edge_sample" => {
                self.edge_sample = val
                    .parse()
                    .map_err(|_| format!("bad edge_sample {val:?}"))?
            }
            "output_path" => self.output_path = Some(PathBuf::from(val)),
            "format" => self.format = val.parse()?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}

fn parse_range(val: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = val
        .split_once("..")
        .ok_or_else(|| format!("range {val:?} must look like lo..hi (inclusive)"))?;
    let lo = lo
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("bad range start {lo:?}"))?;
    let hi = hi
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("bad range end {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {val:?}"));
    }
    Ok((lo, hi))
}

/// Admissible instances inside the config ranges: p an odd prime, q = p^n at
/// most q_cap, and k restricted to divisors of (q - 1)/2 so that q = 1 mod 2k.
pub fn enumerate_instances(cfg: &SweepConfig) -> Vec<(usize, u32, usize)> {
    let mut out = Vec::new();
    for p in cfg.p_range.0..=cfg.p_range.1 {
        if p == 2 || !is_prime(p) {
            continue;
        }
        for n in cfg.n_range.0.max(1)..=cfg.n_range.1 {
            let Some(q128) = (p as u128).checked_pow(n) else {
                break;
            };
            if q128 > cfg.q_cap as u128 {
                break;
            }
            let q = q128 as usize;
            for k in divisors((q - 1) / 2) {
                if k >= cfg.k_range.0 && k <= cfg.k_range.1 {
                    out.push((p, n, k));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl CheckStatus {
    fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skip => "skip",
        }
    }

    fn from_bool(ok: bool) -> CheckStatus {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }
}

/// Minimal reproduction of one failed check.
#[derive(Debug, Clone, Serialize)]
pub struct FailureRepro {
    pub check: String,
    pub p: usize,
    pub n: u32,
    pub k: usize,
    pub edge: Option<(usize, usize)>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceOutcome {
    pub p: usize,
    pub n: u32,
    pub k: usize,
    pub q: usize,
    pub connected: bool,
    /// Common-neighborhood size shared by all edges, when constant.
    pub nabla: Option<usize>,
    pub connectivity_agreement: CheckStatus,
    pub sufficient_conditions: CheckStatus,
    pub component_structure: CheckStatus,
    pub cell_balance: CheckStatus,
    pub matching: CheckStatus,
    pub curvature_agreement: CheckStatus,
    pub nabla_constancy: CheckStatus,
    pub edge_transitivity: CheckStatus,
    pub failures: Vec<FailureRepro>,
}

impl InstanceOutcome {
    fn checks(&self) -> [CheckStatus; 8] {
        [
            self.connectivity_agreement,
            self.sufficient_conditions,
            self.component_structure,
            self.cell_balance,
            self.matching,
            self.curvature_agreement,
            self.nabla_constancy,
            self.edge_transitivity,
        ]
    }

    pub fn failed(&self) -> bool {
        self.checks().iter().any(|&s| s == CheckStatus::Fail)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    /// No failures, but the sorting hypothesis did not apply.
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub instances: Vec<InstanceOutcome>,
    pub summary: Summary,
}

/// Deliberate defect switches for exercising the harness itself: a sweep run
/// with a fault enabled must report failures with usable reproductions.
#[derive(Debug, Clone, Copy, Default)]
pub struct FaultInjection {
    /// Treat balanced sorting cells as unbalanced and vice versa.
    pub negate_cell_balance: bool,
}

pub fn run_sweep(cfg: &SweepConfig) -> VerificationReport {
    run_sweep_with_faults(cfg, &FaultInjection::default())
}

pub fn run_sweep_with_faults(cfg: &SweepConfig, faults: &FaultInjection) -> VerificationReport {
    let instances = enumerate_instances(cfg);
    let outcomes: Vec<InstanceOutcome> = instances
        .par_iter()
        .map(|&(p, n, k)| run_instance(p, n, k, cfg, faults))
        .collect();
    let summary = summarize(&outcomes);
    VerificationReport {
        instances: outcomes,
        summary,
    }
}

fn summarize(outcomes: &[InstanceOutcome]) -> Summary {
    let failed = outcomes.iter().filter(|o| o.failed()).count();
    let skipped = outcomes
        .iter()
        .filter(|o| !o.failed() && o.cell_balance == CheckStatus::Skip)
        .count();
    Summary {
        instances: outcomes.len(),
        passed: outcomes.len() - failed - skipped,
        failed,
        skipped,
    }
}

fn run_instance(
    p: usize,
    n: u32,
    k: usize,
    cfg: &SweepConfig,
    faults: &FaultInjection,
) -> InstanceOutcome {
    let cap = cfg.q_cap.max(DEFAULT_Q_CAP);
    let field = Arc::new(build_field_with_cap(p, n, cap).expect("enumerated instance is valid"));
    let g = build_graph(field, k).expect("enumerated instance is admissible");
    let q = g.q();
    let mut failures: Vec<FailureRepro> = Vec::new();
    let mut fail = |failures: &mut Vec<FailureRepro>,
                    check: &str,
                    edge: Option<(usize, usize)>,
                    detail: String| {
        failures.push(FailureRepro {
            check: check.to_string(),
            p,
            n,
            k,
            edge,
            detail,
        });
    };

    // connectivity, twice
    let report = g.component_report();
    let theory = connected_by_divisibility(p, n, k);
    let connectivity_agreement = CheckStatus::from_bool(report.connected == theory);
    if connectivity_agreement == CheckStatus::Fail {
        fail(
            &mut failures,
            "connectivity_agreement",
            None,
            format!("BFS says {}, divisibility says {theory}", report.connected),
        );
    }

    // sufficient conditions may only ever point at connected graphs
    let suff = sufficient_connectivity(p, n, k);
    let sufficient_conditions = if suff.any() {
        let ok = report.connected;
        if !ok {
            fail(
                &mut failures,
                "sufficient_conditions",
                None,
                format!(
                    "condition fired (small_k={}, k_divides_n={}) on a disconnected graph",
                    suff.small_k, suff.k_divides_n
                ),
            );
        }
        CheckStatus::from_bool(ok)
    } else {
        CheckStatus::Skip
    };

    let component_structure = match g.check_component_structure(&report) {
        Ok(()) => CheckStatus::Pass,
        Err(detail) => {
            fail(&mut failures, "component_structure", None, detail);
            CheckStatus::Fail
        }
    };

    // sorting applies to the graph itself when connected, otherwise to the
    // reduced graph its components are copies of
    let reduced;
    let target: &PaleyGraph = if report.connected {
        &g
    } else {
        reduced = build_field_with_cap(p, report.a, cap)
            .map_err(|e| e.to_string())
            .and_then(|f| build_graph(Arc::new(f), report.k_prime).map_err(|e| e.to_string()));
        match &reduced {
            Ok(t) => t,
            Err(detail) => {
                fail(&mut failures, "matching", None, detail.clone());
                return finish_instance(
                    p,
                    n,
                    k,
                    q,
                    report.connected,
                    None,
                    connectivity_agreement,
                    sufficient_conditions,
                    component_structure,
                    CheckStatus::Fail,
                    CheckStatus::Fail,
                    CheckStatus::Skip,
                    CheckStatus::Skip,
                    CheckStatus::Skip,
                    failures,
                );
            }
        }
    };
    let hypothesis = target
        .field()
        .prime_subfield_in_kpowers(target.k())
        .unwrap_or(false);
    let (cell_balance, matching) = if !hypothesis {
        (CheckStatus::Skip, CheckStatus::Skip)
    } else {
        let cell_balance = if target.field().n() == 1 {
            // no cells exist over a prime field; with the hypothesis holding
            // this is the complete graph, handled by the empty matching below
            CheckStatus::Pass
        } else {
            match sort_cells(target) {
                Ok(cells) => {
                    let mut status = CheckStatus::Pass;
                    for cell in &cells {
                        let balanced =
                            (cell.left.len() == cell.right.len()) != faults.negate_cell_balance;
                        if !balanced {
                            status = CheckStatus::Fail;
                            fail(
                                &mut failures,
                                "cell_balance",
                                Some((0, 1)),
                                format!(
                                    "cell {:?}: {} left vs {} right",
                                    cell.tail,
                                    cell.left.len(),
                                    cell.right.len()
                                ),
                            );
                            break;
                        }
                    }
                    status
                }
                Err(e) => {
                    fail(&mut failures, "cell_balance", Some((0, 1)), e.to_string());
                    CheckStatus::Fail
                }
            }
        };
        let matching = check_matching(target, cfg, &mut failures, &mut fail);
        (cell_balance, matching)
    };

    // curvature agreement on sampled edges of the full graph
    let formula_claimed_possible = g
        .field()
        .prime_subfield_in_kpowers(k)
        .unwrap_or(false);
    let curvature_agreement = if !formula_claimed_possible && k > 2 {
        CheckStatus::Skip
    } else {
        let mut status = CheckStatus::Pass;
        for (x, y) in sample_edges(&g, cfg.edge_sample) {
            match CurvatureRecord::compute(&g, x, y, true) {
                Ok(r) if r.agree => {}
                Ok(r) => {
                    status = CheckStatus::Fail;
                    fail(
                        &mut failures,
                        "curvature_agreement",
                        Some((x, y)),
                        format!(
                            "formula {} (claimed {}), matching {} (claimed {}), transport {}",
                            r.formula,
                            r.formula_claimed,
                            r.matching,
                            r.matching_claimed,
                            r.transport.map(|t| t.to_string()).unwrap_or_default()
                        ),
                    );
                    break;
                }
                Err(e) => {
                    status = CheckStatus::Fail;
                    fail(&mut failures, "curvature_agreement", Some((x, y)), e.to_string());
                    break;
                }
            }
        }
        status
    };

    // |common neighborhood| constant across every edge
    let bits = g.neighbor_bitsets();
    let mut nabla: Option<usize> = None;
    let mut nabla_constancy = CheckStatus::Pass;
    'outer: for x in 0..q {
        for &s in g.connection() {
            let y = g.field().add(x, s);
            if y <= x {
                continue;
            }
            let common = bits.common_degree(x, y);
            match nabla {
                None => nabla = Some(common),
                Some(v) if v == common => {}
                Some(v) => {
                    nabla_constancy = CheckStatus::Fail;
                    fail(
                        &mut failures,
                        "nabla_constancy",
                        Some((x, y)),
                        format!("|common| = {common} here but {v} elsewhere"),
                    );
                    nabla = None;
                    break 'outer;
                }
            }
        }
    }

    let edge_transitivity =
        CheckStatus::from_bool(g.edge_transitivity_spot_check(cfg.edge_sample.max(4)));
    if edge_transitivity == CheckStatus::Fail {
        fail(
            &mut failures,
            "edge_transitivity",
            None,
            "an affine edge map failed to preserve adjacency".to_string(),
        );
    }

    finish_instance(
        p,
        n,
        k,
        q,
        report.connected,
        nabla,
        connectivity_agreement,
        sufficient_conditions,
        component_structure,
        cell_balance,
        matching,
        curvature_agreement,
        nabla_constancy,
        edge_transitivity,
        failures,
    )
}

fn check_matching(
    target: &PaleyGraph,
    cfg: &SweepConfig,
    failures: &mut Vec<FailureRepro>,
    fail: &mut impl FnMut(&mut Vec<FailureRepro>, &str, Option<(usize, usize)>, String),
) -> CheckStatus {
    let m = match perfect_matching_via_sorting(target) {
        Ok(m) => m,
        Err(e) => {
            fail(failures, "matching", Some((0, 1)), e.to_string());
            return CheckStatus::Fail;
        }
    };
    let nb = match edge_neighborhood(target, 0, 1) {
        Ok(nb) => nb,
        Err(e) => {
            fail(failures, "matching", Some((0, 1)), e.to_string());
            return CheckStatus::Fail;
        }
    };
    if let Err(detail) = check_perfect_matching(target, &nb, &m) {
        fail(failures, "matching", Some((0, 1)), detail);
        return CheckStatus::Fail;
    }
    match max_matching_size(target, 0, 1) {
        Ok(best) if best == m.pairs.len() => {}
        Ok(best) => {
            fail(
                failures,
                "matching",
                Some((0, 1)),
                format!(
                    "sorting matched {} pairs but the augmenting oracle finds {best}",
                    m.pairs.len()
                ),
            );
            return CheckStatus::Fail;
        }
        Err(e) => {
            fail(failures, "matching", Some((0, 1)), e.to_string());
            return CheckStatus::Fail;
        }
    }
    // transported copies stay perfect on sampled edges
    for (x, y) in sample_edges(target, cfg.edge_sample.min(5)) {
        let moved = match transport_matching(target, &m, x, y) {
            Ok(t) => t,
            Err(e) => {
                fail(failures, "matching", Some((x, y)), e.to_string());
                return CheckStatus::Fail;
            }
        };
        let nb = match edge_neighborhood(target, x, y) {
            Ok(nb) => nb,
            Err(e) => {
                fail(failures, "matching", Some((x, y)), e.to_string());
                return CheckStatus::Fail;
            }
        };
        if let Err(detail) = check_perfect_matching(target, &nb, &moved) {
            fail(failures, "matching", Some((x, y)), detail);
            return CheckStatus::Fail;
        }
    }
    CheckStatus::Pass
}

#[allow(clippy::too_many_arguments)]
fn finish_instance(
    p: usize,
    n: u32,
    k: usize,
    q: usize,
    connected: bool,
    nabla: Option<usize>,
    connectivity_agreement: CheckStatus,
    sufficient_conditions: CheckStatus,
    component_structure: CheckStatus,
    cell_balance: CheckStatus,
    matching: CheckStatus,
    curvature_agreement: CheckStatus,
    nabla_constancy: CheckStatus,
    edge_transitivity: CheckStatus,
    failures: Vec<FailureRepro>,
) -> InstanceOutcome {
    InstanceOutcome {
        p,
        n,
        k,
        q,
        connected,
        nabla,
        connectivity_agreement,
        sufficient_conditions,
        component_structure,
        cell_balance,
        matching,
        curvature_agreement,
        nabla_constancy,
        edge_transitivity,
        failures,
    }
}

/// Deterministic edge sample: the canonical edge (0, 1) plus up to `extra`
/// distinct random edges drawn from the instance-seeded generator.
pub fn sample_edges(g: &PaleyGraph, extra: usize) -> Vec<(usize, usize)> {
    let f = g.field();
    let mut rng = SplitMix64::for_instance(f.p(), f.n(), g.k());
    let q = g.q();
    let d = g.connection().len();
    let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
    let mut attempts = 0;
    while edges.len() < extra + 1 && attempts < 30 * (extra + 1) {
        attempts += 1;
        let x = rng.below(q);
        let y = f.add(x, g.connection()[rng.below(d)]);
        let e = (x.min(y), x.max(y));
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    edges
}

impl VerificationReport {
    pub fn failure_count(&self) -> usize {
        self.instances.iter().map(|o| o.failures.len()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "p,n,k,q,connected,nabla,connectivity_agreement,sufficient_conditions,\
             component_structure,cell_balance,matching,curvature_agreement,nabla_constancy,\
             edge_transitivity,failures,first_failure\n",
        );
        for o in &self.instances {
            let nabla = o.nabla.map(|v| v.to_string()).unwrap_or_default();
            let first = o
                .failures
                .first()
                .map(|f| {
                    let edge = f
                        .edge
                        .map(|(x, y)| format!(" at edge ({x}, {y})"))
                        .unwrap_or_default();
                    csv_quote(&format!("{}{}: {}", f.check, edge, f.detail))
                })
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                o.p,
                o.n,
                o.k,
                o.q,
                o.connected,
                nabla,
                o.connectivity_agreement.as_str(),
                o.sufficient_conditions.as_str(),
                o.component_structure.as_str(),
                o.cell_balance.as_str(),
                o.matching.as_str(),
                o.curvature_agreement.as_str(),
                o.nabla_constancy.as_str(),
                o.edge_transitivity.as_str(),
                o.failures.len(),
                first
            );
        }
        let s = self.summary;
        let _ = writeln!(
            out,
            "# instances={} passed={} failed={} skipped={}",
            s.instances, s.passed, s.failed, s.skipped
        );
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }

    pub fn write_to(&self, format: ReportFormat, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render(format))
    }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}
