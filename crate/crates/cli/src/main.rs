//! Command line front end: build sparsifiers, sample retractions, check
//! certificates, print the uniform-star lower bound, and run a benchmark
//! table.
//!
//! Exit codes are a stable contract: 0 on success (for `verify`, the
//! sparsifier was accepted), 1 when verification rejects, 2 on usage or
//! parse errors. All output is deterministic; `bench` leaves its wall-time
//! column empty unless `--timings` is given so reruns stay byte-identical.

mod format;

use clap::{Parser, Subcommand, ValueEnum};
use format::{
    exactness_json, flow_certificate_json, parse_graph_auto, parse_instance, quality_report_json,
    sparsifier_json,
};
use num::Zero;
use serde_json::{json, Map, Value};
use sparsetree::extension::{expected_sparsifier, sample_zero_extension};
use sparsetree::instances::{random_unit_quasi_bipartite, random_unit_tree, unit_star};
use sparsetree::quasi_bipartite::{exact_qb_sparsifier, qb_sparsifier, QbError};
use sparsetree::rational::{format_rational, is_positive, parse_rational};
use sparsetree::treeprep::root_tree;
use sparsetree::verify::{
    enumerate_cut_quality, flow_quality_tree, optimal_star_sparsifier_lp, star_lower_bound,
    verify_exact, CutQualityOptions, QualityReport,
};
use sparsetree::{CapacitatedGraph, Demand, Rational};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use std::{env, fs};

#[derive(Parser)]
#[command(
    name = "sparsetree",
    version,
    about = "Terminal sparsifiers for trees and quasi-bipartite graphs, certified exactly"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Expected sparsifier of a unit-capacity tree (quality at most 2)
    Tree,
    /// Star-by-star sparsifier of a quasi-bipartite graph (quality below 2)
    Qb,
    /// Exact sparsifier of a unit-capacity quasi-bipartite graph
    QbExact,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Compare every terminal bipartition's mincut against the sparsifier cut
    Cut,
    /// Cut domination plus exact congestion of the sparsifier demand on a tree
    FlowTree,
    /// Mincut equality on all bipartitions plus concurrent-flow agreement
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build a terminal sparsifier and emit it as JSON
    Sparsify {
        /// Instance file (text format)
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Attach an independently recomputed certificate
        #[arg(long)]
        certify: bool,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample connected retractions of a leaf-terminal tree
    Sample {
        /// Instance file; every terminal must be a leaf and every leaf a terminal
        input: PathBuf,
        /// RNG seed; sample i uses seed + i
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a sparsifier against its base instance; exit 1 on rejection
    Verify {
        /// Base instance file (text format)
        graph: PathBuf,
        /// Sparsifier file (JSON) or a second instance file
        sparsifier: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Largest acceptable quality, as an integer or p/q rational
        #[arg(long)]
        max_quality: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the uniform-star lower bound, its witness and certificate
    Lowerbound {
        /// Number of terminals, between 2 and the enumeration cap
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a suite of generated instances and print a CSV table
    Bench {
        /// Suite file: lines `tree <n> <k> <seed>` or `qb <k> <centers> <seed>`
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Fill the wall_ms column (off by default so reruns are byte-identical)
        #[arg(long)]
        timings: bool,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Sparsify { input, mode, certify, out } => cmd_sparsify(&input, mode, certify, out.as_deref()),
        Command::Sample { input, seed, count, format } => cmd_sample(&input, seed, count, format),
        Command::Verify { graph, sparsifier, kind, max_quality, format } => {
            cmd_verify(&graph, &sparsifier, kind, max_quality.as_deref(), format)
        }
        Command::Lowerbound { k, format } => cmd_lowerbound(k, format),
        Command::Bench { suite, timings, out } => cmd_bench(suite.as_deref(), timings, out.as_deref()),
    }
}

/// All stdout goes through here. A consumer that closes the pipe early
/// (`... | head`) must not panic us; dying quietly with the conventional
/// SIGPIPE code keeps the 0/1/2 contract unambiguous.
fn print_out(text: &str) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
        eprintln!("error: stdout: {e}");
        std::process::exit(2);
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_instance(path: &Path) -> Result<CapacitatedGraph, String> {
    parse_instance(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print_out(text);
            Ok(())
        }
    }
}

/// Hard cap on exhaustive cut enumeration (2^(k-1)-1 bipartitions), default
/// 16 terminals, overridable through SPARSETREE_MAX_K.
fn enumeration_cap() -> Result<usize, String> {
    match env::var("SPARSETREE_MAX_K") {
        Err(env::VarError::NotPresent) => Ok(16),
        Err(e) => Err(format!("SPARSETREE_MAX_K: {e}")),
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|cap| *cap >= 2)
            .ok_or(format!("SPARSETREE_MAX_K must be an integer >= 2, got `{raw}`")),
    }
}

fn cut_options() -> Result<CutQualityOptions, String> {
    Ok(CutQualityOptions { max_terminals: enumeration_cap()?, keep_table: false })
}

fn brace_set(side: &BTreeSet<String>) -> String {
    let mut inner = String::new();
    for (i, v) in side.iter().enumerate() {
        if i > 0 {
            inner.push_str(", ");
        }
        inner.push_str(v);
    }
    format!("{{{inner}}}")
}

fn cmd_sparsify(input: &Path, mode: Mode, certify: bool, out: Option<&Path>) -> Result<u8, String> {
    let g = read_instance(input)?;
    let (h, algorithm, variant) = match mode {
        Mode::Tree => (
            expected_sparsifier(&g).map_err(|e| e.to_string())?,
            "tree",
            "expected-0-extension",
        ),
        Mode::Qb => (qb_sparsifier(&g).map_err(|e| e.to_string())?, "qb", "star-decomposition"),
        Mode::QbExact => (
            exact_qb_sparsifier(&g).map_err(|e| e.to_string())?,
            "qb-exact",
            "type-grouping",
        ),
    };
    let certificate = if certify {
        Some(match mode {
            Mode::Tree => {
                flow_certificate_json(&flow_quality_tree(&g, &h).map_err(|e| e.to_string())?)
            }
            Mode::Qb => quality_report_json(
                &enumerate_cut_quality(&g, &h, &cut_options()?).map_err(|e| e.to_string())?,
            ),
            Mode::QbExact => exactness_json(
                &verify_exact(&g, &h, &[], &Rational::zero()).map_err(|e| e.to_string())?,
            ),
        })
    } else {
        None
    };
    let provenance = json!({ "algorithm": algorithm, "seed": Value::Null, "variant": variant });
    let doc = sparsifier_json(&h, provenance, certificate);
    let text = serde_json::to_string_pretty(&doc).expect("document serializes") + "\n";
    emit(out, &text)?;
    Ok(0)
}

fn cmd_sample(input: &Path, seed: u64, count: usize, format: Format) -> Result<u8, String> {
    let g = read_instance(input)?;
    let tree = root_tree(&g).map_err(|e| e.to_string())?;
    let mut text = String::new();
    let mut docs: Vec<Value> = Vec::new();
    for i in 0..count {
        let sample_seed = seed.wrapping_add(i as u64);
        let ext = sample_zero_extension(&tree, sample_seed);
        match format {
            Format::Text => {
                // The induced graph is printed in the instance format, so
                // each block below the retraction table is itself a valid
                // input for the other commands.
                text.push_str(&format!("extension {i} seed {sample_seed}\n"));
                for (v, x) in ext.retraction() {
                    text.push_str(&format!("retract {v} -> {x}\n"));
                }
                text.push_str(&format::serialize_instance(ext.induced_graph()));
                text.push('\n');
            }
            Format::Json => {
                docs.push(json!({
                    "index": i,
                    "seed": sample_seed,
                    "retraction": ext.retraction(),
                    "edges": format::edges_json(ext.induced_graph()),
                }));
            }
        }
    }
    match format {
        Format::Text => print_out(&text),
        Format::Json => {
            let doc = serde_json::to_string_pretty(&Value::Array(docs)).expect("serializes");
            print_out(&(doc + "\n"));
        }
    }
    Ok(0)
}

struct Verdict {
    accepted: bool,
    text: String,
    json: Map<String, Value>,
}

impl Verdict {
    fn new() -> Verdict {
        Verdict { accepted: true, text: String::new(), json: Map::new() }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn finish(mut self, format: Format) -> u8 {
        let verdict = if self.accepted { "accepted" } else { "rejected" };
        match format {
            Format::Text => {
                self.text.push_str(&format!("verdict: {verdict}\n"));
                print_out(&self.text);
            }
            Format::Json => {
                self.json.insert("verdict".into(), json!(verdict));
                let doc =
                    serde_json::to_string_pretty(&Value::Object(self.json)).expect("serializes");
                print_out(&(doc + "\n"));
            }
        }
        u8::from(!self.accepted)
    }
}

/// Shared cut-domination and threshold reporting for `cut` and `flow-tree`.
fn report_cuts(v: &mut Verdict, report: &QualityReport) {
    v.line(format!(
        "min ratio: {} (cut {})",
        format_rational(&report.min_ratio),
        brace_set(&report.witness_min)
    ));
    v.line(format!(
        "max ratio: {} (cut {})",
        format_rational(&report.max_ratio),
        brace_set(&report.witness_max)
    ));
    if report.dominates() {
        v.line("domination: ok");
    } else {
        v.accepted = false;
        v.line(format!(
            "domination: FAILED, witness cut {} has ratio {} below 1",
            brace_set(&report.witness_min),
            format_rational(&report.min_ratio)
        ));
    }
}

fn report_threshold(v: &mut Verdict, quality: &Rational, threshold: Option<&Rational>) {
    if let Some(bound) = threshold {
        if quality <= bound {
            v.line(format!("threshold: quality within {}", format_rational(bound)));
        } else {
            v.accepted = false;
            v.line(format!(
                "threshold: quality {} exceeds {}",
                format_rational(quality),
                format_rational(bound)
            ));
        }
        v.json.insert("maxQuality".into(), json!(format_rational(bound)));
    }
}

/// Terminal pairs that the two-hop flow model can route in `g`: a direct
/// edge or at least one shared non-terminal neighbor.
fn routable_pairs(g: &CapacitatedGraph) -> BTreeSet<(String, String)> {
    let terminals: Vec<&String> = g.terminals().collect();
    let mut pairs = BTreeSet::new();
    for (i, s) in terminals.iter().enumerate() {
        for t in &terminals[i + 1..] {
            let direct = g.capacity(s, t).is_some();
            let via_hub = g
                .vertices()
                .filter(|w| !g.is_terminal(w))
                .any(|w| g.capacity(w, s).is_some() && g.capacity(w, t).is_some());
            if direct || via_hub {
                pairs.insert(((*s).clone(), (*t).clone()));
            }
        }
    }
    pairs
}

fn cmd_verify(
    graph: &Path,
    sparsifier: &Path,
    kind: Kind,
    max_quality: Option<&str>,
    format: Format,
) -> Result<u8, String> {
    let g = read_instance(graph)?;
    let h = parse_graph_auto(&read_file(sparsifier)?)
        .map_err(|e| format!("{}: {e}", sparsifier.display()))?;
    let threshold = max_quality
        .map(|s| parse_rational(s).map_err(|e| format!("--max-quality: {e}")))
        .transpose()?;
    if let Some(bound) = &threshold {
        if !is_positive(bound) {
            return Err("--max-quality must be positive".into());
        }
    }

    let mut v = Verdict::new();
    match kind {
        Kind::Cut => {
            let report =
                enumerate_cut_quality(&g, &h, &cut_options()?).map_err(|e| e.to_string())?;
            v.line("kind: cut");
            report_cuts(&mut v, &report);
            report_threshold(&mut v, &report.max_ratio, threshold.as_ref());
            v.json.insert("report".into(), quality_report_json(&report));
        }
        Kind::FlowTree => {
            let cert = flow_quality_tree(&g, &h).map_err(|e| e.to_string())?;
            let report =
                enumerate_cut_quality(&g, &h, &cut_options()?).map_err(|e| e.to_string())?;
            v.line("kind: flow-tree");
            report_cuts(&mut v, &report);
            match &cert.bottleneck {
                Some((a, b)) => v.line(format!(
                    "flow quality: {} (bottleneck edge {a} -- {b})",
                    format_rational(&cert.quality)
                )),
                None => v.line(format!("flow quality: {}", format_rational(&cert.quality))),
            }
            report_threshold(&mut v, &cert.quality, threshold.as_ref());
            v.json.insert("report".into(), flow_certificate_json(&cert));
            v.json.insert("cuts".into(), quality_report_json(&report));
        }
        Kind::Exact => {
            // One unit demand on every pair both graphs can route; pairs
            // outside the model would make the LP reject a valid sparsifier.
            let pairs: Vec<(String, String)> = routable_pairs(&g)
                .intersection(&routable_pairs(&h))
                .cloned()
                .collect();
            let mut demand = Demand::new();
            for (s, t) in &pairs {
                demand.set(s, t, Rational::from_integer(1.into())).map_err(|e| e.to_string())?;
            }
            let demands = if demand.is_zero() { vec![] } else { vec![demand] };
            let report =
                verify_exact(&g, &h, &demands, &Rational::zero()).map_err(|e| e.to_string())?;
            v.line("kind: exact");
            match &report.cut_witness {
                None => v.line("cut equality: ok on every bipartition"),
                Some(side) => {
                    v.accepted = false;
                    v.line(format!(
                        "cut equality: FAILED, witness cut {} has different mincuts",
                        brace_set(side)
                    ));
                }
            }
            match &report.flow_witness {
                None => v.line(format!(
                    "flow equality: ok on {} routable pairs (zero tolerance)",
                    pairs.len()
                )),
                Some((index, gap)) => {
                    v.accepted = false;
                    v.line(format!(
                        "flow equality: FAILED, demand {index} has gap {}",
                        format_rational(gap)
                    ));
                }
            }
            v.json.insert("report".into(), exactness_json(&report));
        }
    }
    Ok(v.finish(format))
}

fn cmd_lowerbound(k: usize, format: Format) -> Result<u8, String> {
    let cap = enumeration_cap()?;
    if k < 2 || k > cap {
        return Err(format!("k must be between 2 and {cap} (enumeration cap), got {k}"));
    }
    let (value, witness) = star_lower_bound(k);
    let star = unit_star(k);
    let report =
        enumerate_cut_quality(&star, &witness, &cut_options()?).map_err(|e| e.to_string())?;
    let per_edge = witness
        .edges()
        .next()
        .map(|(_, _, c)| c.clone())
        .expect("lower-bound witness has at least one edge");
    // The LP search over all complete-graph weightings is only run at small
    // k; for odd k it finds a weighting strictly cheaper than the uniform
    // witness, so the two values are reported side by side.
    let lp = if k <= 5 {
        Some(optimal_star_sparsifier_lp(k, 8).map_err(|e| e.to_string())?)
    } else {
        None
    };

    match format {
        Format::Text => {
            let mut text = format!("terminals: {k}\n");
            text.push_str(&format!("uniform star bound 2(1-1/k): {}\n", format_rational(&value)));
            text.push_str(&format!(
                "witness: complete graph on the terminals, capacity {} per edge\n",
                format_rational(&per_edge)
            ));
            text.push_str(&format!(
                "witness quality: {} (worst cut {}), domination {}\n",
                format_rational(&report.max_ratio),
                brace_set(&report.witness_max),
                if report.dominates() { "ok" } else { "FAILED" }
            ));
            if let Some(optimum) = &lp {
                let remark = if *optimum == report.max_ratio {
                    "the uniform witness is optimal"
                } else {
                    "below the witness: the bound is not tight at odd k"
                };
                text.push_str(&format!(
                    "lp optimum over complete-graph weightings: {} ({remark})\n",
                    format_rational(optimum)
                ));
            }
            print_out(&text);
        }
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("terminals".into(), json!(k));
            doc.insert("lowerBound".into(), json!(format_rational(&value)));
            doc.insert("witnessEdgeCapacity".into(), json!(format_rational(&per_edge)));
            doc.insert("certificate".into(), quality_report_json(&report));
            doc.insert(
                "lpOptimum".into(),
                lp.as_ref().map(|o| json!(format_rational(o))).unwrap_or(Value::Null),
            );
            doc.insert(
                "lpMatchesWitness".into(),
                lp.as_ref().map(|o| json!(*o == report.max_ratio)).unwrap_or(Value::Null),
            );
            let rendered =
                serde_json::to_string_pretty(&Value::Object(doc)).expect("serializes");
            print_out(&(rendered + "\n"));
        }
    }
    Ok(0)
}

enum SuiteEntry {
    Tree { n: usize, k: usize, seed: u64 },
    Qb { k: usize, centers: usize, seed: u64 },
}

fn parse_suite(text: &str) -> Result<Vec<SuiteEntry>, String> {
    let mut entries = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let usage = "expected `tree <n> <k> <seed>` or `qb <k> <centers> <seed>`";
        if fields.len() != 4 {
            return Err(format!("suite line {line}: {usage}"));
        }
        let num = |text: &str| -> Result<u64, String> {
            text.parse::<u64>().map_err(|_| format!("suite line {line}: bad number `{text}`"))
        };
        match fields[0] {
            "tree" => entries.push(SuiteEntry::Tree {
                n: num(fields[1])? as usize,
                k: num(fields[2])? as usize,
                seed: num(fields[3])?,
            }),
            "qb" => entries.push(SuiteEntry::Qb {
                k: num(fields[1])? as usize,
                centers: num(fields[2])? as usize,
                seed: num(fields[3])?,
            }),
            other => return Err(format!("suite line {line}: unknown generator `{other}`, {usage}")),
        }
    }
    Ok(entries)
}

fn default_suite() -> Vec<SuiteEntry> {
    vec![
        SuiteEntry::Tree { n: 10, k: 3, seed: 1 },
        SuiteEntry::Tree { n: 20, k: 5, seed: 2 },
        SuiteEntry::Tree { n: 30, k: 8, seed: 3 },
        SuiteEntry::Tree { n: 40, k: 10, seed: 4 },
        SuiteEntry::Qb { k: 3, centers: 4, seed: 1 },
        SuiteEntry::Qb { k: 4, centers: 8, seed: 2 },
        SuiteEntry::Qb { k: 5, centers: 12, seed: 3 },
    ]
}

fn cmd_bench(suite: Option<&Path>, timings: bool, out: Option<&Path>) -> Result<u8, String> {
    let entries = match suite {
        Some(path) => parse_suite(&read_file(path)?)?,
        None => default_suite(),
    };
    // (instance, algorithm, quality, size, wall_ms)
    let mut rows: Vec<(String, &'static str, String, usize, String)> = Vec::new();
    let push_row = |rows: &mut Vec<(String, &'static str, String, usize, String)>,
                        instance: String,
                        algorithm: &'static str,
                        result: Result<(Rational, usize), String>,
                        started: Instant|
     -> Result<(), String> {
        let (quality, size) = result.map_err(|e| format!("{instance} ({algorithm}): {e}"))?;
        let wall = if timings {
            format!("{}", started.elapsed().as_millis())
        } else {
            String::new()
        };
        rows.push((instance, algorithm, format_rational(&quality), size, wall));
        Ok(())
    };

    let options = cut_options()?;
    for entry in &entries {
        match entry {
            SuiteEntry::Tree { n, k, seed } => {
                let instance = format!("tree-n{n}-k{k}-s{seed}");
                let started = Instant::now();
                let result = (|| {
                    let g = random_unit_tree(*n, *k, *seed);
                    let h = expected_sparsifier(&g).map_err(|e| e.to_string())?;
                    let cert = flow_quality_tree(&g, &h).map_err(|e| e.to_string())?;
                    Ok((cert.quality, h.vertex_count()))
                })();
                push_row(&mut rows, instance, "tree", result, started)?;
            }
            SuiteEntry::Qb { k, centers, seed } => {
                let g = random_unit_quasi_bipartite(*k, *centers, *seed);
                type Builder = fn(&CapacitatedGraph) -> Result<CapacitatedGraph, QbError>;
                for (algorithm, build) in
                    [("qb", qb_sparsifier as Builder), ("qb-exact", exact_qb_sparsifier as Builder)]
                {
                    let instance = format!("qb-k{k}-c{centers}-s{seed}");
                    let started = Instant::now();
                    let result = (|| {
                        let h = build(&g).map_err(|e| e.to_string())?;
                        let report =
                            enumerate_cut_quality(&g, &h, &options).map_err(|e| e.to_string())?;
                        Ok((report.max_ratio, h.vertex_count()))
                    })();
                    push_row(&mut rows, instance, algorithm, result, started)?;
                }
            }
        }
    }
    rows.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));

    let mut csv = String::from("instance,algorithm,quality,size,wall_ms\n");
    for (instance, algorithm, quality, size, wall) in &rows {
        csv.push_str(&format!("{instance},{algorithm},{quality},{size},{wall}\n"));
    }
    emit(out, &csv)?;
    Ok(0)
}
