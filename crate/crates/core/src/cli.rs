//! The `vheap` command line: differential fuzzing, trace replay with audits,
//! and benchmarks.
//!
//! Exit codes: 0 success, 1 check or fuzz failure, 2 usage error.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::heap::{HeapRef, NodeHandle, Pool};
use crate::invariants::{full_audit, AuditOptions};
use crate::oracle::{gen_ops, run_differential, DiffOptions, Weights};
use crate::workloads::{
    dijkstra_bench, gen_graph, heapsort_bench, mixed_bench, read_dimacs, BenchRecord, HeapKind,
    CSV_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vheap", version, about = "Violation heap fuzzing, auditing and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run differential scripts against the brute-force oracle.
    Fuzz {
        /// Operations per script.
        #[arg(long, default_value_t = 1000)]
        ops: usize,
        /// Number of scripts (seeds first-seed .. first-seed + seeds).
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 1)]
        first_seed: u64,
        /// insert:delete-min:decrease-key:meld
        #[arg(long, default_value = "0.45:0.25:0.25:0.05")]
        weights: Weights,
        /// Full audit every E operations (0 = never). Defaults to every
        /// operation for scripts of up to 2000 ops.
        #[arg(long)]
        audit_every: Option<usize>,
    },
    /// Replay a trace file, printing delete-min/find-min results and audit
    /// reports.
    Check {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Run one benchmark and print its record.
    Bench {
        #[arg(long, value_enum)]
        workload: Workload,
        #[arg(long, default_value = "violation")]
        heap: HeapKind,
        /// Vertices (dijkstra), keys (sort) or operations (mixed).
        #[arg(long)]
        n: Option<usize>,
        /// Arcs (dijkstra).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Read the graph from a DIMACS shortest-path file.
        #[arg(long)]
        dimacs: Option<PathBuf>,
        /// Largest random arc weight (dijkstra).
        #[arg(long, default_value_t = 1000)]
        wmax: i64,
        /// Operation weights (mixed).
        #[arg(long, default_value = "0.45:0.25:0.25:0.05")]
        weights: Weights,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Workload {
    Dijkstra,
    Sort,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Failed(String),
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let res = match cli.command {
        Command::Fuzz {
            ops,
            seeds,
            first_seed,
            weights,
            audit_every,
        } => cmd_fuzz(ops, seeds, first_seed, weights, audit_every, out),
        Command::Check { trace } => cmd_check(&trace, out),
        Command::Bench {
            workload,
            heap,
            n,
            m,
            seed,
            format,
            dimacs,
            wmax,
            weights,
        } => cmd_bench(workload, heap, n, m, seed, format, dimacs, wmax, weights, out),
    };
    match res {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Failed(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure::Failed(format!("write failed: {e}"))
}

fn cmd_fuzz(
    ops: usize,
    seeds: u64,
    first_seed: u64,
    weights: Weights,
    audit_every: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if ops == 0 || seeds == 0 {
        return Err(Failure::Usage("--ops and --seeds must be at least 1".into()));
    }
    let mut opts = DiffOptions::for_len(ops);
    if let Some(e) = audit_every {
        opts.audit_every = e;
    }
    let mut all_pass = true;
    for seed in first_seed..first_seed + seeds {
        let script = gen_ops(seed, ops, weights).map_err(|e| Failure::Usage(e.to_string()))?;
        let outcome = run_differential(&script, opts);
        all_pass &= outcome.verdict.passed();
        writeln!(out, "{}", outcome.verdict.to_json()).map_err(io_fail)?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_FAILURE })
}

/// One parsed trace line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceLine {
    New(String),
    Insert { heap: String, id: String, key: i64 },
    Decrease { heap: String, id: String, key: i64 },
    DeleteMin(String),
    FindMin(String),
    Meld(String, String),
    Check(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct TraceError {
    pub line: usize,
    pub msg: String,
}

/// Parse trace text. Blank lines and `#` comments are skipped; returned
/// entries carry their 1-based line number.
pub fn parse_trace(text: &str) -> Result<Vec<(usize, TraceLine)>, TraceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tok: Vec<&str> = content.split_whitespace().collect();
        if tok.is_empty() {
            continue;
        }
        let fail = |msg: String| TraceError { line, msg };
        let key = |s: &str| {
            s.parse::<i64>()
                .map_err(|_| fail(format!("bad key {s:?}")))
        };
        let s = |x: &str| x.to_string();
        let parsed = match tok[..] {
            ["new", h] => TraceLine::New(s(h)),
            ["insert", h, id, k] => TraceLine::Insert {
                heap: s(h),
                id: s(id),
                key: key(k)?,
            },
            ["decrease", h, id, k] => TraceLine::Decrease {
                heap: s(h),
                id: s(id),
                key: key(k)?,
            },
            ["deletemin", h] => TraceLine::DeleteMin(s(h)),
            ["findmin", h] => TraceLine::FindMin(s(h)),
            ["meld", a, b] => TraceLine::Meld(s(a), s(b)),
            ["check", h] => TraceLine::Check(s(h)),
            [op, ..] => {
                let known = ["new", "insert", "decrease", "deletemin", "findmin", "meld", "check"];
                return Err(if known.contains(&op) {
                    fail(format!("wrong number of arguments for {op:?}"))
                } else {
                    fail(format!("unknown op {op:?}"))
                });
            }
            [] => unreachable!(),
        };
        out.push((line, parsed));
    }
    Ok(out)
}

struct HeapState {
    heap: HeapRef,
    /// Whether the last mutation of this heap was a delete-min.
    consolidated: bool,
}

/// Replays a trace against one pool.
pub struct TraceRunner {
    pool: Pool<i64, String>,
    heaps: HashMap<String, HeapState>,
    /// id -> (handle, owning heap name); `None` once deleted.
    nodes: HashMap<String, Option<(NodeHandle, String)>>,
    clean: bool,
}

impl Default for TraceRunner {
    fn default() -> Self {
        Self::new()
    }
}

impl TraceRunner {
    pub fn new() -> Self {
        TraceRunner {
            pool: Pool::new(),
            heaps: HashMap::new(),
            nodes: HashMap::new(),
            clean: true,
        }
    }

    /// True iff every `check` so far reported no violations.
    pub fn is_clean(&self) -> bool {
        self.clean
    }

    fn heap_mut(&mut self, name: &str) -> Result<&mut HeapState, String> {
        self.heaps
            .get_mut(name)
            .ok_or_else(|| format!("unknown heap {name:?}"))
    }

    pub fn apply(&mut self, op: &TraceLine, out: &mut dyn Write) -> Result<(), String> {
        let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(|e| e.to_string());
        match op {
            TraceLine::New(h) => {
                if self.heaps.contains_key(h) {
                    return Err(format!("heap {h:?} already exists"));
                }
                let heap = self.pool.heap_new();
                self.heaps.insert(
                    h.clone(),
                    HeapState {
                        heap,
                        consolidated: false,
                    },
                );
            }
            TraceLine::Insert { heap, id, key } => {
                if self.nodes.contains_key(id) {
                    return Err(format!("id {id:?} already used"));
                }
                let st = self.heap_mut(heap)?;
                st.consolidated = false;
                let hr = st.heap;
                let x = self
                    .pool
                    .insert(hr, *key, id.clone())
                    .map_err(|e| e.to_string())?;
                self.nodes.insert(id.clone(), Some((x, heap.clone())));
            }
            TraceLine::Decrease { heap, id, key } => {
                let (x, owner) = match self.nodes.get(id) {
                    None => return Err(format!("unknown id {id:?}")),
                    Some(None) => return Err(format!("dead id {id:?}")),
                    Some(Some(v)) => v.clone(),
                };
                if &owner != heap {
                    return Err(format!("id {id:?} belongs to heap {owner:?}, not {heap:?}"));
                }
                let st = self.heap_mut(heap)?;
                st.consolidated = false;
                let hr = st.heap;
                self.pool
                    .decrease_key(hr, x, *key)
                    .map_err(|e| format!("decrease {id:?}: {e}"))?;
            }
            TraceLine::DeleteMin(h) => {
                let st = self.heap_mut(h)?;
                st.consolidated = true;
                let hr = st.heap;
                let (key, id) = self
                    .pool
                    .delete_min(hr)
                    .map_err(|e| format!("deletemin {h:?}: {e}"))?;
                self.nodes.insert(id.clone(), None);
                w(out, format!("{id} {key}"))?;
            }
            TraceLine::FindMin(h) => {
                let hr = self.heap_mut(h)?.heap;
                let line = match self.pool.find_min(hr).map_err(|e| e.to_string())? {
                    Some((key, id)) => format!("{id} {key}"),
                    None => "empty".to_string(),
                };
                w(out, line)?;
            }
            TraceLine::Meld(a, b) => {
                if a == b {
                    return Err(format!("cannot meld heap {a:?} with itself"));
                }
                let ha = self.heap_mut(a)?.heap;
                let hb = self.heap_mut(b)?.heap;
                let merged = self.pool.meld(ha, hb).map_err(|e| e.to_string())?;
                self.heaps.remove(b);
                let st = self.heap_mut(a)?;
                st.heap = merged;
                st.consolidated = false;
                for (_, owner) in self.nodes.values_mut().flatten() {
                    if owner == b {
                        *owner = a.clone();
                    }
                }
            }
            TraceLine::Check(h) => {
                let st = self.heap_mut(h)?;
                let opts = AuditOptions {
                    root_multiplicity: st.consolidated,
                    ..AuditOptions::default()
                };
                let hr = st.heap;
                let report = full_audit(&self.pool, hr, opts);
                self.clean &= report.is_clean();
                w(out, report.to_json())?;
            }
        }
        Ok(())
    }
}

/// Replay `text`; returns whether every check was clean.
pub fn run_trace(text: &str, out: &mut dyn Write) -> Result<bool, TraceError> {
    let lines = parse_trace(text)?;
    let mut runner = TraceRunner::new();
    for (line, op) in &lines {
        runner
            .apply(op, out)
            .map_err(|msg| TraceError { line: *line, msg })?;
    }
    Ok(runner.is_clean())
}

fn cmd_check(path: &PathBuf, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))?;
    match run_trace(&text, out) {
        Ok(true) => Ok(EXIT_OK),
        Ok(false) => Ok(EXIT_FAILURE),
        Err(e) => Err(Failure::Failed(e.to_string())),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    workload: Workload,
    heap: HeapKind,
    n: Option<usize>,
    m: Option<usize>,
    seed: u64,
    format: Format,
    dimacs: Option<PathBuf>,
    wmax: i64,
    weights: Weights,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let need_n = || n.ok_or_else(|| Failure::Usage("--n is required for this workload".into()));
    let (record, sum): (BenchRecord, u64) = match workload {
        Workload::Dijkstra => {
            let graph = match (&dimacs, m) {
                (Some(path), _) => read_dimacs(path).map_err(|e| Failure::Failed(e.to_string()))?,
                (None, Some(m)) => {
                    gen_graph(seed, need_n()?, m, wmax).map_err(|e| Failure::Usage(e.to_string()))?
                }
                (None, None) => {
                    return Err(Failure::Usage("dijkstra needs --m or --dimacs".into()));
                }
            };
            dijkstra_bench(&graph, seed, heap).map_err(|e| Failure::Failed(e.to_string()))?
        }
        Workload::Sort => {
            let n = need_n()?;
            if n == 0 {
                return Err(Failure::Usage("--n must be at least 1".into()));
            }
            heapsort_bench(n, seed, heap).map_err(|e| Failure::Failed(e.to_string()))?
        }
        Workload::Mixed => mixed_bench(need_n()?, seed, weights, heap)
            .map_err(|e| Failure::Usage(e.to_string()))?,
    };
    match format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}").map_err(io_fail)?;
            writeln!(out, "{}", record.to_csv_row()).map_err(io_fail)?;
            writeln!(out, "# checksum=0x{sum:016x}").map_err(io_fail)?;
        }
        Format::Json => {
            writeln!(out, "{}", record.to_json()).map_err(io_fail)?;
            writeln!(out, "{{\"checksum\":\"0x{sum:016x}\"}}").map_err(io_fail)?;
        }
    }
    Ok(EXIT_OK)
}
