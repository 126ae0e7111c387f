//! Benchmark workloads (Dijkstra, heapsort, mixed scripts) and the baseline
//! heaps they are compared against.

mod binary;
mod graph;
mod pairing;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::heap::{HeapRef, NodeHandle, Pool};
use crate::oracle::{gen_ops, Op, OracleError, Weights};

pub use binary::IndexedBinaryHeap;
pub use graph::{gen_graph, parse_dimacs, read_dimacs, Graph, INFINITY};
pub use pairing::PairingHeap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkloadError {
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("negative weight {0}")]
    NegativeWeight(i64),
    #[error("weight {0} can overflow path lengths")]
    WeightOverflow(i64),
    #[error("vertex {0} out of range for {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
    #[error("heapsort output is not sorted at position {0}")]
    Unsorted(usize),
    #[error(transparent)]
    Script(#[from] OracleError),
}

/// Counters every benchmarked heap reports. Fields a heap has no notion of
/// stay zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub comparisons: u64,
    pub links: u64,
    pub cuts: u64,
    pub rank_updates: u64,
    pub max_rank: u32,
}

/// The addressable priority-queue surface the workloads drive.
pub trait BenchQueue {
    type Handle: Copy;

    fn name(&self) -> &'static str;
    fn push(&mut self, key: i64, item: u32) -> Self::Handle;
    /// Lower the key behind a live handle.
    fn decrease(&mut self, h: Self::Handle, key: i64);
    fn pop(&mut self) -> Option<(i64, u32)>;
    fn peek_key(&self) -> Option<i64>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Build a second queue from `entries` and meld it in.
    fn meld_batch(&mut self, entries: &[(i64, u32)]) -> Vec<Self::Handle>;
    fn counters(&self) -> Counters;
}

/// A violation heap and its pool behind the benchmark interface.
pub struct ViolationQueue {
    pool: Pool<i64, u32>,
    heap: HeapRef,
}

impl ViolationQueue {
    pub fn new() -> Self {
        let mut pool = Pool::new();
        let heap = pool.heap_new();
        ViolationQueue { pool, heap }
    }

    pub fn pool(&self) -> &Pool<i64, u32> {
        &self.pool
    }

    pub fn heap(&self) -> HeapRef {
        self.heap
    }
}

impl Default for ViolationQueue {
    fn default() -> Self {
        Self::new()
    }
}

impl BenchQueue for ViolationQueue {
    type Handle = NodeHandle;

    fn name(&self) -> &'static str {
        "violation"
    }

    fn push(&mut self, key: i64, item: u32) -> NodeHandle {
        self.pool.insert(self.heap, key, item).expect("live heap")
    }

    fn decrease(&mut self, h: NodeHandle, key: i64) {
        self.pool
            .decrease_key(self.heap, h, key)
            .expect("decrease on a live handle");
    }

    fn pop(&mut self) -> Option<(i64, u32)> {
        self.pool.delete_min(self.heap).ok()
    }

    fn peek_key(&self) -> Option<i64> {
        self.pool
            .find_min(self.heap)
            .expect("live heap")
            .map(|(k, _)| *k)
    }

    fn len(&self) -> usize {
        self.pool.size(self.heap).expect("live heap")
    }

    fn meld_batch(&mut self, entries: &[(i64, u32)]) -> Vec<NodeHandle> {
        let side = self.pool.heap_new();
        let hs = entries
            .iter()
            .map(|&(k, i)| self.pool.insert(side, k, i).expect("live heap"))
            .collect();
        self.heap = self.pool.meld(self.heap, side).expect("same pool");
        hs
    }

    fn counters(&self) -> Counters {
        let t = self.pool.telemetry();
        Counters {
            comparisons: t.comparisons,
            links: t.joins,
            cuts: t.cuts,
            rank_updates: t.rank_updates,
            max_rank: t.max_rank,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeapKind {
    Violation,
    Binary,
    Pairing,
}

impl HeapKind {
    pub const ALL: [HeapKind; 3] = [HeapKind::Violation, HeapKind::Binary, HeapKind::Pairing];

    pub fn name(self) -> &'static str {
        match self {
            HeapKind::Violation => "violation",
            HeapKind::Binary => "binary",
            HeapKind::Pairing => "pairing",
        }
    }
}

impl FromStr for HeapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HeapKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown heap {s:?} (expected violation, binary or pairing)"))
    }
}

impl fmt::Display for HeapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const CSV_HEADER: &str =
    "workload,heap,n,m,seed,wall_ns,comparisons,links,cuts,rank_updates,max_rank";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRecord {
    pub workload: String,
    pub heap: String,
    pub n: u64,
    pub m: u64,
    pub seed: u64,
    pub wall_ns: u64,
    pub comparisons: u64,
    pub links: u64,
    pub cuts: u64,
    pub rank_updates: u64,
    pub max_rank: u32,
}

impl BenchRecord {
    fn new(workload: &str, heap: &str, n: usize, m: usize, seed: u64, start: Instant, c: Counters) -> Self {
        BenchRecord {
            workload: workload.to_string(),
            heap: heap.to_string(),
            n: n as u64,
            m: m as u64,
            seed,
            wall_ns: (start.elapsed().as_nanos() as u64).max(1),
            comparisons: c.comparisons,
            links: c.links,
            cuts: c.cuts,
            rank_updates: c.rank_updates,
            max_rank: c.max_rank,
        }
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.workload,
            self.heap,
            self.n,
            self.m,
            self.seed,
            self.wall_ns,
            self.comparisons,
            self.links,
            self.cuts,
            self.rank_updates,
            self.max_rank
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    /// Same record with the timing field zeroed, for determinism checks.
    pub fn without_time(&self) -> Self {
        BenchRecord {
            wall_ns: 0,
            ..self.clone()
        }
    }
}

/// Order-sensitive FNV-1a fold over a key sequence.
pub fn checksum(keys: impl IntoIterator<Item = i64>) -> u64 {
    keys.into_iter().fold(0xcbf2_9ce4_8422_2325, |h, k| {
        k.to_le_bytes()
            .iter()
            .fold(h, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
    })
}

/// Shortest-path distances from `source`, with every vertex inserted up
/// front at [`INFINITY`] so relaxations go through decrease-key.
pub fn dijkstra<Q: BenchQueue>(g: &Graph, source: usize, q: &mut Q) -> Result<Vec<i64>, WorkloadError> {
    let n = g.n();
    if source >= n {
        return Err(WorkloadError::VertexOutOfRange(source, n));
    }
    let mut dist = vec![INFINITY; n];
    let mut done = vec![false; n];
    dist[source] = 0;
    let handles: Vec<Q::Handle> = (0..n).map(|v| q.push(dist[v], v as u32)).collect();
    while let Some((d, u)) = q.pop() {
        if d == INFINITY {
            break;
        }
        let u = u as usize;
        done[u] = true;
        for &(v, w) in g.neighbors(u) {
            if w < 0 {
                return Err(WorkloadError::NegativeWeight(w));
            }
            let v = v as usize;
            let nd = d + w;
            if !done[v] && nd < dist[v] {
                dist[v] = nd;
                q.decrease(handles[v], nd);
            }
        }
    }
    Ok(dist)
}

/// Shortest-path distances computed with a fresh queue of the given kind.
pub fn dijkstra_with(g: &Graph, source: usize, kind: HeapKind) -> Result<(Vec<i64>, Counters), WorkloadError> {
    fn go<Q: BenchQueue>(g: &Graph, s: usize, mut q: Q) -> Result<(Vec<i64>, Counters), WorkloadError> {
        let d = dijkstra(g, s, &mut q)?;
        Ok((d, q.counters()))
    }
    match kind {
        HeapKind::Violation => go(g, source, ViolationQueue::new()),
        HeapKind::Binary => go(g, source, IndexedBinaryHeap::new()),
        HeapKind::Pairing => go(g, source, PairingHeap::new()),
    }
}

pub fn dijkstra_bench(g: &Graph, seed: u64, kind: HeapKind) -> Result<(BenchRecord, u64), WorkloadError> {
    let start = Instant::now();
    let (dist, c) = dijkstra_with(g, 0, kind)?;
    let rec = BenchRecord::new("dijkstra", kind.name(), g.n(), g.m(), seed, start, c);
    Ok((rec, checksum(dist)))
}

/// Insert `n` random keys, then delete-min `n` times. Returns the sorted
/// output alongside the record.
pub fn heapsort<Q: BenchQueue>(n: usize, seed: u64, q: &mut Q) -> Result<Vec<i64>, WorkloadError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        q.push(rng.random_range(0..1i64 << 40), i as u32);
    }
    let out: Vec<i64> = std::iter::from_fn(|| q.pop().map(|(k, _)| k)).collect();
    if let Some(i) = out.windows(2).position(|w| w[0] > w[1]) {
        return Err(WorkloadError::Unsorted(i + 1));
    }
    Ok(out)
}

pub fn heapsort_bench(n: usize, seed: u64, kind: HeapKind) -> Result<(BenchRecord, u64), WorkloadError> {
    fn go<Q: BenchQueue>(n: usize, seed: u64, mut q: Q) -> Result<(BenchRecord, u64), WorkloadError> {
        let start = Instant::now();
        let out = heapsort(n, seed, &mut q)?;
        let rec = BenchRecord::new("sort", q.name(), n, 0, seed, start, q.counters());
        Ok((rec, checksum(out)))
    }
    match kind {
        HeapKind::Violation => go(n, seed, ViolationQueue::new()),
        HeapKind::Binary => go(n, seed, IndexedBinaryHeap::new()),
        HeapKind::Pairing => go(n, seed, PairingHeap::new()),
    }
}

/// Replay a generated operation script, measuring only.
pub fn mixed<Q: BenchQueue>(ops: &[Op], q: &mut Q) -> u64 {
    // live ids in swap-remove order; mirrors the oracle's live list
    let mut live: Vec<u32> = Vec::new();
    let mut pos: Vec<usize> = Vec::new();
    let mut keys: Vec<i64> = Vec::new();
    let mut handles: Vec<Q::Handle> = Vec::new();
    let mut popped = Vec::new();
    let add = |key: i64, live: &mut Vec<u32>, pos: &mut Vec<usize>, keys: &mut Vec<i64>| {
        let id = keys.len() as u32;
        keys.push(key);
        pos.push(live.len());
        live.push(id);
        id
    };
    for op in ops {
        match op {
            Op::Insert(k) => {
                let id = add(*k, &mut live, &mut pos, &mut keys);
                handles.push(q.push(*k, id));
            }
            Op::Meld(ks) => {
                let entries: Vec<(i64, u32)> = ks
                    .iter()
                    .map(|&k| (k, add(k, &mut live, &mut pos, &mut keys)))
                    .collect();
                handles.extend(q.meld_batch(&entries));
            }
            Op::DeleteMin => {
                let (k, id) = q.pop().expect("script keeps the queue non-empty");
                popped.push(k);
                let p = pos[id as usize];
                live.swap_remove(p);
                if let Some(&moved) = live.get(p) {
                    pos[moved as usize] = p;
                }
            }
            Op::DecreaseKey { target, delta } => {
                let id = live[*target] as usize;
                keys[id] -= delta;
                q.decrease(handles[id], keys[id]);
            }
        }
    }
    checksum(popped)
}

pub fn mixed_bench(
    ops: usize,
    seed: u64,
    weights: Weights,
    kind: HeapKind,
) -> Result<(BenchRecord, u64), WorkloadError> {
    fn go<Q: BenchQueue>(script: &[Op], seed: u64, mut q: Q) -> (BenchRecord, u64) {
        let start = Instant::now();
        let sum = mixed(script, &mut q);
        let rec = BenchRecord::new("mixed", q.name(), script.len(), 0, seed, start, q.counters());
        (rec, sum)
    }
    let script = gen_ops(seed, ops, weights)?;
    Ok(match kind {
        HeapKind::Violation => go(&script.ops, seed, ViolationQueue::new()),
        HeapKind::Binary => go(&script.ops, seed, IndexedBinaryHeap::new()),
        HeapKind::Pairing => go(&script.ops, seed, PairingHeap::new()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_distances() {
        let mut g = Graph::new(4).unwrap();
        g.add_edge(0, 1, 2).unwrap();
        g.add_edge(1, 2, 3).unwrap();
        for kind in HeapKind::ALL {
            let (d, _) = dijkstra_with(&g, 0, kind).unwrap();
            assert_eq!(d, vec![0, 2, 5, INFINITY], "{kind}");
        }
        assert!(dijkstra_with(&g, 4, HeapKind::Binary).is_err());
    }

    #[test]
    fn dijkstra_agrees_across_heaps() {
        let g = gen_graph(7, 100, 500, 1000).unwrap();
        let (v, c) = dijkstra_with(&g, 0, HeapKind::Violation).unwrap();
        let (b, _) = dijkstra_with(&g, 0, HeapKind::Binary).unwrap();
        let (p, _) = dijkstra_with(&g, 0, HeapKind::Pairing).unwrap();
        assert_eq!(v, b);
        assert_eq!(v, p);
        assert!(c.links > 0);
    }

    #[test]
    fn heapsort_single_and_sorted() {
        for kind in HeapKind::ALL {
            let (rec, _) = heapsort_bench(1, 5, kind).unwrap();
            assert_eq!(rec.n, 1);
        }
        let mut v = ViolationQueue::new();
        let mut b = IndexedBinaryHeap::new();
        let a = heapsort(5000, 3, &mut v).unwrap();
        assert_eq!(a, heapsort(5000, 3, &mut b).unwrap());
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn mixed_counters() {
        let no_dk = Weights {
            decrease_key: 0.0,
            ..Weights::MIXED
        };
        let (rec, _) = mixed_bench(3000, 1, no_dk, HeapKind::Violation).unwrap();
        assert_eq!(rec.cuts, 0);
        let insert_only = Weights {
            insert: 1.0,
            delete_min: 0.0,
            decrease_key: 0.0,
            meld: 0.0,
        };
        let (rec, _) = mixed_bench(3000, 1, insert_only, HeapKind::Violation).unwrap();
        assert_eq!(rec.links, 0);
        let (a, sa) = mixed_bench(3000, 9, Weights::MIXED, HeapKind::Violation).unwrap();
        let (b, sb) = mixed_bench(3000, 9, Weights::MIXED, HeapKind::Violation).unwrap();
        assert_eq!(a.without_time(), b.without_time());
        assert_eq!(sa, sb);
        // all heaps pop the same key sequence
        for kind in [HeapKind::Binary, HeapKind::Pairing] {
            assert_eq!(mixed_bench(3000, 9, Weights::MIXED, kind).unwrap().1, sa);
        }
    }

    #[test]
    fn record_formats() {
        let rec = BenchRecord {
            workload: "sort".into(),
            heap: "violation".into(),
            n: 10,
            m: 0,
            seed: 1,
            wall_ns: 99,
            comparisons: 5,
            links: 4,
            cuts: 3,
            rank_updates: 2,
            max_rank: 1,
        };
        assert_eq!(rec.to_csv_row(), "sort,violation,10,0,1,99,5,4,3,2,1");
        let json: serde_json::Value = serde_json::from_str(&rec.to_json()).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        let mut header: Vec<&str> = CSV_HEADER.split(',').collect();
        header.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, header);
    }

    #[test]
    fn heap_kind_parsing() {
        assert_eq!("pairing".parse::<HeapKind>(), Ok(HeapKind::Pairing));
        assert!("fibonacci".parse::<HeapKind>().is_err());
    }
}
