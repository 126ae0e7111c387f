//! Brute-force reference queue, operation-script generator and the
//! differential runner that replays a script on both structures.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::heap::{JoinPhase, NodeHandle, Pool, Telemetry};
use crate::invariants::{full_audit, pool_theta2, AuditOptions};

/// Upper end (exclusive) of generated insert keys.
pub const KEY_RANGE: i64 = 1_000_000;
/// Largest amount a generated decrease-key subtracts.
pub const MAX_DECREASE: i64 = 1000;
/// Largest number of keys in one generated meld segment.
pub const MAX_MELD_SEGMENT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("operation weights must be finite, non-negative and allow an insert or meld")]
    DegenerateWeights,
    #[error("bad weights string {0:?}, expected i:d:k:m")]
    BadWeights(String),
    #[error("script length must be at least 1")]
    EmptyScript,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: i64,
    alive: bool,
}

/// A trivially correct priority queue: every entry lives in a flat table and
/// delete-min scans all live entries. Ties go to the smallest id.
#[derive(Debug, Clone, Default)]
pub struct NaivePQ {
    entries: Vec<Entry>,
    alive: Vec<usize>,
    pos: Vec<usize>,
    cached_min: Option<Option<usize>>,
}

impl NaivePQ {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    pub fn is_alive(&self, id: usize) -> bool {
        self.entries.get(id).is_some_and(|e| e.alive)
    }

    pub fn key(&self, id: usize) -> Option<i64> {
        self.entries.get(id).filter(|e| e.alive).map(|e| e.key)
    }

    /// The `index`-th live id in the queue's internal live order.
    pub fn live_at(&self, index: usize) -> Option<usize> {
        self.alive.get(index).copied()
    }

    pub fn insert(&mut self, key: i64) -> usize {
        let id = self.entries.len();
        self.entries.push(Entry { key, alive: true });
        self.pos.push(self.alive.len());
        self.alive.push(id);
        if let Some(Some(m)) = self.cached_min {
            if key < self.entries[m].key {
                self.cached_min = Some(Some(id));
            }
        } else if self.cached_min == Some(None) {
            self.cached_min = Some(Some(id));
        }
        id
    }

    fn scan_min(&self) -> Option<usize> {
        self.alive
            .iter()
            .copied()
            .min_by_key(|&id| (self.entries[id].key, id))
    }

    pub fn find_min(&mut self) -> Option<(i64, usize)> {
        let m = match self.cached_min {
            Some(m) => m,
            None => {
                let m = self.scan_min();
                self.cached_min = Some(m);
                m
            }
        };
        m.map(|id| (self.entries[id].key, id))
    }

    /// Number of live entries holding `key`.
    pub fn multiplicity(&self, key: i64) -> usize {
        self.alive
            .iter()
            .filter(|&&id| self.entries[id].key == key)
            .count()
    }

    pub fn delete_min(&mut self) -> Option<(i64, usize)> {
        let (key, id) = self.find_min()?;
        self.remove(id);
        Some((key, id))
    }

    /// Remove a specific live entry.
    pub fn remove(&mut self, id: usize) -> bool {
        if !self.is_alive(id) {
            return false;
        }
        self.entries[id].alive = false;
        let p = self.pos[id];
        self.alive.swap_remove(p);
        if let Some(&moved) = self.alive.get(p) {
            self.pos[moved] = p;
        }
        self.cached_min = None;
        true
    }

    pub fn decrease_key(&mut self, id: usize, key: i64) -> bool {
        match self.entries.get_mut(id) {
            Some(e) if e.alive && key <= e.key => e.key = key,
            _ => return false,
        }
        if let Some(Some(m)) = self.cached_min {
            if (key, id) < (self.entries[m].key, m) {
                self.cached_min = Some(Some(id));
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Op {
    Insert(i64),
    DeleteMin,
    /// Lower a live node's key by `delta`. `target` indexes the oracle's live
    /// list at replay time, so scripts stay valid whichever of several equal
    /// keys a delete-min removed.
    DecreaseKey { target: usize, delta: i64 },
    /// Build a side heap from these keys and meld it into the main heap.
    Meld(Vec<i64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub insert: f64,
    pub delete_min: f64,
    pub decrease_key: f64,
    pub meld: f64,
}

impl Weights {
    pub const MIXED: Weights = Weights {
        insert: 0.45,
        delete_min: 0.25,
        decrease_key: 0.25,
        meld: 0.05,
    };

    fn as_array(&self) -> [f64; 4] {
        [self.insert, self.delete_min, self.decrease_key, self.meld]
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let w = self.as_array();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || self.insert + self.meld <= 0.0 {
            return Err(OracleError::DegenerateWeights);
        }
        Ok(())
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self::MIXED
    }
}

impl FromStr for Weights {
    type Err = OracleError;

    /// `i:d:k:m`, e.g. `0.45:0.25:0.25:0.05` or `1:0:0:0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OracleError::BadWeights(s.to_string());
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [insert, delete_min, decrease_key, meld] = parts[..] else {
            return Err(bad());
        };
        let w = Weights {
            insert,
            delete_min,
            decrease_key,
            meld,
        };
        w.validate()?;
        Ok(w)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.insert, self.delete_min, self.decrease_key, self.meld
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpScript {
    pub seed: u64,
    pub ops: Vec<Op>,
}

/// Generate `n` operations deterministically from `seed`.
///
/// Delete-min and decrease-key are re-drawn while the heap would be empty.
pub fn gen_ops(seed: u64, n: usize, weights: Weights) -> Result<OpScript, OracleError> {
    weights.validate()?;
    if n == 0 {
        return Err(OracleError::EmptyScript);
    }
    let dist = WeightedIndex::new(weights.as_array()).map_err(|_| OracleError::DegenerateWeights)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut live = 0usize;
    let mut ops = Vec::with_capacity(n);
    while ops.len() < n {
        let op = match dist.sample(&mut rng) {
            0 => {
                live += 1;
                Op::Insert(rng.random_range(0..KEY_RANGE))
            }
            1 if live > 0 => {
                live -= 1;
                Op::DeleteMin
            }
            2 if live > 0 => Op::DecreaseKey {
                target: rng.random_range(0..live),
                delta: rng.random_range(0..=MAX_DECREASE),
            },
            3 => {
                let len = rng.random_range(1..=MAX_MELD_SEGMENT);
                live += len;
                Op::Meld((0..len).map(|_| rng.random_range(0..KEY_RANGE)).collect())
            }
            _ => continue,
        };
        ops.push(op);
    }
    Ok(OpScript { seed, ops })
}

#[derive(Debug, Clone, Copy)]
pub struct DiffOptions {
    /// Run a full audit every this many operations (0 disables).
    pub audit_every: usize,
    /// Check the root-rank multiplicity rule after every delete-min.
    pub audit_after_delete_min: bool,
    /// Compare pool-wide violation totals around every 3-way-join.
    pub check_join_neutrality: bool,
}

impl DiffOptions {
    /// Full audits after every operation for scripts of up to 2000 ops.
    pub fn for_len(n: usize) -> Self {
        let small = n <= 2000;
        DiffOptions {
            audit_every: usize::from(small),
            audit_after_delete_min: small,
            check_join_neutrality: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub seed: u64,
    pub ops: usize,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fail_at: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.fail_at.is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

#[derive(Debug, Clone, Default)]
pub struct DiffStats {
    pub telemetry: Telemetry,
    pub audits: u64,
    pub joins_checked: u64,
    pub join_mismatches: u64,
    pub max_len: usize,
}

#[derive(Debug, Clone)]
pub struct DiffOutcome {
    pub verdict: Verdict,
    pub stats: DiffStats,
}

#[derive(Debug, Default)]
struct JoinLedger {
    before: u64,
    checked: u64,
    mismatched: u64,
}

struct Replay {
    pool: Pool<i64, usize>,
    heap: crate::heap::HeapRef,
    oracle: NaivePQ,
    handles: Vec<Option<NodeHandle>>,
}

impl Replay {
    fn insert(&mut self, key: i64) -> Result<(), String> {
        let id = self.oracle.insert(key);
        let h = self.pool.insert(self.heap, key, id).map_err(|e| e.to_string())?;
        self.handles.push(Some(h));
        Ok(())
    }

    fn step(&mut self, op: &Op) -> Result<(), String> {
        match op {
            Op::Insert(k) => self.insert(*k)?,
            Op::Meld(keys) => {
                let side = self.pool.heap_new();
                for &k in keys {
                    let id = self.oracle.insert(k);
                    let h = self.pool.insert(side, k, id).map_err(|e| e.to_string())?;
                    self.handles.push(Some(h));
                }
                self.heap = self
                    .pool
                    .meld(self.heap, side)
                    .map_err(|e| e.to_string())?;
            }
            Op::DeleteMin => {
                let (ok, oid) = self.oracle.find_min().ok_or("oracle empty on delete-min")?;
                let unique = self.oracle.multiplicity(ok) == 1;
                let (hk, hid) = self
                    .pool
                    .delete_min(self.heap)
                    .map_err(|e| format!("heap delete-min: {e}"))?;
                if hk != ok {
                    return Err(format!("delete-min key {hk}, oracle {ok}"));
                }
                if unique && hid != oid {
                    return Err(format!("delete-min item {hid}, oracle {oid}"));
                }
                // equal keys: follow the heap's choice
                if !self.oracle.remove(hid) {
                    return Err(format!("heap returned dead item {hid}"));
                }
                self.handles[hid] = None;
            }
            Op::DecreaseKey { target, delta } => {
                let id = self
                    .oracle
                    .live_at(*target)
                    .ok_or_else(|| format!("decrease target {target} out of range"))?;
                let key = self.oracle.key(id).expect("live") - delta;
                self.oracle.decrease_key(id, key);
                let h = self.handles[id].ok_or("decrease on a dead handle")?;
                self.pool
                    .decrease_key(self.heap, h, key)
                    .map_err(|e| format!("heap decrease-key: {e}"))?;
            }
        }
        Ok(())
    }

    fn compare(&mut self) -> Result<(), String> {
        let hl = self.pool.size(self.heap).map_err(|e| e.to_string())?;
        if hl != self.oracle.len() {
            return Err(format!("size {hl}, oracle {}", self.oracle.len()));
        }
        let hm = self
            .pool
            .find_min(self.heap)
            .map_err(|e| e.to_string())?
            .map(|(k, _)| *k);
        let om = self.oracle.find_min().map(|(k, _)| k);
        if hm != om {
            return Err(format!("find-min {hm:?}, oracle {om:?}"));
        }
        Ok(())
    }
}

/// Replay `script` on a violation heap and on [`NaivePQ`], stopping at the
/// first divergence or audit failure.
pub fn run_differential(script: &OpScript, opts: DiffOptions) -> DiffOutcome {
    let mut pool = Pool::new();
    let heap = pool.heap_new();
    let ledger = Arc::new(Mutex::new(JoinLedger::default()));
    if opts.check_join_neutrality {
        let l = Arc::clone(&ledger);
        pool.set_join_probe(move |p: &Pool<i64, usize>, phase| {
            let theta2 = pool_theta2(p);
            let mut l = l.lock().expect("ledger");
            match phase {
                JoinPhase::Before => l.before = theta2,
                JoinPhase::After => {
                    l.checked += 1;
                    if theta2 != l.before {
                        l.mismatched += 1;
                    }
                }
            }
        });
    }
    let mut run = Replay {
        pool,
        heap,
        oracle: NaivePQ::new(),
        handles: Vec::new(),
    };
    let mut stats = DiffStats::default();
    let mut failure = None;

    for (i, op) in script.ops.iter().enumerate() {
        let mut res = run.step(op).and_then(|()| run.compare());
        if res.is_ok() {
            let periodic = opts.audit_every > 0 && (i + 1) % opts.audit_every == 0;
            let after_dm = opts.audit_after_delete_min && matches!(op, Op::DeleteMin);
            if periodic || after_dm {
                let audit_opts = AuditOptions {
                    root_multiplicity: after_dm,
                    ..AuditOptions::default()
                };
                stats.audits += 1;
                let report = full_audit(&run.pool, run.heap, audit_opts);
                if !report.is_clean() {
                    res = Err(format!("audit: {}", report.to_json()));
                }
            }
        }
        stats.max_len = stats.max_len.max(run.oracle.len());
        if let Err(detail) = res {
            failure = Some((i, detail));
            break;
        }
    }

    stats.telemetry = *run.pool.telemetry();
    {
        let l = ledger.lock().expect("ledger");
        stats.joins_checked = l.checked;
        stats.join_mismatches = l.mismatched;
    }
    let (fail_at, detail) = match failure {
        Some((i, d)) => (Some(i), Some(d)),
        None => (None, None),
    };
    DiffOutcome {
        verdict: Verdict {
            seed: script.seed,
            ops: script.ops.len(),
            verdict: if fail_at.is_some() { "fail" } else { "pass" },
            fail_at,
            detail,
        },
        stats,
    }
}
