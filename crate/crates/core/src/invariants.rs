//! Full-scan structural auditor and potential-function telemetry.
//!
//! Every rule has a stable id so reports can be consumed by scripts:
//!
//! | id                  | checks                                                   |
//! |---------------------|----------------------------------------------------------|
//! | `structure`         | link slots, root flags, single reachability              |
//! | `count`             | reachable node count equals the heap's element count    |
//! | `first-root`        | the first root has a minimal key among roots            |
//! | `heap-order`        | parent key <= child key                                  |
//! | `rank-bound`        | rank <= ceil((r1 + r2) / 2) + 1 over the active children |
//! | `rank-shape`        | larger active rank >= rank, or rank-1 with sibling rank-1/rank-2 |
//! | `size-bound`        | subtree size >= F(rank), F(0) = F(1) = 1                 |
//! | `size-bound-strong` | subtree size >= F'(rank), F'(0) = 1, F'(1) = 2 (opt-in)  |
//! | `rank-log-bound`    | max rank <= ceil(log_phi(n)) + 2                         |
//! | `root-multiplicity` | no three roots share a rank (opt-in, after delete-min)   |

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::heap::{rank_formula, HeapRef, NodeHandle, Pool};

#[derive(Debug, Clone, Copy, Default)]
pub struct AuditOptions {
    /// Also check that no rank is held by three or more roots. Only valid
    /// right after a delete-min.
    pub root_multiplicity: bool,
    /// Also check the size bound with the stronger convention F(1) = 2.
    pub strong_size_bound: bool,
}

impl AuditOptions {
    pub fn after_delete_min() -> Self {
        AuditOptions {
            root_multiplicity: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    /// Slot index of the offending node, if the rule is about one node.
    pub node: Option<u32>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
    pub nodes: usize,
    pub max_rank: u32,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, rule: &str) -> usize {
        self.violations.iter().filter(|v| v.rule == rule).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("audit report serializes")
    }

    fn flag(&mut self, rule: &'static str, node: Option<NodeHandle>, detail: String) {
        self.violations.push(Violation {
            rule,
            node: node.map(NodeHandle::index),
            detail,
        });
    }
}

/// F(0) = 1, F(1) = `one`, F(i) = F(i-1) + F(i-2), saturating.
pub fn fibonacci_floor(rank: u32, one: u64) -> u64 {
    let (mut a, mut b) = (1u64, one);
    if rank == 0 {
        return a;
    }
    for _ in 1..rank {
        let c = a.saturating_add(b);
        a = b;
        b = c;
    }
    b
}

/// Largest rank an `n`-node heap may hold: ceil(log_phi(n)) + 2.
pub fn max_rank_bound(n: usize) -> u32 {
    if n <= 1 {
        return 2;
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    ((n as f64).ln() / phi.ln()).ceil() as u32 + 2
}

struct Scan {
    /// Preorder over all reachable nodes.
    order: Vec<NodeHandle>,
    parent: HashMap<NodeHandle, NodeHandle>,
    roots: Vec<NodeHandle>,
}

fn scan<K: Ord, I>(pool: &Pool<K, I>, heap: HeapRef, report: &mut AuditReport) -> Option<Scan> {
    let first = match pool.find_min_handle(heap) {
        Ok(f) => f,
        Err(e) => {
            report.flag("structure", None, format!("heap reference: {e}"));
            return None;
        }
    };
    let mut out = Scan {
        order: Vec::new(),
        parent: HashMap::new(),
        roots: Vec::new(),
    };
    let Some(first) = first else {
        return Some(out);
    };
    let limit = pool.live_count() + 1;
    let mut seen = HashSet::new();

    // circular root list
    let mut r = first;
    loop {
        let Ok(v) = pool.view(r) else {
            report.flag("structure", Some(r), "root list links to a dead slot".into());
            break;
        };
        if !seen.insert(r) {
            report.flag("structure", Some(r), "root reached twice".into());
            break;
        }
        if !v.is_root {
            report.flag("structure", Some(r), "node in root list not marked as root".into());
        }
        if v.prev.is_some() {
            report.flag("structure", Some(r), "root has a prev link".into());
        }
        out.roots.push(r);
        match v.next {
            Some(n) if n == first => break,
            Some(n) => r = n,
            None => {
                report.flag("structure", Some(r), "root list is not circular".into());
                break;
            }
        }
        if out.roots.len() > limit {
            break;
        }
    }

    // child lists
    let mut stack: Vec<NodeHandle> = out.roots.iter().rev().copied().collect();
    while let Some(p) = stack.pop() {
        out.order.push(p);
        let pv = pool.view(p).expect("visited nodes are live");
        let Some(last) = pv.last_child else { continue };
        let mut c = last;
        let mut expected_next = p;
        let mut kids = 0usize;
        loop {
            let Ok(cv) = pool.view(c) else {
                report.flag("structure", Some(p), "child list links to a dead slot".into());
                break;
            };
            if cv.next != Some(expected_next) {
                let what = if c == last {
                    "last child does not link to its parent"
                } else {
                    "sibling next/prev links disagree"
                };
                report.flag("structure", Some(c), what.into());
            }
            if cv.is_root {
                report.flag("structure", Some(c), "child marked as root".into());
            }
            if !seen.insert(c) {
                report.flag("structure", Some(c), "node reached twice".into());
                break;
            }
            out.parent.insert(c, p);
            stack.push(c);
            kids += 1;
            if kids > limit {
                break;
            }
            match cv.prev {
                Some(q) => {
                    expected_next = c;
                    c = q;
                }
                None => break,
            }
        }
    }
    Some(out)
}

fn active_ranks<K: Ord, I>(pool: &Pool<K, I>, z: NodeHandle) -> (Option<u32>, Option<u32>) {
    let v = pool.view(z).expect("live");
    let Some(last) = v.last_child.and_then(|c| pool.view(c).ok()) else {
        return (None, None);
    };
    let second = last.prev.and_then(|c| pool.rank(c).ok());
    (Some(last.rank), second)
}

fn subtree_sizes(scan: &Scan) -> HashMap<NodeHandle, usize> {
    let mut sizes: HashMap<NodeHandle, usize> = scan.order.iter().map(|&h| (h, 1)).collect();
    for h in scan.order.iter().rev() {
        if let Some(p) = scan.parent.get(h) {
            let s = sizes[h];
            *sizes.get_mut(p).expect("parent scanned") += s;
        }
    }
    sizes
}

/// Run every audit rule over `heap`.
pub fn full_audit<K, I>(pool: &Pool<K, I>, heap: HeapRef, opts: AuditOptions) -> AuditReport
where
    K: Ord + std::fmt::Debug,
{
    let mut report = AuditReport::default();
    let Some(scan) = scan(pool, heap, &mut report) else {
        return report;
    };
    report.nodes = scan.order.len();
    let count = pool.size(heap).unwrap_or(0);
    if count != scan.order.len() {
        report.flag(
            "count",
            None,
            format!("heap count {count}, reachable {}", scan.order.len()),
        );
    }

    if let Some(&first) = scan.roots.first() {
        let fk = pool.key(first).expect("live");
        for &r in &scan.roots[1..] {
            let rk = pool.key(r).expect("live");
            if rk < fk {
                report.flag(
                    "first-root",
                    Some(r),
                    format!("root key {rk:?} below first root key {fk:?}"),
                );
            }
        }
    }

    let sizes = subtree_sizes(&scan);
    for &z in &scan.order {
        let v = pool.view(z).expect("live");
        report.max_rank = report.max_rank.max(v.rank);

        if let Some(&p) = scan.parent.get(&z) {
            let pk = pool.key(p).expect("live");
            if pk > v.key {
                report.flag(
                    "heap-order",
                    Some(z),
                    format!("key {:?} below parent key {pk:?}", v.key),
                );
            }
        }

        let (r1, r2) = active_ranks(pool, z);
        let bound = rank_formula(r1, r2);
        if v.rank > bound {
            report.flag(
                "rank-bound",
                Some(z),
                format!("rank {} exceeds formula value {bound}", v.rank),
            );
        }
        if let (Some(a), Some(b)) = (r1, r2) {
            let (hi, lo) = (a.max(b), a.min(b));
            let rz = v.rank;
            let ok = hi >= rz || (hi + 1 == rz && (lo + 1 == rz || lo + 2 == rz));
            if !ok {
                report.flag(
                    "rank-shape",
                    Some(z),
                    format!("rank {rz} with active child ranks ({hi}, {lo})"),
                );
            }
        }

        let s = sizes[&z] as u64;
        let f = fibonacci_floor(v.rank, 1);
        if s < f {
            report.flag(
                "size-bound",
                Some(z),
                format!("subtree size {s} below F({}) = {f}", v.rank),
            );
        }
        if opts.strong_size_bound {
            let f = fibonacci_floor(v.rank, 2);
            if s < f {
                report.flag(
                    "size-bound-strong",
                    Some(z),
                    format!("subtree size {s} below F'({}) = {f}", v.rank),
                );
            }
        }
    }

    let bound = max_rank_bound(report.nodes);
    if report.nodes > 0 && report.max_rank > bound {
        report.flag(
            "rank-log-bound",
            None,
            format!("max rank {} above {bound} for {} nodes", report.max_rank, report.nodes),
        );
    }

    if opts.root_multiplicity {
        let mut per_rank: HashMap<u32, usize> = HashMap::new();
        for &r in &scan.roots {
            *per_rank.entry(pool.rank(r).expect("live")).or_default() += 1;
        }
        let mut crowded: Vec<_> = per_rank.into_iter().filter(|&(_, c)| c >= 3).collect();
        crowded.sort_unstable();
        for (rank, c) in crowded {
            report.flag("root-multiplicity", None, format!("{c} roots of rank {rank}"));
        }
    }
    report
}

/// The measurable part of the amortized potential: critical nodes, twice the
/// total violation and the number of trees.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PotentialSnapshot {
    pub gamma: u64,
    pub theta2: u64,
    pub tau: u64,
    pub subtree_sizes: HashMap<NodeHandle, usize>,
}

impl PotentialSnapshot {
    /// 3 gamma + 2 theta + tau, without the history-dependent term.
    pub fn partial_potential(&self) -> u64 {
        3 * self.gamma + self.theta2 + self.tau
    }
}

fn degree<K: Ord, I>(pool: &Pool<K, I>, z: NodeHandle) -> u64 {
    let mut d = 0;
    let mut c = pool.view(z).ok().and_then(|v| v.last_child);
    while let Some(h) = c {
        d += 1;
        c = pool.view(h).ok().and_then(|v| v.prev);
    }
    d
}

/// max(0, d - 2r), i.e. twice the node's violation.
fn violation2(degree: u64, rank: u32) -> u64 {
    degree.saturating_sub(2 * u64::from(rank))
}

fn is_critical<K: Ord, I>(pool: &Pool<K, I>, z: NodeHandle) -> bool {
    let (r1, r2) = active_ranks(pool, z);
    let sum = r1.map_or(-1, i64::from) + r2.map_or(-1, i64::from);
    sum.rem_euclid(2) == 1
}

pub fn potential_snapshot<K: Ord, I>(pool: &Pool<K, I>, heap: HeapRef) -> PotentialSnapshot {
    let mut report = AuditReport::default();
    let Some(scan) = scan(pool, heap, &mut report) else {
        return PotentialSnapshot::default();
    };
    let mut snap = PotentialSnapshot {
        tau: scan.roots.len() as u64,
        ..Default::default()
    };
    for &z in &scan.order {
        let rank = pool.rank(z).expect("live");
        snap.theta2 += violation2(degree(pool, z), rank);
        let active = scan.parent.contains_key(&z) && {
            let v = pool.view(z).expect("live");
            // last child, or second-to-last
            let next = v.next.expect("child has next");
            scan.parent.get(&z) == Some(&next)
                || pool.view(next).ok().and_then(|n| n.next) == scan.parent.get(&z).copied()
        };
        if active && is_critical(pool, z) {
            snap.gamma += 1;
        }
    }
    snap.subtree_sizes = subtree_sizes(&scan);
    snap
}

/// Twice the total violation over every live node of the pool, regardless of
/// which heap or root list the node currently sits in. Usable mid-operation,
/// e.g. from a join probe during consolidation.
pub fn pool_theta2<K: Ord, I>(pool: &Pool<K, I>) -> u64 {
    pool.live_handles()
        .map(|z| violation2(degree(pool, z), pool.rank(z).expect("live")))
        .sum()
}

/// True iff the violation total is unchanged between two snapshots that
/// bracket a single 3-way-join.
pub fn assert_join_neutrality(before: &PotentialSnapshot, after: &PotentialSnapshot) -> bool {
    before.theta2 == after.theta2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(keys: &[i64]) -> (Pool<i64, ()>, HeapRef, Vec<NodeHandle>) {
        let mut pool = Pool::new();
        let h = pool.heap_new();
        let hs = keys.iter().map(|&k| pool.insert(h, k, ()).unwrap()).collect();
        (pool, h, hs)
    }

    #[test]
    fn fibonacci_conventions() {
        let weak: Vec<u64> = (0..8).map(|r| fibonacci_floor(r, 1)).collect();
        assert_eq!(weak, vec![1, 1, 2, 3, 5, 8, 13, 21]);
        let strong: Vec<u64> = (0..6).map(|r| fibonacci_floor(r, 2)).collect();
        assert_eq!(strong, vec![1, 2, 3, 5, 8, 13]);
        assert_eq!(fibonacci_floor(200, 1), u64::MAX);
    }

    #[test]
    fn log_bound_values() {
        assert_eq!(max_rank_bound(0), 2);
        assert_eq!(max_rank_bound(1), 2);
        // log_phi(10^6) = 28.7
        assert_eq!(max_rank_bound(1_000_000), 31);
    }

    #[test]
    fn empty_heap_report() {
        let (pool, h, _) = build(&[]);
        let r = full_audit(&pool, h, AuditOptions::after_delete_min());
        assert!(r.is_clean());
        assert_eq!(r.nodes, 0);
        assert_eq!(r.to_json(), r#"{"violations":[],"nodes":0,"max_rank":0}"#);
    }

    #[test]
    fn clean_after_random_build() {
        let keys: Vec<i64> = (0..1000).map(|i| (i * 7919) % 1009).collect();
        let (mut pool, h, _) = build(&keys);
        assert!(full_audit(&pool, h, AuditOptions::default()).is_clean());
        pool.delete_min(h).unwrap();
        let r = full_audit(&pool, h, AuditOptions::after_delete_min());
        assert!(r.is_clean(), "{r:?}");
        assert_eq!(r.nodes, 999);
        assert!(r.max_rank > 0);
    }

    #[test]
    fn corrupted_rank_fires_rank_bound_only() {
        let keys: Vec<i64> = (0..100).collect();
        let (mut pool, h, hs) = build(&keys);
        pool.delete_min(h).unwrap();
        let victim = hs[50];
        let r = pool.rank(victim).unwrap();
        pool.debug_set_rank(victim, r + 5).unwrap();
        let rep = full_audit(&pool, h, AuditOptions::default());
        let rank_hits: Vec<_> = rep
            .violations
            .iter()
            .filter(|v| v.rule == "rank-bound")
            .collect();
        assert_eq!(rank_hits.len(), 1, "{rep:?}");
        assert_eq!(rank_hits[0].node, Some(victim.index()));
        // the inflated rank also breaks the derived rules; nothing else fires
        for v in &rep.violations {
            assert!(
                matches!(v.rule, "rank-bound" | "size-bound" | "rank-shape"),
                "{v:?}"
            );
        }
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(json["nodes"], 99);
        assert!(json["violations"][0]["rule"].is_string());
    }

    #[test]
    fn snapshot_of_singletons() {
        let (pool, h, _) = build(&[4, 2, 9, 1, 7]);
        let s = potential_snapshot(&pool, h);
        assert_eq!((s.gamma, s.theta2, s.tau), (0, 0, 5));
        assert!(s.subtree_sizes.values().all(|&n| n == 1));
    }

    #[test]
    fn join_keeps_theta2_and_drops_two_trees() {
        let (mut pool, h, _) = build(&[0, 5, 7, 9]);
        let before = potential_snapshot(&pool, h);
        pool.delete_min(h).unwrap();
        let after = potential_snapshot(&pool, h);
        // one fewer node (the removed min) and one join: 3 trees -> 1
        assert_eq!(before.tau - 1, 3);
        assert_eq!(after.tau, 1);
        assert!(assert_join_neutrality(&before, &after));
        assert_eq!(after.subtree_sizes.values().max(), Some(&3));
        assert!(assert_join_neutrality(&after, &after));
    }

    #[test]
    fn theta2_counts_excess_degree() {
        assert_eq!(violation2(6, 2), 2);
        assert_eq!(violation2(3, 2), 0);
        assert_eq!(violation2(0, 0), 0);
    }

    #[test]
    fn pool_theta2_matches_snapshot() {
        let keys: Vec<i64> = (0..300).map(|i| (i * 31) % 97).collect();
        let (mut pool, h, hs) = build(&keys);
        pool.delete_min(h).unwrap();
        for (i, &x) in hs.iter().enumerate().skip(1).step_by(3) {
            pool.decrease_key(h, x, -(i as i64)).unwrap();
        }
        let snap = potential_snapshot(&pool, h);
        assert_eq!(pool_theta2(&pool), snap.theta2);
        assert_eq!(snap.tau as usize, pool.roots(h).unwrap().len());
    }
}
