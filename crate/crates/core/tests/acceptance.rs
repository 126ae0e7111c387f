//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use violation_heap::heap::HeapError;
use violation_heap::oracle::{gen_ops, run_differential, DiffOptions, DiffStats, Weights};
use violation_heap::workloads::{dijkstra, dijkstra_with, gen_graph, heapsort_bench, HeapKind, ViolationQueue};
use violation_heap::{full_audit, AuditOptions, Pool, Telemetry};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

#[derive(Default)]
struct Totals {
    scripts: u64,
    failures: Vec<String>,
    telemetry: Vec<Telemetry>,
    joins_checked: u64,
    join_mismatches: u64,
    audits: u64,
}

impl Totals {
    fn add(&mut self, verdict_ok: bool, verdict: String, stats: &DiffStats) {
        self.scripts += 1;
        if !verdict_ok {
            self.failures.push(verdict);
        }
        self.telemetry.push(stats.telemetry);
        self.joins_checked += stats.joins_checked;
        self.join_mismatches += stats.join_mismatches;
        self.audits += stats.audits;
    }

    fn sum(&self, f: impl Fn(&Telemetry) -> u64) -> u64 {
        self.telemetry.iter().map(f).sum()
    }

    fn max_rank(&self) -> u32 {
        self.telemetry.iter().map(|t| t.max_rank).max().unwrap_or(0)
    }
}

fn fuzz(seeds: std::ops::RangeInclusive<u64>, ops: usize, opts: DiffOptions) -> Totals {
    let mut totals = Totals::default();
    for seed in seeds {
        let script = gen_ops(seed, ops, Weights::MIXED).expect("valid weights");
        let out = run_differential(&script, opts);
        totals.add(out.verdict.passed(), out.verdict.to_json(), &out.stats);
    }
    totals
}

/// 1. 200 seeds x 10,000 mixed ops, all verdicts pass.
fn differential(big: &Totals) -> Outcome {
    outcome(
        big.failures.is_empty() && big.scripts == 200,
        format!(
            "{} scripts, {} failures{}",
            big.scripts,
            big.failures.len(),
            big.failures.first().map(|f| format!(": {f}")).unwrap_or_default()
        ),
    )
}

/// 2. 50 seeds x 2,000 ops with a full audit after every operation.
fn invariant_suite(small: &Totals) -> Outcome {
    outcome(
        small.failures.is_empty() && small.audits >= 50 * 2000,
        format!(
            "{} scripts, {} audits, {} failures{}",
            small.scripts,
            small.audits,
            small.failures.len(),
            small.failures.first().map(|f| format!(": {f}")).unwrap_or_default()
        ),
    )
}

/// 3. theta2 equal before and after each of >= 10^5 joins.
fn join_neutrality(small: &Totals, extra: &Totals) -> Outcome {
    let checked = small.joins_checked + extra.joins_checked;
    let bad = small.join_mismatches + extra.join_mismatches;
    let failures = small.failures.len() + extra.failures.len();
    outcome(
        checked >= 100_000 && bad == 0 && failures == 0,
        format!("{checked} joins checked, {bad} mismatches"),
    )
}

/// 4. Every propagation rank change is a decrease by exactly 1. The mixed
/// scripts rarely break heap order with an active node, so the Dijkstra runs
/// of criterion 7 are counted as well.
fn propagation_steps(all: &[&Totals], sssp: &Telemetry) -> Outcome {
    let steps: u64 = all.iter().map(|t| t.sum(|t| t.rank_updates)).sum();
    let bad: u64 = all.iter().map(|t| t.sum(|t| t.nonunit_rank_steps)).sum();
    let total_bad = bad + sssp.nonunit_rank_steps;
    outcome(
        total_bad == 0 && steps + sssp.rank_updates > 0,
        format!(
            "fuzz: {steps} steps, {bad} not of size 1; dijkstra: {} steps, {} not of size 1",
            sssp.rank_updates, sssp.nonunit_rank_steps
        ),
    )
}

/// 5. Heapsort of 10^6 keys: max rank <= 1.45 log2(n) + 5.
fn rank_at_scale() -> Outcome {
    let n = 1_000_000usize;
    let start = Instant::now();
    let (rec, _) = match heapsort_bench(n, 2024, HeapKind::Violation) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let bound = 1.45 * (n as f64).log2() + 5.0;
    outcome(
        f64::from(rec.max_rank) <= bound,
        format!(
            "max rank {} <= {bound:.2} ({:.2}s)",
            rec.max_rank,
            start.elapsed().as_secs_f64()
        ),
    )
}

/// 6. No rank held by three roots after any delete-min of criterion 2.
fn root_multiplicity(small: &Totals) -> Outcome {
    let dms = small.sum(|t| t.delete_mins);
    let crowded = small
        .failures
        .iter()
        .filter(|f| f.contains("root-multiplicity"))
        .count();
    outcome(
        crowded == 0 && small.failures.is_empty() && dms > 0,
        format!("{dms} delete-mins audited, {crowded} with >= 3 roots of one rank"),
    )
}

/// 7. 50 random graphs (n = 10^4, m = 10^5): distances equal across heaps.
fn dijkstra_equivalence(sssp: &mut Telemetry) -> Outcome {
    let start = Instant::now();
    let mut mismatched = Vec::new();
    for seed in 1..=50u64 {
        let g = gen_graph(seed, 10_000, 100_000, 1000).expect("valid graph");
        let mut q = ViolationQueue::new();
        let v = dijkstra(&g, 0, &mut q).expect("dijkstra");
        let t = q.pool().telemetry();
        sssp.rank_updates += t.rank_updates;
        sssp.nonunit_rank_steps += t.nonunit_rank_steps;
        let (b, _) = dijkstra_with(&g, 0, HeapKind::Binary).expect("dijkstra");
        if v != b {
            mismatched.push(seed);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "50 graphs, mismatching seeds {mismatched:?} ({:.2}s)",
            start.elapsed().as_secs_f64()
        ),
    )
}

/// 8. In criterion 1's runs: rank-update steps per decrease-key <= 10.
fn amortized_sanity(big: &Totals) -> Outcome {
    let steps = big.sum(|t| t.rank_updates);
    let dks = big.sum(|t| t.decrease_keys);
    let joins = big.sum(|t| t.joins);
    let dms = big.sum(|t| t.delete_mins);
    let ratio = steps as f64 / dks.max(1) as f64;
    let joins_per_dm = joins as f64 / dms.max(1) as f64;
    let max_rank = big.max_rank();
    outcome(
        dks > 0 && ratio <= 10.0,
        format!(
            "rank updates/decrease-key = {ratio:.4} (<= 10); joins/delete-min = {joins_per_dm:.3} \
             vs 3*max rank = {} (reported)",
            3 * max_rank
        ),
    )
}

/// 9. Operations on retired handles error and leave the heap clean.
fn handle_safety() -> Outcome {
    let mut pool: Pool<i64, u32> = Pool::new();
    let h = pool.heap_new();
    let handles: Vec<_> = (0..64).map(|i| pool.insert(h, (i * 37) % 64, i as u32).unwrap()).collect();
    let mut retired = Vec::new();
    for _ in 0..20 {
        let (_, item) = pool.delete_min(h).unwrap();
        retired.push(handles[item as usize]);
    }
    // reuse freed slots so stale handles point at live indices
    let fresh: Vec<_> = (0..20).map(|i| pool.insert(h, 1000 + i, 100).unwrap()).collect();
    let reused = retired
        .iter()
        .filter(|r| fresh.iter().any(|f| f.index() == r.index()))
        .count();

    let mut attempts = 0;
    let mut errors = 0;
    for &r in &retired {
        let results = [
            pool.decrease_key(h, r, -1_000_000).err(),
            pool.key(r).err(),
            pool.rank(r).err(),
            pool.item(r).err(),
            pool.view(r).err(),
            pool.children(r).err(),
            pool.decrease_key_by(h, r, 1).err(),
        ];
        for e in results {
            attempts += 1;
            if e == Some(HeapError::StaleHandle) {
                errors += 1;
            }
        }
    }
    let a = pool.heap_new();
    let b = pool.heap_new();
    let m = pool.meld(a, b).unwrap();
    for e in [
        pool.insert(a, 1, 0).err(),
        pool.delete_min(b).err(),
        pool.size(a).err(),
        pool.meld(a, m).err(),
    ] {
        attempts += 1;
        if e == Some(HeapError::StaleHeap) {
            errors += 1;
        }
    }
    let report = full_audit(&pool, h, AuditOptions::default());
    let drained: Vec<i64> = std::iter::from_fn(|| pool.delete_min(h).ok().map(|p| p.0)).collect();
    let sorted = drained.windows(2).all(|w| w[0] <= w[1]) && drained.len() == 64;
    outcome(
        errors == attempts && report.is_clean() && sorted && reused > 0,
        format!(
            "{errors}/{attempts} rejected, {reused} stale handles over reused slots, audit clean: {}",
            report.is_clean()
        ),
    )
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as --nocapture; filters aside,
    // the suite always runs in full.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let t0 = Instant::now();
    let big = fuzz(1..=200, 10_000, DiffOptions::for_len(10_000));
    let t_big = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let small_opts = DiffOptions {
        check_join_neutrality: true,
        ..DiffOptions::for_len(2000)
    };
    let small = fuzz(1..=50, 2000, small_opts);
    let t_small = t1.elapsed().as_secs_f64();

    // more join-instrumented scripts until at least 10^5 joins are covered
    let mut extra = Totals::default();
    let mut seed = 1000u64;
    while small.joins_checked + extra.joins_checked < 100_000 && seed < 5000 {
        let opts = DiffOptions {
            audit_every: 0,
            audit_after_delete_min: false,
            check_join_neutrality: true,
        };
        let script = gen_ops(seed, 2000, Weights::MIXED).expect("valid weights");
        let out = run_differential(&script, opts);
        extra.add(out.verdict.passed(), out.verdict.to_json(), &out.stats);
        seed += 1;
    }

    let mut sssp = Telemetry::default();
    let dijkstra_outcome = dijkstra_equivalence(&mut sssp);

    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 differential correctness", {
            let mut o = differential(&big);
            o.detail += &format!(" ({t_big:.2}s)");
            o
        }),
        ("2 invariant suite", {
            let mut o = invariant_suite(&small);
            o.detail += &format!(" ({t_small:.2}s)");
            o
        }),
        ("3 join neutrality", join_neutrality(&small, &extra)),
        ("4 propagation step size", propagation_steps(&[&big, &small, &extra], &sssp)),
        ("5 rank bound at scale", rank_at_scale()),
        ("6 post-consolidation multiplicity", root_multiplicity(&small)),
        ("7 dijkstra equivalence", dijkstra_outcome),
        ("8 amortized-cost sanity", amortized_sanity(&big)),
        ("9 handle safety", handle_safety()),
    ];

    let mut failed = 0;
    for (name, o) in &criteria {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed in {:.2}s",
        criteria.len() - failed,
        criteria.len(),
        t0.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
