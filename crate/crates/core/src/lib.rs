//! Violation heaps: a mergeable priority queue with O(1) amortized insert,
//! meld and decrease-key and O(log n) amortized delete-min, together with a
//! structural auditor, a brute-force oracle for differential testing, baseline
//! heaps and benchmark workloads.

pub mod cli;
pub mod heap;
pub mod invariants;
pub mod oracle;
pub mod workloads;

pub use heap::{HeapError, HeapRef, JoinPhase, NodeHandle, NodeView, Pool, Telemetry};

pub use invariants::{full_audit, potential_snapshot, AuditOptions, AuditReport, PotentialSnapshot};
