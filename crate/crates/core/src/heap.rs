//! The violation heap.
//!
//! All nodes of a family of meldable heaps live in one [`Pool`]. A node
//! carries its key, an item, a rank and three link slots:
//!
//! - `down`: the last (newest) child, or nil.
//! - `next`: for a root, the next root of the circular root list; for a last
//!   child, the parent; for any other child, the next-newer sibling.
//! - `prev`: the next-older sibling, or nil for a first child and for roots.
//!
//! The last two children of a node are its *active* children. Ranks are
//! maintained so that `rank(z) <= ceil((r1 + r2) / 2) + 1` over the ranks of
//! the active children (a missing child counts as `-1`). Instead of cascading
//! cuts, decrease-key glues the larger-rank active child of the cut node into
//! its place and walks up the ancestors lowering ranks by one step at a time.
//! Delete-min consolidates by joining three roots of equal rank at a time.

use std::fmt;
use std::mem;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) const NIL: u32 = u32::MAX;

static NEXT_POOL_ID: AtomicU32 = AtomicU32::new(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum HeapError {
    #[error("stale or foreign node handle")]
    StaleHandle,
    #[error("heap reference is no longer valid")]
    StaleHeap,
    #[error("pool mismatch")]
    PoolMismatch,
    #[error("cannot meld a heap with itself")]
    SelfMeld,
    #[error("key increase not supported")]
    KeyIncrease,
    #[error("empty")]
    Empty,
}

pub type Result<T> = std::result::Result<T, HeapError>;

/// Address of a node inside a [`Pool`].
///
/// A handle stays valid until its node is removed by `delete_min`; after that
/// the slot's stamp moves on and every use of the handle is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeHandle {
    pool: u32,
    index: u32,
    stamp: u32,
}

impl NodeHandle {
    pub fn index(self) -> u32 {
        self.index
    }

    pub fn stamp(self) -> u32 {
        self.stamp
    }
}

impl fmt::Display for NodeHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.index, self.stamp)
    }
}

/// Identity of one heap inside a [`Pool`]. Consumed by [`Pool::meld`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeapRef {
    pool: u32,
    index: u32,
    stamp: u32,
}

/// Monotone operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Telemetry {
    pub comparisons: u64,
    pub inserts: u64,
    pub melds: u64,
    pub decrease_keys: u64,
    pub delete_mins: u64,
    pub joins: u64,
    pub cuts: u64,
    /// Rank decreases executed while propagating after a cut.
    pub rank_updates: u64,
    /// Propagation rank decreases whose size was not exactly one.
    pub nonunit_rank_steps: u64,
    /// Longest single propagation walk (nodes whose rank was lowered).
    pub longest_critical_path: u64,
    pub max_rank: u32,
}

/// Which side of a 3-way-join a probe is called on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinPhase {
    Before,
    After,
}

type JoinProbe<K, I> = Box<dyn FnMut(&Pool<K, I>, JoinPhase) + Send>;

#[derive(Debug)]
struct Node<K, I> {
    key: K,
    item: I,
    rank: u32,
    down: u32,
    next: u32,
    prev: u32,
    root: bool,
}

#[derive(Debug)]
struct Slot<K, I> {
    stamp: u32,
    node: Option<Node<K, I>>,
}

#[derive(Debug, Clone, Copy)]
struct HeapSlot {
    stamp: u32,
    live: bool,
    first: u32,
    count: usize,
}

/// Storage for all nodes of a family of meldable heaps.
pub struct Pool<K, I> {
    id: u32,
    slots: Vec<Slot<K, I>>,
    free: Vec<u32>,
    live: usize,
    heaps: Vec<HeapSlot>,
    free_heaps: Vec<u32>,
    rank_table: Vec<[u32; 2]>,
    scratch: Vec<u32>,
    telemetry: Telemetry,
    join_probe: Option<JoinProbe<K, I>>,
}

impl<K: fmt::Debug, I: fmt::Debug> fmt::Debug for Pool<K, I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pool")
            .field("id", &self.id)
            .field("live", &self.live)
            .field("slots", &self.slots.len())
            .field("telemetry", &self.telemetry)
            .finish()
    }
}

impl<K: Ord, I> Default for Pool<K, I> {
    fn default() -> Self {
        Self::new()
    }
}

/// Rank rule `ceil((r1 + r2) / 2) + 1` over the ranks of the last and
/// second-to-last child, with `None` standing for a missing child (rank -1).
pub fn rank_formula(last: Option<u32>, second: Option<u32>) -> u32 {
    let r1 = last.map_or(-1, i64::from);
    let r2 = second.map_or(-1, i64::from);
    // ceil(s / 2) == floor((s + 1) / 2), with floor semantics for s = -1.
    let ceil_half = (r1 + r2 + 1).div_euclid(2);
    (ceil_half + 1) as u32
}

/// Read-only view of a node, for inspection and auditing.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a, K, I> {
    pub handle: NodeHandle,
    pub key: &'a K,
    pub item: &'a I,
    pub rank: u32,
    pub is_root: bool,
    pub last_child: Option<NodeHandle>,
    pub next: Option<NodeHandle>,
    pub prev: Option<NodeHandle>,
}

impl<K: Ord, I> Pool<K, I> {
    pub fn new() -> Self {
        Pool {
            id: NEXT_POOL_ID.fetch_add(1, AtomicOrdering::Relaxed),
            slots: Vec::new(),
            free: Vec::new(),
            live: 0,
            heaps: Vec::new(),
            free_heaps: Vec::new(),
            rank_table: Vec::new(),
            scratch: Vec::new(),
            telemetry: Telemetry::default(),
            join_probe: None,
        }
    }

    /// Number of live nodes over all heaps of this pool.
    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn telemetry(&self) -> &Telemetry {
        &self.telemetry
    }

    pub fn reset_telemetry(&mut self) {
        self.telemetry = Telemetry::default();
    }

    /// Install a callback run immediately before and after every 3-way-join.
    pub fn set_join_probe<F>(&mut self, probe: F)
    where
        F: FnMut(&Pool<K, I>, JoinPhase) + Send + 'static,
    {
        self.join_probe = Some(Box::new(probe));
    }

    pub fn clear_join_probe(&mut self) {
        self.join_probe = None;
    }

    pub fn heap_new(&mut self) -> HeapRef {
        let slot = HeapSlot {
            stamp: 0,
            live: true,
            first: NIL,
            count: 0,
        };
        let index = match self.free_heaps.pop() {
            Some(i) => {
                let stamp = self.heaps[i as usize].stamp;
                self.heaps[i as usize] = HeapSlot { stamp, ..slot };
                i
            }
            None => {
                self.heaps.push(slot);
                (self.heaps.len() - 1) as u32
            }
        };
        HeapRef {
            pool: self.id,
            index,
            stamp: self.heaps[index as usize].stamp,
        }
    }

    pub fn size(&self, heap: HeapRef) -> Result<usize> {
        Ok(self.heap_slot(heap)?.count)
    }

    pub fn is_empty(&self, heap: HeapRef) -> Result<bool> {
        Ok(self.heap_slot(heap)?.count == 0)
    }

    pub fn is_live_heap(&self, heap: HeapRef) -> bool {
        self.heap_slot(heap).is_ok()
    }

    pub fn find_min(&self, heap: HeapRef) -> Result<Option<(&K, &I)>> {
        let first = self.heap_slot(heap)?.first;
        if first == NIL {
            return Ok(None);
        }
        let n = self.node(first);
        Ok(Some((&n.key, &n.item)))
    }

    pub fn find_min_handle(&self, heap: HeapRef) -> Result<Option<NodeHandle>> {
        let first = self.heap_slot(heap)?.first;
        Ok((first != NIL).then(|| self.handle(first)))
    }

    pub fn insert(&mut self, heap: HeapRef, key: K, item: I) -> Result<NodeHandle> {
        let hs = self.heap_slot(heap)?;
        let first = hs.first;
        let x = self.alloc(Node {
            key,
            item,
            rank: 0,
            down: NIL,
            next: NIL,
            prev: NIL,
            root: true,
        });
        self.telemetry.inserts += 1;
        if first == NIL {
            self.node_mut(x).next = x;
            self.set_first(heap, x);
        } else {
            self.add_root(heap, x, first);
        }
        self.heaps[heap.index as usize].count += 1;
        Ok(self.handle(x))
    }

    /// Combine two heaps of this pool. Both references are consumed; the
    /// returned heap holds every element and all node handles stay valid.
    pub fn meld(&mut self, h1: HeapRef, h2: HeapRef) -> Result<HeapRef> {
        if h1.pool != self.id || h2.pool != self.id {
            return Err(HeapError::PoolMismatch);
        }
        let a = self.heap_slot(h1)?;
        let b = self.heap_slot(h2)?;
        if h1.index == h2.index {
            return Err(HeapError::SelfMeld);
        }
        self.telemetry.melds += 1;
        let first = match (a.first, b.first) {
            (NIL, f) | (f, NIL) => f,
            (fa, fb) => {
                let an = self.node(fa).next;
                let bn = self.node(fb).next;
                self.node_mut(fa).next = bn;
                self.node_mut(fb).next = an;
                if self.less(fb, fa) {
                    fb
                } else {
                    fa
                }
            }
        };
        self.retire_heap(h2.index);
        let slot = &mut self.heaps[h1.index as usize];
        slot.stamp = slot.stamp.wrapping_add(1);
        slot.first = first;
        slot.count = a.count + b.count;
        Ok(HeapRef {
            pool: self.id,
            index: h1.index,
            stamp: slot.stamp,
        })
    }

    /// Lower the key of `x` to `new_key`.
    ///
    /// `x` must belong to `heap`; the pool has no parent pointers, so this is
    /// not verified.
    pub fn decrease_key(&mut self, heap: HeapRef, x: NodeHandle, new_key: K) -> Result<()> {
        let first = self.heap_slot(heap)?.first;
        let xi = self.resolve(x)?;
        if new_key > self.node(xi).key {
            return Err(HeapError::KeyIncrease);
        }
        self.telemetry.decrease_keys += 1;
        self.node_mut(xi).key = new_key;

        if self.node(xi).root {
            if xi != first && self.less(xi, first) {
                self.set_first(heap, xi);
            }
            return Ok(());
        }

        let parent = self.active_parent(xi);
        if let Some(p) = parent {
            if !self.less(xi, p) {
                return Ok(());
            }
        }

        self.cut_and_glue(xi, parent);
        self.telemetry.cuts += 1;
        let r = self.recalc_rank(xi);
        self.assign_rank(xi, r);
        let n = self.node_mut(xi);
        n.root = true;
        n.prev = NIL;
        self.add_root(heap, xi, first);

        if let Some(p) = parent {
            self.propagate_ranks(p);
        }
        Ok(())
    }

    pub fn delete_min(&mut self, heap: HeapRef) -> Result<(K, I)> {
        let hs = self.heap_slot(heap)?;
        let z = hs.first;
        if z == NIL {
            return Err(HeapError::Empty);
        }
        self.telemetry.delete_mins += 1;

        let mut roots = mem::take(&mut self.scratch);
        roots.clear();
        let mut r = self.node(z).next;
        while r != z {
            roots.push(r);
            r = self.node(r).next;
        }
        let children_start = roots.len();
        let mut c = self.node(z).down;
        while c != NIL {
            roots.push(c);
            c = self.node(c).prev;
        }
        roots[children_start..].reverse();
        for &c in &roots[children_start..] {
            let n = self.node_mut(c);
            n.root = true;
            n.prev = NIL;
            n.next = NIL;
        }

        let removed = self.release(z);
        self.heaps[heap.index as usize].count -= 1;

        let first = if roots.is_empty() {
            NIL
        } else {
            self.consolidate(&roots)
        };
        self.set_first(heap, first);
        self.scratch = roots;
        Ok(removed)
    }

    pub fn key(&self, x: NodeHandle) -> Result<&K> {
        Ok(&self.node(self.resolve(x)?).key)
    }

    pub fn item(&self, x: NodeHandle) -> Result<&I> {
        Ok(&self.node(self.resolve(x)?).item)
    }

    pub fn rank(&self, x: NodeHandle) -> Result<u32> {
        Ok(self.node(self.resolve(x)?).rank)
    }

    pub fn contains(&self, x: NodeHandle) -> bool {
        self.resolve(x).is_ok()
    }

    pub fn view(&self, x: NodeHandle) -> Result<NodeView<'_, K, I>> {
        let i = self.resolve(x)?;
        let n = self.node(i);
        let opt = |j: u32| (j != NIL).then(|| self.handle(j));
        Ok(NodeView {
            handle: x,
            key: &n.key,
            item: &n.item,
            rank: n.rank,
            is_root: n.root,
            last_child: opt(n.down),
            next: opt(n.next),
            prev: opt(n.prev),
        })
    }

    /// Children of `x`, oldest first.
    pub fn children(&self, x: NodeHandle) -> Result<Vec<NodeHandle>> {
        let i = self.resolve(x)?;
        let mut out = Vec::new();
        let mut c = self.node(i).down;
        while c != NIL {
            out.push(self.handle(c));
            c = self.node(c).prev;
        }
        out.reverse();
        Ok(out)
    }

    /// Roots of `heap` in list order, first root first.
    pub fn roots(&self, heap: HeapRef) -> Result<Vec<NodeHandle>> {
        let first = self.heap_slot(heap)?.first;
        let mut out = Vec::new();
        if first == NIL {
            return Ok(out);
        }
        let mut r = first;
        loop {
            out.push(self.handle(r));
            r = self.node(r).next;
            if r == first || out.len() > self.slots.len() {
                break;
            }
        }
        Ok(out)
    }

    /// Every live node of the pool, in slot order.
    pub fn live_handles(&self) -> impl Iterator<Item = NodeHandle> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.node.is_some())
            .map(|(i, s)| NodeHandle {
                pool: self.id,
                index: i as u32,
                stamp: s.stamp,
            })
    }

    /// The rank rule evaluated for `x`'s current active children.
    pub fn formula_rank(&self, x: NodeHandle) -> Result<u32> {
        Ok(self.recalc_rank(self.resolve(x)?))
    }

    /// Overwrite a stored rank without any checks. Exists for fault-injection
    /// tests of the auditor.
    #[doc(hidden)]
    pub fn debug_set_rank(&mut self, x: NodeHandle, rank: u32) -> Result<()> {
        let i = self.resolve(x)?;
        self.node_mut(i).rank = rank;
        Ok(())
    }

    // ----- internal primitives -----

    pub(crate) fn recalc_rank(&self, z: u32) -> u32 {
        let last = self.node(z).down;
        if last == NIL {
            return rank_formula(None, None);
        }
        let second = self.node(last).prev;
        rank_formula(
            Some(self.node(last).rank),
            (second != NIL).then(|| self.node(second).rank),
        )
    }

    /// Parent of `x` if `x` is one of its parent's last two children.
    pub(crate) fn active_parent(&self, x: u32) -> Option<u32> {
        let n = self.node(x);
        if n.root {
            return None;
        }
        let next = n.next;
        if self.node(next).down == x {
            return Some(next);
        }
        let after = self.node(next).next;
        (self.node(after).down == next).then_some(after)
    }

    /// Remove `x` from its sibling list, putting its larger-rank active child
    /// (if any) in its place. `parent` is known iff `x` is active.
    fn cut_and_glue(&mut self, x: u32, parent: Option<u32>) {
        let (x_prev, x_next, last) = {
            let n = self.node(x);
            (n.prev, n.next, n.down)
        };
        let x_is_last = parent.is_some_and(|p| self.node(p).down == x);

        let glued = if last == NIL {
            NIL
        } else {
            let second = self.node(last).prev;
            if second != NIL && self.node(second).rank > self.node(last).rank {
                // detach second-to-last
                let older = self.node(second).prev;
                self.node_mut(last).prev = older;
                if older != NIL {
                    self.node_mut(older).next = last;
                }
                second
            } else {
                self.node_mut(x).down = second;
                if second != NIL {
                    self.node_mut(second).next = x;
                }
                last
            }
        };

        if glued != NIL {
            let g = self.node_mut(glued);
            g.prev = x_prev;
            g.next = x_next;
            if x_prev != NIL {
                self.node_mut(x_prev).next = glued;
            }
            if x_is_last {
                self.node_mut(x_next).down = glued;
            } else {
                self.node_mut(x_next).prev = glued;
            }
        } else {
            if x_prev != NIL {
                self.node_mut(x_prev).next = x_next;
            }
            if x_is_last {
                self.node_mut(x_next).down = x_prev;
            } else {
                self.node_mut(x_next).prev = x_prev;
            }
        }
    }

    /// Walk up from `start` lowering ranks to their formula value while the
    /// formula yields less than the stored rank and the node is active.
    pub(crate) fn propagate_ranks(&mut self, start: u32) {
        let mut c = start;
        let mut steps = 0u64;
        loop {
            let old = self.node(c).rank;
            let new = self.recalc_rank(c);
            if new >= old {
                break;
            }
            debug_assert_eq!(old - new, 1, "propagation lowered a rank by more than one");
            if old - new != 1 {
                self.telemetry.nonunit_rank_steps += 1;
            }
            self.node_mut(c).rank = new;
            steps += 1;
            match self.active_parent(c) {
                Some(p) => c = p,
                None => break,
            }
        }
        self.telemetry.rank_updates += steps;
        self.telemetry.longest_critical_path = self.telemetry.longest_critical_path.max(steps);
    }

    /// Link three roots of equal rank under the one with the smallest key
    /// (earliest argument on ties). Returns the winner.
    pub(crate) fn three_way_join(&mut self, a: u32, b: u32, c: u32) -> u32 {
        let rank = self.node(a).rank;
        assert!(
            self.node(b).rank == rank && self.node(c).rank == rank,
            "3-way-join on unequal ranks"
        );
        self.run_probe(JoinPhase::Before);

        let mut w = a;
        if self.less(b, w) {
            w = b;
        }
        if self.less(c, w) {
            w = c;
        }
        let (z1, z2) = match w {
            _ if w == a => (b, c),
            _ if w == b => (a, c),
            _ => (a, b),
        };

        let last = self.node(w).down;
        if last != NIL {
            let second = self.node(last).prev;
            if second != NIL && self.node(second).rank > self.node(last).rank {
                self.swap_last_two(w, second, last);
            }
        }
        self.append_child(w, z1);
        self.append_child(w, z2);
        self.assign_rank(w, rank + 1);
        self.telemetry.joins += 1;

        self.run_probe(JoinPhase::After);
        w
    }

    /// Repeatedly 3-way-join equal-rank trees until at most two trees share a
    /// rank, then relink the survivors in ascending rank order. Returns the
    /// minimum root, which heads the rebuilt list.
    fn consolidate(&mut self, roots: &[u32]) -> u32 {
        let mut table = mem::take(&mut self.rank_table);
        let mut top = 0usize;
        for &t in roots {
            let mut t = t;
            loop {
                let r = self.node(t).rank as usize;
                if table.len() <= r {
                    table.resize(r + 1, [NIL, NIL]);
                }
                top = top.max(r);
                let bucket = &mut table[r];
                if bucket[0] == NIL {
                    bucket[0] = t;
                    break;
                }
                if bucket[1] == NIL {
                    bucket[1] = t;
                    break;
                }
                let [a, b] = mem::replace(bucket, [NIL, NIL]);
                t = self.three_way_join(a, b, t);
            }
        }

        let mut head = NIL;
        let mut tail = NIL;
        let mut min = NIL;
        for bucket in &mut table[..=top] {
            for t in mem::replace(bucket, [NIL, NIL]) {
                if t == NIL {
                    continue;
                }
                if head == NIL {
                    head = t;
                } else {
                    self.node_mut(tail).next = t;
                }
                tail = t;
                if min == NIL || self.less(t, min) {
                    min = t;
                }
            }
        }
        self.node_mut(tail).next = head;
        self.rank_table = table;
        min
    }

    fn swap_last_two(&mut self, parent: u32, second: u32, last: u32) {
        let older = self.node(second).prev;
        if older != NIL {
            self.node_mut(older).next = last;
        }
        let l = self.node_mut(last);
        l.prev = older;
        l.next = second;
        let s = self.node_mut(second);
        s.prev = last;
        s.next = parent;
        self.node_mut(parent).down = second;
    }

    fn append_child(&mut self, parent: u32, child: u32) {
        let last = self.node(parent).down;
        if last != NIL {
            self.node_mut(last).next = child;
        }
        let c = self.node_mut(child);
        c.root = false;
        c.prev = last;
        c.next = parent;
        self.node_mut(parent).down = child;
    }

    /// Put root `x` right after `first`, and in front if its key is smaller.
    fn add_root(&mut self, heap: HeapRef, x: u32, first: u32) {
        let after = self.node(first).next;
        self.node_mut(x).next = after;
        self.node_mut(first).next = x;
        if self.less(x, first) {
            self.set_first(heap, x);
        }
    }

    fn assign_rank(&mut self, x: u32, rank: u32) {
        self.node_mut(x).rank = rank;
        self.telemetry.max_rank = self.telemetry.max_rank.max(rank);
    }

    fn run_probe(&mut self, phase: JoinPhase) {
        if let Some(mut probe) = self.join_probe.take() {
            probe(self, phase);
            self.join_probe = Some(probe);
        }
    }

    fn less(&mut self, a: u32, b: u32) -> bool {
        self.telemetry.comparisons += 1;
        self.node(a).key < self.node(b).key
    }

    fn set_first(&mut self, heap: HeapRef, x: u32) {
        self.heaps[heap.index as usize].first = x;
    }

    fn retire_heap(&mut self, index: u32) {
        let slot = &mut self.heaps[index as usize];
        slot.stamp = slot.stamp.wrapping_add(1);
        slot.live = false;
        slot.first = NIL;
        slot.count = 0;
        self.free_heaps.push(index);
    }

    fn alloc(&mut self, node: Node<K, I>) -> u32 {
        self.live += 1;
        match self.free.pop() {
            Some(i) => {
                self.slots[i as usize].node = Some(node);
                i
            }
            None => {
                self.slots.push(Slot {
                    stamp: 0,
                    node: Some(node),
                });
                (self.slots.len() - 1) as u32
            }
        }
    }

    fn release(&mut self, x: u32) -> (K, I) {
        let slot = &mut self.slots[x as usize];
        let node = slot.node.take().expect("release of a free slot");
        slot.stamp = slot.stamp.wrapping_add(1);
        self.free.push(x);
        self.live -= 1;
        (node.key, node.item)
    }


    fn heap_slot(&self, heap: HeapRef) -> Result<HeapSlot> {
        if heap.pool != self.id {
            return Err(HeapError::PoolMismatch);
        }
        match self.heaps.get(heap.index as usize) {
            Some(s) if s.live && s.stamp == heap.stamp => Ok(*s),
            _ => Err(HeapError::StaleHeap),
        }
    }

    pub(crate) fn resolve(&self, x: NodeHandle) -> Result<u32> {
        if x.pool != self.id {
            return Err(HeapError::PoolMismatch);
        }
        match self.slots.get(x.index as usize) {
            Some(s) if s.stamp == x.stamp && s.node.is_some() => Ok(x.index),
            _ => Err(HeapError::StaleHandle),
        }
    }

    pub(crate) fn handle(&self, i: u32) -> NodeHandle {
        NodeHandle {
            pool: self.id,
            index: i,
            stamp: self.slots[i as usize].stamp,
        }
    }

    fn node(&self, i: u32) -> &Node<K, I> {
        self.slots[i as usize]
            .node
            .as_ref()
            .expect("link to a free slot")
    }

    fn node_mut(&mut self, i: u32) -> &mut Node<K, I> {
        self.slots[i as usize]
            .node
            .as_mut()
            .expect("link to a free slot")
    }
}

impl<I> Pool<i64, I> {
    /// Subtract `delta` from the key of `x`.
    pub fn decrease_key_by(&mut self, heap: HeapRef, x: NodeHandle, delta: i64) -> Result<()> {
        if delta < 0 {
            return Err(HeapError::KeyIncrease);
        }
        let key = *self.key(x)?;
        self.decrease_key(heap, x, key.saturating_sub(delta))
    }
}
