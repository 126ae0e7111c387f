//! Array binary heap with position tracking for decrease-key.

use super::{BenchQueue, Counters};

#[derive(Debug, Default)]
pub struct IndexedBinaryHeap {
    /// (key, handle) in heap order.
    heap: Vec<(i64, usize)>,
    /// heap position per handle; `usize::MAX` once popped.
    pos: Vec<usize>,
    items: Vec<u32>,
    comparisons: u64,
}

impl IndexedBinaryHeap {
    pub fn new() -> Self {
        Self::default()
    }

    fn less(&mut self, a: usize, b: usize) -> bool {
        self.comparisons += 1;
        self.heap[a].0 < self.heap[b].0
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a].1] = a;
        self.pos[self.heap[b].1] = b;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.less(i, parent) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && self.less(r, l) { r } else { l };
            if !self.less(c, i) {
                break;
            }
            self.swap(i, c);
            i = c;
        }
    }
}

impl BenchQueue for IndexedBinaryHeap {
    type Handle = usize;

    fn name(&self) -> &'static str {
        "binary"
    }

    fn push(&mut self, key: i64, item: u32) -> usize {
        let h = self.items.len();
        self.items.push(item);
        self.pos.push(self.heap.len());
        self.heap.push((key, h));
        self.sift_up(self.heap.len() - 1);
        h
    }

    fn decrease(&mut self, h: usize, key: i64) {
        let i = self.pos[h];
        assert!(i != usize::MAX, "decrease on a popped handle");
        assert!(key <= self.heap[i].0, "key increase");
        self.heap[i].0 = key;
        self.sift_up(i);
    }

    fn pop(&mut self) -> Option<(i64, u32)> {
        if self.heap.is_empty() {
            return None;
        }
        let last = self.heap.len() - 1;
        self.swap(0, last);
        let (key, h) = self.heap.pop().expect("non-empty");
        self.pos[h] = usize::MAX;
        if !self.heap.is_empty() {
            self.sift_down(0);
        }
        Some((key, self.items[h]))
    }

    fn peek_key(&self) -> Option<i64> {
        self.heap.first().map(|e| e.0)
    }

    fn len(&self) -> usize {
        self.heap.len()
    }

    fn meld_batch(&mut self, entries: &[(i64, u32)]) -> Vec<usize> {
        entries.iter().map(|&(k, i)| self.push(k, i)).collect()
    }

    fn counters(&self) -> Counters {
        Counters {
            comparisons: self.comparisons,
            ..Counters::default()
        }
    }
}
