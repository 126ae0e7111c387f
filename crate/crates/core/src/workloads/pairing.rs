//! Two-pass pairing heap over an index arena.

use super::{BenchQueue, Counters};

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Node {
    key: i64,
    item: u32,
    child: usize,
    sibling: usize,
    /// Parent if this is the leftmost child, else the left sibling.
    prev: usize,
}

#[derive(Debug, Default)]
pub struct PairingHeap {
    nodes: Vec<Node>,
    root: Option<usize>,
    len: usize,
    comparisons: u64,
    links: u64,
    cuts: u64,
    pairs: Vec<usize>,
}

impl PairingHeap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Link two root trees; returns the new root.
    fn link(&mut self, a: usize, b: usize) -> usize {
        self.comparisons += 1;
        self.links += 1;
        let (top, sub) = if self.nodes[b].key < self.nodes[a].key {
            (b, a)
        } else {
            (a, b)
        };
        let old = self.nodes[top].child;
        self.nodes[sub].sibling = old;
        self.nodes[sub].prev = top;
        if old != NIL {
            self.nodes[old].prev = sub;
        }
        self.nodes[top].child = sub;
        top
    }

    fn merge_root(&mut self, x: usize) {
        self.root = Some(match self.root {
            None => x,
            Some(r) => self.link(r, x),
        });
    }

    fn detach(&mut self, x: usize) {
        let prev = self.nodes[x].prev;
        let sib = self.nodes[x].sibling;
        if self.nodes[prev].child == x {
            self.nodes[prev].child = sib;
        } else {
            self.nodes[prev].sibling = sib;
        }
        if sib != NIL {
            self.nodes[sib].prev = prev;
        }
        self.nodes[x].sibling = NIL;
        self.nodes[x].prev = NIL;
    }

    /// Pair children left to right, then fold the pairs right to left.
    fn combine_children(&mut self, first: usize) -> Option<usize> {
        let mut pairs = std::mem::take(&mut self.pairs);
        pairs.clear();
        let mut c = first;
        while c != NIL {
            let d = self.nodes[c].sibling;
            let next = if d == NIL { NIL } else { self.nodes[d].sibling };
            self.nodes[c].sibling = NIL;
            self.nodes[c].prev = NIL;
            if d == NIL {
                pairs.push(c);
            } else {
                self.nodes[d].sibling = NIL;
                self.nodes[d].prev = NIL;
                pairs.push(self.link(c, d));
            }
            c = next;
        }
        let mut acc = pairs.pop();
        while let Some(t) = pairs.pop() {
            acc = Some(self.link(t, acc.expect("accumulator")));
        }
        self.pairs = pairs;
        acc
    }
}

impl BenchQueue for PairingHeap {
    type Handle = usize;

    fn name(&self) -> &'static str {
        "pairing"
    }

    fn push(&mut self, key: i64, item: u32) -> usize {
        let x = self.nodes.len();
        self.nodes.push(Node {
            key,
            item,
            child: NIL,
            sibling: NIL,
            prev: NIL,
        });
        self.len += 1;
        self.merge_root(x);
        x
    }

    fn decrease(&mut self, x: usize, key: i64) {
        assert!(key <= self.nodes[x].key, "key increase");
        self.nodes[x].key = key;
        if Some(x) == self.root {
            return;
        }
        self.cuts += 1;
        self.detach(x);
        self.merge_root(x);
    }

    fn pop(&mut self) -> Option<(i64, u32)> {
        let r = self.root?;
        self.len -= 1;
        let first = self.nodes[r].child;
        self.nodes[r].child = NIL;
        self.root = self.combine_children(first);
        Some((self.nodes[r].key, self.nodes[r].item))
    }

    fn peek_key(&self) -> Option<i64> {
        self.root.map(|r| self.nodes[r].key)
    }

    fn len(&self) -> usize {
        self.len
    }

    fn meld_batch(&mut self, entries: &[(i64, u32)]) -> Vec<usize> {
        let mut side: Option<usize> = None;
        let mut out = Vec::with_capacity(entries.len());
        for &(key, item) in entries {
            let x = self.nodes.len();
            self.nodes.push(Node {
                key,
                item,
                child: NIL,
                sibling: NIL,
                prev: NIL,
            });
            side = Some(match side {
                None => x,
                Some(s) => self.link(s, x),
            });
            out.push(x);
        }
        self.len += entries.len();
        if let Some(s) = side {
            self.merge_root(s);
        }
        out
    }

    fn counters(&self) -> Counters {
        Counters {
            comparisons: self.comparisons,
            links: self.links,
            cuts: self.cuts,
            ..Counters::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pass_order() {
        let mut h = PairingHeap::new();
        let hs: Vec<usize> = (0..20).map(|i| h.push(100 - i, i as u32)).collect();
        h.decrease(hs[0], 3);
        h.decrease(hs[5], 1);
        let extra = h.meld_batch(&[(50, 90), (2, 91)]);
        h.decrease(extra[0], 0);
        let out: Vec<i64> = std::iter::from_fn(|| h.pop().map(|p| p.0)).collect();
        let mut expect: Vec<i64> = (0..20).map(|i| 100 - i).collect();
        expect[0] = 3;
        expect[5] = 1;
        expect.extend([0, 2]);
        expect.sort();
        assert_eq!(out, expect);
        assert_eq!(h.len(), 0);
    }
}
