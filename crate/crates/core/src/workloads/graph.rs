//! Weighted digraphs: random generation and DIMACS shortest-path input.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WorkloadError;

/// Distance sentinel for unreachable vertices.
pub const INFINITY: i64 = i64::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<(u32, i64)>>,
    edges: usize,
    max_weight: i64,
}

impl Graph {
    pub fn new(n: usize) -> Result<Self, WorkloadError> {
        if n == 0 {
            return Err(WorkloadError::EmptyGraph);
        }
        Ok(Graph {
            adjacency: vec![Vec::new(); n],
            edges: 0,
            max_weight: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.edges
    }

    /// Add the arc `u -> v`. Rejects negative weights and weights large
    /// enough that a simple path could overflow the distance type.
    pub fn add_edge(&mut self, u: usize, v: usize, w: i64) -> Result<(), WorkloadError> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(WorkloadError::VertexOutOfRange(u.max(v), n));
        }
        if w < 0 {
            return Err(WorkloadError::NegativeWeight(w));
        }
        if (n as i128 - 1) * i128::from(w) >= i128::from(INFINITY) {
            return Err(WorkloadError::WeightOverflow(w));
        }
        self.adjacency[u].push((v as u32, w));
        self.edges += 1;
        self.max_weight = self.max_weight.max(w);
        Ok(())
    }

    pub fn neighbors(&self, u: usize) -> &[(u32, i64)] {
        &self.adjacency[u]
    }

    pub fn max_weight(&self) -> i64 {
        self.max_weight
    }
}

/// Random multigraph: `m` arcs drawn uniformly over ordered vertex pairs,
/// weights uniform in `[0, wmax]`.
pub fn gen_graph(seed: u64, n: usize, m: usize, wmax: i64) -> Result<Graph, WorkloadError> {
    let mut g = Graph::new(n)?;
    if wmax < 1 {
        return Err(WorkloadError::NegativeWeight(wmax));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        let w = rng.random_range(0..=wmax);
        g.add_edge(u, v, w)?;
    }
    Ok(g)
}

pub fn read_dimacs(path: impl AsRef<Path>) -> Result<Graph, WorkloadError> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| WorkloadError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_dimacs(&text)
}

/// Parse DIMACS shortest-path text: `c` comments, one `p sp n m` header and
/// `a u v w` arcs with 1-based vertices.
pub fn parse_dimacs(text: &str) -> Result<Graph, WorkloadError> {
    let err = |line: usize, msg: String| WorkloadError::Parse { line, msg };
    let mut graph: Option<(Graph, usize)> = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let mut tok = raw.split_whitespace();
        match tok.next() {
            None | Some("c") => continue,
            Some("p") => {
                if graph.is_some() {
                    return Err(err(line, "duplicate problem line".into()));
                }
                let fields: Vec<&str> = tok.collect();
                let [kind, n, m] = fields[..] else {
                    return Err(err(line, "expected 'p sp <n> <m>'".into()));
                };
                if kind != "sp" {
                    return Err(err(line, format!("unsupported problem type {kind:?}")));
                }
                let n: usize = n.parse().map_err(|_| err(line, format!("bad vertex count {n:?}")))?;
                let m: usize = m.parse().map_err(|_| err(line, format!("bad arc count {m:?}")))?;
                let g = Graph::new(n).map_err(|e| err(line, e.to_string()))?;
                graph = Some((g, m));
            }
            Some("a") => {
                let Some((g, _)) = graph.as_mut() else {
                    return Err(err(line, "arc before problem line".into()));
                };
                let fields: Vec<&str> = tok.collect();
                let [u, v, w] = fields[..] else {
                    return Err(err(line, "expected 'a <u> <v> <w>'".into()));
                };
                let vertex = |s: &str| -> Result<usize, WorkloadError> {
                    let x: usize = s.parse().map_err(|_| err(line, format!("bad vertex {s:?}")))?;
                    if x == 0 || x > g.n() {
                        return Err(err(line, format!("vertex {x} out of range 1..={}", g.n())));
                    }
                    Ok(x - 1)
                };
                let (u, v) = (vertex(u)?, vertex(v)?);
                let w: i64 = w.parse().map_err(|_| err(line, format!("bad weight {w:?}")))?;
                g.add_edge(u, v, w).map_err(|e| err(line, e.to_string()))?;
            }
            Some(other) => return Err(err(line, format!("unknown line type {other:?}"))),
        }
    }
    let Some((g, m)) = graph else {
        return Err(err(last_line, "missing problem line".into()));
    };
    if g.m() != m {
        return Err(err(
            last_line,
            format!("arc count mismatch: header {m}, found {}", g.m()),
        ));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = gen_graph(3, 4, 6, 10).unwrap();
        assert_eq!(a, gen_graph(3, 4, 6, 10).unwrap());
        assert_eq!(a.m(), 6);
        assert!(a.max_weight() <= 10);
        let single = gen_graph(1, 1, 0, 10).unwrap();
        assert_eq!((single.n(), single.m()), (1, 0));
        assert!(single.neighbors(0).is_empty());
        assert_eq!(gen_graph(1, 0, 0, 10), Err(WorkloadError::EmptyGraph));
    }

    #[test]
    fn edge_validation() {
        let mut g = Graph::new(3).unwrap();
        assert_eq!(g.add_edge(0, 1, -1), Err(WorkloadError::NegativeWeight(-1)));
        assert!(matches!(g.add_edge(0, 3, 1), Err(WorkloadError::VertexOutOfRange(..))));
        assert!(matches!(g.add_edge(0, 1, i64::MAX / 2 + 1), Err(WorkloadError::WeightOverflow(_))));
    }

    #[test]
    fn dimacs_minimal() {
        let g = parse_dimacs("c tiny\np sp 2 1\na 1 2 7\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.neighbors(0), &[(1, 7)]);
    }

    #[test]
    fn dimacs_errors_carry_lines() {
        let e = parse_dimacs("c x\na 1 2 7\np sp 2 1\n").unwrap_err();
        assert!(matches!(e, WorkloadError::Parse { line: 2, .. }), "{e}");
        let e = parse_dimacs("p sp 2 3\na 1 2 7\na 2 1 1\n").unwrap_err();
        assert!(e.to_string().contains("arc count mismatch"), "{e}");
        let e = parse_dimacs("p sp 2 1\na 1 3 7\n").unwrap_err();
        assert!(matches!(e, WorkloadError::Parse { line: 2, .. }), "{e}");
        let e = parse_dimacs("p sp x 1\n").unwrap_err();
        assert!(matches!(e, WorkloadError::Parse { line: 1, .. }));
        let e = parse_dimacs("p sp 2 1\na 1 2 -4\n").unwrap_err();
        assert!(e.to_string().contains("negative"), "{e}");
        assert!(parse_dimacs("c only\n").is_err());
    }
}
