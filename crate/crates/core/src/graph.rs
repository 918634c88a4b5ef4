//! Dense undirected simple graphs and their line-oriented text format.
//!
//! The text format is `n m` on the first line followed by `m` lines `u v`
//! with `u < v`, vertices 0-based. Blank lines and lines starting with `#`
//! are ignored when reading.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::bitset::{iter_bits, words_for, VertexSet, WORD};
use crate::error::{Error, Result};

/// Undirected simple graph on `0..n` with a bit-matrix adjacency.
#[derive(Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    edges: usize,
}

impl std::fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SimpleGraph(n={}, m={})", self.n, self.edges)
    }
}

impl SimpleGraph {
    /// The edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        SimpleGraph {
            n,
            stride,
            rows: vec![0; n * stride],
            edges: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    fn check(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn set(&mut self, u: usize, v: usize) -> bool {
        let (wu, bu) = (u * self.stride + v / WORD, 1u64 << (v % WORD));
        if self.rows[wu] & bu != 0 {
            return false;
        }
        self.rows[wu] |= bu;
        self.rows[v * self.stride + u / WORD] |= 1u64 << (u % WORD);
        self.edges += 1;
        true
    }

    /// Adds `uv`; returns whether the edge is new.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(self.set(u, v))
    }

    /// Removes `uv`; returns whether it was present.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || !self.has_edge(u, v) {
            return false;
        }
        self.rows[u * self.stride + v / WORD] &= !(1u64 << (v % WORD));
        self.rows[v * self.stride + u / WORD] &= !(1u64 << (u % WORD));
        self.edges -= 1;
        true
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && (self.rows[u * self.stride + v / WORD] >> (v % WORD)) & 1 == 1
    }

    /// Adjacency row of `v` as packed words.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(v))
    }

    /// Number of neighbours of `v` inside `set`.
    pub fn degree_in(&self, v: usize, set: &VertexSet) -> usize {
        self.row(v)
            .iter()
            .zip(set.words())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Edges as pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Edge union of two graphs on the same vertex set.
    pub fn union(&self, other: &SimpleGraph) -> Result<SimpleGraph> {
        if self.n != other.n {
            return Err(Error::InvalidParameter(format!(
                "union of graphs on {} and {} vertices",
                self.n, other.n
            )));
        }
        let rows: Vec<u64> = self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect();
        let twice: usize = rows.iter().map(|w| w.count_ones() as usize).sum();
        Ok(SimpleGraph {
            n: self.n,
            stride: self.stride,
            rows,
            edges: twice / 2,
        })
    }

    /// Subgraph induced by `vertices`, relabelled to `0..vertices.len()` in
    /// the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<SimpleGraph> {
        let mut g = SimpleGraph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            self.check(u)?;
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.set(i, j);
                }
            }
        }
        Ok(g)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 + self.edges * 12);
        let _ = writeln!(s, "{} {}", self.n, self.edges);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn read_from(r: impl BufRead) -> Result<SimpleGraph> {
        let mut lines = content_lines(r);
        let (g, _) = read_graph_lines(&mut lines)?;
        Ok(g)
    }

    pub fn from_text(text: &str) -> Result<SimpleGraph> {
        Self::read_from(text.as_bytes())
    }
}

/// Non-empty, non-comment lines tagged with their 1-based line number.
pub(crate) fn content_lines(r: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().filter_map(|(i, l)| match l {
        Err(e) => Some(Err(e.into())),
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

pub(crate) fn parse_usizes(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("expected a non-negative integer, got {t:?}"),
            })
        })
        .collect()
}

/// Reads the header and edge lines; returns the graph and the last line
/// number consumed.
pub(crate) fn read_graph_lines(
    lines: &mut impl Iterator<Item = Result<(usize, String)>>,
) -> Result<(SimpleGraph, usize)> {
    let (ln, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })??;
    let h = parse_usizes(ln, &header)?;
    if h.len() != 2 {
        return Err(Error::Parse {
            line: ln,
            msg: "header must be `n m`".into(),
        });
    }
    let (n, m) = (h[0], h[1]);
    let mut g = SimpleGraph::new(n);
    let mut last = ln;
    for _ in 0..m {
        let (ln, l) = lines.next().ok_or(Error::Parse {
            line: last + 1,
            msg: format!("expected {m} edge lines"),
        })??;
        last = ln;
        let e = parse_usizes(ln, &l)?;
        if e.len() != 2 {
            return Err(Error::Parse {
                line: ln,
                msg: "edge line must be `u v`".into(),
            });
        }
        if e[0] >= e[1] {
            return Err(Error::Parse {
                line: ln,
                msg: "edge endpoints must satisfy u < v".into(),
            });
        }
        if !g.add_edge(e[0], e[1]).map_err(|err| Error::Parse {
            line: ln,
            msg: err.to_string(),
        })? {
            return Err(Error::Parse {
                line: ln,
                msg: "duplicate edge".into(),
            });
        }
    }
    Ok((g, last))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_counted() {
        let mut g = SimpleGraph::new(100);
        assert!(g.add_edge(3, 70).unwrap());
        assert!(!g.add_edge(70, 3).unwrap());
        assert!(g.has_edge(70, 3));
        assert_eq!(g.edge_count(), 1);
        assert!(matches!(g.add_edge(5, 5), Err(Error::SelfLoop(5))));
        assert!(g.add_edge(0, 100).is_err());
        assert!(g.remove_edge(3, 70));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn text_round_trip() {
        let g = SimpleGraph::from_edges(5, [(0, 1), (1, 4), (2, 3)]).unwrap();
        let text = g.to_text();
        assert_eq!(text, "5 3\n0 1\n1 4\n2 3\n");
        assert_eq!(SimpleGraph::from_text(&text).unwrap(), g);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(SimpleGraph::from_text("3 1\n1 0\n").is_err());
        assert!(SimpleGraph::from_text("3 2\n0 1\n").is_err());
        assert!(SimpleGraph::from_text("3 2\n0 1\n0 1\n").is_err());
        assert!(SimpleGraph::from_text("3 1\n0 5\n").is_err());
        assert!(SimpleGraph::from_text("# c\n\n3 1\n0 2\n").is_ok());
    }

    #[test]
    fn union_and_induced() {
        let a = SimpleGraph::from_edges(4, [(0, 1)]).unwrap();
        let b = SimpleGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.edge_count(), 2);
        let h = u.induced(&[3, 2, 0]).unwrap();
        assert!(h.has_edge(0, 1));
        assert_eq!(h.edge_count(), 1);
    }
}
