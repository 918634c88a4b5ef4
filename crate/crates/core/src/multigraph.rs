//! Labelled (t+1)-partite multigraphs: the host `K`, its random subgraph,
//! the contracted power-path `Q`, and patterns for moment calculations.
//!
//! Class 0 is special. An edge between class 0 and a class `i ≥ 1` carries a
//! label in `[−k] ∪ [k]`, and parallel edges between the same pair must have
//! distinct labels, so such a pair has multiplicity at most `2k`. All other
//! edges join distinct classes `i, j ≥ 1`, are plain and have multiplicity one.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{content_lines, parse_usizes};

/// Edge label: `0` is plain, otherwise a value in `[−k] ∪ [k]`.
pub type Label = i32;

pub const PLAIN: Label = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub u: usize,
    pub v: usize,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledMultigraph {
    k: usize,
    class_count: usize,
    class_of: Vec<usize>,
    edges: Vec<LabeledEdge>,
    seen: HashSet<(usize, usize, Label)>,
}

impl LabeledMultigraph {
    /// `class_of[v]` is the class of vertex `v`, in `0..class_count`.
    pub fn new(k: usize, class_count: usize, class_of: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidMultigraph("k must be positive".into()));
        }
        if let Some(&c) = class_of.iter().find(|&&c| c >= class_count) {
            return Err(Error::InvalidMultigraph(format!(
                "class {c} out of range for {class_count} classes"
            )));
        }
        Ok(LabeledMultigraph {
            k,
            class_count,
            class_of,
            edges: Vec::new(),
            seen: HashSet::new(),
        })
    }

    /// Empty host with classes `V_0` of size `n0` and `V_1..V_t` of size `n`;
    /// vertices of `V_0` come first, then each `V_i` in turn.
    pub fn with_class_sizes(k: usize, sizes: &[usize]) -> Result<Self> {
        let class_of = sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
            .collect();
        Self::new(k, sizes.len(), class_of)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of classes `t+1`.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn t(&self) -> usize {
        self.class_count - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.class_of.len()
    }

    /// Total edge multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn classes(&self) -> &[usize] {
        &self.class_of
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &c in &self.class_of {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: Label) -> Result<()> {
        let n = self.vertex_count();
        for x in [u, v] {
            if x >= n {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
        }
        let (u, v) = (u.min(v), u.max(v));
        let (cu, cv) = (self.class_of[u], self.class_of[v]);
        if cu == cv {
            return Err(Error::InvalidMultigraph(format!(
                "edge {u}-{v} lies inside class {cu}"
            )));
        }
        if cu == 0 || cv == 0 {
            if label == PLAIN || label.unsigned_abs() as usize > self.k {
                return Err(Error::InvalidMultigraph(format!(
                    "edge {u}-{v} at class 0 needs a label in [-{k}, {k}] \\ {{0}}, got {label}",
                    k = self.k
                )));
            }
            if !self.seen.insert((u, v, label)) {
                return Err(Error::InvalidMultigraph(format!(
                    "label {label} repeated between {u} and {v}"
                )));
            }
        } else {
            if label != PLAIN {
                return Err(Error::InvalidMultigraph(format!(
                    "edge {u}-{v} between non-zero classes must be plain"
                )));
            }
            if !self.seen.insert((u, v, PLAIN)) {
                return Err(Error::InvalidMultigraph(format!("parallel plain edge {u}-{v}")));
            }
        }
        self.edges.push(LabeledEdge { u, v, label });
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize, label: Label) -> bool {
        self.seen.contains(&(u.min(v), u.max(v), label))
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let (u, v) = (u.min(v), u.max(v));
        self.edges.iter().filter(|e| e.u == u && e.v == v).count()
    }

    /// Degree counted with multiplicity.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.u == v || e.v == v).count()
    }

    /// Format: header `v e k`, a line of class ids, then `u v label` lines
    /// with `0` meaning plain.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.vertex_count(), self.edge_count(), self.k);
        let classes: Vec<String> = self.class_of.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "{}", classes.join(" "));
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.u, e.v, e.label);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = content_lines(r);
        let (ln, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })??;
        let h = parse_usizes(ln, &header)?;
        if h.len() != 3 {
            return Err(Error::Parse {
                line: ln,
                msg: "header must be `v e k`".into(),
            });
        }
        let (nv, ne, k) = (h[0], h[1], h[2]);
        let class_of = if nv == 0 {
            Vec::new()
        } else {
            let (ln, l) = lines.next().ok_or(Error::Parse {
                line: ln + 1,
                msg: "missing class line".into(),
            })??;
            let c = parse_usizes(ln, &l)?;
            if c.len() != nv {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("expected {nv} class ids, got {}", c.len()),
                });
            }
            c
        };
        let class_count = class_of.iter().copied().max().map_or(1, |m| m + 1);
        let mut g = Self::new(k, class_count, class_of)?;
        for _ in 0..ne {
            let (ln, l) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("expected {ne} edge lines"),
            })??;
            let parts: Vec<&str> = l.split_whitespace().collect();
            let parsed = (parts.len() == 3)
                .then(|| Some((parts[0].parse().ok()?, parts[1].parse().ok()?, parts[2].parse().ok()?)))
                .flatten();
            let (u, v, label): (usize, usize, Label) = parsed.ok_or_else(|| Error::Parse {
                line: ln,
                msg: "edge line must be `u v label`".into(),
            })?;
            g.add_edge(u, v, label).map_err(|e| Error::Parse {
                line: ln,
                msg: e.to_string(),
            })?;
        }
        Ok(g)
    }
}

/// The multigraph `Q(s, k)`: `P^k_s` on `x_1..x_s` with `x_1..x_k` and
/// `x_{s−k+1}..x_s` contracted into `x_0`, loops at `x_0` removed.
///
/// Vertex `0` is `x_0` (class 0); vertex `i ∈ 1..=t`, `t = s − 2k`, is
/// `x_{k+i}` in class `i`. An edge from `x_0` that came from `x_i` is
/// labelled `i`, and one that came from `x_{s+1−i}` is labelled `−i`.
pub fn build_contracted_q(s: usize, k: usize) -> Result<LabeledMultigraph> {
    if k == 0 || s < 4 * k {
        return Err(Error::InvalidParameter(format!("Q needs s >= 4k, got s={s}, k={k}")));
    }
    let t = s - 2 * k;
    let mut q = LabeledMultigraph::new(k, t + 1, (0..=t).collect())?;
    // Path position x (1-based) to the contracted id and the label it carries.
    let node = |x: usize| -> (usize, Label) {
        if x <= k {
            (0, x as Label)
        } else if x > s - k {
            (0, -((s + 1 - x) as Label))
        } else {
            (x - k, PLAIN)
        }
    };
    for y in 2..=s {
        for x in y.saturating_sub(k).max(1)..y {
            let ((a, la), (b, lb)) = (node(x), node(y));
            if a == 0 && b == 0 {
                continue;
            }
            let label = if a == 0 { la } else if b == 0 { lb } else { PLAIN };
            q.add_edge(a, b, label)?;
        }
    }
    Ok(q)
}
