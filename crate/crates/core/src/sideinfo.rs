//! Side-information graphs and the exact bound quantities around them:
//! MAIS, the feedback vertex number, disjoint cycle packing, scalar binary
//! minrank, and the decodability check for linear index codes.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::caps::{CapExceeded, Caps};
use crate::digraph::{acyclic_on_mask, Digraph};
use crate::linalg::{rank_of_words, BinMatrix, LinalgError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigError {
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("receiver {0} cannot hold its own message as side information")]
    SelfLoop(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct SigParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error("cycle enumeration overflowed its limit of {limit}")]
    CycleOverflow { limit: usize },
}

/// Side-information graph on messages `1..=n`. Edge `(j, i)` means receiver
/// `i` already holds `x_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SIGraph {
    n: usize,
    side: Vec<BTreeSet<usize>>,
    graph: Digraph,
}

impl SIGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, SigError> {
        let mut side = vec![BTreeSet::new(); n];
        for (j, i) in edges {
            for v in [j, i] {
                if v == 0 || v > n {
                    return Err(SigError::VertexOutOfRange { vertex: v, n });
                }
            }
            if i == j {
                return Err(SigError::SelfLoop(i));
            }
            side[i - 1].insert(j);
        }
        let graph = Digraph::new(
            (1..=n).map(|v| v.to_string()),
            side.iter()
                .enumerate()
                .flat_map(|(i, s)| s.iter().map(move |&j| (j.to_string(), (i + 1).to_string()))),
        )
        .expect("edges validated above");
        Ok(SIGraph { n, side, graph })
    }

    /// Builds from side-information sets, `sets[i - 1] = S(i)`.
    pub fn from_side_info(sets: &[Vec<usize>]) -> Result<Self, SigError> {
        let n = sets.len();
        Self::new(
            n,
            sets.iter()
                .enumerate()
                .flat_map(|(i, s)| s.iter().map(move |&j| (j, i + 1))),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `S(i)` for receiver `i` (1-based).
    pub fn side_info(&self, i: usize) -> &BTreeSet<usize> {
        &self.side[i - 1]
    }

    pub fn has_edge(&self, j: usize, i: usize) -> bool {
        self.side[i - 1].contains(&j)
    }

    /// Edges `(j, i)` sorted by receiver then sender.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.side
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (j, i + 1)))
    }

    pub fn edge_count(&self) -> usize {
        self.side.iter().map(BTreeSet::len).sum()
    }

    /// The underlying digraph; vertex index `v - 1` is message `v`.
    pub fn digraph(&self) -> &Digraph {
        &self.graph
    }

    /// Successor masks over 0-based vertices.
    fn masks(&self) -> Vec<u64> {
        self.graph.successor_masks().expect("at most 64 vertices")
    }

    /// Renders the `.sig` text format.
    pub fn to_sig(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for i in 1..=self.n {
            let list = self.side[i - 1].iter().join(" ");
            if list.is_empty() {
                writeln!(s, "{i} :").unwrap();
            } else {
                writeln!(s, "{i} : {list}").unwrap();
            }
        }
        s
    }

    /// All labeled digraphs on `n` vertices, in edge-bitmask order.
    pub fn all_on(n: usize) -> impl Iterator<Item = SIGraph> {
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|j| (1..=n).filter(move |&i| i != j).map(move |i| (j, i)))
            .collect();
        let count = 1u64 << pairs.len();
        (0..count).map(move |mask| {
            SIGraph::new(
                n,
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &e)| e),
            )
            .expect("valid pairs")
        })
    }
}

impl fmt::Display for SIGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sig())
    }
}

impl FromStr for SIGraph {
    type Err = SigParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, message: String| SigParseError { line, message };
        let mut n = None;
        let mut sets: Vec<Option<Vec<usize>>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some(count) = n else {
                let value = line
                    .strip_prefix("n=")
                    .or_else(|| line.strip_prefix("n ="))
                    .ok_or_else(|| err(lineno, "expected header `n=<count>`".into()))?;
                let count: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| err(lineno, format!("bad vertex count {value:?}")))?;
                n = Some(count);
                sets = vec![None; count];
                continue;
            };
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| err(lineno, "expected `i : j k ...`".into()))?;
            let i: usize = head
                .trim()
                .parse()
                .map_err(|_| err(lineno, format!("bad receiver {:?}", head.trim())))?;
            if i == 0 || i > count {
                return Err(err(lineno, format!("receiver {i} out of range 1..={count}")));
            }
            let list = tail
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| err(lineno, format!("bad vertex {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if sets[i - 1].replace(list).is_some() {
                return Err(err(lineno, format!("receiver {i} listed twice")));
            }
        }
        if n.is_none() {
            return Err(err(0, "missing header `n=<count>`".into()));
        }
        let sets: Vec<Vec<usize>> = sets.into_iter().map(Option::unwrap_or_default).collect();
        SIGraph::from_side_info(&sets).map_err(|e| err(0, e.to_string()))
    }
}

/// Result of the minimum feedback vertex set search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FvsResult {
    pub tau: usize,
    /// Every minimum feedback vertex set, 1-based, lexicographic.
    pub sets: Vec<Vec<usize>>,
}

/// Smallest vertex sets whose removal leaves `g` acyclic, found by trying
/// subsets in increasing size.
pub fn min_feedback_vertex_sets(g: &SIGraph, caps: &Caps) -> Result<FvsResult, CapExceeded> {
    CapExceeded::check("vertex count for feedback vertex search", g.n, caps.fvs_max_n.min(64))?;
    let succ = g.masks();
    let full = if g.n == 64 { u64::MAX } else { (1u64 << g.n) - 1 };
    for k in 0..=g.n {
        let sets: Vec<Vec<usize>> = (0..g.n)
            .combinations(k)
            .filter(|c| {
                let removed = c.iter().fold(0u64, |m, &v| m | 1 << v);
                acyclic_on_mask(&succ, full & !removed)
            })
            .map(|c| c.into_iter().map(|v| v + 1).collect())
            .collect();
        if !sets.is_empty() {
            return Ok(FvsResult { tau: k, sets });
        }
    }
    unreachable!("removing every vertex leaves an acyclic graph")
}

/// Size of the largest vertex set inducing an acyclic subgraph.
pub fn mais(g: &SIGraph, caps: &Caps) -> Result<usize, CapExceeded> {
    Ok(g.n - min_feedback_vertex_sets(g, caps)?.tau)
}

/// Maximum number of vertex-disjoint directed cycles.
pub fn max_disjoint_cycles(g: &SIGraph, caps: &Caps) -> Result<usize, BoundsError> {
    CapExceeded::check("vertex count for cycle packing", g.n, 64)?;
    let cycles = g.digraph().enumerate_cycles(caps.cycle_limit);
    if cycles.overflow {
        return Err(BoundsError::CycleOverflow {
            limit: caps.cycle_limit,
        });
    }
    let masks: BTreeSet<u64> = cycles
        .items
        .iter()
        .map(|c| c.vertices().iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let masks: Vec<u64> = masks.into_iter().collect();
    let covered = masks.iter().fold(0u64, |a, &m| a | m);
    let mut best = 0;
    pack_cycles(&masks, covered, 0, &mut best);
    Ok(best)
}

fn pack_cycles(cycles: &[u64], avail: u64, current: usize, best: &mut usize) {
    *best = (*best).max(current);
    if current + avail.count_ones() as usize / 2 <= *best {
        return;
    }
    // the smallest available vertex that still lies on some usable cycle
    let usable: Vec<u64> = cycles.iter().copied().filter(|&c| c & !avail == 0).collect();
    let live = usable.iter().fold(0u64, |a, &c| a | c);
    if live == 0 {
        return;
    }
    let v = live.trailing_zeros();
    for &c in usable.iter().filter(|&&c| c >> v & 1 == 1) {
        pack_cycles(&usable, avail & !c, current + 1, best);
    }
    pack_cycles(&usable, live & !(1 << v), current, best);
}

fn check_columns(g: &SIGraph, b: &BinMatrix) -> Result<(), LinalgError> {
    if b.cols() != g.n {
        return Err(LinalgError::DimensionMismatch {
            expected: g.n,
            found: b.cols(),
        });
    }
    Ok(())
}

/// Receivers that cannot decode their message from `B` and their side
/// information: those `v` where removing `v` from the columns outside
/// `S(v)` does not drop the rank.
pub fn decoding_failures(g: &SIGraph, b: &BinMatrix) -> Result<Vec<usize>, LinalgError> {
    check_columns(g, b)?;
    let mut failures = Vec::new();
    for v in 1..=g.n {
        let outside: Vec<usize> = (1..=g.n)
            .filter(|u| !g.side_info(v).contains(u))
            .map(|u| u - 1)
            .collect();
        let without_v: Vec<usize> = outside.iter().copied().filter(|&u| u != v - 1).collect();
        let r_all = b.column_rank_of_subset(&outside)?;
        let r_rest = b.column_rank_of_subset(&without_v)?;
        if r_all != r_rest + 1 {
            failures.push(v);
        }
    }
    Ok(failures)
}

/// `true` iff every receiver can decode from the broadcast `B x`.
pub fn is_valid_index_code(g: &SIGraph, b: &BinMatrix) -> Result<bool, LinalgError> {
    Ok(decoding_failures(g, b)?.is_empty())
}

/// Validity check on column words, for the enumeration loops.
fn valid_on_words(columns: &[u64], outside: &[u64]) -> bool {
    outside.iter().enumerate().all(|(v, &mask)| {
        let rank = |m: u64| {
            rank_of_words((0..columns.len()).filter(|&u| m >> u & 1 == 1).map(|u| columns[u]))
        };
        rank(mask) == rank(mask & !(1 << v)) + 1
    })
}

/// Calls `visit` with every `k x n` matrix in reduced row-echelon form with
/// no zero rows, i.e. once per `k`-dimensional subspace of GF(2)^n. Stops
/// early when `visit` returns `false`; returns `false` in that case.
pub fn for_each_subspace(n: usize, k: usize, mut visit: impl FnMut(&BinMatrix) -> bool) -> bool {
    for pivots in (0..n).combinations(k) {
        // free entries: (row, col) with col > pivot[row] and col not a pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &pivots;
                (p + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut m = BinMatrix::zeros(k, n);
        for (r, &p) in pivots.iter().enumerate() {
            m.set(r, p, true);
        }
        for bits in 0u64..(1u64 << free.len()) {
            for (b, &(r, c)) in free.iter().enumerate() {
                m.set(r, c, bits >> b & 1 == 1);
            }
            if !visit(&m) {
                return false;
            }
        }
    }
    true
}

/// Minimum length of a valid scalar linear index code over GF(2), with a
/// witness code in RREF.
pub fn minrank2(g: &SIGraph, caps: &Caps) -> Result<(usize, BinMatrix), CapExceeded> {
    CapExceeded::check("vertex count for minrank search", g.n, caps.minrank_max_n.min(16))?;
    let outside: Vec<u64> = (1..=g.n)
        .map(|v| {
            (1..=g.n)
                .filter(|u| !g.side_info(v).contains(u))
                .fold(0u64, |m, u| m | 1 << (u - 1))
        })
        .collect();
    for k in 0..=g.n {
        let mut witness = None;
        for_each_subspace(g.n, k, |m| {
            let cols = m.column_words().expect("k <= 64 rows");
            if valid_on_words(&cols, &outside) {
                witness = Some(m.clone());
                false
            } else {
                true
            }
        });
        if let Some(w) = witness {
            return Ok((k, w));
        }
    }
    unreachable!("the identity code is always valid")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub mais: usize,
    pub tau: usize,
    pub nu: usize,
    /// Present when `n` is within the minrank cap.
    pub minrank2: Option<usize>,
    pub all_min_fvs: Vec<Vec<usize>>,
}

pub fn bounds(g: &SIGraph, caps: &Caps) -> Result<BoundsReport, BoundsError> {
    let fvs = min_feedback_vertex_sets(g, caps)?;
    let nu = max_disjoint_cycles(g, caps)?;
    let minrank2 = if g.n <= caps.minrank_max_n {
        Some(minrank2(g, caps)?.0)
    } else {
        None
    };
    Ok(BoundsReport {
        n: g.n,
        mais: g.n - fvs.tau,
        tau: fvs.tau,
        nu,
        minrank2,
        all_min_fvs: fvs.sets,
    })
}
