//! Simple directed graphs with string labels.
//!
//! Vertices are stored densely, sorted by a numeric-aware label order
//! ("2" < "10", "3" < "3'"), so index order is label order and every
//! enumeration that walks successors in index order comes out
//! lexicographic by label.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("self-loop at vertex {0:?}")]
    SelfLoop(String),
    #[error("duplicate edge {0:?} -> {1:?}")]
    DuplicateEdge(String, String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// Compares labels chunk by chunk, with digit runs compared as numbers and
/// digit runs sorting before text.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, sa), (db, sb)) in ca.iter().zip(&cb) {
        let ord = match (da, db) {
            (true, true) => {
                let ta = sa.trim_start_matches('0');
                let tb = sb.trim_start_matches('0');
                ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb)).then_with(|| sa.cmp(sb))
            }
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => sa.cmp(sb),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len())
}

/// A sequence of distinct vertex indices. For paths consecutive vertices are
/// joined by edges; for cycles the closing edge from the last vertex back to
/// the first is implied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    vertices: Vec<usize>,
}

impl Path {
    /// Checks distinctness and edge-connectedness.
    pub fn new(g: &Digraph, vertices: Vec<usize>) -> Result<Path, GraphError> {
        let p = Path { vertices };
        p.validate(g, false)?;
        Ok(p)
    }

    /// Like [`Path::new`] but also requires the closing edge.
    pub fn new_cycle(g: &Digraph, vertices: Vec<usize>) -> Result<Path, GraphError> {
        let p = Path { vertices };
        p.validate(g, true)?;
        Ok(p)
    }

    fn validate(&self, g: &Digraph, closed: bool) -> Result<(), GraphError> {
        let mut seen = vec![false; g.vertex_count()];
        for &v in &self.vertices {
            if v >= g.vertex_count() {
                return Err(GraphError::InvalidPath(format!("vertex index {v} out of range")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(GraphError::InvalidPath(format!("vertex {} repeated", g.label(v))));
            }
        }
        for w in self.vertices.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(GraphError::InvalidPath(format!(
                    "missing edge {} -> {}",
                    g.label(w[0]),
                    g.label(w[1])
                )));
            }
        }
        if closed {
            match (self.vertices.first(), self.vertices.last()) {
                (Some(&a), Some(&b)) if g.has_edge(b, a) => {}
                _ => return Err(GraphError::InvalidPath("cycle is not closed".into())),
            }
        }
        Ok(())
    }

    pub(crate) fn from_raw(vertices: Vec<usize>) -> Path {
        Path { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.vertices.last().copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    /// Consecutive vertex pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn labels<'g>(&self, g: &'g Digraph) -> Vec<&'g str> {
        self.vertices.iter().map(|&v| g.label(v)).collect()
    }
}

/// Result of a capped enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    /// Set when the cap was reached and more items exist.
    pub overflow: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new<V, E, S, T>(vertices: V, edges: E) -> Result<Digraph, GraphError>
    where
        V: IntoIterator<Item = S>,
        S: Into<String>,
        E: IntoIterator<Item = (T, T)>,
        T: AsRef<str>,
    {
        let mut labels: Vec<String> = vertices.into_iter().map(Into::into).collect();
        labels.sort_by(|a, b| natural_cmp(a, b));
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateVertex(w[0].clone()));
        }
        let index: HashMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let n = labels.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| GraphError::UnknownVertex(a.into()))?;
            let ib = *index.get(b).ok_or_else(|| GraphError::UnknownVertex(b.into()))?;
            if ia == ib {
                return Err(GraphError::SelfLoop(a.into()));
            }
            if succ[ia].contains(&ib) {
                return Err(GraphError::DuplicateEdge(a.into(), b.into()));
            }
            succ[ia].push(ib);
            pred[ib].push(ia);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Digraph {
            labels,
            index,
            succ,
            pred,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn vertex(&self, label: &str) -> Result<usize, GraphError> {
        self.index_of(label)
            .ok_or_else(|| GraphError::UnknownVertex(label.into()))
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    /// All edges in (tail, head) index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, hs)| hs.iter().map(move |&b| (a, b)))
    }

    /// Kahn's algorithm, always taking the smallest available vertex.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Vertices reachable from `u` (including `u`).
    pub fn reach_from(&self, u: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![u];
        seen[u] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn reaches(&self, u: usize, v: usize) -> bool {
        u == v || self.reach_from(u)[v]
    }

    pub fn reachable(&self, u: &str, v: &str) -> Result<bool, GraphError> {
        Ok(self.reaches(self.vertex(u)?, self.vertex(v)?))
    }

    /// Full reachability relation, `closure[u][v]`.
    pub fn transitive_closure(&self) -> Vec<Vec<bool>> {
        (0..self.vertex_count()).map(|u| self.reach_from(u)).collect()
    }

    /// All simple `u -> v` paths in lexicographic order, at most `limit`.
    pub fn simple_paths(&self, u: usize, v: usize, limit: usize) -> Enumeration<Path> {
        self.simple_paths_avoiding(u, v, limit, &vec![false; self.vertex_count()])
    }

    /// Simple paths that never enter a vertex flagged in `banned`.
    pub fn simple_paths_avoiding(
        &self,
        u: usize,
        v: usize,
        limit: usize,
        banned: &[bool],
    ) -> Enumeration<Path> {
        let mut out = Enumeration {
            items: Vec::new(),
            overflow: false,
        };
        if banned[u] || banned[v] {
            return out;
        }
        if u == v {
            out.items.push(Path::from_raw(vec![u]));
            return out;
        }
        // prune with backward reachability to v
        let mut can_reach = vec![false; self.vertex_count()];
        let mut stack = vec![v];
        can_reach[v] = true;
        while let Some(x) = stack.pop() {
            for &p in &self.pred[x] {
                if !can_reach[p] && !banned[p] {
                    can_reach[p] = true;
                    stack.push(p);
                }
            }
        }
        let mut on_path = vec![false; self.vertex_count()];
        let mut path = vec![u];
        on_path[u] = true;
        self.paths_dfs(v, limit, &can_reach, &mut on_path, &mut path, &mut out);
        out
    }

    fn paths_dfs(
        &self,
        target: usize,
        limit: usize,
        can_reach: &[bool],
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        out: &mut Enumeration<Path>,
    ) {
        let tail = *path.last().unwrap();
        for &w in &self.succ[tail] {
            if out.overflow {
                return;
            }
            if on_path[w] || !can_reach[w] {
                continue;
            }
            path.push(w);
            if w == target {
                if out.items.len() == limit {
                    out.overflow = true;
                } else {
                    out.items.push(Path::from_raw(path.clone()));
                }
            } else {
                on_path[w] = true;
                self.paths_dfs(target, limit, can_reach, on_path, path, out);
                on_path[w] = false;
            }
            path.pop();
        }
    }

    pub fn enumerate_simple_paths(
        &self,
        u: &str,
        v: &str,
        limit: usize,
    ) -> Result<Enumeration<Path>, GraphError> {
        Ok(self.simple_paths(self.vertex(u)?, self.vertex(v)?, limit))
    }

    /// Elementary cycles by Johnson's algorithm, each starting at its
    /// smallest vertex, in lexicographic order, at most `limit`.
    pub fn enumerate_cycles(&self, limit: usize) -> Enumeration<Path> {
        let n = self.vertex_count();
        let mut out = Enumeration {
            items: Vec::new(),
            overflow: false,
        };
        for s in 0..n {
            if out.overflow {
                break;
            }
            let component = self.component_from(s);
            if !self.succ[s].iter().any(|&w| component[w]) {
                continue;
            }
            let mut state = Johnson {
                g: self,
                start: s,
                allowed: component,
                blocked: vec![false; n],
                blocked_by: vec![BTreeSet::new(); n],
                stack: Vec::new(),
                limit,
                out: &mut out,
            };
            state.circuit(s);
        }
        out.items.sort();
        out
    }

    /// Strongly connected component of `s` within the subgraph on vertices
    /// `>= s`.
    fn component_from(&self, s: usize) -> Vec<bool> {
        let n = self.vertex_count();
        let walk = |edges: &Vec<Vec<usize>>| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &w in &edges[v] {
                    if w >= s && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        };
        let fwd = walk(&self.succ);
        let bwd = walk(&self.pred);
        fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
    }

    pub fn induced_subgraph(&self, keep: &[&str]) -> Result<Digraph, GraphError> {
        let mut mask = vec![false; self.vertex_count()];
        for l in keep {
            mask[self.vertex(l)?] = true;
        }
        Ok(self.induced_by_mask(&mask))
    }

    pub fn induced_by_mask(&self, keep: &[bool]) -> Digraph {
        let vertices = (0..self.vertex_count())
            .filter(|&v| keep[v])
            .map(|v| self.labels[v].clone());
        let edges = self
            .edges()
            .filter(|&(a, b)| keep[a] && keep[b])
            .map(|(a, b)| (self.labels[a].as_str(), self.labels[b].as_str()));
        Digraph::new(vertices, edges).expect("subgraph of a valid graph is valid")
    }

    /// Successor sets as bitmasks; only for graphs with at most 64 vertices.
    pub(crate) fn successor_masks(&self) -> Option<Vec<u64>> {
        if self.vertex_count() > 64 {
            return None;
        }
        Some(
            self.succ
                .iter()
                .map(|hs| hs.iter().fold(0u64, |m, &h| m | 1 << h))
                .collect(),
        )
    }

    /// DOT rendering with one vertex per line followed by `a -> b;` edges.
    pub fn to_dot(&self) -> String {
        self.to_dot_with(|_| None, |_, _| None)
    }

    /// DOT rendering with optional attribute lists per vertex and edge.
    pub fn to_dot_with(
        &self,
        vertex_attrs: impl Fn(usize) -> Option<String>,
        edge_attrs: impl Fn(usize, usize) -> Option<String>,
    ) -> String {
        let mut s = String::from("digraph G {\n");
        for v in 0..self.vertex_count() {
            match vertex_attrs(v) {
                Some(a) => writeln!(s, "  \"{}\" [{}];", self.labels[v], a),
                None => writeln!(s, "  \"{}\";", self.labels[v]),
            }
            .unwrap();
        }
        for (a, b) in self.edges() {
            match edge_attrs(a, b) {
                Some(attr) => writeln!(s, "  \"{}\" -> \"{}\" [{}];", self.labels[a], self.labels[b], attr),
                None => writeln!(s, "  \"{}\" -> \"{}\";", self.labels[a], self.labels[b]),
            }
            .unwrap();
        }
        s.push_str("}\n");
        s
    }
}

/// Acyclicity of the subgraph induced by `keep`, given successor masks.
pub(crate) fn acyclic_on_mask(succ: &[u64], keep: u64) -> bool {
    // peel vertices that have no successor left inside the remaining set
    let mut left = keep;
    loop {
        let mut changed = false;
        let mut it = left;
        while it != 0 {
            let v = it.trailing_zeros() as usize;
            it &= it - 1;
            if succ[v] & left == 0 {
                left &= !(1 << v);
                changed = true;
            }
        }
        if left == 0 {
            return true;
        }
        if !changed {
            return false;
        }
    }
}

struct Johnson<'a> {
    g: &'a Digraph,
    start: usize,
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    blocked_by: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
    limit: usize,
    out: &'a mut Enumeration<Path>,
}

impl Johnson<'_> {
    fn unblock(&mut self, v: usize) {
        self.blocked[v] = false;
        let waiting = std::mem::take(&mut self.blocked_by[v]);
        for w in waiting {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize) -> bool {
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in self.g.successors(v) {
            if self.out.overflow {
                break;
            }
            if !self.allowed[w] {
                continue;
            }
            if w == self.start {
                if self.out.items.len() == self.limit {
                    self.out.overflow = true;
                } else {
                    self.out.items.push(Path::from_raw(self.stack.clone()));
                }
                found = true;
            } else if !self.blocked[w] && self.circuit(w) {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in self.g.successors(v) {
                if self.allowed[w] {
                    self.blocked_by[w].insert(v);
                }
            }
        }
        self.stack.pop();
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Digraph {
        Digraph::new(
            (1..=n).map(|i| i.to_string()),
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
        .unwrap()
    }

    fn bidirected_cycle(n: usize) -> Digraph {
        let mut e = Vec::new();
        for i in 1..=n {
            let j = i % n + 1;
            e.push((i, j));
            e.push((j, i));
        }
        graph(n, &e)
    }

    #[test]
    fn natural_order_of_network_labels() {
        let mut v = vec!["10", "D_2'", "2'", "2", "D_2", "1", "D_10"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, ["1", "2", "2'", "10", "D_2", "D_2'", "D_10"]);
    }

    #[test]
    fn construction_rejects_bad_edges() {
        let v = ["1", "2"];
        assert!(matches!(
            Digraph::new(v, [("1", "1")]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            Digraph::new(v, [("1", "2"), ("1", "2")]),
            Err(GraphError::DuplicateEdge(..))
        ));
        assert!(matches!(
            Digraph::new(v, [("1", "3")]),
            Err(GraphError::UnknownVertex(_))
        ));
    }

    #[test]
    fn acyclicity_examples() {
        assert!(graph(0, &[]).is_acyclic());
        assert!(!graph(3, &[(1, 2), (2, 3), (3, 1)]).is_acyclic());
        assert!(graph(3, &[(1, 2), (1, 3), (2, 3)]).is_acyclic());
    }

    #[test]
    fn reachability_examples() {
        let g = graph(4, &[(1, 2), (2, 3)]);
        assert!(g.reachable("2", "2").unwrap());
        assert!(g.reachable("1", "3").unwrap());
        assert!(!g.reachable("3", "1").unwrap());
        assert!(!g.reachable("1", "4").unwrap());
        assert!(g.reachable("1", "9").is_err());
    }

    #[test]
    fn path_enumeration_examples() {
        let g = graph(4, &[(1, 2), (2, 4), (1, 3), (3, 4)]);
        let trivial = g.enumerate_simple_paths("2", "2", 10).unwrap();
        assert_eq!(trivial.items.len(), 1);
        assert_eq!(trivial.items[0].len(), 1);
        let p = g.enumerate_simple_paths("1", "4", 10).unwrap();
        let labels: Vec<Vec<&str>> = p.items.iter().map(|p| p.labels(&g)).collect();
        assert_eq!(labels, vec![vec!["1", "2", "4"], vec!["1", "3", "4"]]);
        assert!(!p.overflow);

        let mut e = Vec::new();
        for a in 1..=5 {
            for b in a + 1..=5 {
                e.push((a, b));
            }
        }
        let dag = graph(5, &e);
        let all = dag.enumerate_simple_paths("1", "5", 100).unwrap();
        assert_eq!(all.items.len(), 8);
        let capped = dag.enumerate_simple_paths("1", "5", 3).unwrap();
        assert_eq!(capped.items.len(), 3);
        assert!(capped.overflow);
        assert_eq!(capped.items[..], all.items[..3]);
    }

    #[test]
    fn cycle_enumeration_examples() {
        assert!(graph(3, &[(1, 2), (2, 3)]).enumerate_cycles(10).items.is_empty());
        let two = graph(2, &[(1, 2), (2, 1)]).enumerate_cycles(10);
        assert_eq!(two.items.len(), 1);
        let c5 = bidirected_cycle(5).enumerate_cycles(100);
        assert_eq!(c5.items.len(), 7);
        assert_eq!(c5.items.iter().filter(|c| c.len() == 2).count(), 5);
        assert_eq!(c5.items.iter().filter(|c| c.len() == 5).count(), 2);
        let capped = bidirected_cycle(5).enumerate_cycles(4);
        assert_eq!(capped.items.len(), 4);
        assert!(capped.overflow);
    }

    #[test]
    fn cycles_are_rotation_normalized() {
        let g = graph(4, &[(3, 1), (1, 4), (4, 3)]);
        let c = g.enumerate_cycles(10);
        assert_eq!(c.items[0].labels(&g), ["1", "4", "3"]);
        assert!(Path::new_cycle(&g, c.items[0].vertices().to_vec()).is_ok());
    }

    #[test]
    fn induced_subgraph_examples() {
        let g = graph(3, &[(1, 2), (2, 3), (3, 1)]);
        assert_eq!(g.induced_subgraph(&["1", "2", "3"]).unwrap(), g);
        assert_eq!(g.induced_subgraph(&[]).unwrap().vertex_count(), 0);
        let s = g.induced_subgraph(&["1", "2"]).unwrap();
        assert_eq!(s.edge_count(), 1);
        assert!(s.has_edge(0, 1));
    }

    #[test]
    fn mask_acyclicity_matches_kahn() {
        let g = bidirected_cycle(5);
        let succ = g.successor_masks().unwrap();
        for keep in 0u64..32 {
            let mask: Vec<bool> = (0..5).map(|i| keep >> i & 1 == 1).collect();
            assert_eq!(acyclic_on_mask(&succ, keep), g.induced_by_mask(&mask).is_acyclic());
        }
    }

    #[test]
    fn path_constructor_checks_invariants() {
        let g = graph(3, &[(1, 2), (2, 3)]);
        assert!(Path::new(&g, vec![0, 1, 2]).is_ok());
        assert!(Path::new(&g, vec![0, 2]).is_err());
        assert!(Path::new(&g, vec![0, 1, 0]).is_err());
    }

    #[test]
    fn dot_lists_vertices_then_edges() {
        let g = graph(2, &[(1, 2)]);
        assert_eq!(g.to_dot(), "digraph G {\n  \"1\";\n  \"2\";\n  \"1\" -> \"2\";\n}\n");
    }
}
