//! Builds the acyclic multiple-unicast network of an index coding instance.
//!
//! Every message vertex `v` is split into `v -> v'` (a coding edge), every
//! side-information edge `(v, w)` becomes a forwarding edge `v' -> w`, and
//! each chosen source `w` gets a receiver pair `D_w -> D_w'` that takes over
//! its incoming forwarding edges, which breaks every cycle.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::digraph::{Digraph, Path};
use crate::sideinfo::SIGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("vertex {vertex} is not a message vertex of an instance with n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} listed twice in the source set")]
    DuplicateSource(usize),
    #[error("removing {vtau:?} leaves a cycle in the side-information graph")]
    NotAcyclifying { vtau: Vec<usize> },
    #[error("cycle {0:?} avoids every source vertex")]
    CycleAvoidsSources(Vec<usize>),
    #[error("not a trail between a source and a receiver: {0}")]
    NotATrail(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Coding,
    Forwarding,
}

/// What a network vertex stands for; the payload is the message vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexRole {
    Message(usize),
    Dashed(usize),
    Demand(usize),
    DemandDashed(usize),
}

pub fn dashed_label(v: usize) -> String {
    format!("{v}'")
}

pub fn demand_label(w: usize) -> String {
    format!("D_{w}")
}

pub fn demand_dashed_label(w: usize) -> String {
    format!("D_{w}'")
}

#[derive(Clone, Debug)]
pub struct NCNetwork {
    graph: Digraph,
    origin: SIGraph,
    sources: Vec<usize>,
    roles: Vec<VertexRole>,
    message: Vec<usize>,
    dashed: Vec<usize>,
    demand: Vec<usize>,
    demand_dashed: Vec<usize>,
    kinds: BTreeMap<(usize, usize), EdgeKind>,
}

impl NCNetwork {
    /// Accepts any set whose removal acyclifies `g`; minimality is the
    /// caller's business.
    pub fn build(g: &SIGraph, vtau: &[usize]) -> Result<NCNetwork, TransformError> {
        let n = g.n();
        let mut sources: Vec<usize> = vtau.to_vec();
        sources.sort_unstable();
        for w in sources.windows(2) {
            if w[0] == w[1] {
                return Err(TransformError::DuplicateSource(w[0]));
            }
        }
        if let Some(&bad) = sources.iter().find(|&&w| w == 0 || w > n) {
            return Err(TransformError::VertexOutOfRange { vertex: bad, n });
        }
        let keep: Vec<bool> = (1..=n).map(|v| sources.binary_search(&v).is_err()).collect();
        if !g.digraph().induced_by_mask(&keep).is_acyclic() {
            return Err(TransformError::NotAcyclifying { vtau: sources });
        }

        let mut labels = Vec::with_capacity(2 * n + 2 * sources.len());
        let mut edges: Vec<(String, String, EdgeKind)> = Vec::new();
        for v in 1..=n {
            labels.push(v.to_string());
            labels.push(dashed_label(v));
            edges.push((v.to_string(), dashed_label(v), EdgeKind::Coding));
        }
        for &w in &sources {
            labels.push(demand_label(w));
            labels.push(demand_dashed_label(w));
            edges.push((demand_label(w), demand_dashed_label(w), EdgeKind::Coding));
        }
        for (v, w) in g.edges() {
            let head = if sources.binary_search(&w).is_ok() {
                demand_label(w)
            } else {
                w.to_string()
            };
            edges.push((dashed_label(v), head, EdgeKind::Forwarding));
        }
        let graph = Digraph::new(
            labels,
            edges.iter().map(|(a, b, _)| (a.as_str(), b.as_str())),
        )
        .expect("construction yields a simple graph");

        let idx = |l: &str| graph.index_of(l).expect("label was inserted");
        let message: Vec<usize> = (1..=n).map(|v| idx(&v.to_string())).collect();
        let dashed: Vec<usize> = (1..=n).map(|v| idx(&dashed_label(v))).collect();
        let demand: Vec<usize> = sources.iter().map(|&w| idx(&demand_label(w))).collect();
        let demand_dashed: Vec<usize> = sources.iter().map(|&w| idx(&demand_dashed_label(w))).collect();
        let mut roles = vec![VertexRole::Message(0); graph.vertex_count()];
        for v in 1..=n {
            roles[message[v - 1]] = VertexRole::Message(v);
            roles[dashed[v - 1]] = VertexRole::Dashed(v);
        }
        for (k, &w) in sources.iter().enumerate() {
            roles[demand[k]] = VertexRole::Demand(w);
            roles[demand_dashed[k]] = VertexRole::DemandDashed(w);
        }
        let kinds = edges
            .iter()
            .map(|(a, b, k)| ((idx(a), idx(b)), *k))
            .collect();
        let net = NCNetwork {
            graph,
            origin: g.clone(),
            sources,
            roles,
            message,
            dashed,
            demand,
            demand_dashed,
            kinds,
        };
        debug_assert!(net.graph.is_acyclic());
        Ok(net)
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn origin(&self) -> &SIGraph {
        &self.origin
    }

    pub fn n(&self) -> usize {
        self.origin.n()
    }

    pub fn tau(&self) -> usize {
        self.sources.len()
    }

    /// Source message vertices in ascending order; position is the basis
    /// index of the source.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn source_index(&self, w: usize) -> Option<usize> {
        self.sources.binary_search(&w).ok()
    }

    pub fn role(&self, x: usize) -> VertexRole {
        self.roles[x]
    }

    /// Network vertex `v` for message `v`.
    pub fn message_vertex(&self, v: usize) -> usize {
        self.message[v - 1]
    }

    /// Network vertex `v'`.
    pub fn dashed_vertex(&self, v: usize) -> usize {
        self.dashed[v - 1]
    }

    /// Source vertex of basis index `k`.
    pub fn source_vertex(&self, k: usize) -> usize {
        self.message[self.sources[k] - 1]
    }

    /// `D_w` for basis index `k`.
    pub fn demand_vertex(&self, k: usize) -> usize {
        self.demand[k]
    }

    /// `D_w'` for basis index `k`.
    pub fn receiver_vertex(&self, k: usize) -> usize {
        self.demand_dashed[k]
    }

    pub fn coding_edge(&self, v: usize) -> (usize, usize) {
        (self.message_vertex(v), self.dashed_vertex(v))
    }

    pub fn receiver_edge(&self, k: usize) -> (usize, usize) {
        (self.demand[k], self.demand_dashed[k])
    }

    pub fn edge_kind(&self, tail: usize, head: usize) -> Option<EdgeKind> {
        self.kinds.get(&(tail, head)).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), EdgeKind)> + '_ {
        self.kinds.iter().map(|(&e, &k)| (e, k))
    }

    pub fn coding_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges()
            .filter(|(_, k)| *k == EdgeKind::Coding)
            .map(|(e, _)| e)
    }

    pub fn forwarding_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges()
            .filter(|(_, k)| *k == EdgeKind::Forwarding)
            .map(|(e, _)| e)
    }

    pub fn label(&self, x: usize) -> &str {
        self.graph.label(x)
    }

    /// Paths from source `i` to receiver `D_j'` (basis indices), at most
    /// `limit`, lexicographic.
    pub fn source_receiver_paths(&self, i: usize, j: usize, limit: usize) -> crate::digraph::Enumeration<Path> {
        self.graph
            .simple_paths(self.source_vertex(i), self.receiver_vertex(j), limit)
    }

    /// Maps a cycle of the side-information graph (listed without repeating
    /// its first vertex) to the network paths between consecutive sources
    /// on it. A cycle through one source gives that source's unipath.
    pub fn cycle_to_paths(&self, cycle: &[usize]) -> Result<Vec<Path>, TransformError> {
        let first = cycle
            .iter()
            .position(|&v| self.source_index(v).is_some())
            .ok_or_else(|| TransformError::CycleAvoidsSources(cycle.to_vec()))?;
        let rotated: Vec<usize> = cycle[first..].iter().chain(&cycle[..first]).copied().collect();
        let mut out = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        for (pos, &v) in rotated.iter().chain(std::iter::once(&rotated[0])).enumerate() {
            if pos > 0 {
                if let Some(k) = self.source_index(v) {
                    current.push(self.demand[k]);
                    current.push(self.demand_dashed[k]);
                    out.push(Path::new(&self.graph, std::mem::take(&mut current)).map_err(|e| {
                        TransformError::NotATrail(format!("cycle {cycle:?} is not a cycle of the instance: {e}"))
                    })?);
                    if pos == rotated.len() {
                        break;
                    }
                }
            }
            current.push(self.message_vertex(v));
            current.push(self.dashed_vertex(v));
        }
        Ok(out)
    }

    /// Reads the message vertices off the coding edges of a path from a
    /// source to some `D_x'`, ending with `x`. A unipath yields a closed walk
    /// `[w, ..., w]`.
    pub fn path_to_trail(&self, p: &Path) -> Result<Vec<usize>, TransformError> {
        let (Some(start), Some(end)) = (p.first(), p.last()) else {
            return Err(TransformError::NotATrail("empty path".into()));
        };
        match self.roles[start] {
            VertexRole::Message(w) if self.source_index(w).is_some() => {}
            _ => {
                return Err(TransformError::NotATrail(format!(
                    "starts at {}, not a source",
                    self.label(start)
                )))
            }
        }
        let VertexRole::DemandDashed(x) = self.roles[end] else {
            return Err(TransformError::NotATrail(format!(
                "ends at {}, not a receiver",
                self.label(end)
            )));
        };
        let mut trail: Vec<usize> = p
            .edges()
            .filter_map(|(a, b)| match (self.roles[a], self.roles[b]) {
                (VertexRole::Message(v), VertexRole::Dashed(_)) => Some(v),
                _ => None,
            })
            .collect();
        trail.push(x);
        Ok(trail)
    }

    pub fn to_dot(&self) -> String {
        let sources: BTreeSet<usize> = (0..self.tau()).map(|k| self.source_vertex(k)).collect();
        let receivers: BTreeSet<usize> = self.demand_dashed.iter().copied().collect();
        self.graph.to_dot_with(
            |x| {
                if sources.contains(&x) {
                    Some("shape=box".into())
                } else if receivers.contains(&x) {
                    Some("shape=doublecircle".into())
                } else {
                    None
                }
            },
            |a, b| match self.edge_kind(a, b) {
                Some(EdgeKind::Forwarding) => Some("style=dashed".into()),
                _ => Some("style=solid".into()),
            },
        )
    }

    pub fn dump(&self) -> NetworkDump {
        NetworkDump {
            n: self.n(),
            tau: self.tau(),
            sources: self.sources.clone(),
            receivers: self.sources.iter().map(|&w| demand_dashed_label(w)).collect(),
            vertices: self.graph.labels().to_vec(),
            edges: self
                .edges()
                .map(|((a, b), kind)| DumpEdge {
                    tail: self.label(a).to_string(),
                    head: self.label(b).to_string(),
                    kind,
                })
                .collect(),
        }
    }
}

/// JSON shape of a network.
#[derive(Clone, Debug, Serialize)]
pub struct NetworkDump {
    pub n: usize,
    pub tau: usize,
    pub sources: Vec<usize>,
    pub receivers: Vec<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<DumpEdge>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DumpEdge {
    pub tail: String,
    pub head: String,
    pub kind: EdgeKind,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sideinfo::tests::bidirected_five_cycle;

    /// 1 -> 2 -> 3 -> 1, i.e. S(2) = {1}, S(3) = {2}, S(1) = {3}.
    fn three_cycle() -> SIGraph {
        SIGraph::new(3, [(1, 2), (2, 3), (3, 1)]).unwrap()
    }

    #[test]
    fn three_cycle_network() {
        let net = NCNetwork::build(&three_cycle(), &[1]).unwrap();
        let g = net.graph();
        assert_eq!(
            g.labels(),
            ["1", "1'", "2", "2'", "3", "3'", "D_1", "D_1'"]
        );
        let mut coding: Vec<(&str, &str)> = net
            .coding_edges()
            .map(|(a, b)| (g.label(a), g.label(b)))
            .collect();
        coding.sort();
        assert_eq!(coding, [("1", "1'"), ("2", "2'"), ("3", "3'"), ("D_1", "D_1'")]);
        let mut fwd: Vec<(&str, &str)> = net
            .forwarding_edges()
            .map(|(a, b)| (g.label(a), g.label(b)))
            .collect();
        fwd.sort();
        assert_eq!(fwd, [("1'", "2"), ("2'", "3"), ("3'", "D_1")]);
    }

    #[test]
    fn acyclic_instance_without_sources() {
        let g = SIGraph::new(3, [(1, 2), (2, 3)]).unwrap();
        let net = NCNetwork::build(&g, &[]).unwrap();
        assert_eq!(net.graph().vertex_count(), 6);
        assert_eq!(net.coding_edges().count(), 3);
        assert_eq!(net.forwarding_edges().count(), 2);
    }

    #[test]
    fn counts_on_five_cycle() {
        let g = bidirected_five_cycle();
        let net = NCNetwork::build(&g, &[1, 2, 4]).unwrap();
        assert_eq!(net.graph().vertex_count(), 2 * 5 + 2 * 3);
        assert_eq!(net.graph().edge_count(), 5 + 3 + g.edge_count());
        assert!(net.graph().is_acyclic());
    }

    #[test]
    fn rejects_bad_source_sets() {
        let g = three_cycle();
        assert!(matches!(
            NCNetwork::build(&g, &[]),
            Err(TransformError::NotAcyclifying { .. })
        ));
        assert!(NCNetwork::build(&g, &[4]).is_err());
        assert!(NCNetwork::build(&g, &[1, 1]).is_err());
    }

    #[test]
    fn unicycle_maps_to_unipath_and_back() {
        let net = NCNetwork::build(&three_cycle(), &[1]).unwrap();
        let paths = net.cycle_to_paths(&[2, 3, 1]).unwrap();
        assert_eq!(net.cycle_to_paths(&[1, 2, 3]).unwrap(), paths);
        assert_eq!(paths.len(), 1);
        assert_eq!(
            paths[0].labels(net.graph()),
            ["1", "1'", "2", "2'", "3", "3'", "D_1", "D_1'"]
        );
        assert_eq!(net.path_to_trail(&paths[0]).unwrap(), vec![1, 2, 3, 1]);
    }

    #[test]
    fn bicycle_maps_to_two_crosspaths() {
        let g = SIGraph::new(3, [(1, 2), (2, 1), (2, 3), (3, 2)]).unwrap();
        let net = NCNetwork::build(&g, &[1, 3]).unwrap();
        // cycle 1 -> 2 -> 3 -> 2 is not simple; use the 2-cycles through 2
        let paths = net.cycle_to_paths(&[1, 2]).unwrap();
        assert_eq!(paths.len(), 1);
        let g2 = SIGraph::new(4, [(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let net2 = NCNetwork::build(&g2, &[1, 3]).unwrap();
        let cross = net2.cycle_to_paths(&[1, 2, 3, 4]).unwrap();
        let labels: Vec<Vec<&str>> = cross.iter().map(|p| p.labels(net2.graph())).collect();
        assert_eq!(
            labels,
            vec![
                vec!["1", "1'", "2", "2'", "D_3", "D_3'"],
                vec!["3", "3'", "4", "4'", "D_1", "D_1'"],
            ]
        );
        assert_eq!(net2.path_to_trail(&cross[0]).unwrap(), vec![1, 2, 3]);
        assert!(net2.cycle_to_paths(&[2, 4]).is_err());
    }

    #[test]
    fn trail_rejects_non_source_start() {
        let net = NCNetwork::build(&three_cycle(), &[1]).unwrap();
        let p = Path::new(net.graph(), vec![net.message_vertex(2), net.dashed_vertex(2)]).unwrap();
        assert!(matches!(net.path_to_trail(&p), Err(TransformError::NotATrail(_))));
        assert!(net.path_to_trail(&p).is_err());
    }

    #[test]
    fn dot_marks_edge_kinds() {
        let net = NCNetwork::build(&three_cycle(), &[1]).unwrap();
        let dot = net.to_dot();
        assert!(dot.contains("\"1'\" -> \"2\" [style=dashed];"));
        assert!(dot.contains("\"1\" -> \"1'\" [style=solid];"));
        assert!(dot.contains("\"1\" [shape=box];"));
    }
}
