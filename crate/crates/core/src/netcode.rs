//! Linear network codes over GF(2) on the transformed networks.
//!
//! A code covers a subset of the network's sources; its coordinates follow
//! the order of that subset. Unassigned edges carry the zero vector.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::Path;
use crate::linalg::{in_span, BinMatrix, BinVector, LinalgError};
use crate::transform::{NCNetwork, VertexRole};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetCodeError {
    #[error("edge {tail} -> {head} already carries {existing}, cannot assign {new}")]
    Conflict {
        tail: String,
        head: String,
        existing: BinVector,
        new: BinVector,
    },
    #[error("no edge {tail} -> {head} in the network")]
    MissingEdge { tail: String, head: String },
    #[error("vector has dimension {found}, code has dimension {expected}")]
    WrongDimension { expected: usize, found: usize },
    #[error("{0} is not a source of the network")]
    NotASource(usize),
    #[error("codes live on different networks")]
    DifferentNetworks,
    #[error("source {0} appears in both codes")]
    SharedSource(usize),
    #[error("code is infeasible: {0:?}")]
    Infeasible(FeasibilityReport),
    #[error("index code has length {length}; expected {expected} = n - tau for this network")]
    WrongLength { length: usize, expected: usize },
    #[error("index code is not valid for the instance")]
    InvalidIndexCode,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Edges (by label) whose vector is outside the span of the vectors
    /// entering their tail.
    pub flow_violations: Vec<(String, String)>,
    /// Sources whose receiver edge does not carry their basis vector.
    pub decode_violations: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct NetworkCode {
    network: Arc<NCNetwork>,
    sources: Vec<usize>,
    vectors: BTreeMap<(usize, usize), BinVector>,
}

impl NetworkCode {
    /// An empty code whose coordinates are the given sources, in order.
    pub fn new(network: Arc<NCNetwork>, sources: Vec<usize>) -> Result<Self, NetCodeError> {
        for &w in &sources {
            if network.source_index(w).is_none() {
                return Err(NetCodeError::NotASource(w));
            }
        }
        Ok(NetworkCode {
            network,
            sources,
            vectors: BTreeMap::new(),
        })
    }

    /// An empty code over every source, in ascending order.
    pub fn for_all_sources(network: Arc<NCNetwork>) -> Self {
        let sources = network.sources().to_vec();
        NetworkCode {
            network,
            sources,
            vectors: BTreeMap::new(),
        }
    }

    pub fn network(&self) -> &Arc<NCNetwork> {
        &self.network
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn dim(&self) -> usize {
        self.sources.len()
    }

    /// Coordinate of source message vertex `w`.
    pub fn coordinate(&self, w: usize) -> Option<usize> {
        self.sources.iter().position(|&s| s == w)
    }

    pub fn basis(&self, w: usize) -> Option<BinVector> {
        self.coordinate(w).map(|k| BinVector::unit(self.dim(), k))
    }

    /// The vector on an edge, zero when unassigned.
    pub fn get(&self, edge: (usize, usize)) -> BinVector {
        self.vectors
            .get(&edge)
            .cloned()
            .unwrap_or_else(|| BinVector::zeros(self.dim()))
    }

    pub fn assigned(&self) -> impl Iterator<Item = ((usize, usize), &BinVector)> {
        self.vectors.iter().map(|(&e, v)| (e, v))
    }

    fn edge_labels(&self, (a, b): (usize, usize)) -> (String, String) {
        (self.network.label(a).to_string(), self.network.label(b).to_string())
    }

    /// Write-once assignment: a different vector on an edge that already
    /// carries a non-zero vector is a conflict.
    pub fn assign(&mut self, edge: (usize, usize), v: BinVector) -> Result<(), NetCodeError> {
        if v.dim() != self.dim() {
            return Err(NetCodeError::WrongDimension {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        if self.network.edge_kind(edge.0, edge.1).is_none() {
            let (tail, head) = self.edge_labels(edge);
            return Err(NetCodeError::MissingEdge { tail, head });
        }
        match self.vectors.get(&edge) {
            Some(existing) if !existing.is_zero() && *existing != v => {
                let (tail, head) = self.edge_labels(edge);
                Err(NetCodeError::Conflict {
                    tail,
                    head,
                    existing: existing.clone(),
                    new: v,
                })
            }
            _ => {
                self.vectors.insert(edge, v);
                Ok(())
            }
        }
    }

    pub fn assign_path_mut(&mut self, p: &Path, v: &BinVector) -> Result<(), NetCodeError> {
        for e in p.edges() {
            self.assign(e, v.clone())?;
        }
        Ok(())
    }

    /// Returns a copy with every edge of `p` carrying `v`.
    pub fn assign_along_path(&self, p: &Path, v: &BinVector) -> Result<NetworkCode, NetCodeError> {
        let mut out = self.clone();
        out.assign_path_mut(p, v)?;
        Ok(out)
    }

    fn is_code_source_vertex(&self, x: usize) -> Option<usize> {
        match self.network.role(x) {
            VertexRole::Message(w) => self.coordinate(w),
            _ => None,
        }
    }

    pub fn check_feasible(&self) -> FeasibilityReport {
        let g = self.network.graph();
        let mut flow_violations = Vec::new();
        for (a, b) in g.edges() {
            let v = self.get((a, b));
            let ok = if let Some(k) = self.is_code_source_vertex(a).filter(|_| g.predecessors(a).is_empty()) {
                v == BinVector::unit(self.dim(), k)
            } else {
                let incoming: Vec<BinVector> =
                    g.predecessors(a).iter().map(|&p| self.get((p, a))).collect();
                let span = BinMatrix::from_rows(self.dim(), &incoming).expect("uniform dimension");
                in_span(&v, &span).expect("uniform dimension")
            };
            if !ok {
                flow_violations.push(self.edge_labels((a, b)));
            }
        }
        let decode_violations: Vec<usize> = self
            .sources
            .iter()
            .enumerate()
            .filter(|&(k, &w)| {
                let idx = self.network.source_index(w).expect("checked on construction");
                self.get(self.network.receiver_edge(idx)) != BinVector::unit(self.dim(), k)
            })
            .map(|(_, &w)| w)
            .collect();
        FeasibilityReport {
            feasible: flow_violations.is_empty() && decode_violations.is_empty(),
            flow_violations,
            decode_violations,
        }
    }

    /// `dim x n` matrix whose column `v` is the vector on coding edge
    /// `(v, v')`. Refused for infeasible codes.
    pub fn extract_a_matrix(&self) -> Result<BinMatrix, NetCodeError> {
        let report = self.check_feasible();
        if !report.feasible {
            return Err(NetCodeError::Infeasible(report));
        }
        let n = self.network.n();
        let columns: Vec<BinVector> = (1..=n).map(|v| self.get(self.network.coding_edge(v))).collect();
        Ok(BinMatrix::from_fn(self.dim(), n, |r, c| columns[c].get(r)))
    }

    /// Copies the vector of each coding edge `(v, v')` onto every forwarding
    /// edge leaving `v'`. Since `v'` has a single incoming edge this keeps
    /// flow conservation and only enlarges downstream spans.
    pub fn with_scalar_forwarding(&self) -> NetworkCode {
        let mut out = self.clone();
        for (a, b) in self.network.forwarding_edges() {
            let VertexRole::Dashed(v) = self.network.role(a) else {
                unreachable!("forwarding edges leave dashed vertices")
            };
            out.vectors.insert((a, b), self.get(self.network.coding_edge(v)));
        }
        out
    }

    /// Stacks two codes on the same network with disjoint sources: the
    /// first occupies the low coordinates, the second the high ones.
    pub fn merge(code1: &NetworkCode, code2: &NetworkCode) -> Result<NetworkCode, NetCodeError> {
        if !Arc::ptr_eq(&code1.network, &code2.network) {
            return Err(NetCodeError::DifferentNetworks);
        }
        if let Some(&w) = code1.sources.iter().find(|w| code2.sources.contains(w)) {
            return Err(NetCodeError::SharedSource(w));
        }
        let (d1, d2) = (code1.dim(), code2.dim());
        let mut sources = code1.sources.clone();
        sources.extend_from_slice(&code2.sources);
        let mut merged = NetworkCode {
            network: code1.network.clone(),
            sources,
            vectors: BTreeMap::new(),
        };
        for (e, v) in code1.assigned() {
            merged.assign(e, v.embed(d1 + d2, 0))?;
        }
        for (e, v) in code2.assigned() {
            let padded = v.embed(d1 + d2, d1);
            if let Some(existing) = merged.vectors.get(&e) {
                if !existing.is_zero() && !padded.is_zero() {
                    let (tail, head) = merged.edge_labels(e);
                    return Err(NetCodeError::Conflict {
                        tail,
                        head,
                        existing: existing.clone(),
                        new: padded,
                    });
                }
                if padded.is_zero() {
                    continue;
                }
            }
            merged.vectors.insert(e, padded);
        }
        Ok(merged)
    }

    /// Builds a network code from a valid index code `b` of length
    /// `n - tau`: the null space of `b`, normalized so the source columns
    /// form the identity, is spread over the coding edges and copied onto
    /// the forwarding edges.
    pub fn from_index_code(network: Arc<NCNetwork>, b: &BinMatrix) -> Result<NetworkCode, NetCodeError> {
        let n = network.n();
        if b.cols() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: b.cols(),
            }
            .into());
        }
        if !crate::sideinfo::is_valid_index_code(network.origin(), b)? {
            return Err(NetCodeError::InvalidIndexCode);
        }
        let tau = network.tau();
        let length = b.rank();
        if length + tau != n {
            return Err(NetCodeError::WrongLength {
                length,
                expected: n - tau,
            });
        }
        let a = b.nullspace_basis();
        // move the source columns first so that RREF normalizes them to I
        let sources = network.sources().to_vec();
        let order: Vec<usize> = sources
            .iter()
            .map(|w| w - 1)
            .chain((0..n).filter(|c| !sources.contains(&(c + 1))))
            .collect();
        let (reduced, pivots) = a.select_columns(&order)?.rref_with_pivots();
        if pivots != (0..tau).collect::<Vec<_>>() {
            return Err(NetCodeError::InvalidIndexCode);
        }
        let mut column = vec![BinVector::zeros(tau); n];
        for (pos, &c) in order.iter().enumerate() {
            column[c] = reduced.column(pos);
        }
        let mut code = NetworkCode::for_all_sources(network.clone());
        for v in 1..=n {
            code.assign(network.coding_edge(v), column[v - 1].clone())?;
        }
        for k in 0..tau {
            code.assign(network.receiver_edge(k), BinVector::unit(tau, k))?;
        }
        Ok(code.with_scalar_forwarding())
    }

    pub fn dump(&self) -> CodeDump {
        CodeDump {
            vtau: self.sources.clone(),
            edges: self
                .network
                .graph()
                .edges()
                .map(|e| {
                    let (tail, head) = self.edge_labels(e);
                    DumpedVector {
                        edge: [tail, head],
                        vector: self.get(e),
                    }
                })
                .collect(),
        }
    }

    pub fn from_dump(network: Arc<NCNetwork>, dump: &CodeDump) -> Result<NetworkCode, NetCodeError> {
        let mut code = NetworkCode::new(network.clone(), dump.vtau.clone())?;
        for entry in &dump.edges {
            let [tail, head] = &entry.edge;
            let missing = || NetCodeError::MissingEdge {
                tail: tail.clone(),
                head: head.clone(),
            };
            let a = network.graph().index_of(tail).ok_or_else(missing)?;
            let b = network.graph().index_of(head).ok_or_else(missing)?;
            code.assign((a, b), entry.vector.clone())?;
        }
        Ok(code)
    }
}

/// JSON form of a network code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDump {
    /// Source message vertices in coordinate order.
    pub vtau: Vec<usize>,
    pub edges: Vec<DumpedVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpedVector {
    pub edge: [String; 2],
    pub vector: BinVector,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::dualize_to_index_code;
    use crate::sideinfo::{is_valid_index_code, SIGraph};

    fn cycle_net() -> Arc<NCNetwork> {
        let g = SIGraph::new(3, [(1, 2), (2, 3), (3, 1)]).unwrap();
        Arc::new(NCNetwork::build(&g, &[1]).unwrap())
    }

    fn path_by_labels(net: &NCNetwork, labels: &[&str]) -> Path {
        let idx = labels.iter().map(|l| net.graph().vertex(l).unwrap()).collect();
        Path::new(net.graph(), idx).unwrap()
    }

    fn v(s: &str) -> BinVector {
        s.parse().unwrap()
    }

    #[test]
    fn empty_network_is_vacuously_feasible() {
        let g = SIGraph::new(2, [(1, 2)]).unwrap();
        let net = Arc::new(NCNetwork::build(&g, &[]).unwrap());
        let code = NetworkCode::for_all_sources(net);
        assert!(code.check_feasible().feasible);
        assert_eq!(code.extract_a_matrix().unwrap(), BinMatrix::zeros(0, 2));
    }

    #[test]
    fn single_unipath_code() {
        let net = cycle_net();
        let p = path_by_labels(&net, &["1", "1'", "2", "2'", "3", "3'", "D_1", "D_1'"]);
        let code = NetworkCode::for_all_sources(net.clone())
            .assign_along_path(&p, &v("1"))
            .unwrap();
        assert!(code.check_feasible().feasible);
        let a = code.extract_a_matrix().unwrap();
        assert_eq!(a, BinMatrix::parse_rows(3, &["111"]).unwrap());
        let b = dualize_to_index_code(net.origin(), &a).unwrap();
        assert!(is_valid_index_code(net.origin(), &b).unwrap());
    }

    #[test]
    fn infeasible_code_is_reported_and_refused() {
        let net = cycle_net();
        let mut code = NetworkCode::for_all_sources(net.clone());
        code.assign(net.coding_edge(1), v("1")).unwrap();
        let report = code.check_feasible();
        assert!(!report.feasible);
        assert_eq!(report.decode_violations, vec![1]);
        assert!(matches!(code.extract_a_matrix(), Err(NetCodeError::Infeasible(_))));

        let mut bad = NetworkCode::for_all_sources(net.clone());
        bad.assign(net.coding_edge(2), v("1")).unwrap();
        assert_eq!(
            bad.check_feasible().flow_violations,
            vec![("1".into(), "1'".into()), ("2".into(), "2'".into())]
        );
    }

    #[test]
    fn write_once_assignment() {
        let net = cycle_net();
        let p = path_by_labels(&net, &["1", "1'", "2"]);
        let q = path_by_labels(&net, &["1'", "2", "2'"]);
        let code = NetworkCode::for_all_sources(net.clone());
        let zero = code.assign_along_path(&p, &v("0")).unwrap();
        assert_eq!(zero.assigned().count(), 2);
        let once = zero.assign_along_path(&p, &v("1")).unwrap();
        let twice = once.assign_along_path(&q, &v("1")).unwrap();
        assert_eq!(twice.get(net.coding_edge(2)), v("1"));
        assert!(matches!(
            twice.assign_along_path(&q, &v("0")),
            Err(NetCodeError::Conflict { .. })
        ));
    }

    #[test]
    fn conflicting_basis_vectors() {
        let g = SIGraph::new(3, [(1, 3), (3, 1), (2, 3), (3, 2)]).unwrap();
        let net = Arc::new(NCNetwork::build(&g, &[1, 2]).unwrap());
        let p1 = path_by_labels(&net, &["1", "1'", "3", "3'", "D_1", "D_1'"]);
        let p2 = path_by_labels(&net, &["2", "2'", "3", "3'", "D_2", "D_2'"]);
        let code = NetworkCode::for_all_sources(net)
            .assign_along_path(&p1, &v("10"))
            .unwrap();
        assert!(matches!(
            code.assign_along_path(&p2, &v("01")),
            Err(NetCodeError::Conflict { .. })
        ));
    }

    #[test]
    fn merge_stacks_blocks() {
        // two disjoint cycles 1 <-> 3 and 2 <-> 4
        let g = SIGraph::new(4, [(1, 3), (3, 1), (2, 4), (4, 2)]).unwrap();
        let net = Arc::new(NCNetwork::build(&g, &[1, 2]).unwrap());
        let p1 = path_by_labels(&net, &["1", "1'", "3", "3'", "D_1", "D_1'"]);
        let p2 = path_by_labels(&net, &["2", "2'", "4", "4'", "D_2", "D_2'"]);
        let c1 = NetworkCode::new(net.clone(), vec![1])
            .unwrap()
            .assign_along_path(&p1, &v("1"))
            .unwrap();
        let c2 = NetworkCode::new(net.clone(), vec![2])
            .unwrap()
            .assign_along_path(&p2, &v("1"))
            .unwrap();
        assert!(c1.check_feasible().feasible && c2.check_feasible().feasible);
        let merged = NetworkCode::merge(&c1, &c2).unwrap();
        assert!(merged.check_feasible().feasible);
        let a = merged.extract_a_matrix().unwrap();
        let a1 = c1.extract_a_matrix().unwrap();
        let a2 = c2.extract_a_matrix().unwrap();
        let mut stacked = a1.clone();
        stacked.push_row(&a2.row(0)).unwrap();
        assert_eq!(a, stacked);

        let empty = NetworkCode::new(net.clone(), vec![]).unwrap();
        let injected = NetworkCode::merge(&c1, &empty).unwrap();
        assert_eq!(injected.extract_a_matrix().unwrap(), a1);
        assert!(matches!(NetworkCode::merge(&c1, &c1), Err(NetCodeError::SharedSource(1))));
    }

    #[test]
    fn index_code_round_trip() {
        let net = cycle_net();
        let b = BinMatrix::parse_rows(3, &["110", "011"]).unwrap();
        let code = NetworkCode::from_index_code(net.clone(), &b).unwrap();
        assert!(code.check_feasible().feasible);
        let a = code.extract_a_matrix().unwrap();
        assert_eq!(dualize_to_index_code(net.origin(), &a).unwrap().row_space_basis(), b.row_space_basis());
        assert!(matches!(
            NetworkCode::from_index_code(net, &BinMatrix::identity(3)),
            Err(NetCodeError::WrongLength { .. })
        ));
    }

    #[test]
    fn dump_round_trip() {
        let net = cycle_net();
        let b = BinMatrix::parse_rows(3, &["110", "011"]).unwrap();
        let code = NetworkCode::from_index_code(net.clone(), &b).unwrap();
        let json = serde_json::to_string(&code.dump()).unwrap();
        let back: CodeDump = serde_json::from_str(&json).unwrap();
        let restored = NetworkCode::from_dump(net, &back).unwrap();
        assert_eq!(restored.dump(), code.dump());
    }
}
