//! Index codes from network codes. For feedback vertex number three the
//! network is either split into a one-source and a two-source problem or
//! coded by the template of its Class Ia configuration; the resulting code
//! is dualized into an index code of length `n - 3`. Small instances that
//! fall outside both get an exhaustive minrank search instead.

pub mod search;
pub mod tables;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::caps::{CapExceeded, Caps};
use crate::classifier::{classify, classify_network, ClassReport, ClassifyError, Decomposition};
use crate::digraph::Digraph;
use crate::duality::{dualize_to_index_code, DualizeError};
use crate::linalg::{BinMatrix, BinVector, LinalgError};
use crate::netcode::{CodeDump, NetCodeError, NetworkCode};
use crate::sideinfo::{decoding_failures, min_feedback_vertex_sets, minrank2, SIGraph};
use crate::transform::{NCNetwork, TransformError};

pub use search::search_assignment;
pub use tables::{assign_by_table, TableError};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    NetCode(#[from] NetCodeError),
    #[error(transparent)]
    Dualize(#[from] DualizeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("index code has length {length}, expected {expected}")]
    WrongLength { length: usize, expected: usize },
    #[error("no construction applies (n = {n}, tau = {tau}, MAIS = {mais}) and n exceeds the minrank search limit")]
    Unsolved { n: usize, tau: usize, mais: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Acyclic side information: send every message.
    Identity,
    /// A one-source path plus a searched two-source code.
    Decomposition,
    /// Template code of a Class Ia configuration.
    ClassIaTable,
    /// Shortest code found by enumerating subspaces.
    MinrankSearch,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub n: usize,
    pub tau: usize,
    pub mais: usize,
    pub method: Method,
    /// Source set of the network the code came from.
    pub vtau: Option<Vec<usize>>,
    pub code_rows: Vec<String>,
    pub length: usize,
    pub valid: bool,
    /// Length equals MAIS, which certifies optimality.
    pub optimal: bool,
    pub class_report: Option<ClassReport>,
    pub network_code: Option<CodeDump>,
    #[serde(skip)]
    pub code: BinMatrix,
}

struct Found {
    method: Method,
    code: BinMatrix,
    vtau: Option<Vec<usize>>,
    network_code: Option<CodeDump>,
    report: Option<ClassReport>,
}

/// Network code to index code, checking the length promised by the
/// construction.
fn dualize(g: &SIGraph, code: &NetworkCode) -> Result<(BinMatrix, CodeDump), SolveError> {
    let code = code.with_scalar_forwarding();
    let a = code.extract_a_matrix()?;
    let b = dualize_to_index_code(g, &a)?;
    let expected = g.n() - code.dim();
    if b.rows() != expected {
        return Err(SolveError::WrongLength { length: b.rows(), expected });
    }
    Ok((b, code.dump()))
}

/// Codes the split-off source along its own path and searches a two-source
/// code for the others on the remaining edges. `None` when the search finds
/// nothing within its caps.
pub fn solve_decomposed(
    net: &Arc<NCNetwork>,
    d: &Decomposition,
    caps: &Caps,
) -> Result<Option<NetworkCode>, SolveError> {
    let first = net.sources()[d.source];
    let code1 = NetworkCode::new(net.clone(), vec![first])?.assign_along_path(&d.path, &BinVector::unit(1, 0))?;
    let used: BTreeSet<(usize, usize)> = d.path.edges().collect();
    let g = net.graph();
    let remainder = Digraph::new(
        g.labels().to_vec(),
        g.edges()
            .filter(|e| !used.contains(e))
            .map(|(a, b)| (g.label(a).to_string(), g.label(b).to_string())),
    )
    .expect("subgraph of a valid graph");
    let others: Vec<usize> = (0..net.tau()).filter(|&k| k != d.source).collect();
    let mut h = BTreeSet::new();
    for &i in &others {
        for &j in &others {
            let paths = remainder.simple_paths(net.source_vertex(i), net.receiver_vertex(j), caps.path_limit);
            for p in paths.items {
                h.extend(p.edges());
            }
        }
    }
    let sources: Vec<usize> = others.iter().map(|&k| net.sources()[k]).collect();
    let code2 = match search_assignment(net, &h, &sources, caps) {
        Ok(Some(c)) => c,
        Ok(None) | Err(_) => return Ok(None),
    };
    Ok(Some(NetworkCode::merge(&code1, &code2)?))
}

fn solve_tau_three(g: &SIGraph, sets: &[Vec<usize>], caps: &Caps) -> Result<Option<Found>, SolveError> {
    for set in sets {
        let net = Arc::new(NCNetwork::build(g, set)?);
        let c = classify_network(&net, caps);
        let mut report = ClassReport::from_network(&net, &c);
        report.vtau_tried = sets.iter().take_while(|s| *s != set).cloned().chain([set.clone()]).collect();
        let code = if let Some(d) = &c.decomposition {
            solve_decomposed(&net, d, caps)?.map(|code| (Method::Decomposition, code))
        } else if let Some(ia) = &c.class_ia {
            Some((Method::ClassIaTable, assign_by_table(&net, ia)?))
        } else {
            None
        };
        if let Some((method, code)) = code {
            let (b, dump) = dualize(g, &code)?;
            return Ok(Some(Found {
                method,
                code: b,
                vtau: Some(set.clone()),
                network_code: Some(dump),
                report: Some(report),
            }));
        }
    }
    Ok(None)
}

pub fn solve(g: &SIGraph, caps: &Caps) -> Result<SolveResult, SolveError> {
    let n = g.n();
    let fvs = min_feedback_vertex_sets(g, caps)?;
    let (tau, mais) = (fvs.tau, n - fvs.tau);
    let found = if tau == 0 {
        Some(Found {
            method: Method::Identity,
            code: BinMatrix::identity(n),
            vtau: Some(Vec::new()),
            network_code: None,
            report: None,
        })
    } else if tau == 3 {
        solve_tau_three(g, &fvs.sets, caps)?
    } else {
        None
    };
    let found = match found {
        Some(f) => f,
        None if n <= caps.minrank_max_n => {
            let report = if tau == 3 { Some(classify(g, caps)?) } else { None };
            let (_, code) = minrank2(g, caps)?;
            Found {
                method: Method::MinrankSearch,
                code,
                vtau: None,
                network_code: None,
                report,
            }
        }
        None => return Err(SolveError::Unsolved { n, tau, mais }),
    };
    let valid = decoding_failures(g, &found.code)?.is_empty();
    let length = found.code.rows();
    Ok(SolveResult {
        n,
        tau,
        mais,
        method: found.method,
        vtau: found.vtau,
        code_rows: found.code.to_bitstrings(),
        length,
        valid,
        optimal: valid && length == mais,
        class_report: found.report,
        network_code: found.network_code,
        code: found.code,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimality {
    /// Length equals MAIS.
    Optimal,
    /// Length equals the binary scalar minrank found by search.
    MinimalLinear,
    /// The minrank search found a shorter code.
    NotMinimal,
    /// No certificate either way.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub length: usize,
    pub rank: usize,
    pub valid: bool,
    pub failing_vertices: Vec<usize>,
    pub mais: Option<usize>,
    pub minrank: Option<usize>,
    /// `None` for invalid codes.
    pub optimality: Option<Optimality>,
}

/// Checks that every vertex can decode from `b` and its side information,
/// and certifies optimality where the caps allow.
pub fn verify(g: &SIGraph, b: &BinMatrix, caps: &Caps) -> Result<VerifyReport, SolveError> {
    let failing = decoding_failures(g, b)?;
    let valid = failing.is_empty();
    let length = b.rows();
    let mais = min_feedback_vertex_sets(g, caps).ok().map(|f| g.n() - f.tau);
    let mut minrank = None;
    let optimality = if !valid {
        None
    } else if mais == Some(length) {
        Some(Optimality::Optimal)
    } else if g.n() <= caps.minrank_max_n {
        let (k, _) = minrank2(g, caps)?;
        minrank = Some(k);
        Some(if k == length { Optimality::MinimalLinear } else { Optimality::NotMinimal })
    } else {
        Some(Optimality::Unknown)
    };
    Ok(VerifyReport {
        n: g.n(),
        length,
        rank: b.rank(),
        valid,
        failing_vertices: failing,
        mais,
        minrank,
        optimality,
    })
}
