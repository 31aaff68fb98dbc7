//! Exhaustive code search on a subnetwork.
//!
//! The subnetwork is cut into maximal segments (runs whose inner vertices
//! have one incoming and one outgoing edge); a segment carries one vector.
//! Segments are decided in topological order, each choosing from the span of
//! the segments entering its start, and a branch dies as soon as some
//! receiver's demand leaves the span of everything that can still reach it.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::caps::{CapExceeded, Caps};
use crate::linalg::{BinVector, WordBasis};
use crate::netcode::NetworkCode;
use crate::transform::{NCNetwork, VertexRole};

struct Segment {
    start: usize,
    end: usize,
    edges: Vec<(usize, usize)>,
}

struct Problem {
    segments: Vec<Segment>,
    inputs: Vec<Vec<usize>>,
    next: Vec<Vec<usize>>,
    fixed: Vec<Option<u64>>,
    target: Vec<Option<u64>>,
    /// Per segment: bit r set when it can feed receiver segment `receivers[r]`
    /// (itself included).
    feeds: Vec<u64>,
    receivers: Vec<usize>,
    dim: usize,
}

/// Searches for a code for `sources` (message vertices, in coordinate
/// order) that uses only the edges in `h`. Returns the first feasible code
/// in the order that tries vectors by ascending bitstring.
pub fn search_assignment(
    net: &Arc<NCNetwork>,
    h: &BTreeSet<(usize, usize)>,
    sources: &[usize],
    caps: &Caps,
) -> Result<Option<NetworkCode>, CapExceeded> {
    CapExceeded::check("sources in the assignment search", sources.len(), 64)?;
    let p = build_problem(net, h, sources, caps)?;
    let mut values = vec![0u64; p.segments.len()];
    let mut nodes = 0usize;
    if !dfs(&p, 0, &mut values, &mut nodes, caps.max_search_nodes)? {
        return Ok(None);
    }
    let mut code = NetworkCode::new(net.clone(), sources.to_vec()).expect("sources come from the network");
    for (s, seg) in p.segments.iter().enumerate() {
        for &e in &seg.edges {
            code.assign(e, BinVector::from_word(p.dim, values[s]))
                .expect("each edge lies in one segment");
        }
    }
    debug_assert!(code.check_feasible().feasible);
    Ok(Some(code))
}

fn build_problem(
    net: &Arc<NCNetwork>,
    h: &BTreeSet<(usize, usize)>,
    sources: &[usize],
    caps: &Caps,
) -> Result<Problem, CapExceeded> {
    let g = net.graph();
    let nv = g.vertex_count();
    let coordinate = |x: usize| match net.role(x) {
        VertexRole::Message(w) => sources.iter().position(|&s| s == w),
        _ => None,
    };
    let (mut hin, mut hout) = (vec![0usize; nv], vec![0usize; nv]);
    for &(a, b) in h {
        hout[a] += 1;
        hin[b] += 1;
    }
    let internal = |x: usize| hin[x] == 1 && hout[x] == 1 && coordinate(x).is_none();

    let mut segments = Vec::new();
    for &(a, b) in h {
        if internal(a) {
            continue;
        }
        let mut edges = vec![(a, b)];
        let mut cur = b;
        while internal(cur) {
            let nxt = *g
                .successors(cur)
                .iter()
                .find(|&&s| h.contains(&(cur, s)))
                .unwrap();
            edges.push((cur, nxt));
            cur = nxt;
        }
        segments.push(Segment { start: a, end: cur, edges });
    }
    CapExceeded::check("assignment segments", segments.len(), caps.max_segments)?;

    let mut pos = vec![0usize; nv];
    for (i, x) in g.topological_order().expect("networks are acyclic").into_iter().enumerate() {
        pos[x] = i;
    }
    segments.sort_by_key(|s| (pos[s.start], pos[s.end]));

    let ns = segments.len();
    let inputs: Vec<Vec<usize>> = (0..ns)
        .map(|s| (0..ns).filter(|&t| segments[t].end == segments[s].start).collect())
        .collect();
    let next: Vec<Vec<usize>> = (0..ns)
        .map(|s| (0..ns).filter(|&t| segments[t].start == segments[s].end).collect())
        .collect();
    let fixed: Vec<Option<u64>> = segments.iter().map(|s| coordinate(s.start).map(|k| 1u64 << k)).collect();
    let target: Vec<Option<u64>> = segments
        .iter()
        .map(|s| {
            let last = *s.edges.last().unwrap();
            sources.iter().enumerate().find_map(|(k, &w)| {
                let idx = net.source_index(w)?;
                (net.receiver_edge(idx) == last).then_some(1u64 << k)
            })
        })
        .collect();
    let receivers: Vec<usize> = (0..ns).filter(|&s| target[s].is_some()).collect();
    let mut feeds = vec![0u64; ns];
    for s in (0..ns).rev() {
        if let Some(r) = receivers.iter().position(|&r| r == s) {
            feeds[s] |= 1 << r;
        }
        for &t in &next[s] {
            feeds[s] |= feeds[t];
        }
    }
    Ok(Problem {
        segments,
        inputs,
        next,
        fixed,
        target,
        feeds,
        receivers,
        dim: sources.len(),
    })
}

fn bitstring_key(w: u64, dim: usize) -> u64 {
    (0..dim).fold(0, |acc, k| acc << 1 | (w >> k & 1))
}

fn candidates(p: &Problem, s: usize, values: &[u64]) -> Vec<u64> {
    if let Some(f) = p.fixed[s] {
        return vec![f];
    }
    let mut basis = WordBasis::new();
    let mut gens = Vec::new();
    for &i in &p.inputs[s] {
        if basis.insert(values[i]) {
            gens.push(values[i]);
        }
    }
    let mut span: Vec<u64> = (0u64..1 << gens.len())
        .map(|mask| {
            gens.iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .fold(0, |acc, (_, &v)| acc ^ v)
        })
        .collect();
    if let Some(t) = p.target[s] {
        span.retain(|&v| v == t);
    }
    span.sort_by_key(|&v| bitstring_key(v, p.dim));
    span
}

/// With segments `0..decided` fixed, can every undecided receiver still get
/// its demand?
fn still_possible(p: &Problem, decided: usize, values: &[u64]) -> bool {
    for (r, &rs) in p.receivers.iter().enumerate() {
        if rs < decided {
            continue;
        }
        let bit = 1u64 << r;
        let mut basis = WordBasis::new();
        for s in 0..decided {
            if p.next[s].iter().any(|&t| t >= decided && p.feeds[t] & bit != 0) {
                basis.insert(values[s]);
            }
        }
        for s in decided..p.segments.len() {
            if let Some(f) = p.fixed[s] {
                if p.feeds[s] & bit != 0 {
                    basis.insert(f);
                }
            }
        }
        if !basis.contains(p.target[rs].unwrap()) {
            return false;
        }
    }
    true
}

fn dfs(p: &Problem, s: usize, values: &mut [u64], nodes: &mut usize, limit: usize) -> Result<bool, CapExceeded> {
    *nodes += 1;
    CapExceeded::check("assignment search nodes", *nodes, limit)?;
    if s == p.segments.len() {
        return Ok(true);
    }
    for v in candidates(p, s, values) {
        values[s] = v;
        if still_possible(p, s + 1, values) && dfs(p, s + 1, values, nodes, limit)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sideinfo::SIGraph;

    #[test]
    fn butterfly_needs_the_xor() {
        // sources 1 and 2 share vertex 3; each also reaches the other's
        // receiver directly
        let g = SIGraph::new(3, [(1, 3), (2, 3), (3, 1), (3, 2), (1, 2), (2, 1)]).unwrap();
        let net = Arc::new(NCNetwork::build(&g, &[1, 2]).unwrap());
        let h: BTreeSet<_> = net.graph().edges().collect();
        let code = search_assignment(&net, &h, &[1, 2], &Caps::default()).unwrap().unwrap();
        assert!(code.check_feasible().feasible);
        let mid = net.coding_edge(3);
        assert_eq!(code.get(mid).to_bitstring(), "11");
    }

    #[test]
    fn missing_route_means_no_code() {
        // both sources squeeze through vertex 3 and nothing else
        let g = SIGraph::new(3, [(1, 3), (3, 1), (2, 3), (3, 2)]).unwrap();
        let net = Arc::new(NCNetwork::build(&g, &[1, 2]).unwrap());
        let h: BTreeSet<_> = net.graph().edges().collect();
        assert!(search_assignment(&net, &h, &[1, 2], &Caps::default()).unwrap().is_none());
    }

    #[test]
    fn segment_cap_is_enforced() {
        let g = SIGraph::new(3, [(1, 3), (2, 3), (3, 1), (3, 2), (1, 2), (2, 1)]).unwrap();
        let net = Arc::new(NCNetwork::build(&g, &[1, 2]).unwrap());
        let h: BTreeSet<_> = net.graph().edges().collect();
        let caps = Caps { max_segments: 2, ..Caps::default() };
        assert!(search_assignment(&net, &h, &[1, 2], &caps).is_err());
    }
}
