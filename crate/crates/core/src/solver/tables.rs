//! Code templates for the eight final configurations.
//!
//! Every template uses coefficient one at each merge, so the code on the
//! reduced subnetwork is the xor of whatever flows in. The rules pin the
//! vectors on the trunk stretches and crosspaths; [`assign_by_table`]
//! propagates, checks each rule against the propagated values and only then
//! writes the code.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::classifier::config::{pair_name, Reduced, Style};
use crate::classifier::ClassIa;
use crate::digraph::Path;
use crate::linalg::BinVector;
use crate::netcode::{NetCodeError, NetworkCode};
use crate::transform::{NCNetwork, VertexRole};

/// Named points on the role-1 unipath. `T31` and `T21` are where the kept
/// Type 2 crosspath joins the trunk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    V12,
    V13,
    W12,
    W13,
    T21,
    T31,
}

/// Where a rule applies. Roles are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    /// Stretch of the role-1 unipath between two anchors.
    Trunk(Anchor, Anchor),
    /// Every kept crosspath whose final pair starts at this role.
    From(usize),
    /// The kept crosspath playing this pair.
    Cross(usize, usize),
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Trunk(a, b) => write!(f, "{a:?}->{b:?}"),
            Segment::From(i) => write!(f, "crosspaths from {}", i + 1),
            Segment::Cross(i, j) => write!(f, "crosspath {}", pair_name(*i, *j)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rule {
    pub segment: Segment,
    /// Coefficients on the role-1, role-2 and role-3 messages.
    pub vector: [bool; 3],
}

const fn rule(segment: Segment, bits: [u8; 3]) -> Rule {
    Rule {
        segment,
        vector: [bits[0] == 1, bits[1] == 1, bits[2] == 1],
    }
}

pub fn table(style: Style, reduced: Reduced) -> Vec<Rule> {
    use Anchor::*;
    use Segment::*;
    let units = [rule(From(0), [1, 0, 0]), rule(From(1), [0, 1, 0]), rule(From(2), [0, 0, 1])];
    let mut t = match (style, reduced) {
        (Style::A, Reduced::S21) | (Style::A, Reduced::S22) => {
            vec![rule(Trunk(V12, V13), [1, 1, 0]), rule(Trunk(V13, W12), [1, 1, 1])]
        }
        (Style::A, _) => vec![
            rule(Trunk(V12, V13), [1, 1, 0]),
            rule(Trunk(V13, T31), [1, 1, 1]),
            rule(Trunk(T31, W12), [1, 1, 0]),
        ],
        (Style::B, Reduced::S21) | (Style::B, Reduced::S24) => vec![
            rule(Trunk(V12, V13), [1, 1, 0]),
            rule(Trunk(V13, T21), [1, 1, 1]),
            rule(Trunk(T21, W13), [1, 0, 1]),
        ],
        (Style::B, _) => vec![rule(Trunk(V12, V13), [1, 1, 0]), rule(Trunk(V13, W13), [1, 1, 1])],
    };
    let crossing = [
        rule(Cross(0, 1), [1, 0, 0]),
        rule(Cross(1, 0), [0, 1, 0]),
        rule(Cross(0, 2), [1, 1, 0]),
    ];
    match (style, reduced) {
        (Style::A, Reduced::S21) | (Style::A, Reduced::S23) | (Style::B, Reduced::S22) => t.extend(units),
        (Style::A, Reduced::S22) | (Style::B, Reduced::S23) => {
            t.push(units[2]);
            t.extend(crossing);
        }
        (Style::A, Reduced::S24) => {
            t.extend(crossing);
            t.push(rule(Cross(2, 0), [0, 0, 1]));
        }
        (Style::B, Reduced::S21) => {
            t.push(units[2]);
            t.push(units[0]);
            t.push(crossing[1]);
        }
        (Style::B, Reduced::S24) => {
            t.push(crossing[0]);
            t.push(units[2]);
            t.push(units[1]);
            t.push(crossing[2]);
        }
    }
    t
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("template {segment}: expected {expected} but the merges give {found} at {vertex}")]
    MergePointMismatch {
        segment: String,
        expected: BinVector,
        found: BinVector,
        vertex: String,
    },
    #[error("template {segment}: {reason}")]
    BadSegment { segment: String, reason: String },
    #[error(transparent)]
    NetCode(#[from] NetCodeError),
}

/// Builds the three-source code of a Class Ia network from the template of
/// its final configuration.
pub fn assign_by_table(net: &Arc<NCNetwork>, ia: &ClassIa) -> Result<NetworkCode, TableError> {
    let sk = &ia.skeleton;
    let g = net.graph();
    let kept = ia.kept();

    let h = ia.subnetwork_edges(true);

    // coefficient-one propagation over the reduced subnetwork
    let mut values: BTreeMap<(usize, usize), BinVector> = BTreeMap::new();
    for x in g.topological_order().expect("networks are acyclic") {
        let out = match net.role(x) {
            VertexRole::Message(w) if net.source_index(w).is_some() => {
                BinVector::unit(3, net.source_index(w).unwrap())
            }
            _ => {
                let mut acc = BinVector::zeros(3);
                for &p in g.predecessors(x) {
                    if let Some(v) = values.get(&(p, x)) {
                        acc.xor_assign(v);
                    }
                }
                acc
            }
        };
        for &s in g.successors(x) {
            if h.contains(&(x, s)) {
                values.insert((x, s), out.clone());
            }
        }
    }

    let to_network = |bits: [bool; 3]| {
        let mut v = BinVector::zeros(3);
        for (role, &b) in bits.iter().enumerate() {
            if b {
                v.set(sk.roles[role], true);
            }
        }
        v
    };
    let anchor = |a: Anchor| -> Option<usize> {
        let joining = |pair| kept.iter().find(|(_, tp)| *tp == pair).map(|(c, _)| c.t());
        match a {
            Anchor::V12 => Some(sk.v12),
            Anchor::V13 => Some(sk.v13),
            Anchor::W12 => Some(sk.w12),
            Anchor::W13 => Some(sk.w13),
            Anchor::T31 => joining((2, 0)),
            Anchor::T21 => joining((1, 0)),
        }
    };
    let trunk = &sk.paths[0];
    let mut code = NetworkCode::for_all_sources(net.clone());
    for r in table(sk.style, ia.reduction.reduced) {
        let name = r.segment.to_string();
        let bad = |reason: &str| TableError::BadSegment {
            segment: name.clone(),
            reason: reason.to_string(),
        };
        let edges: Vec<(usize, usize)> = match r.segment {
            Segment::Trunk(a, b) => {
                let (a, b) = (anchor(a).ok_or_else(|| bad("anchor missing"))?, anchor(b).ok_or_else(|| bad("anchor missing"))?);
                let (pa, pb) = (
                    trunk.position(a).ok_or_else(|| bad("anchor off the trunk"))?,
                    trunk.position(b).ok_or_else(|| bad("anchor off the trunk"))?,
                );
                if pa > pb {
                    return Err(bad("anchors out of order"));
                }
                Path::from_raw(trunk.vertices()[pa..=pb].to_vec()).edges().collect()
            }
            Segment::From(i) => kept
                .iter()
                .filter(|(_, tp)| tp.0 == i)
                .flat_map(|(c, _)| c.detour.edges())
                .collect(),
            Segment::Cross(i, j) => {
                let (c, _) = kept
                    .iter()
                    .find(|(_, tp)| *tp == (i, j))
                    .ok_or_else(|| bad("no crosspath plays this pair"))?;
                c.detour.edges().collect()
            }
        };
        let expected = to_network(r.vector);
        for e in edges {
            let found = values[&e].clone();
            if found != expected {
                return Err(TableError::MergePointMismatch {
                    segment: name,
                    expected,
                    found,
                    vertex: net.label(e.0).to_string(),
                });
            }
            code.assign(e, found)?;
        }
    }
    for (e, v) in values {
        code.assign(e, v)?;
    }
    let report = code.check_feasible();
    if !report.feasible {
        return Err(NetCodeError::Infeasible(report).into());
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::classifier::{classify_network, generator};

    #[test]
    fn every_table_lists_distinct_segments() {
        for style in [Style::A, Style::B] {
            for r in Reduced::ALL {
                let t = table(style, r);
                let mut names: Vec<String> = t.iter().map(|x| x.segment.to_string()).collect();
                names.sort();
                names.dedup();
                assert_eq!(names.len(), t.len());
            }
        }
    }

    #[test]
    fn canonical_instances_get_feasible_codes() {
        for style in [Style::A, Style::B] {
            for r in Reduced::ALL {
                let g = generator::canonical_instance(style, r);
                let net = Arc::new(NCNetwork::build(&g, &[1, 2, 3]).unwrap());
                let c = classify_network(&net, &Caps::default());
                let ia = c.class_ia.expect("class Ia");
                let code = assign_by_table(&net, &ia).unwrap();
                assert!(code.check_feasible().feasible);
            }
        }
    }
}
