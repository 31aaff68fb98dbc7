//! Structural classification of three-source networks: edge-disjoint
//! decompositions, Class I (a vertex set on every unipath) and Class Ia (a
//! skeleton plus one crosspath per ordered pair), with the configuration
//! index and its reduction.

pub mod config;
pub mod crosspath;
pub mod generator;
pub mod skeleton;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::caps::{CapExceeded, Caps};
use crate::digraph::{Enumeration, Path};
use crate::sideinfo::{min_feedback_vertex_sets, SIGraph};
use crate::transform::{NCNetwork, TransformError};

pub use config::{CrossType, Reduced, Style};
pub use crosspath::{Crosspath, CrosspathReport};
pub use skeleton::{Skeleton, SkeletonReport};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NotTau3,
    NotClassI,
    ClassINotIa,
    Decomposable,
    ClassIa,
}

/// Unipaths of basis index `k`: network paths from its source to its own
/// receiver.
pub fn unipaths(net: &NCNetwork, k: usize, limit: usize) -> Enumeration<Path> {
    net.source_receiver_paths(k, k, limit)
}

/// Vertices common to every unipath of every source, when non-empty.
pub fn class_i_witness(all: &[Vec<Path>]) -> Option<Vec<usize>> {
    let mut common: Option<BTreeSet<usize>> = None;
    for p in all.iter().flatten() {
        let here: BTreeSet<usize> = p.vertices().iter().copied().collect();
        common = Some(match common {
            None => here,
            Some(c) => c.intersection(&here).copied().collect(),
        });
    }
    common.filter(|c| !c.is_empty()).map(|c| c.into_iter().collect())
}

/// A unipath of one source that is edge-disjoint from some unipath of each
/// other source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Basis index of the split-off source.
    pub source: usize,
    pub path: Path,
}

pub fn find_edge_disjoint_decomposition(all: &[Vec<Path>]) -> Option<Decomposition> {
    let edges = |p: &Path| p.edges().collect::<BTreeSet<_>>();
    for (k, paths) in all.iter().enumerate() {
        for p in paths {
            let ep = edges(p);
            let ok = all
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .all(|(_, qs)| qs.iter().any(|q| q.edges().all(|e| !ep.contains(&e))));
            if ok {
                return Some(Decomposition { source: k, path: p.clone() });
            }
        }
    }
    None
}

/// A Class Ia structure ready for code assignment.
#[derive(Clone, Debug)]
pub struct ClassIa {
    pub skeleton: Skeleton,
    pub config_id: usize,
    /// One crosspath per pair slot.
    pub crosspaths: Vec<Crosspath>,
    pub reduction: config::Reduction,
}

impl ClassIa {
    /// Crosspaths surviving the reduction, each with the pair it plays in
    /// the final configuration.
    pub fn kept(&self) -> Vec<(&Crosspath, (usize, usize))> {
        self.crosspaths
            .iter()
            .filter(|c| !self.reduction.deleted.contains(&(c.from, c.to)))
            .map(|c| (c, config::template_pair(self.skeleton.style, (c.from, c.to), c.kind)))
            .collect()
    }

    /// Edges of the three unipaths and of the crosspaths, either all of them
    /// or only those kept by the reduction.
    pub fn subnetwork_edges(&self, reduced: bool) -> BTreeSet<(usize, usize)> {
        let mut h: BTreeSet<(usize, usize)> = self.skeleton.paths.iter().flat_map(|p| p.edges()).collect();
        if reduced {
            for (c, _) in self.kept() {
                h.extend(c.detour.edges());
            }
        } else {
            for c in &self.crosspaths {
                h.extend(c.detour.edges());
            }
        }
        h
    }
}

/// Outcome for one network (one choice of sources).
#[derive(Clone, Debug)]
pub struct NetworkClassification {
    pub verdict: Verdict,
    pub witness: Vec<usize>,
    pub decomposition: Option<Decomposition>,
    pub class_ia: Option<ClassIa>,
    /// Skeleton whose only realisable configurations are illegitimate.
    pub illegitimate: Option<(Skeleton, Vec<usize>)>,
    pub inconclusive: bool,
    pub diagnostics: Vec<String>,
}

impl NetworkClassification {
    fn rank(&self) -> u8 {
        match (self.verdict, &self.illegitimate) {
            (Verdict::ClassIa, _) => 4,
            (Verdict::Decomposable, _) => 3,
            (_, Some(_)) => 2,
            (Verdict::ClassINotIa, _) => 1,
            _ => 0,
        }
    }
}

/// Classifies a network with three sources. Any acyclifying source set is
/// accepted, which is how illegitimate configurations can be exhibited.
pub fn classify_network(net: &NCNetwork, caps: &Caps) -> NetworkClassification {
    let mut out = NetworkClassification {
        verdict: Verdict::NotClassI,
        witness: Vec::new(),
        decomposition: None,
        class_ia: None,
        illegitimate: None,
        inconclusive: false,
        diagnostics: Vec::new(),
    };
    if net.tau() != 3 {
        out.verdict = Verdict::NotTau3;
        return out;
    }
    let mut all = Vec::with_capacity(3);
    for k in 0..3 {
        let found = unipaths(net, k, caps.path_limit);
        out.inconclusive |= found.overflow;
        if found.items.is_empty() {
            out.diagnostics.push(format!("source {} has no unipath", net.sources()[k]));
            return out;
        }
        all.push(found.items);
    }
    if let Some(d) = find_edge_disjoint_decomposition(&all) {
        out.verdict = Verdict::Decomposable;
        out.decomposition = Some(d);
        return out;
    }
    let Some(witness) = class_i_witness(&all) else {
        return out;
    };
    out.witness = witness;
    out.verdict = Verdict::ClassINotIa;

    let mut seen = BTreeSet::new();
    for p0 in &all[0] {
        for p1 in &all[1] {
            for p2 in &all[2] {
                let Some(triple) = skeleton::normalize_triple([p0, p1, p2]) else {
                    continue;
                };
                if !seen.insert(triple.clone().map(|p| p.vertices().to_vec())) {
                    continue;
                }
                let Ok(sk) = skeleton::detect_skeleton(&triple) else {
                    continue;
                };
                let cands = crosspath::crosspath_candidates(net, &sk, caps);
                out.inconclusive |= cands.overflow;
                out.diagnostics.extend(cands.diagnostics.iter().cloned());
                let sel = crosspath::select_configuration(&sk, &cands);
                if let Some((id, crosspaths)) = sel.legitimate {
                    out.verdict = Verdict::ClassIa;
                    out.inconclusive = false;
                    out.class_ia = Some(ClassIa {
                        reduction: config::reduce(sk.style, id).expect("legitimate id"),
                        skeleton: sk,
                        config_id: id,
                        crosspaths,
                    });
                    return out;
                }
                if !sel.illegitimate.is_empty() && out.illegitimate.is_none() {
                    out.illegitimate = Some((sk, sel.illegitimate));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub tau: usize,
    /// Source sets tried, in order.
    pub vtau_tried: Vec<Vec<usize>>,
    /// Source set the verdict refers to.
    pub vtau: Option<Vec<usize>>,
    pub verdict: Verdict,
    /// Vertices common to all unipaths (network labels).
    pub witness: Vec<String>,
    pub decomposition: Option<Vec<String>>,
    pub skeleton: Option<SkeletonReport>,
    pub crosspaths: Vec<CrosspathReport>,
    pub config_id: Option<usize>,
    pub config_types: Option<String>,
    pub stage_one: Option<String>,
    pub deleted: Vec<String>,
    pub reduced_id: Option<Reduced>,
    pub illegitimate: bool,
    pub illegitimate_ids: Vec<usize>,
    pub inconclusive: bool,
    pub diagnostics: Vec<String>,
}

impl ClassReport {
    pub fn from_network(net: &NCNetwork, c: &NetworkClassification) -> ClassReport {
        let labels = |v: &[usize]| v.iter().map(|&x| net.label(x).to_string()).collect::<Vec<_>>();
        let mut r = ClassReport {
            tau: net.tau(),
            vtau_tried: vec![net.sources().to_vec()],
            vtau: Some(net.sources().to_vec()),
            verdict: c.verdict,
            witness: labels(&c.witness),
            decomposition: c.decomposition.as_ref().map(|d| labels(d.path.vertices())),
            skeleton: None,
            crosspaths: Vec::new(),
            config_id: None,
            config_types: None,
            stage_one: None,
            deleted: Vec::new(),
            reduced_id: None,
            illegitimate: false,
            illegitimate_ids: Vec::new(),
            inconclusive: c.inconclusive,
            diagnostics: c.diagnostics.clone(),
        };
        if let Some(ia) = &c.class_ia {
            let sk = &ia.skeleton;
            r.skeleton = Some(sk.report(net));
            r.crosspaths = ia.crosspaths.iter().map(|x| x.report(net, sk)).collect();
            r.config_id = Some(ia.config_id);
            r.config_types = Some(crosspath::describe(sk.style, ia.config_id));
            r.stage_one = Some(ia.reduction.stage_one.to_string());
            r.deleted = ia.reduction.deleted.iter().map(|&(i, j)| config::pair_name(i, j)).collect();
            r.reduced_id = Some(ia.reduction.reduced);
        } else if let Some((sk, ids)) = &c.illegitimate {
            r.skeleton = Some(sk.report(net));
            r.illegitimate = true;
            r.illegitimate_ids = ids.clone();
        }
        r
    }
}

/// Classifies a side-information graph over its minimum feedback vertex
/// sets in lexicographic order, keeping the strongest verdict.
pub fn classify(g: &SIGraph, caps: &Caps) -> Result<ClassReport, ClassifyError> {
    let fvs = min_feedback_vertex_sets(g, caps)?;
    if fvs.tau != 3 {
        return Ok(ClassReport {
            tau: fvs.tau,
            vtau_tried: Vec::new(),
            vtau: None,
            verdict: Verdict::NotTau3,
            witness: Vec::new(),
            decomposition: None,
            skeleton: None,
            crosspaths: Vec::new(),
            config_id: None,
            config_types: None,
            stage_one: None,
            deleted: Vec::new(),
            reduced_id: None,
            illegitimate: false,
            illegitimate_ids: Vec::new(),
            inconclusive: false,
            diagnostics: Vec::new(),
        });
    }
    let mut best: Option<(u8, ClassReport)> = None;
    let mut tried = Vec::new();
    let mut inconclusive = false;
    for set in &fvs.sets {
        let net = NCNetwork::build(g, set)?;
        let c = classify_network(&net, caps);
        tried.push(set.clone());
        inconclusive |= c.inconclusive;
        let rank = c.rank();
        if best.as_ref().is_none_or(|(b, _)| rank > *b) {
            best = Some((rank, ClassReport::from_network(&net, &c)));
        }
        if rank == 4 {
            break;
        }
    }
    let (rank, mut report) = best.expect("tau = 3 gives at least one set");
    report.vtau_tried = tried;
    report.inconclusive = rank < 4 && inconclusive;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_is_the_common_vertex_set() {
        let p = |v: &[usize]| Path::from_raw(v.to_vec());
        let all = vec![vec![p(&[0, 5, 6])], vec![p(&[1, 5, 6, 7]), p(&[1, 6])]];
        assert_eq!(class_i_witness(&all), Some(vec![6]));
        let none = vec![vec![p(&[0, 5])], vec![p(&[1, 6])]];
        assert_eq!(class_i_witness(&none), None);
    }

    #[test]
    fn decomposition_needs_edge_disjoint_partners() {
        let p = |v: &[usize]| Path::from_raw(v.to_vec());
        let all = vec![vec![p(&[0, 9, 8])], vec![p(&[1, 5, 6])], vec![p(&[2, 5, 6])]];
        let d = find_edge_disjoint_decomposition(&all).unwrap();
        assert_eq!(d.source, 0);
        let shared = vec![vec![p(&[0, 5, 6])], vec![p(&[1, 5, 6])], vec![p(&[2, 5, 6])]];
        assert!(find_edge_disjoint_decomposition(&shared).is_none());
    }

    #[test]
    fn small_graphs_are_not_tau_three() {
        let g = crate::sideinfo::tests::three_cycle();
        let r = classify(&g, &Caps::default()).unwrap();
        assert_eq!((r.verdict, r.tau), (Verdict::NotTau3, 1));
    }

    #[test]
    fn four_clique_is_class_ia() {
        // every unipath of the bidirected K4 passes the fourth vertex, and
        // each ordered pair of sources is joined by a direct edge
        let g = SIGraph::new(4, (1..=4).flat_map(|a| (1..=4).filter(move |&b| b != a).map(move |b| (a, b)))).unwrap();
        let r = classify(&g, &Caps::default()).unwrap();
        assert_eq!(r.tau, 3);
        assert_eq!(r.verdict, Verdict::ClassIa);
        assert_eq!(r.witness, vec!["4", "4'"]);
        assert_eq!(r.config_id, Some(1));
        assert_eq!(r.reduced_id, Some(Reduced::S21));
    }

    #[test]
    fn generated_instances_round_trip() {
        for style in [Style::A, Style::B] {
            for reduced in Reduced::ALL {
                let mut graphs = vec![generator::canonical_instance(style, reduced)];
                graphs.extend(generator::variants(style, reduced, 3, 11));
                for g in graphs {
                    let r = classify(&g, &Caps::default()).unwrap();
                    assert_eq!(r.verdict, Verdict::ClassIa, "{style:?} {reduced}\n{g}\n{r:#?}");
                    assert_eq!(r.skeleton.as_ref().unwrap().style, style, "{g}");
                    assert_eq!(r.reduced_id, Some(reduced), "{style:?}\n{g}\n{r:#?}");
                }
            }
        }
    }

    #[test]
    fn illegitimate_shapes_are_flagged() {
        for id in [10, 12] {
            let g = generator::illegitimate_fixture(id).unwrap();
            let net = NCNetwork::build(&g, &[1, 2, 3]).unwrap();
            let c = classify_network(&net, &Caps::default());
            let r = ClassReport::from_network(&net, &c);
            assert!(r.illegitimate, "{id}: {r:#?}");
            assert!(r.illegitimate_ids.contains(&id));
            assert!(r.illegitimate_ids.iter().all(|&i| i == 10 || i == 12));
        }
    }

    #[test]
    fn decomposable_fixture_splits_off_source_one() {
        let r = classify(&generator::decomposable_fixture(), &Caps::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Decomposable);
        assert_eq!(r.decomposition.unwrap().first().map(String::as_str), Some("1"));
    }
}
