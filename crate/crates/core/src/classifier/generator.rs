//! Side-information graphs with a prescribed Class Ia structure.
//!
//! A blueprint lays out the three unipaths as cycles through the sources
//! `1, 2, 3` (private prefix, shared segments, private suffix) and adds each
//! crosspath as a chain of fresh vertices between two attachment points.
//! Everything else about the instance follows from that layout.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{CrossType, Reduced, Style};
use crate::caps::Caps;
use crate::sideinfo::{min_feedback_vertex_sets, SIGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct CrossSpec {
    from: usize,
    to: usize,
    kind: CrossType,
}

const fn t1(from: usize, to: usize) -> CrossSpec {
    CrossSpec { from, to, kind: CrossType::T1 }
}

const fn special(from: usize, to: usize, kind: CrossType) -> CrossSpec {
    CrossSpec { from, to, kind }
}

fn crosspath_specs(style: Style, reduced: Reduced) -> Vec<CrossSpec> {
    use CrossType::{T2, T3};
    let all_t1 = vec![t1(0, 1), t1(1, 0), t1(0, 2), t1(2, 0), t1(1, 2), t1(2, 1)];
    match (style, reduced) {
        (Style::A, Reduced::S21) | (Style::B, Reduced::S22) => all_t1,
        (Style::A, Reduced::S22) => vec![t1(0, 1), t1(1, 0), t1(2, 0), t1(2, 1), special(0, 2, T3)],
        (Style::A, Reduced::S23) => vec![t1(0, 1), t1(1, 0), t1(0, 2), t1(1, 2), special(2, 0, T2)],
        (Style::A, Reduced::S24) => vec![t1(0, 1), t1(1, 0), special(0, 2, T3), special(2, 0, T2)],
        (Style::B, Reduced::S21) => vec![t1(0, 1), t1(0, 2), t1(2, 0), t1(2, 1), special(1, 0, T2)],
        (Style::B, Reduced::S23) => vec![t1(0, 1), t1(1, 0), t1(2, 0), t1(2, 1), special(0, 2, T3)],
        (Style::B, Reduced::S24) => vec![
            t1(0, 1),
            t1(1, 2),
            t1(2, 0),
            t1(2, 1),
            special(1, 0, T2),
            special(0, 2, T3),
        ],
    }
}

/// Shape parameters. Segment lengths are at least one; everything is
/// indexed by role.
#[derive(Clone, Debug)]
struct Layout {
    style: Style,
    first: usize,
    core: usize,
    second: usize,
    prefix: [usize; 3],
    suffix: [usize; 3],
}

struct Builder {
    next: usize,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn fresh(&mut self, count: usize) -> Vec<usize> {
        let out: Vec<usize> = (self.next..self.next + count).collect();
        self.next += count;
        out
    }

    fn chain(&mut self, walk: &[usize]) {
        self.edges.extend(walk.windows(2).map(|w| (w[0], w[1])));
    }
}

/// Attachment choices for one crosspath: where it leaves and where it lands,
/// and how many fresh vertices it runs through.
#[derive(Clone, Copy, Debug)]
struct Attach {
    from_pick: usize,
    to_pick: usize,
    mid: usize,
}

fn build(layout: &Layout, specs: &[CrossSpec], attach: &[Attach]) -> SIGraph {
    let mut b = Builder { next: 4, edges: Vec::new() };
    let src = [1, 2, 3];
    let first = b.fresh(layout.first);
    let core = b.fresh(layout.core);
    let second = b.fresh(layout.second);
    let pre: Vec<Vec<usize>> = layout.prefix.iter().map(|&k| b.fresh(k)).collect();
    let suf: Vec<Vec<usize>> = layout.suffix.iter().map(|&k| b.fresh(k)).collect();
    // role -> shared segments it runs through, in order
    let through = |r: usize| -> Vec<&Vec<usize>> {
        match (layout.style, r) {
            (_, 0) => vec![&first, &core, &second],
            (Style::A, 1) => vec![&first, &core, &second],
            (Style::A, _) => vec![&core],
            (Style::B, 1) => vec![&first, &core],
            (Style::B, _) => vec![&core, &second],
        }
    };
    for r in 0..3 {
        let mut walk = vec![src[r]];
        walk.extend(&pre[r]);
        for seg in through(r) {
            walk.extend(seg);
        }
        walk.extend(&suf[r]);
        walk.push(src[r]);
        b.chain(&walk);
    }
    for (spec, at) in specs.iter().zip(attach) {
        let (i, j) = (spec.from, spec.to);
        let mut head: Vec<usize> = vec![src[i]];
        head.extend(&pre[i]);
        let mut tail: Vec<usize> = suf[j].clone();
        tail.push(src[j]);
        match (layout.style, spec.kind) {
            (_, CrossType::T1) => {}
            (_, CrossType::T3) => head = first.clone(),
            (Style::A, CrossType::T2) | (Style::B, CrossType::T2) => tail = second.clone(),
        }
        let u = head[at.from_pick % head.len()];
        let t = tail[at.to_pick % tail.len()];
        let mut walk = vec![u];
        walk.extend(b.fresh(at.mid));
        walk.push(t);
        b.chain(&walk);
    }
    SIGraph::new(b.next - 1, b.edges).expect("blueprint edges are in range")
}

fn tau(g: &SIGraph) -> usize {
    let caps = Caps { fvs_max_n: 64, ..Caps::default() };
    min_feedback_vertex_sets(g, &caps).expect("small instance").tau
}

/// The smallest instance of a final configuration: one vertex per shared
/// segment and every crosspath a single edge.
pub fn canonical_instance(style: Style, reduced: Reduced) -> SIGraph {
    let layout = Layout { style, first: 1, core: 1, second: 1, prefix: [0; 3], suffix: [0; 3] };
    let specs = crosspath_specs(style, reduced);
    let attach = vec![Attach { from_pick: 0, to_pick: usize::MAX, mid: 0 }; specs.len()];
    build(&layout, &specs, &attach)
}

/// A random instance of the same final configuration: longer segments,
/// optional private vertices, crosspaths through fresh vertices at random
/// attachment points, then a random renaming of the sources among
/// themselves and of the other vertices among themselves.
pub fn random_variant<R: Rng>(style: Style, reduced: Reduced, rng: &mut R) -> SIGraph {
    let specs = crosspath_specs(style, reduced);
    loop {
        let layout = Layout {
            style,
            first: rng.gen_range(1..=3),
            core: rng.gen_range(1..=3),
            second: rng.gen_range(1..=3),
            prefix: [(); 3].map(|_| rng.gen_range(0..=1)),
            suffix: [(); 3].map(|_| rng.gen_range(0..=1)),
        };
        let attach: Vec<Attach> = specs
            .iter()
            .map(|_| Attach { from_pick: rng.gen(), to_pick: rng.gen(), mid: rng.gen_range(0..=2) })
            .collect();
        let g = build(&layout, &specs, &attach);
        if tau(&g) != 3 {
            continue;
        }
        return relabel(&g, rng);
    }
}

fn relabel<R: Rng>(g: &SIGraph, rng: &mut R) -> SIGraph {
    let mut sources = vec![1, 2, 3];
    sources.shuffle(rng);
    let mut rest: Vec<usize> = (4..=g.n()).collect();
    rest.shuffle(rng);
    let map = |v: usize| if v <= 3 { sources[v - 1] } else { rest[v - 4] };
    SIGraph::new(g.n(), g.edges().map(|(a, b)| (map(a), map(b)))).expect("permutation of a valid graph")
}

/// `count` variants from a seeded generator.
pub fn variants(style: Style, reduced: Reduced, count: usize, seed: u64) -> Vec<SIGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_variant(style, reduced, &mut rng)).collect()
}

/// Style B shapes whose crosspaths only realise the illegitimate
/// configurations 10 or 12 when vertices 1, 2, 3 are taken as sources.
/// Such graphs have feedback vertex number two.
pub fn illegitimate_fixture(config_id: usize) -> Option<SIGraph> {
    use CrossType::{T2, T3};
    let layout = Layout { style: Style::B, first: 1, core: 1, second: 1, prefix: [0; 3], suffix: [0; 3] };
    let mut specs = vec![t1(0, 1), t1(2, 0), t1(2, 1), special(1, 0, T2), special(0, 2, T3)];
    let mut attach = vec![Attach { from_pick: 0, to_pick: usize::MAX, mid: 0 }; specs.len()];
    match config_id {
        10 => {}
        12 => {
            // a second route from the 1-2 trunk to receiver 3
            specs.push(special(1, 2, T3));
            attach.push(Attach { from_pick: 0, to_pick: usize::MAX, mid: 1 });
        }
        _ => return None,
    }
    Some(build(&layout, &specs, &attach))
}

/// Source 1 sits on a private two-cycle; sources 2 and 3 share the vertex 5.
pub fn decomposable_fixture() -> SIGraph {
    SIGraph::new(5, [(1, 4), (4, 1), (2, 5), (5, 2), (3, 5), (5, 3), (2, 3), (3, 2)]).unwrap()
}

/// Brute-force isomorphism test for small graphs.
pub fn isomorphic(a: &SIGraph, b: &SIGraph) -> bool {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return false;
    }
    let degrees = |g: &SIGraph| {
        let mut d: Vec<(usize, usize)> = (1..=g.n())
            .map(|v| (g.side_info(v).len(), (1..=g.n()).filter(|&w| g.has_edge(v, w)).count()))
            .collect();
        d.sort_unstable();
        d
    };
    if degrees(a) != degrees(b) {
        return false;
    }
    let edges: Vec<(usize, usize)> = a.edges().collect();
    (1..=a.n()).permutations(a.n()).any(|p| edges.iter().all(|&(x, y)| b.has_edge(p[x - 1], p[y - 1])))
}
