//! Skeletons: three source-to-own-receiver paths whose pairwise overlaps are
//! contiguous and which share a common core.

use serde::Serialize;

use super::config::Style;
use crate::digraph::Path;
use crate::transform::NCNetwork;

/// True when the vertices shared by `p` and `q` form one contiguous run on
/// each of them.
pub fn is_contiguous(p: &Path, q: &Path) -> bool {
    run_is_contiguous(p, q) && run_is_contiguous(q, p)
}

fn run_is_contiguous(p: &Path, q: &Path) -> bool {
    let hits: Vec<usize> = p
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| q.contains(**v))
        .map(|(i, _)| i)
        .collect();
    hits.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Rewrites `q` so that its overlap with `p` becomes contiguous: between the
/// first and last vertex it shares with `p`, `q` is replaced by the matching
/// stretch of `p`. Both paths must come from the same acyclic graph.
pub fn normalize_contiguous(p: &Path, q: &Path) -> Path {
    let shared: Vec<usize> = q.vertices().iter().copied().filter(|v| p.contains(*v)).collect();
    let (Some(&a), Some(&b)) = (shared.first(), shared.last()) else {
        return q.clone();
    };
    let (qa, qb) = (q.position(a).unwrap(), q.position(b).unwrap());
    let (pa, pb) = (p.position(a).unwrap(), p.position(b).unwrap());
    debug_assert!(pa <= pb, "paths disagree on the order of shared vertices");
    let mut out = q.vertices()[..qa].to_vec();
    out.extend_from_slice(&p.vertices()[pa..=pb]);
    out.extend_from_slice(&q.vertices()[qb + 1..]);
    Path::from_raw(out)
}

/// Makes a triple pairwise contiguous by repeated normalization against the
/// first path. Returns `None` when that does not settle.
pub fn normalize_triple(paths: [&Path; 3]) -> Option<[Path; 3]> {
    let mut t = [paths[0].clone(), paths[1].clone(), paths[2].clone()];
    for _ in 0..4 {
        if is_contiguous(&t[0], &t[1]) && is_contiguous(&t[0], &t[2]) && is_contiguous(&t[1], &t[2]) {
            return Some(t);
        }
        t[1] = normalize_contiguous(&t[0], &t[1]);
        t[2] = normalize_contiguous(&t[0], &t[2]);
        t[2] = normalize_contiguous(&t[1], &t[2]);
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub style: Style,
    /// Basis index (position in the network's source list) of each role.
    pub roles: [usize; 3],
    /// Unipath of each role.
    pub paths: [Path; 3],
    pub v12: usize,
    pub v13: usize,
    pub w12: usize,
    pub w13: usize,
    /// Vertices common to all three paths, in path order.
    pub core: Vec<usize>,
}

impl Skeleton {
    /// First vertex shared by the unipaths of roles `i` and `j`.
    pub fn v(&self, i: usize, j: usize) -> usize {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.v12,
            _ => self.v13,
        }
    }

    /// Last vertex shared by the unipaths of roles `i` and `j`.
    pub fn w(&self, i: usize, j: usize) -> usize {
        match (i.min(j), i.max(j), self.style) {
            (0, 1, _) => self.w12,
            (0, 2, _) | (1, 2, Style::A) => self.w13,
            _ => self.w12,
        }
    }

    /// Junctions in the order they appear along the role-1 unipath.
    pub fn trunk_order(&self) -> [usize; 4] {
        match self.style {
            Style::A => [self.v12, self.v13, self.w13, self.w12],
            Style::B => [self.v12, self.v13, self.w12, self.w13],
        }
    }

    pub fn on_unipath(&self, x: usize) -> bool {
        self.paths.iter().any(|p| p.contains(x))
    }

    pub fn report(&self, net: &NCNetwork) -> SkeletonReport {
        let label = |x: usize| net.label(x).to_string();
        SkeletonReport {
            style: self.style,
            roles: self.roles.map(|k| net.sources()[k]),
            unipaths: self
                .paths
                .iter()
                .map(|p| p.vertices().iter().map(|&x| label(x)).collect())
                .collect(),
            v12: label(self.v12),
            v13: label(self.v13),
            w12: label(self.w12),
            w13: label(self.w13),
            trunk_order: self.trunk_order().iter().map(|&x| label(x)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkeletonReport {
    pub style: Style,
    /// Source message vertex playing roles 1, 2 and 3.
    pub roles: [usize; 3],
    pub unipaths: Vec<Vec<String>>,
    pub v12: String,
    pub v13: String,
    pub w12: String,
    pub w13: String,
    pub trunk_order: Vec<String>,
}

/// Reads a skeleton off a pairwise contiguous triple of unipaths, indexed by
/// basis index. Fails when the three share nothing, or when more than one
/// pair starts before (or ends after) the common core.
pub fn detect_skeleton(paths: &[Path; 3]) -> Result<Skeleton, String> {
    for a in 0..3 {
        for b in a + 1..3 {
            if !is_contiguous(&paths[a], &paths[b]) {
                return Err(format!("unipaths {a} and {b} overlap in more than one run"));
            }
        }
    }
    let core: Vec<usize> = paths[0]
        .vertices()
        .iter()
        .copied()
        .filter(|&x| paths[1].contains(x) && paths[2].contains(x))
        .collect();
    let (Some(&core_start), Some(&core_end)) = (core.first(), core.last()) else {
        return Err("the three unipaths share no vertex".into());
    };
    let overlap = |a: usize, b: usize| -> (usize, usize) {
        let shared: Vec<usize> = paths[a]
            .vertices()
            .iter()
            .copied()
            .filter(|&x| paths[b].contains(x))
            .collect();
        (shared[0], *shared.last().unwrap())
    };
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let early: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(a, b)| overlap(a, b).0 != core_start).collect();
    let late: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(a, b)| overlap(a, b).1 != core_end).collect();
    if early.len() > 1 || late.len() > 1 {
        return Err("more than one pair overlaps outside the common core".into());
    }
    let other = |(a, b): (usize, usize)| 3 - a - b;
    let (style, roles) = match (early.first(), late.first()) {
        (Some(&e), Some(&l)) if e != l => {
            let shared = if e.0 == l.0 || e.0 == l.1 { e.0 } else { e.1 };
            let second = if e.0 == shared { e.1 } else { e.0 };
            let third = if l.0 == shared { l.1 } else { l.0 };
            (Style::B, [shared, second, third])
        }
        (Some(&p), _) | (None, Some(&p)) => (Style::A, [p.0, p.1, other(p)]),
        (None, None) => (Style::A, [0, 1, 2]),
    };
    let [r1, r2, r3] = roles;
    let (v12, w12) = overlap(r1.min(r2), r1.max(r2));
    let (v13, w13) = overlap(r1.min(r3), r1.max(r3));
    Ok(Skeleton {
        style,
        roles,
        paths: roles.map(|r| paths[r].clone()),
        v12,
        v13,
        w12,
        w13,
        core,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Path {
        Path::from_raw(v.to_vec())
    }

    #[test]
    fn contiguity() {
        assert!(is_contiguous(&p(&[0, 1, 2, 3]), &p(&[5, 1, 2, 6])));
        assert!(!is_contiguous(&p(&[0, 1, 2, 3]), &p(&[5, 1, 7, 3])));
        assert!(is_contiguous(&p(&[0, 1]), &p(&[2, 3])));
    }

    #[test]
    fn normalization_splices_in_the_reference_stretch() {
        let q = normalize_contiguous(&p(&[0, 1, 2, 3, 4]), &p(&[9, 1, 7, 3, 8]));
        assert_eq!(q.vertices(), &[9, 1, 2, 3, 8]);
        let untouched = normalize_contiguous(&p(&[0, 1]), &p(&[5, 6]));
        assert_eq!(untouched.vertices(), &[5, 6]);
    }

    #[test]
    fn style_a_and_b_are_told_apart() {
        // style A: 0 and 1 share 10..13, 2 joins for 11..12
        let a = [p(&[0, 10, 11, 12, 13, 20]), p(&[1, 10, 11, 12, 13, 21]), p(&[2, 11, 12, 22])];
        let s = detect_skeleton(&a).unwrap();
        assert_eq!(s.style, Style::A);
        assert_eq!(s.roles, [0, 1, 2]);
        assert_eq!(s.trunk_order(), [10, 11, 12, 13]);

        // pair (0,2) both starts early and ends late, so it is the 1-2 trunk
        let a = [p(&[0, 10, 11, 12, 20]), p(&[1, 11, 21]), p(&[2, 3, 10, 11, 12, 22])];
        let s = detect_skeleton(&a).unwrap();
        assert_eq!(s.style, Style::A);
        assert_eq!(s.roles, [0, 2, 1]);

        let b = [p(&[0, 10, 11, 12, 20]), p(&[1, 10, 11, 21]), p(&[2, 11, 12, 22])];
        let s = detect_skeleton(&b).unwrap();
        assert_eq!(s.style, Style::B);
        assert_eq!(s.roles, [0, 1, 2]);
        assert_eq!(s.trunk_order(), [10, 11, 11, 12]);
        assert_eq!(s.w(1, 2), 11);
    }

    #[test]
    fn disjoint_triples_are_rejected() {
        assert!(detect_skeleton(&[p(&[0, 5]), p(&[1, 5]), p(&[2, 6])]).is_err());
    }
}
