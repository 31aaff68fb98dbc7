//! Crosspaths of a skeleton: routes from one role's source to another role's
//! receiver that leave the first unipath before the pair's shared stretch and
//! rejoin the second one after it.

use std::collections::HashSet;

use serde::Serialize;

use super::config::{self, CrossType, Style, PAIRS};
use super::skeleton::Skeleton;
use crate::caps::Caps;
use crate::digraph::Path;
use crate::transform::NCNetwork;

/// A crosspath is stored by its detour: the part between the vertex `u'`
/// where it leaves the unipath of role `from` and the vertex `t` where it
/// joins the unipath of role `to`. Its interior avoids all three unipaths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crosspath {
    pub from: usize,
    pub to: usize,
    pub detour: Path,
    pub kind: CrossType,
}

impl Crosspath {
    pub fn u(&self) -> usize {
        self.detour.first().unwrap()
    }

    pub fn t(&self) -> usize {
        self.detour.last().unwrap()
    }

    /// Source-to-receiver path: unipath prefix, detour, unipath suffix.
    pub fn full_path(&self, sk: &Skeleton) -> Path {
        let pi = &sk.paths[self.from];
        let pj = &sk.paths[self.to];
        let mut v = pi.vertices()[..pi.position(self.u()).unwrap()].to_vec();
        v.extend_from_slice(self.detour.vertices());
        v.extend_from_slice(&pj.vertices()[pj.position(self.t()).unwrap() + 1..]);
        Path::from_raw(v)
    }

    fn interior(&self) -> &[usize] {
        let v = self.detour.vertices();
        &v[1..v.len() - 1]
    }

    pub fn report(&self, net: &NCNetwork, sk: &Skeleton) -> CrosspathReport {
        let labels = |p: &Path| p.vertices().iter().map(|&x| net.label(x).to_string()).collect();
        CrosspathReport {
            pair: config::pair_name(self.from, self.to),
            sources: [net.sources()[sk.roles[self.from]], net.sources()[sk.roles[self.to]]],
            kind: self.kind,
            detour: labels(&self.detour),
            path: labels(&self.full_path(sk)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrosspathReport {
    /// Role pair, e.g. "13".
    pub pair: String,
    /// Source message vertices of the two roles.
    pub sources: [usize; 2],
    #[serde(rename = "type")]
    pub kind: CrossType,
    pub detour: Vec<String>,
    pub path: Vec<String>,
}

/// Two crosspaths can sit in one configuration when their detours are the
/// same route or have disjoint interiors.
pub fn compatible(a: &Crosspath, b: &Crosspath) -> bool {
    if a.detour == b.detour {
        return true;
    }
    let ia: HashSet<usize> = a.interior().iter().copied().collect();
    b.interior().iter().all(|x| !ia.contains(x))
}

#[derive(Clone, Debug, Default)]
pub struct Candidates {
    /// Per pair slot (see [`PAIRS`]).
    pub slots: [Vec<Crosspath>; 6],
    pub overflow: bool,
    pub diagnostics: Vec<String>,
}

/// All detours for every role pair, typed.
pub fn crosspath_candidates(net: &NCNetwork, sk: &Skeleton, caps: &Caps) -> Candidates {
    let g = net.graph();
    let on_unipath: Vec<bool> = (0..g.vertex_count()).map(|x| sk.on_unipath(x)).collect();
    let mut out = Candidates::default();
    for (slot, &(i, j)) in PAIRS.iter().enumerate() {
        let k = 3 - i - j;
        let pi = &sk.paths[i];
        let pj = &sk.paths[j];
        let before = pi.position(sk.v(i, j)).unwrap();
        let after = pj.position(sk.w(i, j)).unwrap();
        for &u in &pi.vertices()[..before] {
            for &t in &pj.vertices()[after + 1..] {
                let mut banned = on_unipath.clone();
                banned[u] = false;
                banned[t] = false;
                let found = g.simple_paths_avoiding(u, t, caps.path_limit, &banned);
                out.overflow |= found.overflow;
                for detour in found.items {
                    let t3 = g.reaches(sk.v(i, k), u);
                    let t2 = g.reaches(t, sk.w(j, k));
                    let kind = match (t2, t3) {
                        (false, false) => CrossType::T1,
                        (true, false) => CrossType::T2,
                        (false, true) => CrossType::T3,
                        (true, true) => {
                            out.diagnostics.push(format!(
                                "crosspath {} via {}..{} is both Type 2 and Type 3; skipped",
                                config::pair_name(i, j),
                                net.label(u),
                                net.label(t)
                            ));
                            continue;
                        }
                    };
                    out.slots[slot].push(Crosspath { from: i, to: j, detour, kind });
                }
            }
        }
    }
    out
}

/// Verifies the Class Ia conditions on whole paths: each crosspath meets the
/// unipaths and every other crosspath only on its own unipath prefix or
/// suffix, except where two roles share one detour.
pub fn check_class_ia(sk: &Skeleton, crosspaths: &[Crosspath]) -> Result<(), String> {
    let n = sk
        .paths
        .iter()
        .flat_map(|p| p.vertices().iter().copied())
        .chain(crosspaths.iter().flat_map(|c| c.detour.vertices().iter().copied()))
        .max()
        .map_or(0, |m| m + 1);
    let allowed = |c: &Crosspath| -> Vec<bool> {
        let mut a = vec![false; n];
        let pi = &sk.paths[c.from];
        let pj = &sk.paths[c.to];
        for &x in &pi.vertices()[..pi.position(sk.v(c.from, c.to)).unwrap()] {
            a[x] = true;
        }
        for &x in &pj.vertices()[pj.position(sk.w(c.from, c.to)).unwrap() + 1..] {
            a[x] = true;
        }
        a
    };
    let fulls: Vec<Path> = crosspaths.iter().map(|c| c.full_path(sk)).collect();
    let masks: Vec<Vec<bool>> = crosspaths.iter().map(allowed).collect();
    for (ci, c) in crosspaths.iter().enumerate() {
        let name = config::pair_name(c.from, c.to);
        for &x in fulls[ci].vertices() {
            if sk.on_unipath(x) && !masks[ci][x] {
                return Err(format!("crosspath {name} meets a unipath outside its prefix and suffix"));
            }
        }
        for (di, d) in crosspaths.iter().enumerate().skip(ci + 1) {
            if c.detour == d.detour {
                continue;
            }
            for &x in fulls[ci].vertices() {
                if fulls[di].contains(x) && !(masks[ci][x] && masks[di][x]) {
                    return Err(format!(
                        "crosspaths {name} and {} meet outside their prefixes and suffixes",
                        config::pair_name(d.from, d.to)
                    ));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Default)]
pub struct Selection {
    /// Smallest legitimate configuration found, with one crosspath per pair
    /// slot.
    pub legitimate: Option<(usize, Vec<Crosspath>)>,
    /// Illegitimate configurations that can be realised.
    pub illegitimate: Vec<usize>,
}

/// Searches configurations in increasing index order for a compatible
/// choice of one crosspath per pair. Illegitimate configurations are only
/// recorded.
pub fn select_configuration(sk: &Skeleton, cands: &Candidates) -> Selection {
    let style = sk.style;
    let mut out = Selection::default();
    for id in 1..=config::config_count(style) {
        let illegitimate = config::is_illegitimate(style, id);
        if out.legitimate.is_some() && !illegitimate {
            continue;
        }
        let types = config::config_types(style, id).unwrap();
        let lists: Vec<Vec<&Crosspath>> = (0..6)
            .map(|s| cands.slots[s].iter().filter(|c| c.kind == types[s]).collect())
            .collect();
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        let mut chosen = Vec::with_capacity(6);
        if backtrack(sk, &lists, &mut chosen) {
            if illegitimate {
                out.illegitimate.push(id);
            } else {
                out.legitimate = Some((id, chosen.into_iter().cloned().collect()));
            }
        }
    }
    out
}

fn backtrack<'a>(sk: &Skeleton, lists: &[Vec<&'a Crosspath>], chosen: &mut Vec<&'a Crosspath>) -> bool {
    let slot = chosen.len();
    if slot == lists.len() {
        let owned: Vec<Crosspath> = chosen.iter().map(|c| (*c).clone()).collect();
        return check_class_ia(sk, &owned).is_ok();
    }
    for &c in &lists[slot] {
        if chosen.iter().all(|d| compatible(c, d)) {
            chosen.push(c);
            if backtrack(sk, lists, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Pair types of a configuration index, e.g. "12:T1 21:T1 ...".
pub fn describe(style: Style, id: usize) -> String {
    let types = config::config_types(style, id).unwrap();
    PAIRS
        .iter()
        .zip(types)
        .map(|(&(i, j), t)| format!("{}:{:?}", config::pair_name(i, j), t))
        .collect::<Vec<_>>()
        .join(" ")
}
