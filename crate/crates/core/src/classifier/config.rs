//! Configuration numbering, legality and reductions for the two skeleton
//! styles.
//!
//! Roles are 0-based here (role 0 is printed as "1"). Crosspath pairs
//! are always listed in the order of [`PAIRS`].

use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Style {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CrossType {
    T1,
    T2,
    T3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reduced {
    S21,
    S22,
    S23,
    S24,
}

impl Reduced {
    pub const ALL: [Reduced; 4] = [Reduced::S21, Reduced::S22, Reduced::S23, Reduced::S24];

    pub fn name(self) -> &'static str {
        match self {
            Reduced::S21 => "S21",
            Reduced::S22 => "S22",
            Reduced::S23 => "S23",
            Reduced::S24 => "S24",
        }
    }

    pub fn parse(s: &str) -> Option<Reduced> {
        Reduced::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Reduced {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Reduced {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Ordered role pairs `(i, j)`: 12, 21, 13, 31, 23, 32.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];

pub fn pair_slot(i: usize, j: usize) -> usize {
    PAIRS
        .iter()
        .position(|&p| p == (i, j))
        .expect("distinct roles in 0..3")
}

pub fn pair_name(i: usize, j: usize) -> String {
    format!("{}{}", i + 1, j + 1)
}

/// Types each crosspath may take in a style; the first element of each list
/// is the type whose choice adds nothing to the configuration index.
fn allowed(style: Style, slot: usize) -> &'static [CrossType] {
    use CrossType::*;
    match (style, PAIRS[slot]) {
        (Style::A, (0, 1)) | (Style::A, (1, 0)) => &[T1],
        (Style::A, (0, 2)) | (Style::A, (1, 2)) => &[T1, T3],
        (Style::A, (2, 0)) | (Style::A, (2, 1)) => &[T1, T2],
        (Style::B, (1, 0)) => &[T1, T2],
        (Style::B, (0, 2)) => &[T1, T3],
        (Style::B, (1, 2)) => &[T2, T1, T3],
        (Style::B, _) => &[T1],
        _ => unreachable!(),
    }
}

pub fn config_count(style: Style) -> usize {
    match style {
        Style::A => 16,
        Style::B => 12,
    }
}

/// Configurations that cannot occur with a feedback vertex number of three.
pub fn is_illegitimate(style: Style, id: usize) -> bool {
    style == Style::B && (id == 10 || id == 12)
}

// Index weights follow the order in which the configuration trees branch:
// style A on 13, 31, 23, 32; style B on 21, 13, 23.
const WEIGHTS_A: [(usize, usize); 4] = [(2, 8), (3, 4), (4, 2), (5, 1)];
const WEIGHTS_B: [(usize, usize); 3] = [(1, 6), (2, 3), (4, 1)];

fn weights(style: Style) -> &'static [(usize, usize)] {
    match style {
        Style::A => &WEIGHTS_A,
        Style::B => &WEIGHTS_B,
    }
}

/// Configuration index (1-based) of a legal type assignment.
pub fn config_id(style: Style, types: &[CrossType; 6]) -> Option<usize> {
    for (slot, t) in types.iter().enumerate() {
        if !allowed(style, slot).contains(t) {
            return None;
        }
    }
    Some(
        1 + weights(style)
            .iter()
            .map(|&(slot, w)| {
                let pos = allowed(style, slot).iter().position(|t| *t == types[slot]).unwrap();
                pos * w
            })
            .sum::<usize>(),
    )
}

/// Inverse of [`config_id`].
pub fn config_types(style: Style, id: usize) -> Option<[CrossType; 6]> {
    if id == 0 || id > config_count(style) {
        return None;
    }
    let mut rest = id - 1;
    let mut types = [CrossType::T1; 6];
    for &(slot, w) in weights(style) {
        let options = allowed(style, slot);
        types[slot] = options[rest / w];
        rest %= w;
    }
    Some(types)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub stage_one: &'static str,
    /// Crosspath pairs (0-based roles) dropped from the configuration.
    pub deleted: &'static [(usize, usize)],
    pub reduced: Reduced,
}

/// Stage-one deletions and the final configuration. `None` for the
/// illegitimate configurations.
pub fn reduce(style: Style, id: usize) -> Option<Reduction> {
    const P13: (usize, usize) = (0, 2);
    const P31: (usize, usize) = (2, 0);
    const P23: (usize, usize) = (1, 2);
    const P32: (usize, usize) = (2, 1);
    const P21: (usize, usize) = (1, 0);
    let r = |stage_one, deleted, reduced| Some(Reduction { stage_one, deleted, reduced });
    match (style, id) {
        (Style::A, 1) => r("S11", &[], Reduced::S21),
        (Style::A, 3 | 11) => r("S12", &[P13], Reduced::S22),
        (Style::A, 9) => r("S13", &[P23], Reduced::S22),
        (Style::A, 2 | 6) => r("S14", &[P31], Reduced::S23),
        (Style::A, 5) => r("S15", &[P32], Reduced::S23),
        (Style::A, 4) => r("S16", &[P13, P31], Reduced::S24),
        (Style::A, 7 | 8 | 15 | 16) => r("S17", &[P13, P32], Reduced::S24),
        (Style::A, 10 | 12 | 14) => r("S18", &[P31, P23], Reduced::S24),
        (Style::A, 13) => r("S19", &[P23, P32], Reduced::S24),
        (Style::B, 1) => r("S11", &[P21], Reduced::S21),
        (Style::B, 7..=9) => r("S15", &[P23], Reduced::S21),
        (Style::B, 2) => r("S12", &[], Reduced::S22),
        (Style::B, 3) => r("S13", &[P13], Reduced::S23),
        (Style::B, 4..=6) => r("S14", &[P23], Reduced::S23),
        (Style::B, 11) => r("S16", &[], Reduced::S24),
        _ => None,
    }
}

/// The pair a kept crosspath plays in the final configuration. A Type 2 or
/// Type 3 crosspath that survives the reduction also covers the pair whose
/// own crosspath was deleted, and the final templates name it after that
/// pair.
pub fn template_pair(style: Style, pair: (usize, usize), t: CrossType) -> (usize, usize) {
    match (style, t) {
        (_, CrossType::T1) => pair,
        (Style::A, CrossType::T3) | (Style::B, CrossType::T3) => (0, 2),
        (Style::A, CrossType::T2) => (2, 0),
        (Style::B, CrossType::T2) => (1, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CrossType::*;

    #[test]
    fn style_a_numbering() {
        assert_eq!(config_id(Style::A, &[T1; 6]), Some(1));
        // 12, 21 T1; 13, 23 T3; 31, 32 T2
        assert_eq!(config_id(Style::A, &[T1, T1, T3, T2, T3, T2]), Some(16));
        for id in 1..=16 {
            let types = config_types(Style::A, id).unwrap();
            assert_eq!(config_id(Style::A, &types), Some(id));
        }
        assert_eq!(config_id(Style::A, &[T2, T1, T1, T1, T1, T1]), None);
    }

    #[test]
    fn style_b_numbering() {
        assert_eq!(config_id(Style::B, &[T1; 6]), Some(2));
        for id in 1..=12 {
            let types = config_types(Style::B, id).unwrap();
            assert_eq!(config_id(Style::B, &types), Some(id));
        }
        // 21 T2, 13 T3 with 23 T2 or T3 are the two illegitimate shapes
        assert_eq!(config_id(Style::B, &[T1, T2, T3, T1, T2, T1]), Some(10));
        assert_eq!(config_id(Style::B, &[T1, T2, T3, T1, T3, T1]), Some(12));
        assert!(is_illegitimate(Style::B, 10) && is_illegitimate(Style::B, 12));
        assert_eq!(config_id(Style::B, &[T1, T1, T1, T2, T1, T1]), None);
    }

    #[test]
    fn reductions_cover_every_legitimate_id() {
        for style in [Style::A, Style::B] {
            for id in 1..=config_count(style) {
                assert_eq!(reduce(style, id).is_none(), is_illegitimate(style, id), "{style:?} {id}");
            }
        }
        let r = reduce(Style::A, 11).unwrap();
        assert_eq!((r.stage_one, r.reduced), ("S12", Reduced::S22));
        let r = reduce(Style::A, 15).unwrap();
        assert_eq!(r.deleted, &[(0, 2), (2, 1)]);
        assert_eq!(reduce(Style::B, 1).unwrap().deleted, &[(1, 0)]);
    }

    #[test]
    fn reductions_leave_one_crosspath_of_each_special_type() {
        for style in [Style::A, Style::B] {
            for id in (1..=config_count(style)).filter(|&id| !is_illegitimate(style, id)) {
                let types = config_types(style, id).unwrap();
                let red = reduce(style, id).unwrap();
                let kept: Vec<usize> = (0..6).filter(|&s| !red.deleted.contains(&PAIRS[s])).collect();
                let mut labels: Vec<(usize, usize)> = kept
                    .iter()
                    .map(|&s| template_pair(style, PAIRS[s], types[s]))
                    .collect();
                labels.sort();
                let before = labels.len();
                labels.dedup();
                assert_eq!(before, labels.len(), "{style:?} {id}");
                let has = |t| kept.iter().any(|&s| types[s] == t);
                let expected = match (has(T2), has(T3)) {
                    (false, false) => Reduced::S21,
                    (false, true) => Reduced::S22,
                    (true, false) => Reduced::S23,
                    (true, true) => Reduced::S24,
                };
                let expected = match (style, expected) {
                    // style B names its finals differently: the Type 2 final is S21
                    (Style::B, Reduced::S21) => Reduced::S22,
                    (Style::B, Reduced::S22) => Reduced::S23,
                    (Style::B, Reduced::S23) => Reduced::S21,
                    (_, r) => r,
                };
                assert_eq!(red.reduced, expected, "{style:?} {id}");
            }
        }
    }
}
