//! Matroid duality between network-code matrices and index codes.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{BinMatrix, LinalgError};
use crate::sideinfo::{is_valid_index_code, SIGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualizeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("rank condition fails at vertices {failures:?}")]
    ConditionFails { failures: Vec<usize> },
    #[error("matrix has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
}

/// Rank of column set `x` (0-based) in the dual of the vector matroid of `m`.
pub fn dual_rank(m: &BinMatrix, x: &[usize]) -> Result<usize, LinalgError> {
    let mut in_x = vec![false; m.cols()];
    for &c in x {
        if c >= m.cols() {
            return Err(LinalgError::ColumnOutOfRange {
                index: c,
                cols: m.cols(),
            });
        }
        in_x[c] = true;
    }
    let size = in_x.iter().filter(|&&b| b).count();
    let rest: Vec<usize> = (0..m.cols()).filter(|&c| !in_x[c]).collect();
    Ok(size + m.column_rank_of_subset(&rest)? - m.rank())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualCheckReport {
    pub passed: bool,
    /// Vertices (1-based) where adding `v` to `S(v)` raises the rank.
    pub failures: Vec<usize>,
    /// Per vertex: (rank of `S(v)`, rank of `S(v) + v`).
    pub ranks: Vec<(usize, usize)>,
}

/// Checks, on the columns of `a`, that every vertex's column lies in the
/// span of its side-information columns. When this holds, the null space of
/// `a` is a valid index code for `g`.
pub fn check_dual_condition(g: &SIGraph, a: &BinMatrix) -> Result<DualCheckReport, LinalgError> {
    if a.cols() != g.n() {
        return Err(LinalgError::DimensionMismatch {
            expected: g.n(),
            found: a.cols(),
        });
    }
    let mut failures = Vec::new();
    let mut ranks = Vec::with_capacity(g.n());
    for v in 1..=g.n() {
        let mut cols: Vec<usize> = g.side_info(v).iter().map(|u| u - 1).collect();
        let r_side = a.column_rank_of_subset(&cols)?;
        cols.push(v - 1);
        let r_with = a.column_rank_of_subset(&cols)?;
        if r_with != r_side {
            failures.push(v);
        }
        ranks.push((r_side, r_with));
    }
    Ok(DualCheckReport {
        passed: failures.is_empty(),
        failures,
        ranks,
    })
}

/// Turns a full-row-rank `a` satisfying the dual condition into the index
/// code `nullspace(a)` of length `n - rows(a)`.
pub fn dualize_to_index_code(g: &SIGraph, a: &BinMatrix) -> Result<BinMatrix, DualizeError> {
    let report = check_dual_condition(g, a)?;
    if !report.passed {
        return Err(DualizeError::ConditionFails {
            failures: report.failures,
        });
    }
    let rank = a.rank();
    if rank != a.rows() {
        return Err(DualizeError::RankDeficient {
            rank,
            rows: a.rows(),
        });
    }
    let b = a.nullspace_basis();
    debug_assert!(is_valid_index_code(g, &b)?);
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sideinfo::tests::three_cycle;

    fn rows(n: usize, r: &[&str]) -> BinMatrix {
        BinMatrix::parse_rows(n, r).unwrap()
    }

    #[test]
    fn dual_rank_examples() {
        let id = BinMatrix::identity(3);
        assert_eq!(dual_rank(&id, &[]).unwrap(), 0);
        assert_eq!(dual_rank(&id, &[0]).unwrap(), 0);
        assert_eq!(dual_rank(&rows(2, &["11"]), &[0]).unwrap(), 1);
        assert!(dual_rank(&id, &[5]).is_err());
    }

    #[test]
    fn dual_condition_examples() {
        let g = three_cycle();
        assert!(check_dual_condition(&g, &BinMatrix::zeros(2, 3)).unwrap().passed);
        assert!(check_dual_condition(&g, &rows(3, &["111"])).unwrap().passed);
        let r = check_dual_condition(&g, &rows(3, &["100"])).unwrap();
        assert_eq!(r.failures, vec![1]);
        assert_eq!(r.ranks, vec![(0, 1), (0, 0), (1, 1)]);
    }

    #[test]
    fn dualize_examples() {
        let g = three_cycle();
        let b = dualize_to_index_code(&g, &rows(3, &["111"])).unwrap();
        assert_eq!(b, rows(3, &["101", "011"]));
        assert!(is_valid_index_code(&g, &b).unwrap());

        let acyclic = SIGraph::new(3, [(1, 2)]).unwrap();
        let identity = dualize_to_index_code(&acyclic, &BinMatrix::zeros(0, 3)).unwrap();
        assert_eq!(identity, BinMatrix::identity(3));

        assert_eq!(
            dualize_to_index_code(&g, &rows(3, &["100"])),
            Err(DualizeError::ConditionFails { failures: vec![1] })
        );
        assert_eq!(
            dualize_to_index_code(&g, &rows(3, &["111", "111"])),
            Err(DualizeError::RankDeficient { rank: 1, rows: 2 })
        );
    }
}
