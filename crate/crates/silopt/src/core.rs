//! Shared data types: dissimilarity matrices, partitions, coordinate datasets.

use crate::error::{Error, Result};

const DIAG_TOL: f64 = 1e-12;
const SYM_TOL: f64 = 1e-9;

/// Dense symmetric matrix of pairwise dissimilarities.
///
/// The triangle inequality is not required; entries must be finite,
/// nonnegative, symmetric, and zero on the diagonal.
#[derive(Debug, Clone)]
pub struct DissimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Validate a square matrix given in row-major order.
    ///
    /// Asymmetries up to `1e-9` are repaired by averaging; anything larger is
    /// an error. Diagonal noise up to `1e-12` is zeroed.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            let d = rows[i][i];
            if d.abs() > DIAG_TOL {
                return Err(Error::NonzeroDiagonal { index: i, value: d });
            }
            for j in (i + 1)..n {
                let a = rows[i][j];
                let b = rows[j][i];
                if (a - b).abs() > SYM_TOL {
                    return Err(Error::Asymmetric {
                        row: i,
                        col: j,
                        a,
                        b,
                    });
                }
                let v = 0.5 * (a + b);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Ok(Self { n, entries })
    }

    /// Build from an already-symmetric upper triangle without re-validation.
    /// Used by the distance constructors, whose output is symmetric by
    /// construction.
    pub(crate) fn from_condensed(n: usize, upper: impl Fn(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = upper(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Restrict to the objects listed in `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self::from_condensed(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Multiply every entry by `eta > 0`.
    pub fn scaled(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::NonPositiveScale(eta));
        }
        Ok(Self {
            n: self.n,
            entries: self.entries.iter().map(|v| v * eta).collect(),
        })
    }

    /// Reorder objects by a permutation: entry (i, j) of the result is
    /// d(perm[i], perm[j]).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_condensed(self.n, |i, j| self.get(perm[i], perm[j]))
    }
}

/// A partition of `n` objects into `k` clusters, stored canonically:
/// clusters are numbered 0..k by order of first appearance and all
/// clusters are nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
    sizes: Vec<usize>,
}

impl Partition {
    /// Canonicalize a vector of positive integer labels (1-based external
    /// convention; gaps are closed, clusters renumbered by first appearance).
    pub fn from_labels(labels: &[i64]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLabels);
        }
        for &l in labels {
            if l < 1 {
                return Err(Error::NonPositiveLabel(l));
            }
        }
        Ok(Self::from_raw(labels.iter().map(|&l| l as usize)))
    }

    /// Canonicalize any equivalence-class assignment.
    pub(crate) fn from_raw(labels: impl IntoIterator<Item = usize>) -> Self {
        let raw: Vec<usize> = labels.into_iter().collect();
        let mut map: Vec<(usize, usize)> = Vec::new();
        let mut canon = Vec::with_capacity(raw.len());
        for &l in &raw {
            let id = match map.iter().find(|(orig, _)| *orig == l) {
                Some(&(_, id)) => id,
                None => {
                    let id = map.len();
                    map.push((l, id));
                    id
                }
            };
            canon.push(id);
        }
        let k = map.len();
        let mut sizes = vec![0usize; k];
        for &c in &canon {
            sizes[c] += 1;
        }
        Self {
            labels: canon,
            k,
            sizes,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Internal 0-based labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// 1-based labels for external formats.
    pub fn labels_one_based(&self) -> Vec<usize> {
        self.labels.iter().map(|&l| l + 1).collect()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn is_all_singletons(&self) -> bool {
        self.k == self.n()
    }

    pub fn is_single_cluster(&self) -> bool {
        self.k == 1
    }

    /// Members of each cluster, in object order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Relabel object `i` to cluster `r` and re-canonicalize.
    pub fn with_move(&self, i: usize, r: usize) -> Self {
        let mut raw = self.labels.clone();
        raw[i] = r;
        Self::from_raw(raw)
    }
}

/// Coordinate data: n rows of p finite reals, with optional reference labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    truth: Option<Partition>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, truth: Option<Partition>) -> Result<Self> {
        let p = points.first().map_or(0, |r| r.len());
        for (i, row) in points.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Malformed {
                    line: i + 1,
                    msg: format!("row has {} columns, expected {}", row.len(), p),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteCoordinate { row: i, col: j });
                }
            }
        }
        if let Some(t) = &truth {
            if t.n() != points.len() {
                return Err(Error::SizeMismatch {
                    labels: t.n(),
                    n: points.len(),
                });
            }
        }
        Ok(Self { points, truth })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn p(&self) -> usize {
        self.points.first().map_or(0, |r| r.len())
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn truth(&self) -> Option<&Partition> {
        self.truth.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_canonicalized_by_first_appearance() {
        let p = Partition::from_labels(&[2, 2, 1, 1]).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.labels_one_based(), vec![1, 1, 2, 2]);
        assert_eq!(p.sizes(), &[2, 2]);
    }

    #[test]
    fn single_cluster() {
        let p = Partition::from_labels(&[1, 1, 1]).unwrap();
        assert_eq!(p.k(), 1);
        assert_eq!(p.sizes(), &[3]);
    }

    #[test]
    fn gap_closed() {
        let p = Partition::from_labels(&[1, 3, 3]).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.labels_one_based(), vec![1, 2, 2]);
    }

    #[test]
    fn canonicalization_idempotent_and_permutation_invariant() {
        let a = Partition::from_labels(&[3, 1, 3, 2]).unwrap();
        let b = Partition::from_labels(&[1, 2, 1, 3]).unwrap();
        assert_eq!(a, b);
        let again = Partition::from_labels(
            &a.labels_one_based().iter().map(|&l| l as i64).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn rejects_bad_labels() {
        assert!(Partition::from_labels(&[]).is_err());
        assert!(Partition::from_labels(&[1, 0]).is_err());
    }

    #[test]
    fn minimal_valid_matrix() {
        let d = DissimilarityMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.get(0, 1), 1.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let r = DissimilarityMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(matches!(r, Err(Error::Asymmetric { .. })));
    }

    #[test]
    fn rejects_negative() {
        let r = DissimilarityMatrix::from_rows(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]);
        assert!(matches!(r, Err(Error::NegativeEntry { .. })));
    }

    #[test]
    fn rejects_nonzero_diagonal_and_non_square() {
        assert!(DissimilarityMatrix::from_rows(vec![vec![0.5]]).is_err());
        assert!(DissimilarityMatrix::from_rows(vec![vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn small_asymmetry_averaged() {
        let eps = 1e-10;
        let d =
            DissimilarityMatrix::from_rows(vec![vec![0.0, 1.0 + eps], vec![1.0 - eps, 0.0]])
                .unwrap();
        assert!((d.get(0, 1) - 1.0).abs() < 1e-15);
        assert_eq!(d.get(0, 1), d.get(1, 0));
    }
}
