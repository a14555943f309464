//! Distance construction from coordinate and binary data.

use crate::core::{Dataset, DissimilarityMatrix};
use crate::error::{Error, Result};

/// Pairwise Euclidean (L2) distances.
pub fn euclidean(x: &Dataset) -> Result<DissimilarityMatrix> {
    Ok(DissimilarityMatrix::from_condensed(x.n(), |i, j| {
        x.point(i)
            .iter()
            .zip(x.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }))
}

/// Pairwise Manhattan (L1) distances.
pub fn manhattan(x: &Dataset) -> Result<DissimilarityMatrix> {
    Ok(DissimilarityMatrix::from_condensed(x.n(), |i, j| {
        x.point(i)
            .iter()
            .zip(x.point(j))
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }))
}

/// Jaccard distance on binary presence/absence rows:
/// d(i, j) = 1 - |intersection| / |union|. A pair of all-zero rows gets
/// distance 0 (treated as identical).
pub fn jaccard_binary(rows: &[Vec<f64>]) -> Result<DissimilarityMatrix> {
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 && v != 1.0 {
                return Err(Error::NonBinaryEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    Ok(DissimilarityMatrix::from_condensed(rows.len(), |i, j| {
        let mut inter = 0usize;
        let mut union = 0usize;
        for (&a, &b) in rows[i].iter().zip(&rows[j]) {
            let pa = a == 1.0;
            let pb = b == 1.0;
            if pa && pb {
                inter += 1;
            }
            if pa || pb {
                union += 1;
            }
        }
        if union == 0 {
            0.0
        } else {
            1.0 - inter as f64 / union as f64
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn three_four_five() {
        let x = Dataset::new(vec![vec![0.0, 0.0], vec![3.0, 4.0]], None).unwrap();
        assert_abs_diff_eq!(euclidean(&x).unwrap().get(0, 1), 5.0);
        assert_abs_diff_eq!(manhattan(&x).unwrap().get(0, 1), 7.0);
    }

    #[test]
    fn single_point_and_duplicates() {
        let x = Dataset::new(vec![vec![1.0, 2.0]], None).unwrap();
        assert_eq!(euclidean(&x).unwrap().n(), 1);
        let y = Dataset::new(vec![vec![1.0], vec![1.0]], None).unwrap();
        assert_eq!(euclidean(&y).unwrap().get(0, 1), 0.0);
    }

    #[test]
    fn jaccard_basics() {
        let d = jaccard_binary(&[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(d.get(0, 1), 0.5);
        let same = jaccard_binary(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(same.get(0, 1), 0.0);
        let disjoint = jaccard_binary(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(disjoint.get(0, 1), 1.0);
        let empty = jaccard_binary(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(empty.get(0, 1), 0.0);
    }

    #[test]
    fn jaccard_rejects_non_binary() {
        assert!(jaccard_binary(&[vec![0.5]]).is_err());
    }
}
