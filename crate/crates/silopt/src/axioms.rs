//! Clustering-quality-measure axiom machinery: the scale and
//! C-transformation constructions, the richness distance, and an exhaustive
//! partition oracle used as ground truth throughout the test suite.

use crate::core::{DissimilarityMatrix, Partition};
use crate::error::{Error, Result};
use crate::silhouette::asw;
use rand::Rng;

/// Entrywise scaling by a positive factor.
pub fn scale_dissimilarity(d: &DissimilarityMatrix, eta: f64) -> Result<DissimilarityMatrix> {
    d.scaled(eta)
}

/// Random C-transformation of `d`: within-cluster entries shrink by factors
/// in [1 - strength, 1], between-cluster entries grow by factors in
/// [1, 1 + strength]. Symmetry and nonnegativity are preserved by
/// construction.
pub fn random_c_transformation<R: Rng>(
    d: &DissimilarityMatrix,
    c: &Partition,
    rng: &mut R,
    strength: f64,
) -> Result<DissimilarityMatrix> {
    if c.n() != d.n() {
        return Err(Error::SizeMismatch {
            labels: c.n(),
            n: d.n(),
        });
    }
    if !(strength > 0.0 && strength <= 1.0) {
        return Err(Error::InvalidOptions(format!(
            "C-transformation strength must be in (0, 1], got {strength}"
        )));
    }
    let n = d.n();
    let mut factors = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let f = if c.label(i) == c.label(j) {
                1.0 - rng.gen_range(0.0..strength)
            } else {
                1.0 + rng.gen_range(0.0..strength)
            };
            factors[i * n + j] = f;
        }
    }
    Ok(DissimilarityMatrix::from_condensed(n, |i, j| {
        d.get(i, j) * factors[i * n + j]
    }))
}

/// The richness-proof distance for a non-trivial partition: within pairs at
/// 1, between pairs at 2, and (when the partition has singletons)
/// singleton-singleton pairs at 2 + 1/(2n^2).
pub fn richness_distance(c: &Partition) -> Result<DissimilarityMatrix> {
    if c.is_single_cluster() || c.is_all_singletons() {
        return Err(Error::TrivialPartition);
    }
    let n = c.n();
    let bump = 2.0 + 1.0 / (2.0 * (n * n) as f64);
    let sizes = c.sizes();
    Ok(DissimilarityMatrix::from_condensed(n, |i, j| {
        if c.label(i) == c.label(j) {
            1.0
        } else if sizes[c.label(i)] == 1 && sizes[c.label(j)] == 1 {
            bump
        } else {
            2.0
        }
    }))
}

/// Guard for the exhaustive oracle: Bell(12) is about 4.2 million.
pub const ORACLE_MAX_N: usize = 12;

/// Visit every partition of n objects as a restricted growth string.
/// `visit` receives the raw label slice.
fn for_each_rgs(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut a = vec![0usize; n];
    let mut m = vec![0usize; n]; // m[i] = max label among a[0..=i]
    loop {
        visit(&a);
        // advance: find rightmost position that can be incremented
        let mut i = n;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            let prev_max = m[i - 1];
            if a[i] <= prev_max {
                a[i] += 1;
                m[i] = prev_max.max(a[i]);
                for j in (i + 1)..n {
                    a[j] = 0;
                    m[j] = m[i];
                }
                break;
            }
        }
    }
}

/// Enumerate all partitions with k in `k_range` (or every k when `None`) and
/// return the ASW-maximizing one. Ties break toward the lexicographically
/// smallest label string; the tie count is reported.
pub fn brute_force_optimum(
    d: &DissimilarityMatrix,
    k_range: Option<(usize, usize)>,
) -> Result<(Partition, f64, usize)> {
    let n = d.n();
    if n > ORACLE_MAX_N {
        return Err(Error::TooManyObjects(n));
    }
    if n < 2 {
        return Err(Error::Enumeration(
            "need at least 2 objects to cluster".into(),
        ));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut ties = 0usize;
    for_each_rgs(n, |labels| {
        let k = labels.iter().max().unwrap() + 1;
        if k < 2 {
            return;
        }
        if let Some((kmin, kmax)) = k_range {
            if k < kmin || k > kmax {
                return;
            }
        }
        let c = Partition::from_raw(labels.iter().copied());
        let value = asw(d, &c).expect("k >= 2 by construction");
        match &best {
            Some((_, bv)) if value <= *bv => {
                if value == *bv {
                    ties += 1;
                }
            }
            _ => {
                best = Some((labels.to_vec(), value));
                ties = 0;
            }
        }
    });
    let (labels, value) = best.ok_or_else(|| {
        Error::Enumeration("no partition satisfied the k filter".into())
    })?;
    Ok((Partition::from_raw(labels), value, ties))
}

/// All non-trivial partitions of n objects (2 <= k <= n-1).
pub fn non_trivial_partitions(n: usize) -> Result<Vec<Partition>> {
    if n > ORACLE_MAX_N {
        return Err(Error::TooManyObjects(n));
    }
    let mut out = Vec::new();
    for_each_rgs(n, |labels| {
        let k = labels.iter().max().unwrap() + 1;
        if k >= 2 && k < n {
            out.push(Partition::from_raw(labels.iter().copied()));
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::silhouette::silhouette_profile;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell(n: usize) -> usize {
        // triangle recurrence
        let mut row = vec![1usize];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for &v in &row {
                let last = *next.last().unwrap();
                next.push(last + v);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    #[test]
    fn rgs_counts_match_bell_numbers() {
        for n in 1..=8 {
            let mut count = 0usize;
            for_each_rgs(n, |_| count += 1);
            assert_eq!(count, bell(n), "n = {n}");
        }
    }

    #[test]
    fn scale_identity_and_errors() {
        let c = Partition::from_labels(&[1, 1, 2, 2]).unwrap();
        let d = richness_distance(&c).unwrap();
        let same = scale_dissimilarity(&d, 1.0).unwrap();
        assert_eq!(same.get(0, 1), d.get(0, 1));
        assert!(scale_dissimilarity(&d, 0.0).is_err());
        let doubled = scale_dissimilarity(&d, 2.0).unwrap();
        assert_eq!(doubled.get(0, 2), 4.0);
        let p1 = silhouette_profile(&d, &c).unwrap();
        let p2 = silhouette_profile(&doubled, &c).unwrap();
        for (x, y) in p1.s.iter().zip(&p2.s) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn richness_case_one_values() {
        let c = Partition::from_labels(&[1, 1, 2, 2]).unwrap();
        let d = richness_distance(&c).unwrap();
        let p = silhouette_profile(&d, &c).unwrap();
        for &s in &p.s {
            assert_abs_diff_eq!(s, 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.asw, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn richness_case_two_values() {
        // n = 5, two singletons, one 3-cluster
        let c = Partition::from_labels(&[1, 2, 3, 3, 3]).unwrap();
        let d = richness_distance(&c).unwrap();
        assert_abs_diff_eq!(d.get(0, 1), 2.0 + 1.0 / 50.0, epsilon = 1e-15);
        assert_eq!(d.get(0, 2), 2.0);
        assert_abs_diff_eq!(asw(&d, &c).unwrap(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn richness_rejects_trivial() {
        let singles = Partition::from_labels(&[1, 2, 3]).unwrap();
        assert!(richness_distance(&singles).is_err());
        let whole = Partition::from_labels(&[1, 1, 1]).unwrap();
        assert!(richness_distance(&whole).is_err());
    }

    #[test]
    fn oracle_on_e4() {
        let d = crate::silhouette::tests::e4();
        let (best, value, ties) = brute_force_optimum(&d, None).unwrap();
        assert_eq!(best, Partition::from_labels(&[1, 1, 2, 2]).unwrap());
        assert_abs_diff_eq!(value, 0.9, epsilon = 1e-15);
        assert_eq!(ties, 0);
    }

    #[test]
    fn oracle_guard() {
        let d = DissimilarityMatrix::from_condensed(13, |_, _| 1.0);
        assert!(matches!(
            brute_force_optimum(&d, None),
            Err(Error::TooManyObjects(13))
        ));
    }

    #[test]
    fn c_transformation_never_decreases_asw() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(4..10);
            let mut rows = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = rng.gen_range(0.1..5.0);
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            let d = DissimilarityMatrix::from_rows(rows).unwrap();
            let k = rng.gen_range(2..4.min(n));
            let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
            let c = Partition::from_raw(labels);
            let before = asw(&d, &c).unwrap();
            let dp = random_c_transformation(&d, &c, &mut rng, 0.5).unwrap();
            let after = asw(&dp, &c).unwrap();
            assert!(after >= before - 1e-12);
        }
    }
}
