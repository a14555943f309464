//! Silhouette widths, the ASW objective, and incremental move evaluation.

use crate::core::{DissimilarityMatrix, Partition};
use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rebuild the cross-sum cache from scratch after this many applied moves to
/// bound floating-point drift.
const REBUILD_INTERVAL: usize = 64;

/// Per-point silhouette quantities and the aggregate ASW.
#[derive(Debug, Clone)]
pub struct SilhouetteProfile {
    /// Mean dissimilarity to own cluster (0 for singletons).
    pub a: Vec<f64>,
    /// Mean dissimilarity to the nearest other cluster.
    pub b: Vec<f64>,
    /// Silhouette widths, with the singleton fallback s_i = 0.
    pub s: Vec<f64>,
    /// Mean of `s`.
    pub asw: f64,
}

#[inline]
fn silhouette_value(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        0.0
    } else {
        (b - a) / m
    }
}

fn check_inputs(d: &DissimilarityMatrix, c: &Partition) -> Result<()> {
    if c.n() != d.n() {
        return Err(Error::SizeMismatch {
            labels: c.n(),
            n: d.n(),
        });
    }
    if c.k() < 2 {
        return Err(Error::TooFewClusters(c.k()));
    }
    Ok(())
}

/// Exact silhouette profile of a partition with at least two clusters.
pub fn silhouette_profile(d: &DissimilarityMatrix, c: &Partition) -> Result<SilhouetteProfile> {
    check_inputs(d, c)?;
    let n = d.n();
    let k = c.k();
    let sizes = c.sizes();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut s = vec![0.0; n];
    for i in 0..n {
        let row = d.row(i);
        let mut sums = vec![0.0; k];
        for (j, &dij) in row.iter().enumerate() {
            sums[c.label(j)] += dij;
        }
        let own = c.label(i);
        let mut bi = f64::INFINITY;
        for (r, &sum) in sums.iter().enumerate() {
            if r != own {
                let mean = sum / sizes[r] as f64;
                if mean < bi {
                    bi = mean;
                }
            }
        }
        b[i] = bi;
        if sizes[own] > 1 {
            a[i] = sums[own] / (sizes[own] - 1) as f64;
            s[i] = silhouette_value(a[i], bi);
        }
        // singleton: a stays 0 and s stays 0 by the fallback rule
    }
    let asw = s.iter().sum::<f64>() / n as f64;
    Ok(SilhouetteProfile { a, b, s, asw })
}

/// Convenience: ASW of a partition.
pub fn asw(d: &DissimilarityMatrix, c: &Partition) -> Result<f64> {
    silhouette_profile(d, c).map(|p| p.asw)
}

/// How many of the smallest other-cluster means are cached per point.
/// Excluding at most two clusters (the source and target of a candidate
/// move) always leaves the true minimum among the cached entries.
const CACHED_MINS: usize = 3;

#[derive(Debug, Clone, Copy)]
struct ClusterMean {
    mean: f64,
    cluster: usize,
}

/// Incremental state for evaluating single-point relabelings.
///
/// Holds the cross-sum matrix T with T(i, r) = sum of d(x_i, x_j) over
/// points j in cluster r, plus per-point caches that make one candidate
/// evaluation O(n) instead of a full O(n k) profile pass.
#[derive(Debug, Clone)]
pub struct MoveState<'a> {
    d: &'a DissimilarityMatrix,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    k: usize,
    cross: Vec<f64>,
    s: Vec<f64>,
    asw: f64,
    mins: Vec<[ClusterMean; CACHED_MINS]>,
    enforce_nonempty: bool,
    moves_since_rebuild: usize,
}

impl<'a> MoveState<'a> {
    pub fn new(
        d: &'a DissimilarityMatrix,
        c: &Partition,
        enforce_nonempty: bool,
    ) -> Result<Self> {
        check_inputs(d, c)?;
        let n = d.n();
        let k = c.k();
        let mut state = Self {
            d,
            labels: c.labels().to_vec(),
            sizes: c.sizes().to_vec(),
            k,
            cross: vec![0.0; n * k],
            s: vec![0.0; n],
            asw: 0.0,
            mins: vec![[ClusterMean {
                mean: f64::INFINITY,
                cluster: usize::MAX,
            }; CACHED_MINS]; n],
            enforce_nonempty,
            moves_since_rebuild: 0,
        };
        state.rebuild_cross();
        state.refresh_caches();
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn asw(&self) -> f64 {
        self.asw
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Cross sum T(i, r).
    pub fn cross_sum(&self, i: usize, r: usize) -> f64 {
        self.cross[i * self.k + r]
    }

    pub fn partition(&self) -> Partition {
        Partition::from_raw(self.labels.iter().copied())
    }

    fn rebuild_cross(&mut self) {
        let n = self.n();
        let k = self.k;
        self.cross.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let row = self.d.row(i);
            let base = i * k;
            for (j, &dij) in row.iter().enumerate() {
                self.cross[base + self.labels[j]] += dij;
            }
        }
        self.moves_since_rebuild = 0;
    }

    /// Recompute s, asw, and the per-point smallest other-cluster means from
    /// the cross sums.
    fn refresh_caches(&mut self) {
        let n = self.n();
        let k = self.k;
        let mut total = 0.0;
        for i in 0..n {
            let own = self.labels[i];
            let base = i * k;
            let mut top = [ClusterMean {
                mean: f64::INFINITY,
                cluster: usize::MAX,
            }; CACHED_MINS];
            for r in 0..k {
                if r == own {
                    continue;
                }
                let mean = self.cross[base + r] / self.sizes[r] as f64;
                let entry = ClusterMean { mean, cluster: r };
                // insertion into the sorted top list; ascending cluster order
                // of the scan makes ties resolve to the lowest index
                let mut slot = CACHED_MINS;
                for (t, existing) in top.iter().enumerate() {
                    if mean < existing.mean {
                        slot = t;
                        break;
                    }
                }
                if slot < CACHED_MINS {
                    for t in (slot + 1..CACHED_MINS).rev() {
                        top[t] = top[t - 1];
                    }
                    top[slot] = entry;
                }
            }
            self.mins[i] = top;
            self.s[i] = if self.sizes[own] > 1 {
                let a = self.cross[base + own] / (self.sizes[own] - 1) as f64;
                silhouette_value(a, top[0].mean)
            } else {
                0.0
            };
            total += self.s[i];
        }
        self.asw = total / n as f64;
    }

    /// Smallest cached mean for point `i` whose cluster is neither `ex1` nor
    /// `ex2`.
    #[inline]
    fn min_excluding(&self, i: usize, ex1: usize, ex2: usize) -> f64 {
        for entry in &self.mins[i] {
            if entry.cluster != ex1 && entry.cluster != ex2 {
                return entry.mean;
            }
        }
        f64::INFINITY
    }

    fn check_move(&self, i: usize, r: usize) -> Result<usize> {
        let c = self.labels[i];
        if r == c || r >= self.k {
            return Err(Error::NoopMove(i));
        }
        if self.sizes[c] == 1 && (self.enforce_nonempty || self.k == 2) {
            return Err(Error::EmptyingMove(i, c));
        }
        Ok(c)
    }

    /// ASW of the partition obtained by relabeling object `i` to cluster `r`,
    /// leaving the state untouched.
    pub fn evaluate_move(&self, i: usize, r: usize) -> Result<f64> {
        let c = self.check_move(i, r)?;
        if self.sizes[c] == 1 {
            // source cluster disappears; fall back to a full profile on the
            // (k-1)-cluster partition
            return asw(self.d, &self.partition().with_move(i, r));
        }
        Ok(self.evaluate_nonempty(i, r, c))
    }

    /// Fast path: source cluster keeps at least one member.
    #[inline]
    fn evaluate_nonempty(&self, i: usize, r: usize, c: usize) -> f64 {
        let n = self.n();
        let k = self.k;
        let size_c = self.sizes[c] - 1; // post-move
        let size_r = self.sizes[r] + 1;
        let row = self.d.row(i);
        let mut total = 0.0;
        for j in 0..n {
            let dij = row[j];
            let base = j * k;
            let sj = if j == i {
                let a = self.cross[base + r] / self.sizes[r] as f64;
                let mean_c = self.cross[base + c] / size_c as f64;
                let b = self.min_excluding(i, r, usize::MAX).min(mean_c);
                silhouette_value(a, b)
            } else {
                let cl = self.labels[j];
                if cl == c {
                    if size_c == 1 {
                        0.0
                    } else {
                        let a = (self.cross[base + c] - dij) / (size_c - 1) as f64;
                        let mean_r = (self.cross[base + r] + dij) / size_r as f64;
                        let b = self.min_excluding(j, r, usize::MAX).min(mean_r);
                        silhouette_value(a, b)
                    }
                } else if cl == r {
                    let a = (self.cross[base + r] + dij) / (size_r - 1) as f64;
                    let mean_c = (self.cross[base + c] - dij) / size_c as f64;
                    let b = self.min_excluding(j, c, usize::MAX).min(mean_c);
                    silhouette_value(a, b)
                } else if self.sizes[cl] == 1 {
                    0.0
                } else {
                    let a = self.cross[base + cl] / (self.sizes[cl] - 1) as f64;
                    let mean_c = (self.cross[base + c] - dij) / size_c as f64;
                    let mean_r = (self.cross[base + r] + dij) / size_r as f64;
                    let b = self.min_excluding(j, c, r).min(mean_c).min(mean_r);
                    silhouette_value(a, b)
                }
            };
            total += sj;
        }
        total / n as f64
    }

    /// Relabel object `i` to cluster `r` and restore all invariants.
    pub fn apply_move(&mut self, i: usize, r: usize) -> Result<()> {
        let c = self.check_move(i, r)?;
        if self.sizes[c] == 1 {
            // cluster c disappears: renumber via a fresh partition
            let moved = self.partition().with_move(i, r);
            *self = Self::new(self.d, &moved, self.enforce_nonempty)?;
            return Ok(());
        }
        let n = self.n();
        let k = self.k;
        for j in 0..n {
            let dij = self.d.get(i, j);
            self.cross[j * k + c] -= dij;
            self.cross[j * k + r] += dij;
        }
        self.labels[i] = r;
        self.sizes[c] -= 1;
        self.sizes[r] += 1;
        self.moves_since_rebuild += 1;
        if self.moves_since_rebuild >= REBUILD_INTERVAL {
            self.rebuild_cross();
        }
        self.refresh_caches();
        Ok(())
    }

    fn admissible(&self, i: usize, r: usize) -> bool {
        let c = self.labels[i];
        if r == c {
            return false;
        }
        if self.sizes[c] == 1 && (self.enforce_nonempty || self.k == 2) {
            return false;
        }
        true
    }

    #[inline]
    fn candidate_asw(&self, i: usize, r: usize) -> f64 {
        let c = self.labels[i];
        if self.sizes[c] == 1 {
            asw(self.d, &self.partition().with_move(i, r)).unwrap_or(f64::NEG_INFINITY)
        } else {
            self.evaluate_nonempty(i, r, c)
        }
    }

    /// Best admissible move, sequential scan. Ties on the candidate ASW break
    /// toward the lexicographically smallest (i, r).
    pub fn best_admissible_move_seq(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.n() {
            for r in 0..self.k {
                if !self.admissible(i, r) {
                    continue;
                }
                let f = self.candidate_asw(i, r);
                if best.map_or(true, |(_, _, bf)| f > bf) {
                    best = Some((i, r, f));
                }
            }
        }
        best
    }

    /// Best admissible move, candidate scan parallelized over objects.
    /// Result is identical to the sequential scan for any thread count.
    #[cfg(feature = "parallel")]
    pub fn best_admissible_move_par(&self) -> Option<(usize, usize, f64)> {
        (0..self.n())
            .into_par_iter()
            .filter_map(|i| {
                let mut best: Option<(usize, usize, f64)> = None;
                for r in 0..self.k {
                    if !self.admissible(i, r) {
                        continue;
                    }
                    let f = self.candidate_asw(i, r);
                    if best.map_or(true, |(_, _, bf)| f > bf) {
                        best = Some((i, r, f));
                    }
                }
                best
            })
            .reduce_with(|a, b| {
                if b.2 > a.2 {
                    b
                } else {
                    a
                }
            })
    }

    /// Best admissible move via the configured execution backend.
    pub fn best_admissible_move(&self) -> Option<(usize, usize, f64)> {
        #[cfg(feature = "parallel")]
        {
            self.best_admissible_move_par()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.best_admissible_move_seq()
        }
    }
}

/// Build the incremental state for (D, C) without the nonempty constraint.
pub fn build_move_state<'a>(
    d: &'a DissimilarityMatrix,
    c: &Partition,
) -> Result<MoveState<'a>> {
    MoveState::new(d, c, false)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::core::DissimilarityMatrix;
    use approx::assert_abs_diff_eq;

    /// 4 points, two tight pairs: d(1,2)=d(3,4)=1, all cross pairs 10.
    pub(crate) fn e4() -> DissimilarityMatrix {
        DissimilarityMatrix::from_rows(vec![
            vec![0.0, 1.0, 10.0, 10.0],
            vec![1.0, 0.0, 10.0, 10.0],
            vec![10.0, 10.0, 0.0, 1.0],
            vec![10.0, 10.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn e4_profile() {
        let d = e4();
        let c = Partition::from_labels(&[1, 1, 2, 2]).unwrap();
        let p = silhouette_profile(&d, &c).unwrap();
        assert_eq!(p.a, vec![1.0; 4]);
        assert_eq!(p.b, vec![10.0; 4]);
        for &s in &p.s {
            assert_abs_diff_eq!(s, 0.9, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.asw, 0.9, epsilon = 1e-15);
    }

    #[test]
    fn singleton_fallback() {
        let d = e4();
        let c = Partition::from_labels(&[1, 2, 2, 2]).unwrap();
        let p = silhouette_profile(&d, &c).unwrap();
        assert_eq!(p.s[0], 0.0);
        assert_eq!(p.a[0], 0.0);
        // b is still reported for the singleton
        assert_abs_diff_eq!(p.b[0], 7.0, epsilon = 1e-15);
        let expected = p.s.iter().sum::<f64>() / 4.0;
        assert_abs_diff_eq!(p.asw, expected, epsilon = 1e-15);
    }

    #[test]
    fn k1_rejected() {
        let d = e4();
        let c = Partition::from_labels(&[1, 1, 1, 1]).unwrap();
        assert!(matches!(
            silhouette_profile(&d, &c),
            Err(Error::TooFewClusters(1))
        ));
    }

    #[test]
    fn size_mismatch_rejected() {
        let d = e4();
        let c = Partition::from_labels(&[1, 2]).unwrap();
        assert!(silhouette_profile(&d, &c).is_err());
    }

    #[test]
    fn move_state_cross_sums() {
        let d = e4();
        let c = Partition::from_labels(&[1, 1, 2, 2]).unwrap();
        let st = build_move_state(&d, &c).unwrap();
        assert_eq!(st.cross_sum(0, 0), 1.0);
        assert_eq!(st.cross_sum(0, 1), 20.0);
        assert_abs_diff_eq!(st.asw(), 0.9, epsilon = 1e-15);

        let c2 = Partition::from_labels(&[1, 2, 2, 2]).unwrap();
        let st2 = build_move_state(&d, &c2).unwrap();
        assert_eq!(st2.cross_sum(0, 0), 0.0);
        assert_eq!(st2.cross_sum(0, 1), 21.0);
    }

    #[test]
    fn evaluate_move_matches_profile() {
        let d = e4();
        let c = Partition::from_labels(&[1, 1, 1, 2]).unwrap();
        let st = build_move_state(&d, &c).unwrap();
        let f = st.evaluate_move(2, 1).unwrap();
        assert_abs_diff_eq!(f, 0.9, epsilon = 1e-12);
        // state untouched
        assert_eq!(st.partition(), c);
    }

    #[test]
    fn noop_move_rejected() {
        let d = e4();
        let c = Partition::from_labels(&[1, 1, 2, 2]).unwrap();
        let st = build_move_state(&d, &c).unwrap();
        assert!(matches!(st.evaluate_move(0, 0), Err(Error::NoopMove(0))));
    }

    #[test]
    fn emptying_move_rejected_under_constraint() {
        let d = e4();
        let c = Partition::from_labels(&[1, 2, 2, 2]).unwrap();
        let st = MoveState::new(&d, &c, true).unwrap();
        assert!(matches!(
            st.evaluate_move(0, 1),
            Err(Error::EmptyingMove(0, 0))
        ));
    }

    #[test]
    fn move_from_optimum_is_worse() {
        let d = e4();
        let c = Partition::from_labels(&[1, 1, 2, 2]).unwrap();
        let st = MoveState::new(&d, &c, true).unwrap();
        let f = st.evaluate_move(0, 1).unwrap();
        assert!(f < 0.9);
    }

    #[test]
    fn apply_then_undo_restores_state() {
        let d = e4();
        let c = Partition::from_labels(&[1, 1, 1, 2]).unwrap();
        let mut st = build_move_state(&d, &c).unwrap();
        let before = st.asw();
        st.apply_move(2, 1).unwrap();
        assert_abs_diff_eq!(st.asw(), 0.9, epsilon = 1e-12);
        st.apply_move(2, 0).unwrap();
        assert_abs_diff_eq!(st.asw(), before, epsilon = 1e-12);
        assert_eq!(st.partition(), c);
    }

    #[test]
    fn apply_matches_rebuild() {
        let d = e4();
        let c = Partition::from_labels(&[1, 1, 1, 2]).unwrap();
        let mut st = build_move_state(&d, &c).unwrap();
        st.apply_move(2, 1).unwrap();
        let fresh = build_move_state(&d, &st.partition()).unwrap();
        for i in 0..4 {
            for r in 0..2 {
                assert_abs_diff_eq!(
                    st.cross_sum(i, r),
                    fresh.cross_sum(i, r),
                    epsilon = 1e-12
                );
            }
        }
        assert_abs_diff_eq!(st.asw(), fresh.asw(), epsilon = 1e-12);
    }

    #[test]
    fn cross_sum_symmetry_invariant() {
        // Sum over cluster r of T(., s) equals sum over cluster s of T(., r).
        let d = e4();
        let c = Partition::from_labels(&[1, 2, 1, 2]).unwrap();
        let st = build_move_state(&d, &c).unwrap();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 0..4 {
            if st.label(i) == 0 {
                lhs += st.cross_sum(i, 1);
            } else {
                rhs += st.cross_sum(i, 0);
            }
        }
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }
}
