//! Baseline clusterers: PAM, k-means, and agglomerative linkage methods.
//! These serve as initializers for the ASW optimizers and as comparison
//! methods in the simulation harness.

use crate::core::{Dataset, DissimilarityMatrix, Partition};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 2 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

/// Assign every object to its nearest medoid (ties to the earlier medoid) and
/// return the partition together with the summed dissimilarity to medoids.
pub fn nearest_medoid_partition(
    d: &DissimilarityMatrix,
    medoids: &[usize],
) -> (Partition, f64) {
    let n = d.n();
    let mut labels = vec![0usize; n];
    let mut cost = 0.0;
    for i in 0..n {
        let mut best = 0usize;
        let mut bestd = f64::INFINITY;
        for (m, &med) in medoids.iter().enumerate() {
            let dm = d.get(i, med);
            if dm < bestd {
                bestd = dm;
                best = m;
            }
        }
        labels[i] = best;
        cost += bestd;
    }
    (Partition::from_raw(labels), cost)
}

/// Classic PAM BUILD phase.
pub fn pam_build(d: &DissimilarityMatrix, k: usize) -> Result<Vec<usize>> {
    let n = d.n();
    check_k(k, n)?;
    // first medoid: minimizes total dissimilarity
    let mut medoids = Vec::with_capacity(k);
    let first = (0..n)
        .min_by(|&a, &b| {
            let ca: f64 = (0..n).map(|j| d.get(a, j)).sum();
            let cb: f64 = (0..n).map(|j| d.get(b, j)).sum();
            ca.partial_cmp(&cb).unwrap()
        })
        .unwrap();
    medoids.push(first);
    let mut nearest: Vec<f64> = (0..n).map(|j| d.get(first, j)).collect();
    while medoids.len() < k {
        let mut best_gain = f64::NEG_INFINITY;
        let mut best = usize::MAX;
        for cand in 0..n {
            if medoids.contains(&cand) {
                continue;
            }
            let gain: f64 = (0..n)
                .map(|j| (nearest[j] - d.get(cand, j)).max(0.0))
                .sum();
            if gain > best_gain {
                best_gain = gain;
                best = cand;
            }
        }
        medoids.push(best);
        for j in 0..n {
            let dj = d.get(best, j);
            if dj < nearest[j] {
                nearest[j] = dj;
            }
        }
    }
    Ok(medoids)
}

/// PAM: BUILD followed by steepest-descent SWAP on the total
/// dissimilarity-to-medoid objective. The seed is unused by the classic
/// deterministic algorithm and retained for API uniformity.
pub fn pam(d: &DissimilarityMatrix, k: usize, _seed: u64) -> Result<Partition> {
    let (p, _) = pam_with_cost(d, k)?;
    Ok(p)
}

pub fn pam_with_cost(d: &DissimilarityMatrix, k: usize) -> Result<(Partition, f64)> {
    let n = d.n();
    let mut medoids = pam_build(d, k)?;
    let (_, mut cost) = nearest_medoid_partition(d, &medoids);
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for mi in 0..k {
            for h in 0..n {
                if medoids.contains(&h) {
                    continue;
                }
                let saved = medoids[mi];
                medoids[mi] = h;
                let (_, c) = nearest_medoid_partition(d, &medoids);
                medoids[mi] = saved;
                if c < cost && best.map_or(true, |(_, _, bc)| c < bc) {
                    best = Some((mi, h, c));
                }
            }
        }
        match best {
            Some((mi, h, c)) => {
                medoids[mi] = h;
                cost = c;
            }
            None => break,
        }
    }
    let (p, c) = nearest_medoid_partition(d, &medoids);
    Ok((p, c))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn kmeans_once(x: &Dataset, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = x.n();
    // k-means++ seeding
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(x.point(rng.gen_range(0..n)).to_vec());
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(x.point(i), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.push(x.point(idx).to_vec());
        for i in 0..n {
            let nd = sq_dist(x.point(i), centers.last().unwrap());
            if nd < d2[i] {
                d2[i] = nd;
            }
        }
    }
    // Lloyd iterations to an assignment fixpoint
    let mut labels = vec![0usize; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            let mut best = 0usize;
            let mut bestd = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let dd = sq_dist(x.point(i), center);
                if dd < bestd {
                    bestd = dd;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut counts = vec![0usize; k];
        for c in centers.iter_mut() {
            c.iter_mut().for_each(|v| *v = 0.0);
        }
        for i in 0..n {
            counts[labels[i]] += 1;
            for (j, v) in x.point(i).iter().enumerate() {
                centers[labels[i]][j] += v;
            }
        }
        for (c, center) in centers.iter_mut().enumerate() {
            if counts[c] == 0 {
                // re-seed an empty cluster at the point farthest from its center
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(x.point(a), center)
                            .partial_cmp(&sq_dist(x.point(b), center))
                            .unwrap()
                    })
                    .unwrap();
                *center = x.point(far).to_vec();
            } else {
                center.iter_mut().for_each(|v| *v /= counts[c] as f64);
            }
        }
    }
    let ss: f64 = (0..n).map(|i| sq_dist(x.point(i), &centers[labels[i]])).sum();
    (labels, ss)
}

/// Lloyd's k-means with k-means++ seeding, best of `restarts` runs.
pub fn kmeans(x: &Dataset, k: usize, restarts: usize, seed: u64) -> Result<Partition> {
    let n = x.n();
    check_k(k.min(n - 1), n)?; // allow k == n below
    if restarts == 0 {
        return Err(Error::InvalidOptions("kmeans needs restarts >= 1".into()));
    }
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if k == n {
        return Ok(Partition::from_raw(0..n));
    }
    let run = |r: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        kmeans_once(x, k, &mut rng)
    };
    #[cfg(feature = "parallel")]
    let best = (0..restarts)
        .into_par_iter()
        .map(run)
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    #[cfg(not(feature = "parallel"))]
    let best = (0..restarts)
        .map(run)
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (labels, _) = best.unwrap();
    Ok(Partition::from_raw(labels))
}

/// Within-cluster sum of squares of a labeling (used by tests).
pub fn within_ss(x: &Dataset, c: &Partition) -> f64 {
    let k = c.k();
    let p = x.p();
    let mut centers = vec![vec![0.0; p]; k];
    for i in 0..x.n() {
        for (j, v) in x.point(i).iter().enumerate() {
            centers[c.label(i)][j] += v;
        }
    }
    for (r, center) in centers.iter_mut().enumerate() {
        center.iter_mut().for_each(|v| *v /= c.sizes()[r] as f64);
    }
    (0..x.n()).map(|i| sq_dist(x.point(i), &centers[c.label(i)])).sum()
}

/// Agglomerative linkage methods with Lance-Williams updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Single,
    Average,
    Complete,
    /// Ward on squared dissimilarities (the Ward.D2 convention).
    Ward,
}

impl std::str::FromStr for Linkage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Self::Single),
            "average" => Ok(Self::Average),
            "complete" => Ok(Self::Complete),
            "ward" => Ok(Self::Ward),
            other => Err(Error::UnknownLinkage(other.into())),
        }
    }
}

/// One agglomeration step: node ids below `n` are leaves, the i-th merge
/// creates node `n + i`.
#[derive(Debug, Clone, Copy)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

/// Full merge history of an agglomerative clustering.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Partition into k clusters by replaying the first n - k merges.
    pub fn cut(&self, k: usize) -> Result<Partition> {
        let n = self.n;
        if k < 1 || k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        let mut parent: Vec<usize> = (0..(2 * n - 1)).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (step, m) in self.merges.iter().take(n - k).enumerate() {
            let node = n + step;
            let a = find(&mut parent, m.left);
            let b = find(&mut parent, m.right);
            parent[a] = node;
            parent[b] = node;
        }
        let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        Ok(Partition::from_raw(labels))
    }
}

/// Agglomerative clustering of a dissimilarity matrix.
pub fn linkage(d: &DissimilarityMatrix, method: Linkage) -> Result<Dendrogram> {
    let n = d.n();
    if n < 2 {
        return Err(Error::KOutOfRange { k: 2, n });
    }
    // working inter-cluster dissimilarities; Ward operates on squares
    let mut work = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            work[i * n + j] = if method == Linkage::Ward { v * v } else { v };
        }
    }
    let mut active: Vec<bool> = vec![true; n];
    let mut node_id: Vec<usize> = (0..n).collect();
    let mut count: Vec<usize> = vec![1; n];
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..(n - 1) {
        let mut bi = 0;
        let mut bj = 0;
        let mut bd = f64::INFINITY;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !active[j] {
                    continue;
                }
                let v = work[i * n + j];
                if v < bd {
                    bd = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        let height = if method == Linkage::Ward { bd.sqrt() } else { bd };
        merges.push(Merge {
            left: node_id[bi],
            right: node_id[bj],
            height,
        });
        let (ni, nj) = (count[bi] as f64, count[bj] as f64);
        for h in 0..n {
            if !active[h] || h == bi || h == bj {
                continue;
            }
            let dhi = work[h * n + bi];
            let dhj = work[h * n + bj];
            let merged = match method {
                Linkage::Single => dhi.min(dhj),
                Linkage::Complete => dhi.max(dhj),
                Linkage::Average => (ni * dhi + nj * dhj) / (ni + nj),
                Linkage::Ward => {
                    let nh = count[h] as f64;
                    let tot = ni + nj + nh;
                    ((ni + nh) * dhi + (nj + nh) * dhj - nh * bd) / tot
                }
            };
            work[h * n + bi] = merged;
            work[bi * n + h] = merged;
        }
        active[bj] = false;
        count[bi] += count[bj];
        node_id[bi] = n + step;
    }
    Ok(Dendrogram { n, merges })
}

/// Convenience: linkage clustering cut at k clusters.
pub fn linkage_cut(d: &DissimilarityMatrix, method: Linkage, k: usize) -> Result<Partition> {
    linkage(d, method)?.cut(k)
}

/// Seeded uniformly random partition with k nonempty clusters.
pub fn random_partition(n: usize, k: usize, seed: u64) -> Result<Partition> {
    check_k(k, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let distinct = {
            let mut seen = vec![false; k];
            labels.iter().for_each(|&l| seen[l] = true);
            seen.iter().all(|&s| s)
        };
        if distinct {
            return Ok(Partition::from_raw(labels));
        }
    }
}
