//! ASW optimizers: the OSil exchange algorithm, the FOSil subsample
//! approximation, and the PAMSil medoid-restricted search.

use crate::baselines::{self, Linkage};
use crate::core::{Dataset, DissimilarityMatrix, Partition};
use crate::error::{Error, Result};
use crate::silhouette::{asw, silhouette_profile, MoveState};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Minimum margin for accepting a move as a strict improvement. Keeps the
/// monotone trace honest in the presence of the 1e-10 agreement tolerance
/// between incremental and recomputed ASW values.
const IMPROVEMENT_EPS: f64 = 1e-9;

/// Named initialization strategies for the exchange search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initializer {
    KMeans,
    Pam,
    Average,
    Single,
    Ward,
    Random,
}

impl Initializer {
    pub const DEFAULT: [Initializer; 6] = [
        Initializer::KMeans,
        Initializer::Pam,
        Initializer::Average,
        Initializer::Single,
        Initializer::Ward,
        Initializer::Random,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Initializer::KMeans => "kmeans",
            Initializer::Pam => "pam",
            Initializer::Average => "average",
            Initializer::Single => "single",
            Initializer::Ward => "ward",
            Initializer::Random => "random",
        }
    }
}

impl std::str::FromStr for Initializer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kmeans" => Ok(Self::KMeans),
            "pam" => Ok(Self::Pam),
            "average" => Ok(Self::Average),
            "single" => Ok(Self::Single),
            "ward" => Ok(Self::Ward),
            "random" => Ok(Self::Random),
            other => Err(Error::InvalidOptions(format!("unknown initializer {other:?}"))),
        }
    }
}

/// Options for the OSil search.
#[derive(Debug, Clone)]
pub struct OsilOptions {
    pub kmin: usize,
    pub kmax: usize,
    pub initializers: Vec<Initializer>,
    /// Cap on accepted moves per fixed-k run; 0 means the default of 10 n.
    pub max_sweeps: usize,
    pub enforce_nonempty: bool,
    pub seed: u64,
    pub kmeans_restarts: usize,
}

impl OsilOptions {
    pub fn new(kmin: usize, kmax: usize, seed: u64) -> Self {
        Self {
            kmin,
            kmax,
            initializers: Initializer::DEFAULT.to_vec(),
            max_sweeps: 0,
            enforce_nonempty: true,
            seed,
            kmeans_restarts: 100,
        }
    }

    pub fn fixed_k(k: usize, seed: u64) -> Self {
        Self::new(k, k, seed)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.kmin < 2 || self.kmin > self.kmax || self.kmax >= n {
            return Err(Error::InvalidOptions(format!(
                "need 2 <= kmin <= kmax < n (kmin={}, kmax={}, n={})",
                self.kmin, self.kmax, n
            )));
        }
        if self.initializers.is_empty() {
            return Err(Error::InvalidOptions("no initializers configured".into()));
        }
        Ok(())
    }

    fn sweep_cap(&self, n: usize) -> usize {
        if self.max_sweeps == 0 {
            10 * n
        } else {
            self.max_sweeps
        }
    }
}

/// Options for the FOSil subsample approximation.
#[derive(Debug, Clone)]
pub struct FosilOptions {
    /// Subsample size n_s; 0 means the default of 0.2 n (at least kmax + 1).
    pub sample_size: usize,
    pub num_samples: usize,
    pub inner: OsilOptions,
}

impl FosilOptions {
    pub fn new(inner: OsilOptions) -> Self {
        Self {
            sample_size: 0,
            num_samples: 25,
            inner,
        }
    }

    fn resolved_sample_size(&self, n: usize) -> usize {
        if self.sample_size > 0 {
            self.sample_size
        } else {
            ((0.2 * n as f64).round() as usize).max(self.inner.kmax + 1).min(n)
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.inner.validate(n)?;
        let ns = self.resolved_sample_size(n);
        if ns <= self.inner.kmax || ns > n {
            return Err(Error::InvalidOptions(format!(
                "need kmax < n_s <= n (n_s={}, kmax={}, n={})",
                ns, self.inner.kmax, n
            )));
        }
        if self.num_samples < 1 {
            return Err(Error::InvalidOptions("need M >= 1 subsamples".into()));
        }
        Ok(())
    }
}

/// Outcome of one fixed-k exchange run.
#[derive(Debug, Clone)]
pub struct FixedKRun {
    pub partition: Partition,
    pub asw: f64,
    /// ASW after each accepted move; strictly increasing.
    pub trace: Vec<f64>,
    pub converged: bool,
}

/// Result of an optimization over a k range.
#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub ks: Vec<usize>,
    pub asw_by_k: Vec<f64>,
    pub partitions_by_k: Vec<Partition>,
    /// argmax over k of the best ASW; ties go to the smallest k.
    pub kstar: usize,
    /// Final ASW per (k, initializer name) for every run that completed.
    pub initializer_asw: Vec<(usize, String, f64)>,
    /// Trace of the winning run per k.
    pub traces: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
    pub converged: bool,
}

impl OptimizeResult {
    pub fn best_partition(&self) -> &Partition {
        let idx = self.ks.iter().position(|&k| k == self.kstar).unwrap();
        &self.partitions_by_k[idx]
    }

    pub fn best_asw(&self) -> f64 {
        let idx = self.ks.iter().position(|&k| k == self.kstar).unwrap();
        self.asw_by_k[idx]
    }

    fn from_per_k(
        ks: Vec<usize>,
        asw_by_k: Vec<f64>,
        partitions_by_k: Vec<Partition>,
        initializer_asw: Vec<(usize, String, f64)>,
        traces: Vec<Vec<f64>>,
        warnings: Vec<String>,
        converged: bool,
    ) -> Self {
        let mut kstar = ks[0];
        let mut best = f64::NEG_INFINITY;
        for (&k, &v) in ks.iter().zip(&asw_by_k) {
            if v > best {
                best = v;
                kstar = k;
            }
        }
        Self {
            ks,
            asw_by_k,
            partitions_by_k,
            kstar,
            initializer_asw,
            traces,
            warnings,
            converged,
        }
    }
}

/// The exchange search for a fixed number of clusters: repeatedly apply the
/// single-point relabeling with the highest candidate ASW while it strictly
/// improves on the current value.
pub fn osil_fixed_k(
    d: &DissimilarityMatrix,
    k: usize,
    init: &Partition,
    opts: &OsilOptions,
) -> Result<FixedKRun> {
    if k < 2 || k >= d.n() {
        return Err(Error::KOutOfRange { k, n: d.n() });
    }
    if init.k() != k {
        return Err(Error::EmptyClusterInit);
    }
    let mut state = MoveState::new(d, init, opts.enforce_nonempty)?;
    let cap = opts.sweep_cap(d.n());
    let mut trace = Vec::new();
    let mut converged = false;
    while trace.len() < cap {
        match state.best_admissible_move() {
            Some((i, r, f)) if f > state.asw() + IMPROVEMENT_EPS => {
                state.apply_move(i, r)?;
                trace.push(state.asw());
            }
            _ => {
                converged = true;
                break;
            }
        }
    }
    Ok(FixedKRun {
        partition: state.partition(),
        asw: state.asw(),
        trace,
        converged,
    })
}

/// Build one initializer partition. `coords` enables k-means; without it the
/// strategy is reported as unavailable.
fn build_initializer(
    strategy: Initializer,
    d: &DissimilarityMatrix,
    coords: Option<&Dataset>,
    k: usize,
    opts: &OsilOptions,
) -> Result<Partition> {
    match strategy {
        Initializer::KMeans => {
            let x = coords.ok_or_else(|| {
                Error::NeedsCoordinates("k-means initializer on dissimilarity-only input".into())
            })?;
            baselines::kmeans(x, k, opts.kmeans_restarts, opts.seed)
        }
        Initializer::Pam => baselines::pam(d, k, opts.seed),
        Initializer::Average => baselines::linkage_cut(d, Linkage::Average, k),
        Initializer::Single => baselines::linkage_cut(d, Linkage::Single, k),
        Initializer::Ward => baselines::linkage_cut(d, Linkage::Ward, k),
        Initializer::Random => {
            baselines::random_partition(d.n(), k, opts.seed.wrapping_add(k as u64))
        }
    }
}

/// OSil over the configured k range and initializer set.
pub fn osil(
    d: &DissimilarityMatrix,
    coords: Option<&Dataset>,
    opts: &OsilOptions,
) -> Result<OptimizeResult> {
    opts.validate(d.n())?;
    let mut ks = Vec::new();
    let mut asw_by_k = Vec::new();
    let mut partitions = Vec::new();
    let mut init_asw = Vec::new();
    let mut traces = Vec::new();
    let mut warnings = Vec::new();
    let mut all_converged = true;
    for k in opts.kmin..=opts.kmax {
        let mut best: Option<FixedKRun> = None;
        for &strategy in &opts.initializers {
            let init = match build_initializer(strategy, d, coords, k, opts) {
                Ok(p) => p,
                Err(e) => {
                    warnings.push(format!("k={k}: initializer {} skipped: {e}", strategy.name()));
                    continue;
                }
            };
            let run = osil_fixed_k(d, k, &init, opts)?;
            init_asw.push((k, strategy.name().to_string(), run.asw));
            if best.as_ref().map_or(true, |b| run.asw > b.asw) {
                best = Some(run);
            }
        }
        let best = best.ok_or_else(|| {
            Error::InvalidOptions(format!("no initializer produced a partition for k={k}"))
        })?;
        all_converged &= best.converged;
        ks.push(k);
        asw_by_k.push(best.asw);
        traces.push(best.trace.clone());
        partitions.push(best.partition);
    }
    Ok(OptimizeResult::from_per_k(
        ks,
        asw_by_k,
        partitions,
        init_asw,
        traces,
        warnings,
        all_converged,
    ))
}

/// Caches for the FOSil assignment phase: silhouette quantities of the
/// clustered subset that stay valid while one held-out point is tried
/// against each cluster.
struct SubsetProfile {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    k: usize,
    cross: Vec<f64>,
    /// Mean within-cluster dissimilarity per subset point (singletons: 0).
    a: Vec<f64>,
    /// Two smallest other-cluster means per subset point as (mean, cluster).
    top2: Vec<[(f64, usize); 2]>,
}

impl SubsetProfile {
    fn new(d: &DissimilarityMatrix, c: &Partition) -> Self {
        let n = c.n();
        let k = c.k();
        let sizes = c.sizes().to_vec();
        let mut cross = vec![0.0; n * k];
        for i in 0..n {
            for (j, &dij) in d.row(i).iter().enumerate() {
                cross[i * k + c.label(j)] += dij;
            }
        }
        let mut a = vec![0.0; n];
        let mut top2 = vec![[(f64::INFINITY, usize::MAX); 2]; n];
        for i in 0..n {
            let own = c.label(i);
            if sizes[own] > 1 {
                a[i] = cross[i * k + own] / (sizes[own] - 1) as f64;
            }
            for r in 0..k {
                if r == own {
                    continue;
                }
                let mean = cross[i * k + r] / sizes[r] as f64;
                if mean < top2[i][0].0 {
                    top2[i][1] = top2[i][0];
                    top2[i][0] = (mean, r);
                } else if mean < top2[i][1].0 {
                    top2[i][1] = (mean, r);
                }
            }
        }
        Self {
            labels: c.labels().to_vec(),
            sizes,
            k,
            cross,
            a,
            top2,
        }
    }

    #[inline]
    fn min_excluding(&self, j: usize, ex: usize) -> f64 {
        if self.top2[j][0].1 != ex {
            self.top2[j][0].0
        } else {
            self.top2[j][1].0
        }
    }

    /// ASW of the subset plus one extra point placed in cluster `r`;
    /// `dist_to_subset[j]` is d(extra, subset_j), `sums[q]` its cluster sums.
    fn asw_with_extra(&self, dist_to_subset: &[f64], sums: &[f64], r: usize) -> f64 {
        let ns = self.labels.len();
        let size_r = self.sizes[r];
        let mut total = 0.0;
        for j in 0..ns {
            let own = self.labels[j];
            let s = if own == r {
                let a = (self.cross[j * self.k + r] + dist_to_subset[j]) / size_r as f64;
                sil(a, self.top2[j][0].0)
            } else if self.sizes[own] == 1 {
                0.0
            } else {
                let mean_r = (self.cross[j * self.k + r] + dist_to_subset[j])
                    / (size_r + 1) as f64;
                sil(self.a[j], self.min_excluding(j, r).min(mean_r))
            };
            total += s;
        }
        // the extra point itself
        let a = sums[r] / size_r as f64;
        let mut b = f64::INFINITY;
        for q in 0..self.k {
            if q != r {
                b = b.min(sums[q] / self.sizes[q] as f64);
            }
        }
        total += sil(a, b);
        total / (ns + 1) as f64
    }
}

#[inline]
fn sil(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        0.0
    } else {
        (b - a) / m
    }
}

/// The FOSil approximation: cluster the best of M random subsamples with
/// OSil, then assign each remaining point to the cluster that maximizes the
/// ASW of the subset plus that single point.
pub fn fosil(
    d: &DissimilarityMatrix,
    coords: Option<&Dataset>,
    fopts: &FosilOptions,
) -> Result<OptimizeResult> {
    let n = d.n();
    fopts.validate(n)?;
    let ns = fopts.resolved_sample_size(n);
    if ns == n && fopts.num_samples == 1 {
        return osil(d, coords, &fopts.inner);
    }
    let opts = &fopts.inner;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // draw the M subsamples once; they are shared across the k sweep
    let mut samples: Vec<Vec<usize>> = Vec::with_capacity(fopts.num_samples);
    for _ in 0..fopts.num_samples {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        idx.truncate(ns);
        idx.sort_unstable();
        samples.push(idx);
    }

    let mut ks = Vec::new();
    let mut asw_by_k = Vec::new();
    let mut partitions = Vec::new();
    let mut init_asw = Vec::new();
    let mut traces = Vec::new();
    let mut warnings = Vec::new();
    let mut all_converged = true;
    for k in opts.kmin..=opts.kmax {
        let mut best_sub: Option<(usize, OptimizeResult)> = None;
        for (m, idx) in samples.iter().enumerate() {
            let dm = d.subset(idx);
            let xm = coords.map(|x| {
                Dataset::new(idx.iter().map(|&i| x.point(i).to_vec()).collect(), None)
                    .expect("subset of a valid dataset")
            });
            let sub_opts = OsilOptions {
                kmin: k,
                kmax: k,
                seed: opts.seed.wrapping_add(m as u64),
                ..opts.clone()
            };
            let res = osil(&dm, xm.as_ref(), &sub_opts)?;
            if best_sub
                .as_ref()
                .map_or(true, |(_, b)| res.best_asw() > b.best_asw())
            {
                best_sub = Some((m, res));
            }
        }
        let (m_best, sub_res) = best_sub.expect("M >= 1");
        let idx = &samples[m_best];
        let sub_part = sub_res.best_partition().clone();
        all_converged &= sub_res.converged;
        warnings.extend(sub_res.warnings.iter().cloned());
        init_asw.extend(sub_res.initializer_asw.iter().cloned());

        // point-by-point assignment of the held-out objects, each evaluated
        // against the fixed subset clustering alone
        let dm = d.subset(idx);
        let profile = SubsetProfile::new(&dm, &sub_part);
        let in_subset: Vec<Option<usize>> = {
            let mut map = vec![None; n];
            for (pos, &i) in idx.iter().enumerate() {
                map[i] = Some(pos);
            }
            map
        };
        let mut full_labels = vec![usize::MAX; n];
        for (pos, &i) in idx.iter().enumerate() {
            full_labels[i] = sub_part.label(pos);
        }
        for i in 0..n {
            if in_subset[i].is_some() {
                continue;
            }
            let dist_to_subset: Vec<f64> = idx.iter().map(|&j| d.get(i, j)).collect();
            let mut sums = vec![0.0; k];
            for (pos, &dij) in dist_to_subset.iter().enumerate() {
                sums[sub_part.label(pos)] += dij;
            }
            let mut best_r = 0;
            let mut best_f = f64::NEG_INFINITY;
            for r in 0..k {
                let f = profile.asw_with_extra(&dist_to_subset, &sums, r);
                if f > best_f {
                    best_f = f;
                    best_r = r;
                }
            }
            full_labels[i] = best_r;
        }
        let full = Partition::from_raw(full_labels);
        let full_asw = asw(d, &full)?;
        ks.push(k);
        asw_by_k.push(full_asw);
        partitions.push(full);
        traces.push(sub_res.traces.into_iter().next().unwrap_or_default());
    }
    Ok(OptimizeResult::from_per_k(
        ks,
        asw_by_k,
        partitions,
        init_asw,
        traces,
        warnings,
        all_converged,
    ))
}

/// PAMSil: PAM-style medoid search accepting a medoid/non-medoid swap iff
/// the ASW of the induced nearest-medoid partition strictly improves.
/// Starts from PAM BUILD medoids.
pub fn pamsil(d: &DissimilarityMatrix, k: usize) -> Result<(Partition, f64)> {
    let n = d.n();
    let mut medoids = baselines::pam_build(d, k)?;
    let (mut part, _) = baselines::nearest_medoid_partition(d, &medoids);
    let mut current = induced_asw(d, &part);
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for mi in 0..k {
            for h in 0..n {
                if medoids.contains(&h) {
                    continue;
                }
                let saved = medoids[mi];
                medoids[mi] = h;
                let (cand, _) = baselines::nearest_medoid_partition(d, &medoids);
                medoids[mi] = saved;
                let f = induced_asw(d, &cand);
                if best.map_or(true, |(_, _, bf)| f > bf) {
                    best = Some((mi, h, f));
                }
            }
        }
        match best {
            Some((mi, h, f)) if f > current + IMPROVEMENT_EPS => {
                medoids[mi] = h;
                let (p, _) = baselines::nearest_medoid_partition(d, &medoids);
                part = p;
                current = f;
            }
            _ => break,
        }
    }
    Ok((part, current))
}

/// ASW of a nearest-medoid partition; collapsed partitions (fewer than two
/// effective clusters) score negative infinity so swaps avoid them.
fn induced_asw(d: &DissimilarityMatrix, c: &Partition) -> f64 {
    if c.k() < 2 {
        return f64::NEG_INFINITY;
    }
    silhouette_profile(d, c).map(|p| p.asw).unwrap_or(f64::NEG_INFINITY)
}
