//! Evaluation: the adjusted Rand index, k-sweeps for any method, and the
//! Monte Carlo simulation harness.

use crate::baselines::{self, Linkage};
use crate::core::{Dataset, DissimilarityMatrix, Partition};
use crate::distances;
use crate::dgp::{generate, DgpSpec};
use crate::error::{Error, Result};
use crate::io::{fmt_float, ResultRow};
use crate::optimize::{fosil, osil, pamsil, FosilOptions, OsilOptions};
use crate::silhouette::asw;
use std::path::Path;
use std::time::Instant;

fn choose2(n: usize) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Hubert-Arabie adjusted Rand index between two partitions of the same
/// objects. Two identical trivial partitions (where the adjustment
/// denominator vanishes) score 1.
pub fn ari(a: &Partition, b: &Partition) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            labels: a.n(),
            n: b.n(),
        });
    }
    let (ka, kb) = (a.k(), b.k());
    let mut table = vec![0usize; ka * kb];
    for i in 0..a.n() {
        table[a.label(i) * kb + b.label(i)] += 1;
    }
    let index: f64 = table.iter().map(|&v| choose2(v)).sum();
    let row_sum: f64 = a.sizes().iter().map(|&v| choose2(v)).sum();
    let col_sum: f64 = b.sizes().iter().map(|&v| choose2(v)).sum();
    let total = choose2(a.n());
    let expected = row_sum * col_sum / total;
    let max = 0.5 * (row_sum + col_sum);
    let denom = max - expected;
    if denom.abs() < 1e-12 {
        // both trivial: all pairwise decisions agree by construction
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

/// Clustering methods available to the sweep and simulation harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Osil,
    Fosil,
    Pamsil,
    Pam,
    KMeans,
    Single,
    Average,
    Complete,
    Ward,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Osil,
        Method::Fosil,
        Method::Pamsil,
        Method::Pam,
        Method::KMeans,
        Method::Single,
        Method::Average,
        Method::Complete,
        Method::Ward,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Osil => "osil",
            Method::Fosil => "fosil",
            Method::Pamsil => "pamsil",
            Method::Pam => "pam",
            Method::KMeans => "kmeans",
            Method::Single => "single",
            Method::Average => "average",
            Method::Complete => "complete",
            Method::Ward => "ward",
        }
    }

    pub fn needs_coordinates(&self) -> bool {
        matches!(self, Method::KMeans)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidOptions(format!("unknown method {s:?}")))
    }
}

/// One method's clustering at a fixed k, with its ASW.
pub fn cluster_fixed_k(
    d: &DissimilarityMatrix,
    coords: Option<&Dataset>,
    method: Method,
    k: usize,
    seed: u64,
) -> Result<(Partition, f64, bool)> {
    match method {
        Method::Osil => {
            let res = osil(d, coords, &OsilOptions::fixed_k(k, seed))?;
            let converged = res.converged;
            Ok((res.best_partition().clone(), res.best_asw(), converged))
        }
        Method::Fosil => {
            let fopts = FosilOptions::new(OsilOptions::fixed_k(k, seed));
            let res = fosil(d, coords, &fopts)?;
            let converged = res.converged;
            Ok((res.best_partition().clone(), res.best_asw(), converged))
        }
        Method::Pamsil => {
            let (p, f) = pamsil(d, k)?;
            Ok((p, f, true))
        }
        Method::Pam => {
            let p = baselines::pam(d, k, seed)?;
            let f = asw(d, &p)?;
            Ok((p, f, true))
        }
        Method::KMeans => {
            let x = coords.ok_or_else(|| {
                Error::NeedsCoordinates("k-means on dissimilarity-only input".into())
            })?;
            let p = baselines::kmeans(x, k, 100, seed)?;
            let f = asw(d, &p)?;
            Ok((p, f, true))
        }
        Method::Single | Method::Average | Method::Complete | Method::Ward => {
            let linkage = match method {
                Method::Single => Linkage::Single,
                Method::Average => Linkage::Average,
                Method::Complete => Linkage::Complete,
                _ => Linkage::Ward,
            };
            let p = baselines::linkage_cut(d, linkage, k)?;
            let f = asw(d, &p)?;
            Ok((p, f, true))
        }
    }
}

/// Result of estimating k by sweeping a method over a range and picking the
/// ASW maximizer.
#[derive(Debug, Clone)]
pub struct KSweepResult {
    pub ks: Vec<usize>,
    pub asw_by_k: Vec<f64>,
    pub partitions_by_k: Vec<Partition>,
    /// ASW-maximizing k; ties go to the smallest k.
    pub kstar: usize,
    /// k values whose ASW beats both neighbors (one-sided at the range
    /// boundaries).
    pub local_optima: Vec<usize>,
    pub converged: bool,
}

impl KSweepResult {
    fn from_per_k(
        ks: Vec<usize>,
        asw_by_k: Vec<f64>,
        partitions_by_k: Vec<Partition>,
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
        let m = ks.len();
        let local_optima = (0..m)
            .filter(|&i| {
                let left_ok = i == 0 || asw_by_k[i] > asw_by_k[i - 1];
                let right_ok = i + 1 == m || asw_by_k[i] > asw_by_k[i + 1];
                left_ok && right_ok
            })
            .map(|i| ks[i])
            .collect();
        Self {
            ks,
            asw_by_k,
            partitions_by_k,
            kstar,
            local_optima,
            converged,
        }
    }

    pub fn best_partition(&self) -> &Partition {
        let idx = self.ks.iter().position(|&k| k == self.kstar).unwrap();
        &self.partitions_by_k[idx]
    }

    pub fn best_asw(&self) -> f64 {
        let idx = self.ks.iter().position(|&k| k == self.kstar).unwrap();
        self.asw_by_k[idx]
    }
}

/// Estimate the number of clusters by sweeping k over [kmin, kmax].
pub fn sweep(
    d: &DissimilarityMatrix,
    coords: Option<&Dataset>,
    method: Method,
    kmin: usize,
    kmax: usize,
    seed: u64,
) -> Result<KSweepResult> {
    let opts = OsilOptions::new(kmin, kmax, seed);
    opts.validate(d.n())?;
    match method {
        Method::Osil => {
            let res = osil(d, coords, &opts)?;
            Ok(KSweepResult::from_per_k(
                res.ks,
                res.asw_by_k,
                res.partitions_by_k,
                res.converged,
            ))
        }
        Method::Fosil => {
            let res = fosil(d, coords, &FosilOptions::new(opts))?;
            Ok(KSweepResult::from_per_k(
                res.ks,
                res.asw_by_k,
                res.partitions_by_k,
                res.converged,
            ))
        }
        _ => {
            let mut ks = Vec::new();
            let mut asw_by_k = Vec::new();
            let mut partitions = Vec::new();
            let mut converged = true;
            for k in kmin..=kmax {
                let (p, f, c) = cluster_fixed_k(d, coords, method, k, seed)?;
                ks.push(k);
                asw_by_k.push(f);
                partitions.push(p);
                converged &= c;
            }
            Ok(KSweepResult::from_per_k(ks, asw_by_k, partitions, converged))
        }
    }
}

/// How the simulation harness chooses k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMode {
    Fixed(usize),
    Sweep(usize, usize),
}

impl KMode {
    pub fn name(&self) -> String {
        match self {
            KMode::Fixed(k) => format!("fixed-{k}"),
            KMode::Sweep(a, b) => format!("sweep-{a}-{b}"),
        }
    }
}

/// Aggregate over replications for one (dgp, method, mode) cell.
#[derive(Debug, Clone)]
pub struct SimSummary {
    pub dgp: String,
    pub method: String,
    pub mode: String,
    pub mean_asw: f64,
    pub se_asw: f64,
    pub mean_ari: f64,
    pub se_ari: f64,
    /// Percentage of replications recovering the true k; sweep mode only.
    pub ppr: Option<f64>,
    pub reps: usize,
}

/// Everything one simulation run produces.
#[derive(Debug)]
pub struct SimOutcome {
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<SimSummary>,
    pub warnings: Vec<String>,
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Run `reps` replications of one DGP for each method, collecting per-rep
/// rows and per-method summaries. Replication r uses seed `spec.seed + r`.
/// A failed (method, rep) pair is recorded as a warning, not a fatal error.
pub fn run_simulation(
    spec: &DgpSpec,
    methods: &[Method],
    reps: usize,
    mode: KMode,
    method_seed: u64,
) -> Result<SimOutcome> {
    if reps == 0 {
        return Err(Error::InvalidOptions("need at least one replication".into()));
    }
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    if reps == 1 {
        warnings.push("single replication: standard errors are reported as 0".into());
    }
    // per method: (asw values, ari values, k-recovery hits)
    let mut acc: Vec<(Vec<f64>, Vec<f64>, usize)> =
        vec![(Vec::new(), Vec::new(), 0); methods.len()];
    for rep in 0..reps {
        let rep_spec = DgpSpec {
            seed: spec.seed.wrapping_add(rep as u64),
            ..*spec
        };
        let x = generate(&rep_spec)?;
        let d = distances::euclidean(&x)?;
        let truth = x.truth().expect("generated data carries truth").clone();
        for (mi, &method) in methods.iter().enumerate() {
            let started = Instant::now();
            let outcome: Result<(Partition, f64, usize, bool)> = match mode {
                KMode::Fixed(k) => cluster_fixed_k(&d, Some(&x), method, k, method_seed)
                    .map(|(p, f, c)| (p, f, k, c)),
                KMode::Sweep(kmin, kmax) => {
                    sweep(&d, Some(&x), method, kmin, kmax, method_seed)
                        .map(|r| (r.best_partition().clone(), r.best_asw(), r.kstar, r.converged))
                }
            };
            let seconds = started.elapsed().as_secs_f64();
            match outcome {
                Ok((p, f, k, converged)) => {
                    let a = ari(&p, &truth)?;
                    acc[mi].0.push(f);
                    acc[mi].1.push(a);
                    if k == rep_spec.true_k() {
                        acc[mi].2 += 1;
                    }
                    rows.push(ResultRow {
                        method: method.name().into(),
                        k,
                        rep: rep + 1,
                        asw: f,
                        ari: a,
                        seconds,
                        converged,
                    });
                }
                Err(e) => {
                    warnings.push(format!("{} rep {}: {e}", method.name(), rep + 1));
                }
            }
        }
    }
    let mut summaries = Vec::new();
    for (mi, &method) in methods.iter().enumerate() {
        let (asws, aris, hits) = &acc[mi];
        if asws.is_empty() {
            continue;
        }
        let (mean_asw, se_asw) = mean_se(asws);
        let (mean_ari, se_ari) = mean_se(aris);
        let ppr = match mode {
            KMode::Sweep(..) => Some(100.0 * *hits as f64 / asws.len() as f64),
            KMode::Fixed(_) => None,
        };
        summaries.push(SimSummary {
            dgp: spec.id.to_string(),
            method: method.name().into(),
            mode: mode.name(),
            mean_asw,
            se_asw,
            mean_ari,
            se_ari,
            ppr,
            reps: asws.len(),
        });
    }
    Ok(SimOutcome {
        rows,
        summaries,
        warnings,
    })
}

/// Write summary rows: `dgp,method,mode,mean_asw,se_asw,mean_ari,se_ari,ppr,reps`.
pub fn write_summary(path: &Path, rows: &[SimSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "dgp", "method", "mode", "mean_asw", "se_asw", "mean_ari", "se_ari", "ppr", "reps",
    ])?;
    for r in rows {
        w.write_record([
            r.dgp.clone(),
            r.method.clone(),
            r.mode.clone(),
            fmt_float(r.mean_asw),
            fmt_float(r.se_asw),
            fmt_float(r.mean_ari),
            fmt_float(r.se_ari),
            r.ppr.map_or_else(|| "NA".to_string(), fmt_float),
            r.reps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
