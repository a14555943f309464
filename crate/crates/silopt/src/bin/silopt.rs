//! Command-line interface: clustering, simulation, evaluation, axiom
//! checks, and the OSil/FOSil timing benchmark.

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use silopt::axioms::{
    brute_force_optimum, non_trivial_partitions, random_c_transformation, richness_distance,
    scale_dissimilarity,
};
use silopt::core::{DissimilarityMatrix, Partition};
use silopt::dgp::{generate, DgpId, DgpSpec};
use silopt::distances;
use silopt::error::Error;
use silopt::eval::{ari, run_simulation, sweep, KMode, Method};
use silopt::io;
use silopt::optimize::{fosil, osil, pamsil, FosilOptions, Initializer, OsilOptions};
use silopt::silhouette::{asw, silhouette_profile};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "silopt", version, about = "Clustering by direct ASW optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a dataset or dissimilarity matrix
    Cluster(ClusterArgs),
    /// Run Monte Carlo simulations over the built-in DGPs
    Simulate(SimulateArgs),
    /// Adjusted Rand index between two label files
    Eval(EvalArgs),
    /// Run the CQM axiom property suites
    Axioms(AxiomsArgs),
    /// Time OSil against FOSil on the Gaussian-corners setup
    Bench(BenchArgs),
}

#[derive(Args)]
struct ClusterArgs {
    /// Coordinate CSV (header + one row per object)
    #[arg(long, conflicts_with = "dist")]
    input: Option<PathBuf>,
    /// Dissimilarity CSV (square, leading id column)
    #[arg(long)]
    dist: Option<PathBuf>,
    #[arg(long)]
    method: String,
    #[arg(long, conflicts_with_all = ["kmin", "kmax"])]
    k: Option<usize>,
    #[arg(long, requires = "kmax")]
    kmin: Option<usize>,
    #[arg(long, requires = "kmin")]
    kmax: Option<usize>,
    /// Distance on coordinate input: euclidean, manhattan, or jaccard
    #[arg(long, default_value = "euclidean")]
    metric: String,
    /// Comma-separated OSil initializers
    #[arg(long)]
    inits: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// FOSil subsample size
    #[arg(long)]
    ns: Option<usize>,
    /// FOSil subsample count
    #[arg(long)]
    m: Option<usize>,
    /// Partition CSV path; the JSON report lands next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Comma-separated DGP ids (1-9 or fig1)
    #[arg(long)]
    dgp: String,
    /// Comma-separated methods
    #[arg(long)]
    methods: String,
    #[arg(long)]
    reps: usize,
    /// Use a fixed k (the DGP's true k when no value is given)
    #[arg(long, num_args = 0..=1, default_missing_value = "0", conflicts_with = "sweep")]
    fixed_k: Option<usize>,
    /// Sweep k over KMIN KMAX
    #[arg(long, num_args = 2, value_names = ["KMIN", "KMAX"])]
    sweep: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Per-rep results CSV; the summary lands next to it
    #[arg(long)]
    out: Option<PathBuf>,
    /// Resolve the Gam(15, 0) ambiguity in DGPs 4 and 5 by substituting rate 1
    #[arg(long)]
    paper_compat: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct AxiomsArgs {
    /// One of: scale, consistency, richness, isomorphism (default: all)
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Use the Gaussian-corners timing setup (the only one available)
    #[arg(long)]
    fig1: bool,
    #[arg(long, default_value_t = 1000)]
    nmax: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Timing CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    silopt::init_thread_pool_from_env();
    let result = match cli.command {
        Command::Cluster(args) => cmd_cluster(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Axioms(args) => cmd_axioms(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Validation problems exit 2, runtime failures exit 1.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::Enumeration(_) => 1,
        _ => 2,
    }
}

#[derive(Serialize)]
struct RunReport {
    method: String,
    metric: Option<String>,
    seed: u64,
    k_range: [usize; 2],
    initializers: Option<Vec<String>>,
    sample_size: Option<usize>,
    num_samples: Option<usize>,
    ks: Vec<usize>,
    asw_by_k: Vec<f64>,
    kstar: usize,
    local_optima: Vec<usize>,
    wall_seconds: f64,
    converged: bool,
    warnings: Vec<String>,
}

fn cmd_cluster(args: ClusterArgs) -> silopt::Result<()> {
    let method = Method::from_str(&args.method)?;
    let (kmin, kmax) = match (args.k, args.kmin, args.kmax) {
        (Some(k), None, None) => (k, k),
        (None, Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::InvalidOptions(
                "give exactly one of --k or --kmin with --kmax".into(),
            ))
        }
    };
    let (coords, d, metric) = match (&args.input, &args.dist) {
        (Some(path), None) => {
            let x = io::read_dataset(path)?;
            let d = match args.metric.as_str() {
                "euclidean" => distances::euclidean(&x)?,
                "manhattan" => distances::manhattan(&x)?,
                "jaccard" => distances::jaccard_binary(x.points())?,
                other => {
                    return Err(Error::InvalidOptions(format!("unknown metric {other:?}")))
                }
            };
            (Some(x), d, Some(args.metric.clone()))
        }
        (None, Some(path)) => (None, io::read_dissimilarity(path)?, None),
        _ => {
            return Err(Error::InvalidOptions(
                "give exactly one of --input or --dist".into(),
            ))
        }
    };
    if method.needs_coordinates() && coords.is_none() {
        return Err(Error::NeedsCoordinates("k-means needs --input".into()));
    }

    let mut opts = OsilOptions::new(kmin, kmax, args.seed);
    if let Some(list) = &args.inits {
        opts.initializers = list
            .split(',')
            .map(Initializer::from_str)
            .collect::<silopt::Result<Vec<_>>>()?;
    }
    let started = Instant::now();
    let (ks, asw_by_k, partitions, converged, warnings, init_names, fosil_params) = match method {
        Method::Osil => {
            let res = osil(&d, coords.as_ref(), &opts)?;
            let names = opts.initializers.iter().map(|i| i.name().to_string()).collect();
            (
                res.ks,
                res.asw_by_k,
                res.partitions_by_k,
                res.converged,
                res.warnings,
                Some(names),
                None,
            )
        }
        Method::Fosil => {
            let mut fopts = FosilOptions::new(opts.clone());
            if let Some(ns) = args.ns {
                fopts.sample_size = ns;
            }
            if let Some(m) = args.m {
                fopts.num_samples = m;
            }
            let params = (fopts.sample_size, fopts.num_samples);
            let res = fosil(&d, coords.as_ref(), &fopts)?;
            let names = opts.initializers.iter().map(|i| i.name().to_string()).collect();
            (
                res.ks,
                res.asw_by_k,
                res.partitions_by_k,
                res.converged,
                res.warnings,
                Some(names),
                Some(params),
            )
        }
        Method::Pamsil => {
            let mut ks = Vec::new();
            let mut asws = Vec::new();
            let mut parts = Vec::new();
            for k in kmin..=kmax {
                let (p, f) = pamsil(&d, k)?;
                ks.push(k);
                asws.push(f);
                parts.push(p);
            }
            (ks, asws, parts, true, Vec::new(), None, None)
        }
        _ => {
            let res = sweep(&d, coords.as_ref(), method, kmin, kmax, args.seed)?;
            (
                res.ks,
                res.asw_by_k,
                res.partitions_by_k,
                res.converged,
                Vec::new(),
                None,
                None,
            )
        }
    };
    let wall_seconds = started.elapsed().as_secs_f64();

    // the sweep summary (kstar, local optima) is uniform across methods
    let mut kstar = ks[0];
    let mut best = f64::NEG_INFINITY;
    for (&k, &v) in ks.iter().zip(&asw_by_k) {
        if v > best {
            best = v;
            kstar = k;
        }
    }
    let m = ks.len();
    let local_optima: Vec<usize> = (0..m)
        .filter(|&i| {
            (i == 0 || asw_by_k[i] > asw_by_k[i - 1])
                && (i + 1 == m || asw_by_k[i] > asw_by_k[i + 1])
        })
        .map(|i| ks[i])
        .collect();
    let best_partition = &partitions[ks.iter().position(|&k| k == kstar).unwrap()];

    let report = RunReport {
        method: method.name().into(),
        metric,
        seed: args.seed,
        k_range: [kmin, kmax],
        initializers: init_names,
        sample_size: fosil_params.map(|(ns, _)| ns),
        num_samples: fosil_params.map(|(_, m)| m),
        ks,
        asw_by_k,
        kstar,
        local_optima,
        wall_seconds,
        converged,
        warnings,
    };
    let out = args.out.unwrap_or_else(|| PathBuf::from("partition.csv"));
    io::write_partition(&out, best_partition)?;
    let report_path = out.with_extension("report.json");
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidOptions(format!("report serialization: {e}")))?;
    std::fs::write(&report_path, json)?;
    println!(
        "wrote {} and {} (kstar={}, asw={})",
        out.display(),
        report_path.display(),
        report.kstar,
        best
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> silopt::Result<()> {
    let dgps: Vec<DgpId> = args
        .dgp
        .split(',')
        .map(DgpId::from_str)
        .collect::<silopt::Result<Vec<_>>>()?;
    let methods: Vec<Method> = args
        .methods
        .split(',')
        .map(Method::from_str)
        .collect::<silopt::Result<Vec<_>>>()?;
    let out = args.out.unwrap_or_else(|| PathBuf::from("results.csv"));
    let mut all_rows = Vec::new();
    let mut all_summaries = Vec::new();
    for id in dgps {
        let mut spec = DgpSpec::new(id, args.seed);
        spec.paper_compat = args.paper_compat;
        let mode = match (args.fixed_k, &args.sweep) {
            (Some(k), None) => KMode::Fixed(if k == 0 { spec.true_k() } else { k }),
            (None, Some(range)) => KMode::Sweep(range[0], range[1]),
            _ => {
                return Err(Error::InvalidOptions(
                    "give exactly one of --fixed-k or --sweep".into(),
                ))
            }
        };
        let outcome = run_simulation(&spec, &methods, args.reps, mode, args.seed)?;
        for w in &outcome.warnings {
            eprintln!("warning: dgp {id}: {w}");
        }
        all_rows.extend(outcome.rows);
        all_summaries.extend(outcome.summaries);
    }
    io::write_results(&out, &all_rows)?;
    let summary_path = out.with_extension("summary.csv");
    silopt::eval::write_summary(&summary_path, &all_summaries)?;
    println!("wrote {} and {}", out.display(), summary_path.display());
    for s in &all_summaries {
        println!(
            "dgp {} {} {}: mean_asw={:.3} mean_ari={:.3}{}",
            s.dgp,
            s.method,
            s.mode,
            s.mean_asw,
            s.mean_ari,
            s.ppr.map_or(String::new(), |p| format!(" ppr={p:.0}")),
        );
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> silopt::Result<()> {
    let pred = io::read_labels(&args.pred)?;
    let truth = io::read_labels(&args.truth)?;
    println!("{}", io::fmt_float(ari(&pred, &truth)?));
    Ok(())
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> DissimilarityMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(0.1..5.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    DissimilarityMatrix::from_rows(rows).expect("symmetric by construction")
}

fn random_nontrivial_partition(rng: &mut ChaCha8Rng, n: usize) -> Partition {
    loop {
        let k = rng.gen_range(2..n);
        let labels: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=k as i64)).collect();
        let p = Partition::from_labels(&labels).unwrap();
        if p.k() >= 2 {
            return p;
        }
    }
}

fn cmd_axioms(args: AxiomsArgs) -> silopt::Result<()> {
    let suites: Vec<&str> = match args.suite.as_deref() {
        Some(s) => vec![s],
        None => vec!["scale", "consistency", "richness", "isomorphism"],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut all_pass = true;
    for suite in suites {
        let (pass, detail) = match suite {
            "scale" => run_scale_suite(&mut rng),
            "consistency" => run_consistency_suite(&mut rng),
            "richness" => run_richness_suite(),
            "isomorphism" => run_isomorphism_suite(&mut rng),
            other => {
                return Err(Error::InvalidOptions(format!("unknown suite {other:?}")))
            }
        };
        all_pass &= pass;
        println!("{}: {} ({detail})", suite, if pass { "PASS" } else { "FAIL" });
    }
    if all_pass {
        Ok(())
    } else {
        Err(Error::Enumeration("one or more axiom suites failed".into()))
    }
}

fn run_scale_suite(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(4..12);
        let d = random_instance(rng, n);
        let c = random_nontrivial_partition(rng, n);
        let eta = rng.gen_range(0.01..100.0);
        let scaled = scale_dissimilarity(&d, eta).unwrap();
        let p1 = silhouette_profile(&d, &c).unwrap();
        let p2 = silhouette_profile(&scaled, &c).unwrap();
        for (a, b) in p1.s.iter().zip(&p2.s) {
            worst = worst.max((a - b).abs());
        }
    }
    (worst <= 1e-12, format!("100 cases, max |Δs| = {worst:.2e}"))
}

fn run_consistency_suite(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(4..12);
        let d = random_instance(rng, n);
        let c = random_nontrivial_partition(rng, n);
        let before = asw(&d, &c).unwrap();
        let strength = rng.gen_range(0.05..1.0);
        let dp = random_c_transformation(&d, &c, rng, strength).unwrap();
        let after = asw(&dp, &c).unwrap();
        worst = worst.max(before - after);
    }
    (
        worst <= 1e-12,
        format!("1000 transformations, max decrease = {worst:.2e}"),
    )
}

fn run_richness_suite() -> (bool, String) {
    let mut checked = 0usize;
    for n in 3..=7 {
        for target in non_trivial_partitions(n).unwrap() {
            let d = richness_distance(&target).unwrap();
            let (best, _, ties) = brute_force_optimum(&d, None).unwrap();
            if best != target || ties != 0 {
                return (false, format!("n={n}: target not the unique argmax"));
            }
            checked += 1;
        }
    }
    (true, format!("{checked} target partitions, unique argmax each"))
}

fn run_isomorphism_suite(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(4..12);
        let d = random_instance(rng, n);
        let c = random_nontrivial_partition(rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let dp = d.permuted(&perm);
        let cp_labels: Vec<i64> = perm.iter().map(|&i| c.label(i) as i64 + 1).collect();
        let cp = Partition::from_labels(&cp_labels).unwrap();
        let a = asw(&d, &c).unwrap();
        let b = asw(&dp, &cp).unwrap();
        worst = worst.max((a - b).abs());
    }
    (worst <= 1e-12, format!("100 permutations, max |ΔASW| = {worst:.2e}"))
}

fn cmd_bench(args: BenchArgs) -> silopt::Result<()> {
    if !args.fig1 {
        return Err(Error::InvalidOptions("only the --fig1 setup is available".into()));
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from("bench.csv"));
    let sizes: Vec<usize> = (1..=10).map(|i| i * 100).filter(|&n| n <= args.nmax).collect();
    if sizes.is_empty() {
        return Err(Error::InvalidOptions("--nmax must be at least 100".into()));
    }
    let mut w = csv::Writer::from_path(&out)?;
    w.write_record(["n", "method", "seconds", "asw", "ari"])?;
    for &n in &sizes {
        let spec = DgpSpec {
            id: DgpId::Fig1,
            seed: args.seed,
            size_override: Some(n),
            paper_compat: false,
        };
        let x = generate(&spec)?;
        let d = distances::euclidean(&x)?;
        let truth = x.truth().unwrap().clone();
        for (name, use_fosil) in [("osil", false), ("fosil", true)] {
            let opts = OsilOptions::fixed_k(4, args.seed);
            let started = Instant::now();
            let res = if use_fosil {
                fosil(&d, Some(&x), &FosilOptions::new(opts))?
            } else {
                osil(&d, Some(&x), &opts)?
            };
            let seconds = started.elapsed().as_secs_f64();
            let a = ari(res.best_partition(), &truth)?;
            w.write_record([
                n.to_string(),
                name.to_string(),
                io::fmt_float(seconds),
                io::fmt_float(res.best_asw()),
                io::fmt_float(a),
            ])?;
            println!("n={n} {name}: {seconds:.2}s asw={:.3} ari={a:.3}", res.best_asw());
        }
    }
    w.flush()?;
    println!("wrote {}", out.display());
    Ok(())
}
