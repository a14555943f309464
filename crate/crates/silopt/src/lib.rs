//! Distance-based clustering by direct optimization of the average
//! silhouette width (ASW), with baseline clusterers, simulation generators,
//! evaluation tools, and the axiom machinery used to validate ASW as a
//! clustering quality measure.
//!
//! Candidate scans, k-means restarts, and related hot loops run on rayon
//! when the default `parallel` feature is enabled; disabling it yields a
//! purely sequential build with identical results.

pub mod axioms;
pub mod baselines;
pub mod core;
pub mod dgp;
pub mod distances;
pub mod error;
pub mod eval;
pub mod io;
pub mod optimize;
pub mod silhouette;

pub use crate::core::{Dataset, DissimilarityMatrix, Partition};
pub use crate::error::{Error, Result};
pub use crate::eval::{ari, Method};
pub use crate::optimize::{fosil, osil, pamsil, FosilOptions, OsilOptions};
pub use crate::silhouette::{asw, silhouette_profile};

/// Cap the rayon thread pool from the `SILOPT_THREADS` environment variable.
/// Must run before any parallel work; returns the applied cap, if any.
/// A no-op (always `None`) in sequential builds.
pub fn init_thread_pool_from_env() -> Option<usize> {
    #[cfg(feature = "parallel")]
    {
        if let Ok(v) = std::env::var("SILOPT_THREADS") {
            if let Ok(t) = v.parse::<usize>() {
                if t >= 1
                    && rayon::ThreadPoolBuilder::new()
                        .num_threads(t)
                        .build_global()
                        .is_ok()
                {
                    return Some(t);
                }
            }
        }
        None
    }
    #[cfg(not(feature = "parallel"))]
    {
        None
    }
}
