//! File-level operations behind the `fairsurv` binary: dataset synthesis,
//! training, evaluation, benchmark sweeps, and loss-landscape grids. Every
//! command is reproducible from its manifest: identical inputs produce
//! identical output bytes.

mod benchmark;
mod evaluate;
mod landscape;
mod synth;
mod train_run;

pub use benchmark::{run_benchmark, BenchmarkPlan, DatasetSource};
pub use evaluate::{run_evaluate, EvaluateArgs};
pub use landscape::{run_landscape, LandscapeSpec};
pub use synth::run_synth;
pub use train_run::{load_checkpoint, run_train, RunConfig};

use sha2::{Digest, Sha256};

/// Configure the rayon worker pool; later calls are ignored once the global
/// pool exists.
pub fn set_jobs(jobs: Option<usize>) {
    let jobs = jobs.or_else(|| {
        std::env::var("FAIRSURV_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
