mod algebra;
mod bct;
mod ct;
mod gen;
mod identities;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use slicereg::sampling::{stream, Stream};
use slicereg::{mix_series, HerglotzMix, QSeries};

pub use algebra::{cmd_eval, cmd_recip, cmd_star, parse_quaternion};
pub use bct::cmd_check_bct;
pub use ct::{cmd_check_ct, Outcome};
pub use gen::{cmd_gen, Manifest, ManifestEntry};
pub use identities::{cmd_check_identities, IdentityResult};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub fn read_series(path: &Path) -> Result<QSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Maps `work` over `0..n` on a pool of `config.workers` threads and returns
/// the results in index order.
pub(crate) fn fan_out<T, F>(config: &RunConfig, n: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(work).collect())
}

/// Random mixture number `i` of a run; `gen` and `check-ct` draw the same ones.
pub(crate) fn generated_mix(config: &RunConfig, i: usize) -> (HerglotzMix, QSeries, Stream) {
    let mut rng = stream(config.seed, i as u64);
    let mix = HerglotzMix::random(&mut rng, config.max_kernels);
    let f = mix_series(&mix, config.order);
    (mix, f, rng)
}

pub(crate) fn input_labels(inputs: &[PathBuf]) -> Vec<String> {
    inputs.iter().map(|p| p.display().to_string()).collect()
}
