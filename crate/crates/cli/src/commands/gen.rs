use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use slicereg::KernelSpec;

use super::{fan_out, generated_mix};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{to_json, write_file, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub weights: Vec<f64>,
    pub kernels: Vec<KernelSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub order: usize,
    pub max_kernels: usize,
    pub functions: Vec<ManifestEntry>,
}

/// Writes `fn_NNNN.json` for each generated mixture plus `manifest.json` into
/// the output directory (default `./series`). Returns the manifest.
pub fn cmd_gen(config: &RunConfig) -> Result<Manifest> {
    let dir = config.output_path.clone().unwrap_or_else(|| PathBuf::from("series"));
    let generated = fan_out(config, config.n_functions, |i| Ok(generated_mix(config, i)))?;

    let mut functions = Vec::with_capacity(generated.len());
    for (i, (mix, f, _)) in generated.into_iter().enumerate() {
        let file = format!("fn_{i:04}.json");
        write_file(&dir.join(&file), &to_json(&f))?;
        functions.push(ManifestEntry {
            file,
            weights: mix.weights().to_vec(),
            kernels: mix.kernels().to_vec(),
        });
    }
    let manifest = Manifest {
        version: VERSION.to_string(),
        seed: config.seed,
        order: config.order,
        max_kernels: config.max_kernels,
        functions,
    };
    write_file(&dir.join("manifest.json"), &to_json(&manifest))?;
    Ok(manifest)
}
