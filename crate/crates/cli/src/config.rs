//! Run configuration: defaults, an optional TOML file, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything a verification run depends on. Reports embed it verbatim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub order: usize,
    pub n_functions: usize,
    pub n_points: usize,
    pub r_max: f64,
    /// Largest number of kernels in a generated mixture.
    pub max_kernels: usize,
    /// Boundary angles for the sup-of-real-part estimate.
    pub sup_theta: usize,
    /// Sphere lattice size for the sup-of-real-part estimate.
    pub sup_sphere: usize,
    /// Highest derivative order in the Borel-Carathéodory derivative family.
    pub n_max: usize,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            order: 32,
            n_functions: 64,
            n_points: 64,
            r_max: 0.9,
            max_kernels: 4,
            sup_theta: 4096,
            sup_sphere: 256,
            n_max: 4,
            tolerances: default_tolerances(),
            output_path: None,
            format: Format::Json,
            workers: None,
        }
    }
}

/// Named tolerances and their defaults.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        // Carathéodory chain and coefficient bound
        ("ct", 1e-9),
        // Borel-Carathéodory with A known in closed form
        ("bct_known", 1e-9),
        // Borel-Carathéodory with A estimated from boundary samples
        ("bct_sampled", 1e-4),
        ("equivalence", 1e-12),
        ("star_oracle", 1e-12),
        ("star_associativity", 1e-12),
        ("conjugate_reverses", 1e-12),
        ("symmetrization", 1e-12),
        ("reciprocal", 1e-10),
        ("leibniz", 1e-12),
        ("subseries_compose", 1e-15),
        ("t_map_geometry", 1e-12),
        ("t_map_inverse", 1e-10),
        ("pointwise_coherence", 1e-12),
        ("split", 1e-12),
        ("mix_positivity", 1e-9),
        ("schwarz", 1e-9),
        ("kernel_equality", 1e-12),
        ("kernel_coefficients", 1e-12),
        ("extremal_law", 1e-12),
        ("averaging", 1e-10),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

impl RunConfig {
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .unwrap_or_else(|| panic!("unknown tolerance {name}"))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(CliError::Config(format!(
                "r_max must lie in (0, 1), got {}",
                self.r_max
            )));
        }
        for (name, value) in [
            ("n_functions", self.n_functions),
            ("n_points", self.n_points),
            ("max_kernels", self.max_kernels),
            ("sup_theta", self.sup_theta),
            ("sup_sphere", self.sup_sphere),
        ] {
            if value == 0 {
                return Err(CliError::Config(format!("{name} must be at least 1")));
            }
        }
        if self.order == 0 {
            return Err(CliError::Config("order must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        for (name, value) in &self.tolerances {
            if !(value.is_finite() && *value >= 0.0) {
                return Err(CliError::Config(format!(
                    "tolerance {name} must be finite and >= 0, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Applies `name=value` tolerance overrides; unknown names are rejected.
    pub fn apply_tolerances(&mut self, overrides: &[String]) -> Result<()> {
        for item in overrides {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("tolerance `{item}` is not of the form name=value")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("tolerance `{item}` has a non-numeric value")))?;
            let name = name.trim();
            if !self.tolerances.contains_key(name) {
                return Err(CliError::Config(format!("unknown tolerance `{name}`")));
            }
            self.tolerances.insert(name.to_string(), value);
        }
        Ok(())
    }
}

/// Optional TOML config file. Any field left out keeps its default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub order: Option<usize>,
    pub n_functions: Option<usize>,
    pub n_points: Option<usize>,
    pub r_max: Option<f64>,
    pub max_kernels: Option<usize>,
    pub sup_theta: Option<usize>,
    pub sup_sphere: Option<usize>,
    pub n_max: Option<usize>,
    pub workers: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(self, config: &mut RunConfig) -> Result<()> {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { config.$field = v; })*
            };
        }
        set!(
            seed,
            order,
            n_functions,
            n_points,
            r_max,
            max_kernels,
            sup_theta,
            sup_sphere,
            n_max
        );
        if self.workers.is_some() {
            config.workers = self.workers;
        }
        if let Some(f) = self.format {
            config.format = f;
        }
        if self.out.is_some() {
            config.output_path = self.out;
        }
        for (name, value) in self.tolerances {
            if !config.tolerances.contains_key(&name) {
                return Err(CliError::Config(format!("unknown tolerance `{name}`")));
            }
            config.tolerances.insert(name, value);
        }
        Ok(())
    }
}
