use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use slicereg::Quaternion;

use crate::commands::{
    cmd_check_bct, cmd_check_ct, cmd_check_identities, cmd_eval, cmd_gen, cmd_recip, cmd_star, parse_quaternion,
};
use crate::config::{ConfigFile, Format, RunConfig};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "slicereg",
    version,
    about = "Slice-regular quaternionic series: algebra and inequality checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write random kernel mixtures as series files plus a manifest.
    Gen(CommonArgs),
    /// Regular product of two series files.
    Star {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Regular reciprocal of a series file.
    Recip {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate a series file at a quaternion `x0,x1,x2,x3`.
    Eval {
        input: PathBuf,
        #[arg(long, value_parser = parse_quaternion, allow_hyphen_values = true)]
        q: Quaternion,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Carathéodory bounds over generated mixtures or `--input` files.
    CheckCt {
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Borel-Carathéodory bounds over generated families or `--input` files.
    CheckBct {
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Algebraic and geometric identities of the series operations.
    CheckIdentities(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub n_functions: Option<usize>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub max_kernels: Option<usize>,
    #[arg(long)]
    pub sup_theta: Option<usize>,
    #[arg(long)]
    pub sup_sphere: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Override a named tolerance, e.g. `--tol ct=1e-8`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Output file (a directory for `gen`). Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with any of the above; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            ConfigFile::load(path)?.apply(&mut config)?;
        }
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
            config.output_path = self.out.clone();
        }
        config.apply_tolerances(&self.tol)?;
        config.validate()?;
        Ok(config)
    }
}

/// Runs one command. `Ok(false)` means a margin or identity was violated.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(common) => {
            let config = common.resolve()?;
            let manifest = cmd_gen(&config)?;
            eprintln!("gen: wrote {} series", manifest.functions.len());
            Ok(true)
        }
        Command::Star { left, right, common } => {
            cmd_star(&common.resolve()?, &left, &right)?;
            Ok(true)
        }
        Command::Recip { input, common } => {
            cmd_recip(&common.resolve()?, &input)?;
            Ok(true)
        }
        Command::Eval { input, q, common } => {
            cmd_eval(&common.resolve()?, &input, q)?;
            Ok(true)
        }
        Command::CheckCt { inputs, common } => {
            let outcome = cmd_check_ct(&common.resolve()?, &inputs)?;
            eprintln!("{}", outcome.summary("check-ct"));
            Ok(outcome.passed)
        }
        Command::CheckBct { inputs, common } => {
            let outcome = cmd_check_bct(&common.resolve()?, &inputs)?;
            eprintln!("{}", outcome.summary("check-bct"));
            Ok(outcome.passed)
        }
        Command::CheckIdentities(common) => {
            let (passed, results) = cmd_check_identities(&common.resolve()?)?;
            for r in results.iter().filter(|r| !r.passed) {
                eprintln!(
                    "check-identities: {} failed, worst residual {:e} (excess {:e} > tolerance {:e})",
                    r.name, r.worst_residual, r.worst_excess, r.tolerance
                );
            }
            eprintln!("check-identities: {}", if passed { "PASS" } else { "FAIL" });
            Ok(passed)
        }
    }
}
