use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use kdebw::{GridLimits, HernquistParams, KernelFamily, SelectorConfig};

use crate::experiment::Experiment;

#[derive(Debug, Parser)]
#[command(name = "kdebw", version, about = "Data-driven bandwidth selection for compact-kernel density estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a bandwidth for a sample file.
    Select(SelectArgs),
    /// Run a seeded validation experiment against its analytic bandwidth.
    Experiment(ExperimentArgs),
    /// Tabulate a density estimate along a line.
    Density(DensityArgs),
    /// Write a generated sample to a text file.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SelectorFlags {
    /// Relative change of h that ends the iteration.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long = "max-iters", default_value_t = 100)]
    pub max_iters: usize,
    /// Starting bandwidth in units of std · Np^(−1/(4+d)).
    #[arg(long, default_value_t = 2.0)]
    pub c0: f64,
    /// Maximum grid nodes (1D) or cells (3D).
    #[arg(long = "grid-cap", value_parser = parse_count)]
    pub grid_cap: Option<usize>,
}

impl SelectorFlags {
    pub fn config(&self) -> SelectorConfig {
        let mut grid = GridLimits::default();
        if let Some(cap) = self.grid_cap {
            grid.max_nodes_1d = cap;
            grid.max_cells_3d = cap;
        }
        SelectorConfig {
            rel_tolerance: self.tol,
            max_iterations: self.max_iters,
            initial_scale: self.c0,
            grid,
            ..SelectorConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct HernquistFlags {
    /// Hernquist scale length.
    #[arg(long, default_value_t = 1.0)]
    pub rc: f64,
    /// Hernquist total mass.
    #[arg(long, default_value_t = 1.0)]
    pub mt: f64,
    /// Smallest sampled radius in units of the scale length.
    #[arg(long, default_value_t = 0.05)]
    pub rmin: f64,
    /// Largest sampled radius in units of the scale length.
    #[arg(long, default_value_t = 1000.0)]
    pub rmax: f64,
}

impl HernquistFlags {
    pub fn params(&self) -> kdebw::Result<HernquistParams> {
        let p = HernquistParams {
            total_mass: self.mt,
            scale_length: self.rc,
            min_r_over_rc: self.rmin,
            max_r_over_rc: self.rmax,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Sample file with 1 or 3 columns.
    pub input: PathBuf,
    #[arg(long, default_value = "tsc")]
    pub kernel: KernelFamily,
    #[arg(long, default_value_t = 1, value_parser = parse_dimension)]
    pub dim: usize,
    #[command(flatten)]
    pub selector: SelectorFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the full iteration history as JSON.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Report wall_time_ms as 0 so output is byte-reproducible.
    #[arg(long = "no-timings")]
    pub no_timings: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub name: Experiment,
    #[arg(long, default_value = "tsc")]
    pub kernel: KernelFamily,
    /// Sample sizes, comma separated (e.g. 1e3,1e4).
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub np: Vec<usize>,
    /// Seeds, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4, 5])]
    pub seed: Vec<u64>,
    /// Directory for per-run curve tables.
    #[arg(long = "emit-curves")]
    pub emit_curves: Option<PathBuf>,
    #[command(flatten)]
    pub selector: SelectorFlags,
    #[command(flatten)]
    pub hernquist: HernquistFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "no-timings")]
    pub no_timings: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "generator"])))]
#[command(group(ArgGroup::new("bandwidth").required(true).args(["h", "auto"])))]
pub struct DensityArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub generator: Option<Experiment>,
    /// Dimension of the input file.
    #[arg(long, default_value_t = 1, value_parser = parse_dimension)]
    pub dim: usize,
    #[arg(long, default_value_t = 100_000, value_parser = parse_count)]
    pub np: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "tsc")]
    pub kernel: KernelFamily,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Select h from the data first.
    #[arg(long)]
    pub auto: bool,
    /// `LO,HI` along the first axis.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub range: Option<(f64, f64)>,
    #[arg(long)]
    pub step: Option<f64>,
    #[command(flatten)]
    pub selector: SelectorFlags,
    #[command(flatten)]
    pub hernquist: HernquistFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub generator: Experiment,
    #[arg(long, value_parser = parse_count)]
    pub np: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub hernquist: HernquistFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Positive integer, also accepted in scientific notation (`1.05e6`).
pub fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return if n > 0 { Ok(n) } else { Err("must be positive".into()) };
    }
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v >= 1.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(format!("not a positive integer: {s}"))
    }
}

fn parse_dimension(s: &str) -> Result<usize, String> {
    match s {
        "1" => Ok(1),
        "3" => Ok(3),
        _ => Err(format!("dimension must be 1 or 3, got {s}")),
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err("need finite LO < HI".into());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1000"), Ok(1000));
        assert_eq!(parse_count("1.05e6"), Ok(1_050_000));
        assert_eq!(parse_count("1e5"), Ok(100_000));
        assert!(parse_count("0").is_err());
        assert!(parse_count("2.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-5,5"), Ok((-5.0, 5.0)));
        assert!(parse_range("5,-5").is_err());
        assert!(parse_range("1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
