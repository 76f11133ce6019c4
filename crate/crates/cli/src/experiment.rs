//! The reproducible test problems: how to draw each sample and which
//! analytic density it is scored against.

use std::time::Instant;

use clap::ValueEnum;
use kdebw::reference::{analytic_optimal_bandwidth, hernquist_profile, profile_from_radial_pdf};
use kdebw::samplers::{
    sample_gaussian_1d, sample_gaussian_3d, sample_hernquist_radii, sample_trimodal,
    sample_tsc_density,
};
use kdebw::{
    estimate_density_1d, estimate_density_3d, select_bandwidth_1d, select_bandwidth_3d,
    AnalyticDensity, AnalyticDensity1D, AnalyticDensity3D, BandwidthTrace, HernquistParams,
    Kernel1D, Kernel3D, KernelFamily, RngSeed, Sample1D, Sample3D, SelectorConfig, RNG_NAME,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::CurveTable;
use crate::report::{Aggregate, ExperimentDocument, ExperimentReport, ExternalReference};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Gauss1d,
    Tscdens1d,
    Trimodal,
    Gauss3d,
    Hernquist,
}

pub enum SampleData {
    OneD(Sample1D),
    ThreeD(Sample3D),
}

impl SampleData {
    pub fn len(&self) -> usize {
        match self {
            SampleData::OneD(s) => s.len(),
            SampleData::ThreeD(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dimension(&self) -> usize {
        match self {
            SampleData::OneD(_) => 1,
            SampleData::ThreeD(_) => 3,
        }
    }

    pub fn select(&self, family: KernelFamily, config: &SelectorConfig) -> kdebw::Result<BandwidthTrace> {
        match self {
            SampleData::OneD(s) => select_bandwidth_1d(s, &Kernel1D::new(family), config),
            SampleData::ThreeD(s) => select_bandwidth_3d(s, &Kernel3D::new(family), config),
        }
    }

    /// Density estimate along the first axis (the other coordinates held at 0 in 3D).
    pub fn estimate_on_axis(&self, family: KernelFamily, h: f64, xs: &[f64]) -> kdebw::Result<Vec<f64>> {
        match self {
            SampleData::OneD(s) => estimate_density_1d(s, &Kernel1D::new(family), h, xs),
            SampleData::ThreeD(s) => {
                let queries: Vec<[f64; 3]> = xs.iter().map(|&x| [x, 0.0, 0.0]).collect();
                estimate_density_3d(s, &Kernel3D::new(family), h, &queries)
            }
        }
    }
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Gauss1d => "gauss1d",
            Experiment::Tscdens1d => "tscdens1d",
            Experiment::Trimodal => "trimodal",
            Experiment::Gauss3d => "gauss3d",
            Experiment::Hernquist => "hernquist",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Experiment::Gauss3d => 3,
            _ => 1,
        }
    }

    pub fn default_sizes(self) -> Vec<usize> {
        match self.dimension() {
            3 => vec![1_000, 10_000, 100_000],
            _ => vec![1_000, 10_000, 100_000, 1_000_000],
        }
    }

    pub fn generate(self, n: usize, seed: RngSeed, params: &HernquistParams) -> kdebw::Result<SampleData> {
        Ok(match self {
            Experiment::Gauss1d => SampleData::OneD(sample_gaussian_1d(n, seed)?),
            Experiment::Tscdens1d => SampleData::OneD(sample_tsc_density(n, seed)?),
            Experiment::Trimodal => SampleData::OneD(sample_trimodal(n, seed)?),
            Experiment::Gauss3d => SampleData::ThreeD(sample_gaussian_3d(n, seed)?),
            Experiment::Hernquist => SampleData::OneD(sample_hernquist_radii(n, params, seed)?),
        })
    }

    pub fn density(self, params: &HernquistParams) -> AnalyticDensity {
        match self {
            Experiment::Gauss1d => AnalyticDensity::OneD(AnalyticDensity1D::Gaussian),
            Experiment::Tscdens1d => AnalyticDensity::OneD(AnalyticDensity1D::TscDensity),
            Experiment::Trimodal => AnalyticDensity::OneD(AnalyticDensity1D::Trimodal),
            Experiment::Gauss3d => AnalyticDensity::ThreeD(AnalyticDensity3D::Gaussian),
            Experiment::Hernquist => AnalyticDensity::OneD(AnalyticDensity1D::HernquistTruncated(*params)),
        }
    }

    /// Default `(lo, hi, step)` for curve tables.
    pub fn curve_range(self, params: &HernquistParams) -> (f64, f64, f64) {
        match self {
            Experiment::Gauss1d | Experiment::Gauss3d => (-5.0, 5.0, 0.01),
            Experiment::Tscdens1d => (-2.0, 2.0, 0.005),
            Experiment::Trimodal => (-12.0, 10.0, 0.01),
            Experiment::Hernquist => (params.r_min(), 20.0 * params.scale_length, 0.01 * params.scale_length),
        }
    }

    /// Published values for the Hernquist run. Scale length and radial
    /// window behind them are unknown, so they are informational only.
    pub fn external_reference(self) -> Option<ExternalReference> {
        match self {
            Experiment::Hernquist => Some(ExternalReference {
                sample_size: 1_050_000,
                analytic_h: 0.1712,
                selected_h: 0.1678,
                relative_error: -0.019,
                note: "published values; scale length and radial window not stated, not asserted".into(),
            }),
            _ => None,
        }
    }
}

/// Analytic `f` at `x` along the first axis, if the density is defined there.
pub fn analytic_on_axis(density: &AnalyticDensity, x: f64) -> Option<f64> {
    match density {
        AnalyticDensity::OneD(d) => d.eval(x).ok(),
        AnalyticDensity::ThreeD(d) => Some(d.eval([x, 0.0, 0.0])),
    }
}

pub fn axis_nodes(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize + 1;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

/// `x, f̂, f` columns; radii get the mass-density pair `ρ̂, ρ` as well.
pub fn curve_table(
    sample: &SampleData,
    family: KernelFamily,
    h: f64,
    xs: &[f64],
    density: Option<&AnalyticDensity>,
    hernquist: Option<&HernquistParams>,
) -> kdebw::Result<CurveTable> {
    let estimate = sample.estimate_on_axis(family, h, xs)?;
    let mut columns = vec!["x", "f_hat", "f"];
    if hernquist.is_some() {
        columns[0] = "r";
        columns.extend(["rho_hat", "rho"]);
    }
    let mut table = CurveTable::new(&columns);
    for (&x, &fh) in xs.iter().zip(&estimate) {
        let f = density.and_then(|d| analytic_on_axis(d, x));
        let mut row = vec![Some(x), Some(fh), f];
        if let Some(p) = hernquist {
            // the sample only carries the mass inside the radial window
            let mass = p.total_mass * p.window_mass();
            row.push(profile_from_radial_pdf(fh, x, mass).ok());
            row.push(hernquist_profile(x, p).ok());
        }
        table.push(row);
    }
    Ok(table)
}

#[derive(Clone, Debug)]
pub struct ExperimentOptions {
    pub experiment: Experiment,
    pub family: KernelFamily,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub config: SelectorConfig,
    pub hernquist: HernquistParams,
    pub timings: bool,
    pub curves: bool,
}

impl ExperimentOptions {
    pub fn new(experiment: Experiment, family: KernelFamily) -> Self {
        Self {
            experiment,
            family,
            sizes: experiment.default_sizes(),
            seeds: (1..=5).collect(),
            config: SelectorConfig::default(),
            hernquist: HernquistParams::default(),
            timings: true,
            curves: false,
        }
    }
}

pub struct RunOutcome {
    pub report: ExperimentReport,
    pub trace: BandwidthTrace,
    pub curve: Option<CurveTable>,
}

pub fn experiment_id(experiment: Experiment, family: KernelFamily, n: usize, seed: u64) -> String {
    format!("{}/{}/np={}/seed={}", experiment.as_str(), family.as_str(), n, seed)
}

pub fn run_one(options: &ExperimentOptions, n: usize, seed: u64) -> anyhow::Result<RunOutcome> {
    let exp = options.experiment;
    let sample = exp.generate(n, RngSeed(seed), &options.hernquist)?;
    let density = exp.density(&options.hernquist);
    let analytic_h = analytic_optimal_bandwidth(&density, options.family, n)?;

    let start = Instant::now();
    let trace = sample.select(options.family, &options.config)?;
    let elapsed = start.elapsed().as_millis() as u64;

    let curve = if options.curves {
        let (lo, hi, step) = exp.curve_range(&options.hernquist);
        let hq = (exp == Experiment::Hernquist).then_some(&options.hernquist);
        Some(curve_table(
            &sample,
            options.family,
            trace.final_h,
            &axis_nodes(lo, hi, step),
            Some(&density),
            hq,
        )?)
    } else {
        None
    };

    let report = ExperimentReport {
        experiment_id: experiment_id(exp, options.family, n, seed),
        kernel: options.family.as_str().to_string(),
        np: n,
        seed,
        selected_h: trace.final_h,
        analytic_h: Some(analytic_h),
        relative_error: Some((trace.final_h - analytic_h) / analytic_h),
        iterations: trace.updates(),
        backoffs: trace.backoffs(),
        converged: trace.converged,
        wall_time_ms: if options.timings { elapsed } else { 0 },
        rng_name: RNG_NAME.to_string(),
    };
    Ok(RunOutcome { report, trace, curve })
}

/// Runs every `(Np, seed)` pair; results are ordered by `(Np, seed)`.
pub fn run_experiment(options: &ExperimentOptions) -> anyhow::Result<Vec<RunOutcome>> {
    let mut pairs: Vec<(usize, u64)> = options
        .sizes
        .iter()
        .flat_map(|&n| options.seeds.iter().map(move |&s| (n, s)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
        .par_iter()
        .map(|&(n, seed)| run_one(options, n, seed))
        .collect()
}

pub fn document(options: &ExperimentOptions, runs: &[RunOutcome]) -> ExperimentDocument {
    let reports: Vec<ExperimentReport> = runs.iter().map(|r| r.report.clone()).collect();
    ExperimentDocument {
        experiment: options.experiment.as_str().to_string(),
        kernel: options.family.as_str().to_string(),
        dimension: options.experiment.dimension(),
        rng_name: RNG_NAME.to_string(),
        aggregates: Aggregate::per_size(&reports),
        reports,
        external_reference: options.experiment.external_reference(),
    }
}
