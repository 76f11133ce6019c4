//! AMISE-optimal bandwidth formulae and the data-driven fixed-point search.
//!
//! The search alternates two steps: estimate the corrected roughness of the
//! sample density at the current bandwidth, then substitute it into the
//! closed-form optimum. It stops once the proposed bandwidth is within a
//! relative tolerance of the bandwidth the roughness was measured at.

use serde::{Deserialize, Serialize};

use crate::error::{check_bandwidth, KdeError, Result};
use crate::estimator::GridLimits;
use crate::kernels::{Kernel1D, Kernel3D};
use crate::roughness::{corrected_roughness_1d, corrected_roughness_3d, RoughnessResult};
use crate::sample::{Sample1D, Sample3D};

/// Iteration policy for [`select_bandwidth_1d`] and [`select_bandwidth_3d`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    /// Stop when `|h_new − h|/h` is at most this.
    pub rel_tolerance: f64,
    /// Cap on formula updates (backoffs are counted separately).
    pub max_iterations: usize,
    /// Start at `c₀ · std · N^(−1/(4+d))`.
    pub initial_scale: f64,
    /// Factor applied to `h` when the corrected roughness is not positive.
    pub backoff_factor: f64,
    pub max_backoffs: usize,
    /// Switch to geometric-mean updates once the iterates start alternating
    /// around the fixed point without contracting.
    pub damp_oscillations: bool,
    pub grid: GridLimits,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-3,
            max_iterations: 100,
            initial_scale: 2.0,
            backoff_factor: 2.0,
            max_backoffs: 60,
            damp_oscillations: true,
            grid: GridLimits::default(),
        }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(KdeError::InvalidConfig(what.to_string()));
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance < 1.0) {
            return bad("rel_tolerance must lie in (0, 1)");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.initial_scale > 0.0 && self.initial_scale.is_finite()) {
            return bad("initial_scale must be positive");
        }
        if !(self.backoff_factor > 1.0 && self.backoff_factor.is_finite()) {
            return bad("backoff_factor must exceed 1");
        }
        if self.max_backoffs == 0 {
            return bad("max_backoffs must be positive");
        }
        if self.grid.max_nodes_1d < 3 || self.grid.max_cells_3d < 27 {
            return bad("grid caps are too small");
        }
        Ok(())
    }
}

/// One roughness evaluation of the search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Bandwidth the roughness was measured at.
    pub h: f64,
    pub raw_roughness: f64,
    pub correction: f64,
    pub corrected_roughness: f64,
    /// Closed-form optimum for the measured roughness; absent on backoff.
    pub proposed_h: Option<f64>,
    pub backoff_applied: bool,
    /// The next bandwidth is `√(h · proposed_h)` instead of `proposed_h`.
    pub damped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandwidthTrace {
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    /// On convergence, the `h` of the last record. Otherwise the evaluated
    /// bandwidth with the smallest fixed-point residual.
    pub final_h: f64,
}

impl BandwidthTrace {
    pub fn backoffs(&self) -> usize {
        self.iterations.iter().filter(|r| r.backoff_applied).count()
    }

    pub fn updates(&self) -> usize {
        self.iterations.len() - self.backoffs()
    }

    /// `|proposed − h|/h` of the last non-backoff record.
    pub fn final_residual(&self) -> Option<f64> {
        self.iterations
            .iter()
            .rev()
            .find_map(|r| r.proposed_h.map(|p| (p - r.h).abs() / r.h))
    }
}

fn check_roughness(roughness: f64) -> Result<()> {
    if roughness > 0.0 && roughness.is_finite() {
        Ok(())
    } else {
        Err(KdeError::NonPositiveRoughness(roughness))
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(KdeError::InvalidConfig("sample size must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `h = [R(K) / (R(f'') μ₂²)]^(1/5) N^(−1/5)`.
pub fn optimal_bandwidth_1d(roughness_f2: f64, kernel: &Kernel1D, n: usize) -> Result<f64> {
    check_roughness(roughness_f2)?;
    check_count(n)?;
    let mu2 = kernel.second_moment;
    let scale = (kernel.roughness / (roughness_f2 * mu2 * mu2)).powf(0.2);
    Ok(scale * (n as f64).powf(-0.2))
}

/// `h = [3 R(K₃) / (R(∇²f) μ₂²)]^(1/7) N^(−1/7)`.
pub fn optimal_bandwidth_3d(roughness_lap: f64, kernel: &Kernel3D, n: usize) -> Result<f64> {
    check_roughness(roughness_lap)?;
    check_count(n)?;
    let mu2 = kernel.second_moment;
    let scale = (3.0 * kernel.roughness / (roughness_lap * mu2 * mu2)).powf(1.0 / 7.0);
    Ok(scale * (n as f64).powf(-1.0 / 7.0))
}

/// Asymptotic MISE: variance term `R(K)/(hN)` plus squared bias `h⁴ R(f'') (μ₂/2)²`.
pub fn amise_1d(h: f64, kernel: &Kernel1D, roughness_f2: f64, n: usize) -> Result<f64> {
    check_bandwidth(h)?;
    check_count(n)?;
    let half_mu2 = 0.5 * kernel.second_moment;
    Ok(kernel.roughness / (h * n as f64) + h.powi(4) * roughness_f2 * half_mu2 * half_mu2)
}

fn fixed_point(
    h0: f64,
    config: &SelectorConfig,
    mut measure: impl FnMut(f64) -> Result<RoughnessResult>,
    formula: impl Fn(f64) -> Result<f64>,
) -> Result<BandwidthTrace> {
    config.validate()?;
    check_bandwidth(h0)?;

    let mut iterations = Vec::new();
    let mut h = h0;
    let mut backoffs = 0usize;
    let mut updates = 0usize;
    let mut best: Option<(f64, f64)> = None;
    let mut last_step: Option<f64> = None;
    let mut damping = false;

    loop {
        let r = measure(h)?;
        if r.is_negative() {
            iterations.push(IterationRecord {
                h,
                raw_roughness: r.raw,
                correction: r.correction,
                corrected_roughness: r.corrected,
                proposed_h: None,
                backoff_applied: true,
                damped: false,
            });
            backoffs += 1;
            if backoffs > config.max_backoffs {
                return Err(KdeError::BackoffExhausted(config.max_backoffs));
            }
            h *= config.backoff_factor;
            check_bandwidth(h)?;
            last_step = None;
            continue;
        }

        let proposal = formula(r.corrected)?;
        let residual = (proposal - h).abs() / h;
        match best {
            Some((res, _)) if res <= residual => {}
            _ => best = Some((residual, h)),
        }
        let mut record = IterationRecord {
            h,
            raw_roughness: r.raw,
            correction: r.correction,
            corrected_roughness: r.corrected,
            proposed_h: Some(proposal),
            backoff_applied: false,
            damped: false,
        };

        if residual <= config.rel_tolerance {
            iterations.push(record);
            return Ok(BandwidthTrace {
                iterations,
                converged: true,
                final_h: h,
            });
        }
        updates += 1;
        if updates >= config.max_iterations {
            iterations.push(record);
            let (_, best_h) = best.expect("at least one update was evaluated");
            return Ok(BandwidthTrace {
                iterations,
                converged: false,
                final_h: best_h,
            });
        }

        let step = proposal - h;
        if config.damp_oscillations {
            if let Some(prev) = last_step {
                if prev.signum() != step.signum() && step.abs() > 0.5 * prev.abs() {
                    damping = true;
                }
            }
        }
        last_step = Some(step);
        record.damped = damping;
        iterations.push(record);
        h = if damping { (h * proposal).sqrt() } else { proposal };
    }
}

pub fn initial_bandwidth_1d(sample: &Sample1D, config: &SelectorConfig) -> f64 {
    config.initial_scale * sample.std() * (sample.len() as f64).powf(-0.2)
}

pub fn initial_bandwidth_3d(sample: &Sample3D, config: &SelectorConfig) -> f64 {
    config.initial_scale * sample.std() * (sample.len() as f64).powf(-1.0 / 7.0)
}

pub fn select_bandwidth_1d(
    sample: &Sample1D,
    kernel: &Kernel1D,
    config: &SelectorConfig,
) -> Result<BandwidthTrace> {
    sample.check_selectable()?;
    let n = sample.len();
    fixed_point(
        initial_bandwidth_1d(sample, config),
        config,
        |h| corrected_roughness_1d(sample, kernel, h, &config.grid),
        |r| optimal_bandwidth_1d(r, kernel, n),
    )
}

pub fn select_bandwidth_3d(
    sample: &Sample3D,
    kernel: &Kernel3D,
    config: &SelectorConfig,
) -> Result<BandwidthTrace> {
    sample.check_selectable()?;
    let n = sample.len();
    fixed_point(
        initial_bandwidth_3d(sample, config),
        config,
        |h| corrected_roughness_3d(sample, kernel, h, &config.grid),
        |r| optimal_bandwidth_3d(r, kernel, n),
    )
}
