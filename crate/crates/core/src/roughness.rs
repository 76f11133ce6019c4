//! Roughness functionals `∫ g²` of tabulated derivative fields and the
//! shot-noise corrected estimates of `R(f'')` (1D) and `R(∇²f)` (3D).
//!
//! The noise term comes from treating the tabulated estimate as Poisson
//! counts in cells of size `w·h`. Each squared second difference picks up
//! `6/(w h⁵ N)`. In 3D the three squared axis terms and six cross terms add
//! up to `42/(w³ h⁷ N)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_bandwidth, Result};
use crate::estimator::{
    build_grid_1d, build_grid_3d, laplacian_grid, second_derivative_grid, Grid1D, Grid3D,
    GridLimits,
};
use crate::kernels::{Kernel1D, Kernel3D};
use crate::sample::{Sample1D, Sample3D};

/// Raw and shot-noise corrected roughness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughnessResult {
    pub raw: f64,
    pub correction: f64,
    pub corrected: f64,
}

impl RoughnessResult {
    pub fn new(raw: f64, correction: f64) -> Self {
        Self {
            raw,
            correction,
            corrected: raw - correction,
        }
    }

    /// The bandwidth is too small for the sample: noise dominates.
    pub fn is_negative(&self) -> bool {
        self.corrected <= 0.0
    }
}

const PAIRWISE_BLOCK: usize = 256;

/// Sum of squares with a fixed binary reduction tree.
fn pairwise_sum_squares(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().map(|v| v * v).sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_squares(&values[..mid]) + pairwise_sum_squares(&values[mid..])
}

/// Rectangle rule `Σ vᵢ² Δ` on the grid nodes.
pub fn integrate_squared_1d(grid: &Grid1D) -> f64 {
    pairwise_sum_squares(&grid.values) * grid.spacing
}

pub fn integrate_squared_3d(grid: &Grid3D) -> f64 {
    let s = grid.spacing;
    pairwise_sum_squares(&grid.values) * (s * s * s)
}

/// `6 / (w h⁵ N)`.
pub fn noise_correction_1d(kernel: &Kernel1D, h: f64, n: usize) -> f64 {
    6.0 / (kernel.width * h.powi(5) * n as f64)
}

/// `42 / (w³ h⁷ N)`.
pub fn noise_correction_3d(kernel: &Kernel3D, h: f64, n: usize) -> f64 {
    42.0 / (kernel.width.powi(3) * h.powi(7) * n as f64)
}

pub fn corrected_roughness_1d(
    sample: &Sample1D,
    kernel: &Kernel1D,
    h: f64,
    limits: &GridLimits,
) -> Result<RoughnessResult> {
    check_bandwidth(h)?;
    let density = build_grid_1d(sample, kernel, h, limits)?;
    let curvature = second_derivative_grid(&density)?;
    let raw = integrate_squared_1d(&curvature);
    Ok(RoughnessResult::new(
        raw,
        noise_correction_1d(kernel, h, sample.len()),
    ))
}

pub fn corrected_roughness_3d(
    sample: &Sample3D,
    kernel: &Kernel3D,
    h: f64,
    limits: &GridLimits,
) -> Result<RoughnessResult> {
    check_bandwidth(h)?;
    let density = build_grid_3d(sample, kernel, h, limits)?;
    let lap = laplacian_grid(&density)?;
    let raw = integrate_squared_3d(&lap);
    Ok(RoughnessResult::new(
        raw,
        noise_correction_3d(kernel, h, sample.len()),
    ))
}
