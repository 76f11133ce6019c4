//! Analytic test densities, their curvature roughness and the resulting
//! AMISE-optimal bandwidths, used to score the data-driven selector.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{KdeError, Result};
use crate::kernels::{Kernel1D, Kernel3D, KernelFamily};
use crate::quad;
use crate::samplers::{HernquistParams, TRIMODAL_COMPONENTS};
use crate::selector::{optimal_bandwidth_1d, optimal_bandwidth_3d};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    INV_SQRT_2PI / sd * (-0.5 * z * z).exp()
}

#[inline]
fn normal_pdf_d2(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (z * z - 1.0) / (sd * sd) * normal_pdf(x, mean, sd)
}

/// Univariate test densities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AnalyticDensity1D {
    Gaussian,
    /// The TSC kernel shape used as a density.
    TscDensity,
    /// Equal-weight mixture of the three normal components.
    Trimodal,
    /// Radius distribution `2 r_c r / (r_c + r)³` of the untruncated Hernquist model.
    HernquistRadial { scale_length: f64 },
    /// Radius distribution renormalized to the window of the parameters.
    HernquistTruncated(HernquistParams),
}

impl AnalyticDensity1D {
    fn radial_check(&self, r: f64) -> Result<()> {
        if r < 0.0 {
            Err(KdeError::Domain(format!("radius must be non-negative, got {r}")))
        } else {
            Ok(())
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(
            self,
            AnalyticDensity1D::HernquistRadial { .. } | AnalyticDensity1D::HernquistTruncated(_)
        )
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            AnalyticDensity1D::Gaussian => Ok(normal_pdf(x, 0.0, 1.0)),
            AnalyticDensity1D::TscDensity => Ok(KernelFamily::Tsc.profile(x)),
            AnalyticDensity1D::Trimodal => Ok(TRIMODAL_COMPONENTS
                .iter()
                .map(|&(m, s)| normal_pdf(x, m, s))
                .sum::<f64>()
                / 3.0),
            AnalyticDensity1D::HernquistRadial { scale_length } => {
                self.radial_check(x)?;
                Ok(hernquist_radial_pdf(x, scale_length))
            }
            AnalyticDensity1D::HernquistTruncated(p) => {
                self.radial_check(x)?;
                if x < p.r_min() || x > p.r_max() {
                    Ok(0.0)
                } else {
                    Ok(hernquist_radial_pdf(x, p.scale_length) / p.window_mass())
                }
            }
        }
    }

    /// `f''(x)`; for the TSC density the one-sided value at the joins.
    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        match *self {
            AnalyticDensity1D::Gaussian => Ok(normal_pdf_d2(x, 0.0, 1.0)),
            AnalyticDensity1D::TscDensity => {
                let a = x.abs();
                Ok(if a < 0.5 {
                    -2.0
                } else if a < 1.5 {
                    1.0
                } else {
                    0.0
                })
            }
            AnalyticDensity1D::Trimodal => Ok(TRIMODAL_COMPONENTS
                .iter()
                .map(|&(m, s)| normal_pdf_d2(x, m, s))
                .sum::<f64>()
                / 3.0),
            AnalyticDensity1D::HernquistRadial { scale_length } => {
                self.radial_check(x)?;
                Ok(hernquist_radial_pdf_d2(x, scale_length))
            }
            AnalyticDensity1D::HernquistTruncated(p) => {
                self.radial_check(x)?;
                if x < p.r_min() || x > p.r_max() {
                    Ok(0.0)
                } else {
                    Ok(hernquist_radial_pdf_d2(x, p.scale_length) / p.window_mass())
                }
            }
        }
    }
}

fn hernquist_radial_pdf(r: f64, rc: f64) -> f64 {
    2.0 * rc * r / (rc + r).powi(3)
}

fn hernquist_radial_pdf_d2(r: f64, rc: f64) -> f64 {
    let s = r / rc;
    12.0 * (s - 1.0) / (1.0 + s).powi(5) / (rc * rc * rc)
}

/// Antiderivative of `144 (t − 2)² / t¹⁰` in `t = 1 + r/r_c`; zero at infinity.
fn hernquist_d2_squared_antiderivative(t: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let inv = 1.0 / t;
    let i7 = inv.powi(7);
    144.0 * i7 * (-1.0 / 7.0 + inv / 2.0 - 4.0 * inv * inv / 9.0)
}

pub fn eval_density(density: &AnalyticDensity1D, x: f64) -> Result<f64> {
    density.eval(x)
}

/// `R(f'') = ∫ f''(x)² dx`.
pub fn analytic_roughness_1d(density: &AnalyticDensity1D) -> f64 {
    match *density {
        AnalyticDensity1D::Gaussian => 3.0 / (8.0 * PI.sqrt()),
        AnalyticDensity1D::TscDensity => 6.0,
        AnalyticDensity1D::Trimodal => quad::integrate_pieces(
            |x| {
                let d2 = density.second_derivative(x).unwrap_or(0.0);
                d2 * d2
            },
            &[-40.0, -12.0, -6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 12.0, 40.0],
            1e-15,
            1e-12,
        ),
        AnalyticDensity1D::HernquistRadial { scale_length } => {
            88.0 / 7.0 / scale_length.powi(5)
        }
        AnalyticDensity1D::HernquistTruncated(p) => {
            let a = hernquist_d2_squared_antiderivative(1.0 + p.min_r_over_rc);
            let b = hernquist_d2_squared_antiderivative(1.0 + p.max_r_over_rc);
            let z = p.window_mass();
            (b - a) / (z * z * p.scale_length.powi(5))
        }
    }
}

/// Three-dimensional test densities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnalyticDensity3D {
    Gaussian,
}

impl AnalyticDensity3D {
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        match self {
            AnalyticDensity3D::Gaussian => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                (-0.5 * r2).exp() / (2.0 * PI).powf(1.5)
            }
        }
    }

    pub fn laplacian(&self, x: [f64; 3]) -> f64 {
        match self {
            AnalyticDensity3D::Gaussian => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                (r2 - 3.0) * self.eval(x)
            }
        }
    }

    pub fn roughness(&self) -> f64 {
        match self {
            AnalyticDensity3D::Gaussian => analytic_roughness_3d_gaussian(),
        }
    }
}

/// `R(∇²f)` of the standard normal in 3D: `(2π)⁻³ ∫ (r² − 3)² e^(−r²) 4π r² dr`,
/// which the Gaussian moments reduce to `15 / (32 π^(3/2))`.
pub fn analytic_roughness_3d_gaussian() -> f64 {
    15.0 / (32.0 * PI.powf(1.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AnalyticDensity {
    OneD(AnalyticDensity1D),
    ThreeD(AnalyticDensity3D),
}

impl AnalyticDensity {
    pub fn dimension(&self) -> usize {
        match self {
            AnalyticDensity::OneD(_) => 1,
            AnalyticDensity::ThreeD(_) => 3,
        }
    }
}

pub fn analytic_optimal_bandwidth_1d(density: &AnalyticDensity1D, kernel: &Kernel1D, n: usize) -> Result<f64> {
    optimal_bandwidth_1d(analytic_roughness_1d(density), kernel, n)
}

pub fn analytic_optimal_bandwidth_3d(density: &AnalyticDensity3D, kernel: &Kernel3D, n: usize) -> Result<f64> {
    optimal_bandwidth_3d(density.roughness(), kernel, n)
}

/// Optimal bandwidth for `density`, using the kernel of matching dimension.
pub fn analytic_optimal_bandwidth(density: &AnalyticDensity, family: KernelFamily, n: usize) -> Result<f64> {
    match density {
        AnalyticDensity::OneD(d) => analytic_optimal_bandwidth_1d(d, &Kernel1D::new(family), n),
        AnalyticDensity::ThreeD(d) => analytic_optimal_bandwidth_3d(d, &Kernel3D::new(family), n),
    }
}

/// Mass density `ρ(r) = M r_c / (2π r (r_c + r)³)`.
pub fn hernquist_profile(r: f64, params: &HernquistParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(KdeError::Domain(format!("profile diverges at r ≤ 0 (got {r})")));
    }
    let rc = params.scale_length;
    Ok(params.total_mass / (2.0 * PI) * rc / r / (rc + r).powi(3))
}

/// Converts a radius pdf value to mass density: `ρ = M f(r) / (4π r²)`.
pub fn profile_from_radial_pdf(pdf_value: f64, r: f64, total_mass: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(KdeError::Domain(format!("radius must be positive, got {r}")));
    }
    Ok(total_mass * pdf_value / (4.0 * PI * r * r))
}
