//! Particle-mesh mass-assignment functions used as density kernels.
//!
//! The three 1D shapes are the nearest-grid-point box, the cloud-in-cell
//! triangle and the triangular-shaped-cloud quadratic spline. Each has
//! compact support of total length `w` (1, 2 and 3 respectively), which the
//! shot-noise correction of the roughness estimate depends on.
//!
//! The 3D kernels replace `|x|` by `r = |x|` and rescale so that the kernel
//! integrates to one over space.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::KdeError;

/// Kernel shape, shared by the 1D kernels and their radial 3D versions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Ngp,
    Cic,
    Tsc,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 3] = [KernelFamily::Ngp, KernelFamily::Cic, KernelFamily::Tsc];

    /// Length of the support in kernel units.
    pub fn width(self) -> f64 {
        match self {
            KernelFamily::Ngp => 1.0,
            KernelFamily::Cic => 2.0,
            KernelFamily::Tsc => 3.0,
        }
    }

    /// Unnormalized 1D profile. Boundary points belong to the support,
    /// and for TSC the first branch takes `|u| = 1/2` (both branches agree there).
    #[inline]
    pub fn profile(self, u: f64) -> f64 {
        let a = u.abs();
        match self {
            KernelFamily::Ngp => {
                if a <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelFamily::Cic => {
                if a <= 1.0 {
                    1.0 - a
                } else {
                    0.0
                }
            }
            KernelFamily::Tsc => {
                if a <= 0.5 {
                    0.75 - a * a
                } else if a <= 1.5 {
                    let t = 1.5 - a;
                    0.5 * t * t
                } else {
                    0.0
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KernelFamily::Ngp => "ngp",
            KernelFamily::Cic => "cic",
            KernelFamily::Tsc => "tsc",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelFamily {
    type Err = KdeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ngp" => Ok(KernelFamily::Ngp),
            "cic" => Ok(KernelFamily::Cic),
            "tsc" => Ok(KernelFamily::Tsc),
            other => Err(KdeError::InvalidConfig(format!(
                "unknown kernel '{other}', expected one of ngp, cic, tsc"
            ))),
        }
    }
}

/// A univariate kernel with the constants entering the AMISE formulae.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel1D {
    pub family: KernelFamily,
    /// Support length `w`.
    pub width: f64,
    /// `∫ K(u)² du`.
    pub roughness: f64,
    /// `∫ u² K(u) du`.
    pub second_moment: f64,
}

impl Kernel1D {
    pub fn new(family: KernelFamily) -> Self {
        kernel_constants_1d(family)
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.family.profile(u)
    }

    /// Half the support length.
    #[inline]
    pub fn radius(&self) -> f64 {
        0.5 * self.width
    }
}

pub fn kernel_constants_1d(family: KernelFamily) -> Kernel1D {
    let (roughness, second_moment) = match family {
        KernelFamily::Ngp => (1.0, 1.0 / 12.0),
        KernelFamily::Cic => (2.0 / 3.0, 1.0 / 6.0),
        KernelFamily::Tsc => (11.0 / 20.0, 1.0 / 4.0),
    };
    Kernel1D {
        family,
        width: family.width(),
        roughness,
        second_moment,
    }
}

#[inline]
pub fn eval_kernel_1d(kernel: &Kernel1D, u: f64) -> f64 {
    kernel.eval(u)
}

/// Radially symmetric 3D kernel `K₃(x) = c · W(|x|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel3D {
    pub family: KernelFamily,
    /// Support diameter, equal to the 1D width.
    pub width: f64,
    /// Prefactor `c` making the kernel integrate to one.
    pub normalization: f64,
    /// `∫ K₃(x)² dx`.
    pub roughness: f64,
    /// `∫ x₁² K₃(x) dx`.
    pub second_moment: f64,
}

impl Kernel3D {
    pub fn new(family: KernelFamily) -> Self {
        kernel_constants_3d(family)
    }

    #[inline]
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.eval_radial((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
    }

    #[inline]
    pub fn eval_radial(&self, r: f64) -> f64 {
        self.normalization * self.family.profile(r)
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        0.5 * self.width
    }
}

pub fn kernel_constants_3d(family: KernelFamily) -> Kernel3D {
    let (normalization, roughness, second_moment) = match family {
        KernelFamily::Ngp => (6.0 / PI, 6.0 / PI, 1.0 / 20.0),
        KernelFamily::Cic => (3.0 / PI, 6.0 / (5.0 * PI), 2.0 / 15.0),
        KernelFamily::Tsc => (2.0 / PI, 43.0 / (70.0 * PI), 13.0 / 60.0),
    };
    Kernel3D {
        family,
        width: family.width(),
        normalization,
        roughness,
        second_moment,
    }
}

#[inline]
pub fn eval_kernel_3d(kernel: &Kernel3D, x: [f64; 3]) -> f64 {
    kernel.eval(x)
}
