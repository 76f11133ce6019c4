//! Kernel density estimation with a fully data-driven bandwidth.
//!
//! Particle-mesh mass-assignment shapes (NGP, CIC, TSC) serve as compact
//! kernels. The bandwidth comes from iterating the AMISE-optimal formula,
//! with the unknown curvature roughness estimated from the sample's own
//! density and corrected for shot noise. Both univariate and
//! three-dimensional samples are supported.
//!
//! ```
//! use kdebw::{samplers, select_bandwidth_1d, Kernel1D, KernelFamily, RngSeed, SelectorConfig};
//!
//! let sample = samplers::sample_gaussian_1d(20_000, RngSeed(1)).unwrap();
//! let kernel = Kernel1D::new(KernelFamily::Tsc);
//! let trace = select_bandwidth_1d(&sample, &kernel, &SelectorConfig::default()).unwrap();
//! assert!(trace.converged);
//! ```

pub mod error;
pub mod estimator;
pub mod kernels;
pub mod quad;
pub mod reference;
pub mod roughness;
pub mod sample;
pub mod samplers;
pub mod selector;

pub use error::{KdeError, Result};
pub use estimator::{
    build_grid_1d, build_grid_3d, estimate_density_1d, estimate_density_3d, laplacian_grid,
    second_derivative_grid, Grid1D, Grid3D, GridLimits,
};
pub use kernels::{
    eval_kernel_1d, eval_kernel_3d, kernel_constants_1d, kernel_constants_3d, Kernel1D, Kernel3D,
    KernelFamily,
};
pub use reference::{AnalyticDensity, AnalyticDensity1D, AnalyticDensity3D};
pub use roughness::{
    corrected_roughness_1d, corrected_roughness_3d, integrate_squared_1d, integrate_squared_3d,
    RoughnessResult,
};
pub use sample::{Sample1D, Sample3D};
pub use samplers::{HernquistParams, RngSeed, RNG_NAME};
pub use selector::{
    amise_1d, optimal_bandwidth_1d, optimal_bandwidth_3d, select_bandwidth_1d,
    select_bandwidth_3d, BandwidthTrace, IterationRecord, SelectorConfig,
};
