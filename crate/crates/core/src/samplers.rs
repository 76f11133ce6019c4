//! Seeded Monte Carlo draws from the test densities.
//!
//! All samplers run on a single ChaCha20 stream seeded from a `u64`; output
//! is a pure function of the parameters and the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{KdeError, Result};
use crate::kernels::KernelFamily;
use crate::sample::{Sample1D, Sample3D};

/// Generator identification written into reports and sample headers.
pub const RNG_NAME: &str = "ChaCha20Rng (rand_chacha 0.9.0, rand_distr 0.5.1 ziggurat normals)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

/// Hernquist model `ρ(r) = M r_c / (2π r (r + r_c)³)`, with radii drawn
/// only from `[r_min, r_max]` given in units of `r_c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HernquistParams {
    pub total_mass: f64,
    pub scale_length: f64,
    pub min_r_over_rc: f64,
    pub max_r_over_rc: f64,
}

impl Default for HernquistParams {
    fn default() -> Self {
        Self {
            total_mass: 1.0,
            scale_length: 1.0,
            min_r_over_rc: 0.05,
            max_r_over_rc: 1000.0,
        }
    }
}

impl HernquistParams {
    pub fn untruncated(total_mass: f64, scale_length: f64) -> Self {
        Self {
            total_mass,
            scale_length,
            min_r_over_rc: 0.0,
            max_r_over_rc: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_mass > 0.0 && self.total_mass.is_finite()) {
            return Err(KdeError::InvalidConfig("total mass must be positive".into()));
        }
        if !(self.scale_length > 0.0 && self.scale_length.is_finite()) {
            return Err(KdeError::InvalidConfig("scale length must be positive".into()));
        }
        if !(self.min_r_over_rc >= 0.0 && self.min_r_over_rc < self.max_r_over_rc) {
            return Err(KdeError::InvalidConfig(
                "truncation window must satisfy 0 ≤ min < max".into(),
            ));
        }
        Ok(())
    }

    pub fn r_min(&self) -> f64 {
        self.min_r_over_rc * self.scale_length
    }

    pub fn r_max(&self) -> f64 {
        self.max_r_over_rc * self.scale_length
    }

    /// Enclosed mass fraction `F(r) = r² / (r + r_c)²` of the untruncated model.
    pub fn mass_fraction(&self, r: f64) -> f64 {
        if r.is_infinite() {
            return 1.0;
        }
        let t = r / (r + self.scale_length);
        t * t
    }

    /// Inverse of [`Self::mass_fraction`]: `r = r_c √q / (1 − √q)`.
    pub fn radius_at_fraction(&self, q: f64) -> f64 {
        let s = q.sqrt();
        self.scale_length * s / (1.0 - s)
    }

    /// Probability mass of the window under the untruncated model.
    pub fn window_mass(&self) -> f64 {
        self.mass_fraction(self.r_max()) - self.mass_fraction(self.r_min())
    }
}

pub fn sample_gaussian_1d(n: usize, seed: RngSeed) -> Result<Sample1D> {
    let mut rng = seed.rng();
    Sample1D::new((0..n).map(|_| rng.sample(StandardNormal)).collect())
}

/// Draw counts of an acceptance-rejection run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RejectionStats {
    pub proposals: u64,
    pub accepted: u64,
}

impl RejectionStats {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.proposals as f64
    }
}

/// The TSC shape as a density, by rejection from the uniform law on
/// `[−3/2, 3/2]` under the constant envelope `3/4`.
pub fn sample_tsc_density(n: usize, seed: RngSeed) -> Result<Sample1D> {
    sample_tsc_density_with_stats(n, seed).map(|(s, _)| s)
}

pub fn sample_tsc_density_with_stats(n: usize, seed: RngSeed) -> Result<(Sample1D, RejectionStats)> {
    let mut rng = seed.rng();
    let mut points = Vec::with_capacity(n);
    let mut stats = RejectionStats {
        proposals: 0,
        accepted: 0,
    };
    while points.len() < n {
        let x: f64 = rng.random_range(-1.5..=1.5);
        let y: f64 = rng.random_range(0.0..0.75);
        stats.proposals += 1;
        if y < KernelFamily::Tsc.profile(x) {
            points.push(x);
            stats.accepted += 1;
        }
    }
    Ok((Sample1D::new(points)?, stats))
}

/// Means and standard deviations of the three mixture components.
pub const TRIMODAL_COMPONENTS: [(f64, f64); 3] = [(0.0, 1.0), (-4.0, 2.0), (4.0, 0.5)];

/// Equal-weight mixture of `N(0, 1)`, `N(−4, 2²)` and `N(4, 0.5²)`.
pub fn sample_trimodal(n: usize, seed: RngSeed) -> Result<Sample1D> {
    sample_trimodal_labeled(n, seed).map(|(s, _)| s)
}

/// Also returns how many draws came from each component.
pub fn sample_trimodal_labeled(n: usize, seed: RngSeed) -> Result<(Sample1D, [usize; 3])> {
    let mut rng = seed.rng();
    let mut counts = [0usize; 3];
    let points = (0..n)
        .map(|_| {
            let c = rng.random_range(0..3usize);
            counts[c] += 1;
            let (mean, sd) = TRIMODAL_COMPONENTS[c];
            let z: f64 = rng.sample(StandardNormal);
            mean + sd * z
        })
        .collect();
    Ok((Sample1D::new(points)?, counts))
}

pub fn sample_gaussian_3d(n: usize, seed: RngSeed) -> Result<Sample3D> {
    let mut rng = seed.rng();
    Sample3D::new(
        (0..n)
            .map(|_| {
                [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ]
            })
            .collect(),
    )
}

/// Radii of the Hernquist model by inverse transform of the enclosed mass,
/// restricted to the truncation window.
pub fn sample_hernquist_radii(n: usize, params: &HernquistParams, seed: RngSeed) -> Result<Sample1D> {
    params.validate()?;
    let mut rng = seed.rng();
    let lo = params.mass_fraction(params.r_min());
    let hi = params.mass_fraction(params.r_max());
    let (r_min, r_max) = (params.r_min(), params.r_max());
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let u: f64 = rng.random();
        let r = params.radius_at_fraction(lo + (hi - lo) * u);
        // rounding can push q onto the window edge
        if r >= r_min && r <= r_max && r.is_finite() {
            points.push(r);
        }
    }
    Sample1D::new(points)
}
