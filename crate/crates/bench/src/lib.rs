//! Shared fixtures for the benchmarks in `benches/`.

use kdebw::samplers::{sample_gaussian_1d, sample_gaussian_3d};
use kdebw::{RngSeed, Sample1D, Sample3D};

pub const SEED: RngSeed = RngSeed(1);

pub fn gaussian_1d(n: usize) -> Sample1D {
    sample_gaussian_1d(n, SEED).expect("valid size")
}

pub fn gaussian_3d(n: usize) -> Sample3D {
    sample_gaussian_3d(n, SEED).expect("valid size")
}
