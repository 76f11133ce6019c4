//! Kernel density evaluation at query points and on uniform grids, plus the
//! central second-difference stencils used for the roughness estimate.
//!
//! Grids built here always use the bandwidth itself as node spacing and are
//! padded by half a kernel support on every side, so the whole estimate is
//! tabulated.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_bandwidth, KdeError, Result};
use crate::kernels::{Kernel1D, Kernel3D};
use crate::sample::{Sample1D, Sample3D};

/// Upper bounds on grid sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridLimits {
    pub max_nodes_1d: usize,
    pub max_cells_3d: usize,
}

impl Default for GridLimits {
    fn default() -> Self {
        Self {
            max_nodes_1d: 10_000_000,
            max_cells_3d: 100_000_000,
        }
    }
}

/// Values on the nodes `origin + i · spacing`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    pub origin: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl Grid1D {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn last_node(&self) -> f64 {
        self.node(self.len().saturating_sub(1))
    }

    /// Tabulates `f` on `n` nodes.
    pub fn from_fn(origin: f64, spacing: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..n).map(|i| f(origin + i as f64 * spacing)).collect();
        Self {
            origin,
            spacing,
            values,
        }
    }
}

/// Isotropic 3D grid; `values` is row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid3D {
    pub origin: [f64; 3],
    pub spacing: f64,
    pub dims: [usize; 3],
    pub values: Vec<f64>,
}

impl Grid3D {
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + i as f64 * self.spacing,
            self.origin[1] + j as f64 * self.spacing,
            self.origin[2] + k as f64 * self.spacing,
        ]
    }

    pub fn cell_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn from_fn(
        origin: [f64; 3],
        spacing: f64,
        dims: [usize; 3],
        f: impl Fn([f64; 3]) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(dims.iter().product());
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    values.push(f([
                        origin[0] + i as f64 * spacing,
                        origin[1] + j as f64 * spacing,
                        origin[2] + k as f64 * spacing,
                    ]));
                }
            }
        }
        Self {
            origin,
            spacing,
            dims,
            values,
        }
    }
}

/// Search reach around a query; slightly wider than the support so that
/// rounding in `(x − xᵢ)/h` never drops a boundary point.
#[inline]
fn search_reach(support: f64, x_scale: f64) -> f64 {
    support * (1.0 + 1e-12) + x_scale.abs() * 1e-15
}

#[inline]
fn kernel_sum_1d(sorted: &[f64], kernel: &Kernel1D, h: f64, x: f64) -> f64 {
    let reach = search_reach(kernel.radius() * h, x);
    let lo = sorted.partition_point(|&p| p < x - reach);
    let mut sum = 0.0;
    for &p in &sorted[lo..] {
        if p > x + reach {
            break;
        }
        sum += kernel.eval((x - p) / h);
    }
    sum
}

pub fn estimate_density_1d(
    sample: &Sample1D,
    kernel: &Kernel1D,
    h: f64,
    queries: &[f64],
) -> Result<Vec<f64>> {
    check_bandwidth(h)?;
    let norm = 1.0 / (sample.len() as f64 * h);
    let sorted = sample.sorted();
    Ok(queries
        .par_iter()
        .map(|&x| kernel_sum_1d(sorted, kernel, h, x) * norm)
        .collect())
}

/// Number of nodes needed to cover `span` (in units of the spacing) plus the
/// two end nodes, or `GridTooLarge`.
fn node_count(span_in_steps: f64, cap: usize) -> Result<usize> {
    let n = span_in_steps.ceil() + 1.0;
    if !(n <= cap as f64) {
        let cells = if n.is_finite() { n as u128 } else { u128::MAX };
        return Err(KdeError::GridTooLarge { cells, cap });
    }
    Ok(n as usize)
}

pub fn build_grid_1d(
    sample: &Sample1D,
    kernel: &Kernel1D,
    h: f64,
    limits: &GridLimits,
) -> Result<Grid1D> {
    check_bandwidth(h)?;
    let pad = kernel.radius() * h;
    let origin = sample.min() - pad;
    let mut n = node_count(
        (sample.max() - sample.min()) / h + kernel.width,
        limits.max_nodes_1d,
    )?;
    while origin + (n - 1) as f64 * h < sample.max() + pad {
        n += 1;
    }
    if n > limits.max_nodes_1d {
        return Err(KdeError::GridTooLarge {
            cells: n as u128,
            cap: limits.max_nodes_1d,
        });
    }
    let norm = 1.0 / (sample.len() as f64 * h);
    let sorted = sample.sorted();
    let values = (0..n)
        .into_par_iter()
        .map(|i| kernel_sum_1d(sorted, kernel, h, origin + i as f64 * h) * norm)
        .collect();
    Ok(Grid1D {
        origin,
        spacing: h,
        values,
    })
}

/// Central second difference `(v₊ + v₋ − 2v)/Δ²` on the interior nodes.
pub fn second_derivative_grid(grid: &Grid1D) -> Result<Grid1D> {
    if grid.len() < 3 {
        return Err(KdeError::GridTooSmall(format!(
            "second difference needs at least 3 nodes, got {}",
            grid.len()
        )));
    }
    let inv = 1.0 / (grid.spacing * grid.spacing);
    let values = grid
        .values
        .windows(3)
        .map(|w| (w[2] + w[0] - 2.0 * w[1]) * inv)
        .collect();
    Ok(Grid1D {
        origin: grid.origin + grid.spacing,
        spacing: grid.spacing,
        values,
    })
}

/// Points bucketed into cubic cells (CSR layout) for fixed-radius queries.
struct CellList {
    origin: [f64; 3],
    edge: f64,
    dims: [usize; 3],
    starts: Vec<usize>,
    points: Vec<[f64; 3]>,
}

impl CellList {
    /// Cells are at least `reach` wide so neighbors lie in the 27 surrounding
    /// cells; very small reaches are coarsened to bound the cell count.
    fn new(sample: &Sample3D, reach: f64) -> Self {
        let min = sample.min();
        let max = sample.max();
        let extent = (0..3).map(|a| max[a] - min[a]).fold(0.0, f64::max);
        let max_dim = (2.0 * (sample.len() as f64).cbrt()).clamp(1.0, 512.0);
        let mut edge = (reach * (1.0 + 1e-9)).max(extent / max_dim);
        if !(edge > 0.0) {
            edge = 1.0;
        }
        let dims = [0, 1, 2].map(|a| ((max[a] - min[a]) / edge).floor() as usize + 1);
        let cell_of = |p: &[f64; 3]| {
            let c = [0, 1, 2].map(|a| (((p[a] - min[a]) / edge) as usize).min(dims[a] - 1));
            (c[0] * dims[1] + c[1]) * dims[2] + c[2]
        };

        let ncells = dims[0] * dims[1] * dims[2];
        let mut starts = vec![0usize; ncells + 1];
        let cells: Vec<usize> = sample.points().iter().map(cell_of).collect();
        for &c in &cells {
            starts[c + 1] += 1;
        }
        for c in 0..ncells {
            starts[c + 1] += starts[c];
        }
        let mut fill = starts.clone();
        let mut points = vec![[0.0; 3]; sample.len()];
        for (p, &c) in sample.points().iter().zip(&cells) {
            points[fill[c]] = *p;
            fill[c] += 1;
        }
        Self {
            origin: min,
            edge,
            dims,
            starts,
            points,
        }
    }

    /// Sum of `K₃((q − p)/h)` over points within the kernel support of `q`.
    fn kernel_sum(&self, kernel: &Kernel3D, h: f64, q: [f64; 3]) -> f64 {
        let mut range = [(0usize, 0usize); 3];
        for a in 0..3 {
            let c = ((q[a] - self.origin[a]) / self.edge).floor();
            let lo = c - 1.0;
            let hi = c + 1.0;
            if hi < 0.0 || lo > (self.dims[a] - 1) as f64 {
                return 0.0;
            }
            range[a] = (lo.max(0.0) as usize, hi.min((self.dims[a] - 1) as f64) as usize);
        }
        let inv_h = 1.0 / h;
        let mut sum = 0.0;
        for i in range[0].0..=range[0].1 {
            for j in range[1].0..=range[1].1 {
                let row = (i * self.dims[1] + j) * self.dims[2];
                let start = self.starts[row + range[2].0];
                let end = self.starts[row + range[2].1 + 1];
                for p in &self.points[start..end] {
                    let u = [
                        (q[0] - p[0]) * inv_h,
                        (q[1] - p[1]) * inv_h,
                        (q[2] - p[2]) * inv_h,
                    ];
                    sum += kernel.eval(u);
                }
            }
        }
        sum
    }
}

pub fn estimate_density_3d(
    sample: &Sample3D,
    kernel: &Kernel3D,
    h: f64,
    queries: &[[f64; 3]],
) -> Result<Vec<f64>> {
    check_bandwidth(h)?;
    let cells = CellList::new(sample, kernel.radius() * h);
    let norm = 1.0 / (sample.len() as f64 * h * h * h);
    Ok(queries
        .par_iter()
        .map(|&q| cells.kernel_sum(kernel, h, q) * norm)
        .collect())
}

pub fn build_grid_3d(
    sample: &Sample3D,
    kernel: &Kernel3D,
    h: f64,
    limits: &GridLimits,
) -> Result<Grid3D> {
    check_bandwidth(h)?;
    let pad = kernel.radius() * h;
    let min = sample.min();
    let max = sample.max();
    let origin = [0, 1, 2].map(|a| min[a] - pad);
    let mut dims = [0usize; 3];
    let mut total = 1.0f64;
    for a in 0..3 {
        let steps = (max[a] - min[a]) / h + kernel.width;
        let mut n = steps.ceil() + 1.0;
        if n.is_finite() {
            while origin[a] + (n - 1.0) * h < max[a] + pad {
                n += 1.0;
            }
        }
        total *= n;
        dims[a] = if n.is_finite() && n < usize::MAX as f64 { n as usize } else { usize::MAX };
    }
    if !(total <= limits.max_cells_3d as f64) {
        let cells = if total.is_finite() && total < u128::MAX as f64 {
            total as u128
        } else {
            u128::MAX
        };
        return Err(KdeError::GridTooLarge {
            cells,
            cap: limits.max_cells_3d,
        });
    }

    let cells = CellList::new(sample, pad);
    let norm = 1.0 / (sample.len() as f64 * h * h * h);
    let slab = dims[1] * dims[2];
    let mut values = vec![0.0; dims[0] * slab];
    values.par_chunks_mut(slab).enumerate().for_each(|(i, out)| {
        let x = origin[0] + i as f64 * h;
        for j in 0..dims[1] {
            let y = origin[1] + j as f64 * h;
            for k in 0..dims[2] {
                let z = origin[2] + k as f64 * h;
                out[j * dims[2] + k] = cells.kernel_sum(kernel, h, [x, y, z]) * norm;
            }
        }
    });
    Ok(Grid3D {
        origin,
        spacing: h,
        dims,
        values,
    })
}

/// Seven-point Laplacian on the interior cells; one boundary layer is dropped
/// on each face.
pub fn laplacian_grid(grid: &Grid3D) -> Result<Grid3D> {
    if grid.dims.iter().any(|&d| d < 3) {
        return Err(KdeError::GridTooSmall(format!(
            "Laplacian needs at least 3 cells per axis, got {:?}",
            grid.dims
        )));
    }
    let [n0, n1, n2] = grid.dims;
    let dims = [n0 - 2, n1 - 2, n2 - 2];
    let inv = 1.0 / (grid.spacing * grid.spacing);
    let s0 = n1 * n2;
    let s1 = n2;
    let v = &grid.values;
    let mut values = Vec::with_capacity(dims.iter().product());
    for i in 1..n0 - 1 {
        for j in 1..n1 - 1 {
            let row = i * s0 + j * s1;
            for k in 1..n2 - 1 {
                let c = row + k;
                let lap = (v[c + s0] + v[c - s0])
                    + (v[c + s1] + v[c - s1])
                    + (v[c + 1] + v[c - 1])
                    - 6.0 * v[c];
                values.push(lap * inv);
            }
        }
    }
    Ok(Grid3D {
        origin: grid.origin.map(|o| o + grid.spacing),
        spacing: grid.spacing,
        dims,
        values,
    })
}
