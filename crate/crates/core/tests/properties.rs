use kdebw::samplers::{sample_gaussian_1d, sample_gaussian_3d};
use kdebw::selector::select_bandwidth_1d;
use kdebw::{
    amise_1d, build_grid_1d, corrected_roughness_1d, corrected_roughness_3d, estimate_density_1d,
    estimate_density_3d, eval_kernel_3d, optimal_bandwidth_1d, optimal_bandwidth_3d,
    second_derivative_grid, select_bandwidth_3d, Grid1D, GridLimits, Kernel1D, Kernel3D,
    KernelFamily, RngSeed, Sample1D, Sample3D, SelectorConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(a.abs()).max(b.abs())
}

#[test]
fn estimator_translation_equivariance() {
    let sample = sample_gaussian_1d(2_000, RngSeed(3)).unwrap();
    let queries: Vec<f64> = (0..400).map(|i| -4.0 + 0.02 * i as f64).collect();
    let shift = 3.75;
    let moved = sample.map(|x| x + shift).unwrap();
    let moved_q: Vec<f64> = queries.iter().map(|x| x + shift).collect();
    for family in KernelFamily::ALL {
        let k = Kernel1D::new(family);
        let a = estimate_density_1d(&sample, &k, 0.3, &queries).unwrap();
        let b = estimate_density_1d(&moved, &k, 0.3, &moved_q).unwrap();
        let peak = a.iter().cloned().fold(0.0, f64::max);
        for (x, y) in a.iter().zip(&b) {
            assert!(close(*x, *y, peak, 1e-12), "{family}: {x} vs {y}");
        }
    }

    let s3 = sample_gaussian_3d(500, RngSeed(3)).unwrap();
    let off = [1.25, -0.5, 2.0];
    let m3 = s3.map(|p| [p[0] + off[0], p[1] + off[1], p[2] + off[2]]).unwrap();
    let q3: Vec<[f64; 3]> = (0..200).map(|i| [0.01 * i as f64 - 1.0, 0.1, -0.2]).collect();
    let mq3: Vec<[f64; 3]> = q3.iter().map(|p| [p[0] + off[0], p[1] + off[1], p[2] + off[2]]).collect();
    let k3 = Kernel3D::new(KernelFamily::Tsc);
    let a = estimate_density_3d(&s3, &k3, 0.8, &q3).unwrap();
    let b = estimate_density_3d(&m3, &k3, 0.8, &mq3).unwrap();
    let peak = a.iter().cloned().fold(0.0, f64::max);
    for (x, y) in a.iter().zip(&b) {
        assert!(close(*x, *y, peak, 1e-12));
    }
}

#[test]
fn estimator_scale_relation() {
    let c = 2.5;
    let sample = sample_gaussian_1d(2_000, RngSeed(4)).unwrap();
    let scaled = sample.map(|x| c * x).unwrap();
    let queries: Vec<f64> = (0..300).map(|i| -3.0 + 0.02 * i as f64).collect();
    let sq: Vec<f64> = queries.iter().map(|x| c * x).collect();
    let k = Kernel1D::new(KernelFamily::Tsc);
    let a = estimate_density_1d(&sample, &k, 0.25, &queries).unwrap();
    let b = estimate_density_1d(&scaled, &k, 0.25 * c, &sq).unwrap();
    let peak = a.iter().cloned().fold(0.0, f64::max);
    for (x, y) in a.iter().zip(&b) {
        assert!(close(*x, c * y, peak, 1e-12));
    }

    let s3 = sample_gaussian_3d(500, RngSeed(4)).unwrap();
    let m3 = s3.map(|p| p.map(|v| c * v)).unwrap();
    let q3: Vec<[f64; 3]> = (0..100).map(|i| [0.02 * i as f64 - 1.0, 0.3, 0.0]).collect();
    let mq3: Vec<[f64; 3]> = q3.iter().map(|p| p.map(|v| c * v)).collect();
    let k3 = Kernel3D::new(KernelFamily::Cic);
    let a = estimate_density_3d(&s3, &k3, 0.9, &q3).unwrap();
    let b = estimate_density_3d(&m3, &k3, 0.9 * c, &mq3).unwrap();
    let peak = a.iter().cloned().fold(0.0, f64::max);
    for (x, y) in a.iter().zip(&b) {
        assert!(close(*x, c * c * c * y, peak, 1e-12));
    }
}

#[test]
fn binned_3d_matches_brute_force() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for &n in &[1usize, 7, 50, 200] {
        let sample = sample_gaussian_3d(n, RngSeed(n as u64)).unwrap();
        let queries: Vec<[f64; 3]> = (0..300)
            .map(|_| [0, 1, 2].map(|_| rng.random_range(-2.5..2.5)))
            .collect();
        for family in KernelFamily::ALL {
            let k = Kernel3D::new(family);
            for &h in &[0.3, 1.0, 2.2] {
                let fast = estimate_density_3d(&sample, &k, h, &queries).unwrap();
                for (q, got) in queries.iter().zip(&fast) {
                    let naive: f64 = sample
                        .points()
                        .iter()
                        .map(|p| eval_kernel_3d(&k, [0, 1, 2].map(|a| (q[a] - p[a]) / h)))
                        .sum::<f64>()
                        / (n as f64 * h * h * h);
                    assert!(
                        (got - naive).abs() <= 1e-12 * naive.abs(),
                        "{family} n={n} h={h}: {got} vs {naive}"
                    );
                }
            }
        }
    }
}

#[test]
fn stencil_exact_on_cubic() {
    let g = Grid1D::from_fn(-1.3, 0.07, 60, |x| 2.0 * x * x * x - x * x + 0.5 * x + 4.0);
    let d = second_derivative_grid(&g).unwrap();
    for i in 0..d.len() {
        let x = d.node(i);
        assert!((d.values[i] - (12.0 * x - 2.0)).abs() < 1e-10);
    }
}

#[test]
fn amise_minimum_sits_at_formula_bandwidth() {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let roughness = 10f64.powf(rng.random_range(-2.0..2.0));
        let n = 10usize.pow(rng.random_range(2..7));
        let kernel = Kernel1D::new(KernelFamily::ALL[rng.random_range(0..3)]);
        let h_opt = optimal_bandwidth_1d(roughness, &kernel, n).unwrap();
        let grid: Vec<f64> = (0..101)
            .map(|i| h_opt / 4.0 * 16f64.powf(i as f64 / 100.0))
            .collect();
        let values: Vec<f64> = grid.iter().map(|&h| amise_1d(h, &kernel, roughness, n).unwrap()).collect();
        let argmin = (0..101).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
        let nearest = (0..101)
            .min_by(|&a, &b| (grid[a] - h_opt).abs().total_cmp(&(grid[b] - h_opt).abs()))
            .unwrap();
        assert_eq!(argmin, nearest);
    }
}

#[test]
fn formula_scaling_laws() {
    let k = Kernel1D::new(KernelFamily::Tsc);
    let k3 = Kernel3D::new(KernelFamily::Ngp);
    for &n in &[1usize, 3, 1000, 31_250] {
        let a = optimal_bandwidth_1d(0.7, &k, n).unwrap();
        let b = optimal_bandwidth_1d(0.7, &k, 32 * n).unwrap();
        assert!((a / b - 2.0).abs() < 1e-14);
        let a = optimal_bandwidth_3d(0.7, &k3, n).unwrap();
        let b = optimal_bandwidth_3d(0.7, &k3, 128 * n).unwrap();
        assert!((a / b - 2.0).abs() < 1e-14);
    }
}

#[test]
fn selector_scale_equivariance() {
    let sample = sample_gaussian_1d(100_000, RngSeed(8)).unwrap();
    let scaled = sample.map(|x| 10.0 * x).unwrap();
    let cfg = SelectorConfig::default();
    // NGP is left out: its tabulated roughness jumps whenever a node crosses
    // a cell edge, so a one-ulp change in h can move the fixed point.
    for family in [KernelFamily::Cic, KernelFamily::Tsc] {
        let k = Kernel1D::new(family);
        let a = select_bandwidth_1d(&sample, &k, &cfg).unwrap();
        let b = select_bandwidth_1d(&scaled, &k, &cfg).unwrap();
        assert!(a.converged && b.converged);
        assert!(
            (b.final_h / (10.0 * a.final_h) - 1.0).abs() <= 1e-6,
            "{family}: {} vs {}",
            a.final_h,
            b.final_h
        );
    }
}

#[test]
fn selector_is_deterministic() {
    let cfg = SelectorConfig::default();
    let k = Kernel1D::new(KernelFamily::Cic);
    let a = select_bandwidth_1d(&sample_gaussian_1d(30_000, RngSeed(9)).unwrap(), &k, &cfg).unwrap();
    let b = select_bandwidth_1d(&sample_gaussian_1d(30_000, RngSeed(9)).unwrap(), &k, &cfg).unwrap();
    assert_eq!(a, b);

    let k3 = Kernel3D::new(KernelFamily::Tsc);
    let a = select_bandwidth_3d(&sample_gaussian_3d(5_000, RngSeed(9)).unwrap(), &k3, &cfg).unwrap();
    let b = select_bandwidth_3d(&sample_gaussian_3d(5_000, RngSeed(9)).unwrap(), &k3, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn converged_bandwidth_is_a_fixed_point() {
    let cfg = SelectorConfig::default();
    let limits = GridLimits::default();
    for seed in 1..=3 {
        let sample = sample_gaussian_1d(50_000, RngSeed(seed)).unwrap();
        for family in KernelFamily::ALL {
            let k = Kernel1D::new(family);
            let t = select_bandwidth_1d(&sample, &k, &cfg).unwrap();
            assert!(t.converged);
            let r = corrected_roughness_1d(&sample, &k, t.final_h, &limits).unwrap();
            let next = optimal_bandwidth_1d(r.corrected, &k, sample.len()).unwrap();
            assert!((next - t.final_h).abs() / t.final_h <= cfg.rel_tolerance);
        }
    }
    let s3 = sample_gaussian_3d(20_000, RngSeed(1)).unwrap();
    let k3 = Kernel3D::new(KernelFamily::Tsc);
    let t = select_bandwidth_3d(&s3, &k3, &cfg).unwrap();
    assert!(t.converged);
    let r = corrected_roughness_3d(&s3, &k3, t.final_h, &limits).unwrap();
    let next = optimal_bandwidth_3d(r.corrected, &k3, s3.len()).unwrap();
    assert!((next - t.final_h).abs() / t.final_h <= cfg.rel_tolerance);
}

#[test]
fn backoffs_strictly_increase_bandwidth() {
    // a start far below the noise floor forces several backoffs
    let sample = sample_gaussian_1d(1_000, RngSeed(12)).unwrap();
    let cfg = SelectorConfig {
        initial_scale: 1e-4,
        ..SelectorConfig::default()
    };
    let t = select_bandwidth_1d(&sample, &Kernel1D::new(KernelFamily::Tsc), &cfg).unwrap();
    assert!(t.backoffs() > 0);
    for w in t.iterations.windows(2) {
        if w[0].backoff_applied {
            assert!(w[1].h > w[0].h);
        }
    }
    assert!(t.converged);
}

#[test]
fn rotation_barely_moves_3d_bandwidth() {
    let sample = sample_gaussian_3d(20_000, RngSeed(21)).unwrap();
    // rotation about (1, 1, 1)/√3 by 40°
    let (s, c) = 40f64.to_radians().sin_cos();
    let u = [1.0 / 3f64.sqrt(); 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let cross = match (i, j) {
                (0, 1) => -u[2],
                (0, 2) => u[1],
                (1, 0) => u[2],
                (1, 2) => -u[0],
                (2, 0) => -u[1],
                (2, 1) => u[0],
                _ => 0.0,
            };
            m[i][j] = if i == j { c } else { 0.0 } + s * cross + (1.0 - c) * u[i] * u[j];
        }
    }
    let rotated = sample
        .map(|p| [0, 1, 2].map(|i| m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2]))
        .unwrap();
    let cfg = SelectorConfig::default();
    let k = Kernel3D::new(KernelFamily::Tsc);
    let a = select_bandwidth_3d(&sample, &k, &cfg).unwrap();
    let b = select_bandwidth_3d(&rotated, &k, &cfg).unwrap();
    assert!((a.final_h / b.final_h - 1.0).abs() < 0.02, "{} vs {}", a.final_h, b.final_h);
}

#[test]
fn degenerate_samples_are_rejected() {
    let cfg = SelectorConfig::default();
    let same = Sample1D::new(vec![1.5; 100]).unwrap();
    assert!(matches!(
        select_bandwidth_1d(&same, &Kernel1D::new(KernelFamily::Tsc), &cfg),
        Err(kdebw::KdeError::DegenerateSample(_))
    ));
    let same3 = Sample3D::new(vec![[0.5, 1.0, 2.0]; 10]).unwrap();
    assert!(matches!(
        select_bandwidth_3d(&same3, &Kernel3D::new(KernelFamily::Tsc), &cfg),
        Err(kdebw::KdeError::DegenerateSample(_))
    ));
}

#[test]
fn grid_padding_covers_support() {
    let s = Sample1D::new(vec![0.0, 1.0]).unwrap();
    let g = build_grid_1d(&s, &Kernel1D::new(KernelFamily::Tsc), 0.5, &GridLimits::default()).unwrap();
    assert_eq!(g.spacing, 0.5);
    assert!(g.origin <= -0.75);
    assert!(g.last_node() >= 1.75);
}
