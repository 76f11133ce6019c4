use crate::error::{KdeError, Result};

/// An immutable univariate sample.
///
/// Points keep their input order; a sorted copy backs the window searches
/// of the estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample1D {
    points: Vec<f64>,
    sorted: Vec<f64>,
    min: f64,
    max: f64,
    std: f64,
}

impl Sample1D {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(KdeError::InvalidSample("sample has no points".into()));
        }
        if let Some(i) = points.iter().position(|x| !x.is_finite()) {
            return Err(KdeError::InvalidSample(format!(
                "point {i} is not finite ({})",
                points[i]
            )));
        }
        let mut sorted = points.clone();
        sorted.sort_by(f64::total_cmp);
        let min = sorted[0];
        let max = sorted[sorted.len() - 1];
        let std = std_dev(points.iter().copied(), points.len());
        Ok(Self {
            points,
            sorted,
            min,
            max,
            std,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Points in ascending order.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    /// Sample standard deviation (`n − 1` denominator; zero for one point).
    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().sum::<f64>() / self.len() as f64
    }

    /// Fails unless the sample can seed a bandwidth search.
    pub fn check_selectable(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(KdeError::DegenerateSample(format!(
                "need at least 2 points, got {}",
                self.len()
            )));
        }
        if !(self.std > 0.0) {
            return Err(KdeError::DegenerateSample("all points are identical".into()));
        }
        Ok(())
    }

    /// Applies `f` to every point, e.g. for rescaling experiments.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.points.iter().map(|&x| f(x)).collect())
    }
}

/// An immutable sample of 3-vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample3D {
    points: Vec<[f64; 3]>,
    min: [f64; 3],
    max: [f64; 3],
    axis_std: [f64; 3],
}

impl Sample3D {
    pub fn new(points: Vec<[f64; 3]>) -> Result<Self> {
        if points.is_empty() {
            return Err(KdeError::InvalidSample("sample has no points".into()));
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(KdeError::InvalidSample(format!("point {i} is not finite")));
        }
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for p in &points {
            for a in 0..3 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        let axis_std = [0, 1, 2].map(|a| std_dev(points.iter().map(|p| p[a]), points.len()));
        Ok(Self {
            points,
            min,
            max,
            axis_std,
        })
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> [f64; 3] {
        self.min
    }

    pub fn max(&self) -> [f64; 3] {
        self.max
    }

    pub fn axis_std(&self) -> [f64; 3] {
        self.axis_std
    }

    /// Mean of the per-axis standard deviations.
    pub fn std(&self) -> f64 {
        (self.axis_std[0] + self.axis_std[1] + self.axis_std[2]) / 3.0
    }

    pub fn check_selectable(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(KdeError::DegenerateSample(format!(
                "need at least 2 points, got {}",
                self.len()
            )));
        }
        if !(self.std() > 0.0) {
            return Err(KdeError::DegenerateSample("all points are identical".into()));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self> {
        Self::new(self.points.iter().map(|&p| f(p)).collect())
    }
}

fn std_dev(values: impl Iterator<Item = f64> + Clone, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let ss: f64 = values.map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}
