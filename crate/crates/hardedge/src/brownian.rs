//! Brownian environment paths on explicit grids, with conditional bridge
//! refinement.
//!
//! The diffusion generator and the limit kernel are both driven by one
//! Brownian path b(·). Grid-refinement studies need to refine the mesh while
//! keeping the *same* environment, which is exactly what Brownian bridge
//! insertion provides: new interior points are drawn conditionally on the
//! existing ones, and existing values never change.

use crate::rng::RandomStream;
use crate::{Error, Result};

/// A Brownian path sampled on a strictly increasing grid starting at 0,
/// with b(0) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentPath {
    grid: Vec<f64>,
    values: Vec<f64>,
}

/// Independent Gaussian increments Δb_i ~ N(0, Δx_i) over a strictly
/// increasing grid starting at 0. Returns one increment per grid interval.
pub fn brownian_increments(grid: &[f64], stream: &mut RandomStream) -> Result<Vec<f64>> {
    check_grid(grid)?;
    Ok(grid
        .windows(2)
        .map(|w| (w[1] - w[0]).sqrt() * stream.gaussian())
        .collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid[0] != 0.0 {
        return Err(Error::Domain("grid must start at 0".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    Ok(())
}

impl EnvironmentPath {
    /// Sample a fresh path on `grid` by accumulating Brownian increments.
    pub fn sample(grid: &[f64], stream: &mut RandomStream) -> Result<Self> {
        let inc = brownian_increments(grid, stream)?;
        let mut values = Vec::with_capacity(grid.len());
        let mut b = 0.0;
        values.push(0.0);
        for d in inc {
            b += d;
            values.push(b);
        }
        Ok(EnvironmentPath { grid: grid.to_vec(), values })
    }

    /// Sample on the uniform grid {0, h, 2h, …, n·h}.
    pub fn sample_uniform(span: f64, h: f64, stream: &mut RandomStream) -> Result<Self> {
        if !(span > 0.0) || !(h > 0.0) {
            return Err(Error::Domain(format!("span {span} and step {h} must be positive")));
        }
        let n = (span / h).ceil() as usize;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        Self::sample(&grid, stream)
    }

    /// The identically-zero path on `grid` (the β = ∞ environment).
    pub fn zero(grid: &[f64]) -> Result<Self> {
        check_grid(grid)?;
        Ok(EnvironmentPath { grid: grid.to_vec(), values: vec![0.0; grid.len()] })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn span(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Path value at `t`, linearly interpolated between grid points; exact on
    /// grid points. Interpolation is a deterministic convenience for kernel
    /// evaluation — insert real bridge points via [`bridge_refine`] when the
    /// conditional law matters.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t > self.span() {
            return Err(Error::Domain(format!("t = {t} outside path span [0, {}]", self.span())));
        }
        match self.grid.binary_search_by(|g| g.partial_cmp(&t).unwrap()) {
            Ok(i) => Ok(self.values[i]),
            Err(i) => {
                let (t0, t1) = (self.grid[i - 1], self.grid[i]);
                let (b0, b1) = (self.values[i - 1], self.values[i]);
                Ok(b0 + (t - t0) / (t1 - t0) * (b1 - b0))
            }
        }
    }

    /// True if every requested point coincides with a grid point (within
    /// absolute slack 1e-12).
    pub fn covers_exactly(&self, points: impl Iterator<Item = f64>) -> bool {
        let mut j = 0;
        'outer: for p in points {
            while j < self.grid.len() {
                if (self.grid[j] - p).abs() <= 1e-12 {
                    continue 'outer;
                }
                if self.grid[j] > p {
                    return false;
                }
                j += 1;
            }
            return false;
        }
        true
    }

    /// Extend the path beyond its current span with fresh increments on the
    /// uniform grid of step `h`, up to at least `t_max`. Existing values are
    /// unchanged, so Λ(L) vs Λ(2L) studies see one environment.
    pub fn extend_to(&mut self, t_max: f64, h: f64, stream: &mut RandomStream) -> Result<()> {
        if !(h > 0.0) {
            return Err(Error::Domain(format!("step {h} must be positive")));
        }
        let mut t = self.span();
        let mut b = *self.values.last().unwrap();
        while t < t_max - 1e-12 {
            let step = h.min(t_max - t);
            b += step.sqrt() * stream.gaussian();
            t += step;
            self.grid.push(t);
            self.values.push(b);
        }
        Ok(())
    }
}

/// Insert `new_points` into an existing path by conditional Brownian bridge
/// sampling. Points are processed in increasing order, each drawn from the
/// bridge law given its current left and right neighbours; existing values
/// are bit-identical in the result. Points already on the grid are skipped.
pub fn bridge_refine(
    path: &EnvironmentPath,
    new_points: &[f64],
    stream: &mut RandomStream,
) -> Result<EnvironmentPath> {
    let span = path.span();
    let mut pts: Vec<f64> = new_points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &p in &pts {
        if p <= 0.0 || p >= span {
            if !(p == 0.0 || p == span) {
                return Err(Error::Domain(format!("refinement point {p} outside span (0, {span})")));
            }
        }
    }

    let mut grid = path.grid.clone();
    let mut values = path.values.clone();
    for &p in &pts {
        match grid.binary_search_by(|g| g.partial_cmp(&p).unwrap()) {
            Ok(_) => {} // already present
            Err(i) => {
                let (t0, t1) = (grid[i - 1], grid[i]);
                let (b0, b1) = (values[i - 1], values[i]);
                let frac = (p - t0) / (t1 - t0);
                let mean = b0 + frac * (b1 - b0);
                let var = (p - t0) * (t1 - p) / (t1 - t0);
                let v = mean + var.sqrt() * stream.gaussian();
                grid.insert(i, p);
                values.insert(i, v);
            }
        }
    }
    Ok(EnvironmentPath { grid, values })
}
