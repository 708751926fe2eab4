//! Finite-volume discretization of the limiting random diffusion generator
//! on a truncated domain [0, L].
//!
//! The generator acts as 𝔊 f = −(d/dm)(df/ds) with random speed and scale
//! densities
//!
//! ```text
//! m′(x) = exp(−(a+1)x − (2/√β)·b(x)),   s′(x) = exp(a·x + (2/√β)·b(x)),
//! ```
//!
//! b a Brownian environment. On the uniform mesh x_i = i·h the cell mass and
//! cell scale integrals are endpoint-trapezoid values of those densities
//! (a swappable quadrature; convergence is certified empirically on fixed,
//! bridge-refined environments). The discrete operator couples node i to its
//! neighbours through edge conductances ŝ = 1/∫_cell s′ and divides by the
//! dual-cell mass; symmetrizing by diag(√m) yields a symmetric tridiagonal
//! matrix with the same spectrum, which the Sturm solver then bisects.
//!
//! Boundaries: the hard wall at 0 is always Dirichlet. At the truncation end
//! both conditions are available. Dirichlet at L is what zero-counting of
//! the oscillation system on (0, L] corresponds to, but its eigenvalues
//! approach the half-line ones only at rate ~1/∫₀^L s′ (slow for small a);
//! the reflecting condition df/ds(L) = 0 matches the natural boundary of the
//! diffusion at +∞ and converges exponentially fast in L through the speed
//! tail, so it is the default for half-line estimation.
//!
//! With zero noise (β = ∞) the half-line eigenvalues are known in closed
//! form: substituting t = 2√λ·e^{−x/2} turns 𝔊ψ = λψ into Bessel's equation
//! of order a, so Λ_k = j²_{a,k+1}/4 with j_{a,k} the k-th positive zero of
//! J_a. [`zero_noise_eigenvalue`] exposes that oracle.

use crate::bessel::bessel_zero;
use crate::brownian::EnvironmentPath;
use crate::rng::RandomStream;
use crate::tridiag::{smallest_eigenvalues_relative, SymmetricTridiagonal};
use crate::{Error, Result};

/// Boundary condition at the truncation point L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightBoundary {
    /// f(L) = 0. The counting analogue of zero-counting on (0, L].
    Dirichlet,
    /// df/ds(L) = 0 (reflecting). Matches the natural boundary at +∞;
    /// half-line spectra converge exponentially fast in L.
    Free,
}

/// Per-cell speed masses and scale integrals over [x_i, x_{i+1}], x_i = i·h.
#[derive(Debug, Clone)]
pub struct SpeedScaleGrid {
    a: f64,
    beta: f64,
    l: f64,
    h: f64,
    /// m_i = ∫_cell m′ (trapezoid).
    cell_mass: Vec<f64>,
    /// σ_i = ∫_cell s′ (trapezoid); edge conductance is 1/σ_i.
    cell_scale: Vec<f64>,
    /// Prefix sums of cell_scale: scale_prefix[i] = ∫₀^{x_i} s′.
    scale_prefix: Vec<f64>,
    /// s′ at the grid nodes (for partial-cell interpolation).
    scale_density: Vec<f64>,
    /// m′ at the grid nodes.
    speed_density: Vec<f64>,
}

/// Noise coefficient 2/√β; zero when β = ∞.
fn noise_coefficient(beta: f64) -> f64 {
    if beta.is_infinite() {
        0.0
    } else {
        2.0 / beta.sqrt()
    }
}

fn check_speed_scale_params(a: f64, beta: f64, l: f64, h: f64) -> Result<()> {
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::Domain(format!("a = {a} must exceed -1")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    if !(l > 0.0) || !(h > 0.0) || h > l {
        return Err(Error::Domain(format!("need 0 < h ≤ L, got h = {h}, L = {l}")));
    }
    Ok(())
}

/// Build the speed/scale cell integrals over [0, L] with mesh width h from a
/// sampled environment. The path must contain every node i·h as an exact
/// grid point (bridge-refine to get there); nothing is interpolated.
pub fn build_speed_scale(
    a: f64,
    beta: f64,
    l: f64,
    h: f64,
    path: &EnvironmentPath,
) -> Result<SpeedScaleGrid> {
    check_speed_scale_params(a, beta, l, h)?;
    let n_cells = (l / h).round() as usize;
    if n_cells < 2 {
        return Err(Error::Domain("mesh must have at least two cells".into()));
    }
    if path.span() < l - 1e-12 {
        return Err(Error::Domain(format!(
            "path span {} does not cover domain length {l}",
            path.span()
        )));
    }
    if !path.covers_exactly((0..=n_cells).map(|i| i as f64 * h)) {
        return Err(Error::Domain(
            "path grid must contain every mesh node; bridge-refine the environment first".into(),
        ));
    }
    let c = noise_coefficient(beta);

    let mut speed_density = Vec::with_capacity(n_cells + 1);
    let mut scale_density = Vec::with_capacity(n_cells + 1);
    for i in 0..=n_cells {
        let x = i as f64 * h;
        let b = path.value_at(x)?;
        speed_density.push((-(a + 1.0) * x - c * b).exp());
        scale_density.push((a * x + c * b).exp());
    }

    let mut cell_mass = Vec::with_capacity(n_cells);
    let mut cell_scale = Vec::with_capacity(n_cells);
    let mut scale_prefix = Vec::with_capacity(n_cells + 1);
    scale_prefix.push(0.0);
    for i in 0..n_cells {
        cell_mass.push(0.5 * h * (speed_density[i] + speed_density[i + 1]));
        let sc = 0.5 * h * (scale_density[i] + scale_density[i + 1]);
        cell_scale.push(sc);
        scale_prefix.push(scale_prefix[i] + sc);
    }

    Ok(SpeedScaleGrid {
        a,
        beta,
        l,
        h,
        cell_mass,
        cell_scale,
        scale_prefix,
        scale_density,
        speed_density,
    })
}

impl SpeedScaleGrid {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn domain_length(&self) -> f64 {
        self.l
    }

    pub fn mesh_width(&self) -> f64 {
        self.h
    }

    pub fn cells(&self) -> usize {
        self.cell_mass.len()
    }

    pub fn cell_mass(&self) -> &[f64] {
        &self.cell_mass
    }

    pub fn cell_scale(&self) -> &[f64] {
        &self.cell_scale
    }

    /// ∫₀^t s′(z) dz, trapezoid-exact at nodes, linear-density interpolation
    /// inside a cell.
    pub fn scale_integral(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.l + 1e-12).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.l)));
        }
        let i = ((t / self.h).floor() as usize).min(self.cells());
        let x_i = i as f64 * self.h;
        let dt = t - x_i;
        if dt <= 0.0 || i >= self.cells() {
            return Ok(self.scale_prefix[i]);
        }
        // linearly interpolated density across the partial cell
        let d0 = self.scale_density[i];
        let d1 = self.scale_density[i + 1];
        let dt_frac = dt / self.h;
        let d_t = d0 + (d1 - d0) * dt_frac;
        Ok(self.scale_prefix[i] + 0.5 * dt * (d0 + d_t))
    }
}

/// Symmetrized discretization of the truncated generator.
#[derive(Debug, Clone)]
pub struct GeneratorDiscretization {
    matrix: SymmetricTridiagonal,
    boundary: RightBoundary,
}

impl GeneratorDiscretization {
    pub fn matrix(&self) -> &SymmetricTridiagonal {
        &self.matrix
    }

    pub fn boundary(&self) -> RightBoundary {
        self.boundary
    }

    /// Assemble from per-node masses and per-edge conductances (the 2-node
    /// toy with unit masses and conductances yields [[2, −1], [−1, 2]]).
    /// Under Dirichlet both boundary edges exist, so `conductance` has one
    /// more entry than `node_mass`; under Free the last node has no right
    /// edge and the lengths match.
    pub fn from_parts(
        node_mass: &[f64],
        conductance: &[f64],
        boundary: RightBoundary,
    ) -> Result<Self> {
        let n = node_mass.len();
        let want_edges = match boundary {
            RightBoundary::Dirichlet => n + 1,
            RightBoundary::Free => n,
        };
        if n == 0 || conductance.len() != want_edges {
            return Err(Error::Domain(format!(
                "need {want_edges} conductances for {n} nodes under {boundary:?}, got {}",
                conductance.len()
            )));
        }
        if node_mass.iter().any(|&m| !(m > 0.0)) || conductance.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Domain("masses and conductances must be positive".into()));
        }
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let right = if i + 1 < want_edges { conductance[i + 1] } else { 0.0 };
            diag.push((conductance[i] + right) / node_mass[i]);
        }
        let offdiag = (0..n - 1)
            .map(|i| -conductance[i + 1] / (node_mass[i] * node_mass[i + 1]).sqrt())
            .collect();
        Ok(GeneratorDiscretization {
            matrix: SymmetricTridiagonal::new(diag, offdiag)?,
            boundary,
        })
    }
}

/// Discretize the generator over the cell grid. Interior node i carries the
/// trapezoid dual-cell mass (m_{i−1} + m_i)/2 and couples through the cell
/// conductances 1/σ; under [`RightBoundary::Free`] the node at L itself is
/// an unknown with half a dual cell.
pub fn build_generator(
    ss: &SpeedScaleGrid,
    boundary: RightBoundary,
) -> Result<GeneratorDiscretization> {
    let cells = ss.cells();
    let interior = cells - 1;
    let n = match boundary {
        RightBoundary::Dirichlet => interior,
        RightBoundary::Free => interior + 1,
    };
    if n == 0 {
        return Err(Error::Domain("mesh too coarse for the requested boundary".into()));
    }
    let mut node_mass = Vec::with_capacity(n);
    for i in 1..=interior {
        node_mass.push(0.5 * (ss.cell_mass[i - 1] + ss.cell_mass[i]));
    }
    if boundary == RightBoundary::Free {
        node_mass.push(0.5 * ss.cell_mass[cells - 1]);
    }
    let conductance: Vec<f64> = ss.cell_scale.iter().map(|s| 1.0 / s).collect();
    GeneratorDiscretization::from_parts(&node_mass, &conductance, boundary)
}

/// Lowest k eigenvalues of the discretized generator on a given environment.
pub fn sbo_eigenvalues_with_path(
    a: f64,
    beta: f64,
    l: f64,
    h: f64,
    k: usize,
    path: &EnvironmentPath,
    boundary: RightBoundary,
) -> Result<Vec<f64>> {
    let ss = build_speed_scale(a, beta, l, h, path)?;
    let gen = build_generator(&ss, boundary)?;
    smallest_eigenvalues_relative(gen.matrix(), k, 1e-11)
}

/// Draw a fresh environment and return the lowest k eigenvalues — one
/// approximate sample of (Λ₀, …, Λ_{k−1}). With β = ∞ the environment is
/// irrelevant and the zero path is used.
pub fn sbo_eigenvalues(
    a: f64,
    beta: f64,
    l: f64,
    h: f64,
    k: usize,
    stream: &mut RandomStream,
    boundary: RightBoundary,
) -> Result<Vec<f64>> {
    check_speed_scale_params(a, beta, l, h)?;
    let n_cells = (l / h).round() as usize;
    let grid: Vec<f64> = (0..=n_cells).map(|i| i as f64 * h).collect();
    let path = if beta.is_infinite() {
        EnvironmentPath::zero(&grid)?
    } else {
        EnvironmentPath::sample(&grid, stream)?
    };
    sbo_eigenvalues_with_path(a, beta, l, h, k, &path, boundary)
}

/// Untruncated Green's kernel on the diagonal arguments: ∫₀^{x∧y} s′.
pub fn greens_value(x: f64, y: f64, ss: &SpeedScaleGrid) -> Result<f64> {
    ss.scale_integral(x.min(y))
}

/// Truncated Green's kernel
/// s_L(x, y) = [∫₀^{x∧y} s′] · [∫_{x∨y}^L s′ / ∫₀^L s′].
pub fn greens_value_truncated(x: f64, y: f64, ss: &SpeedScaleGrid) -> Result<f64> {
    let lower = ss.scale_integral(x.min(y))?;
    let upper = ss.scale_integral(x.max(y))?;
    let total = ss.scale_prefix[ss.cells()];
    Ok(lower * (total - upper) / total)
}

/// Trace of the inverse of the Dirichlet-truncated generator:
/// ∫₀^L s_L(x, x) m′(x) dx by trapezoid quadrature on the mesh nodes.
pub fn trace_inverse(ss: &SpeedScaleGrid) -> f64 {
    trace_quadrature(ss, |i, ss| {
        let s = ss.scale_prefix[i];
        let total = ss.scale_prefix[ss.cells()];
        s * (total - s) / total
    })
}

/// Half-line analogue ∫₀^L (∫₀^x s′) m′(x) dx; converges to tr 𝔊⁻¹ once the
/// speed tail beyond L is spent.
pub fn trace_inverse_halfline(ss: &SpeedScaleGrid) -> f64 {
    trace_quadrature(ss, |i, ss| ss.scale_prefix[i])
}

fn trace_quadrature(ss: &SpeedScaleGrid, kernel_diag: impl Fn(usize, &SpeedScaleGrid) -> f64) -> f64 {
    let n = ss.cells();
    let mut acc = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * ss.h * kernel_diag(i, ss) * ss.speed_density[i];
    }
    acc
}

/// Closed-form zero-noise eigenvalue Λ_k(β = ∞, a) = j²_{a,k+1} / 4 (k is
/// 0-based). From the exact solution ψ(x) = t^{−a} J_a(t), t = 2√λ e^{−x/2},
/// of the zero-noise eigenvalue equation with a Dirichlet wall at 0.
pub fn zero_noise_eigenvalue(a: f64, k: usize) -> Result<f64> {
    let j = bessel_zero(a, k + 1)?;
    Ok(j * j / 4.0)
}

/// Grow L (doubling, resampling the same environment further out) until the
/// ground state moves by at most `tol`; returns (L*, Λ₀(L*)). The certified
/// length feeds the truncation-sensitive consumers.
pub fn certify_truncation_length(
    a: f64,
    beta: f64,
    h: f64,
    l_start: f64,
    tol: f64,
    max_doublings: usize,
    stream: &mut RandomStream,
    boundary: RightBoundary,
) -> Result<(f64, f64)> {
    check_speed_scale_params(a, beta, l_start, h)?;
    let mut l = l_start;
    let n_cells = (l / h).round() as usize;
    let grid: Vec<f64> = (0..=n_cells).map(|i| i as f64 * h).collect();
    let mut path = if beta.is_infinite() {
        EnvironmentPath::zero(&grid)?
    } else {
        EnvironmentPath::sample(&grid, stream)?
    };
    let mut lam = sbo_eigenvalues_with_path(a, beta, l, h, 1, &path, boundary)?[0];
    for _ in 0..max_doublings {
        let l2 = 2.0 * l;
        if beta.is_infinite() {
            path = EnvironmentPath::zero(
                &(0..=((l2 / h).round() as usize)).map(|i| i as f64 * h).collect::<Vec<_>>(),
            )?;
        } else {
            path.extend_to(l2, h, stream)?;
        }
        let lam2 = sbo_eigenvalues_with_path(a, beta, l2, h, 1, &path, boundary)?[0];
        if (lam2 - lam).abs() <= tol {
            return Ok((l, lam));
        }
        l = l2;
        lam = lam2;
    }
    Err(Error::NoConvergence(format!(
        "ground state still moving after {max_doublings} domain doublings (L = {l})"
    )))
}
