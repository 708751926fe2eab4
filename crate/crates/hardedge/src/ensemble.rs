//! The bidiagonal (β, a)-Laguerre matrix model and its discrete inverse
//! kernel.
//!
//! The model is the n×n upper-bidiagonal matrix with independent chi entries
//!
//! ```text
//! L = (1/√β) · bidiag( χ_{(a+n)β}, χ_{(a+n−1)β}, …, χ_{(a+1)β} ;   // diagonal
//!                      χ_{(n−1)β}, χ_{(n−2)β}, …, χ_{β} )          // superdiagonal
//! ```
//!
//! whose Gram matrix LLᵀ carries the (β, a)-Laguerre eigenvalue law. The
//! smallest eigenvalues scaled by n converge to the hard-edge limit points,
//! which is what [`sample_scaled_minima`] draws from.
//!
//! Conjugating by the alternating anti-diagonal matrix turns L into the
//! lower-bidiagonal M with the same singular values; the inverse of √n·M is
//! lower triangular with the explicit product form of [`inverse_kernel`],
//! accumulated in log space because the chi-ratio products over thousands of
//! factors would otherwise under/overflow. The squared operator norm of that
//! kernel times n·λ_min is exactly 1 — an algebraic identity the test suite
//! checks to 1e-8.

use crate::brownian::EnvironmentPath;
use crate::rng::{ChiIndex, RandomStream};
use crate::stats::EmpiricalDistribution;
use crate::tridiag::{smallest_eigenvalues_relative, SymmetricTridiagonal};
use crate::{Error, Result};

/// Sampled bidiagonal factor of the (β, a)-Laguerre ensemble. Row k of the
/// diagonal (0-indexed) holds χ_{(a+n−k)β}/√β, row k of the superdiagonal
/// χ_{(n−1−k)β}/√β, matching the top-to-bottom index pattern above.
#[derive(Debug, Clone)]
pub struct BidiagonalModel {
    n: usize,
    beta: f64,
    a: f64,
    diag: Vec<f64>,
    superdiag: Vec<f64>,
}

/// Lower-bidiagonal conjugate M = S L S⁻¹ (S the alternating anti-diagonal):
/// main diagonal χ_{(a+k)β}/√β for k = 1..n, subdiagonal −χ_{kβ}/√β.
#[derive(Debug, Clone)]
pub struct LowerBidiagonal {
    diag: Vec<f64>,
    subdiag: Vec<f64>,
}

/// Chi index on the model diagonal, 0-indexed from the top row.
pub fn diag_chi_index(n: usize, beta: f64, a: f64, row: usize) -> f64 {
    (a + (n - row) as f64) * beta
}

/// Chi index on the model superdiagonal, 0-indexed from the top row.
pub fn superdiag_chi_index(n: usize, beta: f64, row: usize) -> f64 {
    (n - 1 - row) as f64 * beta
}

fn check_params(n: usize, beta: f64, a: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("matrix size n must be at least 1".into()));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta = {beta} must be positive and finite")));
    }
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::Domain(format!("a = {a} must exceed -1")));
    }
    Ok(())
}

/// Draw one model instance with independent chi entries.
pub fn sample_model(
    n: usize,
    beta: f64,
    a: f64,
    stream: &mut RandomStream,
) -> Result<BidiagonalModel> {
    check_params(n, beta, a)?;
    let sqrt_beta = beta.sqrt();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let idx = ChiIndex::new(diag_chi_index(n, beta, a, k))?;
        diag.push(stream.chi(idx) / sqrt_beta);
    }
    let mut superdiag = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let idx = ChiIndex::new(superdiag_chi_index(n, beta, k))?;
        superdiag.push(stream.chi(idx) / sqrt_beta);
    }
    Ok(BidiagonalModel { n, beta, a, diag, superdiag })
}

impl BidiagonalModel {
    /// Build directly from entries (mainly for deterministic tests).
    pub fn from_entries(beta: f64, a: f64, diag: Vec<f64>, superdiag: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        check_params(n, beta, a)?;
        if superdiag.len() + 1 != n {
            return Err(Error::Domain("superdiagonal must have length n - 1".into()));
        }
        Ok(BidiagonalModel { n, beta, a, diag, superdiag })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn superdiag(&self) -> &[f64] {
        &self.superdiag
    }

    /// Gram matrix T = LLᵀ: diag_k = x_k² + y_k² (y_n ≡ 0),
    /// offdiag_k = x_{k+1}·y_k.
    pub fn gram_tridiagonal(&self) -> SymmetricTridiagonal {
        let n = self.n;
        let x = &self.diag;
        let y = &self.superdiag;
        let mut diag = Vec::with_capacity(n);
        for k in 0..n {
            let yk = if k < n - 1 { y[k] } else { 0.0 };
            diag.push(x[k] * x[k] + yk * yk);
        }
        let offdiag = (0..n - 1).map(|k| x[k + 1] * y[k]).collect();
        SymmetricTridiagonal::new(diag, offdiag).expect("consistent lengths")
    }

    /// Anti-diagonal conjugation M = S L S⁻¹: reverses the diagonal and
    /// negates the reversed superdiagonal onto the subdiagonal. MMᵀ has the
    /// same spectrum as LLᵀ.
    pub fn conjugate_antidiagonal(&self) -> LowerBidiagonal {
        let n = self.n;
        let diag = (0..n).map(|k| self.diag[n - 1 - k]).collect();
        let subdiag = (0..n - 1).map(|k| -self.superdiag[n - 2 - k]).collect();
        LowerBidiagonal { diag, subdiag }
    }
}

impl LowerBidiagonal {
    pub fn from_entries(diag: Vec<f64>, subdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || subdiag.len() + 1 != diag.len() {
            return Err(Error::Domain("subdiagonal must have length n - 1".into()));
        }
        Ok(LowerBidiagonal { diag, subdiag })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn subdiag(&self) -> &[f64] {
        &self.subdiag
    }

    /// Dense n×n form (test oracles).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i > 0 {
                m[i][i - 1] = self.subdiag[i - 1];
            }
        }
        m
    }
}

/// The integral kernel of (√n·M)⁻¹ on the cell grid x_i = i/n, stored as a
/// log prefactor per row plus cumulative log chi-ratios, so a cell value is
/// a single exp() of a difference of prefix sums.
#[derive(Debug, Clone)]
pub struct DiscreteKernel {
    n: usize,
    /// log(√n / d_i) per row.
    log_prefactor: Vec<f64>,
    /// S_i = Σ_{k<i} log(|sub_k| / d_k); S_0 = 0. Zero subdiagonal factors
    /// contribute 0 here and are masked through `next_zero` instead.
    log_ratio_prefix: Vec<f64>,
    /// next_zero[j] = smallest k ≥ j with sub_k = 0 (n−1 if none): every
    /// product spanning such a factor vanishes.
    next_zero: Vec<usize>,
}

/// Kernel representation of (√n·M)⁻¹. Fails on a zero diagonal entry.
pub fn inverse_kernel(m: &LowerBidiagonal) -> Result<DiscreteKernel> {
    let n = m.n();
    if m.diag.iter().any(|&d| d == 0.0) {
        return Err(Error::Singular("lower-bidiagonal factor has a zero diagonal entry".into()));
    }
    let half_log_n = 0.5 * (n as f64).ln();
    let log_prefactor = m.diag.iter().map(|d| half_log_n - d.abs().ln()).collect();
    let mut log_ratio_prefix = Vec::with_capacity(n);
    let mut s = 0.0;
    log_ratio_prefix.push(0.0);
    for k in 0..n - 1 {
        if m.subdiag[k] != 0.0 {
            s += m.subdiag[k].abs().ln() - m.diag[k].abs().ln();
        }
        log_ratio_prefix.push(s);
    }
    let mut next_zero = vec![n.saturating_sub(1); n];
    for k in (0..n - 1).rev() {
        next_zero[k] = if m.subdiag[k] == 0.0 { k } else { next_zero[k + 1] };
    }
    Ok(DiscreteKernel { n, log_prefactor, log_ratio_prefix, next_zero })
}

impl DiscreteKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Kernel value on cell (row, col), zero above the diagonal. This is
    /// n·[(√n M)⁻¹]_{row,col} up to the sign pattern removed by conjugation.
    pub fn cell(&self, row: usize, col: usize) -> f64 {
        if col > row {
            return 0.0;
        }
        if col < row && self.next_zero[col] < row {
            return 0.0;
        }
        (self.log_prefactor[row] + self.log_ratio_prefix[row] - self.log_ratio_prefix[col]).exp()
    }

    /// Matrix entries of (√n M)⁻¹ in magnitude (cell values divided by n).
    fn operator_entry(&self, row: usize, col: usize) -> f64 {
        self.cell(row, col) / self.n as f64
    }
}

/// ‖(Kⁿ)ᵀKⁿ‖, the squared L²→L² operator norm of the discrete kernel, by
/// power iteration on the n×n cell representation with quadrature weight
/// 1/n. For every instance this equals 1/(n·λ_min(LLᵀ)) exactly.
pub fn operator_norm_sq(kernel: &DiscreteKernel, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let n = kernel.n;
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate().take(i + 1) {
            *v = kernel.operator_entry(i, j);
        }
    }

    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut prev = f64::MAX;
    let mut settled = 0;
    for _ in 0..200_000 {
        // w = A v (lower triangular), u = Aᵀ w.
        for i in 0..n {
            w[i] = (0..=i).map(|j| a[i][j] * v[j]).sum();
        }
        for j in 0..n {
            u[j] = (j..n).map(|i| a[i][j] * w[i]).sum();
        }
        let lambda: f64 = w.iter().map(|x| x * x).sum();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Singular("power iteration collapsed to zero".into()));
        }
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / norm;
        }
        if (lambda - prev).abs() <= tol * lambda.abs() {
            settled += 1;
            if settled >= 3 {
                return Ok(lambda);
            }
        } else {
            settled = 0;
        }
        prev = lambda;
    }
    Err(Error::NoConvergence("power iteration exceeded its iteration cap".into()))
}

/// Limit kernel value  x^{−(1+a)/2} · exp(∫_y^x db_z/√(βz)) · y^{a/2}  for
/// 0 < y < x ≤ 1, zero on y ≥ x.
///
/// The stochastic integral is evaluated through the logarithmic time change
/// ∫_x^1 z^{−1/2} db_z = b̂(log(1/x)), so `path` is an ordinary standard
/// Brownian path that must cover [log(1/x), log(1/y)]. `beta` may be
/// infinite (zero noise).
pub fn limit_kernel_value(
    x: f64,
    y: f64,
    a: f64,
    beta: f64,
    path: &EnvironmentPath,
) -> Result<f64> {
    if !(a > -1.0) {
        return Err(Error::Domain(format!("a = {a} must exceed -1")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    if !(x > 0.0 && x <= 1.0) || !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!("(x, y) = ({x}, {y}) must lie in (0, 1]")));
    }
    if y >= x {
        return Ok(0.0);
    }
    let t_x = (1.0 / x).ln();
    let t_y = (1.0 / y).ln();
    let noise = if beta.is_infinite() {
        0.0
    } else {
        (path.value_at(t_y)? - path.value_at(t_x)?) / beta.sqrt()
    };
    Ok((-0.5 * (1.0 + a) * x.ln() + 0.5 * a * y.ln() + noise).exp())
}

/// One draw of the k smallest Gram eigenvalues scaled by n.
pub fn scaled_minima_draw(
    n: usize,
    beta: f64,
    a: f64,
    k: usize,
    stream: &mut RandomStream,
) -> Result<Vec<f64>> {
    if k < 1 || k > n {
        return Err(Error::Domain(format!("k = {k} must be in 1..={n}")));
    }
    let model = sample_model(n, beta, a, stream)?;
    let gram = model.gram_tridiagonal();
    let evs = smallest_eigenvalues_relative(&gram, k, 1e-12)?;
    Ok(evs.into_iter().map(|ev| n as f64 * ev).collect())
}

/// `num_samples` independent draws of (nλ₀, …, nλ_{k−1}), returned as one
/// empirical distribution per index.
pub fn sample_scaled_minima(
    n: usize,
    beta: f64,
    a: f64,
    k: usize,
    num_samples: usize,
    stream: &mut RandomStream,
) -> Result<Vec<EmpiricalDistribution>> {
    if num_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let mut per_index = vec![Vec::with_capacity(num_samples); k];
    for _ in 0..num_samples {
        let draw = scaled_minima_draw(n, beta, a, k, stream)?;
        for (bucket, v) in per_index.iter_mut().zip(draw) {
            bucket.push(v);
        }
    }
    per_index.into_iter().map(EmpiricalDistribution::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::stats::dkw_band;

    #[test]
    fn index_pattern_n3_beta2_a0() {
        for (k, want) in [(0, 6.0), (1, 4.0), (2, 2.0)] {
            assert_eq!(diag_chi_index(3, 2.0, 0.0, k), want);
        }
        for (k, want) in [(0, 4.0), (1, 2.0)] {
            assert_eq!(superdiag_chi_index(3, 2.0, k), want);
        }
    }

    #[test]
    fn entries_positive_and_reproducible() {
        let mut s = RandomStream::new(41, 0);
        let m = sample_model(50, 1.0, -0.5, &mut s).unwrap();
        assert!(m.diag().iter().all(|&v| v > 0.0));
        assert!(m.superdiag().iter().all(|&v| v > 0.0));
        let mut s2 = RandomStream::new(41, 0);
        let m2 = sample_model(50, 1.0, -0.5, &mut s2).unwrap();
        assert_eq!(m.diag(), m2.diag());
        assert_eq!(m.superdiag(), m2.superdiag());
    }

    #[test]
    fn single_entry_square_has_mean_a_plus_one() {
        let n = 200_000;
        let (beta, a) = (2.0, 0.5);
        let mut s = RandomStream::new(42, 0);
        let mean = (0..n)
            .map(|_| {
                let m = sample_model(1, beta, a, &mut s).unwrap();
                m.diag()[0] * m.diag()[0]
            })
            .sum::<f64>()
            / n as f64;
        // Var[χ²_r/β] = 2r/β² = 2(a+1)/β.
        let band = 4.0 * (2.0 * (a + 1.0) / beta / n as f64).sqrt();
        assert!((mean - (a + 1.0)).abs() < band, "mean {mean} vs {}", a + 1.0);
    }

    #[test]
    fn diag_index_pattern_statistically() {
        // E[β·L_kk²] equals the chi index of that row.
        let n_draws = 200_000;
        let (beta, a) = (2.0, 0.0);
        let mut s = RandomStream::new(43, 0);
        let mut sums = [0.0f64; 3];
        for _ in 0..n_draws {
            let m = sample_model(3, beta, a, &mut s).unwrap();
            for (k, acc) in sums.iter_mut().enumerate() {
                *acc += beta * m.diag()[k] * m.diag()[k];
            }
        }
        for (k, want) in [(0usize, 6.0), (1, 4.0), (2, 2.0)] {
            let mean = sums[k] / n_draws as f64;
            let band = 5.0 * (2.0 * want / n_draws as f64).sqrt();
            assert!((mean - want).abs() < band, "row {k}: E[β L²] = {mean} vs {want}");
        }
    }

    #[test]
    fn gram_known_2x2() {
        let l = BidiagonalModel::from_entries(1.0, 0.0, vec![2.0, 3.0], vec![1.0]).unwrap();
        let t = l.gram_tridiagonal();
        assert_eq!(t.diag(), &[5.0, 9.0]);
        assert_eq!(t.offdiag(), &[3.0]);
    }

    #[test]
    fn gram_single_entry() {
        let l = BidiagonalModel::from_entries(1.0, 0.0, vec![1.5], vec![]).unwrap();
        let t = l.gram_tridiagonal();
        assert_eq!(t.diag(), &[2.25]);
    }

    #[test]
    fn gram_matches_dense_product() {
        let mut s = RandomStream::new(44, 0);
        let m = sample_model(6, 2.0, 1.0, &mut s).unwrap();
        let t = m.gram_tridiagonal();
        // dense L·Lᵀ
        let n = 6;
        let mut dense_l = vec![vec![0.0; n]; n];
        for i in 0..n {
            dense_l[i][i] = m.diag()[i];
            if i + 1 < n {
                dense_l[i][i + 1] = m.superdiag()[i];
            }
        }
        let prod = oracle::dense_mul_transpose(&dense_l, &dense_l);
        for i in 0..n {
            let rel = (t.diag()[i] - prod[i][i]).abs() / prod[i][i].abs();
            assert!(rel < 1e-14, "diag {i}: rel {rel:.2e}");
            if i + 1 < n {
                let rel = (t.offdiag()[i] - prod[i][i + 1]).abs() / prod[i][i + 1].abs();
                assert!(rel < 1e-14, "offdiag {i}: rel {rel:.2e}");
            }
        }
    }

    #[test]
    fn conjugation_2x2_and_1x1() {
        let l = BidiagonalModel::from_entries(1.0, 0.0, vec![2.0, 3.0], vec![7.0]).unwrap();
        let m = l.conjugate_antidiagonal();
        assert_eq!(m.diag(), &[3.0, 2.0]);
        assert_eq!(m.subdiag(), &[-7.0]);

        let l1 = BidiagonalModel::from_entries(1.0, 0.0, vec![4.0], vec![]).unwrap();
        let m1 = l1.conjugate_antidiagonal();
        assert_eq!(m1.diag(), &[4.0]);
    }

    #[test]
    fn conjugation_preserves_gram_spectrum() {
        let mut s = RandomStream::new(45, 0);
        let l = sample_model(8, 2.0, 0.5, &mut s).unwrap();
        let t = l.gram_tridiagonal();
        let dense_llt = oracle::dense_from_tridiagonal(t.diag(), t.offdiag());
        let m = l.conjugate_antidiagonal();
        let dense_m = m.to_dense();
        let dense_mmt = oracle::dense_mul_transpose(&dense_m, &dense_m);
        let ev_l = oracle::jacobi_eigenvalues(&dense_llt);
        let ev_m = oracle::jacobi_eigenvalues(&dense_mmt);
        for (a, b) in ev_l.iter().zip(ev_m.iter()) {
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn kernel_matches_dense_inverse() {
        let mut s = RandomStream::new(46, 0);
        let l = sample_model(5, 2.0, 0.0, &mut s).unwrap();
        let m = l.conjugate_antidiagonal();
        let kernel = inverse_kernel(&m).unwrap();
        let n = 5.0f64;
        let scaled: Vec<Vec<f64>> = m
            .to_dense()
            .iter()
            .map(|row| row.iter().map(|v| v * n.sqrt()).collect())
            .collect();
        let inv = oracle::lower_triangular_inverse(&scaled);
        for i in 0..5 {
            for j in 0..5 {
                let want = n * inv[i][j].abs();
                let got = kernel.cell(i, j);
                if j > i {
                    assert_eq!(got, 0.0);
                } else {
                    let rel = (got - want).abs() / want;
                    assert!(rel < 1e-12, "({i},{j}): {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn kernel_single_cell() {
        let m = LowerBidiagonal::from_entries(vec![2.0], vec![]).unwrap();
        let k = inverse_kernel(&m).unwrap();
        assert!((k.cell(0, 0) - 0.5).abs() < 1e-15); // √(1)·/2 = 1/d
        let zero = LowerBidiagonal::from_entries(vec![0.0], vec![]).unwrap();
        assert!(inverse_kernel(&zero).is_err());
    }

    #[test]
    fn norm_sq_of_scaled_identity() {
        // M = c·I: λ_min(MMᵀ) = c², so the squared norm is 1/(n c²).
        let n = 7;
        let c = 1.7;
        let m = LowerBidiagonal::from_entries(vec![c; n], vec![0.0; n - 1]).unwrap();
        let k = inverse_kernel(&m).unwrap();
        let norm = operator_norm_sq(&k, 1e-13).unwrap();
        let want = 1.0 / (n as f64 * c * c);
        assert!((norm - want).abs() < 1e-12 * want, "{norm} vs {want}");
    }

    #[test]
    fn norm_identity_random_instances() {
        // ‖(Kⁿ)ᵀKⁿ‖ · n·λ_min = 1 to 1e-8 — algebraic, not statistical.
        let mut s = RandomStream::new(47, 0);
        for (beta, a) in [(1.0, 0.0), (2.0, 1.0), (4.0, 0.5)] {
            for _ in 0..10 {
                let n = 30;
                let l = sample_model(n, beta, a, &mut s).unwrap();
                let lam_min =
                    smallest_eigenvalues_relative(&l.gram_tridiagonal(), 1, 1e-13).unwrap()[0];
                let kernel = inverse_kernel(&l.conjugate_antidiagonal()).unwrap();
                let norm = operator_norm_sq(&kernel, 1e-13).unwrap();
                let product = norm * n as f64 * lam_min;
                assert!(
                    (product - 1.0).abs() < 1e-8,
                    "beta={beta}, a={a}: product {product}"
                );
            }
        }
    }

    #[test]
    fn exact_exponential_law_small_n() {
        // β(a+1) = 2 makes nλ₀ exactly Exponential(rate β/2) at every n.
        let samples = 10_000;
        let mut s = RandomStream::new(48, 0);
        let d = &sample_scaled_minima(20, 2.0, 0.0, 1, samples, &mut s).unwrap()[0];
        let ks = d.ks_distance(|x| oracle::exponential_cdf(x, 1.0));
        let band = dkw_band(samples, 0.01).unwrap();
        assert!(ks <= band, "beta=2: ks {ks} vs band {band}");

        let d = &sample_scaled_minima(20, 4.0, -0.5, 1, samples, &mut s).unwrap()[0];
        let ks = d.ks_distance(|x| oracle::exponential_cdf(x, 2.0));
        assert!(ks <= band, "beta=4: ks {ks} vs band {band}");
    }

    #[test]
    fn scaled_minima_ordered() {
        let mut s = RandomStream::new(49, 0);
        for _ in 0..50 {
            let draw = scaled_minima_draw(12, 1.0, 0.0, 3, &mut s).unwrap();
            assert!(draw[0] > 0.0);
            assert!(draw[0] < draw[1] && draw[1] < draw[2], "{draw:?}");
        }
    }

    #[test]
    fn prefactor_law_of_large_numbers() {
        // √(nβ)/χ_{(⌊nx⌋+a)β} → 1/√x: sample mean over 1e3 instances within
        // 3 standard errors at n = 1e4.
        let n = 10_000usize;
        let (beta, a) = (2.0, 0.5);
        let mut s = RandomStream::new(50, 0);
        for x in [0.25, 0.5, 1.0] {
            let r = ((n as f64 * x).floor() + a) * beta;
            let idx = ChiIndex::new(r).unwrap();
            let m = 1000;
            let vals: Vec<f64> =
                (0..m).map(|_| (n as f64 * beta).sqrt() / s.chi(idx)).collect();
            let mean = vals.iter().sum::<f64>() / m as f64;
            let sd = (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (m as f64 - 1.0))
                .sqrt();
            let se = sd / (m as f64).sqrt();
            let want = 1.0 / x.sqrt();
            assert!(
                (mean - want).abs() < 3.0 * se,
                "x={x}: mean {mean} vs {want} (se {se:.2e})"
            );
        }
    }

    #[test]
    fn limit_kernel_zero_noise_and_support() {
        let path = EnvironmentPath::zero(&[0.0, 1.0, 2.0]).unwrap();
        // a = 2, x = 1, y = 0.25: 1^{-3/2}·0.25¹ = 0.25.
        let v = limit_kernel_value(1.0, 0.25, 2.0, 2.0, &path).unwrap();
        assert!((v - 0.25).abs() < 1e-14, "{v}");
        assert_eq!(limit_kernel_value(0.25, 0.5, 2.0, 2.0, &path).unwrap(), 0.0);
        assert_eq!(limit_kernel_value(0.5, 0.5, 2.0, 2.0, &path).unwrap(), 0.0);
        // β = ∞ falls back to the deterministic kernel.
        let vi = limit_kernel_value(1.0, 0.25, 2.0, f64::INFINITY, &path).unwrap();
        assert!((vi - 0.25).abs() < 1e-14);
    }

    #[test]
    fn limit_kernel_log_mean_is_deterministic_part() {
        // The stochastic integral is a centered martingale, so the mean of
        // the log kernel is the deterministic exponent.
        let (x, y, a, beta) = (1.0, 0.25, 1.0, 2.0);
        let t_max = (1.0f64 / y).ln();
        let paths = 10_000;
        let mut s = RandomStream::new(51, 0);
        let mut sum = 0.0;
        for _ in 0..paths {
            let path = EnvironmentPath::sample_uniform(t_max, t_max / 64.0, &mut s).unwrap();
            sum += limit_kernel_value(x, y, a, beta, &path).unwrap().ln();
        }
        let mean = sum / paths as f64;
        let want = -0.5 * (1.0 + a) * x.ln() + 0.5 * a * y.ln();
        // exponent sd = √(log(x/y)/β) ⇒ 4 SE band
        let band = 4.0 * ((x / y).ln() / beta / paths as f64).sqrt();
        assert!((mean - want).abs() < band, "mean {mean} vs {want}");
    }

    #[test]
    fn parameter_domain_errors() {
        let mut s = RandomStream::new(52, 0);
        assert!(sample_model(0, 2.0, 0.0, &mut s).is_err());
        assert!(sample_model(3, 0.0, 0.0, &mut s).is_err());
        assert!(sample_model(3, -1.0, 0.0, &mut s).is_err());
        assert!(sample_model(3, 2.0, -1.0, &mut s).is_err());
        assert!(sample_model(3, f64::INFINITY, 0.0, &mut s).is_err());
        assert!(scaled_minima_draw(3, 2.0, 0.0, 4, &mut s).is_err());
        assert!(sample_scaled_minima(3, 2.0, 0.0, 1, 0, &mut s).is_err());
    }
}
