//! Symmetric tridiagonal matrices and the Sturm-sequence bisection
//! eigensolver shared by the matrix-model and generator modules.
//!
//! The negative-inertia count of the shifted LDLᵀ pivot recursion
//!   d₁ = T₁₁ − σ,  dᵢ = (Tᵢᵢ − σ) − eᵢ₋₁² / dᵢ₋₁
//! equals the number of eigenvalues strictly below σ; bisection on that
//! count brackets any eigenvalue without ever forming eigenvectors. One
//! Sturm pass is O(n), so extracting a handful of smallest eigenvalues from
//! grids with 10⁴–10⁵ nodes stays cheap enough for Monte Carlo use.

use crate::{Error, Result};

/// Symmetric tridiagonal matrix: `diag` of length n, `offdiag` of length
/// n − 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Domain("matrix must have at least one row".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "offdiag length {} must be diag length {} minus one",
                offdiag.len(),
                diag.len()
            )));
        }
        Ok(SymmetricTridiagonal { diag, offdiag })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Gershgorin interval [lo, hi] containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i < n - 1 { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }
}

/// Number of eigenvalues of `t` strictly below `sigma`.
///
/// Pivots that land on zero are nudged to ±1e-300 with their sign kept.
/// The guard is a tiny absolute floor rather than a norm-scaled one: the
/// generator discretizations this solver serves are graded over ~20 orders
/// of magnitude, and a global ε·‖T‖ clamp would swallow every pivot in the
/// physically relevant rows.
pub fn sturm_count(t: &SymmetricTridiagonal, sigma: f64) -> usize {
    let n = t.n();
    let guard = 1e-300;

    let mut count = 0;
    let mut d = t.diag[0] - sigma;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let d_safe = if d.abs() < guard {
            if d >= 0.0 {
                guard
            } else {
                -guard
            }
        } else {
            d
        };
        #[cfg(not(feature = "fault-inject-sturm"))]
        {
            d = (t.diag[i] - sigma) - t.offdiag[i - 1] * t.offdiag[i - 1] / d_safe;
        }
        #[cfg(feature = "fault-inject-sturm")]
        {
            // Negative control: corrupted pivot update.
            d = (t.diag[i] - sigma) + t.offdiag[i - 1] * t.offdiag[i - 1] / d_safe;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues of `t`, ascending, each bracketed to width
/// ≤ `tol` by bisection on the Sturm count.
pub fn smallest_eigenvalues(t: &SymmetricTridiagonal, k: usize, tol: f64) -> Result<Vec<f64>> {
    let n = t.n();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k = {k} must be in 1..={n}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let (glo, ghi) = t.gershgorin();
    let mut out = Vec::with_capacity(k);
    // Eigenvalue j is the boundary between count ≤ j and count ≥ j + 1.
    // Successive eigenvalues reuse the previous one as the lower bracket.
    let mut lo_base = glo;
    for j in 0..k {
        let mut lo = lo_base;
        let mut hi = ghi;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break; // interval at floating-point resolution
            }
            if sturm_count(t, mid) <= j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let ev = 0.5 * (lo + hi);
        out.push(ev);
        lo_base = lo;
    }
    Ok(out)
}

/// Like [`smallest_eigenvalues`], but bisection stops at relative width
/// `rel_tol` of the current midpoint. Suited to spectra whose scale is not
/// known in advance (the smallest Gram eigenvalue shrinks like 1/n while the
/// Gershgorin radius grows like n).
pub fn smallest_eigenvalues_relative(
    t: &SymmetricTridiagonal,
    k: usize,
    rel_tol: f64,
) -> Result<Vec<f64>> {
    let n = t.n();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k = {k} must be in 1..={n}")));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {rel_tol} must be positive")));
    }
    let (glo, ghi) = t.gershgorin();
    let mut out = Vec::with_capacity(k);
    let mut lo_base = glo;
    for j in 0..k {
        let mut lo = lo_base;
        let mut hi = ghi;
        for _ in 0..4000 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= rel_tol * mid.abs() || mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(t, mid) <= j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
        lo_base = lo;
    }
    Ok(out)
}

#[cfg(all(test, not(feature = "fault-inject-sturm")))]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    fn random_tridiag(n: usize, stream: &mut RandomStream) -> SymmetricTridiagonal {
        let diag: Vec<f64> = (0..n).map(|_| stream.gaussian() * 2.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|_| stream.gaussian()).collect();
        SymmetricTridiagonal::new(diag, off).unwrap()
    }

    #[test]
    fn count_outside_gershgorin() {
        let mut s = RandomStream::new(21, 0);
        let t = random_tridiag(10, &mut s);
        let (lo, hi) = t.gershgorin();
        assert_eq!(sturm_count(&t, lo - 1.0), 0);
        assert_eq!(sturm_count(&t, hi + 1.0), 10);
    }

    #[test]
    fn count_at_median_of_dense_oracle() {
        let mut s = RandomStream::new(22, 0);
        for _ in 0..20 {
            let t = random_tridiag(10, &mut s);
            let dense = oracle::dense_from_tridiagonal(t.diag(), t.offdiag());
            let evals = oracle::jacobi_eigenvalues(&dense);
            // σ halfway between the 5th and 6th eigenvalue ⇒ count 5.
            let sigma = 0.5 * (evals[4] + evals[5]);
            assert_eq!(sturm_count(&t, sigma), 5);
        }
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let t = SymmetricTridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]).unwrap();
        let evs = smallest_eigenvalues(&t, 3, 1e-12).unwrap();
        for (ev, want) in evs.iter().zip([1.0, 2.0, 3.0]) {
            assert!((ev - want).abs() < 1e-10, "{ev} vs {want}");
        }
    }

    #[test]
    fn single_row_returns_diagonal() {
        let t = SymmetricTridiagonal::new(vec![4.25], vec![]).unwrap();
        let evs = smallest_eigenvalues(&t, 1, 1e-14).unwrap();
        assert!((evs[0] - 4.25).abs() < 1e-12);
    }

    #[test]
    fn matches_dense_jacobi_oracle() {
        // 50 random 12×12 instances, relative error ≤ 1e-10.
        let mut s = RandomStream::new(23, 0);
        for _ in 0..50 {
            let t = random_tridiag(12, &mut s);
            let dense = oracle::dense_from_tridiagonal(t.diag(), t.offdiag());
            let oracle_evals = oracle::jacobi_eigenvalues(&dense);
            let evs = smallest_eigenvalues(&t, 12, 1e-13).unwrap();
            for (a, b) in evs.iter().zip(oracle_evals.iter()) {
                let scale = b.abs().max(1e-3);
                assert!(
                    (a - b).abs() / scale < 1e-10,
                    "sturm {a} vs jacobi {b} (rel {:.2e})",
                    (a - b).abs() / scale
                );
            }
        }
    }

    #[test]
    fn invalid_arguments_rejected() {
        let t = SymmetricTridiagonal::new(vec![1.0, 2.0], vec![0.5]).unwrap();
        assert!(smallest_eigenvalues(&t, 3, 1e-10).is_err());
        assert!(smallest_eigenvalues(&t, 0, 1e-10).is_err());
        assert!(smallest_eigenvalues(&t, 1, 0.0).is_err());
        assert!(SymmetricTridiagonal::new(vec![1.0], vec![2.0]).is_err());
        assert!(SymmetricTridiagonal::new(vec![], vec![]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// The Sturm count is nondecreasing in σ on random instances.
        #[test]
        fn sturm_count_monotone(seed in 0u64..1000, n in 2usize..20) {
            let mut s = RandomStream::new(seed, 99);
            let t = random_tridiag(n, &mut s);
            let (lo, hi) = t.gershgorin();
            let mut prev = 0;
            for i in 0..=40 {
                let sigma = lo + (hi - lo) * i as f64 / 40.0;
                let c = sturm_count(&t, sigma);
                prop_assert!(c >= prev, "count dropped from {prev} to {c} at sigma={sigma}");
                prev = c;
            }
        }

        /// Bisection eigenvalues are consistent with the count: exactly j+1
        /// eigenvalues lie below eigenvalue j plus a small margin.
        #[test]
        fn eigenvalues_consistent_with_count(seed in 0u64..1000, n in 2usize..16) {
            let mut s = RandomStream::new(seed, 98);
            let t = random_tridiag(n, &mut s);
            let evs = smallest_eigenvalues(&t, n, 1e-11).unwrap();
            for (j, ev) in evs.iter().enumerate() {
                prop_assert!(sturm_count(&t, ev + 1e-7) >= j + 1);
            }
            for w in evs.windows(2) {
                prop_assert!(w[0] <= w[1] + 1e-11);
            }
        }
    }
}
