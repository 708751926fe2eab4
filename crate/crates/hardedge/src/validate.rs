//! The validation suite: every statistical and algebraic acceptance check,
//! runnable at full scale (the published thresholds) or scaled down for
//! smoke testing. The `validate` subcommand runs all checks and writes a
//! deterministic JSON report; the integration test suite asserts each check
//! at full scale.
//!
//! Scaling: sample counts multiply by `scale` (floored at small minima) and
//! every sample-size-dependent threshold (DKW bands, two-sample KS floors)
//! is recomputed from the actual counts, so reduced runs stay calibrated.
//! Fixed algebraic tolerances (the 1e-8 norm identity, the 1e-2 spectral
//! oracle) do not scale.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{
    inverse_kernel, operator_norm_sq, sample_model, scaled_minima_draw,
};
use crate::experiments::{write_manifest, ExperimentManifest};
use crate::oracle;
use crate::riccati::{
    cdf_lambda_k, count_distribution, hard_to_soft, CountRoute, HardEdgeParams,
};
use crate::rng::RandomStream;
use crate::sbo::{sbo_eigenvalues, zero_noise_eigenvalue, RightBoundary};
use crate::stats::{dkw_band, EmpiricalDistribution};
use crate::tridiag::{smallest_eigenvalues_relative, SymmetricTridiagonal};
use crate::{Error, Result};

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub name: &'static str,
    pub pass: bool,
    /// Worst observed value across the check's sub-cases.
    pub measured: f64,
    /// The bound `measured` is held against.
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn from_bound(
        id: &'static str,
        name: &'static str,
        measured: f64,
        threshold: f64,
        detail: String,
    ) -> Self {
        CheckResult { id, name, pass: measured <= threshold, measured, threshold, detail }
    }
}

/// Full validation report; serialization is deterministic for a fixed seed
/// and scale.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub tool_version: &'static str,
    pub seed: u64,
    pub scale: f64,
    pub ok: bool,
    pub checks: Vec<CheckResult>,
}

fn scaled(base: usize, scale: f64, min: usize) -> usize {
    ((base as f64 * scale).round() as usize).max(min)
}

fn base_stream(check: u64, offset: u64) -> u64 {
    ((100 + check) << 32) + offset
}

// ---------------------------------------------------------------------------
// 1. Exact exponential law of the finite-n ensemble

pub fn check_exact_exponential_law(seed: u64, scale: f64) -> Result<CheckResult> {
    let samples = scaled(10_000, scale, 400);
    let band = dkw_band(samples, 0.01)?;
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for (bi, &n) in [4usize, 32, 256].iter().enumerate() {
        let draws: Result<Vec<f64>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut s =
                    RandomStream::new(seed, base_stream(1, (bi * samples + i) as u64));
                Ok(scaled_minima_draw(n, 2.0, 0.0, 1, &mut s)?[0])
            })
            .collect();
        let d = EmpiricalDistribution::new(draws?)?;
        let ks = d.ks_distance(|x| oracle::exponential_cdf(x, 1.0));
        detail.push_str(&format!("n={n}: ks={ks:.5}; "));
        worst = worst.max(ks);
    }
    detail.push_str(&format!("dkw band {band:.5}"));
    Ok(CheckResult::from_bound(
        "exact-exponential-law",
        "finite-n exact law: n*lambda_min ~ Exp(1) at beta=2, a=0",
        worst,
        band,
        detail,
    ))
}

// ---------------------------------------------------------------------------
// 2. Limit-operator exponential law

pub fn check_sbo_exponential_law(seed: u64, scale: f64) -> Result<CheckResult> {
    let paths = scaled(10_000, scale, 400);
    let (l, h) = (20.0, 1.0 / 512.0);
    let draws: Result<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut s = RandomStream::new(seed, base_stream(2, i as u64));
            Ok(sbo_eigenvalues(0.0, 2.0, l, h, 1, &mut s, RightBoundary::Free)?[0])
        })
        .collect();
    let d = EmpiricalDistribution::new(draws?)?;
    let ks = d.ks_distance(|x| oracle::exponential_cdf(x, 1.0));
    // DKW at 1% plus the published discretization slack.
    let threshold = dkw_band(paths, 0.01)? + 0.0137;
    Ok(CheckResult::from_bound(
        "sbo-exponential-law",
        "generator sampling: Lambda_0 ~ Exp(1) at beta=2, a=0",
        ks,
        threshold,
        format!("paths={paths}, L={l}, h=2^-9, ks={ks:.5}"),
    ))
}

// ---------------------------------------------------------------------------
// 3. Deterministic zero-noise spectral oracle

pub fn check_bessel_oracle(_seed: u64, scale: f64) -> Result<CheckResult> {
    let h = if scale >= 0.5 { 1.0 / 1024.0 } else { 1.0 / 256.0 };
    let l = 12.0;
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for &a in &[0.0, 0.5, 2.0] {
        // β = ∞: deterministic, stream unused.
        let mut s = RandomStream::new(0, 0);
        let evs = sbo_eigenvalues(a, f64::INFINITY, l, h, 3, &mut s, RightBoundary::Free)?;
        for (k, ev) in evs.iter().enumerate() {
            let want = zero_noise_eigenvalue(a, k)?;
            let err = (ev - want).abs();
            worst = worst.max(err);
            detail.push_str(&format!("a={a},k={k}: {ev:.6} vs {want:.6}; "));
        }
    }
    Ok(CheckResult::from_bound(
        "bessel-zero-oracle",
        "zero-noise spectrum matches j^2_(a,k+1)/4 from the Bessel oracle",
        worst,
        1e-2,
        detail,
    ))
}

// ---------------------------------------------------------------------------
// 4. Exact norm identity

pub fn check_norm_identity(seed: u64, scale: f64) -> Result<CheckResult> {
    let per_config = scaled(100, scale, 10);
    let n = 30;
    let configs = [(1.0, 0.0), (2.0, 1.0), (4.0, 0.5)];
    let worst = configs
        .par_iter()
        .enumerate()
        .map(|(ci, &(beta, a))| -> Result<f64> {
            let mut worst = 0.0f64;
            for i in 0..per_config {
                let mut s =
                    RandomStream::new(seed, base_stream(4, (ci * per_config + i) as u64));
                let l = sample_model(n, beta, a, &mut s)?;
                let lam_min =
                    smallest_eigenvalues_relative(&l.gram_tridiagonal(), 1, 1e-13)?[0];
                let kernel = inverse_kernel(&l.conjugate_antidiagonal())?;
                let norm = operator_norm_sq(&kernel, 1e-13)?;
                worst = worst.max((norm * n as f64 * lam_min - 1.0).abs());
            }
            Ok(worst)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    Ok(CheckResult::from_bound(
        "norm-identity",
        "operator_norm_sq * n*lambda_min = 1 on random instances",
        worst,
        1e-8,
        format!("{} instances per (beta, a) config, n = {n}", per_config),
    ))
}

// ---------------------------------------------------------------------------
// 5. Route equivalence (psi zeros vs riccati explosions)

pub fn check_route_equivalence(seed: u64, scale: f64) -> Result<CheckResult> {
    let paths = scaled(10_000, scale, 400);
    // two-sample KS floor rescales like 1/sqrt(paths)
    let threshold = 0.02 * (10_000.0 / paths as f64).sqrt().max(1.0);
    let mut worst = 0.0f64;
    let mut detail = String::new();
    let mut cfg = 0u64;
    for &beta in &[1.0, 2.0, 4.0] {
        for &a in &[0.0, 1.0] {
            for &lambda in &[1.0, 4.0] {
                let params = HardEdgeParams::new(beta, a, lambda, 12.0, 1e-3)?;
                let base = base_stream(5, cfg * (2 * paths as u64 + 2));
                let psi =
                    count_distribution(&params, CountRoute::PsiZeros, paths, seed, base)?;
                let ric = count_distribution(
                    &params,
                    CountRoute::RiccatiExplosions,
                    paths,
                    seed,
                    base + paths as u64,
                )?;
                let d1 = EmpiricalDistribution::new(psi.iter().map(|&c| c as f64).collect())?;
                let d2 = EmpiricalDistribution::new(ric.iter().map(|&c| c as f64).collect())?;
                let ks = d1.ks_distance_two_sample(&d2);
                worst = worst.max(ks);
                detail.push_str(&format!("({beta},{a},{lambda}): ks={ks:.4}; "));
                cfg += 1;
            }
        }
    }
    Ok(CheckResult::from_bound(
        "route-equivalence",
        "explosion counts and zero counts agree in law on the (beta,a,lambda) grid",
        worst,
        threshold,
        detail,
    ))
}

// ---------------------------------------------------------------------------
// 6. Hard-edge convergence trend of the matrix model toward the generator law

pub fn check_convergence_trend(seed: u64, scale: f64) -> Result<CheckResult> {
    let samples = scaled(10_000, scale, 400);
    let (beta, a) = (2.0, 1.0);

    let sbo_draws: Result<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut s = RandomStream::new(seed, base_stream(6, i as u64));
            Ok(sbo_eigenvalues(a, beta, 12.0, 1.0 / 512.0, 1, &mut s, RightBoundary::Free)?[0])
        })
        .collect();
    let reference = EmpiricalDistribution::new(sbo_draws?)?;

    let mut ks_values = Vec::new();
    for (bi, &n) in [50usize, 200, 800].iter().enumerate() {
        let draws: Result<Vec<f64>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut s = RandomStream::new(
                    seed,
                    base_stream(6, (samples + bi * samples + i) as u64),
                );
                Ok(scaled_minima_draw(n, beta, a, 1, &mut s)?[0])
            })
            .collect();
        let d = EmpiricalDistribution::new(draws?)?;
        ks_values.push(d.ks_distance_two_sample(&reference));
    }

    let decreasing = ks_values[0] > ks_values[1] && ks_values[1] > ks_values[2];
    let final_ok = ks_values[2] <= 0.05;
    let detail = format!(
        "KS(n lambda_0, Lambda_0) at n = 50, 200, 800: {:.4}, {:.4}, {:.4} ({} samples each)",
        ks_values[0], ks_values[1], ks_values[2], samples
    );
    Ok(CheckResult {
        id: "hard-edge-convergence",
        name: "KS(n*lambda_0, Lambda_0) decreases with n and ends below 0.05",
        pass: decreasing && final_ok,
        measured: ks_values[2],
        threshold: 0.05,
        detail,
    })
}

// ---------------------------------------------------------------------------
// 7. Hard-to-soft transition trend

pub fn check_transition_trend(seed: u64, scale: f64) -> Result<CheckResult> {
    let paths = scaled(10_000, scale, 400);
    let beta = 2.0;
    let etas = [100.0, 1000.0, 10_000.0];
    let mut worst_final = 0.0f64;
    let mut pass = true;
    let mut detail = String::new();
    for (mi, &mu) in [-2.0, 0.0, 2.0].iter().enumerate() {
        let mut diffs = Vec::new();
        let mut ses = Vec::new();
        for (ei, &eta) in etas.iter().enumerate() {
            let base = base_stream(7, ((mi * 3 + ei) as u64) * (2 * paths as u64 + 2));
            let est = hard_to_soft(eta, mu, beta, paths, 1e-2, 1e-3, seed, base)?;
            diffs.push(est.abs_diff());
            ses.push((est.se_hard * est.se_hard + est.se_soft * est.se_soft).sqrt());
        }
        // Decreasing within the paired statistical resolution, and small at
        // the largest eta.
        for i in 1..3 {
            let slack = 2.0 * (ses[i] * ses[i] + ses[i - 1] * ses[i - 1]).sqrt();
            if diffs[i] > diffs[i - 1] + slack {
                pass = false;
            }
        }
        if diffs[2] > 0.05 {
            pass = false;
        }
        worst_final = worst_final.max(diffs[2]);
        detail.push_str(&format!(
            "mu={mu}: |dP| = {:.4}, {:.4}, {:.4}; ",
            diffs[0], diffs[1], diffs[2]
        ));
    }
    Ok(CheckResult {
        id: "hard-to-soft-transition",
        name: "hard-edge and soft-edge survival probabilities merge as eta grows",
        pass,
        measured: worst_final,
        threshold: 0.05,
        detail,
    })
}

// ---------------------------------------------------------------------------
// 8. Solver oracle

pub fn check_solver_oracle(seed: u64, _scale: f64) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut s = RandomStream::new(seed, base_stream(8, i));
        let n = 12;
        let diag: Vec<f64> = (0..n).map(|_| 2.0 * s.gaussian()).collect();
        let off: Vec<f64> = (0..n - 1).map(|_| s.gaussian()).collect();
        let t = SymmetricTridiagonal::new(diag, off)?;
        let sturm = smallest_eigenvalues_relative(&t, n, 1e-13)?;
        let dense = oracle::dense_from_tridiagonal(t.diag(), t.offdiag());
        let jacobi = oracle::jacobi_eigenvalues(&dense);
        for (a, b) in sturm.iter().zip(jacobi.iter()) {
            worst = worst.max((a - b).abs() / b.abs().max(1e-3));
        }
    }
    Ok(CheckResult::from_bound(
        "solver-oracle",
        "Sturm bisection matches the dense Jacobi oracle",
        worst,
        1e-10,
        "50 random 12x12 tridiagonals, relative error".into(),
    ))
}

// ---------------------------------------------------------------------------
// 9. Numerical hygiene: step halving, start height, domain doubling

pub fn check_step_halving(seed: u64, scale: f64) -> Result<CheckResult> {
    let paths = scaled(10_000, scale, 400);
    let coarse = HardEdgeParams::new(2.0, 0.0, 2.0, 12.0, 1e-3)?;
    let fine = HardEdgeParams::new(2.0, 0.0, 2.0, 12.0, 5e-4)?;
    let (p1, se1) =
        cdf_lambda_k(&coarse, 0, CountRoute::PsiZeros, paths, seed, base_stream(9, 0))?;
    let (p2, se2) = cdf_lambda_k(
        &fine,
        0,
        CountRoute::PsiZeros,
        paths,
        seed,
        base_stream(9, paths as u64),
    )?;
    let combined = (se1 * se1 + se2 * se2).sqrt();
    Ok(CheckResult::from_bound(
        "step-halving",
        "P(count = 0) stable under dx -> dx/2",
        (p1 - p2).abs(),
        2.0 * combined,
        format!("p(dx)={p1:.4}, p(dx/2)={p2:.4}, 2*combined se={:.4}", 2.0 * combined),
    ))
}

pub fn check_start_height(seed: u64, scale: f64) -> Result<CheckResult> {
    let paths = scaled(10_000, scale, 400);
    let base = HardEdgeParams::new(2.0, 0.0, 2.0, 12.0, 1e-3)?;
    let taller = base.with_start_height(10.0 * base.p_start);
    let (p1, se1) = cdf_lambda_k(
        &base,
        0,
        CountRoute::RiccatiExplosions,
        paths,
        seed,
        base_stream(10, 0),
    )?;
    let (p2, se2) = cdf_lambda_k(
        &taller,
        0,
        CountRoute::RiccatiExplosions,
        paths,
        seed,
        base_stream(10, 0),
    )?;
    let combined = (se1 * se1 + se2 * se2).sqrt().max(1e-12);
    Ok(CheckResult::from_bound(
        "start-height",
        "entrance from +inf: P_start vs 10*P_start",
        (p1 - p2).abs(),
        combined,
        format!("p={p1:.4} vs {p2:.4}, combined se={combined:.4}"),
    ))
}

pub fn check_domain_doubling(seed: u64, scale: f64) -> Result<CheckResult> {
    let paths = scaled(10_000, scale, 400);
    // a = 1: the scale integral grows like e^x, so beyond the certified L
    // the count law is settled and doubling must change nothing beyond one
    // standard error. Coupled streams reuse identical increments on the
    // shared (0, L] portion, so the difference isolates the truncation
    // deficit. (At a = 0 the last-zero location is heavy-tailed and no
    // desk-scale L passes; the CDF docs spell that regime out.)
    let mut probs = Vec::new();
    let mut se_last: f64 = 0.0;
    for &l in &[12.0, 24.0, 48.0] {
        let params = HardEdgeParams::new(2.0, 1.0, 2.0, l, 1e-3)?;
        let (p, se) =
            cdf_lambda_k(&params, 0, CountRoute::PsiZeros, paths, seed, base_stream(11, 0))?;
        probs.push(p);
        se_last = se;
    }
    let measured = (probs[2] - probs[1]).abs();
    Ok(CheckResult::from_bound(
        "domain-doubling",
        "P(count = 0) stable once the forcing lambda*e^{-x} is spent",
        measured,
        se_last.max(1e-12),
        format!("P at L=12,24,48: {:.4}, {:.4}, {:.4}", probs[0], probs[1], probs[2]),
    ))
}

// ---------------------------------------------------------------------------

/// Run the whole suite. `scale = 1` reproduces the published thresholds.
pub fn run_all_checks(seed: u64, scale: f64) -> Result<ValidationReport> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::Domain(format!("scale {scale} must lie in (0, 1]")));
    }
    let checks = vec![
        check_exact_exponential_law(seed, scale)?,
        check_sbo_exponential_law(seed, scale)?,
        check_bessel_oracle(seed, scale)?,
        check_norm_identity(seed, scale)?,
        check_route_equivalence(seed, scale)?,
        check_convergence_trend(seed, scale)?,
        check_transition_trend(seed, scale)?,
        check_solver_oracle(seed, scale)?,
        check_step_halving(seed, scale)?,
        check_start_height(seed, scale)?,
        check_domain_doubling(seed, scale)?,
    ];
    let ok = checks.iter().all(|c| c.pass);
    Ok(ValidationReport {
        tool_version: env!("CARGO_PKG_VERSION"),
        seed,
        scale,
        ok,
        checks,
    })
}

/// Run the suite and write `report.json` (deterministic) plus a manifest.
pub fn run_validate(seed: u64, scale: f64, out_dir: &Path) -> Result<(ValidationReport, PathBuf)> {
    let report = run_all_checks(seed, scale)?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("report.json");
    let mut f = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, &report)?;
    f.write_all(b"\n")?;
    let manifest = ExperimentManifest::new(
        "validate",
        serde_json::json!({ "scale": scale }),
        seed,
    );
    write_manifest(out_dir, &manifest)?;
    Ok((report, path))
}
