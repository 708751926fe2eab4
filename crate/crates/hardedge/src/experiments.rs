//! Batch experiment runners behind the CLI: deterministic parallel fan-out,
//! CSV outputs, and JSON reproducibility manifests.
//!
//! Task i of every run draws from stream id `(phase << 32) | i` under the
//! master seed, and results are merged by task index, so outputs are
//! byte-identical for any worker count. CSV files carry a header row,
//! comma separators, '.' decimals and 17 significant digits; a manifest in
//! the output directory records the command, parameters, seed and stream
//! policy needed to reproduce them.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::scaled_minima_draw;
use crate::riccati::{
    cdf_lambda_k, hard_to_soft, CountRoute, HardEdgeParams, TransitionEstimate,
};
use crate::rng::RandomStream;
use crate::sbo::{sbo_eigenvalues, RightBoundary};
use crate::{Error, Result};

pub const MANIFEST_SCHEMA: &str = "hardedge-manifest/1";
pub const STREAM_POLICY: &str = "stream_id = (phase << 32) | task_index; merge by task index";

/// Largest matrix size the runner accepts per sample (one Sturm pass is
/// O(n), so this keeps 10⁴-sample studies inside desk-scale budgets).
pub const MAX_ENSEMBLE_N: usize = 100_000;

/// Stream phases, one per independently seeded family of tasks.
pub mod phase {
    pub const ENSEMBLE: u64 = 1;
    pub const SBO: u64 = 2;
    pub const RICCATI: u64 = 3;
    pub const TRANSITION_BASE: u64 = 16; // +2 per (eta, mu) cell
}

pub fn stream_base(phase: u64) -> u64 {
    phase << 32
}

/// Serialize β so that the infinite (zero-noise) case survives JSON.
fn beta_to_json(beta: f64) -> serde_json::Value {
    if beta.is_finite() {
        serde_json::json!(beta)
    } else {
        serde_json::json!("inf")
    }
}

/// Reproducibility manifest: this plus the tool version reproduces every
/// CSV byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentManifest {
    pub schema: &'static str,
    pub command: String,
    pub params: serde_json::Value,
    pub master_seed: u64,
    pub stream_policy: &'static str,
    pub tool_version: &'static str,
    pub created_unix: u64,
}

impl ExperimentManifest {
    pub fn new(command: &str, params: serde_json::Value, master_seed: u64) -> Self {
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ExperimentManifest {
            schema: MANIFEST_SCHEMA,
            command: command.to_string(),
            params,
            master_seed,
            stream_policy: STREAM_POLICY,
            tool_version: env!("CARGO_PKG_VERSION"),
            created_unix,
        }
    }
}

/// 17 significant digits, '.' decimal, locale-free.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_manifest(dir: &Path, manifest: &ExperimentManifest) -> Result<PathBuf> {
    let path = dir.join("manifest.json");
    let mut f = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, manifest)?;
    f.write_all(b"\n")?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// ensemble

#[derive(Debug, Clone)]
pub struct EnsembleRunParams {
    pub n: usize,
    pub beta: f64,
    pub a: f64,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Sample `samples` draws of (nλ₀ … nλ_{k−1}) in parallel; rows ordered by
/// task index.
pub fn ensemble_samples(p: &EnsembleRunParams) -> Result<Vec<Vec<f64>>> {
    if p.samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    if p.n > MAX_ENSEMBLE_N {
        return Err(Error::Domain(format!(
            "n = {} exceeds the desk-scale cap {MAX_ENSEMBLE_N}",
            p.n
        )));
    }
    (0..p.samples)
        .into_par_iter()
        .map(|i| {
            let mut stream = RandomStream::new(p.seed, stream_base(phase::ENSEMBLE) + i as u64);
            scaled_minima_draw(p.n, p.beta, p.a, p.k, &mut stream)
        })
        .collect()
}

/// CSV of scaled eigenvalue samples plus a manifest.
pub fn run_ensemble(p: &EnsembleRunParams, out_dir: &Path) -> Result<PathBuf> {
    let rows = ensemble_samples(p)?;
    ensure_dir(out_dir)?;
    let header: Vec<String> = (0..p.k).map(|j| format!("nlambda{j}")).collect();
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let csv = out_dir.join("samples.csv");
    write_csv(&csv, &header_refs, rows)?;
    let manifest = ExperimentManifest::new(
        "ensemble",
        serde_json::json!({
            "n": p.n, "beta": beta_to_json(p.beta), "a": p.a,
            "k": p.k, "samples": p.samples,
        }),
        p.seed,
    );
    write_manifest(out_dir, &manifest)?;
    Ok(csv)
}

// ---------------------------------------------------------------------------
// sbo

#[derive(Debug, Clone)]
pub struct SboRunParams {
    pub beta: f64,
    pub a: f64,
    pub l: f64,
    pub h: f64,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub boundary: RightBoundary,
}

/// Sampled lowest-k generator eigenvalues; β = ∞ collapses to a single
/// deterministic draw.
pub fn sbo_samples(p: &SboRunParams) -> Result<Vec<Vec<f64>>> {
    if p.samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    let samples = if p.beta.is_infinite() { 1 } else { p.samples };
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut stream = RandomStream::new(p.seed, stream_base(phase::SBO) + i as u64);
            sbo_eigenvalues(p.a, p.beta, p.l, p.h, p.k, &mut stream, p.boundary)
        })
        .collect()
}

pub fn run_sbo(p: &SboRunParams, out_dir: &Path) -> Result<PathBuf> {
    let rows = sbo_samples(p)?;
    ensure_dir(out_dir)?;
    let header: Vec<String> = (0..p.k).map(|j| format!("Lambda{j}")).collect();
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let csv = out_dir.join("samples.csv");
    write_csv(&csv, &header_refs, rows)?;
    let manifest = ExperimentManifest::new(
        "sbo",
        serde_json::json!({
            "beta": beta_to_json(p.beta), "a": p.a, "domain_length": p.l,
            "step": p.h, "k": p.k, "samples": p.samples,
            "boundary": format!("{:?}", p.boundary),
        }),
        p.seed,
    );
    write_manifest(out_dir, &manifest)?;
    Ok(csv)
}

// ---------------------------------------------------------------------------
// riccati-cdf

#[derive(Debug, Clone)]
pub struct RiccatiCdfRunParams {
    pub beta: f64,
    pub a: f64,
    pub lambda_grid: Vec<f64>,
    pub k: usize,
    pub paths: usize,
    pub l: f64,
    pub dx: f64,
    pub seed: u64,
    pub route: CountRoute,
}

/// Rows (λ, P(Λ_k < λ), SE); one independent path family per grid point.
pub fn riccati_cdf_rows(p: &RiccatiCdfRunParams) -> Result<Vec<Vec<f64>>> {
    if p.lambda_grid.is_empty() {
        return Err(Error::Domain("lambda grid must be nonempty".into()));
    }
    if p.paths == 0 {
        return Err(Error::Domain("paths must be positive".into()));
    }
    let mut rows = Vec::with_capacity(p.lambda_grid.len());
    for (gi, &lambda) in p.lambda_grid.iter().enumerate() {
        let params = HardEdgeParams::new(p.beta, p.a, lambda, p.l, p.dx)?;
        let base = stream_base(phase::RICCATI) + (gi as u64) * (p.paths as u64 + 1);
        let (prob, se) = cdf_lambda_k(&params, p.k, p.route, p.paths, p.seed, base)?;
        rows.push(vec![lambda, prob, se]);
    }
    Ok(rows)
}

pub fn run_riccati_cdf(p: &RiccatiCdfRunParams, out_dir: &Path) -> Result<PathBuf> {
    let rows = riccati_cdf_rows(p)?;
    ensure_dir(out_dir)?;
    let csv = out_dir.join("cdf.csv");
    write_csv(&csv, &["lambda", "p_below", "se"], rows)?;
    let manifest = ExperimentManifest::new(
        "riccati-cdf",
        serde_json::json!({
            "beta": beta_to_json(p.beta), "a": p.a, "grid": p.lambda_grid,
            "k": p.k, "paths": p.paths, "domain_length": p.l, "step": p.dx,
            "route": format!("{:?}", p.route),
        }),
        p.seed,
    );
    write_manifest(out_dir, &manifest)?;
    Ok(csv)
}

// ---------------------------------------------------------------------------
// transition

#[derive(Debug, Clone)]
pub struct TransitionRunParams {
    pub beta: f64,
    pub mu_grid: Vec<f64>,
    pub eta_list: Vec<f64>,
    pub paths: usize,
    pub dx_scale: f64,
    pub dx_soft: f64,
    pub seed: u64,
}

/// One paired hard/soft estimate per (η, μ) cell.
pub fn transition_estimates(p: &TransitionRunParams) -> Result<Vec<TransitionEstimate>> {
    if p.mu_grid.is_empty() || p.eta_list.is_empty() {
        return Err(Error::Domain("mu grid and eta list must be nonempty".into()));
    }
    if p.paths == 0 {
        return Err(Error::Domain("paths must be positive".into()));
    }
    let mut out = Vec::new();
    for (ei, &eta) in p.eta_list.iter().enumerate() {
        for (mi, &mu) in p.mu_grid.iter().enumerate() {
            let cell = (ei * p.mu_grid.len() + mi) as u64;
            let base = stream_base(phase::TRANSITION_BASE + 2 * cell);
            out.push(hard_to_soft(eta, mu, p.beta, p.paths, p.dx_scale, p.dx_soft, p.seed, base)?);
        }
    }
    Ok(out)
}

pub fn run_transition(p: &TransitionRunParams, out_dir: &Path) -> Result<PathBuf> {
    let estimates = transition_estimates(p)?;
    ensure_dir(out_dir)?;
    let csv = out_dir.join("transition.csv");
    write_csv(
        &csv,
        &["eta", "mu", "p_hard", "se_hard", "p_soft", "se_soft", "abs_diff"],
        estimates.iter().map(|e| {
            vec![e.eta, e.mu, e.p_hard, e.se_hard, e.p_soft, e.se_soft, e.abs_diff()]
        }),
    )?;
    let manifest = ExperimentManifest::new(
        "transition",
        serde_json::json!({
            "beta": beta_to_json(p.beta), "mu_grid": p.mu_grid, "eta_list": p.eta_list,
            "paths": p.paths, "dx_scale": p.dx_scale, "dx_soft": p.dx_soft,
        }),
        p.seed,
    );
    write_manifest(out_dir, &manifest)?;
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_has_17_significant_digits() {
        let s = format_value(std::f64::consts::PI);
        assert!(s.starts_with("3.1415926535897931e0"), "{s}");
        let parsed: f64 = s.parse().unwrap();
        assert_eq!(parsed.to_bits(), std::f64::consts::PI.to_bits());
    }

    #[test]
    fn ensemble_runs_reproduce_byte_identically() {
        let p = EnsembleRunParams { n: 8, beta: 2.0, a: 0.0, k: 2, samples: 50, seed: 91 };
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let csv1 = run_ensemble(&p, dir1.path()).unwrap();
        let csv2 = run_ensemble(&p, dir2.path()).unwrap();
        assert_eq!(fs::read(csv1).unwrap(), fs::read(csv2).unwrap());
        assert!(dir1.path().join("manifest.json").exists());
    }

    #[test]
    fn ensemble_rejects_oversized_n() {
        let p = EnsembleRunParams {
            n: MAX_ENSEMBLE_N + 1,
            beta: 2.0,
            a: 0.0,
            k: 1,
            samples: 1,
            seed: 0,
        };
        assert!(matches!(ensemble_samples(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn sbo_infinite_beta_single_deterministic_row() {
        let p = SboRunParams {
            beta: f64::INFINITY,
            a: 0.0,
            l: 8.0,
            h: 1.0 / 128.0,
            k: 2,
            samples: 100,
            seed: 92,
            boundary: RightBoundary::Free,
        };
        let rows = sbo_samples(&p).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0][0] > 0.0 && rows[0][0] < rows[0][1]);
    }

    #[test]
    fn riccati_cdf_zero_lambda_probability_zero() {
        let p = RiccatiCdfRunParams {
            beta: 2.0,
            a: 0.0,
            lambda_grid: vec![0.0],
            k: 0,
            paths: 100,
            l: 12.0,
            dx: 1e-2,
            seed: 93,
            route: CountRoute::PsiZeros,
        };
        let rows = riccati_cdf_rows(&p).unwrap();
        assert_eq!(rows[0][1], 0.0);
    }

    #[test]
    fn manifest_serializes_infinite_beta() {
        let m = ExperimentManifest::new(
            "sbo",
            serde_json::json!({ "beta": beta_to_json(f64::INFINITY) }),
            7,
        );
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"inf\""), "{s}");
        assert!(s.contains(MANIFEST_SCHEMA));
    }

    #[test]
    fn empty_parameter_errors() {
        let p = RiccatiCdfRunParams {
            beta: 2.0,
            a: 0.0,
            lambda_grid: vec![],
            k: 0,
            paths: 10,
            l: 12.0,
            dx: 1e-2,
            seed: 0,
            route: CountRoute::PsiZeros,
        };
        assert!(riccati_cdf_rows(&p).is_err());
        let t = TransitionRunParams {
            beta: 2.0,
            mu_grid: vec![],
            eta_list: vec![100.0],
            paths: 10,
            dx_scale: 1e-2,
            dx_soft: 1e-3,
            seed: 0,
        };
        assert!(transition_estimates(&t).is_err());
    }
}
