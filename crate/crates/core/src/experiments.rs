//! Desk-scale experiment drivers: radial-Fourier reconstruction over a p-grid
//! with per-iteration error curves, best-s-term redundancy studies with
//! coefficient subsampling, and the frame-bound ratio table.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::frame::q_max_from_bounds;
use crate::io::{self, CsvWriter};
use crate::linalg;
use crate::sensing::{radial_mask, MaskedFft, SensingOperator};
use crate::solver::{best_s_term, reweighted_lp, IterateRecord, SolverConfig};
use crate::transforms::{frame_operator_apply, AnalysisOperator, Haar2d, Normalization};

/// Standard modified Shepp-Logan ellipses: (intensity, a, b, x0, y0, phi_deg).
const SHEPP_LOGAN_ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// Rasterizes the modified Shepp-Logan phantom at side x side, values in
/// [0, 1], pixel centers on [-1, 1]^2. Deterministic.
pub fn shepp_logan(side: usize) -> Result<Vec<f64>> {
    if side < 32 {
        return Err(Error::InvalidSize(format!("phantom side {side} < 32")));
    }
    let mut img = vec![0.0f64; side * side];
    for (a_int, a, b, x0, y0, phi_deg) in SHEPP_LOGAN_ELLIPSES {
        let phi = phi_deg.to_radians();
        let (ct, st) = (phi.cos(), phi.sin());
        for i in 0..side {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / side as f64;
            for j in 0..side {
                let x = 2.0 * (j as f64 + 0.5) / side as f64 - 1.0;
                let dx = x - x0;
                let dy = y - y0;
                let u = (ct * dx + st * dy) / a;
                let v = (-st * dx + ct * dy) / b;
                if u * u + v * v <= 1.0 {
                    img[i * side + j] += a_int;
                }
            }
        }
    }
    for v in img.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(img)
}

/// Deterministic piecewise-smooth test image (smooth shading, soft blobs,
/// hard-edged boxes and a mild texture), values in [0, 1]. Stands in for a
/// natural photograph in the redundancy experiments.
pub fn synthetic_natural_image(side: usize) -> Vec<f64> {
    let mut img = vec![0.0f64; side * side];
    let f = side as f64;
    for i in 0..side {
        let y = i as f64 / f;
        for j in 0..side {
            let x = j as f64 / f;
            let mut v = 0.25 + 0.35 * y + 0.1 * x;
            // soft hill and valley
            v += 0.30 * (-((x - 0.3).powi(2) + (y - 0.35).powi(2)) / 0.02).exp();
            v -= 0.20 * (-((x - 0.75).powi(2) + (y - 0.2).powi(2)) / 0.05).exp();
            // hard-edged boxes
            if (0.55..0.85).contains(&x) && (0.55..0.8).contains(&y) {
                v += 0.25;
            }
            if (0.1..0.35).contains(&x) && (0.65..0.9).contains(&y) {
                v -= 0.15;
            }
            // soft disk
            let r = ((x - 0.5).powi(2) + (y - 0.62).powi(2)).sqrt();
            v += 0.18 / (1.0 + ((r - 0.1) / 0.01).exp());
            // faint texture
            v += 0.02 * (37.0 * x).sin() * (29.0 * y).cos();
            img[i * side + j] = v.clamp(0.0, 1.0);
        }
    }
    img
}

#[derive(Debug, Clone)]
pub enum PhantomSource {
    SheppLogan,
    File(PathBuf),
}

/// Parameters of the radial-Fourier reconstruction experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: String,
    pub phantom: PhantomSource,
    pub side: usize,
    pub levels: usize,
    pub normalization: Normalization,
    pub num_lines: usize,
    pub p_grid: Vec<f64>,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.side.is_power_of_two() {
            return Err(Error::InvalidSize(format!("side {} is not a power of two", self.side)));
        }
        for &p in &self.p_grid {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidP(p));
            }
        }
        if self.p_grid.is_empty() {
            return Err(Error::InvalidRange("p_grid must be nonempty".into()));
        }
        if let PhantomSource::File(path) = &self.phantom {
            if !path.exists() {
                return Err(Error::InvalidRange(format!("phantom file {path:?} does not exist")));
            }
        }
        Ok(())
    }

    /// Reads a flat key=value spec file. Recognized keys: name, phantom
    /// (shepp_logan or a PGM path), side, levels, normalization, lines,
    /// p_grid (comma separated), epsilon, outer_iters, inner_tol,
    /// inner_max_iters, mu, nu, seed, output_dir.
    pub fn from_file(path: &Path) -> Result<Self> {
        let kv = io::read_key_values(path)?;
        let get = |k: &str| kv.get(k).map(|s| s.as_str());
        let parse_f64 = |k: &str, v: &str| -> Result<f64> {
            v.parse().map_err(|_| Error::Parse(format!("bad {k}: {v:?}")))
        };
        let parse_usize = |k: &str, v: &str| -> Result<usize> {
            v.parse().map_err(|_| Error::Parse(format!("bad {k}: {v:?}")))
        };

        let side = match get("side") {
            Some(v) => parse_usize("side", v)?,
            None => 128,
        };
        let mut p_grid = Vec::new();
        if let Some(v) = get("p_grid") {
            for tok in v.split(',') {
                p_grid.push(parse_f64("p_grid", tok.trim())?);
            }
        } else {
            p_grid = vec![0.5, 1.0];
        }
        let mut solver = SolverConfig::new(1.0);
        if let Some(v) = get("epsilon") {
            solver.epsilon = parse_f64("epsilon", v)?;
        }
        if let Some(v) = get("outer_iters") {
            solver.outer_iters = parse_usize("outer_iters", v)?;
        }
        if let Some(v) = get("inner_tol") {
            solver.inner_tol = parse_f64("inner_tol", v)?;
        } else {
            solver.inner_tol = 1e-4;
        }
        if let Some(v) = get("inner_max_iters") {
            solver.inner_max_iters = parse_usize("inner_max_iters", v)?;
        } else {
            solver.inner_max_iters = 4000;
        }
        if let Some(v) = get("mu") {
            solver.mu = Some(parse_f64("mu", v)?);
        }
        if let Some(v) = get("nu") {
            solver.nu = parse_f64("nu", v)?;
        }
        let seed = match get("seed") {
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("bad seed: {v:?}")))?,
            None => 0,
        };
        solver.seed = seed;
        Ok(ExperimentSpec {
            name: get("name").unwrap_or("fourier").to_string(),
            phantom: match get("phantom") {
                None | Some("shepp_logan") => PhantomSource::SheppLogan,
                Some(p) => PhantomSource::File(PathBuf::from(p)),
            },
            side,
            levels: match get("levels") {
                Some(v) => parse_usize("levels", v)?,
                None => 3,
            },
            normalization: match get("normalization") {
                None | Some("parseval") => Normalization::Parseval,
                Some("unit_norm") => Normalization::UnitNorm,
                Some(other) => return Err(Error::Parse(format!("unknown normalization {other:?}"))),
            },
            num_lines: match get("lines") {
                Some(v) => parse_usize("lines", v)?,
                None => 30,
            },
            p_grid,
            solver,
            output_dir: PathBuf::from(get("output_dir").unwrap_or("out")),
            seed,
        })
    }

    fn load_phantom(&self) -> Result<Vec<f64>> {
        match &self.phantom {
            PhantomSource::SheppLogan => shepp_logan(self.side),
            PhantomSource::File(path) => {
                let (w, h, pixels) = io::read_pgm(path)?;
                if w != self.side || h != self.side {
                    return Err(Error::InvalidShape(format!(
                        "phantom is {w}x{h}, spec side is {}",
                        self.side
                    )));
                }
                Ok(pixels.iter().map(|&p| p as f64 / 255.0).collect())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct OuterErrorRow {
    pub outer_iter: usize,
    pub rel_error: f64,
    pub rel_change: f64,
}

#[derive(Debug, Clone)]
pub struct PRun {
    pub p: f64,
    pub rows: Vec<OuterErrorRow>,
    pub final_rel_error: f64,
    pub reconstruction: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub mask_cardinality: usize,
    pub sampling_fraction: f64,
    /// Per-p outcome; solver failures are recorded without aborting other p.
    pub runs: Vec<(f64, std::result::Result<PRun, String>)>,
    pub wall_seconds: f64,
    pub input_hash: String,
    pub seed: u64,
    pub config_echo: String,
}

fn rel_error(x: &[Complex64], reference: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, &ri) in x.iter().zip(reference) {
        num += (xi.re - ri).powi(2) + xi.im.powi(2);
        den += ri * ri;
    }
    (num / den).sqrt()
}

/// Measures the phantom through a radial-line Fourier mask and reconstructs
/// with the reweighted solver for every p in the grid (shared seed), writing
/// the error CSV, reconstruction PGMs and the mask PGM.
pub fn run_fourier_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let start = Instant::now();
    let phantom = spec.load_phantom()?;
    let psi = Haar2d::new(spec.side, spec.levels, spec.normalization)?;
    let mask = radial_mask(spec.side, spec.num_lines)?;
    let mask_cardinality = mask.cardinality();
    let sampling_fraction = mask_cardinality as f64 / (spec.side * spec.side) as f64;
    let a = MaskedFft::new(mask.clone())?;
    let x0: Vec<Complex64> = linalg::real_to_complex(&phantom);
    let y = a.apply(&x0);

    let mut hasher = Sha256::new();
    for &v in &phantom {
        hasher.update(v.to_le_bytes());
    }
    let config_echo = format!(
        "side={} levels={} normalization={:?} lines={} p_grid={:?} epsilon={} outer_iters={} inner_tol={} inner_max_iters={} nu={} mu={:?} seed={}",
        spec.side,
        spec.levels,
        spec.normalization,
        spec.num_lines,
        spec.p_grid,
        spec.solver.epsilon,
        spec.solver.outer_iters,
        spec.solver.inner_tol,
        spec.solver.inner_max_iters,
        spec.solver.nu,
        spec.solver.mu,
        spec.seed
    );
    hasher.update(config_echo.as_bytes());
    let input_hash = format!("{:x}", hasher.finalize());

    let runs: Vec<(f64, std::result::Result<PRun, String>)> = spec
        .p_grid
        .par_iter()
        .map(|&p| {
            let mut config = spec.solver.clone();
            config.p = p;
            config.seed = spec.seed;
            let outcome = reweighted_lp(&a, &psi, &y, &config)
                .map(|res| {
                    let rows: Vec<OuterErrorRow> = res
                        .per_outer
                        .iter()
                        .enumerate()
                        .map(|(k, d)| OuterErrorRow {
                            outer_iter: k + 1,
                            rel_error: match &d.iterate {
                                IterateRecord::Full(x) => rel_error(x, &phantom),
                                IterateRecord::Digest(_) => f64::NAN,
                            },
                            rel_change: d.rel_change,
                        })
                        .collect();
                    let final_rel_error = rel_error(&res.x_hat, &phantom);
                    PRun {
                        p,
                        rows,
                        final_rel_error,
                        reconstruction: res.x_hat.iter().map(|z| z.re).collect(),
                    }
                })
                .map_err(|e| e.to_string());
            (p, outcome)
        })
        .collect();

    std::fs::create_dir_all(&spec.output_dir)?;
    let mut csv = CsvWriter::create(
        &spec.output_dir.join("relative_error.csv"),
        &["p", "outer_iter", "rel_error", "rel_change", "seed"],
    )?;
    for (p, outcome) in &runs {
        if let Ok(run) = outcome {
            for row in &run.rows {
                csv.row(&[
                    format!("{p}"),
                    format!("{}", row.outer_iter),
                    format!("{}", row.rel_error),
                    format!("{}", row.rel_change),
                    format!("{}", spec.seed),
                ])?;
            }
        }
    }
    io::write_mask_pgm(&spec.output_dir.join("mask.pgm"), &mask)?;
    for (p, outcome) in &runs {
        if let Ok(run) = outcome {
            io::write_image_pgm(
                &spec.output_dir.join(format!("recon_p{p:.2}.pgm")),
                spec.side,
                &run.reconstruction,
            )?;
        }
    }

    Ok(ExperimentReport {
        name: spec.name.clone(),
        mask_cardinality,
        sampling_fraction,
        runs,
        wall_seconds: start.elapsed().as_secs_f64(),
        input_hash,
        seed: spec.seed,
        config_echo,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct StermResult {
    pub rel_error: f64,
    pub psnr: f64,
    pub s_used: usize,
    pub n_coeffs: usize,
    pub kept_nonzero: usize,
}

/// Best-s-term approximation study: analysis coefficients are optionally
/// subsampled (every `stride`-th coefficient in raster order over the
/// concatenated bands), thresholded to the `s = keep_fraction * side^2`
/// largest, and synthesized with the canonical dual of the (subsampled)
/// frame. `keep_fraction` may exceed 1 up to the redundancy factor so the
/// full coefficient set can be kept.
pub fn run_sterm_experiment(
    image: &[f64],
    side: usize,
    levels: usize,
    normalization: Normalization,
    keep_fraction: f64,
    stride: usize,
) -> Result<StermResult> {
    let psi = Haar2d::new(side, levels, normalization)?;
    let n = side * side;
    if image.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: image.len() });
    }
    let n_coeffs = psi.n_coeffs();
    let redundancy = n_coeffs as f64 / n as f64;
    if !(keep_fraction > 0.0 && keep_fraction <= redundancy) {
        return Err(Error::InvalidRange(format!(
            "keep_fraction {keep_fraction} outside (0, {redundancy}]"
        )));
    }
    if stride < 1 {
        return Err(Error::InvalidRange("stride must be >= 1".into()));
    }
    let x0 = linalg::real_to_complex(image);
    let mut coeffs = psi.forward(&x0);
    if stride > 1 {
        for (i, c) in coeffs.iter_mut().enumerate() {
            if i % stride != 0 {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
    let s = ((keep_fraction * n as f64).round() as usize).min(n_coeffs);
    let kept = best_s_term(&coeffs, s);
    let kept_nonzero = kept.iter().filter(|c| c.norm() > 0.0).count();

    // canonical-dual synthesis of the (subsampled) frame: solve S' x = Psi* c
    let b = psi.adjoint(&kept);
    let x_hat = if stride == 1 && psi.is_parseval() {
        b
    } else {
        let apply = |v: &[Complex64]| -> Vec<Complex64> {
            if stride == 1 {
                frame_operator_apply(&psi, v)
            } else {
                let mut c = psi.forward(v);
                for (i, ci) in c.iter_mut().enumerate() {
                    if i % stride != 0 {
                        *ci = Complex64::new(0.0, 0.0);
                    }
                }
                psi.adjoint(&c)
            }
        };
        linalg::conjugate_gradient(apply, &b, 1e-12, 20_000)?
    };

    let rel = rel_error(&x_hat, image);
    let mse: f64 = x_hat
        .iter()
        .zip(image)
        .map(|(xi, &ri)| (xi.re - ri).powi(2) + xi.im.powi(2))
        .sum::<f64>()
        / n as f64;
    let psnr = -10.0 * mse.log10();
    Ok(StermResult { rel_error: rel, psnr, s_used: s, n_coeffs, kept_nonzero })
}

#[derive(Debug, Clone)]
pub struct FrameTableRow {
    pub side: usize,
    pub levels: usize,
    pub c1: f64,
    pub c2: f64,
    pub ratio: f64,
    pub n_coeffs: usize,
    pub q_max: Vec<(f64, usize)>,
}

/// Frame-bound ratio table for 2D transforms: extreme eigenvalues of the
/// frame operator by power / inverse-power iteration, the inverse redundancy
/// 1/N, and the controllability ceiling per p.
pub fn frame_bound_table(
    configs: &[(usize, usize)],
    normalization: Normalization,
    p_grid: &[f64],
) -> Result<Vec<FrameTableRow>> {
    configs
        .iter()
        .map(|&(side, levels)| {
            let psi = Haar2d::new(side, levels, normalization)?;
            let n = psi.dim();
            let apply = |v: &[Complex64]| frame_operator_apply(&psi, v);
            let c2 = linalg::power_iteration_checked(apply, n, 2000, 1e-6, 0x7ab1e)?;
            let c1 = if psi.is_parseval() {
                // S = I exactly; skip the inverse iteration
                linalg::power_iteration_checked(apply, n, 2000, 1e-6, 0x7ab1e)?
            } else {
                linalg::inverse_power_checked(apply, n, 2000, 1e-6, 1e-12, 0x7ab1e)?
            };
            let n_coeffs = psi.n_coeffs();
            let q_max = p_grid
                .iter()
                .map(|&p| Ok((p, q_max_from_bounds(c1, c2, n_coeffs, p)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(FrameTableRow { side, levels, c1, c2, ratio: c1 / c2, n_coeffs, q_max })
        })
        .collect()
}

/// Writes the frame-bound table as CSV: one row per (J, p).
pub fn write_frame_table_csv(path: &Path, rows: &[FrameTableRow]) -> Result<()> {
    let mut csv = CsvWriter::create(
        path,
        &["levels", "side", "c1", "c2", "ratio", "inv_n", "p", "q_max"],
    )?;
    for r in rows {
        for &(p, q) in &r.q_max {
            csv.row(&[
                format!("{}", r.levels),
                format!("{}", r.side),
                format!("{}", r.c1),
                format!("{}", r.c2),
                format!("{}", r.ratio),
                format!("{}", 1.0 / r.n_coeffs as f64),
                format!("{p}"),
                format!("{q}"),
            ])?;
        }
    }
    Ok(())
}
