//! Command-line interface of the analysis-lp toolkit.
//!
//! Sensing-operator spec files (key=value): `kind = gaussian` with `m`, `n`,
//! `seed`; `kind = masked_fft` with `side` and `lines` (or `mask = path.pgm`);
//! `kind = subsampled_dft` with `n`, `m`, `seed`, `replacement = with|without`.
//! Transform spec files: `kind = haar1d|haar2d|matrix` with `n`/`side`,
//! `levels`, `normalization = parseval|unit_norm`, or `file = frame.txt`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use analysis_lp::experiments::{
    frame_bound_table, run_fourier_experiment, run_sterm_experiment, shepp_logan,
    synthetic_natural_image, write_frame_table_csv, ExperimentSpec,
};
use analysis_lp::io;
use analysis_lp::linalg;
use analysis_lp::rip::{
    estimate_localization, estimate_psi_rip, measurement_bound, BoundForm,
    MeasurementBoundInputs,
};
use analysis_lp::sensing::{
    dft_rows, GaussianOperator, MaskedFft, SensingOperator, SubsampledOrthogonal,
};
use analysis_lp::solver::{reweighted_lp, reweighted_lp_dual, SolverConfig};
use analysis_lp::stability::{
    admissible_sparsity, StabilityConstants, StabilityInputs, StabilityVariant,
    NuExponent,
};
use analysis_lp::transforms::{
    frame_operator_apply, AnalysisOperator, Haar1d, Haar2d, MatrixOperator, Normalization,
};

#[derive(Parser)]
#[command(name = "analysis-lp", version, about = "Analysis-formulation lp compressed sensing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Parseval,
    UnitNorm,
}

impl From<NormalizationArg> for Normalization {
    fn from(v: NormalizationArg) -> Self {
        match v {
            NormalizationArg::Parseval => Normalization::Parseval,
            NormalizationArg::UnitNorm => Normalization::UnitNorm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Primal,
    Dual,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstantsVariantArg {
    Primal,
    Parseval,
    Dual,
}

#[derive(Subcommand)]
enum Command {
    /// Radial-Fourier reconstruction experiment from a spec file
    FourierExp {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Best-s-term redundancy study with coefficient subsampling
    StermExp {
        /// PGM image path, or `synthetic` / `shepp_logan`
        #[arg(long, default_value = "synthetic")]
        image: String,
        #[arg(long, default_value_t = 256)]
        side: usize,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = NormalizationArg::UnitNorm)]
        normalization: NormalizationArg,
        /// s as a fraction of side^2 (may exceed 1 up to the redundancy)
        #[arg(long, default_value_t = 0.9)]
        keep_fraction: f64,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long, default_value = "out/sterm.csv")]
        out: PathBuf,
    },
    /// Frame-bound ratio table over 2D transform scales
    FrameTable {
        /// comma-separated side,levels pairs like 64:2,64:4
        #[arg(long, default_value = "64:2,64:4,64:6")]
        configs: String,
        #[arg(long, value_enum, default_value_t = NormalizationArg::UnitNorm)]
        normalization: NormalizationArg,
        #[arg(long, default_value = "0.5,1.0")]
        p_grid: String,
        #[arg(long, default_value = "out/frame_table.csv")]
        out: PathBuf,
    },
    /// Empirical Psi-RIP and localization estimates with measurement bounds
    RipEstimate {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        frame: PathBuf,
        /// comma-separated sparsity levels
        #[arg(long, default_value = "1,2,4,8")]
        s: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// target RIP constant for the measurement bound
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        /// universal constant C of the bound
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
        #[arg(long, default_value = "out/rip.csv")]
        out: PathBuf,
    },
    /// Stability constants over a p-grid
    Constants {
        #[arg(long, value_enum, default_value_t = ConstantsVariantArg::Parseval)]
        variant: ConstantsVariantArg,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 1.0)]
        d1: f64,
        #[arg(long, default_value_t = 1.0)]
        d2: f64,
        #[arg(long, default_value_t = 4)]
        s: usize,
        /// block size M; defaults to 6s
        #[arg(long)]
        m_block: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        delta_sm: f64,
        #[arg(long, default_value_t = 0.0)]
        delta_m: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma1: f64,
        #[arg(long, default_value_t = 1e-4)]
        gamma2: f64,
        /// controllability parameter q (primal) or N (dual) for s_max
        #[arg(long, default_value_t = 100)]
        q: usize,
        #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
        p_grid: String,
        #[arg(long, default_value = "out/constants.csv")]
        out: PathBuf,
    },
    /// Reweighted-lp reconstruction from stored measurements
    Solve {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        nu: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 10)]
        outer_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        inner_tol: f64,
        #[arg(long, default_value_t = 20000)]
        inner_max_iters: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Primal)]
        variant: VariantArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// measurements (complex list file)
        #[arg(long)]
        input: PathBuf,
        /// sensing-operator spec file
        #[arg(long)]
        operator: PathBuf,
        /// transform spec file
        #[arg(long)]
        frame: PathBuf,
        /// output directory for solution + diagnostics CSV
        #[arg(long, default_value = "out/solve")]
        out: PathBuf,
    },
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("bad number {t:?}")))
        .collect()
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| anyhow!("bad integer {t:?}")))
        .collect()
}

fn kv_get<'a>(kv: &'a BTreeMap<String, String>, key: &str, path: &Path) -> Result<&'a str> {
    kv.get(key)
        .map(|s| s.as_str())
        .ok_or_else(|| anyhow!("{path:?}: missing key {key:?}"))
}

fn load_sensing(path: &Path) -> Result<Box<dyn SensingOperator>> {
    let kv = io::read_key_values(path)?;
    let kind = kv_get(&kv, "kind", path)?;
    let parse = |k: &str| -> Result<usize> {
        kv_get(&kv, k, path)?.parse().map_err(|_| anyhow!("bad {k}"))
    };
    let seed = kv.get("seed").map(|s| s.parse::<u64>()).transpose()?.unwrap_or(0);
    match kind {
        "gaussian" => {
            let (m, n) = (parse("m")?, parse("n")?);
            Ok(Box::new(GaussianOperator::new(m, n, seed)?))
        }
        "masked_fft" => {
            if let Some(mask_path) = kv.get("mask") {
                let mask = io::read_mask_pgm(Path::new(mask_path))?;
                Ok(Box::new(MaskedFft::new(mask)?))
            } else {
                let (side, lines) = (parse("side")?, parse("lines")?);
                Ok(Box::new(MaskedFft::from_radial(side, lines)?))
            }
        }
        "subsampled_dft" => {
            let (n, m) = (parse("n")?, parse("m")?);
            let without = matches!(kv.get("replacement").map(|s| s.as_str()), Some("without"));
            let base = dft_rows(n);
            let nu = vec![1.0 / n as f64; n];
            Ok(Box::new(SubsampledOrthogonal::new(&base, &nu, m, seed, without)?))
        }
        other => bail!("unknown sensing kind {other:?}"),
    }
}

fn load_transform(path: &Path) -> Result<Box<dyn AnalysisOperator>> {
    let kv = io::read_key_values(path)?;
    let kind = kv_get(&kv, "kind", path)?;
    let parse = |k: &str| -> Result<usize> {
        kv_get(&kv, k, path)?.parse().map_err(|_| anyhow!("bad {k}"))
    };
    let normalization = match kv.get("normalization").map(|s| s.as_str()) {
        None | Some("parseval") => Normalization::Parseval,
        Some("unit_norm") => Normalization::UnitNorm,
        Some(other) => bail!("unknown normalization {other:?}"),
    };
    match kind {
        "haar1d" => Ok(Box::new(Haar1d::new(parse("n")?, parse("levels")?, normalization)?)),
        "haar2d" => Ok(Box::new(Haar2d::new(parse("side")?, parse("levels")?, normalization)?)),
        "matrix" => {
            let file = kv_get(&kv, "file", path)?;
            let frame = io::read_frame(Path::new(file))?;
            Ok(Box::new(MatrixOperator::new(&frame)))
        }
        other => bail!("unknown transform kind {other:?}"),
    }
}

fn load_image(spec: &str, side: usize) -> Result<Vec<f64>> {
    match spec {
        "synthetic" => Ok(synthetic_natural_image(side)),
        "shepp_logan" => Ok(shepp_logan(side)?),
        path => {
            let (w, h, pixels) = io::read_pgm(Path::new(path))?;
            if w != side || h != side {
                bail!("image is {w}x{h}, expected {side}x{side}");
            }
            Ok(pixels.iter().map(|&p| p as f64 / 255.0).collect())
        }
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}

/// `K = max ||psi_lambda||` and frame bounds of an operator-defined frame.
fn operator_frame_stats(psi: &dyn AnalysisOperator) -> Result<(f64, f64, f64)> {
    let n_coeffs = psi.n_coeffs();
    let mut max_norm: f64 = 0.0;
    let mut e = vec![Complex64::new(0.0, 0.0); n_coeffs];
    for lam in 0..n_coeffs {
        e[lam] = Complex64::new(1.0, 0.0);
        max_norm = max_norm.max(linalg::norm2(&psi.adjoint(&e)));
        e[lam] = Complex64::new(0.0, 0.0);
    }
    let n = psi.dim();
    let apply = |v: &[Complex64]| frame_operator_apply(psi, v);
    let c2 = linalg::power_iteration_checked(&apply, n, 2000, 1e-6, 0xcafe)?;
    let c1 = if psi.is_parseval() {
        c2
    } else {
        linalg::inverse_power_checked(&apply, n, 2000, 1e-6, 1e-12, 0xcafe)?
    };
    Ok((max_norm, c1, c2))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::FourierExp { spec } => {
            let spec = ExperimentSpec::from_file(&spec)?;
            let report = run_fourier_experiment(&spec)?;
            println!(
                "{}: m = {} ({:.2}% sampling), wall = {:.1}s, hash = {}",
                report.name,
                report.mask_cardinality,
                100.0 * report.sampling_fraction,
                report.wall_seconds,
                &report.input_hash[..16]
            );
            for (p, outcome) in &report.runs {
                match outcome {
                    Ok(run) => println!("  p = {p}: final rel error {:.4e}", run.final_rel_error),
                    Err(e) => println!("  p = {p}: FAILED ({e})"),
                }
            }
            println!("outputs in {:?}", spec.output_dir);
        }
        Command::StermExp { image, side, levels, normalization, keep_fraction, stride, out } => {
            let img = load_image(&image, side)?;
            let res =
                run_sterm_experiment(&img, side, levels, normalization.into(), keep_fraction, stride)?;
            println!(
                "J = {levels}, keep = {keep_fraction}, stride = {stride}: rel error {:.4e}, PSNR {:.2} dB ({} of {} coefficients kept)",
                res.rel_error, res.psnr, res.kept_nonzero, res.n_coeffs
            );
            ensure_parent(&out)?;
            let mut csv = io::CsvWriter::create(
                &out,
                &["side", "levels", "normalization", "keep_fraction", "stride", "s", "rel_error", "psnr"],
            )?;
            csv.row(&[
                side.to_string(),
                levels.to_string(),
                format!("{:?}", Normalization::from(normalization)),
                keep_fraction.to_string(),
                stride.to_string(),
                res.s_used.to_string(),
                res.rel_error.to_string(),
                res.psnr.to_string(),
            ])?;
        }
        Command::FrameTable { configs, normalization, p_grid, out } => {
            let mut parsed = Vec::new();
            for tok in configs.split(',') {
                let mut it = tok.trim().split(':');
                let side: usize = it.next().ok_or_else(|| anyhow!("bad config"))?.parse()?;
                let levels: usize = it.next().ok_or_else(|| anyhow!("bad config"))?.parse()?;
                parsed.push((side, levels));
            }
            let p_grid = parse_f64_list(&p_grid)?;
            let rows = frame_bound_table(&parsed, normalization.into(), &p_grid)?;
            for r in &rows {
                println!(
                    "J = {}, side = {}: c1/c2 = {:.4}, 1/N = {:.3e}",
                    r.levels,
                    r.side,
                    r.ratio,
                    1.0 / r.n_coeffs as f64
                );
            }
            ensure_parent(&out)?;
            write_frame_table_csv(&out, &rows)?;
        }
        Command::RipEstimate { operator, frame, s, trials, seed, delta, gamma, constant, out } => {
            let a = load_sensing(&operator)?;
            let psi = load_transform(&frame)?;
            let (max_norm, c1, _c2) = operator_frame_stats(psi.as_ref())?;
            let d2 = if psi.is_parseval() { Some(1.0) } else { None };
            ensure_parent(&out)?;
            let mut csv = io::CsvWriter::create(
                &out,
                &["s", "trials", "delta_hat", "l_hat", "m_bound_primal", "m_bound_identifiable", "seed"],
            )?;
            for s_val in parse_usize_list(&s)? {
                let rip = estimate_psi_rip(a.as_ref(), psi.as_ref(), s_val, trials, seed)?;
                let loc = estimate_localization(psi.as_ref(), s_val, trials, seed)?;
                let bound = measurement_bound(
                    MeasurementBoundInputs {
                        max_norm,
                        c1,
                        d2,
                        delta,
                        s: s_val as f64,
                        localization: loc.l_hat.max(f64::MIN_POSITIVE),
                        n_coeffs: psi.n_coeffs() as f64,
                        gamma,
                        constant,
                    },
                    BoundForm::TheoremStatement,
                )?;
                println!(
                    "s = {s_val}: delta_hat = {:.4}, L_hat = {:.4}, m >= {}",
                    rip.delta_hat, loc.l_hat, bound.m_required
                );
                csv.row(&[
                    s_val.to_string(),
                    trials.to_string(),
                    rip.delta_hat.to_string(),
                    loc.l_hat.to_string(),
                    bound.m_primal.to_string(),
                    bound.m_identifiable.map(|m| m.to_string()).unwrap_or_default(),
                    seed.to_string(),
                ])?;
            }
        }
        Command::Constants {
            variant,
            c1,
            c2,
            d1,
            d2,
            s,
            m_block,
            delta_sm,
            delta_m,
            gamma1,
            gamma2,
            q,
            p_grid,
            out,
        } => {
            let variant = match variant {
                ConstantsVariantArg::Primal => StabilityVariant::Primal,
                ConstantsVariantArg::Parseval => StabilityVariant::Parseval,
                ConstantsVariantArg::Dual => StabilityVariant::Dual,
            };
            let m_block = m_block.unwrap_or(6 * s);
            ensure_parent(&out)?;
            let mut csv = io::CsvWriter::create(
                &out,
                &["p", "variant", "gamma1", "gamma2", "rho", "m_block", "gamma_1", "gamma_2", "c_1", "c_2", "s_max", "nu"],
            )?;
            for p in parse_f64_list(&p_grid)? {
                let adm = admissible_sparsity(variant, p, c1, c2, d2, q, NuExponent::TheoremStatement)?;
                let line = StabilityConstants::compute(StabilityInputs {
                    variant,
                    p,
                    s,
                    m_block,
                    delta_sm,
                    delta_m,
                    c1,
                    c2,
                    d1,
                    d2,
                    gamma1,
                    gamma2,
                });
                match line {
                    Ok(k) => {
                        println!(
                            "p = {p}: Gamma1 = {:.6}, Gamma2 = {:.6}, C1 = {:.6}, C2 = {:.6}, s_max = {}",
                            k.gamma_1, k.gamma_2, k.c_1, k.c_2, adm.s_max
                        );
                        csv.row(&[
                            p.to_string(),
                            format!("{variant:?}"),
                            gamma1.to_string(),
                            gamma2.to_string(),
                            k.rho.to_string(),
                            m_block.to_string(),
                            k.gamma_1.to_string(),
                            k.gamma_2.to_string(),
                            k.c_1.to_string(),
                            k.c_2.to_string(),
                            adm.s_max.to_string(),
                            adm.nu.to_string(),
                        ])?;
                    }
                    Err(e) => {
                        println!("p = {p}: {e}");
                        csv.row(&[
                            p.to_string(),
                            format!("{variant:?}"),
                            gamma1.to_string(),
                            gamma2.to_string(),
                            (s as f64 / m_block as f64).to_string(),
                            m_block.to_string(),
                            "".into(),
                            "".into(),
                            "".into(),
                            "".into(),
                            adm.s_max.to_string(),
                            adm.nu.to_string(),
                        ])?;
                    }
                }
            }
        }
        Command::Solve {
            p,
            mu,
            nu,
            epsilon,
            outer_iters,
            inner_tol,
            inner_max_iters,
            variant,
            seed,
            input,
            operator,
            frame,
            out,
        } => {
            let a = load_sensing(&operator)?;
            let psi = load_transform(&frame)?;
            let y = io::read_complex_vector(&input)?;
            let mut config = SolverConfig::new(p);
            config.mu = mu;
            config.nu = nu;
            config.epsilon = epsilon;
            config.outer_iters = outer_iters;
            config.inner_tol = inner_tol;
            config.inner_max_iters = inner_max_iters;
            config.seed = seed;
            let result = match variant {
                VariantArg::Primal => reweighted_lp(a.as_ref(), psi.as_ref(), &y, &config),
                VariantArg::Dual => reweighted_lp_dual(a.as_ref(), psi.as_ref(), &y, &config),
            }
            .context("reconstruction failed")?;
            std::fs::create_dir_all(&out)?;
            io::write_complex_vector(&out.join("solution.txt"), &result.x_hat)?;
            let mut csv = io::CsvWriter::create(
                &out.join("diagnostics.csv"),
                &["outer_iter", "objective", "data_residual", "rel_change", "inner_converged", "inner_gap", "inner_iterations", "seed"],
            )?;
            for (k, d) in result.per_outer.iter().enumerate() {
                csv.row(&[
                    (k + 1).to_string(),
                    d.objective.to_string(),
                    d.data_residual.to_string(),
                    d.rel_change.to_string(),
                    d.inner_converged.to_string(),
                    d.inner_gap.to_string(),
                    d.inner_iterations.to_string(),
                    seed.to_string(),
                ])?;
            }
            let last = result.per_outer.last().unwrap();
            println!(
                "solved: residual {:.4e}, objective {:.6e}, converged = {}",
                last.data_residual, last.objective, result.converged
            );
            println!("solution in {out:?}");
        }
    }
    Ok(())
}
