//! Measurement operators: dense Gaussian matrices, rows subsampled from a
//! measure-orthonormal system, and the masked unitary 2D Fourier transform
//! with radial-line masks.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg;

/// Linear measurement map `C^n -> C^m` with its adjoint.
pub trait SensingOperator: Send + Sync {
    fn m(&self) -> usize;
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64>;
}

/// Dense i.i.d. N(0, 1/m) matrix, deterministic under `seed`.
#[derive(Debug, Clone)]
pub struct GaussianOperator {
    rows: Vec<Vec<f64>>,
    n: usize,
}

impl GaussianOperator {
    pub fn new(m: usize, n: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 || m > n {
            return Err(Error::InvalidShape(format!("gaussian operator needs 1 <= m <= n, got m={m} n={n}")));
        }
        let mut rng = linalg::stream_rng(seed, 0x6a55);
        let sigma = (1.0 / m as f64).sqrt();
        let rows = (0..m)
            .map(|_| linalg::standard_normal_vec(&mut rng, n).iter().map(|g| g * sigma).collect())
            .collect();
        Ok(GaussianOperator { rows, n })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

impl SensingOperator for GaussianOperator {
    fn m(&self) -> usize {
        self.rows.len()
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        self.rows
            .iter()
            .map(|r| x.iter().zip(r).map(|(xi, &ri)| xi * ri).sum())
            .collect()
    }

    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.rows.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (yi, r) in y.iter().zip(&self.rows) {
            for (o, &ri) in out.iter_mut().zip(r) {
                *o += yi * ri;
            }
        }
        out
    }
}

/// Unnormalized DFT rows `r_k(j) = exp(-2 pi i jk / n)`. With the uniform
/// measure these satisfy the isotropy condition `sum_i nu_i r_i r_i* = I`.
pub fn dft_rows(n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let phase = -2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64;
                    Complex64::new(phase.cos(), phase.sin())
                })
                .collect()
        })
        .collect()
}

/// Rows drawn from a measure-orthonormal system and scaled by 1/sqrt(m).
#[derive(Debug, Clone)]
pub struct SubsampledOrthogonal {
    rows: Vec<Vec<Complex64>>,
    indices: Vec<usize>,
    n: usize,
}

impl SubsampledOrthogonal {
    /// Draws `m` row indices i.i.d. from `measure` (or without replacement
    /// when `without_replacement` is set) and scales each drawn row by
    /// 1/sqrt(m). The isotropy condition `sum_i nu_i r_i(j) conj(r_i(k)) =
    /// delta_jk` is checked up to 1e-8.
    pub fn new(
        base_rows: &[Vec<Complex64>],
        measure: &[f64],
        m: usize,
        seed: u64,
        without_replacement: bool,
    ) -> Result<Self> {
        let nrows = base_rows.len();
        if nrows == 0 {
            return Err(Error::InvalidShape("base system has no rows".into()));
        }
        let n = base_rows[0].len();
        for r in base_rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
        }
        if measure.len() != nrows {
            return Err(Error::MeasureInvalid(format!(
                "measure has {} entries for {} rows",
                measure.len(),
                nrows
            )));
        }
        if measure.iter().any(|&v| v < 0.0) {
            return Err(Error::MeasureInvalid("negative probability".into()));
        }
        let total: f64 = measure.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::MeasureInvalid(format!("measure sums to {total}")));
        }
        if m == 0 || (without_replacement && m > nrows) {
            return Err(Error::InvalidShape(format!("cannot draw m={m} rows from {nrows}")));
        }

        let mut max_dev: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, &nu) in base_rows.iter().zip(measure) {
                    acc += r[j] * r[k].conj() * nu;
                }
                let target = if j == k { 1.0 } else { 0.0 };
                max_dev = max_dev.max((acc - target).norm());
            }
        }
        if max_dev > 1e-8 {
            return Err(Error::OrthogonalityViolated(max_dev));
        }

        let mut rng = linalg::stream_rng(seed, 0x5b5b);
        let mut indices = Vec::with_capacity(m);
        if without_replacement {
            let mut weights: Vec<f64> = measure.to_vec();
            for _ in 0..m {
                let total: f64 = weights.iter().sum();
                let u: f64 = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = nrows - 1;
                for (i, &w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc && w > 0.0 {
                        chosen = i;
                        break;
                    }
                }
                indices.push(chosen);
                weights[chosen] = 0.0;
            }
        } else {
            for _ in 0..m {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut chosen = nrows - 1;
                for (i, &nu) in measure.iter().enumerate() {
                    acc += nu;
                    if u < acc {
                        chosen = i;
                        break;
                    }
                }
                indices.push(chosen);
            }
        }

        let scale = (1.0 / m as f64).sqrt();
        let rows = indices
            .iter()
            .map(|&i| base_rows[i].iter().map(|z| z * scale).collect())
            .collect();
        Ok(SubsampledOrthogonal { rows, indices, n })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

impl SensingOperator for SubsampledOrthogonal {
    fn m(&self) -> usize {
        self.rows.len()
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        // measurement = <row, x>* convention-free: y_i = sum_j r_i(j) x_j
        self.rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(ri, xj)| ri * xj).sum())
            .collect()
    }

    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.rows.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (yi, r) in y.iter().zip(&self.rows) {
            for (o, ri) in out.iter_mut().zip(r) {
                *o += yi * ri.conj();
            }
        }
        out
    }
}

/// Boolean frequency mask on a centered side x side grid.
#[derive(Debug, Clone)]
pub struct Mask2d {
    pub side: usize,
    grid: Vec<bool>,
}

impl Mask2d {
    pub fn new(side: usize, grid: Vec<bool>) -> Result<Self> {
        if grid.len() != side * side {
            return Err(Error::DimensionMismatch { expected: side * side, got: grid.len() });
        }
        Ok(Mask2d { side, grid })
    }

    pub fn full(side: usize) -> Self {
        Mask2d { side, grid: vec![true; side * side] }
    }

    pub fn cardinality(&self) -> usize {
        self.grid.iter().filter(|&&b| b).count()
    }

    pub fn grid(&self) -> &[bool] {
        &self.grid
    }

    pub fn is_sampled(&self, row: usize, col: usize) -> bool {
        self.grid[row * self.side + col]
    }
}

/// Mask of `num_lines` equiangular digital lines through the DC origin
/// (grid center). Pixels are rasterized along the dominant axis and mirrored
/// through the center, so the mask is symmetric under point reflection.
pub fn radial_mask(side: usize, num_lines: usize) -> Result<Mask2d> {
    if side < 8 {
        return Err(Error::InvalidSize(format!("mask side {side} < 8")));
    }
    if num_lines < 1 {
        return Err(Error::InvalidSize("need at least one line".into()));
    }
    let c = (side / 2) as i64;
    let mut grid = vec![false; side * side];
    let mut mark = |r: i64, q: i64| {
        if r >= 0 && q >= 0 && (r as usize) < side && (q as usize) < side {
            grid[r as usize * side + q as usize] = true;
        }
        let (mr, mq) = (2 * c - r, 2 * c - q);
        if mr >= 0 && mq >= 0 && (mr as usize) < side && (mq as usize) < side {
            grid[mr as usize * side + mq as usize] = true;
        }
    };
    for k in 0..num_lines {
        let theta = std::f64::consts::PI * k as f64 / num_lines as f64;
        let (dx, dy) = (theta.cos(), theta.sin());
        if dx.abs() >= dy.abs() {
            let slope = dy / dx;
            for s in 0..=(side as i64) {
                let q = c + s;
                let r = c + (s as f64 * slope).round() as i64;
                mark(r, q);
            }
        } else {
            let slope = dx / dy;
            for s in 0..=(side as i64) {
                let r = c + s;
                let q = c + (s as f64 * slope).round() as i64;
                mark(r, q);
            }
        }
    }
    Mask2d::new(side, grid)
}

/// Unitary 2D DFT restricted to a frequency mask. Measurements are the masked
/// frequencies flattened in row-major order over the centered grid; the
/// adjoint zero-fills and inverts.
pub struct MaskedFft {
    mask: Mask2d,
    order: Vec<usize>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl MaskedFft {
    pub fn new(mask: Mask2d) -> Result<Self> {
        if mask.cardinality() == 0 {
            return Err(Error::EmptyMask);
        }
        let side = mask.side;
        // standard-ordering flat index for each sampled centered pixel
        let mut order = Vec::with_capacity(mask.cardinality());
        for u in 0..side {
            for v in 0..side {
                if mask.is_sampled(u, v) {
                    let ku = (u + side / 2) % side;
                    let kv = (v + side / 2) % side;
                    order.push(ku * side + kv);
                }
            }
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(side);
        let ifft = planner.plan_fft_inverse(side);
        Ok(MaskedFft { mask, order, fft, ifft })
    }

    pub fn from_radial(side: usize, num_lines: usize) -> Result<Self> {
        Self::new(radial_mask(side, num_lines)?)
    }

    pub fn mask(&self) -> &Mask2d {
        &self.mask
    }

    fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        let side = self.mask.side;
        let plan = if inverse { &self.ifft } else { &self.fft };
        for row in data.chunks_mut(side) {
            plan.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); side];
        for j in 0..side {
            for i in 0..side {
                col[i] = data[i * side + j];
            }
            plan.process(&mut col);
            for i in 0..side {
                data[i * side + j] = col[i];
            }
        }
        let scale = 1.0 / side as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

impl SensingOperator for MaskedFft {
    fn m(&self) -> usize {
        self.order.len()
    }

    fn dim(&self) -> usize {
        self.mask.side * self.mask.side
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim());
        let mut spec = x.to_vec();
        self.fft2(&mut spec, false);
        self.order.iter().map(|&k| spec[k]).collect()
    }

    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.order.len());
        let mut spec = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (&k, &yi) in self.order.iter().zip(y) {
            spec[k] = yi;
        }
        self.fft2(&mut spec, true);
        spec
    }
}

/// Random-pair adjoint consistency check, shared by tests and diagnostics.
pub fn adjoint_defect(op: &dyn SensingOperator, seed: u64) -> f64 {
    let x = linalg::complex_normal_vec(&mut linalg::stream_rng(seed, 1), op.dim());
    let y = linalg::complex_normal_vec(&mut linalg::stream_rng(seed, 2), op.m());
    let lhs = linalg::dot(&op.apply(&x), &y);
    let rhs = linalg::dot(&x, &op.adjoint(&y));
    (lhs - rhs).norm() / (linalg::norm2(&x) * linalg::norm2(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_reproducible_and_validated() {
        let a = GaussianOperator::new(4, 6, 99).unwrap();
        let b = GaussianOperator::new(4, 6, 99).unwrap();
        assert_eq!(a.rows(), b.rows());
        let c = GaussianOperator::new(4, 6, 100).unwrap();
        assert_ne!(a.rows(), c.rows());
        assert!(GaussianOperator::new(0, 6, 1).is_err());
        assert!(GaussianOperator::new(7, 6, 1).is_err());
        assert!(adjoint_defect(&a, 5) < 1e-12);
    }

    #[test]
    fn gaussian_column_norms_concentrate() {
        let op = GaussianOperator::new(250, 300, 42).unwrap();
        let mut mean = 0.0;
        for j in 0..300 {
            let norm: f64 = op.rows().iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
            mean += norm;
        }
        mean /= 300.0;
        assert!(mean > 0.9 && mean < 1.1, "mean column norm {mean}");
    }

    #[test]
    fn subsampled_full_unitary_sampling_is_isometric() {
        let n = 8;
        let base = dft_rows(n);
        let nu = vec![1.0 / n as f64; n];
        let op = SubsampledOrthogonal::new(&base, &nu, n, 3, true).unwrap();
        let x = linalg::complex_normal_vec(&mut linalg::stream_rng(8, 0), n);
        let y = op.apply(&x);
        assert!((linalg::norm2(&y) - linalg::norm2(&x)).abs() < 1e-8);
        assert!(adjoint_defect(&op, 21) < 1e-12);
    }

    #[test]
    fn subsampled_is_deterministic_and_checks_inputs() {
        let base = dft_rows(4);
        let nu = vec![0.25; 4];
        let a = SubsampledOrthogonal::new(&base, &nu, 6, 11, false).unwrap();
        let b = SubsampledOrthogonal::new(&base, &nu, 6, 11, false).unwrap();
        assert_eq!(a.indices(), b.indices());

        let bad_measure = vec![0.3, 0.3, 0.3, 0.3];
        assert!(matches!(
            SubsampledOrthogonal::new(&base, &bad_measure, 2, 0, false),
            Err(Error::MeasureInvalid(_))
        ));
        let skewed = vec![0.7, 0.1, 0.1, 0.1];
        assert!(matches!(
            SubsampledOrthogonal::new(&base, &skewed, 2, 0, false),
            Err(Error::OrthogonalityViolated(_))
        ));
    }

    #[test]
    fn subsampled_monte_carlo_isotropy() {
        let n = 64;
        let base = dft_rows(n);
        let nu = vec![1.0 / n as f64; n];
        let op = SubsampledOrthogonal::new(&base, &nu, 16, 7, false).unwrap();
        let mut rng = linalg::stream_rng(70, 0);
        let mut mean_ratio = 0.0;
        for _ in 0..500 {
            let x = linalg::complex_normal_vec(&mut rng, n);
            let y = op.apply(&x);
            mean_ratio += linalg::norm2(&y).powi(2) / linalg::norm2(&x).powi(2);
        }
        mean_ratio /= 500.0;
        assert!((mean_ratio - 1.0).abs() <= 0.15, "mean energy ratio {mean_ratio}");
    }

    #[test]
    fn radial_mask_single_line_is_centered_row() {
        let mask = radial_mask(8, 1).unwrap();
        assert_eq!(mask.cardinality(), 8);
        for col in 0..8 {
            assert!(mask.is_sampled(4, col));
        }
    }

    #[test]
    fn radial_mask_is_point_symmetric() {
        for &(side, lines) in &[(16usize, 5usize), (32, 7), (64, 30)] {
            let mask = radial_mask(side, lines).unwrap();
            let c = (side / 2) as i64;
            for r in 0..side {
                for q in 0..side {
                    if mask.is_sampled(r, q) {
                        let (mr, mq) = (2 * c - r as i64, 2 * c - q as i64);
                        if mr >= 0 && mq >= 0 && (mr as usize) < side && (mq as usize) < side {
                            assert!(mask.is_sampled(mr as usize, mq as usize));
                        }
                    }
                }
            }
            assert!(mask.is_sampled(side / 2, side / 2), "DC must be sampled");
        }
    }

    #[test]
    fn masked_fft_with_full_mask_is_unitary() {
        let op = MaskedFft::new(Mask2d::full(8)).unwrap();
        let x = linalg::complex_normal_vec(&mut linalg::stream_rng(2, 0), 64);
        let y = op.apply(&x);
        assert!((linalg::norm2(&y) - linalg::norm2(&x)).abs() < 1e-10);
        let back = op.adjoint(&y);
        assert!(linalg::norm2(&linalg::sub(&back, &x)) < 1e-10);
    }

    #[test]
    fn masked_fft_apply_adjoint_is_identity_on_measurements() {
        let op = MaskedFft::from_radial(16, 5).unwrap();
        let y = linalg::complex_normal_vec(&mut linalg::stream_rng(4, 0), op.m());
        let back = op.apply(&op.adjoint(&y));
        assert!(linalg::norm2(&linalg::sub(&back, &y)) < 1e-8 * linalg::norm2(&y));
        assert!(adjoint_defect(&op, 12) < 1e-10);
    }

    #[test]
    fn masked_fft_adjoint_apply_is_projection() {
        let op = MaskedFft::from_radial(16, 3).unwrap();
        let x = linalg::complex_normal_vec(&mut linalg::stream_rng(6, 0), op.dim());
        let p1 = op.adjoint(&op.apply(&x));
        let p2 = op.adjoint(&op.apply(&p1));
        assert!(linalg::norm2(&linalg::sub(&p2, &p1)) < 1e-8 * linalg::norm2(&p1));
    }

    #[test]
    fn empty_mask_is_rejected() {
        let mask = Mask2d::new(8, vec![false; 64]).unwrap();
        assert!(matches!(MaskedFft::new(mask), Err(Error::EmptyMask)));
    }
}
