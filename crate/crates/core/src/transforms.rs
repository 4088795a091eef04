//! Sparsifying analysis operators: undecimated (a-trous) Haar frames in one
//! and two dimensions, a dense-matrix frame adapter, and the canonical-dual
//! wrapper.
//!
//! Coefficient layout is raster order within each band, bands concatenated
//! coarse-to-fine: the approximation band first, then detail bands from the
//! coarsest level down to level 1. In 2D each level contributes three
//! orientation bands in the order (detail-x, detail-y, detail-xy), where
//! detail-x is high-pass along columns.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg;

/// Linear analysis map `C^n -> C^N` together with its synthesis adjoint.
pub trait AnalysisOperator: Send + Sync {
    /// Ambient dimension n.
    fn dim(&self) -> usize;
    /// Number of coefficients N.
    fn n_coeffs(&self) -> usize;
    /// `x -> (<x, psi_lambda>)_lambda`
    fn forward(&self, x: &[Complex64]) -> Vec<Complex64>;
    /// `c -> sum_lambda c_lambda psi_lambda`
    fn adjoint(&self, c: &[Complex64]) -> Vec<Complex64>;
    fn is_parseval(&self) -> bool {
        false
    }
    fn levels(&self) -> Option<usize> {
        None
    }
}

/// Frame operator application `S x = Psi* Psi x`.
pub fn frame_operator_apply(op: &dyn AnalysisOperator, x: &[Complex64]) -> Vec<Complex64> {
    op.adjoint(&op.forward(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Per-stage filters scaled so the full transform is a Parseval frame.
    Parseval,
    /// Every frame vector has unit Euclidean norm.
    UnitNorm,
}

impl Normalization {
    fn stage_scale(self) -> f64 {
        match self {
            Normalization::Parseval => 0.5,
            Normalization::UnitNorm => std::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

/// Undecimated Haar wavelet frame on C^n with periodic boundary.
#[derive(Debug, Clone)]
pub struct Haar1d {
    n: usize,
    levels: usize,
    normalization: Normalization,
}

impl Haar1d {
    pub fn new(n: usize, levels: usize, normalization: Normalization) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::InvalidSize(format!("signal length {n} is not a power of two")));
        }
        let max_levels = n.trailing_zeros() as usize;
        if levels < 1 || levels > max_levels {
            return Err(Error::InvalidSize(format!(
                "levels {levels} outside 1..={max_levels} for length {n}"
            )));
        }
        Ok(Haar1d { n, levels, normalization })
    }
}

impl AnalysisOperator for Haar1d {
    fn dim(&self) -> usize {
        self.n
    }

    fn n_coeffs(&self) -> usize {
        self.n * (self.levels + 1)
    }

    fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        let s = self.normalization.stage_scale();
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_coeffs()];
        let mut a = x.to_vec();
        for j in 1..=self.levels {
            let t = 1usize << (j - 1);
            let mut next = vec![Complex64::new(0.0, 0.0); n];
            let detail = &mut out[(1 + self.levels - j) * n..(2 + self.levels - j) * n];
            for k in 0..n {
                let hi = a[(k + t) % n];
                next[k] = (a[k] + hi) * s;
                detail[k] = (a[k] - hi) * s;
            }
            a = next;
        }
        out[..n].copy_from_slice(&a);
        out
    }

    fn adjoint(&self, c: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(c.len(), self.n_coeffs());
        let n = self.n;
        let s = self.normalization.stage_scale();
        let mut g = c[..n].to_vec();
        for j in (1..=self.levels).rev() {
            let t = 1usize << (j - 1);
            let v = &c[(1 + self.levels - j) * n..(2 + self.levels - j) * n];
            let mut next = vec![Complex64::new(0.0, 0.0); n];
            for k in 0..n {
                let km = (k + n - t) % n;
                next[k] = (g[k] + v[k]) * s + (g[km] - v[km]) * s;
            }
            g = next;
        }
        g
    }

    fn is_parseval(&self) -> bool {
        self.normalization == Normalization::Parseval
    }

    fn levels(&self) -> Option<usize> {
        Some(self.levels)
    }
}

/// Tensor a-trous Haar frame on side x side images (row-major, periodic).
#[derive(Debug, Clone)]
pub struct Haar2d {
    side: usize,
    levels: usize,
    normalization: Normalization,
}

impl Haar2d {
    pub fn new(side: usize, levels: usize, normalization: Normalization) -> Result<Self> {
        if !side.is_power_of_two() || side < 2 {
            return Err(Error::InvalidSize(format!("side {side} is not a power of two")));
        }
        let max_levels = side.trailing_zeros() as usize;
        if levels < 1 || levels > max_levels {
            return Err(Error::InvalidSize(format!(
                "levels {levels} outside 1..={max_levels} for side {side}"
            )));
        }
        Ok(Haar2d { side, levels, normalization })
    }

    pub fn side(&self) -> usize {
        self.side
    }
}

impl AnalysisOperator for Haar2d {
    fn dim(&self) -> usize {
        self.side * self.side
    }

    fn n_coeffs(&self) -> usize {
        self.dim() * (3 * self.levels + 1)
    }

    fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let side = self.side;
        let s2 = self.normalization.stage_scale().powi(2);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_coeffs()];
        let mut a = x.to_vec();
        for j in 1..=self.levels {
            let t = 1usize << (j - 1);
            let base = (1 + 3 * (self.levels - j)) * n;
            let mut next = vec![Complex64::new(0.0, 0.0); n];
            for r in 0..side {
                let rt = (r + t) % side;
                for c in 0..side {
                    let ct = (c + t) % side;
                    let p00 = a[r * side + c];
                    let p01 = a[r * side + ct];
                    let p10 = a[rt * side + c];
                    let p11 = a[rt * side + ct];
                    let k = r * side + c;
                    next[k] = (p00 + p01 + p10 + p11) * s2;
                    out[base + k] = (p00 - p01 + p10 - p11) * s2; // detail-x
                    out[base + n + k] = (p00 + p01 - p10 - p11) * s2; // detail-y
                    out[base + 2 * n + k] = (p00 - p01 - p10 + p11) * s2; // detail-xy
                }
            }
            a = next;
        }
        out[..n].copy_from_slice(&a);
        out
    }

    fn adjoint(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(coeffs.len(), self.n_coeffs());
        let side = self.side;
        let s2 = self.normalization.stage_scale().powi(2);
        let mut g = coeffs[..n].to_vec();
        for j in (1..=self.levels).rev() {
            let t = 1usize << (j - 1);
            let base = (1 + 3 * (self.levels - j)) * n;
            let dx = &coeffs[base..base + n];
            let dy = &coeffs[base + n..base + 2 * n];
            let dxy = &coeffs[base + 2 * n..base + 3 * n];
            let mut next = vec![Complex64::new(0.0, 0.0); n];
            for r in 0..side {
                let rm = (r + side - t) % side;
                for c in 0..side {
                    let cm = (c + side - t) % side;
                    let k00 = r * side + c;
                    let k01 = r * side + cm;
                    let k10 = rm * side + c;
                    let k11 = rm * side + cm;
                    next[k00] = (g[k00] + g[k01] + g[k10] + g[k11]
                        + dx[k00] - dx[k01] + dx[k10] - dx[k11]
                        + dy[k00] + dy[k01] - dy[k10] - dy[k11]
                        + dxy[k00] - dxy[k01] - dxy[k10] + dxy[k11])
                        * s2;
                }
            }
            g = next;
        }
        g
    }

    fn is_parseval(&self) -> bool {
        self.normalization == Normalization::Parseval
    }

    fn levels(&self) -> Option<usize> {
        Some(self.levels)
    }
}

/// Dense frame exposed as an analysis operator.
#[derive(Debug, Clone)]
pub struct MatrixOperator {
    vectors: Vec<Vec<Complex64>>,
    n: usize,
    parseval: bool,
}

impl MatrixOperator {
    pub fn new(frame: &Frame) -> Self {
        MatrixOperator {
            vectors: frame.vectors().to_vec(),
            n: frame.dim(),
            parseval: frame.is_parseval(1e-10),
        }
    }

    pub fn from_vectors(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let frame = Frame::new(vectors)?;
        Ok(Self::new(&frame))
    }
}

impl AnalysisOperator for MatrixOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn n_coeffs(&self) -> usize {
        self.vectors.len()
    }

    fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        self.vectors.iter().map(|psi| linalg::dot(x, psi)).collect()
    }

    fn adjoint(&self, c: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(c.len(), self.vectors.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (coeff, psi) in c.iter().zip(&self.vectors) {
            for (o, p) in out.iter_mut().zip(psi) {
                *o += coeff * p;
            }
        }
        out
    }

    fn is_parseval(&self) -> bool {
        self.parseval
    }
}

/// Canonical-dual analysis operator `x -> (<x, S^-1 psi_lambda>)`, with the
/// frame operator inverted by conjugate gradients (tolerance 1e-10).
pub struct DualAnalysisOperator<P> {
    base: P,
    parseval: bool,
    cg_max_iters: usize,
}

const DUAL_CG_TOL: f64 = 1e-10;

impl<P: AnalysisOperator> DualAnalysisOperator<P> {
    /// Fails with `IllConditioned` when the frame operator's condition number
    /// estimate exceeds 1e12.
    pub fn new(base: P) -> Result<Self> {
        let parseval = base.is_parseval();
        let n = base.dim();
        if !parseval {
            let apply = |x: &[Complex64]| frame_operator_apply(&base, x);
            let c2 = linalg::power_iteration(apply, n, 60, 0x0d5a);
            let c1 = linalg::inverse_power_iteration(apply, n, 30, 1e-8, 0x0d5a)
                .map_err(|_| Error::IllConditioned { cond: f64::INFINITY, limit: 1e12 })?;
            let cond = c2 / c1;
            if !cond.is_finite() || cond > 1e12 {
                return Err(Error::IllConditioned { cond, limit: 1e12 });
            }
        }
        Ok(DualAnalysisOperator { base, parseval, cg_max_iters: 100_000 })
    }

    pub fn base(&self) -> &P {
        &self.base
    }

    fn solve_frame_operator(&self, b: &[Complex64]) -> Vec<Complex64> {
        linalg::conjugate_gradient(
            |x| frame_operator_apply(&self.base, x),
            b,
            DUAL_CG_TOL,
            self.cg_max_iters,
        )
        .expect("frame operator CG solve failed despite conditioning check")
    }
}

impl<P: AnalysisOperator> AnalysisOperator for DualAnalysisOperator<P> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn n_coeffs(&self) -> usize {
        self.base.n_coeffs()
    }

    fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        if self.parseval {
            return self.base.forward(x);
        }
        self.base.forward(&self.solve_frame_operator(x))
    }

    fn adjoint(&self, c: &[Complex64]) -> Vec<Complex64> {
        if self.parseval {
            return self.base.adjoint(c);
        }
        self.solve_frame_operator(&self.base.adjoint(c))
    }

    fn is_parseval(&self) -> bool {
        self.parseval
    }

    fn levels(&self) -> Option<usize> {
        self.base.levels()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_complex(n: usize, seed: u64) -> Vec<Complex64> {
        linalg::complex_normal_vec(&mut linalg::stream_rng(seed, 0), n)
    }

    fn check_adjoint(op: &dyn AnalysisOperator, seed: u64) {
        let x = random_complex(op.dim(), seed);
        let cvec = random_complex(op.n_coeffs(), seed + 1);
        let lhs = linalg::dot(&op.forward(&x), &cvec);
        let rhs = linalg::dot(&x, &op.adjoint(&cvec));
        let scale = linalg::norm2(&x) * linalg::norm2(&cvec);
        assert!((lhs - rhs).norm() <= 1e-10 * scale, "adjoint identity violated: {lhs} vs {rhs}");
    }

    /// Analytic a-trous Haar atoms: box differences with periodic wrap.
    fn haar1d_atoms(n: usize, levels: usize, norm: Normalization) -> Vec<Vec<f64>> {
        let mut atoms = Vec::new();
        let alpha = |j: usize| match norm {
            Normalization::Parseval => 0.5f64.powi(j as i32),
            Normalization::UnitNorm => 0.5f64.powi(j as i32).sqrt(),
        };
        // approximation band: +alpha_J on a window of 2^J
        for k in 0..n {
            let mut a = vec![0.0; n];
            for i in 0..(1 << levels) {
                a[(k + i) % n] += alpha(levels);
            }
            atoms.push(a);
        }
        // detail bands, coarse to fine
        for j in (1..=levels).rev() {
            let half = 1usize << (j - 1);
            for k in 0..n {
                let mut a = vec![0.0; n];
                for i in 0..half {
                    a[(k + i) % n] += alpha(j);
                    a[(k + half + i) % n] -= alpha(j);
                }
                atoms.push(a);
            }
        }
        atoms
    }

    #[test]
    fn haar1d_counts_and_errors() {
        assert_eq!(Haar1d::new(8, 3, Normalization::Parseval).unwrap().n_coeffs(), 32);
        assert!(Haar1d::new(7, 1, Normalization::Parseval).is_err());
        assert!(Haar1d::new(8, 4, Normalization::Parseval).is_err());
        assert!(Haar1d::new(8, 0, Normalization::Parseval).is_err());
    }

    #[test]
    fn haar1d_constant_signal_has_zero_details() {
        let op = Haar1d::new(8, 1, Normalization::Parseval).unwrap();
        let x = vec![c(1.0); 8];
        let out = op.forward(&x);
        for d in &out[8..] {
            assert!(d.norm() < 1e-14);
        }
    }

    #[test]
    fn haar1d_parseval_preserves_energy() {
        let op = Haar1d::new(4, 1, Normalization::Parseval).unwrap();
        for seed in 0..100 {
            let x = random_complex(4, seed);
            let out = op.forward(&x);
            assert!((linalg::norm2(&out) - linalg::norm2(&x)).abs() <= 1e-10);
        }
    }

    #[test]
    fn haar1d_matches_analytic_atoms() {
        for &norm in &[Normalization::Parseval, Normalization::UnitNorm] {
            for &(n, levels) in &[(8usize, 3usize), (16, 2), (64, 4)] {
                let op = Haar1d::new(n, levels, norm).unwrap();
                let atoms = haar1d_atoms(n, levels, norm);
                for i in 0..n {
                    let mut e = vec![c(0.0); n];
                    e[i] = c(1.0);
                    let col = op.forward(&e);
                    for (lam, atom) in atoms.iter().enumerate() {
                        assert!(
                            (col[lam].re - atom[i]).abs() < 1e-12,
                            "atom mismatch at n={n} J={levels} lam={lam} i={i}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn haar1d_unit_norm_atoms_have_unit_length() {
        let atoms = haar1d_atoms(16, 3, Normalization::UnitNorm);
        for a in atoms {
            let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar1d_parseval_reconstructs() {
        let op = Haar1d::new(16, 3, Normalization::Parseval).unwrap();
        let x = random_complex(16, 5);
        let rec = op.adjoint(&op.forward(&x));
        assert!(linalg::norm2(&linalg::sub(&rec, &x)) <= 1e-8 * linalg::norm2(&x));
    }

    #[test]
    fn haar_adjoint_identity() {
        for &norm in &[Normalization::Parseval, Normalization::UnitNorm] {
            check_adjoint(&Haar1d::new(32, 4, norm).unwrap(), 9);
            check_adjoint(&Haar2d::new(8, 2, norm).unwrap(), 10);
        }
    }

    #[test]
    fn haar2d_counts_and_zero_details_on_constants() {
        let op = Haar2d::new(16, 2, Normalization::Parseval).unwrap();
        assert_eq!(op.n_coeffs(), 16 * 16 * 7);
        let x = vec![c(3.0); 256];
        let out = op.forward(&x);
        for d in &out[256..] {
            assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn haar2d_parseval_energy_and_reconstruction() {
        let op = Haar2d::new(8, 3, Normalization::Parseval).unwrap();
        let x = random_complex(64, 21);
        let out = op.forward(&x);
        assert!((linalg::norm2(&out) - linalg::norm2(&x)).abs() <= 1e-8);
        let rec = op.adjoint(&out);
        assert!(linalg::norm2(&linalg::sub(&rec, &x)) <= 1e-8 * linalg::norm2(&x));
    }

    #[test]
    fn haar2d_matches_tensor_atoms() {
        // 2D atoms are tensor products of 1D stage outputs; spot-check level 1
        // detail-x: +-alpha along columns, averaged along rows.
        let side = 8;
        let op = Haar2d::new(side, 1, Normalization::Parseval).unwrap();
        let mut e = vec![c(0.0); side * side];
        e[0] = c(1.0);
        let out = op.forward(&e);
        let n = side * side;
        // detail-x band at (r, c) pairs pixel (0,0) with sign over column shift
        let band = &out[n..2 * n];
        assert!((band[0].re - 0.25).abs() < 1e-14);
        assert!((band[side - 1].re + 0.25).abs() < 1e-14); // wrap: c+1 = 0
        assert!((band[(side - 1) * side].re - 0.25).abs() < 1e-14); // r+1 wraps
    }

    #[test]
    fn haar2d_parseval_frame_bounds_are_one() {
        let op = Haar2d::new(8, 2, Normalization::Parseval).unwrap();
        let n = op.dim();
        let apply = |x: &[Complex64]| frame_operator_apply(&op, x);
        let c2 = linalg::power_iteration(apply, n, 120, 3);
        assert!((c2 - 1.0).abs() <= 1e-6, "c2 = {c2}");
    }

    #[test]
    fn matrix_operator_matches_frame_inner_products() {
        let frame = Frame::from_real_rows(&[
            vec![2.0, 1.0],
            vec![2.0, 2.0],
            vec![1.0, 2.0],
        ])
        .unwrap();
        let op = MatrixOperator::new(&frame);
        let fwd = op.forward(&[c(1.0), c(0.0)]);
        assert_eq!(fwd.iter().map(|v| v.re).collect::<Vec<_>>(), vec![2.0, 2.0, 1.0]);
        let adj = op.adjoint(&[c(0.0), c(1.0), c(0.0)]);
        assert_eq!(adj.iter().map(|v| v.re).collect::<Vec<_>>(), vec![2.0, 2.0]);
        check_adjoint(&op, 33);
    }

    #[test]
    fn dual_operator_is_identity_wrapper_for_parseval() {
        let op = Haar1d::new(8, 2, Normalization::Parseval).unwrap();
        let x = random_complex(8, 40);
        let direct = op.forward(&x);
        let dual = DualAnalysisOperator::new(op).unwrap();
        let via_dual = dual.forward(&x);
        assert_eq!(direct, via_dual); // bitwise: parseval short-circuit
    }

    #[test]
    fn dual_operator_matches_dense_canonical_dual() {
        let frame = Frame::from_real_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let dual_vectors = frame.canonical_dual().unwrap();
        let op = MatrixOperator::new(&frame);
        let dual = DualAnalysisOperator::new(op).unwrap();
        let x = random_complex(2, 17);
        let got = dual.forward(&x);
        for (lam, tilde) in dual_vectors.iter().enumerate() {
            let want = linalg::dot(&x, tilde);
            assert!((got[lam] - want).norm() < 1e-8);
        }
        check_adjoint(&dual, 55);
    }
}
