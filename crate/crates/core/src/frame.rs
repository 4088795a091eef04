//! Finite frames: bounds, canonical duals, identifiable duals, scalability
//! and controllability of the frame-bound ratio.
//!
//! A frame is an ordered spanning system `(psi_lambda)` of C^n. All dense
//! computations here assume the desk-scale envelope (n up to a few thousand,
//! N up to ~10 n); structured operators live in [`crate::transforms`].

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

const DUAL_IDENTITY_TOL: f64 = 1e-8;
const SCALABILITY_TOL: f64 = 1e-8;
const CONDITION_LIMIT: f64 = 1e12;

/// A finite spanning system of C^n with eagerly computed frame bounds.
#[derive(Debug, Clone)]
pub struct Frame {
    vectors: Vec<Vec<Complex64>>,
    n: usize,
    bounds: (f64, f64),
    max_norm: f64,
    real: bool,
}

/// Outcome of the structural dual analysis of a frame.
#[derive(Debug, Clone)]
pub struct DualReport {
    /// Dual frame: the scaled dual `(c_lambda psi_lambda)` when one exists,
    /// otherwise the canonical dual.
    pub dual_vectors: Vec<Vec<Complex64>>,
    pub identifiable: bool,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub scalable: bool,
    pub scaling_weights: Option<Vec<f64>>,
    /// Frobenius residual of the nonnegative scalability fit.
    pub residual: f64,
}

impl DualReport {
    /// Whether the frame is positively scalable (all scaling weights bounded
    /// away from zero).
    pub fn positively_scalable(&self) -> bool {
        match (&self.scaling_weights, self.scalable) {
            (Some(w), true) => {
                let max = w.iter().cloned().fold(0.0, f64::max);
                w.iter().all(|&wi| wi > 1e-10 * max.max(1.0))
            }
            _ => false,
        }
    }
}

/// Result of the identifiable-dual search.
#[derive(Debug, Clone)]
pub struct Identifiability {
    pub identifiable: bool,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub dual: Option<Vec<Vec<Complex64>>>,
    /// Scalars `c_lambda` with `sum c_lambda psi psi* = I` when solvable.
    pub scalars: Option<Vec<f64>>,
}

/// Result of the scalability test.
#[derive(Debug, Clone)]
pub struct Scalability {
    pub scalable: bool,
    pub weights: Option<Vec<f64>>,
    pub residual: f64,
}

impl Frame {
    /// Builds a frame from `N` vectors of shared dimension `n`, verifying the
    /// spanning property and caching bounds and the maximal vector norm.
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidShape("frame needs at least one vector".into()));
        }
        let n = vectors[0].len();
        if n == 0 {
            return Err(Error::InvalidShape("frame vectors must be nonempty".into()));
        }
        for v in &vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        let real = vectors.iter().all(|v| v.iter().all(|z| z.im == 0.0));
        let s = frame_operator(&vectors, n);
        let mut eig: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().cloned().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let c2 = *eig.last().unwrap();
        let rank_tol = c2.max(1.0) * 1e-12 * n as f64;
        let rank = eig.iter().filter(|&&l| l > rank_tol).count();
        if rank < n {
            return Err(Error::RankDeficient { rank, n });
        }
        let c1 = eig[0];
        let max_norm = vectors
            .iter()
            .map(|v| linalg::norm2(v))
            .fold(0.0, f64::max);
        Ok(Frame { vectors, n, bounds: (c1, c2), max_norm, real })
    }

    /// Convenience constructor for real frames given as rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| linalg::real_to_complex(r)).collect())
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Lower and upper frame bounds: extreme eigenvalues of the frame
    /// operator `S = sum psi psi*`.
    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    /// `K = max ||psi_lambda||_2`.
    pub fn max_norm(&self) -> f64 {
        self.max_norm
    }

    pub fn is_parseval(&self, tol: f64) -> bool {
        (self.bounds.0 - 1.0).abs() <= tol && (self.bounds.1 - 1.0).abs() <= tol
    }

    fn operator(&self) -> DMatrix<Complex64> {
        frame_operator(&self.vectors, self.n)
    }

    /// Canonical dual `(S^-1 psi_lambda)`.
    pub fn canonical_dual(&self) -> Result<Vec<Vec<Complex64>>> {
        let (c1, c2) = self.bounds;
        let cond = c2 / c1;
        if cond > CONDITION_LIMIT {
            return Err(Error::IllConditioned { cond, limit: CONDITION_LIMIT });
        }
        let s = self.operator();
        let chol = Cholesky::new(s).ok_or(Error::IllConditioned { cond, limit: CONDITION_LIMIT })?;
        Ok(self
            .vectors
            .iter()
            .map(|v| {
                let rhs = DVector::from_column_slice(v);
                chol.solve(&rhs).iter().cloned().collect()
            })
            .collect())
    }

    /// True iff `sum dual_lambda psi_lambda* = I` within `1e-8 sqrt(n)` in
    /// Frobenius norm.
    pub fn verify_dual(&self, candidate: &[Vec<Complex64>]) -> Result<bool> {
        if candidate.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vectors.len(),
                got: candidate.len(),
            });
        }
        for v in candidate {
            if v.len() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
            }
        }
        let mut sum = DMatrix::<Complex64>::zeros(self.n, self.n);
        for (d, p) in candidate.iter().zip(&self.vectors) {
            for i in 0..self.n {
                for j in 0..self.n {
                    sum[(i, j)] += d[i] * p[j].conj();
                }
            }
        }
        for i in 0..self.n {
            sum[(i, i)] -= Complex64::new(1.0, 0.0);
        }
        Ok(sum.norm() <= DUAL_IDENTITY_TOL * (self.n as f64).sqrt())
    }

    /// Searches for a dual of the form `(c_lambda psi_lambda)` with real
    /// scalars. Solvability of `sum c psi psi* = I` with all scalars nonzero
    /// is the exact finite-dimensional identifiability test; among multiple
    /// solutions the one minimizing the dual frame's Frobenius norm
    /// `sum c^2 ||psi||^2` is returned.
    pub fn identifiability(&self) -> Identifiability {
        let (a, b) = self.scaling_system();
        // Substitute u = c * ||psi|| so the plain min-norm least squares
        // solution minimizes the dual's Frobenius norm.
        let norms: Vec<f64> = self.vectors.iter().map(|v| linalg::norm2(v)).collect();
        let mut a_scaled = a.clone();
        for (j, &nj) in norms.iter().enumerate() {
            if nj > 0.0 {
                let mut col = a_scaled.column_mut(j);
                col /= nj;
            }
        }
        let svd = a_scaled.svd(true, true);
        let u = match svd.solve(&b, 1e-13) {
            Ok(u) => u,
            Err(_) => {
                return Identifiability {
                    identifiable: false,
                    d1: None,
                    d2: None,
                    dual: None,
                    scalars: None,
                }
            }
        };
        let c: Vec<f64> = u
            .iter()
            .zip(&norms)
            .map(|(&ui, &nj)| if nj > 0.0 { ui / nj } else { 0.0 })
            .collect();
        let residual = (&a * DVector::from_column_slice(&c) - &b).norm();
        let d2 = c.iter().map(|ci| ci.abs()).fold(0.0, f64::max);
        let d1 = c.iter().map(|ci| ci.abs()).fold(f64::INFINITY, f64::min);
        let solvable = residual <= DUAL_IDENTITY_TOL * (self.n as f64).sqrt();
        let nonzero = d1 > 1e-10 * d2.max(1.0);
        if solvable && nonzero {
            let dual = self
                .vectors
                .iter()
                .zip(&c)
                .map(|(v, &ci)| v.iter().map(|z| z * ci).collect())
                .collect();
            Identifiability {
                identifiable: true,
                d1: Some(d1),
                d2: Some(d2),
                dual: Some(dual),
                scalars: Some(c),
            }
        } else {
            Identifiability {
                identifiable: false,
                d1: None,
                d2: None,
                dual: None,
                scalars: None,
            }
        }
    }

    /// Nonnegative least squares fit of `sum w_lambda psi psi* = I`,
    /// `w_lambda >= 0` (`w = c^2` in the scalable-frame definition).
    pub fn scalability(&self) -> Scalability {
        let (a, b) = self.scaling_system();
        let (w, residual) = nnls(&a, &b);
        let scalable = residual <= SCALABILITY_TOL;
        Scalability {
            scalable,
            weights: if scalable { Some(w.iter().cloned().collect()) } else { None },
            residual,
        }
    }

    /// Largest q such that `(c1/c2)^(p/(2-p)) >= q/N`.
    pub fn q_controllability(&self, p: f64) -> Result<usize> {
        let (c1, c2) = self.bounds;
        q_max_from_bounds(c1, c2, self.len(), p)
    }

    /// Full structural report: canonical or scaled dual, identifiability and
    /// scalability verdicts.
    pub fn dual_report(&self) -> Result<DualReport> {
        let ident = self.identifiability();
        let scal = self.scalability();
        let dual_vectors = match &ident.dual {
            Some(d) => d.clone(),
            None => self.canonical_dual()?,
        };
        Ok(DualReport {
            dual_vectors,
            identifiable: ident.identifiable,
            d1: ident.d1,
            d2: ident.d2,
            scalable: scal.scalable,
            scaling_weights: scal.weights,
            residual: scal.residual,
        })
    }

    /// Real linear system `A c = b` expressing `sum c_lambda psi psi* = I`.
    /// Rows: diagonal entries, then sqrt(2)-weighted real and imaginary parts
    /// of the strict upper triangle, so `||A c - b||_2` equals the Frobenius
    /// defect of the matrix equation.
    fn scaling_system(&self) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.n;
        let nv = self.vectors.len();
        let rows = n + n * (n - 1);
        let mut a = DMatrix::<f64>::zeros(rows, nv);
        let mut b = DVector::<f64>::zeros(rows);
        let sqrt2 = std::f64::consts::SQRT_2;
        for (lam, v) in self.vectors.iter().enumerate() {
            let mut r = 0;
            for i in 0..n {
                a[(r, lam)] = v[i].norm_sqr();
                r += 1;
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let h = v[i] * v[j].conj();
                    a[(r, lam)] = sqrt2 * h.re;
                    a[(r + 1, lam)] = sqrt2 * h.im;
                    r += 2;
                }
            }
        }
        for i in 0..n {
            b[i] = 1.0;
        }
        (a, b)
    }
}

/// Largest q with `(c1/c2)^(p/(2-p)) >= q / n_elems`.
pub fn q_max_from_bounds(c1: f64, c2: f64, n_elems: usize, p: f64) -> Result<usize> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidP(p));
    }
    let ratio = (c1 / c2).powf(p / (2.0 - p));
    Ok((n_elems as f64 * ratio).floor() as usize)
}

fn frame_operator(vectors: &[Vec<Complex64>], n: usize) -> DMatrix<Complex64> {
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    for v in vectors {
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    s
}

/// Lawson-Hanson nonnegative least squares: minimizes `||A x - b||_2` over
/// `x >= 0`. Returns the solution and the residual norm.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let nv = a.ncols();
    let mut x = DVector::<f64>::zeros(nv);
    let mut passive = vec![false; nv];
    let w_tol = 1e-12 * (a.transpose() * b).amax().max(1.0);
    let max_outer = 3 * nv + 10;

    for _ in 0..max_outer {
        let resid = b - a * &x;
        let w = a.transpose() * &resid;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..nv {
            if !passive[j] && w[j] > w_tol {
                if best.map_or(true, |(_, bw)| w[j] > bw) {
                    best = Some((j, w[j]));
                }
            }
        }
        let Some((j_star, _)) = best else { break };
        passive[j_star] = true;

        loop {
            let idx: Vec<usize> = (0..nv).filter(|&j| passive[j]).collect();
            let ap = a.select_columns(idx.iter());
            let z = ap
                .svd(true, true)
                .solve(b, 1e-13)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            if z.iter().all(|&zi| zi > 0.0) {
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    let t = x[j] / (x[j] - z[k]);
                    if t < alpha {
                        alpha = t;
                    }
                }
            }
            if !alpha.is_finite() {
                break;
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
                if x[j] <= 1e-14 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    let residual = (b - a * &x).norm();
    (x, residual)
}
