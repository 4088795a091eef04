//! Reconstruction engine: weighted analysis-l1 inner solver with an l2-ball
//! data constraint, wrapped by the iteratively reweighted outer loop, in
//! primal and canonical-dual analysis variants.
//!
//! The inner problem `min ||W Psi x||_1 s.t. ||y - A x||_2 <= eps` is solved
//! by a primal-dual (Chambolle-Pock type) iteration on the saddle
//! formulation. Termination is certified by a composite optimality gap:
//! relative duality gap, dual residual `||A* q + Psi* w||` and primal
//! feasibility must all fall below the tolerance. The algorithm is an
//! implementation detail; the gap certificate is the contract.

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg;
use crate::sensing::SensingOperator;
use crate::transforms::{AnalysisOperator, DualAnalysisOperator};

/// Parameters of the reweighted outer loop and its inner solves.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Quasi-norm exponent, in (0, 1].
    pub p: f64,
    /// Weight scaling; `None` selects `1 / ||Psi A* y||_inf` per solve.
    pub mu: Option<f64>,
    /// Stabilizer in the weight update; caps weights at `nu^(p-1)`.
    pub nu: f64,
    /// Data-fidelity radius.
    pub epsilon: f64,
    /// Number of inner solves performed by the outer loop.
    pub outer_iters: usize,
    pub inner_max_iters: usize,
    /// Composite-gap tolerance of the inner solver.
    pub inner_tol: f64,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(p: f64) -> Self {
        SolverConfig {
            p,
            mu: None,
            nu: 1e-3,
            epsilon: 0.0,
            outer_iters: 10,
            inner_max_iters: 20_000,
            inner_tol: 1e-6,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidP(self.p));
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0) {
                return Err(Error::InvalidRange(format!("mu must be positive, got {mu}")));
            }
        }
        if !(self.nu > 0.0) {
            return Err(Error::InvalidRange(format!("nu must be positive, got {}", self.nu)));
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidRange(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.outer_iters == 0 || self.inner_max_iters == 0 {
            return Err(Error::InvalidRange("iteration counts must be positive".into()));
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::InvalidRange("inner_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of one weighted-l1 inner solve.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub x: Vec<Complex64>,
    pub converged: bool,
    /// Composite optimality gap at the returned iterate.
    pub gap: f64,
    pub iterations: usize,
    /// `||W Psi x||_1`
    pub objective: f64,
    pub data_residual: f64,
}

/// Either a full iterate or its SHA-256 digest for large signals.
#[derive(Debug, Clone)]
pub enum IterateRecord {
    Full(Vec<Complex64>),
    Digest(String),
}

const SNAPSHOT_LIMIT: usize = 16_384;

fn record_iterate(x: &[Complex64]) -> IterateRecord {
    if x.len() <= SNAPSHOT_LIMIT {
        IterateRecord::Full(x.to_vec())
    } else {
        let mut hasher = Sha256::new();
        for v in x {
            hasher.update(v.re.to_le_bytes());
            hasher.update(v.im.to_le_bytes());
        }
        IterateRecord::Digest(format!("{:x}", hasher.finalize()))
    }
}

/// Per-outer-iteration diagnostics of the reweighted loop.
#[derive(Debug, Clone)]
pub struct OuterDiagnostics {
    pub objective: f64,
    pub data_residual: f64,
    /// `||Psi x^k - Psi x^(k-1)|| / ||Psi x^k||` (1.0 on the first iterate).
    pub rel_change: f64,
    pub inner_converged: bool,
    pub inner_gap: f64,
    pub inner_iterations: usize,
    pub iterate: IterateRecord,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub x_hat: Vec<Complex64>,
    pub per_outer: Vec<OuterDiagnostics>,
    pub converged: bool,
    pub weights_final: Vec<f64>,
    /// The weight scaling actually used (resolved from config or data).
    pub mu: f64,
}

fn complex_scale_to(z: Complex64, radius: f64) -> Complex64 {
    let n = z.norm();
    if n <= radius || n == 0.0 {
        z
    } else {
        z * (radius / n)
    }
}

/// Solves `min ||W Psi x||_1 s.t. ||y - A x||_2 <= epsilon`.
///
/// Returns the best iterate with a convergence flag; `Err(Infeasible)` is
/// raised when the data residual stagnates above `epsilon`.
pub fn weighted_l1_analysis(
    a: &dyn SensingOperator,
    psi: &dyn AnalysisOperator,
    weights: &[f64],
    y: &[Complex64],
    epsilon: f64,
    max_iters: usize,
    tol: f64,
    seed: u64,
    warm_start: Option<&[Complex64]>,
) -> Result<InnerSolution> {
    let n = a.dim();
    let m = a.m();
    let n_coeffs = psi.n_coeffs();
    if psi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: psi.dim() });
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: y.len() });
    }
    if weights.len() != n_coeffs {
        return Err(Error::DimensionMismatch { expected: n_coeffs, got: weights.len() });
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::InvalidRange("weights must be finite and nonnegative".into()));
    }
    if epsilon < 0.0 {
        return Err(Error::InvalidRange("epsilon must be nonnegative".into()));
    }

    let y_scale = linalg::norm2(y).max(1.0);
    // ||K||^2 = lambda_max(A*A + Psi*Psi), 30 power iterations
    let k_norm_sq = linalg::power_iteration(
        |v| {
            let mut out = a.adjoint(&a.apply(v));
            let pt = psi.adjoint(&psi.forward(v));
            for (o, t) in out.iter_mut().zip(pt) {
                *o += t;
            }
            out
        },
        n,
        30,
        seed,
    );
    let k_norm = k_norm_sq.max(1e-30).sqrt();
    let step = 0.95 / k_norm;
    let (tau, sigma) = (step, step);

    let zero = Complex64::new(0.0, 0.0);
    let mut x = warm_start.map(|w| w.to_vec()).unwrap_or_else(|| vec![zero; n]);
    let mut x_bar = x.clone();
    let mut q = vec![zero; m];
    let mut w = vec![zero; n_coeffs];

    let mut best: Option<InnerSolution> = None;
    let mut residual_window: Vec<f64> = Vec::new();
    let check_every = 10usize;

    let mut iterations = max_iters;
    for it in 0..max_iters {
        // dual ascent on the ball constraint: prox of q -> <y,q> + eps ||q||
        let ax_bar = a.apply(&x_bar);
        for i in 0..m {
            q[i] += sigma * (ax_bar[i] - y[i]);
        }
        let qn = linalg::norm2(&q);
        if qn > 0.0 {
            let shrink = (1.0 - sigma * epsilon / qn).max(0.0);
            for qi in q.iter_mut() {
                *qi *= shrink;
            }
        }
        // dual ascent on the weighted l1 term: project onto the weight box
        let px_bar = psi.forward(&x_bar);
        for lam in 0..n_coeffs {
            w[lam] = complex_scale_to(w[lam] + sigma * px_bar[lam], weights[lam]);
        }
        // primal descent; A*q + Psi*w is also the dual residual
        let mut kstar = a.adjoint(&q);
        let pw = psi.adjoint(&w);
        for (k, t) in kstar.iter_mut().zip(pw) {
            *k += t;
        }
        let mut rdual = 0.0;
        for i in 0..n {
            let old = x[i];
            rdual += kstar[i].norm_sqr();
            x[i] -= tau * kstar[i];
            x_bar[i] = 2.0 * x[i] - old;
        }
        let rdual = rdual.sqrt();

        if (it + 1) % check_every == 0 || it + 1 == max_iters {
            let ax = a.apply(&x);
            let data_residual = linalg::norm2(&linalg::sub(&ax, y));
            let coeffs = psi.forward(&x);
            let objective: f64 = coeffs
                .iter()
                .zip(weights)
                .map(|(c, &wl)| wl * c.norm())
                .sum();
            let pfeas = (data_residual - epsilon).max(0.0) / y_scale;
            // dual lower bound, valid up to the radius heuristic
            let radius = 2.0 * linalg::norm2(&x).max(1.0);
            let dual_value = -linalg::dot(y, &q).re - epsilon * linalg::norm2(&q) - radius * rdual;
            let gap_scale = objective.abs().max(dual_value.abs()).max(1.0);
            let gap = ((objective - dual_value) / gap_scale).max(0.0) + pfeas;

            let candidate = InnerSolution {
                x: x.clone(),
                converged: gap <= tol,
                gap,
                iterations: it + 1,
                objective,
                data_residual,
            };
            if best.as_ref().map_or(true, |b| candidate.gap < b.gap) {
                best = Some(candidate.clone());
            }
            if gap <= tol {
                iterations = it + 1;
                break;
            }
            residual_window.push(data_residual);
            if residual_window.len() > 50 {
                residual_window.remove(0);
                let first = residual_window[0];
                let stagnated = residual_window
                    .iter()
                    .all(|&r| (r - first).abs() <= 1e-12 * first.max(1e-30));
                if stagnated && data_residual > epsilon + tol * y_scale {
                    return Err(Error::Infeasible { residual: data_residual, epsilon });
                }
            }
        }
    }

    let mut sol = best.expect("at least one convergence check runs");
    sol.iterations = sol.iterations.min(iterations);

    // Feasibility polish: project onto the epsilon-ball along range(A*),
    // solving (A A*) z = r by CG. Exact for unitary-row operators.
    let ax = a.apply(&sol.x);
    let resid = linalg::sub(&ax, y);
    let rnorm = linalg::norm2(&resid);
    if rnorm > epsilon {
        let target_scale = if rnorm > 0.0 { 1.0 - epsilon / rnorm } else { 0.0 };
        let excess: Vec<Complex64> = resid.iter().map(|v| v * target_scale).collect();
        if let Ok(z) = linalg::conjugate_gradient(
            |v| a.apply(&a.adjoint(v)),
            &excess,
            1e-12,
            (10 * m).max(100),
        ) {
            let correction = a.adjoint(&z);
            for (xi, ci) in sol.x.iter_mut().zip(correction) {
                *xi -= ci;
            }
            let ax = a.apply(&sol.x);
            sol.data_residual = linalg::norm2(&linalg::sub(&ax, y));
            let coeffs = psi.forward(&sol.x);
            sol.objective = coeffs.iter().zip(weights).map(|(c, &wl)| wl * c.norm()).sum();
        }
    }
    Ok(sol)
}

/// Weight update of the reweighted scheme: `W = 1 / (mu |coeffs| + nu)^(1-p)`.
/// All outputs lie in `(0, nu^(p-1)]`.
pub fn reweight(coeffs: &[Complex64], mu: f64, nu: f64, p: f64) -> Vec<f64> {
    coeffs
        .iter()
        .map(|c| (mu * c.norm() + nu).powf(p - 1.0))
        .collect()
}

fn resolve_mu(
    config: &SolverConfig,
    a: &dyn SensingOperator,
    psi: &dyn AnalysisOperator,
    y: &[Complex64],
) -> f64 {
    match config.mu {
        Some(mu) => mu,
        None => {
            // zero-filled backprojection sets the coefficient scale
            let x0 = a.adjoint(y);
            let peak = linalg::norm_inf(&psi.forward(&x0));
            if peak > 0.0 {
                1.0 / peak
            } else {
                1.0
            }
        }
    }
}

/// Iteratively reweighted analysis-l1: starts from unit weights, performs
/// `outer_iters` inner solves, updating the weights from each solution. A
/// non-converged inner solve is recorded and the loop continues.
pub fn reweighted_lp(
    a: &dyn SensingOperator,
    psi: &dyn AnalysisOperator,
    y: &[Complex64],
    config: &SolverConfig,
) -> Result<ReconstructionResult> {
    config.validate()?;
    let n_coeffs = psi.n_coeffs();
    let mu = resolve_mu(config, a, psi, y);
    let mut weights = vec![1.0; n_coeffs];
    let mut x: Option<Vec<Complex64>> = None;
    let mut prev_coeffs: Option<Vec<Complex64>> = None;
    let mut per_outer = Vec::with_capacity(config.outer_iters);
    let mut all_converged = true;

    for _k in 0..config.outer_iters {
        let sol = weighted_l1_analysis(
            a,
            psi,
            &weights,
            y,
            config.epsilon,
            config.inner_max_iters,
            config.inner_tol,
            config.seed,
            x.as_deref(),
        )?;
        all_converged &= sol.converged;
        let coeffs = psi.forward(&sol.x);
        let rel_change = match &prev_coeffs {
            Some(prev) => {
                let num = linalg::norm2(&linalg::sub(&coeffs, prev));
                let den = linalg::norm2(&coeffs);
                if den > 0.0 {
                    num / den
                } else {
                    0.0
                }
            }
            None => 1.0,
        };
        per_outer.push(OuterDiagnostics {
            objective: sol.objective,
            data_residual: sol.data_residual,
            rel_change,
            inner_converged: sol.converged,
            inner_gap: sol.gap,
            inner_iterations: sol.iterations,
            iterate: record_iterate(&sol.x),
        });
        weights = reweight(&coeffs, mu, config.nu, config.p);
        prev_coeffs = Some(coeffs);
        x = Some(sol.x);
    }

    Ok(ReconstructionResult {
        x_hat: x.expect("outer_iters >= 1"),
        per_outer,
        converged: all_converged,
        weights_final: weights,
        mu,
    })
}

/// Reweighted lp over canonical-dual analysis coefficients: identical loop
/// with `Psi` replaced by `x -> (<x, S^-1 psi_lambda>)`.
pub fn reweighted_lp_dual(
    a: &dyn SensingOperator,
    psi: &dyn AnalysisOperator,
    y: &[Complex64],
    config: &SolverConfig,
) -> Result<ReconstructionResult> {
    let dual = DualAnalysisOperator::new(ByRef(psi))?;
    reweighted_lp(a, &dual, y, config)
}

/// Borrow adapter so trait objects can be wrapped by owning combinators.
pub struct ByRef<'a>(pub &'a dyn AnalysisOperator);

impl AnalysisOperator for ByRef<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn n_coeffs(&self) -> usize {
        self.0.n_coeffs()
    }
    fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.0.forward(x)
    }
    fn adjoint(&self, c: &[Complex64]) -> Vec<Complex64> {
        self.0.adjoint(c)
    }
    fn is_parseval(&self) -> bool {
        self.0.is_parseval()
    }
    fn levels(&self) -> Option<usize> {
        self.0.levels()
    }
}

/// Keeps the `s` largest-modulus entries, zeroing the rest; ties broken by
/// lowest index.
pub fn best_s_term(coeffs: &[Complex64], s: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if s >= coeffs.len() {
        return coeffs.to_vec();
    }
    let mut order: Vec<usize> = (0..coeffs.len()).collect();
    order.sort_by(|&i, &j| {
        coeffs[j]
            .norm()
            .partial_cmp(&coeffs[i].norm())
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut out = vec![zero; coeffs.len()];
    for &i in order.iter().take(s) {
        out[i] = coeffs[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use crate::sensing::GaussianOperator;
    use crate::transforms::{Haar1d, MatrixOperator, Normalization};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn identity_basis(n: usize) -> MatrixOperator {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        MatrixOperator::new(&Frame::from_real_rows(&rows).unwrap())
    }

    struct IdentitySensing(usize);
    impl SensingOperator for IdentitySensing {
        fn m(&self) -> usize {
            self.0
        }
        fn dim(&self) -> usize {
            self.0
        }
        fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
            x.to_vec()
        }
        fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
            y.to_vec()
        }
    }

    #[test]
    fn best_s_term_examples() {
        let v = vec![c(3.0), c(-5.0), c(2.0)];
        assert_eq!(best_s_term(&v, 3), v);
        assert_eq!(best_s_term(&v, 0), vec![c(0.0); 3]);
        let kept = best_s_term(&v, 2);
        assert_eq!(kept, vec![c(3.0), c(-5.0), c(0.0)]);
        // ties keep the lowest index
        let tie = vec![c(1.0), c(-1.0), c(1.0)];
        assert_eq!(best_s_term(&tie, 2), vec![c(1.0), c(-1.0), c(0.0)]);
    }

    #[test]
    fn reweight_caps_at_nu_power() {
        let coeffs = vec![c(0.0), c(1.0), c(10.0)];
        let w = reweight(&coeffs, 1.0, 1e-6, 0.5);
        assert_eq!(w[0], 1e-6f64.powf(-0.5)); // = 1000
        assert!((w[0] - 1000.0).abs() < 1e-9);
        for &wi in &w {
            assert!(wi > 0.0 && wi <= 1000.0 + 1e-12);
        }
        // p = 1 keeps unit weights
        let w1 = reweight(&coeffs, 1.0, 1e-6, 1.0);
        assert!(w1.iter().all(|&wi| wi == 1.0));
    }

    #[test]
    fn identity_sensing_with_zero_radius_returns_data() {
        let n = 12;
        let a = IdentitySensing(n);
        let psi = identity_basis(n);
        let y = linalg::complex_normal_vec(&mut linalg::stream_rng(1, 0), n);
        let sol = weighted_l1_analysis(&a, &psi, &vec![1.0; n], &y, 0.0, 20_000, 1e-8, 0, None)
            .unwrap();
        let err = linalg::norm2(&linalg::sub(&sol.x, &y));
        assert!(err <= 1e-6 * linalg::norm2(&y), "err = {err}");
        assert!(sol.converged);
    }

    #[test]
    fn zero_data_returns_zero() {
        let a = IdentitySensing(6);
        let psi = identity_basis(6);
        let y = vec![c(0.0); 6];
        let sol =
            weighted_l1_analysis(&a, &psi, &vec![1.0; 6], &y, 0.0, 1000, 1e-10, 0, None).unwrap();
        assert!(linalg::norm2(&sol.x) <= 1e-12);
        assert!(sol.converged);
    }

    #[test]
    fn gaussian_spike_recovery() {
        // classical basis-pursuit regime: 3-sparse, n = 32, m = 24
        let n = 32;
        let a = GaussianOperator::new(24, n, 7).unwrap();
        let psi = identity_basis(n);
        let mut x0 = vec![c(0.0); n];
        x0[3] = c(1.0);
        x0[17] = c(-0.8);
        x0[29] = c(0.5);
        let y = a.apply(&x0);
        let sol = weighted_l1_analysis(&a, &psi, &vec![1.0; n], &y, 0.0, 40_000, 1e-9, 0, None)
            .unwrap();
        let rel = linalg::norm2(&linalg::sub(&sol.x, &x0)) / linalg::norm2(&x0);
        assert!(rel <= 1e-4, "relative error {rel}");
        assert!(sol.data_residual <= 1e-6 * linalg::norm2(&y).max(1.0));
    }

    #[test]
    fn feasibility_holds_with_positive_epsilon() {
        let n = 16;
        let a = GaussianOperator::new(12, n, 3).unwrap();
        let psi = Haar1d::new(n, 2, Normalization::Parseval).unwrap();
        let x0 = linalg::complex_normal_vec(&mut linalg::stream_rng(5, 0), n);
        let y = a.apply(&x0);
        let eps = 0.1 * linalg::norm2(&y);
        let sol = weighted_l1_analysis(
            &a,
            &psi,
            &vec![1.0; psi.n_coeffs()],
            &y,
            eps,
            20_000,
            1e-7,
            0,
            None,
        )
        .unwrap();
        assert!(sol.data_residual <= eps + 1e-6 * linalg::norm2(&y).max(1.0));
        // the ball constraint is active at the optimum of a weighted-l1 problem
        assert!(sol.data_residual >= 0.5 * eps);
    }

    #[test]
    fn outer_loop_records_diagnostics_and_p1_is_a_fixpoint() {
        let n = 16;
        let a = GaussianOperator::new(12, n, 21).unwrap();
        let psi = identity_basis(n);
        let mut x0 = vec![c(0.0); n];
        x0[2] = c(1.0);
        x0[9] = c(2.0);
        let y = a.apply(&x0);
        let mut config = SolverConfig::new(1.0);
        config.outer_iters = 4;
        config.inner_tol = 1e-8;
        let res = reweighted_lp(&a, &psi, &y, &config).unwrap();
        assert_eq!(res.per_outer.len(), 4);
        assert!((res.per_outer[0].rel_change - 1.0).abs() < 1e-12);
        // p = 1: weights stay 1, later iterations re-solve the same problem
        for w in &res.weights_final {
            assert!((w - 1.0).abs() < 1e-15);
        }
        for d in &res.per_outer[1..] {
            assert!(d.rel_change <= 10.0 * config.inner_tol, "rel change {}", d.rel_change);
        }
        for d in &res.per_outer {
            assert!(d.data_residual <= config.epsilon + 1e-6 * linalg::norm2(&y).max(1.0));
        }
    }

    #[test]
    fn reweighting_improves_sparse_recovery_at_low_p() {
        // undersampled enough that plain l1 fails but reweighting recovers
        let n = 32;
        let a = GaussianOperator::new(14, n, 40).unwrap();
        let psi = identity_basis(n);
        let mut x0 = vec![c(0.0); n];
        x0[1] = c(1.0);
        x0[11] = c(-1.2);
        x0[22] = c(0.6);
        x0[30] = c(2.0);
        let y = a.apply(&x0);
        let mut config = SolverConfig::new(0.5);
        config.outer_iters = 8;
        config.inner_tol = 1e-8;
        config.nu = 1e-3;
        config.mu = Some(1.0);
        let res = reweighted_lp(&a, &psi, &y, &config).unwrap();
        let err_first = {
            // first outer iterate is the plain l1 solution
            match &res.per_outer[0].iterate {
                IterateRecord::Full(x1) => {
                    linalg::norm2(&linalg::sub(x1, &x0)) / linalg::norm2(&x0)
                }
                _ => unreachable!(),
            }
        };
        let err_final = linalg::norm2(&linalg::sub(&res.x_hat, &x0)) / linalg::norm2(&x0);
        assert!(
            err_final <= err_first + 1e-9,
            "reweighting should not hurt: first {err_first}, final {err_final}"
        );
        assert!(err_final <= 1e-3, "final error {err_final}");
    }

    #[test]
    fn dual_variant_matches_primal_for_parseval() {
        let n = 16;
        let a = GaussianOperator::new(10, n, 2).unwrap();
        let psi = Haar1d::new(n, 2, Normalization::Parseval).unwrap();
        let x0 = linalg::complex_normal_vec(&mut linalg::stream_rng(31, 0), n);
        let y = a.apply(&x0);
        let mut config = SolverConfig::new(0.7);
        config.outer_iters = 2;
        config.inner_max_iters = 3000;
        config.inner_tol = 1e-6;
        let primal = reweighted_lp(&a, &psi, &y, &config).unwrap();
        let dual = reweighted_lp_dual(&a, &psi, &y, &config).unwrap();
        // parseval: canonical dual equals the frame; trajectories coincide bitwise
        assert_eq!(primal.x_hat, dual.x_hat);
    }

    #[test]
    fn dual_variant_differs_for_non_tight_frames() {
        let frame = Frame::from_real_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let psi = MatrixOperator::new(&frame);
        let a = GaussianOperator::new(1, 2, 77).unwrap();
        let y = a.apply(&[c(0.7), c(-0.2)]);
        let mut config = SolverConfig::new(0.8);
        config.outer_iters = 3;
        config.inner_tol = 1e-9;
        let primal = reweighted_lp(&a, &psi, &y, &config).unwrap();
        let dual = reweighted_lp_dual(&a, &psi, &y, &config).unwrap();
        let y_scale = linalg::norm2(&y).max(1.0);
        for r in [&primal, &dual] {
            assert!(r.per_outer.last().unwrap().data_residual <= 1e-6 * y_scale);
        }
        let diff = linalg::norm2(&linalg::sub(&primal.x_hat, &dual.x_hat));
        assert!(diff > 1e-10, "primal and dual solutions should differ");
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0).validate().is_err());
        assert!(SolverConfig::new(1.2).validate().is_err());
        let mut bad = SolverConfig::new(0.5);
        bad.nu = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = SolverConfig::new(0.5);
        bad.epsilon = -1.0;
        assert!(bad.validate().is_err());
        assert!(SolverConfig::new(0.5).validate().is_ok());
    }
}
