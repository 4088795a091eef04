//! Empirical Psi-RIP and localization-factor estimation plus the deterministic
//! measurement-count bounds.
//!
//! Both estimators report Monte-Carlo LOWER bounds (exact constants are
//! combinatorial): a sampled violation certifies that delta_s or L is at
//! least the reported value, never that it is at most.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::sensing::SensingOperator;
use crate::transforms::AnalysisOperator;

/// Empirical Psi-RIP constant at sparsity order `s`.
#[derive(Debug, Clone)]
pub struct RipEstimate {
    pub s: usize,
    pub delta_hat: f64,
    pub trials: usize,
    pub seed: u64,
    /// Every evaluated energy ratio `||A Psi* c||^2 / ||Psi* c||^2`, in
    /// deterministic (trial-major, nested-prefix) order.
    pub ratios: Vec<f64>,
}

/// Empirical localization factor at sparsity order `s`.
#[derive(Debug, Clone)]
pub struct LocalizationEstimate {
    pub l_hat: f64,
    pub s: usize,
    pub trials: usize,
    pub seed: u64,
}

const SYNTHESIS_EPS: f64 = 1e-12;

fn trial_draw(n_coeffs: usize, s: usize, seed: u64, trial: u64) -> (Vec<usize>, Vec<Complex64>) {
    // Support and coefficients come from separate streams so the draws for
    // sparsity s are exact prefixes of those for any s' > s (nested trials).
    let mut rng_perm = linalg::stream_rng(seed, 2 * trial);
    let mut rng_coef = linalg::stream_rng(seed, 2 * trial + 1);
    // partial Fisher-Yates: first s entries of a random permutation
    let mut idx: Vec<usize> = (0..n_coeffs).collect();
    for i in 0..s.min(n_coeffs.saturating_sub(1)) {
        let j = rng_perm.gen_range(i..n_coeffs);
        idx.swap(i, j);
    }
    idx.truncate(s);
    let coeffs = linalg::complex_normal_vec(&mut rng_coef, s);
    (idx, coeffs)
}

fn sparse_to_dense(n: usize, support: &[usize], coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for (&i, &v) in support.iter().zip(coeffs) {
        c[i] = v;
    }
    c
}

/// Monte-Carlo lower bound on the Psi-RIP constant delta_s.
///
/// Each trial draws a uniform random support of size `s` with complex
/// Gaussian coefficients and evaluates the energy ratio of every nested
/// prefix of the support, so estimates sharing a seed are monotone in `s`.
/// Trial RNG is keyed by the trial index; results do not depend on
/// evaluation order.
pub fn estimate_psi_rip(
    a: &dyn SensingOperator,
    psi: &dyn AnalysisOperator,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<RipEstimate> {
    let n_coeffs = psi.n_coeffs();
    if s == 0 || s > n_coeffs {
        return Err(Error::InvalidRange(format!("sparsity {s} outside 1..={n_coeffs}")));
    }
    if trials == 0 {
        return Err(Error::InvalidRange("need at least one trial".into()));
    }
    let outcomes: Vec<(Vec<f64>, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (support, coeffs) = trial_draw(n_coeffs, s, seed, t);
            let mut ratios = Vec::with_capacity(s);
            let mut skipped_full = false;
            for k in 1..=s {
                let c = sparse_to_dense(n_coeffs, &support[..k], &coeffs[..k]);
                let v = psi.adjoint(&c);
                let nv = linalg::norm2(&v);
                if nv < SYNTHESIS_EPS {
                    if k == s {
                        skipped_full = true;
                    }
                    continue;
                }
                let av = a.apply(&v);
                ratios.push(linalg::norm2(&av).powi(2) / nv.powi(2));
            }
            (ratios, skipped_full)
        })
        .collect();

    let skipped = outcomes.iter().filter(|(_, sk)| *sk).count();
    if skipped * 2 > trials {
        return Err(Error::DegenerateFrame { skipped, trials });
    }
    let ratios: Vec<f64> = outcomes.into_iter().flat_map(|(r, _)| r).collect();
    let delta_hat = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    Ok(RipEstimate { s, delta_hat, trials, seed, ratios })
}

/// Monte-Carlo lower bound on the localization factor
/// `L = sup ||Psi Psi* c||_1 / sqrt(s)` over s-sparse `c` with unit synthesis
/// norm, refined by 20 steps of projected subgradient ascent from the best
/// sample.
pub fn estimate_localization(
    psi: &dyn AnalysisOperator,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<LocalizationEstimate> {
    let n_coeffs = psi.n_coeffs();
    if s == 0 || s > n_coeffs {
        return Err(Error::InvalidRange(format!("sparsity {s} outside 1..={n_coeffs}")));
    }
    if trials == 0 {
        return Err(Error::InvalidRange("need at least one trial".into()));
    }
    let sqrt_s = (s as f64).sqrt();
    let value_of = |support: &[usize], coeffs: &[Complex64]| -> Option<(f64, Vec<Complex64>)> {
        let c = sparse_to_dense(n_coeffs, support, coeffs);
        let v = psi.adjoint(&c);
        let nv = linalg::norm2(&v);
        if nv < SYNTHESIS_EPS {
            return None;
        }
        let scaled: Vec<Complex64> = coeffs.iter().map(|z| z / nv).collect();
        let gram = psi.forward(&psi.adjoint(&sparse_to_dense(n_coeffs, support, &scaled)));
        Some((linalg::norm1(&gram) / sqrt_s, scaled))
    };

    let samples: Vec<Option<(f64, Vec<usize>, Vec<Complex64>)>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (support, coeffs) = trial_draw(n_coeffs, s, seed, t);
            value_of(&support, &coeffs).map(|(val, scaled)| (val, support, scaled))
        })
        .collect();
    let skipped = samples.iter().filter(|o| o.is_none()).count();
    if skipped * 2 > trials {
        return Err(Error::DegenerateFrame { skipped, trials });
    }
    let mut best = samples
        .into_iter()
        .flatten()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    if let Some((ref mut l_best, ref support, ref mut coeffs)) = best {
        // local ascent on the fixed support
        let mut step = 0.1;
        for _ in 0..20 {
            let c = sparse_to_dense(n_coeffs, support, coeffs);
            let gram = psi.forward(&psi.adjoint(&c));
            let sign: Vec<Complex64> = gram
                .iter()
                .map(|z| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(0.0, 0.0) })
                .collect();
            let grad_full = psi.forward(&psi.adjoint(&sign));
            let mut candidate: Vec<Complex64> = coeffs.clone();
            for (ci, &i) in candidate.iter_mut().zip(support) {
                *ci += step * grad_full[i];
            }
            match value_of(support, &candidate) {
                Some((val, scaled)) if val > *l_best => {
                    *l_best = val;
                    *coeffs = scaled;
                }
                _ => step *= 0.5,
            }
        }
    }

    Ok(LocalizationEstimate {
        l_hat: best.map(|(v, _, _)| v).unwrap_or(0.0),
        s,
        trials,
        seed,
    })
}

/// Exact localization factor at s = 1 by enumerating all singleton supports.
pub fn localization_singleton_exact(psi: &dyn AnalysisOperator) -> f64 {
    let n_coeffs = psi.n_coeffs();
    let mut best: f64 = 0.0;
    for lam in 0..n_coeffs {
        let mut c = vec![Complex64::new(0.0, 0.0); n_coeffs];
        c[lam] = Complex64::new(1.0, 0.0);
        let v = psi.adjoint(&c);
        let nv = linalg::norm2(&v);
        if nv < SYNTHESIS_EPS {
            continue;
        }
        let gram = psi.forward(&v);
        best = best.max(linalg::norm1(&gram) / nv);
    }
    best
}

/// Which displayed bound to evaluate: the theorem statement scales with
/// `K/c1` (or `d2 K`), the appendix's final display with `(K L)^2 / c1^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundForm {
    TheoremStatement,
    AppendixFinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    PrimalBound,
    IdentifiableBound,
}

/// Inputs of the measurement-count bound. The universal constant is an
/// explicit input (default 1) because the source leaves it unquantified.
#[derive(Debug, Clone)]
pub struct MeasurementBoundInputs {
    /// K: maximal frame-vector norm.
    pub max_norm: f64,
    /// Lower frame bound c1.
    pub c1: f64,
    /// Upper identifiability constant d2, when the frame has one.
    pub d2: Option<f64>,
    /// Target RIP constant, in (0, 1].
    pub delta: f64,
    pub s: f64,
    /// Localization factor L.
    pub localization: f64,
    /// Number of frame elements N.
    pub n_coeffs: f64,
    /// Failure probability, in (0, 1).
    pub gamma: f64,
    /// Universal constant C.
    pub constant: f64,
}

#[derive(Debug, Clone)]
pub struct MeasurementBound {
    pub m_required: u64,
    pub m_primal: u64,
    pub m_identifiable: Option<u64>,
    pub variant: BoundVariant,
    pub form: BoundForm,
    pub inputs: MeasurementBoundInputs,
}

/// Evaluates the measurement-count bound in the requested form, returning the
/// primal version and, when `d2` is supplied, the identifiable-dual version
/// plus whichever is smaller.
pub fn measurement_bound(
    inputs: MeasurementBoundInputs,
    form: BoundForm,
) -> Result<MeasurementBound> {
    let MeasurementBoundInputs {
        max_norm,
        c1,
        d2,
        delta,
        s,
        localization,
        n_coeffs,
        gamma,
        constant,
    } = inputs;
    for (name, v) in [
        ("K", max_norm),
        ("c1", c1),
        ("s", s),
        ("L", localization),
        ("N", n_coeffs),
        ("C", constant),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidRange(format!("{name} must be positive, got {v}")));
        }
    }
    // delta = 1 is admitted so the degenerate collapsed case stays exact.
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidRange(format!("delta {delta} outside (0, 1]")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidRange(format!("gamma {gamma} outside (0, 1)")));
    }
    if let Some(d2v) = d2 {
        if !(d2v > 0.0) {
            return Err(Error::InvalidRange(format!("d2 must be positive, got {d2v}")));
        }
    }

    let ceil_m = |rhs: f64| -> u64 { rhs.ceil().max(1.0) as u64 };
    let (primal_scale, ident_scale, log_arg) = match form {
        BoundForm::TheoremStatement => {
            let sl2 = s * localization * localization;
            (
                constant * max_norm / c1 * sl2,
                d2.map(|d| d * constant * max_norm * sl2),
                sl2,
            )
        }
        BoundForm::AppendixFinal => {
            let skl = s * (max_norm * localization).powi(2);
            (
                constant * skl / (c1 * c1),
                d2.map(|d| constant * skl * d * d),
                skl / (c1 * c1),
            )
        }
    };
    let branch = (log_arg.ln().powi(3) * n_coeffs.ln()).max((1.0 / gamma).ln());
    let m_primal = ceil_m(primal_scale * delta.powi(-2) * branch);
    let m_identifiable = ident_scale.map(|sc| ceil_m(sc * delta.powi(-2) * branch));
    let (m_required, variant) = match m_identifiable {
        Some(mi) if mi < m_primal => (mi, BoundVariant::IdentifiableBound),
        _ => (m_primal, BoundVariant::PrimalBound),
    };
    Ok(MeasurementBound {
        m_required,
        m_primal,
        m_identifiable,
        variant,
        form,
        inputs: MeasurementBoundInputs {
            max_norm,
            c1,
            d2,
            delta,
            s,
            localization,
            n_coeffs,
            gamma,
            constant,
        },
    })
}

#[derive(Debug, Clone, Copy)]
pub struct BlockTailCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Deterministic block-tail inequality: after sorting `|c|` in decreasing
/// order and splitting into blocks `T_1, T_2, ...` of size `m_block`,
/// `sum_{j>=2} ||c_{T_j}||_2^p <= ||c||_p^p / m_block^(1-p/2)`. The input is
/// the coefficient tail, i.e. the vector with its top-s block already
/// removed. Holds unconditionally; exists as a numeric oracle.
pub fn sorted_block_tail_check(c: &[Complex64], m_block: usize, p: f64) -> Result<BlockTailCheck> {
    if m_block < 1 {
        return Err(Error::InvalidBlockSize(m_block));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidP(p));
    }
    let mut mags: Vec<f64> = c.iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut lhs = 0.0;
    for (j, block) in mags.chunks(m_block).enumerate() {
        if j >= 1 {
            let l2: f64 = block.iter().map(|v| v * v).sum::<f64>().sqrt();
            lhs += l2.powf(p);
        }
    }
    let total_p: f64 = mags.iter().map(|v| v.powf(p)).sum();
    let rhs = total_p / (m_block as f64).powf(1.0 - p / 2.0);
    let slack = rhs - lhs;
    let holds = lhs <= rhs + 1e-12 * rhs.max(1.0);
    Ok(BlockTailCheck { holds, lhs, rhs, slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{GaussianOperator, Mask2d, MaskedFft};
    use crate::transforms::{Haar1d, Haar2d, MatrixOperator, Normalization};
    use crate::frame::Frame;

    struct DiagOperator {
        diag: Vec<f64>,
    }

    impl SensingOperator for DiagOperator {
        fn m(&self) -> usize {
            self.diag.len()
        }
        fn dim(&self) -> usize {
            self.diag.len()
        }
        fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
            x.iter().zip(&self.diag).map(|(v, &d)| v * d).collect()
        }
        fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
            self.apply(y)
        }
    }

    fn identity_basis(n: usize) -> MatrixOperator {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        MatrixOperator::new(&Frame::from_real_rows(&rows).unwrap())
    }

    #[test]
    fn unitary_sensing_gives_zero_delta() {
        let psi = Haar2d::new(8, 2, Normalization::Parseval).unwrap();
        let a = MaskedFft::new(Mask2d::full(8)).unwrap();
        let est = estimate_psi_rip(&a, &psi, 3, 40, 5).unwrap();
        assert!(est.delta_hat <= 1e-8, "delta_hat = {}", est.delta_hat);
    }

    #[test]
    fn scaled_identity_gives_delta_three() {
        let psi = identity_basis(6);
        let a = DiagOperator { diag: vec![2.0; 6] };
        let est = estimate_psi_rip(&a, &psi, 2, 30, 9).unwrap();
        assert!((est.delta_hat - 3.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_enumeration_hits_three_quarters_exactly() {
        let psi = identity_basis(3);
        let a = DiagOperator { diag: vec![1.0, 1.0, 0.5] };
        let est = estimate_psi_rip(&a, &psi, 1, 64, 1).unwrap();
        assert_eq!(est.delta_hat, 0.75);
        let again = estimate_psi_rip(&a, &psi, 1, 64, 1).unwrap();
        assert_eq!(est.ratios, again.ratios);
    }

    #[test]
    fn delta_is_monotone_in_s_under_shared_seed() {
        let psi = Haar1d::new(16, 2, Normalization::UnitNorm).unwrap();
        let a = GaussianOperator::new(10, 16, 33).unwrap();
        let mut last = 0.0;
        for s in 1..=6 {
            let est = estimate_psi_rip(&a, &psi, s, 25, 4).unwrap();
            assert!(est.delta_hat >= last - 1e-15, "s={s}");
            last = est.delta_hat;
        }
    }

    #[test]
    fn delta_is_scale_covariant() {
        let psi = identity_basis(8);
        let a = GaussianOperator::new(8, 8, 2).unwrap();
        let base = estimate_psi_rip(&a, &psi, 3, 20, 6).unwrap();
        struct Scaled<'a>(&'a GaussianOperator, f64);
        impl SensingOperator for Scaled<'_> {
            fn m(&self) -> usize {
                self.0.m()
            }
            fn dim(&self) -> usize {
                self.0.dim()
            }
            fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
                self.0.apply(x).iter().map(|v| v * self.1).collect()
            }
            fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
                self.0.adjoint(y).iter().map(|v| v * self.1).collect()
            }
        }
        let t = 1.7;
        let scaled = estimate_psi_rip(&Scaled(&a, t), &psi, 3, 20, 6).unwrap();
        let expected = base
            .ratios
            .iter()
            .map(|r| (t * t * r - 1.0).abs())
            .fold(0.0, f64::max);
        assert!((scaled.delta_hat - expected).abs() < 1e-10);
    }

    #[test]
    fn degenerate_synthesis_is_detected() {
        struct ZeroSynthesis;
        impl AnalysisOperator for ZeroSynthesis {
            fn dim(&self) -> usize {
                4
            }
            fn n_coeffs(&self) -> usize {
                6
            }
            fn forward(&self, _x: &[Complex64]) -> Vec<Complex64> {
                vec![Complex64::new(0.0, 0.0); 6]
            }
            fn adjoint(&self, _c: &[Complex64]) -> Vec<Complex64> {
                vec![Complex64::new(0.0, 0.0); 4]
            }
        }
        let a = GaussianOperator::new(3, 4, 0).unwrap();
        let err = estimate_psi_rip(&a, &ZeroSynthesis, 2, 10, 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateFrame { .. }));
    }

    #[test]
    fn localization_of_orthonormal_basis_is_one() {
        let psi = identity_basis(12);
        let est = estimate_localization(&psi, 1, 50, 3).unwrap();
        assert!((est.l_hat - 1.0).abs() < 1e-12, "l_hat = {}", est.l_hat);
        assert!((localization_singleton_exact(&psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn localization_monte_carlo_never_exceeds_singleton_exact() {
        let psi = Haar1d::new(16, 3, Normalization::Parseval).unwrap();
        let exact = localization_singleton_exact(&psi);
        let mc = estimate_localization(&psi, 1, 200, 17).unwrap();
        assert!(mc.l_hat <= exact + 1e-10, "mc {} > exact {}", mc.l_hat, exact);
    }

    #[test]
    fn localization_at_full_sparsity_stays_bounded() {
        // orthonormal basis at s = n: values are ||c||_1 / sqrt(n) over unit
        // c, which lies in [1/sqrt(n), 1]; the sup (flat modulus vector) is 1
        let psi = identity_basis(6);
        let est = estimate_localization(&psi, 6, 100, 5).unwrap();
        assert!(est.l_hat <= 1.0 + 1e-12, "l_hat = {}", est.l_hat);
        assert!(est.l_hat >= 1.0 / (6.0f64).sqrt() - 1e-12);
    }

    fn collapsed_inputs() -> MeasurementBoundInputs {
        MeasurementBoundInputs {
            max_norm: 1.0,
            c1: 1.0,
            d2: None,
            delta: 1.0,
            s: 1.0,
            localization: 1.0,
            n_coeffs: std::f64::consts::E,
            gamma: 1.0 / std::f64::consts::E,
            constant: 1.0,
        }
    }

    #[test]
    fn measurement_bound_collapsed_case_is_one() {
        let b = measurement_bound(collapsed_inputs(), BoundForm::TheoremStatement).unwrap();
        assert_eq!(b.m_required, 1);
        assert_eq!(b.variant, BoundVariant::PrimalBound);
    }

    #[test]
    fn measurement_bound_identifiable_variant_halves() {
        let mut inputs = collapsed_inputs();
        inputs.delta = 0.5;
        inputs.s = 4.0;
        inputs.localization = 2.0;
        inputs.n_coeffs = 100.0;
        inputs.gamma = 0.01;
        inputs.d2 = Some(0.5);
        let b = measurement_bound(inputs, BoundForm::TheoremStatement).unwrap();
        let mi = b.m_identifiable.unwrap();
        assert_eq!(b.variant, BoundVariant::IdentifiableBound);
        // d2 = 0.5 with c1 = 1 halves the pre-ceiling right hand side
        assert!(mi <= b.m_primal && (mi as f64) >= b.m_primal as f64 / 2.0 - 1.0);
    }

    #[test]
    fn measurement_bound_monotonicity() {
        let base = MeasurementBoundInputs {
            max_norm: 2.0,
            c1: 0.8,
            d2: None,
            delta: 0.3,
            s: 8.0,
            localization: 1.5,
            n_coeffs: 256.0,
            gamma: 0.05,
            constant: 1.0,
        };
        let m0 = measurement_bound(base.clone(), BoundForm::TheoremStatement)
            .unwrap()
            .m_primal;
        let bump = |f: &dyn Fn(&mut MeasurementBoundInputs)| {
            let mut i = base.clone();
            f(&mut i);
            measurement_bound(i, BoundForm::TheoremStatement).unwrap().m_primal
        };
        assert!(bump(&|i| i.s = 16.0) >= m0);
        assert!(bump(&|i| i.localization = 3.0) >= m0);
        assert!(bump(&|i| i.max_norm = 4.0) >= m0);
        assert!(bump(&|i| i.delta = 0.6) <= m0);
        assert!(bump(&|i| i.c1 = 1.6) <= m0);
        assert!(bump(&|i| i.gamma = 0.5) <= m0);
    }

    #[test]
    fn measurement_bound_rejects_bad_ranges() {
        let mut i = collapsed_inputs();
        i.delta = 0.0;
        assert!(measurement_bound(i, BoundForm::TheoremStatement).is_err());
        let mut i = collapsed_inputs();
        i.gamma = 1.0;
        assert!(measurement_bound(i, BoundForm::TheoremStatement).is_err());
        let mut i = collapsed_inputs();
        i.c1 = -1.0;
        assert!(measurement_bound(i, BoundForm::TheoremStatement).is_err());
    }

    #[test]
    fn appendix_form_matches_theorem_shape_at_unit_inputs() {
        let mut inputs = collapsed_inputs();
        inputs.delta = 0.5;
        let t = measurement_bound(inputs.clone(), BoundForm::TheoremStatement).unwrap();
        let a = measurement_bound(inputs, BoundForm::AppendixFinal).unwrap();
        // K = L = c1 = 1 collapses both displays to the same value
        assert_eq!(t.m_primal, a.m_primal);
    }

    #[test]
    fn block_tail_holds_on_flat_and_geometric_vectors() {
        let flat = vec![Complex64::new(1.0, 0.0); 20];
        for m in 1..=7 {
            let chk = sorted_block_tail_check(&flat, m, 0.7).unwrap();
            assert!(chk.holds);
        }
        let geo: Vec<Complex64> = (0..24)
            .map(|k| Complex64::new(0.5f64.powi(k), 0.0))
            .collect();
        let chk = sorted_block_tail_check(&geo, 4, 0.5).unwrap();
        assert!(chk.holds);
        assert!(chk.slack >= 0.0);
    }

    #[test]
    fn block_tail_randomized() {
        let mut rng = linalg::stream_rng(123, 0);
        for trial in 0..500 {
            let len = 1 + (trial % 64);
            let c = linalg::complex_normal_vec(&mut rng, len);
            let m = 1 + (trial % 9);
            let p = 0.05 + 0.95 * ((trial % 10) as f64 / 10.0);
            let chk = sorted_block_tail_check(&c, m, p).unwrap();
            assert!(chk.holds, "violated at trial {trial}: lhs {} rhs {}", chk.lhs, chk.rhs);
        }
    }

    #[test]
    fn block_tail_rejects_bad_block_size() {
        let c = vec![Complex64::new(1.0, 0.0); 4];
        assert!(matches!(sorted_block_tail_check(&c, 0, 0.5), Err(Error::InvalidBlockSize(0))));
        assert!(sorted_block_tail_check(&c, 2, 1.5).is_err());
    }
}
