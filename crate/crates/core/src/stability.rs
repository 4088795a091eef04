//! Closed-form stability constants for the primal, Parseval and dual analysis
//! problems, evaluated verbatim from their displayed formulas, plus the final
//! error bound `C1 eps^p + C2 tail / s^(1-p/2)` and sparsity admissibility.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::transforms::AnalysisOperator;

/// RIP-constant threshold of the general stability theorem (at order nu).
pub const DELTA_LIMIT_GENERAL: f64 = 0.5;
/// RIP-constant threshold of the Parseval corollary (at order 7s).
pub const DELTA_LIMIT_PARSEVAL: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityVariant {
    Primal,
    Parseval,
    Dual,
}

fn check_common(p: f64, delta_sm: f64, delta_m: f64, rho: f64, gamma1: f64, gamma2: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidP(p));
    }
    for (name, v) in [("rho", rho), ("gamma1", gamma1), ("gamma2", gamma2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidRange(format!("{name} must be positive, got {v}")));
        }
    }
    for (name, d) in [("delta_s+M", delta_sm), ("delta_M", delta_m)] {
        if !(0.0..1.0).contains(&d) {
            return Err(Error::InvalidRange(format!("{name} = {d} outside [0, 1)")));
        }
    }
    Ok(())
}

fn gamma_pair(
    which1: &'static str,
    lead1: f64,
    lead2: f64,
    subtracted: f64,
) -> Result<(f64, f64)> {
    if lead1 <= 0.0 {
        return Err(Error::NonPositiveConstant {
            which: which1,
            value: lead1,
            leading: lead1,
            subtracted,
        });
    }
    let g1 = lead1.sqrt() - subtracted;
    let g2 = lead2.sqrt() - subtracted;
    Ok((g1, g2))
}

/// Gamma constants of the general (primal analysis) stability proof.
pub fn gamma_primal(
    p: f64,
    c1: f64,
    c2: f64,
    d1: f64,
    d2: f64,
    delta_sm: f64,
    delta_m: f64,
    rho: f64,
    gamma1: f64,
    gamma2: f64,
) -> Result<(f64, f64)> {
    check_common(p, delta_sm, delta_m, rho, gamma1, gamma2)?;
    for (name, v) in [("c1", c1), ("c2", c2), ("d1", d1), ("d2", d2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidRange(format!("{name} must be positive, got {v}")));
        }
    }
    let rho_pow = rho.powf(2.0 - p);
    let bracket = c1.powf(p) * d1.powf(2.0 * p)
        - (gamma1 / (2.0 * c1.powf(p / 2.0)) + rho_pow * c2.powf(p) * d2.powf(2.0 * p) * (1.0 + gamma2));
    let front = 2.0 * gamma1 * c1.powf(p / 2.0) * (1.0 - delta_sm).powf(p);
    let subtracted = ((c2 * d2 * d2 * (1.0 + delta_m)).powf(p) * rho_pow).sqrt();
    gamma_pair(
        "Gamma1 (primal)",
        front * bracket,
        front * rho_pow * (1.0 / gamma2 + 1.0),
        subtracted,
    )
}

/// Gamma constants of the Parseval corollary, evaluated from its own display
/// (not by delegating to the primal specialization).
pub fn gamma_parseval(
    p: f64,
    delta_sm: f64,
    delta_m: f64,
    rho: f64,
    gamma1: f64,
    gamma2: f64,
) -> Result<(f64, f64)> {
    check_common(p, delta_sm, delta_m, rho, gamma1, gamma2)?;
    let rho_pow = rho.powf(2.0 - p);
    let bracket = 1.0 - (gamma1 / 2.0 + rho_pow * (1.0 + gamma2));
    let front = 2.0 * gamma1 * (1.0 - delta_sm).powf(p);
    let subtracted = ((1.0 + delta_m).powf(p) * rho_pow).sqrt();
    gamma_pair(
        "Gamma1 (parseval)",
        front * bracket,
        front * rho_pow * (1.0 / gamma2 + 1.0),
        subtracted,
    )
}

/// Gamma constants of the dual analysis problem.
pub fn gamma_dual(
    p: f64,
    c1: f64,
    c2: f64,
    delta_sm: f64,
    delta_m: f64,
    rho: f64,
    gamma1: f64,
    gamma2: f64,
) -> Result<(f64, f64)> {
    check_common(p, delta_sm, delta_m, rho, gamma1, gamma2)?;
    for (name, v) in [("c1", c1), ("c2", c2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidRange(format!("{name} must be positive, got {v}")));
        }
    }
    let rho_pow = rho.powf(2.0 - p);
    let bracket =
        1.0 - c2.powf(p) * gamma1 / 2.0 - rho_pow * (1.0 + gamma2) / c1.powf(2.0 * p);
    let lead1 = (2.0 * gamma1 / c2.powf(p)) * bracket * (1.0 - delta_sm).powf(p);
    let lead2 = (1.0 - delta_sm).powf(p) * rho_pow * (1.0 + 1.0 / gamma2) * 2.0 * gamma1
        / c1.powf(p);
    let subtracted = ((1.0 + delta_m).powf(p) * (c2 / c1).powf(p) * rho_pow).sqrt();
    gamma_pair("Gamma1 (dual)", lead1, lead2, subtracted)
}

/// Proof choice for the primal problem: `gamma1 = c1^(3p/2) d1^(2p)` and the
/// block size `M = s (2 (1+2^-p) c2^p d2^(2p) / c1^p)^(1/(2-p))`. Returns
/// `(gamma1, M/s)`.
///
/// The scale factors of M enter through the root `1/(2-p)` so that a looser
/// frame (larger `c2 d2^2 / c1`) enlarges the block; with them the bracket of
/// Gamma1 is positive for every p < 1 and exactly zero in the limit
/// `gamma2 -> 0` at p = 1.
pub fn recommended_primal_params(p: f64, c1: f64, c2: f64, d1: f64, d2: f64) -> (f64, f64) {
    let gamma1 = c1.powf(1.5 * p) * d1.powf(2.0 * p);
    let m_over_s = (2.0 * (1.0 + 2.0f64.powf(-p)) * c2.powf(p) * d2.powf(2.0 * p) / c1.powf(p))
        .powf(1.0 / (2.0 - p));
    (gamma1, m_over_s)
}

/// Proof choice for the dual problem: `gamma1 = c1^-p / 2` (the in-range
/// maximizer of the Gamma1 bracket under `gamma1 <= c1^-p`) and
/// `M = s (2 / c1^(2p))^(1/(2-p))`. Returns `(gamma1, M/s)`.
pub fn recommended_dual_params(p: f64, c1: f64) -> (f64, f64) {
    let gamma1 = c1.powf(-p) / 2.0;
    let m_over_s = (2.0 / c1.powf(2.0 * p)).powf(1.0 / (2.0 - p));
    (gamma1, m_over_s)
}

/// Free parameters and derived constants of one stability evaluation.
#[derive(Debug, Clone)]
pub struct StabilityConstants {
    pub variant: StabilityVariant,
    pub p: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub s: usize,
    pub m_block: usize,
    pub rho: f64,
    pub delta_sm: f64,
    pub delta_m: f64,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    /// `C1 = 2^p / Gamma1`
    pub c_1: f64,
    /// `C2 = 2 Gamma2 / Gamma1`
    pub c_2: f64,
    /// Frame rescaling applied to enforce `c1 >= 1` (1.0 when none); the
    /// coefficient tail of the original frame is multiplied by
    /// `tail_scale = scale^p` inside [`error_bound`].
    pub scale: f64,
}

/// Inputs for [`StabilityConstants::compute`].
#[derive(Debug, Clone)]
pub struct StabilityInputs {
    pub variant: StabilityVariant,
    pub p: f64,
    pub s: usize,
    pub m_block: usize,
    pub delta_sm: f64,
    pub delta_m: f64,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl StabilityConstants {
    /// Evaluates the Gamma pair for the requested variant and composes the
    /// final error-bound constants. Construction fails when either Gamma is
    /// non-positive.
    ///
    /// For the primal variant a frame with `c1 < 1` is first rescaled by
    /// `1/sqrt(c1)` (making the lower bound one); the recorded `scale` is
    /// undone when the bound is evaluated.
    pub fn compute(inputs: StabilityInputs) -> Result<Self> {
        let StabilityInputs {
            variant,
            p,
            s,
            m_block,
            delta_sm,
            delta_m,
            mut c1,
            mut c2,
            mut d1,
            mut d2,
            gamma1,
            gamma2,
        } = inputs;
        if s == 0 || m_block == 0 {
            return Err(Error::InvalidRange("s and M must be at least 1".into()));
        }
        let rho = s as f64 / m_block as f64;
        let mut scale = 1.0;
        if variant == StabilityVariant::Primal && c1 < 1.0 {
            // rescale frame vectors by 1/sqrt(c1): bounds divide by c1,
            // identifiability constants multiply by c1
            scale = 1.0 / c1.sqrt();
            d1 *= c1;
            d2 *= c1;
            c2 /= c1;
            c1 = 1.0;
        }
        let (g1v, g2v) = match variant {
            StabilityVariant::Primal => {
                gamma_primal(p, c1, c2, d1, d2, delta_sm, delta_m, rho, gamma1, gamma2)?
            }
            StabilityVariant::Parseval => {
                gamma_parseval(p, delta_sm, delta_m, rho, gamma1, gamma2)?
            }
            StabilityVariant::Dual => {
                gamma_dual(p, c1, c2, delta_sm, delta_m, rho, gamma1, gamma2)?
            }
        };
        for (name, v) in [("Gamma1", g1v), ("Gamma2", g2v)] {
            if v <= 0.0 {
                return Err(Error::NonPositiveConstant {
                    which: if name == "Gamma1" { "Gamma1" } else { "Gamma2" },
                    value: v,
                    leading: v,
                    subtracted: 0.0,
                });
            }
        }
        Ok(StabilityConstants {
            variant,
            p,
            gamma1,
            gamma2,
            s,
            m_block,
            rho,
            delta_sm,
            delta_m,
            c1,
            c2,
            d1,
            d2,
            gamma_1: g1v,
            gamma_2: g2v,
            c_1: 2.0f64.powf(p) / g1v,
            c_2: 2.0 * g2v / g1v,
            scale,
        })
    }
}

/// Final reconstruction bound `C1 eps^p + C2 tail / s^(1-p/2)`, where `tail`
/// is the lp^p norm of the coefficient tail `||Psi x - (Psi x)_s||_p^p`.
pub fn error_bound(
    constants: &StabilityConstants,
    epsilon: f64,
    tail_p_norm: f64,
    s: usize,
) -> Result<f64> {
    if epsilon < 0.0 || tail_p_norm < 0.0 || s == 0 {
        return Err(Error::InvalidRange(
            "epsilon and tail must be nonnegative, s positive".into(),
        ));
    }
    let p = constants.p;
    let tail = tail_p_norm * constants.scale.powf(p);
    Ok(constants.c_1 * epsilon.powf(p) + constants.c_2 * tail / (s as f64).powf(1.0 - p / 2.0))
}

/// RIP order exponent convention for the primal admissibility hypothesis:
/// the theorem statement carries `d2^(p/(p-2))`, its proof `d2^(2p/(p-2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuExponent {
    TheoremStatement,
    ProofChoice,
}

#[derive(Debug, Clone, Copy)]
pub struct AdmissibleSparsity {
    pub s_max: usize,
    /// RIP order at which the hypothesis `delta_nu < 0.5` must hold,
    /// evaluated at `s = s_max` (zero when no sparsity is admissible).
    pub nu: f64,
}

/// Largest sparsity satisfying the stability hypothesis.
///
/// Primal: `s < q / (2 d2^2 (1+2^-p)^(1/(p-2)))`;
/// dual: `s < N (c1^(2p)/3)^(1/(2-p))`.
pub fn admissible_sparsity(
    variant: StabilityVariant,
    p: f64,
    c1: f64,
    c2: f64,
    d2: f64,
    q_or_n: usize,
    nu_exponent: NuExponent,
) -> Result<AdmissibleSparsity> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidP(p));
    }
    if !(c1 > 0.0 && c2 >= c1 && d2 > 0.0) {
        return Err(Error::InvalidRange(format!(
            "need 0 < c1 <= c2 and d2 > 0, got c1={c1} c2={c2} d2={d2}"
        )));
    }
    let bound = match variant {
        StabilityVariant::Primal | StabilityVariant::Parseval => {
            q_or_n as f64 / (2.0 * d2 * d2 * (1.0 + 2.0f64.powf(-p)).powf(1.0 / (p - 2.0)))
        }
        StabilityVariant::Dual => q_or_n as f64 * (c1.powf(2.0 * p) / 3.0).powf(1.0 / (2.0 - p)),
    };
    let s_max = if bound <= 1.0 { 0 } else { (bound - 1e-12).floor() as usize };
    let nu = if s_max == 0 {
        0.0
    } else {
        let s = s_max as f64;
        match variant {
            StabilityVariant::Primal | StabilityVariant::Parseval => {
                let d2_exp = match nu_exponent {
                    NuExponent::TheoremStatement => p / (p - 2.0),
                    NuExponent::ProofChoice => 2.0 * p / (p - 2.0),
                };
                s * 2.0 * (1.0 + 2.0f64.powf(-p)).powf(1.0 / (p - 2.0)) * c2.powf(p / (p - 2.0))
                    * d2.powf(d2_exp)
                    / c1.powf(p / (p - 2.0))
            }
            StabilityVariant::Dual => s * (3.0 / c1.powf(2.0 * p)).powf(1.0 / (2.0 - p)),
        }
    };
    Ok(AdmissibleSparsity { s_max, nu })
}

#[derive(Debug, Clone, Copy)]
pub struct ConeCheck {
    pub holds: bool,
    /// `rhs - lhs`; nonnegative when the constraint holds without slack.
    pub slack: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Cone constraint of a feasible near-minimizer: with `T0` the top-s indices
/// of `|Psi x|` and `z = x - x_star`,
/// `||Psi_{T0^c} z||_p^p <= 2 ||Psi_{T0^c} x||_p^p + ||Psi_{T0} z||_p^p`.
/// `objective_slack` (the solver's objective gap) is added to the right-hand
/// side, since the inequality is proved for exact minimizers.
pub fn cone_constraint_check(
    psi: &dyn AnalysisOperator,
    x: &[Complex64],
    x_star: &[Complex64],
    s: usize,
    p: f64,
    objective_slack: f64,
) -> Result<ConeCheck> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidP(p));
    }
    if x.len() != psi.dim() || x_star.len() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: x.len().max(x_star.len()) });
    }
    let cx = psi.forward(x);
    let z: Vec<Complex64> = x.iter().zip(x_star).map(|(a, b)| a - b).collect();
    let cz = psi.forward(&z);
    let mut order: Vec<usize> = (0..cx.len()).collect();
    order.sort_by(|&i, &j| {
        cx[j].norm()
            .partial_cmp(&cx[i].norm())
            .unwrap()
            .then(i.cmp(&j))
    });
    let t0: std::collections::HashSet<usize> = order.into_iter().take(s).collect();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for idx in 0..cx.len() {
        if t0.contains(&idx) {
            rhs += cz[idx].norm().powf(p);
        } else {
            lhs += cz[idx].norm().powf(p);
            rhs += 2.0 * cx[idx].norm().powf(p);
        }
    }
    rhs += objective_slack;
    let slack = rhs - lhs;
    Ok(ConeCheck { holds: lhs <= rhs + 1e-12 * rhs.max(1.0), slack, lhs, rhs })
}
