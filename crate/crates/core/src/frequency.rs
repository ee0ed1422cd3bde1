//! Frequency functionals from coefficients, with a quadrature cross-check.
//!
//! With orthonormal modes and the time-invariant measure, at time t
//!
//! ```text
//! I = Σ a_j²,   D = −2∫|∇u|² dμ_t = 2 Σ c_j a_j²,   c_j = −μ_j/(−t),
//! U = (−t)^{1+2κ} D/I,   N_raw = (−t) D/I.
//! ```

use serde::{Deserialize, Serialize};

use crate::background::Background;
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::field::{check_time, CoefficientField};
use crate::geometry::geometry_at;
use crate::modes::ModeBasis;
use crate::quadrature::QuadratureRule;

pub fn compute_i(field: &CoefficientField) -> f64 {
    field.coeffs().values().map(|a| a * a).sum()
}

pub fn compute_d(field: &CoefficientField) -> f64 {
    let s = -field.time();
    2.0 * field.spectrum().map(|(mu, a)| -mu / s * a * a).sum::<f64>()
}

pub fn compute_n_raw(field: &CoefficientField) -> Result<f64> {
    if field.is_zero() {
        return Err(Error::ZeroField(field.time()));
    }
    Ok(-field.time() * compute_d(field) / compute_i(field))
}

pub fn compute_u(field: &CoefficientField, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let n_raw = compute_n_raw(field)?;
    Ok((-field.time()).powf(2.0 * kappa) * n_raw)
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument {
            name: "kappa",
            reason: format!("must be finite and nonnegative, got {kappa}"),
        })
    }
}

/// The eigenvalue c(t) = D/(2I) a pure mode would have under 𝓛_t.
pub fn fitted_c(field: &CoefficientField) -> Result<f64> {
    if field.is_zero() {
        return Err(Error::ZeroField(field.time()));
    }
    Ok(compute_d(field) / (2.0 * compute_i(field)))
}

/// I·∫(𝓛_t u)² − (∫u 𝓛_t u)², evaluated through Lagrange's identity
/// Σ_{i<j} a_i² a_j² (c_i − c_j)² so that it is exactly zero on an eigenspace.
pub fn cauchy_schwarz_defect(field: &CoefficientField) -> f64 {
    let s = -field.time();
    let terms: Vec<(f64, f64)> = field.spectrum().map(|(mu, a)| (-mu / s, a * a)).collect();
    let mut total = 0.0;
    for (i, (ci, wi)) in terms.iter().enumerate() {
        for (cj, wj) in &terms[i + 1..] {
            let d = ci - cj;
            total += wi * wj * d * d;
        }
    }
    total
}

/// First nonzero eigenvalue of −𝓛_t, i.e. μ₁/(−t).
///
/// Constants are excluded: on closed shrinkers the infimum over all nonzero
/// functions is attained by constants and is 0, so the meaningful quantity is
/// the first eigenvalue on the orthogonal complement of constants.
pub fn lambda1(bg: &Background, t: f64) -> Result<f64> {
    bg.validate()?;
    check_time(t)?;
    Ok(bg.first_nonzero_mu() / (-t))
}

/// Functionals recomputed by quadrature from pointwise jets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureFunctionals {
    pub i: f64,
    pub d: f64,
    pub cs_defect: f64,
}

pub fn quadrature_functionals(
    field: &CoefficientField,
    rule: &QuadratureRule,
) -> Result<QuadratureFunctionals> {
    let bg = field.background();
    if rule.background != bg {
        return Err(Error::InvalidArgument {
            name: "rule",
            reason: format!("rule is for {} but the field lives on {bg}", rule.background),
        });
    }
    let s = -field.time();
    let mut basis = ModeBasis::new(bg)?;
    let (mut i, mut grad2, mut lu2, mut ulu) = (0.0, 0.0, 0.0, 0.0);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let geometry = geometry_at(&bg, p)?;
        let jet = basis.combination_jet(field.coeffs().iter().map(|(l, a)| (l, *a)), &geometry, p)?;
        // 𝓛_t = 𝓛₁/(−t), |∇u|²_t = |∇v|²/(−t)
        let lu = jet.drift_laplacian / s;
        i += w * jet.value * jet.value;
        grad2 += w * jet.gradient.norm_squared() / s;
        lu2 += w * lu * lu;
        ulu += w * jet.value * lu;
    }
    Ok(QuadratureFunctionals {
        i,
        d: -2.0 * grad2,
        cs_defect: i * lu2 - ulu * ulu,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub t: f64,
    pub i: f64,
    pub d: f64,
    /// `None` where the field vanishes and the frequency is undefined.
    pub u: Option<f64>,
    pub n_raw: Option<f64>,
    pub cs_defect: f64,
    pub kappa_used: f64,
}

impl FrequencyRow {
    pub fn from_field(field: &CoefficientField, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self {
            t: field.time(),
            i: compute_i(field),
            d: compute_d(field),
            u: compute_u(field, kappa).ok(),
            n_raw: compute_n_raw(field).ok(),
            cs_defect: cauchy_schwarz_defect(field),
            kappa_used: kappa,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrace {
    pub rows: Vec<FrequencyRow>,
}

impl FrequencyTrace {
    pub fn from_trajectory(traj: &Trajectory, kappa: f64) -> Result<Self> {
        let rows = traj
            .fields
            .iter()
            .map(|f| FrequencyRow::from_field(f, kappa))
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }
}
