//! Closed-form families for a maximally unbiased transition matrix
//! (`cond ≡ 1/3`) and uniform b-marginal (`p_b ≡ 1/3`).
//!
//! The a-marginal is parametrized by the amplitude ratios
//! `x = √(p_a1 / p_a2)` and `y = √(p_a1 / p_a3)`. Under these conditions the
//! Sorkin identity for each row reduces to `y λ_12 + x λ_13 + λ_23 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interference::{triple_prob_from_lambda, InterferenceTable};
use crate::prob_model::ProbabilityData;

/// Slack allowed when checking a produced coefficient against `[-1, 1]` and
/// the row identity against zero.
const FAMILY_TOL: f64 = 1e-9;

/// Roots of `2μ² + (x − y)μ − 1 = 0` and which of them keep every
/// coefficient of the ansatz row `(μ, −μ, 1 − 2μ²)` inside `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuRoots {
    pub plus: f64,
    pub minus: f64,
    pub plus_admissible: bool,
    pub minus_admissible: bool,
}

impl MuRoots {
    pub fn admissible(&self) -> impl Iterator<Item = f64> + '_ {
        [
            (self.plus, self.plus_admissible),
            (self.minus, self.minus_admissible),
        ]
        .into_iter()
        .filter_map(|(mu, ok)| ok.then_some(mu))
    }
}

fn check_ratios(x: f64, y: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite() && y > 0.0 && y.is_finite()) {
        return Err(Error::Domain(format!(
            "amplitude ratios must be positive and finite, got x = {x}, y = {y}"
        )));
    }
    Ok(())
}

/// Solves the quadratic for the ansatz `λ_12 = μ, λ_13 = −μ`.
///
/// Admissibility: both roots when `|x − y| < 1`, only the `+` root when
/// `x − y ≥ 1`, only the `−` root when `y − x ≥ 1`.
pub fn ansatz_mu_roots(x: f64, y: f64) -> Result<MuRoots> {
    check_ratios(x, y)?;
    let d = x - y;
    let disc = (d * d + 8.0).sqrt();
    Ok(MuRoots {
        plus: (-d + disc) / 4.0,
        minus: (-d - disc) / 4.0,
        plus_admissible: d > -1.0,
        minus_admissible: d < 1.0,
    })
}

/// Marginal of the a-observable for the amplitude ratios `x`, `y`.
pub fn ansatz_marginals(x: f64, y: f64) -> [f64; 3] {
    let (x2, y2) = (x * x, y * y);
    let z = x2 * y2 + x2 + y2;
    [x2 * y2 / z, y2 / z, x2 / z]
}

/// Parameters of the one-parameter family `λ_13 = v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    /// Sign in front of the square root in the `λ_12` formula.
    pub sign_12: i8,
    /// Sign in `λ_23 = λ_12 v ± √((1 − λ_12²)(1 − v²))`. `None` selects the
    /// sign that satisfies the row identity.
    pub sign_23: Option<i8>,
}

impl AnsatzParams {
    pub fn new(x: f64, y: f64, v: f64) -> Self {
        AnsatzParams {
            x,
            y,
            v,
            sign_12: 1,
            sign_23: None,
        }
    }
}

fn sign_value(s: i8) -> Result<f64> {
    match s {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        other => Err(Error::Domain(format!("branch sign must be +1 or -1, got {other}"))),
    }
}

/// `(v² − 1)(v²x² − y² − 1 − 2yv)`, the radicand of the `λ_12` formula.
pub fn ansatz_radicand(x: f64, y: f64, v: f64) -> f64 {
    (v * v - 1.0) * (v * v * x * x - y * y - 1.0 - 2.0 * y * v)
}

fn lambda_12(x: f64, y: f64, v: f64, sign_12: i8) -> Result<f64> {
    check_ratios(x, y)?;
    if !(v.abs() <= 1.0) {
        return Err(Error::Domain(format!("family parameter v = {v} outside [-1, 1]")));
    }
    let denom = y * y + 1.0 + 2.0 * y * v;
    if denom.abs() < 1e-14 {
        return Err(Error::Domain(format!(
            "vanishing denominator y² + 1 + 2yv = {denom:e}"
        )));
    }
    let radicand = ansatz_radicand(x, y, v);
    if radicand < 0.0 {
        return Err(Error::Domain(format!("negative radicand {radicand:e}")));
    }
    let l12 = (-x * v * (y + v) + sign_value(sign_12)? * radicand.sqrt()) / denom;
    if !(l12.abs() <= 1.0 + FAMILY_TOL) {
        return Err(Error::Domain(format!("produced |lambda_12| = {} > 1", l12.abs())));
    }
    Ok(l12.clamp(-1.0, 1.0))
}

fn lambda_23_branch(l12: f64, v: f64, sign_23: i8) -> Result<f64> {
    let root = ((1.0 - l12 * l12) * (1.0 - v * v)).max(0.0).sqrt();
    Ok(l12 * v + sign_value(sign_23)? * root)
}

/// Left-hand side `y λ_12 + x v + λ_23` with both branch signs fixed.
pub fn ansatz_born_residual(x: f64, y: f64, v: f64, sign_12: i8, sign_23: i8) -> Result<f64> {
    let l12 = lambda_12(x, y, v, sign_12)?;
    let l23 = lambda_23_branch(l12, v, sign_23)?;
    Ok(y * l12 + x * v + l23)
}

/// Builds the coefficient row `(λ_12, v, λ_23)` of the family and the data
/// it induces: `p_b = cond = 1/3`, `p_a` from the ratios, and pair
/// conditionals `1/3 + 2λ √(p_i p_j) / (3 (p_i + p_j))`.
///
/// The same row is used for every b-outcome. Such data satisfies the Sorkin
/// identity row by row; the pair-conditional distributions are normalized
/// only when the coefficients vanish.
pub fn ansatz_family(params: &AnsatzParams) -> Result<(InterferenceTable, ProbabilityData)> {
    let AnsatzParams { x, y, v, .. } = *params;
    let l12 = lambda_12(x, y, v, params.sign_12)?;
    let l23 = match params.sign_23 {
        Some(s) => {
            let l23 = lambda_23_branch(l12, v, s)?;
            let residual = y * l12 + x * v + l23;
            if residual.abs() > FAMILY_TOL {
                return Err(Error::Domain(format!(
                    "sign {s:+} for lambda_23 violates y*l12 + x*l13 + l23 = 0 (residual {residual:e})"
                )));
            }
            l23
        }
        None => -y * l12 - x * v,
    };
    if !(l23.abs() <= 1.0 + FAMILY_TOL) {
        return Err(Error::Domain(format!("produced |lambda_23| = {} > 1", l23.abs())));
    }
    let l23 = l23.clamp(-1.0, 1.0);

    let table = InterferenceTable::from_rows([[l12, v, l23]; 3]);
    let third = 1.0 / 3.0;
    let p_a = ansatz_marginals(x, y);
    let cond = [[third; 3]; 3];
    let pair_cond = triple_prob_from_lambda(&p_a, &cond, &table)?;
    Ok((
        table,
        ProbabilityData {
            p_b: [third; 3],
            p_a,
            cond,
            pair_cond,
        },
    ))
}
