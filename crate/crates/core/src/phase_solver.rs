//! Recovers the sub-amplitude phases from the interference coefficients.
//!
//! Within one b-row the three equations `cos(φ_i − φ_j) = λ[ij]` fix the
//! phases up to a common shift (the gauge `ν`) and a reflection. Fixing
//! `φ_1 = ν` leaves `φ_2 = ν ± arccos λ_12` and `φ_3 = ν ± arccos λ_13`; the
//! `λ_23` equation selects which sign pairings survive. The two survivors are
//! mirror images of each other, told apart by the branch sign `ε`: `+1` when
//! `φ_3 − ν` lies in `(0, π)` (or, if that difference is `0` or `π`, when
//! `φ_2 − ν` does).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference::InterferenceTable;
use crate::linalg::{angle_distance, wrap_angle};
use crate::prob_model::Pair;

/// Threshold under which a sine is treated as zero when assigning branches.
const SIN_ZERO: f64 = 1e-12;

/// One choice of all nine phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSolution {
    /// `phi[l][i]`, radians in `[0, 2π)`.
    pub phi: [[f64; 3]; 3],
    /// Per-row anchor: `phi[l][0] = gauge[l]`.
    pub gauge: [f64; 3],
    /// Per-row branch sign.
    pub branches: [i8; 3],
    /// Phases left unconstrained because their sub-amplitude vanished; they
    /// are set to the row anchor.
    pub free: [[bool; 3]; 3],
}

/// Whether a row of coefficients admits real phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchReport {
    /// Zero-based b-outcome.
    pub row: usize,
    pub consistent: bool,
    /// `λ_12 λ_13 + √(…)` and `λ_12 λ_13 − √(…)`.
    pub lhs_candidates: (f64, f64),
    /// The measured `λ_23`.
    pub target: f64,
    /// `+1` or `-1` for the candidate closest to the target, when consistent.
    pub matched: Option<i8>,
}

impl BranchReport {
    pub fn mismatch(&self) -> f64 {
        let (plus, minus) = self.lhs_candidates;
        (plus - self.target).abs().min((minus - self.target).abs())
    }
}

fn clamp_unit(value: f64, tol: f64, row: usize, pair: Pair) -> Result<f64> {
    if value.is_nan() || value.abs() > 1.0 + tol {
        return Err(Error::LambdaOutOfRange {
            row: row + 1,
            pair,
            value,
        });
    }
    Ok(value.clamp(-1.0, 1.0))
}

/// Checks `λ_23 = λ_12 λ_13 ± √((1 − λ_12²)(1 − λ_13²))` for row `row`.
pub fn row_consistency(
    row: usize,
    lambda_12: f64,
    lambda_13: f64,
    lambda_23: f64,
    tol: f64,
) -> Result<BranchReport> {
    let x = clamp_unit(lambda_12, tol, row, Pair::P12)?;
    let y = clamp_unit(lambda_13, tol, row, Pair::P13)?;
    let root = ((1.0 - x * x) * (1.0 - y * y)).sqrt();
    let plus = x * y + root;
    let minus = x * y - root;
    let dp = (plus - lambda_23).abs();
    let dm = (minus - lambda_23).abs();
    let consistent = dp.min(dm) <= tol;
    let matched = consistent.then_some(if dp <= dm { 1 } else { -1 });
    Ok(BranchReport {
        row,
        consistent,
        lhs_candidates: (plus, minus),
        target: lambda_23,
        matched,
    })
}

#[derive(Debug, Clone, Copy)]
struct RowSolution {
    phi: [f64; 3],
    branch: i8,
    free: [bool; 3],
    mismatch: f64,
}

fn branch_sign(phi: &[f64; 3], nu: f64) -> i8 {
    let s3 = (phi[2] - nu).sin();
    if s3.abs() > SIN_ZERO {
        return if s3 > 0.0 { 1 } else { -1 };
    }
    let s2 = (phi[1] - nu).sin();
    if s2.abs() > SIN_ZERO && s2 < 0.0 {
        -1
    } else {
        1
    }
}

/// Solves one row, allowing undefined coefficients.
fn solve_row_partial(row: usize, lambdas: [Option<f64>; 3], nu: f64, tol: f64) -> Result<Vec<RowSolution>> {
    let nu = wrap_angle(nu);
    let [l12, l13, l23] = lambdas;
    let acos = |v: Option<f64>, pair: Pair| -> Result<Option<f64>> {
        v.map(|x| clamp_unit(x, tol, row, pair).map(f64::acos)).transpose()
    };
    let a = acos(l12, Pair::P12)?;
    let b = acos(l13, Pair::P13)?;
    let c = acos(l23, Pair::P23)?;

    let both = |t: f64| [t, -t];
    let mut candidates: Vec<([f64; 3], [bool; 3])> = Vec::with_capacity(4);
    match (a, b) {
        (Some(a), Some(b)) => {
            for sb in both(b) {
                for sa in both(a) {
                    candidates.push(([nu, nu + sa, nu + sb], [false; 3]));
                }
            }
        }
        (Some(a), None) => {
            for sa in both(a) {
                let p2 = nu + sa;
                match c {
                    Some(c) => {
                        for sc in both(c) {
                            candidates.push(([nu, p2, p2 - sc], [false; 3]));
                        }
                    }
                    None => candidates.push(([nu, p2, nu], [false, false, true])),
                }
            }
        }
        (None, Some(b)) => {
            for sb in both(b) {
                let p3 = nu + sb;
                match c {
                    Some(c) => {
                        for sc in both(c) {
                            candidates.push(([nu, p3 + sc, p3], [false; 3]));
                        }
                    }
                    None => candidates.push(([nu, nu, p3], [false, true, false])),
                }
            }
        }
        (None, None) => match c {
            Some(c) => {
                for sc in both(c) {
                    candidates.push(([nu, nu, nu - sc], [true, false, false]));
                }
            }
            None => candidates.push(([nu; 3], [true; 3])),
        },
    }

    let constraints = [(l12, 0, 1), (l13, 0, 2), (l23, 1, 2)];
    let mut solutions: Vec<RowSolution> = Vec::new();
    let mut best_mismatch = f64::INFINITY;
    for (phi, free) in candidates {
        let mismatch = constraints
            .iter()
            .filter_map(|&(lambda, i, j)| lambda.map(|x| ((phi[i] - phi[j]).cos() - x).abs()))
            .fold(0.0_f64, f64::max);
        best_mismatch = best_mismatch.min(mismatch);
        if mismatch > tol {
            continue;
        }
        let phi = phi.map(wrap_angle);
        let duplicate = solutions.iter().any(|s| {
            s.phi
                .iter()
                .zip(&phi)
                .all(|(x, y)| angle_distance(*x, *y) <= tol.max(1e-12))
        });
        if !duplicate {
            solutions.push(RowSolution {
                branch: branch_sign(&phi, nu),
                phi,
                free,
                mismatch,
            });
        }
    }

    if solutions.is_empty() {
        let report = row_consistency(
            row,
            l12.unwrap_or(1.0),
            l13.unwrap_or(1.0),
            l23.unwrap_or(f64::NAN),
            tol,
        )?;
        let (plus, minus) = report.lhs_candidates;
        return Err(Error::InconsistentRow {
            row: row + 1,
            target: report.target,
            plus,
            minus,
            mismatch: best_mismatch,
        });
    }

    // Upper branch first; within a branch, the tighter fit first.
    solutions.sort_by(|x, y| {
        y.branch
            .cmp(&x.branch)
            .then(x.mismatch.total_cmp(&y.mismatch))
    });
    Ok(solutions)
}

/// All phase triples `(φ_1, φ_2, φ_3)` with `φ_1 = ν` solving one row.
///
/// Angles are reduced to `[0, 2π)`. Normally there are two mirror-image
/// solutions; they coincide when both `λ_12` and `λ_13` are `±1`.
pub fn solve_row(
    lambda_12: f64,
    lambda_13: f64,
    lambda_23: f64,
    nu: f64,
    tol: f64,
) -> Result<Vec<[f64; 3]>> {
    let sols = solve_row_partial(0, [Some(lambda_12), Some(lambda_13), Some(lambda_23)], nu, tol)?;
    Ok(sols.into_iter().map(|s| s.phi).collect())
}

/// Solves every row and returns the Cartesian product of the row solutions,
/// ordered lexicographically by branch signs with `+1` before `-1`.
pub fn solve_all(table: &InterferenceTable, gauge: [f64; 3], tol: f64) -> Result<Vec<PhaseSolution>> {
    let gauge = gauge.map(wrap_angle);
    let mut rows: Vec<Vec<RowSolution>> = Vec::with_capacity(3);
    for (l, nu) in gauge.iter().enumerate() {
        rows.push(solve_row_partial(l, table.row(l), *nu, tol)?);
    }

    let mut out = Vec::with_capacity(rows.iter().map(Vec::len).product());
    for r0 in &rows[0] {
        for r1 in &rows[1] {
            for r2 in &rows[2] {
                out.push(PhaseSolution {
                    phi: [r0.phi, r1.phi, r2.phi],
                    gauge,
                    branches: [r0.branch, r1.branch, r2.branch],
                    free: [r0.free, r1.free, r2.free],
                });
            }
        }
    }
    Ok(out)
}
