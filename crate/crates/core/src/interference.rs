//! Interference coefficients and the identities built on them.
//!
//! For each b-outcome `l` and pair `{i, j}` the coefficient
//!
//! ```text
//! λ[l,ij] = ((p_a[i] + p_a[j]) · pc[l,ij] − (w[l,i] + w[l,j])) / (2 √(w[l,i] · w[l,j]))
//! ```
//!
//! with `w[l,i] = p_a[i] · cond[l][i]` measures how far the pair context
//! deviates from the classical mixture. For data of quantum origin it equals
//! `cos(φ[l,i] − φ[l,j])`.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prob_model::{Pair, PairMap, ProbabilityData, ValidationOutcome};

/// Products of sub-amplitude weights below this are treated as zero.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;

/// The nine interference coefficients. `None` marks a vanished denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceTable {
    /// `lambda[l][pair.index()]`.
    pub lambda: [[Option<f64>; 3]; 3],
}

impl InterferenceTable {
    /// Builds a fully defined table from rows ordered `(λ_12, λ_13, λ_23)`.
    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        InterferenceTable {
            lambda: rows.map(|r| r.map(Some)),
        }
    }

    pub fn get(&self, l: usize, pair: Pair) -> Option<f64> {
        self.lambda[l][pair.index()]
    }

    pub fn set(&mut self, l: usize, pair: Pair, value: Option<f64>) {
        self.lambda[l][pair.index()] = value;
    }

    /// Row `l` ordered `(λ_12, λ_13, λ_23)`.
    pub fn row(&self, l: usize) -> [Option<f64>; 3] {
        self.lambda[l]
    }

    pub fn defined_mask(&self) -> [[bool; 3]; 3] {
        self.lambda.map(|r| r.map(|x| x.is_some()))
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda
            .iter()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl Serialize for InterferenceTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // Pair-keyed arrays over l, mirroring the pair_cond layout.
        let lambda = PairMap::from_fn(|p| [0, 1, 2].map(|l| self.get(l, p)));
        let defined = PairMap::from_fn(|p| [0, 1, 2].map(|l| self.get(l, p).is_some()));
        #[derive(Serialize)]
        struct Doc {
            lambda: PairMap<[Option<f64>; 3]>,
            defined: PairMap<[bool; 3]>,
        }
        Doc { lambda, defined }.serialize(serializer)
    }
}

fn coefficient(data: &ProbabilityData, l: usize, pair: Pair) -> Option<f64> {
    let (i, j) = pair.indices();
    let wi = data.weight(l, i);
    let wj = data.weight(l, j);
    let product = wi * wj;
    if !(product >= DENOMINATOR_FLOOR) {
        return None;
    }
    let numerator = (data.p_a[i] + data.p_a[j]) * data.pair_cond[pair][l] - (wi + wj);
    Some(numerator / (2.0 * product.sqrt()))
}

pub fn interference_coefficients(data: &ProbabilityData) -> InterferenceTable {
    let mut table = InterferenceTable {
        lambda: [[None; 3]; 3],
    };
    for l in 0..3 {
        for pair in Pair::ALL {
            table.set(l, pair, coefficient(data, l, pair));
        }
    }
    table
}

/// Every defined coefficient must satisfy `|λ| ≤ 1 + tol`.
pub fn boundedness_check(table: &InterferenceTable, tol: f64) -> ValidationOutcome {
    let mut out = ValidationOutcome::default();
    for l in 0..3 {
        for pair in Pair::ALL {
            if let Some(x) = table.get(l, pair) {
                let excess = (x.abs() - 1.0).max(0.0);
                if x.is_nan() || excess > tol {
                    out.violations.push(crate::prob_model::Violation {
                        constraint: format!("lambda[{},{pair}].bound", l + 1),
                        residual: x.abs(),
                        tolerance: 1.0 + tol,
                    });
                }
            }
        }
    }
    out
}

/// Total probability of `β_l` with interference terms:
/// `Σ_i w[l,i] + 2 Σ_{i<j} λ[l,ij] √(w[l,i] w[l,j])`.
pub fn ftp_with_interference(
    data: &ProbabilityData,
    table: &InterferenceTable,
    l: usize,
) -> Result<f64> {
    let mut total: f64 = (0..3).map(|i| data.weight(l, i)).sum();
    for pair in Pair::ALL {
        let lambda = table
            .get(l, pair)
            .ok_or(Error::UndefinedLambda { row: l + 1, pair })?;
        let (i, j) = pair.indices();
        total += 2.0 * lambda * (data.weight(l, i) * data.weight(l, j)).sqrt();
    }
    Ok(total)
}

/// `p_b[l]` minus the right-hand side of the Sorkin identity, per outcome.
///
/// Vanishes for every data set that comes from a state and two orthonormal
/// bases. No tolerance is applied.
pub fn sorkin_residual(data: &ProbabilityData) -> [f64; 3] {
    let pa = &data.p_a;
    std::array::from_fn(|l| {
        let pc = |p: Pair| data.pair_cond[p][l];
        let c = &data.cond[l];
        let rhs = pa[0] * (pc(Pair::P12) + pc(Pair::P13) - c[0])
            + pa[1] * (pc(Pair::P12) + pc(Pair::P23) - c[1])
            + pa[2] * (pc(Pair::P13) + pc(Pair::P23) - c[2]);
        data.p_b[l] - rhs
    })
}

/// Inverts [`interference_coefficients`]: rebuilds the pair-conditional
/// probabilities from `p_a`, `cond` and a coefficient table.
///
/// Undefined coefficients belong to vanishing sub-amplitudes and contribute
/// no cross term.
pub fn triple_prob_from_lambda(
    p_a: &[f64; 3],
    cond: &[[f64; 3]; 3],
    table: &InterferenceTable,
) -> Result<PairMap<[f64; 3]>> {
    let mut out = PairMap([[0.0; 3]; 3]);
    for pair in Pair::ALL {
        let (i, j) = pair.indices();
        let mass = p_a[i] + p_a[j];
        if !(mass >= DENOMINATOR_FLOOR) {
            return Err(Error::DegenerateContext { pair, mass });
        }
        for l in 0..3 {
            let wi = p_a[i] * cond[l][i];
            let wj = p_a[j] * cond[l][j];
            let lambda = table.get(l, pair).unwrap_or(0.0);
            if lambda.is_nan() || lambda.abs() > 1.0 {
                return Err(Error::LambdaOutOfRange {
                    row: l + 1,
                    pair,
                    value: lambda,
                });
            }
            let p = (wi + wj + 2.0 * lambda * (wi * wj).sqrt()) / mass;
            // |λ| ≤ 1 makes the numerator a square; clip rounding below zero.
            out[pair][l] = p.max(0.0);
        }
    }
    Ok(out)
}

/// `Σ_l λ[l,jk] √(cond[l][j] · cond[l][k])` for every pair.
///
/// This is the normalization of the pair-conditional distributions rewritten
/// in coefficients; consistent data gives zero. Pairs where a needed
/// coefficient is undefined while its weight is nonzero are omitted.
pub fn lambda_normalization_residual(
    data: &ProbabilityData,
    table: &InterferenceTable,
) -> BTreeMap<Pair, f64> {
    let mut out = BTreeMap::new();
    'pairs: for pair in Pair::ALL {
        let (j, k) = pair.indices();
        let mut sum = 0.0;
        for l in 0..3 {
            let weight = (data.cond[l][j] * data.cond[l][k]).sqrt();
            match table.get(l, pair) {
                Some(lambda) => sum += lambda * weight,
                None if weight == 0.0 => {}
                None => continue 'pairs,
            }
        }
        out.insert(pair, sum);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob_model::DEFAULT_TOL;

    fn classical(mut data: ProbabilityData) -> ProbabilityData {
        for pair in Pair::ALL {
            for l in 0..3 {
                data.pair_cond[pair][l] = data.classical_pair_cond(l, pair);
            }
        }
        data
    }

    fn skewed() -> ProbabilityData {
        let mut d = ProbabilityData::uniform();
        d.p_a = [0.5, 0.3, 0.2];
        d.cond = [[0.6, 0.1, 0.3], [0.3, 0.5, 0.2], [0.1, 0.4, 0.5]];
        d
    }

    #[test]
    fn classical_mixture_has_no_interference() {
        let d = classical(skewed());
        let t = interference_coefficients(&d);
        for l in 0..3 {
            for p in Pair::ALL {
                assert!(t.get(l, p).unwrap().abs() < 1e-15);
            }
            let ftp = ftp_with_interference(&d, &t, l).unwrap();
            let classical_total: f64 = (0..3).map(|i| d.weight(l, i)).sum();
            assert!((ftp - classical_total).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_weight_marks_undefined() {
        let mut d = skewed();
        d.cond[0][1] = 0.0;
        d.cond[1][1] = 0.6;
        let t = interference_coefficients(&d);
        assert_eq!(t.get(0, Pair::P12), None);
        assert_eq!(t.get(0, Pair::P23), None);
        assert!(t.get(0, Pair::P13).is_some());
        assert!(matches!(
            ftp_with_interference(&d, &t, 0),
            Err(Error::UndefinedLambda { row: 1, pair: Pair::P12 })
        ));
        assert!(t.lambda.iter().flatten().flatten().all(|x| x.is_finite()));
    }

    #[test]
    fn boundedness() {
        let zero = InterferenceTable::from_rows([[0.0; 3]; 3]);
        assert!(boundedness_check(&zero, DEFAULT_TOL).passed());

        let mut bad = zero;
        bad.set(0, Pair::P12, Some(1.5));
        let out = boundedness_check(&bad, DEFAULT_TOL);
        assert_eq!(out.violations.len(), 1);
        assert_eq!(out.violations[0].constraint, "lambda[1,12].bound");
        assert_eq!(out.violations[0].residual, 1.5);

        let mut undefined = zero;
        undefined.set(2, Pair::P23, None);
        assert!(boundedness_check(&undefined, DEFAULT_TOL).passed());
    }

    #[test]
    fn uniform_classical_sorkin_is_zero() {
        let r = sorkin_residual(&ProbabilityData::uniform());
        for x in r {
            assert!(x.abs() < 1e-15);
        }
    }

    #[test]
    fn zero_lambda_gives_classical_pair_cond() {
        let d = skewed();
        let pc = triple_prob_from_lambda(&d.p_a, &d.cond, &InterferenceTable::from_rows([[0.0; 3]; 3]))
            .unwrap();
        for p in Pair::ALL {
            for l in 0..3 {
                assert!((pc[p][l] - d.classical_pair_cond(l, p)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn perfect_destructive_interference() {
        let d = ProbabilityData::uniform();
        let mut t = InterferenceTable::from_rows([[0.0; 3]; 3]);
        t.set(1, Pair::P13, Some(-1.0));
        let pc = triple_prob_from_lambda(&d.p_a, &d.cond, &t).unwrap();
        assert_eq!(pc[Pair::P13][1], 0.0);
    }

    #[test]
    fn out_of_range_lambda_rejected() {
        let d = ProbabilityData::uniform();
        let mut t = InterferenceTable::from_rows([[0.0; 3]; 3]);
        t.set(0, Pair::P23, Some(1.01));
        assert!(matches!(
            triple_prob_from_lambda(&d.p_a, &d.cond, &t),
            Err(Error::LambdaOutOfRange { row: 1, pair: Pair::P23, .. })
        ));
    }

    #[test]
    fn round_trip_through_coefficients() {
        let mut d = skewed();
        d.pair_cond = PairMap([[0.5, 0.3, 0.2], [0.35, 0.45, 0.2], [0.25, 0.3, 0.45]]);
        let t = interference_coefficients(&d);
        let pc = triple_prob_from_lambda(&d.p_a, &d.cond, &t).unwrap();
        for p in Pair::ALL {
            for l in 0..3 {
                assert!((pc[p][l] - d.pair_cond[p][l]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn normalization_residual_for_uniform_cond() {
        let d = ProbabilityData::uniform();
        let all_one = InterferenceTable::from_rows([[1.0; 3]; 3]);
        let r = lambda_normalization_residual(&d, &all_one);
        for p in Pair::ALL {
            assert!((r[&p] - 1.0).abs() < 1e-15);
        }

        let mu = std::f64::consts::FRAC_1_SQRT_2;
        let example = InterferenceTable::from_rows([[mu, 0.0, -mu], [-mu, mu, 0.0], [0.0, -mu, mu]]);
        for x in lambda_normalization_residual(&d, &example).values() {
            assert!(x.abs() < 1e-15);
        }
    }

    #[test]
    fn normalization_residual_skips_unknown_terms() {
        let mut d = ProbabilityData::uniform();
        d.p_a = [0.0, 0.5, 0.5];
        let t = interference_coefficients(&d);
        let r = lambda_normalization_residual(&d, &t);
        assert!(!r.contains_key(&Pair::P12));
        assert!(!r.contains_key(&Pair::P13));
        assert!(r.contains_key(&Pair::P23));
    }
}
