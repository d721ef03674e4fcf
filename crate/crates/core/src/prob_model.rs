//! Probability data model, normalization checks and the JSON interchange
//! format.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::json;

/// Default tolerance for analytic or generated data.
///
/// For Monte Carlo frequencies from `N` samples per context, `3/√N` is a
/// reasonable starting point.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Unordered pair of distinct a-outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pair {
    P12,
    P13,
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    /// Builds the pair from zero-based indices in either order.
    pub fn new(i: usize, j: usize) -> Option<Pair> {
        match (i.min(j), i.max(j)) {
            (0, 1) => Some(Pair::P12),
            (0, 2) => Some(Pair::P13),
            (1, 2) => Some(Pair::P23),
            _ => None,
        }
    }

    /// Zero-based member indices, smaller first.
    pub fn indices(self) -> (usize, usize) {
        match self {
            Pair::P12 => (0, 1),
            Pair::P13 => (0, 2),
            Pair::P23 => (1, 2),
        }
    }

    /// The a-outcome not in the pair (the closed slit).
    pub fn complement(self) -> usize {
        match self {
            Pair::P12 => 2,
            Pair::P13 => 1,
            Pair::P23 => 0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Document key, one-based: `"12"`, `"13"`, `"23"`.
    pub fn key(self) -> &'static str {
        match self {
            Pair::P12 => "12",
            Pair::P13 => "13",
            Pair::P23 => "23",
        }
    }

    pub fn from_key(key: &str) -> Option<Pair> {
        Pair::ALL.into_iter().find(|p| p.key() == key)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// One value per unordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairMap<T>(pub [T; 3]);

impl<T> PairMap<T> {
    pub fn from_fn(mut f: impl FnMut(Pair) -> T) -> Self {
        PairMap([f(Pair::P12), f(Pair::P13), f(Pair::P23)])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, &T)> {
        Pair::ALL.into_iter().zip(self.0.iter())
    }
}

impl<T> Index<Pair> for PairMap<T> {
    type Output = T;
    fn index(&self, pair: Pair) -> &T {
        &self.0[pair.index()]
    }
}

impl<T> IndexMut<Pair> for PairMap<T> {
    fn index_mut(&mut self, pair: Pair) -> &mut T {
        &mut self.0[pair.index()]
    }
}

impl<T: Serialize> Serialize for PairMap<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(3))?;
        for (pair, value) in self.iter() {
            map.serialize_entry(pair.key(), value)?;
        }
        map.end()
    }
}

/// All measured probabilities for a pair of trichotomous observables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityData {
    /// `p_b[l] = P(b = β_l)`.
    pub p_b: [f64; 3],
    /// `p_a[i] = P(a = α_i)`.
    pub p_a: [f64; 3],
    /// `cond[l][i] = P(b = β_l | a = α_i)`; columns are distributions.
    pub cond: [[f64; 3]; 3],
    /// `pair_cond[{i,j}][l] = P(b = β_l | a ∈ {α_i, α_j})`.
    pub pair_cond: PairMap<[f64; 3]>,
}

impl ProbabilityData {
    /// All probabilities equal to 1/3.
    pub fn uniform() -> Self {
        let t = 1.0 / 3.0;
        ProbabilityData {
            p_b: [t; 3],
            p_a: [t; 3],
            cond: [[t; 3]; 3],
            pair_cond: PairMap([[t; 3]; 3]),
        }
    }

    /// `p_a[i] · cond[l][i]`, the squared modulus of the sub-amplitude.
    pub fn weight(&self, l: usize, i: usize) -> f64 {
        self.p_a[i] * self.cond[l][i]
    }

    /// The classical mixture `(w_i + w_j) / (p_a[i] + p_a[j])` for row `l`.
    pub fn classical_pair_cond(&self, l: usize, pair: Pair) -> f64 {
        let (i, j) = pair.indices();
        (self.weight(l, i) + self.weight(l, j)) / (self.p_a[i] + self.p_a[j])
    }

    /// Parses a document, rejecting shape and range violations.
    pub fn load(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        Self::from_value(&doc)
    }

    pub fn from_value(doc: &Value) -> Result<Self> {
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::schema("$", "expected an object"))?;
        let field = |key: &str| {
            obj.get(key)
                .ok_or_else(|| Error::schema(key, "missing key"))
        };
        let p_b = read_triple(field("p_b")?, "p_b")?;
        let p_a = read_triple(field("p_a")?, "p_a")?;

        let cond_v = field("cond")?;
        let rows = cond_v
            .as_array()
            .ok_or_else(|| Error::schema("cond", "expected an array of 3 rows"))?;
        if rows.len() != 3 {
            return Err(Error::schema(
                "cond",
                format!("expected 3 rows, found {}", rows.len()),
            ));
        }
        let mut cond = [[0.0; 3]; 3];
        for (l, row) in rows.iter().enumerate() {
            cond[l] = read_triple(row, &format!("cond[{l}]"))?;
        }

        let pc = field("pair_cond")?
            .as_object()
            .ok_or_else(|| Error::schema("pair_cond", "expected an object"))?;
        let mut pair_cond = PairMap([[0.0; 3]; 3]);
        for pair in Pair::ALL {
            let path = format!("pair_cond.{}", pair.key());
            let v = pc
                .get(pair.key())
                .ok_or_else(|| Error::schema(path.clone(), "missing key"))?;
            pair_cond[pair] = read_triple(v, &path)?;
        }
        if let Some(extra) = pc.keys().find(|k| Pair::from_key(k).is_none()) {
            return Err(Error::schema(
                format!("pair_cond.{extra}"),
                "unknown pair key (expected 12, 13 or 23)",
            ));
        }

        Ok(ProbabilityData {
            p_b,
            p_a,
            cond,
            pair_cond,
        })
    }

    /// Canonical document text.
    pub fn save(&self) -> String {
        json::to_string(self)
    }
}

fn read_triple(v: &Value, path: &str) -> Result<[f64; 3]> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array of 3 numbers"))?;
    if arr.len() != 3 {
        return Err(Error::schema(
            path,
            format!("expected 3 entries, found {}", arr.len()),
        ));
    }
    let mut out = [0.0; 3];
    for (k, x) in arr.iter().enumerate() {
        let p = x
            .as_f64()
            .ok_or_else(|| Error::schema(format!("{path}[{k}]"), "expected a number"))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::schema(
                format!("{path}[{k}]"),
                format!("probability {p} outside [0, 1]"),
            ));
        }
        out[k] = p;
    }
    Ok(out)
}

/// One failed constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub residual: f64,
    pub tolerance: f64,
}

/// Outcome of a batch of checks; passes exactly when no violation was found.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationOutcome {
    pub violations: Vec<Violation>,
}

impl ValidationOutcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn check(&mut self, constraint: impl Into<String>, residual: f64, tol: f64) {
        // NaN residuals fail the comparison and are reported.
        if !(residual.abs() <= tol) {
            self.violations.push(Violation {
                constraint: constraint.into(),
                residual,
                tolerance: tol,
            });
        }
    }

    pub fn merge(mut self, other: ValidationOutcome) -> Self {
        self.violations.extend(other.violations);
        self
    }
}

impl Serialize for ValidationOutcome {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            passed: bool,
            violations: &'a [Violation],
        }
        Doc {
            passed: self.passed(),
            violations: &self.violations,
        }
        .serialize(serializer)
    }
}

fn range_excess(p: f64) -> f64 {
    if p.is_nan() {
        f64::NAN
    } else if p < 0.0 {
        -p
    } else if p > 1.0 {
        p - 1.0
    } else {
        0.0
    }
}

/// Checks the normalization and range constraints.
///
/// Every marginal, every column of `cond` and every pair-conditional
/// distribution must sum to one; every entry must lie in `[0, 1]`.
pub fn validate(data: &ProbabilityData, tol: f64) -> ValidationOutcome {
    let mut out = ValidationOutcome::default();
    out.check("p_b.sum", data.p_b.iter().sum::<f64>() - 1.0, tol);
    out.check("p_a.sum", data.p_a.iter().sum::<f64>() - 1.0, tol);
    for i in 0..3 {
        let col: f64 = (0..3).map(|l| data.cond[l][i]).sum();
        out.check(format!("cond.column[{}].sum", i + 1), col - 1.0, tol);
    }
    for (pair, dist) in data.pair_cond.iter() {
        out.check(
            format!("pair_cond[{pair}].sum"),
            dist.iter().sum::<f64>() - 1.0,
            tol,
        );
    }

    for l in 0..3 {
        out.check(format!("range.p_b[{}]", l + 1), range_excess(data.p_b[l]), tol);
    }
    for i in 0..3 {
        out.check(format!("range.p_a[{}]", i + 1), range_excess(data.p_a[i]), tol);
    }
    for l in 0..3 {
        for i in 0..3 {
            out.check(
                format!("range.cond[{}][{}]", l + 1, i + 1),
                range_excess(data.cond[l][i]),
                tol,
            );
        }
    }
    for (pair, dist) in data.pair_cond.iter() {
        for (l, p) in dist.iter().enumerate() {
            out.check(
                format!("range.pair_cond[{pair}][{}]", l + 1),
                range_excess(*p),
                tol,
            );
        }
    }
    out
}

/// Row sums of `cond`, required when `cond` must also serve as the squared
/// overlap matrix of two orthonormal bases.
pub fn check_double_stochastic(data: &ProbabilityData, tol: f64) -> ValidationOutcome {
    let mut out = ValidationOutcome::default();
    for l in 0..3 {
        let row: f64 = data.cond[l].iter().sum();
        out.check(format!("cond.row[{}].sum", l + 1), row - 1.0, tol);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_passes() {
        assert!(validate(&ProbabilityData::uniform(), DEFAULT_TOL).passed());
        assert!(check_double_stochastic(&ProbabilityData::uniform(), DEFAULT_TOL).passed());
    }

    #[test]
    fn exact_dyadic_data_passes_at_zero_tolerance() {
        let d = ProbabilityData {
            p_b: [0.25, 0.25, 0.5],
            p_a: [0.5, 0.125, 0.375],
            cond: [[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]],
            pair_cond: PairMap([[0.5, 0.5, 0.0], [0.0, 0.0, 1.0], [0.75, 0.125, 0.125]]),
        };
        assert!(validate(&d, 0.0).passed());
        assert!(check_double_stochastic(&d, 0.0).passed());
    }

    #[test]
    fn unnormalized_b_marginal_reports_residual() {
        let mut d = ProbabilityData::uniform();
        d.p_b = [0.5, 0.5, 0.5];
        let out = validate(&d, DEFAULT_TOL);
        assert!(!out.passed());
        assert_eq!(out.violations.len(), 1);
        assert_eq!(out.violations[0].constraint, "p_b.sum");
        assert!((out.violations[0].residual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_entry_reported() {
        let mut d = ProbabilityData::uniform();
        d.cond[0][0] = 1.2;
        d.cond[1][0] = -0.2 + 1.0 / 3.0;
        d.cond[2][0] = 0.0;
        let out = validate(&d, DEFAULT_TOL);
        let v = out
            .violations
            .iter()
            .find(|v| v.constraint == "range.cond[1][1]")
            .unwrap();
        assert!((v.residual - 0.2).abs() < 1e-12);
    }

    #[test]
    fn column_stochastic_but_not_row_stochastic() {
        let mut d = ProbabilityData::uniform();
        // columns (1,0,0), (1,0,0), (0,1,0)
        d.cond = [[1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]];
        assert!(validate(&d, DEFAULT_TOL).passed());
        let out = check_double_stochastic(&d, DEFAULT_TOL);
        let residuals: Vec<f64> = out.violations.iter().map(|v| v.residual).collect();
        assert_eq!(residuals, vec![1.0, -1.0]);
    }

    #[test]
    fn pair_key_is_unordered() {
        assert_eq!(Pair::new(0, 1), Pair::new(1, 0));
        assert_eq!(Pair::new(2, 1), Some(Pair::P23));
        assert_eq!(Pair::new(1, 1), None);
        for p in Pair::ALL {
            let (i, j) = p.indices();
            assert_ne!(p.complement(), i);
            assert_ne!(p.complement(), j);
        }
    }

    #[test]
    fn load_canonical_uniform() {
        let text = r#"{"p_b":[0.3333333333333333,0.3333333333333333,0.3333333333333333],
            "p_a":[0.3333333333333333,0.3333333333333333,0.3333333333333333],
            "cond":[[0.3333333333333333,0.3333333333333333,0.3333333333333333],
                    [0.3333333333333333,0.3333333333333333,0.3333333333333333],
                    [0.3333333333333333,0.3333333333333333,0.3333333333333333]],
            "pair_cond":{"12":[0.3333333333333333,0.3333333333333333,0.3333333333333333],
                         "13":[0.3333333333333333,0.3333333333333333,0.3333333333333333],
                         "23":[0.3333333333333333,0.3333333333333333,0.3333333333333333]}}"#;
        assert_eq!(ProbabilityData::load(text).unwrap(), ProbabilityData::uniform());
    }

    #[test]
    fn short_array_names_path() {
        let mut doc: Value = serde_json::from_str(&ProbabilityData::uniform().save()).unwrap();
        doc["p_b"] = serde_json::json!([0.5, 0.5]);
        match ProbabilityData::from_value(&doc) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "p_b"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_and_non_numeric_rejected() {
        let base: Value = serde_json::from_str(&ProbabilityData::uniform().save()).unwrap();

        let mut doc = base.clone();
        doc.as_object_mut().unwrap().remove("cond");
        assert!(matches!(
            ProbabilityData::from_value(&doc),
            Err(Error::Schema { ref path, .. }) if path == "cond"
        ));

        let mut doc = base.clone();
        doc["pair_cond"]["13"][1] = serde_json::json!("x");
        assert!(matches!(
            ProbabilityData::from_value(&doc),
            Err(Error::Schema { ref path, .. }) if path == "pair_cond.13[1]"
        ));

        let mut doc = base;
        doc["cond"][2][0] = serde_json::json!(1.5);
        assert!(matches!(
            ProbabilityData::from_value(&doc),
            Err(Error::Schema { ref path, .. }) if path == "cond[2][0]"
        ));

        assert!(matches!(
            ProbabilityData::load("{\"p_b\": [0.1,"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn extra_top_level_keys_are_ignored() {
        let mut doc: Value = serde_json::from_str(&ProbabilityData::uniform().save()).unwrap();
        doc["counts"] = serde_json::json!({"c123": [1, 2, 3]});
        assert!(ProbabilityData::from_value(&doc).is_ok());
    }
}
