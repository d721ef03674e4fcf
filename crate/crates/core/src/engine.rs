//! Assembles phases and probabilities into a complex amplitude, filters
//! branches by unitarity of the reconstructed a-basis and checks Born's rule.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::interference::{
    boundedness_check, interference_coefficients, lambda_normalization_residual, sorkin_residual,
    InterferenceTable,
};
use crate::json::{SplitMatrix, SplitVector};
use crate::linalg::{self, CMat3, CVec3};
use crate::phase_solver::{row_consistency, solve_all, PhaseSolution};
use crate::prob_model::{check_double_stochastic, Pair, PairMap, ProbabilityData, ValidationOutcome};

/// Which observables the amplitude has to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Born's rule for both `a` and `b`: needs a unitary a-basis.
    #[default]
    TwoObservable,
    /// Born's rule for `b` only.
    SingleObservable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QlraOptions {
    pub tol: f64,
    pub mode: Mode,
    /// Phase anchor `φ[l][0]` for each row.
    pub gauge: [f64; 3],
}

impl Default for QlraOptions {
    fn default() -> Self {
        QlraOptions {
            tol: crate::prob_model::DEFAULT_TOL,
            mode: Mode::TwoObservable,
            gauge: [0.0; 3],
        }
    }
}

impl QlraOptions {
    pub fn with_tol(tol: f64) -> Self {
        QlraOptions {
            tol,
            ..Default::default()
        }
    }
}

/// The reconstructed state and a-basis, both in the canonical b-basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeModel {
    pub psi: CVec3,
    /// `a_basis[l][i]`: column `i` is the vector of outcome `α_i`.
    pub a_basis: CMat3,
    pub sub_amplitudes: CMat3,
    pub solution: PhaseSolution,
}

impl Serialize for AmplitudeModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            psi: SplitVector,
            a_basis: SplitMatrix,
            sub_amplitudes: SplitMatrix,
            branches: [i8; 3],
            phases: &'a PhaseSolution,
        }
        Doc {
            psi: SplitVector::from(&self.psi),
            a_basis: SplitMatrix::from(&self.a_basis),
            sub_amplitudes: SplitMatrix::from(&self.sub_amplitudes),
            branches: self.solution.branches,
            phases: &self.solution,
        }
        .serialize(serializer)
    }
}

pub fn build_amplitude(data: &ProbabilityData, solution: &PhaseSolution) -> AmplitudeModel {
    let phase = |l: usize, i: usize| Complex64::from_polar(1.0, solution.phi[l][i]);
    let sub_amplitudes: CMat3 =
        std::array::from_fn(|l| std::array::from_fn(|i| data.weight(l, i).max(0.0).sqrt() * phase(l, i)));
    let a_basis: CMat3 =
        std::array::from_fn(|l| std::array::from_fn(|i| data.cond[l][i].max(0.0).sqrt() * phase(l, i)));
    let psi: CVec3 = std::array::from_fn(|l| sub_amplitudes[l].iter().sum());
    AmplitudeModel {
        psi,
        a_basis,
        sub_amplitudes,
        solution: *solution,
    }
}

/// Inner products `Σ_m a[m][i] · conj(a[m][j])` of distinct basis columns.
pub fn unitarity_residuals(model: &AmplitudeModel) -> PairMap<Complex64> {
    PairMap::from_fn(|pair| {
        let (i, j) = pair.indices();
        (0..3)
            .map(|m| model.a_basis[m][i] * model.a_basis[m][j].conj())
            .sum()
    })
}

/// Largest entrywise modulus of `U† U − I` for the model's a-basis.
pub fn unitarity_defect(model: &AmplitudeModel) -> f64 {
    linalg::unitarity_defect(&model.a_basis)
}

/// Born's rule checks in two-observable mode.
pub fn born_verify(model: &AmplitudeModel, data: &ProbabilityData, tol: f64) -> ValidationOutcome {
    born_verify_with(model, data, tol, Mode::TwoObservable)
}

/// Checks `|ψ_l|² = p_b[l]` and, in two-observable mode, also
/// `|⟨e^a_i, ψ⟩|² = p_a[i]` and `|a_basis[l][i]|² = cond[l][i]`.
pub fn born_verify_with(
    model: &AmplitudeModel,
    data: &ProbabilityData,
    tol: f64,
    mode: Mode,
) -> ValidationOutcome {
    let mut out = ValidationOutcome::default();
    for l in 0..3 {
        out.check(
            format!("born.p_b[{}]", l + 1),
            model.psi[l].norm_sqr() - data.p_b[l],
            tol,
        );
    }
    if mode == Mode::SingleObservable {
        return out;
    }
    for i in 0..3 {
        let col = linalg::column(&model.a_basis, i);
        out.check(
            format!("born.p_a[{}]", i + 1),
            linalg::inner(&col, &model.psi).norm_sqr() - data.p_a[i],
            tol,
        );
    }
    for l in 0..3 {
        for i in 0..3 {
            out.check(
                format!("born.cond[{},{}]", l + 1, i + 1),
                model.a_basis[l][i].norm_sqr() - data.cond[l][i],
                tol,
            );
        }
    }
    out
}

/// Stage-by-stage verdict of [`run_qlra`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub mode: Mode,
    pub tol: f64,
    pub lambda: InterferenceTable,
    pub lambda_bounded: bool,
    pub rows_consistent: bool,
    pub sorkin_ok: bool,
    pub lambda_norm_ok: bool,
    pub double_stochastic_ok: bool,
    pub unitarity_ok: bool,
    pub born_ok: bool,
    /// Gates not evaluated in the current mode; they count as passed.
    pub skipped: Vec<String>,
    pub residuals: BTreeMap<String, f64>,
    pub diagnostics: Vec<String>,
    /// Branch signs of the phase solutions that survived every stage.
    pub surviving_branches: Vec<[i8; 3]>,
    pub selected_solution: Option<PhaseSolution>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.lambda_bounded
            && self.rows_consistent
            && self.sorkin_ok
            && self.lambda_norm_ok
            && self.double_stochastic_ok
            && self.unitarity_ok
            && self.born_ok
    }
}

/// Runs the whole reconstruction.
///
/// Stages: interference coefficients, boundedness, the Sorkin identity,
/// normalization of the coefficients, double stochasticity of `cond`, phase
/// solving, the unitarity filter (at `10·tol`) and Born's rule. The model list
/// holds one model per surviving branch, in branch order, and is empty
/// whenever any stage fails.
pub fn run_qlra(data: &ProbabilityData, opts: &QlraOptions) -> (FeasibilityReport, Vec<AmplitudeModel>) {
    let tol = opts.tol;
    let two = opts.mode == Mode::TwoObservable;
    let lambda = interference_coefficients(data);
    let mut residuals = BTreeMap::new();
    let mut diagnostics = Vec::new();
    let mut skipped = Vec::new();

    residuals.insert("lambda.max_abs".to_string(), lambda.max_abs());
    let bounds = boundedness_check(&lambda, tol);
    let lambda_bounded = bounds.passed();
    diagnostics.extend(bounds.violations.iter().map(|v| {
        format!("{} = {} exceeds {}", v.constraint, v.residual, v.tolerance)
    }));

    let mut sorkin_ok = true;
    for (l, r) in sorkin_residual(data).into_iter().enumerate() {
        residuals.insert(format!("sorkin[{}]", l + 1), r);
        if !(r.abs() <= tol) {
            sorkin_ok = false;
            diagnostics.push(format!("Sorkin residual for outcome {} is {r:e}", l + 1));
        }
    }

    let norms = lambda_normalization_residual(data, &lambda);
    let mut lambda_norm_ok = true;
    for (pair, r) in &norms {
        residuals.insert(format!("lambda_norm[{pair}]"), *r);
        if !(r.abs() <= tol) {
            lambda_norm_ok = false;
            diagnostics.push(format!("coefficient normalization for pair {pair} is off by {r:e}"));
        }
    }
    for pair in Pair::ALL.into_iter().filter(|p| !norms.contains_key(p)) {
        diagnostics.push(format!(
            "coefficient normalization for pair {pair} not evaluated (undefined coefficient)"
        ));
    }

    let double_stochastic_ok = if two {
        let ds = check_double_stochastic(data, tol);
        for l in 0..3 {
            residuals.insert(
                format!("cond.row[{}].sum", l + 1),
                data.cond[l].iter().sum::<f64>() - 1.0,
            );
        }
        diagnostics.extend(ds.violations.iter().map(|v| format!("{} off by {:e}", v.constraint, v.residual)));
        ds.passed()
    } else {
        skipped.push("double_stochastic".to_string());
        true
    };

    for l in 0..3 {
        if let [Some(a), Some(b), Some(c)] = lambda.row(l) {
            if let Ok(rep) = row_consistency(l, a, b, c, tol) {
                residuals.insert(format!("row[{}].mismatch", l + 1), rep.mismatch());
            }
        }
    }

    let solutions = if lambda_bounded {
        match solve_all(&lambda, opts.gauge, tol) {
            Ok(s) => s,
            Err(e) => {
                diagnostics.push(e.to_string());
                Vec::new()
            }
        }
    } else {
        Vec::new()
    };
    let rows_consistent = !solutions.is_empty();

    let candidates: Vec<AmplitudeModel> = solutions.iter().map(|s| build_amplitude(data, s)).collect();
    let unitary: Vec<AmplitudeModel> = if two {
        let defects: Vec<f64> = candidates.iter().map(unitarity_defect).collect();
        if let Some(best) = defects.iter().copied().reduce(f64::min) {
            residuals.insert("unitarity.min_defect".to_string(), best);
        }
        candidates
            .into_iter()
            .zip(defects)
            .filter_map(|(m, d)| (d <= 10.0 * tol).then_some(m))
            .collect()
    } else {
        skipped.push("unitarity".to_string());
        candidates
    };
    let unitarity_ok = !two || !unitary.is_empty();
    if two && rows_consistent && unitary.is_empty() {
        diagnostics.push(format!(
            "no phase branch yields a unitary a-basis within {:e}",
            10.0 * tol
        ));
    }

    let mut worst_born = f64::INFINITY;
    let survivors: Vec<AmplitudeModel> = unitary
        .into_iter()
        .filter(|m| {
            let outcome = born_verify_with(m, data, tol, opts.mode);
            let worst = outcome
                .violations
                .iter()
                .map(|v| v.residual.abs())
                .fold(0.0_f64, f64::max);
            worst_born = worst_born.min(worst);
            outcome.passed()
        })
        .collect();
    if worst_born.is_finite() {
        residuals.insert("born.best_violation".to_string(), worst_born);
    }
    let born_ok = !survivors.is_empty();
    if rows_consistent && unitarity_ok && !born_ok {
        diagnostics.push("no candidate amplitude reproduces the data via Born's rule".to_string());
    }

    let mut report = FeasibilityReport {
        mode: opts.mode,
        tol,
        lambda,
        lambda_bounded,
        rows_consistent,
        sorkin_ok,
        lambda_norm_ok,
        double_stochastic_ok,
        unitarity_ok,
        born_ok,
        skipped,
        residuals,
        diagnostics,
        surviving_branches: Vec::new(),
        selected_solution: None,
    };
    if !report.feasible() {
        return (report, Vec::new());
    }
    report.surviving_branches = survivors.iter().map(|m| m.solution.branches).collect();
    report.selected_solution = survivors.first().map(|m| m.solution);
    (report, survivors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{generate, mub_instance, uniform_example, MubParams, QuantumInstance};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn example_data(mu: f64) -> ProbabilityData {
        uniform_example(mu).unwrap().1
    }

    #[test]
    fn example_amplitudes_single_observable() {
        let d = example_data(FRAC_1_SQRT_2);
        let opts = QlraOptions {
            mode: Mode::SingleObservable,
            ..QlraOptions::with_tol(1e-12)
        };
        let (report, models) = run_qlra(&d, &opts);
        assert!(report.feasible(), "{report:?}");
        assert_eq!(models.len(), 8);
        let r = FRAC_1_SQRT_2;
        let expected = [
            Complex64::new(1.0 + r, 1.0 - r),
            Complex64::new(1.0, 2.0_f64.sqrt()),
            Complex64::new(1.0 - r, 1.0 + r),
        ]
        .map(|z| z / 3.0);
        let first = &models[0];
        assert_eq!(first.solution.branches, [1, 1, 1]);
        for l in 0..3 {
            assert!((first.psi[l] - expected[l]).norm() < 1e-12);
            assert!((first.psi[l].norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn example_has_no_unitary_branch() {
        let d = example_data(FRAC_1_SQRT_2);
        let (report, models) = run_qlra(&d, &QlraOptions::with_tol(1e-9));
        assert!(report.sorkin_ok && report.lambda_norm_ok && report.rows_consistent);
        assert!(!report.unitarity_ok);
        assert!(models.is_empty());
        assert!(report.residuals["unitarity.min_defect"] > 0.3);
    }

    #[test]
    fn mub_phases_are_orthogonal() {
        let d = generate(&mub_instance(MubParams::equal(0.4))).unwrap();
        let (report, models) = run_qlra(&d, &QlraOptions::default());
        assert!(report.feasible(), "{report:?}");
        for m in &models {
            for (_, z) in unitarity_residuals(m).iter() {
                assert!(z.norm() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_phases_are_not_orthogonal() {
        let d = ProbabilityData::uniform();
        let sol = PhaseSolution {
            phi: [[0.0; 3]; 3],
            gauge: [0.0; 3],
            branches: [1; 3],
            free: [[false; 3]; 3],
        };
        let m = build_amplitude(&d, &sol);
        for (_, z) in unitarity_residuals(&m).iter() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        // Fully constructive interference gives |ψ_l|² = 1 instead of 1/3.
        let outcome = born_verify(&m, &d, 1e-9);
        assert!(outcome.violations.iter().any(|v| v.constraint == "born.p_b[1]"));
        assert!((m.psi[0].norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classical_data_fails_unitarity() {
        let mut d = ProbabilityData::uniform();
        for pair in Pair::ALL {
            for l in 0..3 {
                d.pair_cond[pair][l] = d.classical_pair_cond(l, pair);
            }
        }
        let (report, models) = run_qlra(&d, &QlraOptions::default());
        assert!(report.sorkin_ok);
        assert!(!report.unitarity_ok);
        assert!(models.is_empty());
    }

    #[test]
    fn random_roundtrip_and_gauge_invariance() {
        for seed in 0..20 {
            let d = generate(&QuantumInstance::from_seed(seed)).unwrap();
            let (report, models) = run_qlra(&d, &QlraOptions::default());
            assert!(report.feasible(), "seed {seed}: {report:?}");
            let shifted = QlraOptions {
                gauge: [0.3, -1.1, 2.0],
                ..Default::default()
            };
            let (report2, models2) = run_qlra(&d, &shifted);
            assert!(report2.feasible());
            assert_eq!(models.len(), models2.len());
            for (a, b) in models.iter().zip(&models2) {
                for l in 0..3 {
                    assert!((a.psi[l].norm_sqr() - b.psi[l].norm_sqr()).abs() < 1e-12);
                }
                for i in 0..3 {
                    let pa = linalg::inner(&linalg::column(&a.a_basis, i), &a.psi).norm_sqr();
                    let pb = linalg::inner(&linalg::column(&b.a_basis, i), &b.psi).norm_sqr();
                    assert!((pa - pb).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sorkin_failure_empties_models() {
        let mut d = generate(&QuantumInstance::from_seed(5)).unwrap();
        d.pair_cond[Pair::P12][0] += 1e-3;
        d.pair_cond[Pair::P12][1] -= 1e-3;
        let (report, models) = run_qlra(&d, &QlraOptions::with_tol(1e-6));
        assert!(!report.sorkin_ok);
        assert!(models.is_empty());
        assert!(report.selected_solution.is_none());
    }
}
