//! Human-readable rendering, six decimals throughout.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_complex::Complex64;

use qlra_core::engine::{unitarity_defect, AmplitudeModel, FeasibilityReport};
use qlra_core::interference::InterferenceTable;
use qlra_core::phase_solver::PhaseSolution;
use qlra_core::prob_model::{Pair, ProbabilityData, ValidationOutcome};

fn num(x: f64) -> String {
    format!("{x:>10.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| format!("{:>10}", "undef"), num)
}

fn complex(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn row3(v: &[f64; 3]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

pub fn validation(outcome: &ValidationOutcome) -> String {
    let mut s = String::new();
    if outcome.passed() {
        s.push_str("all constraints hold\n");
    }
    for v in &outcome.violations {
        let _ = writeln!(s, "FAIL {:<24} residual {:+.6e} (tol {:.1e})", v.constraint, v.residual, v.tolerance);
    }
    s
}

pub fn lambda_table(table: &InterferenceTable) -> String {
    let mut s = format!("{:>4} {:>10} {:>10} {:>10}\n", "l", "12", "13", "23");
    for l in 0..3 {
        let row = table.row(l);
        let _ = writeln!(s, "{:>4} {} {} {}", l + 1, opt(row[0]), opt(row[1]), opt(row[2]));
    }
    s
}

pub fn lambdas(table: &InterferenceTable, bounded: &ValidationOutcome) -> String {
    let mut s = lambda_table(table);
    if !bounded.passed() {
        s.push_str(&validation(bounded));
    }
    s
}

pub fn sorkin(
    residuals: &[f64; 3],
    ftp: &[Option<f64>; 3],
    norms: &BTreeMap<String, f64>,
    passed: bool,
) -> String {
    let mut s = format!("{:>4} {:>14} {:>10}\n", "l", "sorkin", "ftp");
    for l in 0..3 {
        let _ = writeln!(s, "{:>4} {:>14.6e} {}", l + 1, residuals[l], opt(ftp[l]));
    }
    for (pair, r) in norms {
        let _ = writeln!(s, "normalization {pair}: {r:.6e}");
    }
    s.push_str(if passed { "sorkin identity holds\n" } else { "sorkin identity violated\n" });
    s
}

fn phases(sol: &PhaseSolution) -> String {
    let mut s = format!("branches {:?}\n", sol.branches);
    for (l, row) in sol.phi.iter().enumerate() {
        let _ = writeln!(s, "  phi[{}] = {}", l + 1, row3(row));
    }
    s
}

pub fn solutions(sols: &[PhaseSolution]) -> String {
    if sols.is_empty() {
        return "no phase solution\n".into();
    }
    sols.iter().map(phases).collect::<Vec<_>>().join("\n")
}

fn model(m: &AmplitudeModel) -> String {
    let mut s = format!("branches {:?}\n", m.solution.branches);
    let psi: Vec<String> = m.psi.iter().map(|z| complex(*z)).collect();
    let _ = writeln!(s, "  psi        = ({})", psi.join(", "));
    let norms = m.psi.map(|z| z.norm_sqr());
    let _ = writeln!(s, "  |psi|^2    = {}", row3(&norms));
    for (l, row) in m.a_basis.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|z| complex(*z)).collect();
        let _ = writeln!(s, "  a_basis[{}] = {}", l + 1, cells.join("  "));
    }
    let _ = writeln!(s, "  max |U'U - I| = {:.6}", unitarity_defect(m));
    s
}

pub fn qlra(report: &FeasibilityReport, models: &[AmplitudeModel]) -> String {
    let mut s = String::new();
    let gates = [
        ("lambda bounded", report.lambda_bounded),
        ("sorkin", report.sorkin_ok),
        ("lambda normalization", report.lambda_norm_ok),
        ("double stochastic", report.double_stochastic_ok),
        ("rows consistent", report.rows_consistent),
        ("unitarity", report.unitarity_ok),
        ("born", report.born_ok),
    ];
    for (name, ok) in gates {
        let _ = writeln!(s, "{:<22} {}", name, if ok { "ok" } else { "FAIL" });
    }
    if !report.skipped.is_empty() {
        let _ = writeln!(s, "skipped: {}", report.skipped.join(", "));
    }
    for (k, v) in &report.residuals {
        let _ = writeln!(s, "  {k:<22} {v:.6e}");
    }
    s.push_str(&lambda_table(&report.lambda));
    let _ = writeln!(s, "{}", if report.feasible() { "feasible" } else { "infeasible" });
    for m in models {
        s.push_str(&model(m));
    }
    s
}

pub fn data(d: &ProbabilityData) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p_b  {}", row3(&d.p_b));
    let _ = writeln!(s, "p_a  {}", row3(&d.p_a));
    for (l, row) in d.cond.iter().enumerate() {
        let _ = writeln!(s, "cond[{}] {}", l + 1, row3(row));
    }
    for pair in Pair::ALL {
        let _ = writeln!(s, "pair_cond[{pair}] {}", row3(&d.pair_cond[pair]));
    }
    s
}

pub fn example(cases: &[(f64, &[AmplitudeModel], bool)]) -> String {
    let mut s = String::new();
    for (mu, models, two) in cases {
        let _ = writeln!(s, "mu = {mu:+.6}: {} amplitude(s) reproducing p_b", models.len());
        let _ = writeln!(
            s,
            "  unitary a-basis available: {}",
            if *two { "yes" } else { "no" }
        );
        for m in *models {
            s.push_str(&model(m));
        }
        s.push('\n');
    }
    s
}
