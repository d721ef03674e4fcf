//! The a-basis mutually unbiased to the canonical b-basis, and the family of
//! equal-weight states `ψ = (1, e^{iγ₁}, e^{iγ₂}) / √3`.

use std::f64::consts::{FRAC_PI_6, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantumInstance;
use crate::interference::InterferenceTable;
use crate::linalg::{CMat3, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MubParams {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl MubParams {
    pub fn equal(gamma: f64) -> Self {
        MubParams {
            gamma1: gamma,
            gamma2: gamma,
        }
    }
}

fn mub_basis() -> CMat3 {
    let w = Complex64::from_polar(1.0, TAU / 3.0);
    let wc = w.conj();
    let s = 1.0 / 3.0_f64.sqrt();
    // Columns (1, w, 1), (1, w̄, w̄), (1, 1, w), each over √3.
    [[ONE, ONE, ONE], [w, wc, ONE], [ONE, wc, w]].map(|row| row.map(|z| z * s))
}

pub fn mub_instance(params: MubParams) -> QuantumInstance {
    let s = 1.0 / 3.0_f64.sqrt();
    let psi = [
        Complex64::new(s, 0.0),
        Complex64::from_polar(s, params.gamma1),
        Complex64::from_polar(s, params.gamma2),
    ];
    QuantumInstance::new(psi, mub_basis()).expect("MUB instance is normalized and unitary")
}

/// Trigonometric closed forms of the three a-marginals.
pub fn mub_marginals_closed_form(params: MubParams) -> [f64; 3] {
    let (g1, g2) = (params.gamma1, params.gamma2);
    let r3 = 3.0_f64.sqrt();
    let p1 = 3.0 - g1.cos() - (g1 - g2).cos() + 2.0 * g2.cos() + r3 * g1.sin() + r3 * (g1 - g2).sin();
    let p2 = 3.0 - g1.cos() + 2.0 * (g1 - g2).cos() - g2.cos() - r3 * g1.sin() - r3 * g2.sin();
    let p3 = 3.0 + 2.0 * g1.cos() - (g1 - g2).cos() - g2.cos() - r3 * (g1 - g2).sin() + r3 * g2.sin();
    [p1 / 9.0, p2 / 9.0, p3 / 9.0]
}

/// Closed forms of the interference coefficients on the diagonal
/// `γ₁ = γ₂ = gamma`.
///
/// Entries whose closed form has a vanishing denominator (the state becomes
/// an a-eigenvector at `gamma ≡ 4π/3`) are left undefined.
pub fn mub_lambda_closed_form(gamma: f64) -> InterferenceTable {
    let s = (gamma + FRAC_PI_6).sin();
    let r3 = 3.0_f64.sqrt();
    let row1 = -(1.0 + s).max(0.0).sqrt() / (10.0 - 8.0 * s).sqrt();

    let radicand = 4.0 * (FRAC_PI_6 - 2.0 * gamma).sin() + 2.0 * s + 6.0;
    let (a, b) = if radicand > 1e-13 {
        let d = 2.0 * radicand.sqrt();
        let a = (-4.0 * gamma.cos() + 2.0 * r3 * gamma.sin() + 1.0) / d;
        let b = -(-5.0 * gamma.cos() + r3 * gamma.sin() - 1.0) / d;
        (Some(a), Some(b))
    } else {
        (None, None)
    };

    InterferenceTable {
        lambda: [
            [Some(row1), Some(1.0), Some(row1)],
            [a, Some(-0.5), b],
            [b, Some(-0.5), a],
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::interference_coefficients;
    use crate::linalg::unitarity_defect;
    use crate::oracle::generate;
    use crate::prob_model::Pair;
    use std::f64::consts::PI;

    #[test]
    fn basis_is_unbiased_and_unitary() {
        let u = mub_basis();
        assert!(unitarity_defect(&u) < 1e-15);
        for row in u {
            for z in row {
                assert!((z.norm_sqr() - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn marginals_at_zero() {
        let p = mub_marginals_closed_form(MubParams::equal(0.0));
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        let d = generate(&mub_instance(MubParams::equal(0.0))).unwrap();
        for x in d.p_a {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn marginals_sum_to_one_off_diagonal() {
        for k in 0..100 {
            let g1 = -3.0 + 0.061 * k as f64;
            let g2 = 2.5 - 0.047 * k as f64;
            let p = mub_marginals_closed_form(MubParams { gamma1: g1, gamma2: g2 });
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let generated = generate(&mub_instance(MubParams { gamma1: g1, gamma2: g2 }))
                .unwrap()
                .p_a;
            for i in 0..3 {
                assert!((p[i] - generated[i]).abs() < 1e-12, "γ = ({g1}, {g2})");
            }
        }
    }

    #[test]
    fn closed_pair_conditionals() {
        let d = generate(&mub_instance(MubParams::equal(0.9))).unwrap();
        assert!((d.pair_cond[Pair::P13][0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((d.pair_cond[Pair::P13][1] - 1.0 / 6.0).abs() < 1e-14);
        assert!((d.pair_cond[Pair::P13][2] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn extremum_at_pi_over_three() {
        let t = mub_lambda_closed_form(PI / 3.0);
        assert!((t.get(0, Pair::P12).unwrap() + 1.0).abs() < 1e-15);
        let measured = interference_coefficients(&generate(&mub_instance(MubParams::equal(PI / 3.0))).unwrap());
        assert!((measured.get(0, Pair::P12).unwrap() + 1.0).abs() < 1e-12);
        assert!((measured.get(0, Pair::P23).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn limits_near_singular_point() {
        let h = 1e-6;
        let g0 = 4.0 * PI / 3.0;
        let below = interference_coefficients(&generate(&mub_instance(MubParams::equal(g0 - h))).unwrap());
        let above = interference_coefficients(&generate(&mub_instance(MubParams::equal(g0 + h))).unwrap());
        let half_r3 = 3.0_f64.sqrt() / 2.0;
        // From below λ[2,12] and λ[3,23] tend to +√3/2, from above to −√3/2;
        // λ[2,23] and λ[3,12] do the opposite.
        for (l, p) in [(1, Pair::P12), (2, Pair::P23)] {
            assert!((below.get(l, p).unwrap() - half_r3).abs() < 1e-5);
            assert!((above.get(l, p).unwrap() + half_r3).abs() < 1e-5);
        }
        for (l, p) in [(1, Pair::P23), (2, Pair::P12)] {
            assert!((below.get(l, p).unwrap() + half_r3).abs() < 1e-5);
            assert!((above.get(l, p).unwrap() - half_r3).abs() < 1e-5);
        }
        // The first row tends to zero.
        assert!(below.get(0, Pair::P12).unwrap().abs() < 1e-5);
        assert!(above.get(0, Pair::P23).unwrap().abs() < 1e-5);
    }

    #[test]
    fn closed_form_singular_entries_undefined() {
        let t = mub_lambda_closed_form(4.0 * PI / 3.0);
        assert_eq!(t.get(1, Pair::P12), None);
        assert_eq!(t.get(0, Pair::P13), Some(1.0));
    }
}
