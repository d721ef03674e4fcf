//! Forward generation of probability data from a state and an a-basis.
//!
//! This is the independent side of every inverse-problem test: it goes
//! straight from `(ψ, U)` to probabilities through Born's rule, never through
//! interference coefficients.

mod ansatz;
mod mub;

pub use ansatz::{
    ansatz_born_residual, ansatz_family, ansatz_marginals, ansatz_mu_roots, ansatz_radicand, AnsatzParams,
    MuRoots,
};
pub use mub::{mub_instance, mub_lambda_closed_form, mub_marginals_closed_form, MubParams};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interference::{triple_prob_from_lambda, InterferenceTable, DENOMINATOR_FLOOR};
use crate::json::{SplitMatrix, SplitVector};
use crate::linalg::{self, CMat3, CVec3};
use crate::prob_model::{Pair, PairMap, ProbabilityData};

const INSTANCE_TOL: f64 = 1e-12;

/// A pure state and the a-basis, both in the canonical b-basis.
///
/// Column `i` of `u` is the eigenvector `e^a_{α_i}`, so `u[l][i]` is its
/// `β_l` component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumInstance {
    psi: CVec3,
    u: CMat3,
}

impl QuantumInstance {
    pub fn new(psi: CVec3, u: CMat3) -> Result<Self> {
        let norm_err = (linalg::norm(&psi) - 1.0).abs();
        if !(norm_err <= INSTANCE_TOL) {
            return Err(Error::InvalidInstance(format!(
                "state norm deviates from 1 by {norm_err:e}"
            )));
        }
        let defect = linalg::unitarity_defect(&u);
        if !(defect <= INSTANCE_TOL) {
            return Err(Error::InvalidInstance(format!(
                "basis matrix is not unitary (max |U†U - I| = {defect:e})"
            )));
        }
        Ok(QuantumInstance { psi, u })
    }

    /// Gaussian state and Gram–Schmidt unitary drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut gaussian = || {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        };
        loop {
            let raw_psi: CVec3 = std::array::from_fn(|_| gaussian());
            let raw_u: CMat3 = std::array::from_fn(|_| std::array::from_fn(|_| gaussian()));
            let n = linalg::norm(&raw_psi);
            if n < 1e-6 {
                continue;
            }
            let Some(u) = linalg::orthonormalize_columns(&raw_u) else {
                continue;
            };
            let psi = raw_psi.map(|z| z / n);
            if let Ok(inst) = QuantumInstance::new(psi, u) {
                return inst;
            }
        }
    }

    /// Reproducible random instance.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        QuantumInstance::random(&mut rng)
    }

    pub fn psi(&self) -> &CVec3 {
        &self.psi
    }

    pub fn u(&self) -> &CMat3 {
        &self.u
    }

    /// Expansion coefficients `c_i = ⟨e^a_i, ψ⟩`, so `ψ = Σ_i c_i e^a_i`.
    pub fn coefficients(&self) -> CVec3 {
        std::array::from_fn(|i| linalg::inner(&linalg::column(&self.u, i), &self.psi))
    }

    /// Sub-amplitudes `ψ[l][i] = c_i · u[l][i]`; each row sums to `ψ_l`.
    pub fn sub_amplitudes(&self) -> CMat3 {
        let c = self.coefficients();
        std::array::from_fn(|l| std::array::from_fn(|i| c[i] * self.u[l][i]))
    }

    /// Phases of the sub-amplitudes.
    pub fn phases(&self) -> [[f64; 3]; 3] {
        self.sub_amplitudes().map(|row| row.map(|z| z.arg()))
    }

    /// Parses the `{"psi": {re, im}, "u": {re, im}}` document.
    pub fn load(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        QuantumInstance::new(doc.psi.into(), doc.u.into())
    }

    pub fn save(&self) -> String {
        crate::json::to_string(&InstanceDoc::from(self))
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    psi: SplitVector,
    u: SplitMatrix,
}

impl From<&QuantumInstance> for InstanceDoc {
    fn from(inst: &QuantumInstance) -> Self {
        InstanceDoc {
            psi: SplitVector::from(&inst.psi),
            u: SplitMatrix::from(&inst.u),
        }
    }
}

/// Uniform marginals and transition probabilities with the cyclic coefficient
/// table `[[μ, 0, −μ], [−μ, μ, 0], [0, −μ, μ]]` (columns `12, 13, 23`).
///
/// The table satisfies the Sorkin identity and the coefficient normalization
/// for every `|μ| ≤ 1`; for `μ = ±1/√2` every row also admits real phases.
pub fn uniform_example(mu: f64) -> Result<(InterferenceTable, ProbabilityData)> {
    let table = InterferenceTable::from_rows([[mu, 0.0, -mu], [-mu, mu, 0.0], [0.0, -mu, mu]]);
    let mut data = ProbabilityData::uniform();
    data.pair_cond = triple_prob_from_lambda(&data.p_a, &data.cond, &table)?;
    Ok((table, data))
}

/// Probabilities predicted by Born's rule for every measurement context.
pub fn generate(instance: &QuantumInstance) -> Result<ProbabilityData> {
    let c = instance.coefficients();
    let sub = instance.sub_amplitudes();
    let p_a = c.map(|z| z.norm_sqr());
    let p_b = instance.psi.map(|z| z.norm_sqr());
    let cond = instance.u.map(|row| row.map(|z| z.norm_sqr()));

    let mut pair_cond = PairMap([[0.0; 3]; 3]);
    for pair in Pair::ALL {
        let (i, j) = pair.indices();
        let mass = p_a[i] + p_a[j];
        if !(mass >= DENOMINATOR_FLOOR) {
            return Err(Error::DegenerateContext { pair, mass });
        }
        for l in 0..3 {
            pair_cond[pair][l] = (sub[l][i] + sub[l][j]).norm_sqr() / mass;
        }
    }
    Ok(ProbabilityData {
        p_b,
        p_a,
        cond,
        pair_cond,
    })
}
