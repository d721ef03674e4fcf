//! Monte Carlo simulation of the triple-slit measurement contexts.
//!
//! Contexts and their stream ids:
//!
//! | id | context | distribution sampled |
//! |----|---------|----------------------|
//! | 0 | all slits open | `p_b` |
//! | 1..=3 | slit `i` alone | column `i` of `cond` |
//! | 4..=6 | slits `{1,2}`, `{1,3}`, `{2,3}` | `pair_cond` |
//! | 7 | which-slit detector | `p_a` |
//!
//! Each context draws from its own ChaCha stream, so adding samples to one
//! context never shifts the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{generate, QuantumInstance};
use crate::prob_model::{Pair, PairMap, ProbabilityData};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitExperimentPlan {
    pub instance: QuantumInstance,
    pub samples_per_context: u64,
    pub seed: u64,
}

/// Detector clicks per context and outcome, laid out like [`ProbabilityData`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    pub samples_per_context: u64,
    pub p_b: [u64; 3],
    pub p_a: [u64; 3],
    /// `cond[l][i]`: clicks at `β_l` with only slit `i` open.
    pub cond: [[u64; 3]; 3],
    pub pair_cond: PairMap<[u64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyData {
    #[serde(flatten)]
    pub frequencies: ProbabilityData,
    pub counts: Counts,
}

/// Multinomial draw as a chain of conditional binomials.
fn multinomial(rng: &mut ChaCha8Rng, n: u64, probs: &[f64; 3]) -> [u64; 3] {
    let mut out = [0; 3];
    let mut left = n;
    for k in 0..2 {
        let p = probs[k].max(0.0);
        let mass: f64 = probs[k..].iter().map(|p| p.max(0.0)).sum();
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let x = if left == 0 || q == 0.0 {
            0
        } else if q >= 1.0 {
            left
        } else {
            Binomial::new(left, q).expect("probability in (0, 1)").sample(rng)
        };
        out[k] = x;
        left -= x;
    }
    out[2] = left;
    out
}

fn stream(seed: u64, context: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(context);
    rng
}

pub fn simulate(plan: &SlitExperimentPlan) -> Result<FrequencyData> {
    let n = plan.samples_per_context;
    if n == 0 {
        return Err(Error::Domain("samples_per_context must be at least 1".into()));
    }
    let exact = generate(&plan.instance)?;
    let draw = |context: u64, probs: &[f64; 3]| multinomial(&mut stream(plan.seed, context), n, probs);

    let p_b = draw(0, &exact.p_b);
    let mut cond = [[0; 3]; 3];
    for i in 0..3 {
        let column = [exact.cond[0][i], exact.cond[1][i], exact.cond[2][i]];
        let c = draw(1 + i as u64, &column);
        for l in 0..3 {
            cond[l][i] = c[l];
        }
    }
    let pair_cond = PairMap::from_fn(|pair| draw(4 + pair.index() as u64, &exact.pair_cond[pair]));
    let p_a = draw(7, &exact.p_a);

    let counts = Counts {
        samples_per_context: n,
        p_b,
        p_a,
        cond,
        pair_cond,
    };
    Ok(FrequencyData {
        frequencies: frequencies(&counts),
        counts,
    })
}

fn frequencies(counts: &Counts) -> ProbabilityData {
    let n = counts.samples_per_context as f64;
    let f = |c: &[u64; 3]| c.map(|x| x as f64 / n);
    ProbabilityData {
        p_b: f(&counts.p_b),
        p_a: f(&counts.p_a),
        cond: counts.cond.map(|row| row.map(|x| x as f64 / n)),
        pair_cond: PairMap::from_fn(|pair| f(&counts.pair_cond[pair])),
    }
}

pub fn to_probability_data(freq: &FrequencyData) -> ProbabilityData {
    freq.frequencies.clone()
}

/// Largest absolute difference over every probability of two data sets.
pub fn max_deviation(a: &ProbabilityData, b: &ProbabilityData) -> f64 {
    let mut worst = 0.0_f64;
    let mut push = |x: f64, y: f64| worst = worst.max((x - y).abs());
    for k in 0..3 {
        push(a.p_b[k], b.p_b[k]);
        push(a.p_a[k], b.p_a[k]);
        for l in 0..3 {
            push(a.cond[l][k], b.cond[l][k]);
        }
    }
    for pair in Pair::ALL {
        for l in 0..3 {
            push(a.pair_cond[pair][l], b.pair_cond[pair][l]);
        }
    }
    worst
}
