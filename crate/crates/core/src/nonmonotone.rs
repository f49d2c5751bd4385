//! Non-monotone objectives: randomized double greedy and the repetitions wrapper.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::kparity::KParityConstraint;
use crate::objective::ValueOracle;
use crate::scalar::Scalar;
use crate::sets;
use crate::solver::{alpha_from_rng, run_with_alpha, RunMode, RunTrace};

/// Largest set accepted by [`double_greedy_exact_expectation`].
pub const EXACT_MAX_SET: usize = 14;

/// Inclusion probability `a' / (a' + b')`, or 1 when both clipped gains are zero.
fn inclusion_probability<T: Scalar>(a: T, b: T) -> T {
    let a = a.max(T::zero());
    let b = b.max(T::zero());
    if a + b == T::zero() {
        T::one()
    } else {
        a / (a + b)
    }
}

/// Randomized double greedy over `s` in ascending id order. Returns `T ⊆ S`.
pub fn double_greedy<T: Scalar, F: ValueOracle<T> + ?Sized, R: Rng + ?Sized>(
    f: &F,
    s: &[usize],
    rng: &mut R,
) -> Vec<usize> {
    let s = sets::normalize(s);
    let mut x: Vec<usize> = Vec::new();
    let mut y = s.clone();
    let mut fx = f.value(&x);
    let mut fy = f.value(&y);
    for &e in &s {
        let mut xe = x.clone();
        xe.push(e);
        let ye: Vec<usize> = y.iter().copied().filter(|&v| v != e).collect();
        let (fxe, fye) = (f.value(&xe), f.value(&ye));
        let p = inclusion_probability(fxe - fx, fye - fy);
        if rng.gen::<f64>() < p.as_f64() {
            x = xe;
            fx = fxe;
        } else {
            y = ye;
            fy = fye;
        }
    }
    x
}

/// `E[f(T)]` for [`double_greedy`] on `s`, by following both branches at every element.
pub fn double_greedy_exact_expectation<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    s: &[usize],
) -> Result<T> {
    let s = sets::normalize(s);
    if s.len() > EXACT_MAX_SET {
        return Err(Error::TooLarge(format!(
            "exact double greedy expectation limited to {EXACT_MAX_SET} elements"
        )));
    }
    fn go<T: Scalar, F: ValueOracle<T> + ?Sized>(f: &F, s: &[usize], j: usize, x: Vec<usize>, y: Vec<usize>) -> T {
        if j == s.len() {
            return f.value(&x);
        }
        let e = s[j];
        let mut xe = x.clone();
        xe.push(e);
        let ye: Vec<usize> = y.iter().copied().filter(|&v| v != e).collect();
        let p = inclusion_probability(f.value(&xe) - f.value(&x), f.value(&ye) - f.value(&y));
        let mut total = T::zero();
        if p > T::zero() {
            total = total + p * go(f, s, j + 1, xe, y.clone());
        }
        if p < T::one() {
            total = total + (T::one() - p) * go(f, s, j + 1, x, ye);
        }
        total
    }
    Ok(go(f, &s, 0, Vec::new(), s.clone()))
}

/// `⌈4 k^{2/3}⌉`.
pub fn default_ell(k: usize) -> usize {
    (4.0 * (k as f64).powf(2.0 / 3.0)).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepetitionsConfig {
    pub ell: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl RepetitionsConfig {
    /// Default round count for `k` and `epsilon = 0.5`.
    pub fn for_k(k: usize, seed: u64) -> Self {
        RepetitionsConfig { ell: default_ell(k), epsilon: 0.5, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return input("ell must be at least 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return input(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round<T> {
    /// `E_{i-1}`.
    pub ground: Vec<usize>,
    pub b: Vec<usize>,
    pub b_prime: Vec<usize>,
    pub value_b: T,
    pub value_b_prime: T,
    pub trace: RunTrace<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionsResult<T> {
    pub best: Vec<usize>,
    pub value: T,
    pub rounds: Vec<Round<T>>,
}

/// Generator for round `round`: stream `round` of the seeded ChaCha8 generator.
pub fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

/// `ell` rounds of the hybrid solver on the shrinking ground set, each
/// followed by double greedy on its output; returns the best set seen.
pub fn repetitions<T: Scalar, F: ValueOracle<T> + ?Sized>(
    f: &F,
    c: &KParityConstraint,
    config: &RepetitionsConfig,
) -> Result<RepetitionsResult<T>> {
    config.validate()?;
    let mut ground = c.edge_ids();
    let mut rounds = Vec::with_capacity(config.ell);
    let mut best: Option<(Vec<usize>, T)> = None;
    for round in 0..config.ell {
        let mut rng = round_rng(config.seed, round as u64);
        let alpha = alpha_from_rng(&mut rng);
        let sub = c.restrict_ground(&ground)?;
        let trace: RunTrace<T> = run_with_alpha(f, &sub, config.epsilon, alpha, RunMode::Efficient)?;
        let b = trace.output.clone();
        let b_prime = double_greedy(f, &b, &mut rng);
        let (value_b, value_b_prime) = (f.value(&b), f.value(&b_prime));
        for (set, v) in [(&b, value_b), (&b_prime, value_b_prime)] {
            if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
                best = Some((set.clone(), v));
            }
        }
        let next = sets::minus(&ground, &b);
        rounds.push(Round { ground, b, b_prime, value_b, value_b_prime, trace });
        ground = next;
    }
    let (best, value) = best.expect("at least one round");
    Ok(RepetitionsResult { best, value, rounds })
}
