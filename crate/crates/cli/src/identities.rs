//! Randomized suites for the algebraic lemmas, runnable on their own.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use chenwarp_core::chen::{check_lemma, lemma32_residual, lemma33_residual, LemmaInstance};
use chenwarp_core::geomcore::Matrix;
use chenwarp_core::sampling;

/// Relative residual accepted for the rearrangement identities.
pub const REARRANGEMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct LemmaSuite {
    pub instances: usize,
    pub equality_cases: usize,
    pub inequality_failures: usize,
    /// Instances where equality and the equality condition disagree.
    pub equivalence_failures: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RearrangementSuite {
    pub instances: usize,
    pub max_relative_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub lemma11: LemmaSuite,
    pub lemma32: RearrangementSuite,
    pub lemma33: RearrangementSuite,
    pub status: i32,
}

/// Random α of length 2..=8; one draw in five is forced onto the equality
/// configuration `α₁ + α₂ = α₃ = … = αₙ`.
pub fn random_alphas(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.gen_range(2..=8);
    let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    if rng.gen_bool(0.2) {
        let s = a[0] + a[1];
        a[2..].iter_mut().for_each(|x| *x = s);
    }
    a
}

pub fn lemma_suite(count: usize, seed: u64) -> LemmaSuite {
    let mut rng = sampling::rng(seed);
    let mut suite = LemmaSuite {
        instances: count,
        equality_cases: 0,
        inequality_failures: 0,
        equivalence_failures: 0,
        passed: false,
    };
    for _ in 0..count {
        let inst = LemmaInstance::from_alphas(random_alphas(&mut rng));
        match check_lemma(&inst) {
            Ok(out) => {
                suite.equality_cases += out.equality as usize;
                suite.inequality_failures += !out.holds as usize;
                suite.equivalence_failures += (out.equality != out.condition_matches) as usize;
            }
            Err(_) => suite.inequality_failures += 1,
        }
    }
    suite.passed = suite.inequality_failures == 0 && suite.equivalence_failures == 0;
    suite
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-5.0..5.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Random coefficient tensors with `n ∈ 3..=8`, `q ∈ 1..=4` and, whenever
/// `n ≥ 4`, `n₁ ∈ 3..n` for the block identity.
pub fn rearrangement_suites(count: usize, seed: u64) -> (RearrangementSuite, RearrangementSuite) {
    let mut rng = sampling::rng(seed ^ 0x3233);
    let mut worst32: f64 = 0.0;
    let mut worst33: f64 = 0.0;
    let mut n33 = 0;
    for _ in 0..count {
        let n = rng.gen_range(3..=8);
        let q = rng.gen_range(1..=4);
        let h: Vec<Matrix> = (0..q).map(|_| random_symmetric(&mut rng, n)).collect();
        let scale: f64 = h.iter().map(|m| m.frobenius().powi(2)).sum::<f64>().max(f64::MIN_POSITIVE);
        let r32 = lemma32_residual(&h).map(|r| r / scale).unwrap_or(f64::INFINITY);
        worst32 = worst32.max(r32);
        if n >= 4 {
            let n1 = rng.gen_range(3..n);
            let r33 = lemma33_residual(&h, n1).map(|r| r / scale).unwrap_or(f64::INFINITY);
            worst33 = worst33.max(r33);
            n33 += 1;
        }
    }
    (
        RearrangementSuite {
            instances: count,
            max_relative_residual: worst32,
            passed: worst32 <= REARRANGEMENT_TOL,
        },
        RearrangementSuite {
            instances: n33,
            max_relative_residual: worst33,
            passed: worst33 <= REARRANGEMENT_TOL,
        },
    )
}

pub fn run_identities(count: usize, seed: u64) -> IdentityReport {
    let lemma11 = lemma_suite(count, seed);
    let (lemma32, lemma33) = rearrangement_suites(count, seed);
    let ok = lemma11.passed && lemma32.passed && lemma33.passed;
    IdentityReport {
        seed,
        lemma11,
        lemma32,
        lemma33,
        status: if ok { 0 } else { 2 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let rep = run_identities(2000, 1);
        assert_eq!(rep.status, 0);
        assert!(rep.lemma11.equality_cases > 200);
        assert!(rep.lemma33.instances > 1000);
    }
}
