//! Deterministic point and plane sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Seed used whenever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED_C4E1;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base` (van der Corput).
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = f64::from(base);
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while index > 0 {
        out += (index % u64::from(base)) as f64 * inv;
        index /= u64::from(base);
        inv /= b;
    }
    out
}

/// `count` Halton points inside the box `bounds`, shrunk by `margin` (a
/// fraction of each side) at both ends. Index 0 is skipped so no point sits on
/// the shrunken corner.
pub fn halton_box(count: usize, bounds: &[(f64, f64)], margin: f64) -> Vec<Vec<f64>> {
    assert!(bounds.len() <= PRIMES.len(), "too many dimensions for Halton sampling");
    (1..=count as u64)
        .map(|i| {
            bounds
                .iter()
                .zip(PRIMES)
                .map(|(&(lo, hi), p)| {
                    let w = hi - lo;
                    lo + w * margin + w * (1.0 - 2.0 * margin) * radical_inverse(i, p)
                })
                .collect()
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Orthonormalizes `vs` in place (Euclidean); returns false if degenerate.
pub fn orthonormalize(vs: &mut [Vec<f64>]) -> bool {
    for k in 0..vs.len() {
        for _pass in 0..2 {
            for j in 0..k {
                let p: f64 = vs[j].iter().zip(&vs[k]).map(|(a, b)| a * b).sum();
                let (head, tail) = vs.split_at_mut(k);
                tail[0].iter_mut().zip(&head[j]).for_each(|(x, y)| *x -= p * y);
            }
        }
        let nrm = vs[k].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(nrm > 1e-12) {
            return false;
        }
        vs[k].iter_mut().for_each(|x| *x /= nrm);
    }
    true
}

/// A random orthonormal `k`-frame in ℝⁿ from orthonormalized Gaussians.
pub fn random_frame(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    loop {
        let mut vs: Vec<Vec<f64>> = (0..k).map(|_| gaussian_vec(rng, n)).collect();
        if orthonormalize(&mut vs) {
            return vs;
        }
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_base_two() {
        let got: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn halton_points_stay_inside_margin() {
        let pts = halton_box(64, &[(0.0, 1.0), (-2.0, 2.0), (0.0, 10.0)], 0.05);
        for p in pts {
            assert!(p[0] > 0.05 && p[0] < 0.95);
            assert!(p[1] > -1.8 && p[1] < 1.8);
            assert!(p[2] > 0.5 && p[2] < 9.5);
        }
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn random_frames_are_orthonormal_and_reproducible() {
        let a = random_frame(&mut rng(1), 5, 3);
        let b = random_frame(&mut rng(1), 5, 3);
        assert_eq!(a, b);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
