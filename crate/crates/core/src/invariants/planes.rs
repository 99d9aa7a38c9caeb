//! Minimisation of sectional and restricted Ricci curvature over planes.

use serde::Serialize;

use super::{compensated_sum, scalar_tau, CurvatureTensor, InvariantError, SubspaceSel};
use crate::geomcore::{sym_eigen, Matrix};
use crate::sampling::{self, combinations, orthonormalize, random_frame};

/// How an infimum over a Grassmannian was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Only one plane exists, so the value is exact.
    Exact,
    /// Sampling plus local refinement; an upper bound on the true infimum.
    Sampled,
}

/// Budget for the plane search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneSearch {
    pub samples: usize,
    pub refine_from: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for PlaneSearch {
    fn default() -> Self {
        PlaneSearch {
            samples: 512,
            refine_from: 8,
            steps: 200,
            seed: sampling::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaResult {
    pub delta: f64,
    pub tau: f64,
    pub inf_k: f64,
    /// Orthonormal basis of the minimising plane, in frame coordinates of
    /// the full tangent space.
    pub plane: (Vec<f64>, Vec<f64>),
    /// Smallest sectional curvature among coordinate-pair planes.
    pub coordinate_min: f64,
    pub method: Method,
}

/// Sectional curvature as a quadratic form on bivectors `w_ij = x_i y_j − x_j y_i`.
struct BivectorForm {
    d: usize,
    pairs: Vec<(usize, usize)>,
    q: Matrix,
}

impl BivectorForm {
    fn new(r: &CurvatureTensor) -> Self {
        let d = r.n();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        let q = Matrix::from_fn(pairs.len(), pairs.len(), |p, s| {
            let (i, j) = pairs[p];
            let (k, l) = pairs[s];
            0.5 * (r.get(i, j, k, l) + r.get(k, l, i, j))
        });
        BivectorForm { d, pairs, q }
    }

    fn bivector(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.pairs.iter().map(|&(i, j)| x[i] * y[j] - x[j] * y[i]).collect()
    }

    /// Sectional curvature of an orthonormal pair.
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let w = self.bivector(x, y);
        self.q.bilinear(&w, &w)
    }

    fn gradient(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let w = self.bivector(x, y);
        let z = self.q.mul_vec(&w);
        let mut zm = Matrix::zeros(self.d, self.d);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            zm[(i, j)] = 2.0 * z[p];
            zm[(j, i)] = -2.0 * z[p];
        }
        let gx = zm.mul_vec(y);
        let gy = zm.mul_vec(x).iter().map(|v| -v).collect();
        (gx, gy)
    }
}

fn project_tangent(g: &mut [f64], x: &[f64], y: &[f64]) {
    for v in [x, y] {
        let p: f64 = g.iter().zip(v).map(|(a, b)| a * b).sum();
        g.iter_mut().zip(v).for_each(|(a, b)| *a -= p * b);
    }
}

/// Projected gradient descent on the Stiefel manifold of orthonormal pairs,
/// with the step halved after every rejected move.
fn refine(form: &BivectorForm, mut x: Vec<f64>, mut y: Vec<f64>, steps: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let mut k = form.value(&x, &y);
    let mut step = 0.5;
    for _ in 0..steps {
        let (mut gx, mut gy) = form.gradient(&x, &y);
        project_tangent(&mut gx, &x, &y);
        project_tangent(&mut gy, &x, &y);
        let gnorm = gx.iter().chain(&gy).map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < 1e-15 {
            break;
        }
        let mut cand = vec![
            x.iter().zip(&gx).map(|(a, g)| a - step * g).collect::<Vec<_>>(),
            y.iter().zip(&gy).map(|(a, g)| a - step * g).collect::<Vec<_>>(),
        ];
        if !orthonormalize(&mut cand) {
            step *= 0.5;
            continue;
        }
        let kc = form.value(&cand[0], &cand[1]);
        if kc < k {
            k = kc;
            y = cand.pop().unwrap();
            x = cand.pop().unwrap();
            step = (step * 1.25).min(4.0);
        } else {
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
    }
    (k, x, y)
}

fn embed(v: &[f64], idx: &[usize], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (a, &i) in idx.iter().enumerate() {
        out[i] = v[a];
    }
    out
}

pub fn delta_invariant(r: &CurvatureTensor, sel: &SubspaceSel) -> Result<DeltaResult, InvariantError> {
    delta_invariant_with(r, sel, &PlaneSearch::default())
}

/// `δ = τ(sel) − inf K(π)` over 2-planes `π` inside the selected subspace.
pub fn delta_invariant_with(
    r: &CurvatureTensor,
    sel: &SubspaceSel,
    search: &PlaneSearch,
) -> Result<DeltaResult, InvariantError> {
    let n = r.n();
    let idx = sel.indices(n, r.n1())?;
    let d = idx.len();
    if d < 2 {
        return Err(InvariantError::SubspaceTooSmall(d));
    }
    let tau = scalar_tau(r, sel)?;
    let sub = r.restrict(&idx);
    let form = BivectorForm::new(&sub);
    let unit = |i: usize| {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    };

    let mut candidates: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for &(i, j) in &form.pairs {
        candidates.push((sub.get(i, j, i, j), unit(i), unit(j)));
    }
    let coordinate_min = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let method = if d == 2 { Method::Exact } else { Method::Sampled };

    if d > 2 {
        let mut rng = sampling::rng(search.seed);
        for _ in 0..search.samples {
            let mut f = random_frame(&mut rng, d, 2);
            let y = f.pop().unwrap();
            let x = f.pop().unwrap();
            candidates.push((form.value(&x, &y), x, y));
        }
        // stable sort keeps the result independent of ties
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        let take = search.refine_from.min(candidates.len());
        let refined: Vec<_> = candidates[..take]
            .iter()
            .map(|(_, x, y)| refine(&form, x.clone(), y.clone(), search.steps))
            .collect();
        candidates.extend(refined);
    }
    let best = candidates
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .cloned()
        .expect("at least one plane");
    let inf_k = best.0.min(coordinate_min);
    Ok(DeltaResult {
        delta: tau - inf_k,
        tau,
        inf_k,
        plane: (embed(&best.1, &idx, n), embed(&best.2, &idx, n)),
        coordinate_min,
        method,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaResult {
    pub theta: f64,
    pub k: usize,
    pub method: Method,
}

/// Restricted Ricci form `M_ab = Σ_j R(f_a, f_j, f_b, f_j)` of a k-frame.
fn restricted_ricci_min(r: &CurvatureTensor, frame: &[Vec<f64>]) -> f64 {
    let k = frame.len();
    let m = Matrix::from_fn(k, k, |a, b| {
        compensated_sum((0..k).map(|j| r.eval4(&frame[a], &frame[j], &frame[b], &frame[j])))
    });
    let sym = Matrix::from_fn(k, k, |a, b| 0.5 * (m[(a, b)] + m[(b, a)]));
    let (eig, _) = sym_eigen(&sym).expect("symmetric by construction");
    eig[0]
}

pub fn theta_k(r: &CurvatureTensor, k: usize) -> Result<ThetaResult, InvariantError> {
    theta_k_with(r, k, &PlaneSearch::default())
}

/// `Θ_k`: the infimum of restricted Ricci curvature over k-planes and unit
/// vectors in them, divided by `k − 1`.
pub fn theta_k_with(r: &CurvatureTensor, k: usize, search: &PlaneSearch) -> Result<ThetaResult, InvariantError> {
    let n = r.n();
    if k < 2 || k > n {
        return Err(InvariantError::BadK { k, n });
    }
    let unit = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    let mut best = f64::INFINITY;
    for subset in combinations(n, k) {
        let frame: Vec<Vec<f64>> = subset.into_iter().map(unit).collect();
        best = best.min(restricted_ricci_min(r, &frame));
    }
    let method = if k == n {
        Method::Exact
    } else {
        let mut rng = sampling::rng(search.seed);
        for _ in 0..search.samples {
            let frame = random_frame(&mut rng, n, k);
            best = best.min(restricted_ricci_min(r, &frame));
        }
        Method::Sampled
    };
    Ok(ThetaResult {
        theta: best / (k as f64 - 1.0),
        k,
        method,
    })
}
