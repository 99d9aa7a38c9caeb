//! Intrinsic curvature of the induced metric, computed two independent ways,
//! and the scalar invariants built from it.
//!
//! Tensor convention: `R[i][j][k][l]` is stored so that `R_ijij` is the
//! sectional curvature of the orthonormal pair `(e_i, e_j)`; in a space form
//! `R_ijkl = c(δ_ik δ_jl − δ_il δ_jk)`.

mod planes;
mod warp;

use thiserror::Error;

use crate::geomcore::Matrix;
use crate::immersion::{adapted_frame, metric_jet, ImmersionError, PointData, SpaceForm, WarpedChart};

pub use planes::{delta_invariant, delta_invariant_with, theta_k, theta_k_with, DeltaResult, Method, PlaneSearch, ThetaResult};
pub use warp::{warp_laplacian, WarpLaplacian};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("subspace has {0} directions; at least 2 are needed")]
    SubspaceTooSmall(usize),
    #[error("k = {k} must satisfy 2 <= k <= {n}")]
    BadK { k: usize, n: usize },
    #[error("vectors span a degenerate plane (Gram determinant {0:e})")]
    DegeneratePlane(f64),
    #[error("invalid subspace selection: {0}")]
    BadSelection(String),
    #[error(transparent)]
    Immersion(#[from] ImmersionError),
}

/// Which tangent directions of the adapted frame an invariant ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubspaceSel {
    All,
    /// `T_xN₁`: the first `n₁` frame vectors.
    Base,
    /// `T_xN₂`: the last `n₂` frame vectors.
    Fiber,
    /// Zero-based frame indices.
    Custom(Vec<usize>),
}

impl SubspaceSel {
    pub fn indices(&self, n: usize, n1: usize) -> Result<Vec<usize>, InvariantError> {
        Ok(match self {
            SubspaceSel::All => (0..n).collect(),
            SubspaceSel::Base => (0..n1).collect(),
            SubspaceSel::Fiber => (n1..n).collect(),
            SubspaceSel::Custom(idx) => {
                let mut seen = vec![false; n];
                for &i in idx {
                    if i >= n {
                        return Err(InvariantError::BadSelection(format!("index {i} out of range for n = {n}")));
                    }
                    if seen[i] {
                        return Err(InvariantError::BadSelection(format!("index {i} repeated")));
                    }
                    seen[i] = true;
                }
                idx.clone()
            }
        })
    }
}

/// Curvature tensor components in an orthonormal tangent frame whose first
/// `n1` vectors span the base distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    n1: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    pub fn zeros(n: usize, n1: usize) -> Self {
        assert!(n1 <= n);
        CurvatureTensor {
            n,
            n1,
            data: vec![0.0; n * n * n * n],
        }
    }

    /// Constant sectional curvature `c`.
    pub fn constant(n: usize, n1: usize, c: f64) -> Self {
        let mut r = Self::zeros(n, n1);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    r.set(i, j, i, j, c);
                    r.set(i, j, j, i, -c);
                }
            }
        }
        r
    }

    pub fn from_fn(n: usize, n1: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut r = Self::zeros(n, n1);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r.set(i, j, k, l, f(i, j, k, l));
                    }
                }
            }
        }
        r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let at = self.idx(i, j, k, l);
        self.data[at] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest violation among antisymmetry in each pair, pair symmetry and
    /// the first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Components in a new orthonormal basis given by the columns of `basis`
    /// (expressed in the current frame).
    pub fn change_basis(&self, basis: &Matrix, n1: usize) -> CurvatureTensor {
        let n = self.n;
        let k = basis.cols();
        assert_eq!(basis.rows(), n);
        // contract one slot at a time
        let mut cur = self.data.clone();
        let mut dims = [n, n, n, n];
        for slot in 0..4 {
            let mut next_dims = dims;
            next_dims[slot] = k;
            let total: usize = next_dims.iter().product();
            let mut next = vec![0.0; total];
            let stride = |d: &[usize; 4], s: usize| d[s + 1..].iter().product::<usize>();
            let old_stride = stride(&dims, slot);
            let new_stride = stride(&next_dims, slot);
            for (flat, out) in next.iter_mut().enumerate() {
                let a = (flat / new_stride) % k;
                let base = flat - a * new_stride;
                // position with slot index zero in old layout
                let outer = base / (new_stride * k);
                let inner = base % new_stride;
                let mut acc = 0.0;
                for i in 0..n {
                    let w = basis[(i, a)];
                    if w != 0.0 {
                        acc += w * cur[outer * old_stride * n + i * old_stride + inner];
                    }
                }
                *out = acc;
            }
            cur = next;
            dims = next_dims;
        }
        CurvatureTensor { n: k, n1, data: cur }
    }

    /// Restriction to the frame vectors listed in `idx`.
    pub fn restrict(&self, idx: &[usize]) -> CurvatureTensor {
        let k = idx.len();
        let mut r = CurvatureTensor::zeros(k, k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                for (c, &p) in idx.iter().enumerate() {
                    for (d, &q) in idx.iter().enumerate() {
                        r.set(a, b, c, d, self.get(i, j, p, q));
                    }
                }
            }
        }
        r
    }

    /// `R(x, y, z, w)` for frame-coordinate vectors.
    pub fn eval4(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                let xy = x[i] * y[j];
                for k in 0..n {
                    if z[k] == 0.0 {
                        continue;
                    }
                    let base = self.idx(i, j, k, 0);
                    let row = &self.data[base..base + n];
                    let s: f64 = row.iter().zip(w).map(|(r, wl)| r * wl).sum();
                    acc += xy * z[k] * s;
                }
            }
        }
        acc
    }
}

/// Intrinsic curvature of the induced metric from its Christoffel symbols,
/// converted to the adapted orthonormal frame.
pub fn curvature_intrinsic(chart: &WarpedChart, u: &[f64]) -> Result<CurvatureTensor, InvariantError> {
    let jet = metric_jet(chart, u)?;
    let n = chart.n();
    let g = &jet.g;
    let ginv = g.spd_inverse().map_err(ImmersionError::from)?;
    // Christoffel symbols of the first kind: gamma1[l][i][j] = Γ_{l,ij}
    let mut gamma1 = vec![vec![vec![0.0; n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma1[l][i][j] = 0.5 * (jet.dg[i][(j, l)] + jet.dg[j][(i, l)] - jet.dg[l][(i, j)]);
            }
        }
    }
    // second kind: gamma2[k][i][j] = Γ^k_ij
    let mut gamma2 = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma2[k][i][j] = (0..n).map(|l| ginv[(k, l)] * gamma1[l][i][j]).sum();
            }
        }
    }
    let coord = CurvatureTensor::from_fn(n, chart.n1, |a, b, c, d| {
        let second = 0.5
            * (jet.ddg[b][c][(a, d)] + jet.ddg[a][d][(b, c)]
                - jet.ddg[a][c][(b, d)]
                - jet.ddg[b][d][(a, c)]);
        let mut quad = 0.0;
        for e in 0..n {
            // g_ef Γ^f_ad = Γ_{e,ad}
            quad += gamma2[e][b][c] * gamma1[e][a][d] - gamma2[e][b][d] * gamma1[e][a][c];
        }
        second + quad
    });
    let frame = adapted_frame(g, chart.n1)?;
    Ok(coord.change_basis(&frame.vectors, chart.n1))
}

/// Curvature from the Gauss equation: ambient space-form part plus the
/// quadratic terms in the second fundamental form.
pub fn curvature_gauss(point: &PointData, ambient: &SpaceForm) -> CurvatureTensor {
    let n = point.n();
    let c = ambient.c;
    CurvatureTensor::from_fn(n, point.n1, |i, j, k, l| {
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let amb = c * (delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k));
        let ext: f64 = point
            .h
            .iter()
            .map(|h| h[(i, k)] * h[(j, l)] - h[(i, l)] * h[(j, k)])
            .sum();
        amb + ext
    })
}

/// Sectional curvature of `span{x, y}` (frame coordinates).
pub fn sectional(r: &CurvatureTensor, x: &[f64], y: &[f64]) -> Result<f64, InvariantError> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let (xx, yy, xy) = (dot(x, x), dot(y, y), dot(x, y));
    let gram = xx * yy - xy * xy;
    if !(gram > 1e-12 * xx * yy) || gram < 1e-300 {
        return Err(InvariantError::DegeneratePlane(gram));
    }
    Ok(r.eval4(x, y, x, y) / gram)
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sum of `R_ijij` over unordered pairs inside the selection.
pub fn scalar_tau(r: &CurvatureTensor, sel: &SubspaceSel) -> Result<f64, InvariantError> {
    let idx = sel.indices(r.n(), r.n1())?;
    let mut terms = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            terms.push(r.get(i, j, i, j));
        }
    }
    Ok(compensated_sum(terms))
}

/// Sum of sectional curvatures of mixed planes `e_a ∧ e_A`.
pub fn mixed_sectional_sum(r: &CurvatureTensor) -> f64 {
    let (n, n1) = (r.n(), r.n1());
    compensated_sum((0..n1).flat_map(|a| (n1..n).map(move |b| (a, b))).map(|(a, b)| r.get(a, b, a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{build_chart, ChartSpec, SpaceForm};
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    fn chart(base: &[&str], fiber: &[&str], warp: &str, comps: &[&str], amb: SpaceForm, dom: &[(&str, f64, f64)]) -> WarpedChart {
        let spec = ChartSpec {
            base: base.iter().map(|s| s.to_string()).collect(),
            fiber: fiber.iter().map(|s| s.to_string()).collect(),
            warp: warp.into(),
            components: comps.iter().map(|s| s.to_string()).collect(),
            ambient: amb,
            domain: dom
                .iter()
                .map(|(n, lo, hi)| (n.to_string(), ((*lo).into(), (*hi).into())))
                .collect::<BTreeMap<_, _>>(),
        };
        build_chart(&spec).unwrap()
    }

    fn sphere2() -> WarpedChart {
        chart(
            &["t"],
            &["s"],
            "sin(t)",
            &["sin(t)*cos(s)", "sin(t)*sin(s)", "cos(t)"],
            SpaceForm::euclidean(3),
            &[("t", 0.0, PI), ("s", 0.0, 2.0 * PI)],
        )
    }

    fn clifford_r4() -> WarpedChart {
        chart(
            &["t"],
            &["s"],
            "1/sqrt(2)",
            &["cos(t)/sqrt(2)", "sin(t)/sqrt(2)", "cos(s)/sqrt(2)", "sin(s)/sqrt(2)"],
            SpaceForm::euclidean(4),
            &[("t", 0.0, 2.0 * PI), ("s", 0.0, 2.0 * PI)],
        )
    }

    fn hyperbolic_plane() -> WarpedChart {
        chart(
            &["t"],
            &["s"],
            "exp(t)",
            &[
                "(s^2 + exp(-2*t) + 1)*exp(t)/2",
                "s*exp(t)",
                "(s^2 + exp(-2*t) - 1)*exp(t)/2",
                "0",
            ],
            SpaceForm::hyperbolic(-1.0, 3),
            &[("t", -1.0, 1.0), ("s", -1.0, 1.0)],
        )
    }

    #[test]
    fn flat_torus_is_flat() {
        let r = curvature_intrinsic(&clifford_r4(), &[0.7, 2.1]).unwrap();
        assert!(r.max_abs() < 1e-9);
    }

    #[test]
    fn round_sphere_has_unit_curvature() {
        let r = curvature_intrinsic(&sphere2(), &[1.1, 0.4]).unwrap();
        assert!((r.get(0, 1, 0, 1) - 1.0).abs() < 1e-9);
        assert!(r.symmetry_defect() < 1e-8);
    }

    #[test]
    fn hyperbolic_plane_has_curvature_minus_one() {
        let r = curvature_intrinsic(&hyperbolic_plane(), &[0.3, -0.2]).unwrap();
        assert!((r.get(0, 1, 0, 1) + 1.0).abs() < 1e-9, "{}", r.get(0, 1, 0, 1));
    }

    #[test]
    fn gauss_matches_intrinsic_on_sphere() {
        let c = sphere2();
        let u = [0.9, 1.3];
        let p = crate::immersion::second_fundamental_form(&c, &u).unwrap();
        let rg = curvature_gauss(&p, &c.ambient);
        let ri = curvature_intrinsic(&c, &u).unwrap();
        assert!((rg.get(0, 1, 0, 1) - 1.0).abs() < 1e-9);
        assert!(rg.max_abs_diff(&ri) < 1e-9);
    }

    #[test]
    fn gauss_of_totally_geodesic() {
        let c = chart(&["t"], &["s"], "1", &["t", "s", "0"], SpaceForm::euclidean(3), &[("t", -1.0, 1.0), ("s", -1.0, 1.0)]);
        let p = crate::immersion::second_fundamental_form(&c, &[0.1, 0.2]).unwrap();
        assert_eq!(curvature_gauss(&p, &c.ambient).max_abs(), 0.0);
        // same second fundamental form in a unit-curvature ambient: K = c
        let mut p3 = p.clone();
        p3.g = Matrix::identity(3);
        p3.n1 = 1;
        p3.h = vec![Matrix::zeros(3, 3)];
        let r = curvature_gauss(&p3, &SpaceForm::sphere(1.0, 4));
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut x = vec![0.0; 3];
            let mut y = vec![0.0; 3];
            x[i] = 1.0;
            y[j] = 1.0;
            assert_eq!(sectional(&r, &x, &y).unwrap(), 1.0);
        }
    }

    #[test]
    fn sectional_is_plane_invariant() {
        let r = curvature_intrinsic(&sphere2(), &[0.5, 0.5]).unwrap();
        let k1 = sectional(&r, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        let k2 = sectional(&r, &[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((k1 - r.get(0, 1, 0, 1)).abs() < 1e-15);
        assert!((k1 - k2).abs() < 1e-10);
        assert!(matches!(
            sectional(&r, &[1.0, 0.0], &[2.0, 0.0]),
            Err(InvariantError::DegeneratePlane(_))
        ));
    }

    #[test]
    fn scalar_curvature_sums_pairs() {
        let r = CurvatureTensor::constant(3, 1, 0.7);
        assert!((scalar_tau(&r, &SubspaceSel::All).unwrap() - 2.1).abs() < 1e-15);
        assert_eq!(scalar_tau(&r, &SubspaceSel::Custom(vec![2])).unwrap(), 0.0);
        assert!((scalar_tau(&r, &SubspaceSel::Fiber).unwrap() - 0.7).abs() < 1e-15);
        assert!(scalar_tau(&r, &SubspaceSel::Custom(vec![0, 0])).is_err());
        assert!(scalar_tau(&r, &SubspaceSel::Custom(vec![3])).is_err());
    }

    #[test]
    fn constant_tensor_has_all_symmetries() {
        assert_eq!(CurvatureTensor::constant(4, 2, -1.5).symmetry_defect(), 0.0);
    }

    #[test]
    fn change_basis_preserves_sectional_curvature() {
        let r = curvature_intrinsic(&sphere2(), &[0.8, 0.1]).unwrap();
        let (c, s) = (0.6f64, 0.8f64);
        let rot = Matrix::from_rows(&[vec![c, -s], vec![s, c]]);
        let r2 = r.change_basis(&rot, 1);
        assert!((r2.get(0, 1, 0, 1) - r.get(0, 1, 0, 1)).abs() < 1e-12);
        let x = rot.col(0);
        let y = rot.col(1);
        assert!((r.eval4(&x, &y, &x, &y) - r2.get(0, 1, 0, 1)).abs() < 1e-12);
    }
}
