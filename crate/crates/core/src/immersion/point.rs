use super::{ImmersionError, WarpedChart};
use crate::exprlang::{Bindings, HyperDual, Scalar};
use crate::geomcore::{gram_schmidt, sym_eigen, Frame, Matrix};

const DEGENERATE_EIG: f64 = 1e-10;
const MINIMAL_H: f64 = 1e-10;

/// Position and first two derivatives of every model-space component.
struct Jets {
    pos: Vec<f64>,
    /// `d1[c][i] = ∂_i φ^c`
    d1: Vec<Vec<f64>>,
    /// `d2[c]` row-major `n×n`
    d2: Vec<Vec<f64>>,
}

fn jets(chart: &WarpedChart, u: &[f64]) -> Result<Jets, ImmersionError> {
    let env = Bindings::seeded(&chart.coords, u);
    let mut out = Jets {
        pos: Vec::new(),
        d1: Vec::new(),
        d2: Vec::new(),
    };
    for comp in &chart.components {
        let v: HyperDual = comp.eval(&env)?;
        out.pos.push(v.value);
        out.d1.push(v.grad);
        out.d2.push(v.hess);
    }
    Ok(out)
}

fn tangent_vectors(j: &Jets, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| j.d1.iter().map(|d| d[i]).collect()).collect()
}

fn check_metric(g: &Matrix, u: &[f64]) -> Result<(), ImmersionError> {
    let (eig, _) = sym_eigen(g)?;
    let min = eig.first().copied().unwrap_or(0.0);
    if !(min >= DEGENERATE_EIG) {
        return Err(ImmersionError::DegenerateMetric {
            at: u.to_vec(),
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// Induced metric `g_ij = <∂_iφ, ∂_jφ>` in the coordinate basis.
pub fn first_fundamental_form(chart: &WarpedChart, u: &[f64]) -> Result<Matrix, ImmersionError> {
    chart.check_domain(u)?;
    let j = jets(chart, u)?;
    let tv = tangent_vectors(&j, chart.n());
    let g = Matrix::from_fn(chart.n(), chart.n(), |a, b| {
        if a <= b {
            chart.ambient.inner(&tv[a], &tv[b])
        } else {
            chart.ambient.inner(&tv[b], &tv[a])
        }
    });
    check_metric(&g, u)?;
    Ok(g)
}

/// Induced metric together with its first and second coordinate derivatives,
/// from third-order forward differentiation of the immersion.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: Matrix,
    /// `dg[k] = ∂_k g`
    pub dg: Vec<Matrix>,
    /// `ddg[k][l] = ∂_k ∂_l g`
    pub ddg: Vec<Vec<Matrix>>,
}

pub fn metric_jet(chart: &WarpedChart, u: &[f64]) -> Result<MetricJet, ImmersionError> {
    chart.check_domain(u)?;
    let n = chart.n();
    let env = Bindings::seeded_third_order(&chart.coords, u);
    let sig = chart.ambient.signature();
    // tangents[c][i] = ∂_i φ^c carried as a hyper-dual
    let mut tangents: Vec<Vec<HyperDual>> = Vec::with_capacity(chart.components.len());
    for comp in &chart.components {
        tangents.push(comp.eval(&env)?.eps);
    }
    let mut entries = vec![vec![HyperDual::constant(0.0, n); n]; n];
    for a in 0..n {
        for b in a..n {
            let mut acc = HyperDual::constant(0.0, n);
            for (c, t) in tangents.iter().enumerate() {
                acc = acc + (t[a].clone() * t[b].clone()).scale(sig[c]);
            }
            entries[a][b] = acc.clone();
            entries[b][a] = acc;
        }
    }
    let g = Matrix::from_fn(n, n, |a, b| entries[a][b].value);
    check_metric(&g, u)?;
    let dg = (0..n)
        .map(|k| Matrix::from_fn(n, n, |a, b| entries[a][b].grad[k]))
        .collect();
    let ddg = (0..n)
        .map(|k| {
            (0..n)
                .map(|l| Matrix::from_fn(n, n, |a, b| entries[a][b].hess_at(k, l)))
                .collect()
        })
        .collect();
    Ok(MetricJet { g, dg, ddg })
}

/// Orthonormal frame adapted to the warped split: Gram–Schmidt applied
/// separately to the base and fiber coordinate vectors, base first.
pub fn adapted_frame(g: &Matrix, n1: usize) -> Result<Frame, ImmersionError> {
    let n = g.rows();
    let unit = |k: usize| {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    };
    let base = gram_schmidt(&Matrix::from_cols(&(0..n1).map(unit).collect::<Vec<_>>()), g)?;
    let fiber = gram_schmidt(&Matrix::from_cols(&(n1..n).map(unit).collect::<Vec<_>>()), g)?;
    let mut e = Matrix::zeros(n, n);
    for j in 0..n1 {
        e.set_col(j, &base.vector(j));
    }
    for j in 0..n - n1 {
        e.set_col(n1 + j, &fiber.vector(j));
    }
    Ok(Frame {
        vectors: e,
        metric: g.clone(),
    })
}

/// Extrinsic data of the immersion at one parameter point.
///
/// `h[r]` holds the coefficients `h^r_ij = <h(e_i, e_j), e_{n+1+r}>` in the
/// adapted tangent frame and the normal frame. When the mean curvature
/// vector is non-zero the normal frame is rotated so that its first vector
/// points along it.
#[derive(Debug, Clone)]
pub struct PointData {
    pub u: Vec<f64>,
    pub n1: usize,
    pub g: Matrix,
    pub tangent_frame: Frame,
    /// Tangent frame vectors pushed forward into the model space (columns).
    pub tangent_ambient: Matrix,
    /// Normal frame in model-space coordinates, orthonormal under the model
    /// inner product.
    pub normal_frame: Frame,
    pub position: Vec<f64>,
    pub h: Vec<Matrix>,
    pub mean_curvature: Vec<f64>,
    pub mean_h2: f64,
    pub h2: f64,
}

impl PointData {
    pub fn n(&self) -> usize {
        self.g.rows()
    }

    pub fn n2(&self) -> usize {
        self.n() - self.n1
    }

    /// Codimension `m − n`.
    pub fn q(&self) -> usize {
        self.h.len()
    }

    /// Re-expresses the data in the tangent frame `E·rot` (`rot` orthogonal).
    pub fn rotate_tangent(&self, rot: &Matrix) -> PointData {
        let rt = rot.transpose();
        let mut out = self.clone();
        out.tangent_frame.vectors = &self.tangent_frame.vectors * rot;
        out.tangent_ambient = &self.tangent_ambient * rot;
        out.h = self.h.iter().map(|h| symmetrize(&(&(&rt * h) * rot))).collect();
        out.refresh_scalars();
        out
    }

    fn refresh_scalars(&mut self) {
        let n = self.n() as f64;
        self.mean_curvature = self.h.iter().map(|h| h.trace() / n).collect();
        self.mean_h2 = self.mean_curvature.iter().map(|x| x * x).sum();
        self.h2 = self.h.iter().map(|h| h.frobenius().powi(2)).sum();
    }
}

fn symmetrize(m: &Matrix) -> Matrix {
    let mut s = m.clone();
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            s[(j, i)] = s[(i, j)];
        }
    }
    s
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// Completes `w` (unit, ℝ^q) to an orthonormal basis with `w` first.
fn basis_with_first(w: &[f64]) -> Matrix {
    let q = w.len();
    let mut cols: Vec<Vec<f64>> = vec![w.to_vec()];
    for k in 0..q {
        if cols.len() == q {
            break;
        }
        let mut v = vec![0.0; q];
        v[k] = 1.0;
        for _pass in 0..2 {
            for c in &cols {
                let p: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                axpy(&mut v, -p, c);
            }
        }
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= nrm);
            cols.push(v);
        }
    }
    Matrix::from_cols(&cols)
}

/// Second fundamental form, adapted frames and mean curvature at `u`.
pub fn second_fundamental_form(chart: &WarpedChart, u: &[f64]) -> Result<PointData, ImmersionError> {
    chart.check_domain(u)?;
    let n = chart.n();
    let q = chart.m() - n;
    let amb = chart.ambient;
    let big_n = amb.model_dim();
    let j = jets(chart, u)?;
    let tv = tangent_vectors(&j, n);
    let g = Matrix::from_fn(n, n, |a, b| {
        if a <= b {
            amb.inner(&tv[a], &tv[b])
        } else {
            amb.inner(&tv[b], &tv[a])
        }
    });
    check_metric(&g, u)?;
    let frame = adapted_frame(&g, chart.n1)?;
    let e = &frame.vectors;

    let tangents: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            let mut t = vec![0.0; big_n];
            for (i, ti) in tv.iter().enumerate() {
                axpy(&mut t, e[(i, a)], ti);
            }
            t
        })
        .collect();

    // Directions removed from the model space: the tangent frame and, for
    // curved ambients, the position vector.
    let position = j.pos.clone();
    let remove_position = amb.kind != super::SpaceFormKind::Euclidean;
    let pp = if remove_position { amb.inner(&position, &position) } else { 1.0 };
    let project_out = |v: &mut Vec<f64>| {
        for _pass in 0..2 {
            for t in &tangents {
                let p = amb.inner(t, v);
                axpy(v, -p, t);
            }
            if remove_position {
                let p = amb.inner(&position, v) / pp;
                axpy(v, -p, &position);
            }
        }
    };

    let mut residuals: Vec<Vec<f64>> = (0..big_n)
        .map(|k| {
            let mut v = vec![0.0; big_n];
            v[k] = 1.0;
            project_out(&mut v);
            v
        })
        .collect();
    let mut normals: Vec<Vec<f64>> = Vec::with_capacity(q);
    while normals.len() < q && !residuals.is_empty() {
        // greedy pivot: largest remaining residual
        let (best, norm2) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, amb.inner(r, r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if !(norm2 > 1e-12) {
            break;
        }
        let mut v = residuals.swap_remove(best);
        let nrm = norm2.sqrt();
        v.iter_mut().for_each(|x| *x /= nrm);
        for r in residuals.iter_mut() {
            for _pass in 0..2 {
                let p = amb.inner(&v, r);
                axpy(r, -p, &v);
            }
        }
        normals.push(v);
    }
    if normals.len() != q {
        return Err(ImmersionError::NormalRank {
            found: normals.len(),
            expected: q,
        });
    }
    let eta = Matrix::diag(&amb.signature());
    let mut normal_frame = gram_schmidt(&Matrix::from_cols(&normals), &eta)?;

    let second: Vec<Vec<f64>> = (0..n * n)
        .map(|ij| j.d2.iter().map(|d| d[ij]).collect())
        .collect();
    let coeffs_for = |nu: &[f64]| -> Matrix {
        let coord = Matrix::from_fn(n, n, |a, b| {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            amb.inner(&second[a * n + b], nu)
        });
        symmetrize(&(&(&e.transpose() * &coord) * e))
    };
    let mut h: Vec<Matrix> = (0..q).map(|r| coeffs_for(&normal_frame.vector(r))).collect();

    let mut pd = PointData {
        u: u.to_vec(),
        n1: chart.n1,
        g,
        tangent_frame: frame.clone(),
        tangent_ambient: Matrix::from_cols(&tangents),
        normal_frame: normal_frame.clone(),
        position,
        h: h.clone(),
        mean_curvature: Vec::new(),
        mean_h2: 0.0,
        h2: 0.0,
    };
    pd.refresh_scalars();

    let hn = pd.mean_h2.sqrt();
    if hn > MINIMAL_H && q > 1 {
        let w: Vec<f64> = pd.mean_curvature.iter().map(|x| x / hn).collect();
        let rot = basis_with_first(&w);
        normal_frame.vectors = &normal_frame.vectors * &rot;
        h = (0..q)
            .map(|s| {
                let mut acc = Matrix::zeros(n, n);
                for (r, hr) in pd.h.iter().enumerate() {
                    acc = Matrix::from_fn(n, n, |a, b| acc[(a, b)] + rot[(r, s)] * hr[(a, b)]);
                }
                symmetrize(&acc)
            })
            .collect();
        pd.normal_frame = normal_frame;
        pd.h = h;
        pd.refresh_scalars();
    } else if hn > MINIMAL_H && pd.mean_curvature[0] < 0.0 {
        // codimension one: flip so the normal points along H
        pd.normal_frame.vectors = pd.normal_frame.vectors.scaled(-1.0);
        pd.h = pd.h.iter().map(|m| m.scaled(-1.0)).collect();
        pd.refresh_scalars();
    }
    Ok(pd)
}
