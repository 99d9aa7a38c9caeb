//! Chen's first inequality for submanifolds of space forms, its warped
//! product refinement, the algebraic lemmas behind them and a classifier for
//! the shape operators in the equality case.
//!
//! Slack is always oriented so that a non-negative value means the
//! inequality holds.

use serde::Serialize;
use thiserror::Error;

use crate::geomcore::Matrix;
use crate::immersion::{PointData, SpaceForm};
use crate::invariants::{
    delta_invariant_with, CurvatureTensor, DeltaResult, InvariantError, Method, PlaneSearch, SubspaceSel,
};

/// Default absolute tolerance on slack for declaring equality.
pub const EQUALITY_WITHIN: f64 = 1e-7;
/// Default relative tolerance of the shape-operator classifier.
pub const CLASSIFIER_REL_TOL: f64 = 1e-6;
const D_MINIMAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChenError {
    #[error("lemma hypothesis violated: (sum a)^2 = {lhs:e} but (n-1)(sum a^2 + beta) = {rhs:e}")]
    HypothesisViolated { lhs: f64, rhs: f64 },
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("precondition failed: {0}")]
    PreconditionError(String),
    #[error("{0}")]
    CaseDimensionError(String),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

// ---------------------------------------------------------------------------
// Lemma on 2α₁α₂ ≥ β

/// The β that makes `(Σα)² = (n−1)(Σα² + β)` hold.
pub fn lemma_beta(alphas: &[f64]) -> f64 {
    assert!(alphas.len() >= 2, "lemma needs n >= 2");
    let n = alphas.len() as f64;
    let s: f64 = alphas.iter().sum();
    let s2: f64 = alphas.iter().map(|a| a * a).sum();
    s * s / (n - 1.0) - s2
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaInstance {
    pub alphas: Vec<f64>,
    pub beta: f64,
}

impl LemmaInstance {
    pub fn from_alphas(alphas: Vec<f64>) -> Self {
        let beta = lemma_beta(&alphas);
        LemmaInstance { alphas, beta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaOutcome {
    pub holds: bool,
    pub equality: bool,
    pub condition_matches: bool,
}

pub fn check_lemma(inst: &LemmaInstance) -> Result<LemmaOutcome, ChenError> {
    let a = &inst.alphas;
    if a.len() < 2 {
        return Err(ChenError::ShapeError(format!("need at least 2 alphas, got {}", a.len())));
    }
    let n = a.len() as f64;
    let s: f64 = a.iter().sum();
    let s2: f64 = a.iter().map(|x| x * x).sum();
    let lhs = s * s;
    let rhs = (n - 1.0) * (s2 + inst.beta);
    let scale = 1f64.max(lhs.abs()).max((n - 1.0) * (s2 + inst.beta.abs()));
    if !((lhs - rhs).abs() <= 1e-9 * scale) {
        return Err(ChenError::HypothesisViolated { lhs, rhs });
    }
    let prod = 2.0 * a[0] * a[1];
    let sum12 = a[0] + a[1];
    Ok(LemmaOutcome {
        holds: prod >= inst.beta - 1e-10,
        equality: (prod - inst.beta).abs() <= 1e-9,
        condition_matches: a[2..].iter().all(|ai| (sum12 - ai).abs() <= 1e-9),
    })
}

// ---------------------------------------------------------------------------
// Rearrangement identities for D-minimal immersions

fn sq(x: f64) -> f64 {
    x * x
}

fn check_shape(h: &[Matrix]) -> Result<usize, ChenError> {
    let q = h.len();
    if q == 0 {
        return Err(ChenError::ShapeError("codimension must be at least 1".into()));
    }
    let n = h[0].rows();
    if n < 3 {
        return Err(ChenError::ShapeError(format!("need n >= 3, got {n}")));
    }
    for (r, m) in h.iter().enumerate() {
        if m.rows() != n || m.cols() != n {
            return Err(ChenError::ShapeError(format!("h[{r}] is not {n}x{n}")));
        }
        if m.asymmetry() != 0.0 {
            return Err(ChenError::ShapeError(format!("h[{r}] is not symmetric")));
        }
    }
    Ok(n)
}

fn off_diag(m: &Matrix, lo: usize, hi: usize) -> f64 {
    let mut s = 0.0;
    for i in lo..hi {
        for j in lo..hi {
            if i != j {
                s += sq(m[(i, j)]);
            }
        }
    }
    s
}

fn full(m: &Matrix, lo: usize, hi: usize) -> f64 {
    let mut s = 0.0;
    for i in lo..hi {
        for j in lo..hi {
            s += sq(m[(i, j)]);
        }
    }
    s
}

/// `Σ_r Σ_{j≥3} ((h^r_1j)² + (h^r_2j)²)`, shared by both identities.
fn plane_to_rest(h: &[Matrix], n: usize) -> f64 {
    h.iter()
        .map(|m| (2..n).map(|j| sq(m[(0, j)]) + sq(m[(1, j)])).sum::<f64>())
        .sum()
}

/// Residual of the first rearrangement identity: it separates the terms of
/// `‖h‖²` that touch the plane `e₁ ∧ e₂`. `h[r]` holds `h^r_ij`, `r = 0` being
/// the first normal direction; indices are zero-based.
pub fn lemma32_residual(h: &[Matrix]) -> Result<f64, ChenError> {
    let n = check_shape(h)?;
    let (first, rest) = (&h[0], &h[1..]);
    let lhs = 0.5 * off_diag(first, 0, n)
        + 0.5 * rest.iter().map(|m| full(m, 0, n)).sum::<f64>()
        + rest.iter().map(|m| m[(0, 0)] * m[(1, 1)]).sum::<f64>()
        - h.iter().map(|m| sq(m[(0, 1)])).sum::<f64>();
    let rhs = 0.5 * off_diag(first, 2, n)
        + 0.5 * rest.iter().map(|m| full(m, 2, n)).sum::<f64>()
        + 0.5 * rest.iter().map(|m| sq(m[(0, 0)] + m[(1, 1)])).sum::<f64>()
        + plane_to_rest(h, n);
    Ok((lhs - rhs).abs())
}

/// Residual of the second rearrangement identity, which splits the
/// remaining terms along the base block `0..n1` and the fiber block.
pub fn lemma33_residual(h: &[Matrix], n1: usize) -> Result<f64, ChenError> {
    let n = check_shape(h)?;
    if n1 < 3 || n1 >= n {
        return Err(ChenError::ShapeError(format!("need 3 <= n1 < n, got n1 = {n1}, n = {n}")));
    }
    let (first, rest) = (&h[0], &h[1..]);
    let lhs = 0.5 * off_diag(first, 2, n)
        + 0.5 * rest.iter().map(|m| full(m, 2, n)).sum::<f64>()
        + plane_to_rest(h, n);
    let mixed = |m: &Matrix| {
        let mut s = 0.0;
        for a in 0..n1 {
            for b in n1..n {
                s += sq(m[(a, b)]);
            }
        }
        s
    };
    let rhs = 0.5 * off_diag(first, 2, n1)
        + 0.5 * off_diag(first, n1, n)
        + 0.5 * rest.iter().map(|m| full(m, 2, n1)).sum::<f64>()
        + 0.5 * rest.iter().map(|m| full(m, n1, n)).sum::<f64>()
        + h.iter()
            .map(|m| (2..n1).map(|a| sq(m[(0, a)]) + sq(m[(1, a)])).sum::<f64>())
            .sum::<f64>()
        + h.iter().map(mixed).sum::<f64>();
    Ok((lhs - rhs).abs())
}

/// Both rearrangement residuals `(first, second)`.
pub fn rearrangement_identities(h: &[Matrix], n1: usize) -> Result<(f64, f64), ChenError> {
    Ok((lemma32_residual(h)?, lemma33_residual(h, n1)?))
}

// ---------------------------------------------------------------------------
// Mixed second fundamental form of a D-minimal immersion

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DMinimalCheck {
    /// `‖h(D₁, D₂)‖²`
    pub lhs: f64,
    /// `c·n₁n₂ − n₂Δf/f`
    pub rhs: f64,
    pub residual: f64,
}

pub fn dminimal_identity(point: &PointData, lap_ratio: f64, ambient: &SpaceForm) -> Result<DMinimalCheck, ChenError> {
    let (n, n1) = (point.n(), point.n1);
    for (r, m) in point.h.iter().enumerate() {
        let t1: f64 = (0..n1).map(|a| m[(a, a)]).sum();
        let t2: f64 = (n1..n).map(|a| m[(a, a)]).sum();
        if t1.abs().max(t2.abs()) > D_MINIMAL_TOL {
            return Err(ChenError::PreconditionError(format!(
                "immersion is not D-minimal: normal {r} has block traces {t1:e}, {t2:e}"
            )));
        }
    }
    let lhs: f64 = point
        .h
        .iter()
        .map(|m| (0..n1).flat_map(|a| (n1..n).map(move |b| (a, b))).map(|(a, b)| sq(m[(a, b)])).sum::<f64>())
        .sum();
    let rhs = ambient.c * (n1 * point.n2()) as f64 - lap_ratio;
    Ok(DMinimalCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

// ---------------------------------------------------------------------------
// Equality classifier

/// Shape operators restricted to a block match the equality-case normal form:
/// `A_{n+1}` is a free symmetric 2×2 corner plus `μ·I` with `μ = μ₁ + μ₂`,
/// and each other `A_r` is a trace-free corner with zeros elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternMatch {
    pub matches: bool,
    /// Largest deviation from the normal form.
    pub defect: f64,
    /// `(μ₁, μ₂, μ)` read from the diagonal of the corner.
    pub mu: (f64, f64, f64),
}

fn corner_pattern(h: &[Matrix], idx: &[usize], tol: f64) -> PatternMatch {
    if idx.len() < 2 || h.is_empty() {
        return PatternMatch {
            matches: idx.len() >= 2 || h.is_empty(),
            defect: 0.0,
            mu: (0.0, 0.0, 0.0),
        };
    }
    let a0 = &h[0];
    let (c0, c1) = (idx[0], idx[1]);
    let mu1 = a0[(c0, c0)];
    let mu2 = a0[(c1, c1)];
    let mu = mu1 + mu2;
    let mut defect: f64 = 0.0;
    for (r, m) in h.iter().enumerate() {
        for (p, &i) in idx.iter().enumerate() {
            for (s, &j) in idx.iter().enumerate() {
                let corner = p < 2 && s < 2;
                let expected = if corner {
                    if r == 0 {
                        m[(i, j)]
                    } else if p == s {
                        // trace-free corner: h11 = −h22
                        if p == 0 {
                            m[(i, j)]
                        } else {
                            -m[(c0, c0)]
                        }
                    } else {
                        m[(i, j)]
                    }
                } else if r == 0 && p == s {
                    mu
                } else {
                    0.0
                };
                defect = defect.max((m[(i, j)] - expected).abs());
            }
        }
    }
    PatternMatch {
        matches: defect <= tol,
        defect,
        mu: (mu1, mu2, mu),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqualityDiagnostics {
    pub tolerance: f64,
    pub mixed_tg: bool,
    /// `max |h^r_{aA}|`
    pub mixed_max: f64,
    pub d1_minimal: bool,
    pub d1_trace_max: f64,
    pub d2_minimal: bool,
    pub d2_trace_max: f64,
    pub minimal: bool,
    pub pattern_i: bool,
    pub pattern_ii: bool,
    pub mu_decomposition: Option<(f64, f64, f64)>,
}

/// Classifies the shape operators in the current tangent frame. The
/// patterns use the first two vectors of the base (resp. fiber) block as the
/// distinguished plane.
pub fn classify_equality(point: &PointData, n1: usize) -> EqualityDiagnostics {
    classify_with_tol(point, n1, CLASSIFIER_REL_TOL)
}

pub fn classify_with_tol(point: &PointData, n1: usize, rel_tol: f64) -> EqualityDiagnostics {
    let n = point.n();
    let tol = rel_tol * (1.0 + point.h2.sqrt());
    let mut mixed_max: f64 = 0.0;
    let mut d1: f64 = 0.0;
    let mut d2: f64 = 0.0;
    let mut full_trace: f64 = 0.0;
    for m in &point.h {
        for a in 0..n1 {
            for b in n1..n {
                mixed_max = mixed_max.max(m[(a, b)].abs());
            }
        }
        let t1: f64 = (0..n1).map(|a| m[(a, a)]).sum();
        let t2: f64 = (n1..n).map(|a| m[(a, a)]).sum();
        d1 = d1.max(t1.abs());
        d2 = d2.max(t2.abs());
        full_trace = full_trace.max((t1 + t2).abs());
    }
    let base: Vec<usize> = (0..n1).collect();
    let fiber: Vec<usize> = (n1..n).collect();
    let pi = corner_pattern(&point.h, &base, tol);
    let pii = corner_pattern(&point.h, &fiber, tol);
    let mu_decomposition = if pi.matches && base.len() >= 2 {
        Some(pi.mu)
    } else if pii.matches && fiber.len() >= 2 {
        Some(pii.mu)
    } else {
        None
    };
    EqualityDiagnostics {
        tolerance: tol,
        mixed_tg: mixed_max <= tol,
        mixed_max,
        d1_minimal: d1 <= tol,
        d1_trace_max: d1,
        d2_minimal: d2 <= tol,
        d2_trace_max: d2,
        minimal: full_trace <= tol,
        pattern_i: pi.matches,
        pattern_ii: pii.matches,
        mu_decomposition,
    }
}

/// Orthogonal change of tangent frame whose columns `idx[0], idx[1]` are
/// the plane `(x, y)`; the rest of the `idx` block is completed and all
/// other frame vectors are left alone.
fn aligning_rotation(n: usize, idx: &[usize], x: &[f64], y: &[f64]) -> Matrix {
    let mut rot = Matrix::identity(n);
    let mut cols: Vec<Vec<f64>> = vec![x.to_vec(), y.to_vec()];
    for &k in idx {
        if cols.len() == idx.len() {
            break;
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for _pass in 0..2 {
            for c in &cols {
                let p: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(vi, ci)| *vi -= p * ci);
            }
        }
        let nrm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            v.iter_mut().for_each(|t| *t /= nrm);
            cols.push(v);
        }
    }
    for (slot, &k) in idx.iter().enumerate() {
        rot.set_col(k, &cols[slot]);
    }
    rot
}

// ---------------------------------------------------------------------------
// Inequalities

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    Classical13,
    Warped41i,
    Warped41ii,
}

impl Theorem {
    pub fn key(self) -> &'static str {
        match self {
            Theorem::Classical13 => "chen13",
            Theorem::Warped41i => "chen41i",
            Theorem::Warped41ii => "chen41ii",
        }
    }
}

/// The same numbers rearranged as an upper bound on `δ = τ − inf K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaForm {
    pub delta: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub theorem: Theorem,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub point: Vec<f64>,
    pub equality_within: f64,
    pub equality: bool,
    pub method: Method,
    pub pattern: PatternMatch,
    pub classifier: Option<EqualityDiagnostics>,
    pub delta_form: Option<DeltaForm>,
    /// On equality: whether the immersion is mixed totally geodesic, D₁-
    /// and D₂-minimal and minimal. `None` when equality was not detected.
    pub corollary_holds: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityOptions {
    pub equality_within: f64,
    pub classifier_rel_tol: f64,
    pub search: PlaneSearch,
}

impl Default for InequalityOptions {
    fn default() -> Self {
        InequalityOptions {
            equality_within: EQUALITY_WITHIN,
            classifier_rel_tol: CLASSIFIER_REL_TOL,
            search: PlaneSearch::default(),
        }
    }
}

pub fn chen_classical(point: &PointData, r: &CurvatureTensor, ambient: &SpaceForm) -> Result<InequalityReport, ChenError> {
    chen_classical_with(point, r, ambient, &InequalityOptions::default())
}

/// `inf K ≥ ½(τ − n²(n−2)/(n−1)·‖H‖² − (n+1)(n−2)c)` at one point.
pub fn chen_classical_with(
    point: &PointData,
    r: &CurvatureTensor,
    ambient: &SpaceForm,
    opts: &InequalityOptions,
) -> Result<InequalityReport, ChenError> {
    let n = point.n();
    if n < 2 {
        return Err(ChenError::CaseDimensionError(format!("need n >= 2, got {n}")));
    }
    let d = delta_invariant_with(r, &SubspaceSel::All, &opts.search)?;
    let nf = n as f64;
    let c = ambient.c;
    let h2 = point.mean_h2;
    let lhs = d.inf_k;
    let rhs = 0.5 * (d.tau - nf * nf * (nf - 2.0) / (nf - 1.0) * h2 - (nf + 1.0) * (nf - 2.0) * c);
    let slack = lhs - rhs;
    let bound = nf * nf * (nf - 2.0) / (2.0 * (nf - 1.0)) * h2 + 0.5 * (nf + 1.0) * (nf - 2.0) * c;
    let delta_form = DeltaForm {
        delta: d.delta,
        bound,
        slack: bound - d.delta,
    };
    let all: Vec<usize> = (0..n).collect();
    let aligned = point.rotate_tangent(&aligning_rotation(n, &all, &d.plane.0, &d.plane.1));
    let tol = opts.classifier_rel_tol * (1.0 + point.h2.sqrt());
    let pattern = corner_pattern(&aligned.h, &all, tol);
    let equality = slack.abs() <= opts.equality_within;
    Ok(InequalityReport {
        theorem: Theorem::Classical13,
        lhs,
        rhs,
        slack,
        point: point.u.clone(),
        equality_within: opts.equality_within,
        equality,
        method: d.method,
        pattern,
        classifier: Some(classify_with_tol(point, point.n1, opts.classifier_rel_tol)),
        delta_form: Some(delta_form),
        corollary_holds: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WarpedCase {
    I,
    Ii,
}

pub fn chen_warped(
    point: &PointData,
    r: &CurvatureTensor,
    lap_ratio: f64,
    ambient: &SpaceForm,
    case: WarpedCase,
) -> Result<InequalityReport, ChenError> {
    chen_warped_with(point, r, lap_ratio, ambient, case, &InequalityOptions::default())
}

/// Upper bound on `δ_{N_i}` for a warped product in a space form:
/// `(n²/2)‖H‖² − n₂Δf/f + ½ nᵢ(nᵢ + 2nⱼ − 1)c − c`.
pub fn chen_warped_with(
    point: &PointData,
    r: &CurvatureTensor,
    lap_ratio: f64,
    ambient: &SpaceForm,
    case: WarpedCase,
    opts: &InequalityOptions,
) -> Result<InequalityReport, ChenError> {
    let (n, n1, n2) = (point.n(), point.n1, point.n2());
    let (sel, own, other, theorem) = match case {
        WarpedCase::I => {
            if n1 < 2 {
                return Err(ChenError::CaseDimensionError("case i requires n₁ ≥ 2".into()));
            }
            (SubspaceSel::Base, n1, n2, Theorem::Warped41i)
        }
        WarpedCase::Ii => {
            if n2 < 2 {
                return Err(ChenError::CaseDimensionError("case ii requires n₂ ≥ 2".into()));
            }
            (SubspaceSel::Fiber, n2, n1, Theorem::Warped41ii)
        }
    };
    let d: DeltaResult = delta_invariant_with(r, &sel, &opts.search)?;
    let nf = n as f64;
    let c = ambient.c;
    let (ni, nj) = (own as f64, other as f64);
    let rhs = 0.5 * nf * nf * point.mean_h2 - lap_ratio + 0.5 * ni * (ni + 2.0 * nj - 1.0) * c - c;
    let lhs = d.delta;
    let slack = rhs - lhs;
    let idx = sel.indices(n, n1)?;
    let aligned = point.rotate_tangent(&aligning_rotation(n, &idx, &d.plane.0, &d.plane.1));
    let diag = classify_with_tol(&aligned, n1, opts.classifier_rel_tol);
    let pattern = corner_pattern(&aligned.h, &idx, diag.tolerance);
    let equality = slack.abs() <= opts.equality_within;
    let corollary_holds = equality.then_some(diag.mixed_tg && diag.d1_minimal && diag.d2_minimal && diag.minimal);
    Ok(InequalityReport {
        theorem,
        lhs,
        rhs,
        slack,
        point: point.u.clone(),
        equality_within: opts.equality_within,
        equality,
        method: d.method,
        pattern,
        classifier: Some(diag),
        delta_form: None,
        corollary_holds,
    })
}
