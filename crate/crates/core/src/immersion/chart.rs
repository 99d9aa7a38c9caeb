use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::point::first_fundamental_form;
use super::ImmersionError;
use crate::exprlang::{parse, Expr};
use crate::sampling::halton_box;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceFormKind {
    Euclidean,
    Sphere,
    Hyperbolic,
}

/// Real space form of constant sectional curvature `c` and dimension `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    pub kind: SpaceFormKind,
    pub c: f64,
    pub m: usize,
}

impl SpaceForm {
    pub fn new(kind: SpaceFormKind, c: f64, m: usize) -> Result<Self, ImmersionError> {
        let s = SpaceForm { kind, c, m };
        s.validate()?;
        Ok(s)
    }

    pub fn euclidean(m: usize) -> Self {
        SpaceForm {
            kind: SpaceFormKind::Euclidean,
            c: 0.0,
            m,
        }
    }

    pub fn sphere(c: f64, m: usize) -> Self {
        SpaceForm {
            kind: SpaceFormKind::Sphere,
            c,
            m,
        }
    }

    pub fn hyperbolic(c: f64, m: usize) -> Self {
        SpaceForm {
            kind: SpaceFormKind::Hyperbolic,
            c,
            m,
        }
    }

    pub fn validate(&self) -> Result<(), ImmersionError> {
        let ok = match self.kind {
            SpaceFormKind::Euclidean => self.c == 0.0,
            SpaceFormKind::Sphere => self.c > 0.0,
            SpaceFormKind::Hyperbolic => self.c < 0.0,
        };
        if !ok || !self.c.is_finite() {
            return Err(ImmersionError::Spec(format!(
                "{:?} ambient cannot have curvature {}",
                self.kind, self.c
            )));
        }
        if self.m < 2 {
            return Err(ImmersionError::Spec(format!("ambient dimension {} < 2", self.m)));
        }
        Ok(())
    }

    /// Number of coordinates of the flat model space.
    pub fn model_dim(&self) -> usize {
        match self.kind {
            SpaceFormKind::Euclidean => self.m,
            _ => self.m + 1,
        }
    }

    /// Diagonal of the model inner product.
    pub fn signature(&self) -> Vec<f64> {
        let mut s = vec![1.0; self.model_dim()];
        if self.kind == SpaceFormKind::Hyperbolic {
            s[0] = -1.0;
        }
        s
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = u[0] * v[0];
        if self.kind == SpaceFormKind::Hyperbolic {
            acc = -acc;
        }
        acc + u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Scalar curvature of a `k`-plane: `c·k(k−1)/2`.
    pub fn plane_tau(&self, k: usize) -> f64 {
        self.c * (k * k.saturating_sub(1)) as f64 / 2.0
    }
}

/// Interval endpoint: a number or a constant expression such as `"pi/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Value(f64),
    Expr(String),
}

impl Bound {
    pub fn resolve(&self) -> Result<f64, ImmersionError> {
        match self {
            Bound::Value(v) => Ok(*v),
            Bound::Expr(src) => {
                let e = parse(src)?;
                if !e.is_constant() {
                    return Err(ImmersionError::Spec(format!(
                        "domain bound '{src}' must be a constant expression"
                    )));
                }
                Ok(e.eval_at(&[], &[])?)
            }
        }
    }
}

impl From<f64> for Bound {
    fn from(v: f64) -> Self {
        Bound::Value(v)
    }
}

impl From<&str> for Bound {
    fn from(s: &str) -> Self {
        Bound::Expr(s.to_string())
    }
}

/// Structured description of a warped-product chart, as found in scene files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub base: Vec<String>,
    pub fiber: Vec<String>,
    pub warp: String,
    pub components: Vec<String>,
    pub ambient: SpaceForm,
    pub domain: BTreeMap<String, (Bound, Bound)>,
}

/// A validated parametric immersion `φ: N₁ ×_f N₂ → M̃(c)`.
#[derive(Debug, Clone)]
pub struct WarpedChart {
    pub n1: usize,
    pub n2: usize,
    /// Base coordinates followed by fiber coordinates.
    pub coords: Vec<String>,
    pub warp: Expr,
    pub components: Vec<Expr>,
    pub ambient: SpaceForm,
    /// Open interval per coordinate, in `coords` order.
    pub domain: Vec<(f64, f64)>,
    pub spec: ChartSpec,
}

const VALIDATION_POINTS: usize = 16;
const VALIDATION_MARGIN: f64 = 0.02;
const BLOCK_TOL: f64 = 1e-8;

impl WarpedChart {
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn m(&self) -> usize {
        self.ambient.m
    }

    pub fn base_coords(&self) -> &[String] {
        &self.coords[..self.n1]
    }

    pub fn fiber_coords(&self) -> &[String] {
        &self.coords[self.n1..]
    }

    pub fn center(&self) -> Vec<f64> {
        self.domain.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub fn warp_at(&self, u: &[f64]) -> Result<f64, ImmersionError> {
        Ok(self.warp.eval_at(&self.coords, u)?)
    }

    pub fn position(&self, u: &[f64]) -> Result<Vec<f64>, ImmersionError> {
        self.components
            .iter()
            .map(|c| c.eval_at(&self.coords, u).map_err(ImmersionError::from))
            .collect()
    }

    /// Errors unless every coordinate lies strictly inside its interval.
    pub fn check_domain(&self, u: &[f64]) -> Result<(), ImmersionError> {
        if u.len() != self.n() {
            return Err(ImmersionError::Spec(format!(
                "point has {} coordinates, chart has {}",
                u.len(),
                self.n()
            )));
        }
        for ((name, &(lo, hi)), &x) in self.coords.iter().zip(&self.domain).zip(u) {
            if !(x > lo && x < hi) {
                return Err(ImmersionError::OutsideDomain {
                    coord: name.clone(),
                    value: x,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ImmersionError> {
        let n1 = self.n1;
        let n = self.n();
        let center = self.center();
        let f_center = self.warp_at(&center)?;
        let fail = |invariant: String, u: &[f64]| ImmersionError::Validation {
            invariant,
            witness: u.to_vec(),
        };
        let close = |a: f64, b: f64| (a - b).abs() <= BLOCK_TOL * (1.0 + a.abs().max(b.abs()));

        for u in halton_box(VALIDATION_POINTS, &self.domain, VALIDATION_MARGIN) {
            let f = self.warp_at(&u)?;
            if !(f > 0.0) {
                return Err(fail(format!("warping function must be positive (f = {f})"), &u));
            }
            if self.ambient.kind != super::SpaceFormKind::Euclidean {
                let x = self.position(&u)?;
                let want = 1.0 / self.ambient.c;
                let got = self.ambient.inner(&x, &x);
                if (got - want).abs() > BLOCK_TOL * (1.0 + want.abs()) {
                    return Err(fail(
                        format!("immersion leaves the model hypersurface (<φ,φ> = {got}, expected {want})"),
                        &u,
                    ));
                }
            }
            let g = first_fundamental_form(self, &u)?;
            for a in 0..n1 {
                for b in n1..n {
                    if g[(a, b)].abs() > BLOCK_TOL * (1.0 + g[(a, a)].abs().max(g[(b, b)].abs())) {
                        return Err(fail(
                            format!(
                                "block mismatch: mixed metric entry g[{a}][{b}] = {:e} is not zero",
                                g[(a, b)]
                            ),
                            &u,
                        ));
                    }
                }
            }
            // base block must not depend on fiber coordinates
            let mut v = center.clone();
            v[..n1].copy_from_slice(&u[..n1]);
            let g_base_ref = first_fundamental_form(self, &v)?;
            for a in 0..n1 {
                for b in 0..n1 {
                    if !close(g[(a, b)], g_base_ref[(a, b)]) {
                        return Err(fail(
                            format!("block mismatch: base metric g[{a}][{b}] depends on fiber coordinates"),
                            &u,
                        ));
                    }
                }
            }
            // fiber block must equal f² times a metric of the fiber alone
            let mut w = center.clone();
            w[n1..].copy_from_slice(&u[n1..]);
            let g_fiber_ref = first_fundamental_form(self, &w)?;
            for i in n1..n {
                for j in n1..n {
                    let lhs = g[(i, j)] * f_center * f_center;
                    let rhs = g_fiber_ref[(i, j)] * f * f;
                    if !close(lhs, rhs) {
                        return Err(fail(
                            format!(
                                "block mismatch: fiber metric g[{i}][{j}] is not f^2 times a fiber-only metric"
                            ),
                            &u,
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses, checks and numerically validates a chart description.
pub fn build_chart(spec: &ChartSpec) -> Result<WarpedChart, ImmersionError> {
    spec.ambient.validate()?;
    let n1 = spec.base.len();
    let n2 = spec.fiber.len();
    if n1 == 0 || n2 == 0 {
        return Err(ImmersionError::Spec("base and fiber need at least one coordinate each".into()));
    }
    let coords: Vec<String> = spec.base.iter().chain(&spec.fiber).cloned().collect();
    let unique: BTreeSet<&String> = coords.iter().collect();
    if unique.len() != coords.len() {
        return Err(ImmersionError::Spec("coordinate names must be distinct".into()));
    }
    if coords.iter().any(|c| c == "pi") {
        return Err(ImmersionError::Spec("'pi' is reserved and cannot name a coordinate".into()));
    }
    let n = n1 + n2;
    if spec.ambient.m <= n {
        return Err(ImmersionError::Spec(format!(
            "ambient dimension {} must exceed submanifold dimension {n}",
            spec.ambient.m
        )));
    }
    let want = spec.ambient.model_dim();
    if spec.components.len() != want {
        return Err(ImmersionError::Spec(format!(
            "{:?} ambient of dimension {} needs {want} components, got {}",
            spec.ambient.kind,
            spec.ambient.m,
            spec.components.len()
        )));
    }

    let warp = parse(&spec.warp)?;
    let base: BTreeSet<String> = spec.base.iter().cloned().collect();
    if let Some(v) = warp.variables().into_iter().find(|v| !base.contains(v)) {
        return Err(ImmersionError::Spec(format!(
            "warping function may only depend on base coordinates, found '{v}'"
        )));
    }
    let all: BTreeSet<String> = coords.iter().cloned().collect();
    let components = spec
        .components
        .iter()
        .map(|src| {
            let e = parse(src)?;
            if let Some(v) = e.variables().into_iter().find(|v| !all.contains(v)) {
                return Err(ImmersionError::Spec(format!("component '{src}' uses unknown coordinate '{v}'")));
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>, ImmersionError>>()?;

    let mut domain = Vec::with_capacity(n);
    for name in &coords {
        let (lo, hi) = spec
            .domain
            .get(name)
            .ok_or_else(|| ImmersionError::Spec(format!("no domain interval for '{name}'")))?;
        let (lo, hi) = (lo.resolve()?, hi.resolve()?);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ImmersionError::Spec(format!("empty or infinite interval for '{name}'")));
        }
        domain.push((lo, hi));
    }
    if let Some(extra) = spec.domain.keys().find(|k| !all.contains(*k)) {
        return Err(ImmersionError::Spec(format!("domain given for unknown coordinate '{extra}'")));
    }

    let chart = WarpedChart {
        n1,
        n2,
        coords,
        warp,
        components,
        ambient: spec.ambient,
        domain,
        spec: spec.clone(),
    };
    chart.validate()?;
    Ok(chart)
}
