use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use chenwarp_core::chen::{
    chen_classical_with, chen_warped_with, classify_with_tol, dminimal_identity, EqualityDiagnostics,
    InequalityOptions, InequalityReport, WarpedCase,
};
use chenwarp_core::immersion::{second_fundamental_form, WarpedChart};
use chenwarp_core::invariants::{
    curvature_gauss, curvature_intrinsic, delta_invariant_with, mixed_sectional_sum, scalar_tau, theta_k_with,
    warp_laplacian, Method, PlaneSearch, SubspaceSel,
};

use crate::scene::{prepare, Check, PreparedScene, Scene};
use crate::CliError;

/// Pass/fail thresholds. Keys match the `[tolerances]` table of a scene and
/// the `--tol key=value` flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Max component gap between intrinsic and Gauss curvature.
    pub gauss: f64,
    /// Mixed-curvature identity residual.
    pub eq24: f64,
    /// `2τ − 2τ̃ − n²‖H‖² + ‖h‖²`.
    pub trace: f64,
    pub lemma31: f64,
    /// Most negative inequality slack still accepted.
    pub slack: f64,
    pub equality: f64,
    pub classifier: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gauss: 1e-7,
            eq24: 1e-7,
            trace: 1e-8,
            lemma31: 1e-8,
            slack: 1e-6,
            equality: 1e-7,
            classifier: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(CliError::Tolerance(format!("{key}={value}")));
        }
        let slot = match key {
            "gauss" => &mut self.gauss,
            "eq24" => &mut self.eq24,
            "trace" => &mut self.trace,
            "lemma31" => &mut self.lemma31,
            "slack" => &mut self.slack,
            "equality" => &mut self.equality,
            "classifier" => &mut self.classifier,
            _ => return Err(CliError::Tolerance(format!("unknown key '{key}'"))),
        };
        *slot = value;
        Ok(())
    }

    pub fn parse_override(&mut self, kv: &str) -> Result<(), CliError> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Tolerance(format!("expected key=value, got '{kv}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Tolerance(format!("'{v}' is not a number")))?;
        self.set(k.trim(), v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussCheck {
    pub max_difference: f64,
    pub symmetry_defect: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Eq24Check {
    pub mixed_sum: f64,
    pub lap_ratio: f64,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma31Check {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    #[serde(flatten)]
    pub report: InequalityReport,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaValue {
    pub k: usize,
    pub theta: f64,
    pub method: Method,
}

/// Everything computed at one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub u: Vec<f64>,
    pub f: f64,
    pub mean_h2: f64,
    pub h2: f64,
    pub tau: f64,
    pub tau_base: f64,
    pub tau_fiber: f64,
    pub delta: f64,
    pub inf_k: f64,
    pub delta_method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_base: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_fiber: Option<f64>,
    pub lap_ratio: f64,
    pub trace_residual: f64,
    pub trace_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss: Option<GaussCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq24: Option<Eq24Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma31: Option<Lemma31Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chen13: Option<InequalityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chen41i: Option<InequalityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chen41ii: Option<InequalityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classify: Option<EqualityDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<ThetaValue>>,
}

impl PointRecord {
    /// Names of the checks that failed at this point.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.trace_passed {
            out.push("trace");
        }
        if matches!(&self.gauss, Some(c) if !c.passed) {
            out.push("gauss");
        }
        if matches!(&self.eq24, Some(c) if !c.passed) {
            out.push("eq24");
        }
        if matches!(&self.lemma31, Some(c) if !c.passed) {
            out.push("lemma31");
        }
        for (key, c) in [("chen13", &self.chen13), ("chen41i", &self.chen41i), ("chen41ii", &self.chen41ii)] {
            if matches!(c, Some(c) if !c.passed) {
                out.push(key);
            }
        }
        out
    }

    fn inequalities(&self) -> impl Iterator<Item = (&'static str, &InequalityCheck)> {
        [("chen13", &self.chen13), ("chen41i", &self.chen41i), ("chen41ii", &self.chen41ii)]
            .into_iter()
            .filter_map(|(k, c)| c.as_ref().map(|c| (k, c)))
    }

    fn residuals(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("trace", self.trace_residual)];
        if let Some(g) = &self.gauss {
            out.push(("gauss", g.max_difference));
        }
        if let Some(e) = &self.eq24 {
            out.push(("eq24", e.residual));
        }
        if let Some(r) = self.lemma31.as_ref().and_then(|l| l.residual) {
            out.push(("lemma31", r));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub points: usize,
    pub min_slack: BTreeMap<String, f64>,
    pub max_residual: BTreeMap<String, f64>,
    pub equality_hits: BTreeMap<String, usize>,
    /// `"<check>@<point index>"` for every failed check.
    pub failed: Vec<String>,
}

impl Summary {
    pub fn aggregate(records: &[PointRecord]) -> Summary {
        let mut s = Summary {
            points: records.len(),
            ..Summary::default()
        };
        for (i, rec) in records.iter().enumerate() {
            for (key, c) in rec.inequalities() {
                let e = s.min_slack.entry(key.to_string()).or_insert(f64::INFINITY);
                *e = e.min(c.report.slack);
                let hits = s.equality_hits.entry(key.to_string()).or_insert(0);
                *hits += c.report.equality as usize;
            }
            for (key, r) in rec.residuals() {
                let e = s.max_residual.entry(key.to_string()).or_insert(0.0);
                *e = e.max(r);
            }
            for key in rec.failures() {
                s.failed.push(format!("{key}@{i}"));
            }
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub seed: u64,
    pub scene: Scene,
    pub tolerances: Tolerances,
    pub points: Vec<PointRecord>,
    pub summary: Summary,
    pub status: i32,
}

/// Options shared by `analyze` and `scan`.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tolerance_overrides: Vec<String>,
    pub seed: Option<u64>,
}

pub struct Context {
    pub prepared: PreparedScene,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Context {
    pub fn new(scene: &Scene, opts: &RunOptions) -> Result<Context, CliError> {
        let prepared = prepare(scene)?;
        let mut tolerances = Tolerances::default();
        for (k, v) in &scene.tolerances {
            tolerances.set(k, *v)?;
        }
        for kv in &opts.tolerance_overrides {
            tolerances.parse_override(kv)?;
        }
        let seed = opts.seed.unwrap_or_else(|| scene.effective_seed());
        Ok(Context {
            prepared,
            tolerances,
            seed,
        })
    }

    fn search(&self) -> PlaneSearch {
        PlaneSearch {
            seed: self.seed,
            ..PlaneSearch::default()
        }
    }

    pub fn analyze_points(&self, points: &[Vec<f64>]) -> Result<Vec<PointRecord>, CliError> {
        points
            .par_iter()
            .map(|u| analyze_point(&self.prepared.chart, u, &self.prepared.checks, &self.tolerances, &self.search()))
            .collect()
    }
}

fn point_error(u: &[f64], e: impl std::fmt::Display) -> CliError {
    CliError::Point {
        at: u.to_vec(),
        message: e.to_string(),
    }
}

pub fn analyze_point(
    chart: &WarpedChart,
    u: &[f64],
    checks: &[Check],
    tol: &Tolerances,
    search: &PlaneSearch,
) -> Result<PointRecord, CliError> {
    let wants = |c: Check| checks.contains(&c);
    let err = |e: &dyn std::fmt::Display| point_error(u, e);
    let p = second_fundamental_form(chart, u).map_err(|e| err(&e))?;
    let r = curvature_intrinsic(chart, u).map_err(|e| err(&e))?;
    let w = warp_laplacian(chart, u).map_err(|e| err(&e))?;
    let n = chart.n();
    let tau = scalar_tau(&r, &SubspaceSel::All).map_err(|e| err(&e))?;
    let tau_base = scalar_tau(&r, &SubspaceSel::Base).map_err(|e| err(&e))?;
    let tau_fiber = scalar_tau(&r, &SubspaceSel::Fiber).map_err(|e| err(&e))?;
    let d = delta_invariant_with(&r, &SubspaceSel::All, search).map_err(|e| err(&e))?;
    let sub_delta = |sel: SubspaceSel, size: usize| -> Result<Option<f64>, CliError> {
        if size < 2 {
            return Ok(None);
        }
        Ok(Some(delta_invariant_with(&r, &sel, search).map_err(|e| err(&e))?.delta))
    };
    let delta_base = sub_delta(SubspaceSel::Base, chart.n1)?;
    let delta_fiber = sub_delta(SubspaceSel::Fiber, chart.n2)?;
    let trace_residual =
        (2.0 * tau - 2.0 * chart.ambient.plane_tau(n) - (n * n) as f64 * p.mean_h2 + p.h2).abs();

    let gauss = wants(Check::Gauss).then(|| {
        let rg = curvature_gauss(&p, &chart.ambient);
        let max_difference = r.max_abs_diff(&rg);
        GaussCheck {
            max_difference,
            symmetry_defect: r.symmetry_defect(),
            passed: max_difference <= tol.gauss,
        }
    });
    let eq24 = wants(Check::Eq24).then(|| Eq24Check {
        mixed_sum: mixed_sectional_sum(&r),
        lap_ratio: w.lap_ratio,
        residual: w.identity_residual,
        passed: w.identity_residual <= tol.eq24,
    });
    let lemma31 = wants(Check::Lemma31).then(|| match dminimal_identity(&p, w.lap_ratio, &chart.ambient) {
        Ok(c) => Lemma31Check {
            lhs: Some(c.lhs),
            rhs: Some(c.rhs),
            residual: Some(c.residual),
            error: None,
            passed: c.residual <= tol.lemma31,
        },
        Err(e) => Lemma31Check {
            lhs: None,
            rhs: None,
            residual: None,
            error: Some(e.to_string()),
            passed: false,
        },
    });
    let opts = InequalityOptions {
        equality_within: tol.equality,
        classifier_rel_tol: tol.classifier,
        search: *search,
    };
    let judge = |report: InequalityReport| {
        let corollary_ok = report.corollary_holds.unwrap_or(true);
        InequalityCheck {
            passed: report.slack >= -tol.slack && corollary_ok,
            report,
        }
    };
    let chen13 = if wants(Check::Chen13) {
        Some(judge(chen_classical_with(&p, &r, &chart.ambient, &opts).map_err(|e| err(&e))?))
    } else {
        None
    };
    let warped = |case: WarpedCase| -> Result<InequalityCheck, CliError> {
        Ok(judge(
            chen_warped_with(&p, &r, w.lap_ratio, &chart.ambient, case, &opts).map_err(|e| err(&e))?,
        ))
    };
    let chen41i = if wants(Check::Chen41i) { Some(warped(WarpedCase::I)?) } else { None };
    let chen41ii = if wants(Check::Chen41ii) { Some(warped(WarpedCase::Ii)?) } else { None };
    let classify = wants(Check::Classify).then(|| classify_with_tol(&p, chart.n1, tol.classifier));
    let theta = if wants(Check::Theta) {
        let mut v = Vec::new();
        for k in 2..=n {
            let t = theta_k_with(&r, k, search).map_err(|e| err(&e))?;
            v.push(ThetaValue {
                k,
                theta: t.theta,
                method: t.method,
            });
        }
        Some(v)
    } else {
        None
    };
    Ok(PointRecord {
        u: u.to_vec(),
        f: w.f,
        mean_h2: p.mean_h2,
        h2: p.h2,
        tau,
        tau_base,
        tau_fiber,
        delta: d.delta,
        inf_k: d.inf_k,
        delta_method: d.method,
        delta_base,
        delta_fiber,
        lap_ratio: w.lap_ratio,
        trace_residual,
        trace_passed: trace_residual <= tol.trace,
        gauss,
        eq24,
        lemma31,
        chen13,
        chen41i,
        chen41ii,
        classify,
        theta,
    })
}

/// Analyses every point of a scene. Input problems are returned as errors;
/// failed checks are reported through `Report::status`.
pub fn run_analyze(scene: &Scene, opts: &RunOptions) -> Result<Report, CliError> {
    let ctx = Context::new(scene, opts)?;
    let points = ctx.analyze_points(&ctx.prepared.points())?;
    let summary = Summary::aggregate(&points);
    let status = if summary.failed.is_empty() { 0 } else { 2 };
    Ok(Report {
        version: env!("CARGO_PKG_VERSION"),
        seed: ctx.seed,
        scene: scene.clone(),
        tolerances: ctx.tolerances,
        points,
        summary,
        status,
    })
}
