#![allow(dead_code)]

use std::f64::consts::PI;

use chenwarp_core::immersion::{build_chart, ChartSpec, SpaceForm, WarpedChart};

pub fn spec(
    base: &[&str],
    fiber: &[&str],
    warp: &str,
    comps: &[&str],
    ambient: SpaceForm,
    domain: &[(&str, f64, f64)],
) -> ChartSpec {
    ChartSpec {
        base: base.iter().map(|s| s.to_string()).collect(),
        fiber: fiber.iter().map(|s| s.to_string()).collect(),
        warp: warp.into(),
        components: comps.iter().map(|s| s.to_string()).collect(),
        ambient,
        domain: domain
            .iter()
            .map(|(n, lo, hi)| (n.to_string(), ((*lo).into(), (*hi).into())))
            .collect(),
    }
}

pub const S3_COMPONENTS: [&str; 4] = [
    "sin(t)*sin(a)*cos(b)",
    "sin(t)*sin(a)*sin(b)",
    "sin(t)*cos(a)",
    "cos(t)",
];

pub fn s3_warped() -> WarpedChart {
    build_chart(&spec(
        &["t"],
        &["a", "b"],
        "sin(t)",
        &S3_COMPONENTS,
        SpaceForm::euclidean(4),
        &[("t", 0.0, PI), ("a", 0.0, PI), ("b", 0.0, 2.0 * PI)],
    ))
    .unwrap()
}

pub fn great_sphere() -> WarpedChart {
    let mut comps = S3_COMPONENTS.to_vec();
    comps.push("0");
    build_chart(&spec(
        &["t"],
        &["a", "b"],
        "sin(t)",
        &comps,
        SpaceForm::sphere(1.0, 4),
        &[("t", 0.0, PI), ("a", 0.0, PI), ("b", 0.0, 2.0 * PI)],
    ))
    .unwrap()
}

pub fn hyperbolic_warp() -> WarpedChart {
    build_chart(&spec(
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
    ))
    .unwrap()
}

/// Torus of revolution: non-constant Gauss curvature `cos t / (2 + cos t)`.
pub fn torus_of_revolution() -> WarpedChart {
    build_chart(&spec(
        &["t"],
        &["s"],
        "2 + cos(t)",
        &["(2 + cos(t))*cos(s)", "(2 + cos(t))*sin(s)", "sin(t)"],
        SpaceForm::euclidean(3),
        &[("t", 0.0, 2.0 * PI), ("s", 0.0, 2.0 * PI)],
    ))
    .unwrap()
}

/// Two-dimensional base, codimension one, non-constant curvature.
pub fn exp_tube() -> WarpedChart {
    build_chart(&spec(
        &["u", "v"],
        &["s"],
        "exp(u)",
        &["u", "v", "exp(u)*cos(s)", "exp(u)*sin(s)"],
        SpaceForm::euclidean(4),
        &[("u", -1.0, 1.0), ("v", -1.0, 1.0), ("s", 0.0, 2.0 * PI)],
    ))
    .unwrap()
}

/// Two-dimensional base in codimension two.
pub fn catenoid_strip() -> WarpedChart {
    build_chart(&spec(
        &["u", "v"],
        &["s"],
        "cosh(u)",
        &["u", "v", "cosh(u)*cos(s)", "cosh(u)*sin(s)", "v^2"],
        SpaceForm::euclidean(5),
        &[("u", -1.0, 1.0), ("v", -1.0, 1.0), ("s", 0.0, 2.0 * PI)],
    ))
    .unwrap()
}

/// Clifford torus in the unit three-sphere.
pub fn clifford_s3() -> WarpedChart {
    build_chart(&spec(
        &["t"],
        &["s"],
        "1/sqrt(2)",
        &["cos(t)/sqrt(2)", "sin(t)/sqrt(2)", "cos(s)/sqrt(2)", "sin(s)/sqrt(2)"],
        SpaceForm::sphere(1.0, 3),
        &[("t", 0.0, 2.0 * PI), ("s", 0.0, 2.0 * PI)],
    ))
    .unwrap()
}

/// Curve of revolution in a sphere of curvature 4, codimension two.
pub fn sphere_curvature_four() -> WarpedChart {
    build_chart(&spec(
        &["t"],
        &["s"],
        "sin(t)/4",
        &["sin(t)*cos(s)/4", "sin(t)*sin(s)/4", "cos(t)/4", "sqrt(3)/4", "0"],
        SpaceForm::sphere(4.0, 4),
        &[("t", 0.0, PI), ("s", 0.0, 2.0 * PI)],
    ))
    .unwrap()
}

pub fn all_charts() -> Vec<(&'static str, WarpedChart)> {
    vec![
        ("s3_warped", s3_warped()),
        ("great_sphere", great_sphere()),
        ("hyperbolic_warp", hyperbolic_warp()),
        ("torus_of_revolution", torus_of_revolution()),
        ("exp_tube", exp_tube()),
        ("catenoid_strip", catenoid_strip()),
        ("clifford_s3", clifford_s3()),
        ("sphere_curvature_four", sphere_curvature_four()),
    ]
}
