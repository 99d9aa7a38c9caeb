use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use chenwarp_core::immersion::{build_chart, Bound, ChartSpec, WarpedChart};
use chenwarp_core::sampling::DEFAULT_SEED;

use crate::{catalog, CliError};

/// A named analysis the scene asks for at every point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// Intrinsic curvature against the Gauss equation.
    Gauss,
    /// Mixed sectional curvature against `n₂Δf/f`.
    Eq24,
    /// Mixed second fundamental form of a D-minimal immersion.
    Lemma31,
    Chen13,
    Chen41i,
    Chen41ii,
    Classify,
    Theta,
}

impl Check {
    pub fn key(self) -> &'static str {
        match self {
            Check::Gauss => "gauss",
            Check::Eq24 => "eq24",
            Check::Lemma31 => "lemma31",
            Check::Chen13 => "chen13",
            Check::Chen41i => "chen41i",
            Check::Chen41ii => "chen41ii",
            Check::Classify => "classify",
            Check::Theta => "theta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Points per coordinate, in chart coordinate order.
    pub counts: Vec<usize>,
    /// Fraction of each interval kept clear at both ends.
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    0.05
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub explicit: Vec<Vec<Bound>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub chart: ChartSpec,
    #[serde(default)]
    pub points: PointsSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl Scene {
    pub fn from_toml(src: &str) -> Result<Scene, CliError> {
        toml::from_str(src).map_err(|e| CliError::SceneParse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scene serializes")
    }

    /// Reads a scene file, or falls back to the catalog when `arg` is not an
    /// existing path.
    pub fn load(arg: &str) -> Result<Scene, CliError> {
        let path = Path::new(arg);
        if path.exists() {
            let src = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: arg.to_string(),
                source,
            })?;
            Scene::from_toml(&src)
        } else {
            catalog::scene(arg)
        }
    }

    pub fn effective_seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

/// A scene whose chart has been built and whose points are resolved.
#[derive(Debug, Clone)]
pub struct PreparedScene {
    pub scene: Scene,
    pub chart: WarpedChart,
    pub checks: Vec<Check>,
    pub explicit: Vec<Vec<f64>>,
    pub grid: Vec<Vec<f64>>,
}

impl PreparedScene {
    /// Explicit points first, then the grid in lexicographic order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.explicit.iter().chain(&self.grid).cloned().collect()
    }
}

/// Grid points in lexicographic order: the first coordinate varies slowest.
pub fn grid_points(grid: &GridSpec, domain: &[(f64, f64)]) -> Result<Vec<Vec<f64>>, CliError> {
    if grid.counts.len() != domain.len() {
        return Err(CliError::Scene(format!(
            "grid has {} counts but the chart has {} coordinates",
            grid.counts.len(),
            domain.len()
        )));
    }
    if grid.counts.iter().any(|&c| c == 0) {
        return Err(CliError::Scene("grid is empty".into()));
    }
    if !(0.0..0.5).contains(&grid.margin) || (grid.margin == 0.0 && grid.counts.iter().any(|&c| c > 1)) {
        return Err(CliError::Scene(format!(
            "grid margin {} must lie in (0, 0.5)",
            grid.margin
        )));
    }
    let axes: Vec<Vec<f64>> = grid
        .counts
        .iter()
        .zip(domain)
        .map(|(&count, &(lo, hi))| {
            let w = hi - lo;
            (0..count)
                .map(|k| {
                    let frac = if count == 1 {
                        0.5
                    } else {
                        grid.margin + (1.0 - 2.0 * grid.margin) * k as f64 / (count - 1) as f64
                    };
                    lo + w * frac
                })
                .collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

pub fn prepare(scene: &Scene) -> Result<PreparedScene, CliError> {
    let chart = build_chart(&scene.chart)?;
    let mut checks = scene.checks.clone();
    checks.sort();
    checks.dedup();
    if checks.is_empty() {
        return Err(CliError::Scene("no checks requested".into()));
    }
    for check in &checks {
        match check {
            Check::Chen41i if chart.n1 < 2 => {
                return Err(CliError::Scene("case i requires n₁ ≥ 2".into()));
            }
            Check::Chen41ii if chart.n2 < 2 => {
                return Err(CliError::Scene("case ii requires n₂ ≥ 2".into()));
            }
            _ => {}
        }
    }
    let n = chart.n();
    let mut explicit = Vec::new();
    for p in &scene.points.explicit {
        if p.len() != n {
            return Err(CliError::Scene(format!(
                "explicit point has {} coordinates, chart has {n}",
                p.len()
            )));
        }
        let u = p.iter().map(Bound::resolve).collect::<Result<Vec<_>, _>>()?;
        chart.check_domain(&u)?;
        explicit.push(u);
    }
    let grid = match &scene.points.grid {
        Some(g) => grid_points(g, &chart.domain)?,
        None => Vec::new(),
    };
    if explicit.is_empty() && grid.is_empty() {
        return Err(CliError::Scene("scene has no points".into()));
    }
    Ok(PreparedScene {
        scene: scene.clone(),
        chart,
        checks,
        explicit,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_lexicographic() {
        let g = GridSpec {
            counts: vec![2, 3],
            margin: 0.1,
        };
        let pts = grid_points(&g, &[(0.0, 1.0), (0.0, 10.0)]).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.1, 1.0]);
        assert_eq!(pts[1], vec![0.1, 5.0]);
        assert_eq!(pts[2], vec![0.1, 9.0]);
        assert_eq!(pts[3][0], 0.9);
    }

    #[test]
    fn single_count_takes_the_midpoint() {
        let g = GridSpec {
            counts: vec![1],
            margin: 0.05,
        };
        assert_eq!(grid_points(&g, &[(2.0, 4.0)]).unwrap(), vec![vec![3.0]]);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let g = GridSpec {
            counts: vec![0, 3],
            margin: 0.05,
        };
        assert!(grid_points(&g, &[(0.0, 1.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let src = catalog::source("cylinder").unwrap().replace("checks", "chekcs");
        assert!(matches!(Scene::from_toml(&src), Err(CliError::SceneParse(_))));
    }

    #[test]
    fn case_i_needs_two_base_coordinates() {
        let mut scene = catalog::scene("s3_warped").unwrap();
        scene.checks.push(Check::Chen41i);
        let err = prepare(&scene).unwrap_err();
        assert_eq!(err.to_string(), "invalid scene: case i requires n₁ ≥ 2");
        assert_eq!(err.status(), 1);
    }

    #[test]
    fn scene_round_trips_through_toml() {
        let scene = catalog::scene("great_sphere_s4").unwrap();
        assert_eq!(Scene::from_toml(&scene.to_toml()).unwrap(), scene);
    }
}
