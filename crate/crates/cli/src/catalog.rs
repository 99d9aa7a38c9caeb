//! Built-in scenes with known closed-form invariants. Each entry's
//! description states the values it is expected to reproduce.

use crate::scene::Scene;
use crate::CliError;

const ENTRIES: [(&str, &str); 8] = [
    ("plane_product", include_str!("../catalog/plane_product.toml")),
    ("flat_torus_r4", include_str!("../catalog/flat_torus_r4.toml")),
    ("clifford_s3", include_str!("../catalog/clifford_s3.toml")),
    ("s2_revolution", include_str!("../catalog/s2_revolution.toml")),
    ("s3_warped", include_str!("../catalog/s3_warped.toml")),
    ("great_sphere_s4", include_str!("../catalog/great_sphere_s4.toml")),
    ("hyperbolic_warp", include_str!("../catalog/hyperbolic_warp.toml")),
    ("cylinder", include_str!("../catalog/cylinder.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(n, _)| *n)
}

/// The TOML text of a catalog entry.
pub fn source(name: &str) -> Result<&'static str, CliError> {
    ENTRIES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
        .ok_or_else(|| CliError::UnknownCatalogEntry(name.to_string()))
}

pub fn scene(name: &str) -> Result<Scene, CliError> {
    Scene::from_toml(source(name)?)
}
