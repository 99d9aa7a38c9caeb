use serde::Serialize;

use super::{curvature_intrinsic, mixed_sectional_sum, InvariantError};
use crate::exprlang::{Bindings, HyperDual};
use crate::geomcore::Matrix;
use crate::immersion::{metric_jet, ImmersionError, WarpedChart};

/// Laplacian of the warping function and the mixed-curvature identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WarpLaplacian {
    pub f: f64,
    /// `Δf` with `Δ = −div grad` on the base.
    pub laplacian: f64,
    /// `n₂·Δf/f`.
    pub lap_ratio: f64,
    /// `Σ_a Σ_A K(e_a ∧ e_A)` from the intrinsic curvature.
    pub mixed_sum: f64,
    pub identity_residual: f64,
}

pub fn warp_laplacian(chart: &WarpedChart, u: &[f64]) -> Result<WarpLaplacian, InvariantError> {
    let n1 = chart.n1;
    let jet = metric_jet(chart, u)?;
    let base: Vec<usize> = (0..n1).collect();
    let g1 = jet.g.submatrix(&base, &base);
    let g1inv = g1.spd_inverse().map_err(ImmersionError::from)?;

    let env = Bindings::seeded(&chart.coords, u);
    let fj: HyperDual = chart.warp.eval(&env).map_err(ImmersionError::from)?;
    let f = fj.value;
    if !(f > 0.0) {
        return Err(ImmersionError::Validation {
            invariant: "warping function positive".into(),
            witness: u.to_vec(),
        }
        .into());
    }

    // Γ^c_ab of g₁; the base block only depends on base coordinates.
    let gamma = |c: usize, a: usize, b: usize| -> f64 {
        (0..n1)
            .map(|d| {
                g1inv[(c, d)] * 0.5 * (jet.dg[a][(b, d)] + jet.dg[b][(a, d)] - jet.dg[d][(a, b)])
            })
            .sum()
    };
    let hess = Matrix::from_fn(n1, n1, |a, b| {
        fj.hess_at(a, b) - (0..n1).map(|c| gamma(c, a, b) * fj.grad[c]).sum::<f64>()
    });
    let div_grad: f64 = (0..n1)
        .flat_map(|a| (0..n1).map(move |b| (a, b)))
        .map(|(a, b)| g1inv[(a, b)] * hess[(a, b)])
        .sum();
    let laplacian = -div_grad;
    let lap_ratio = chart.n2 as f64 * laplacian / f;

    let r = curvature_intrinsic(chart, u)?;
    let mixed_sum = mixed_sectional_sum(&r);
    Ok(WarpLaplacian {
        f,
        laplacian,
        lap_ratio,
        mixed_sum,
        identity_residual: (mixed_sum - lap_ratio).abs(),
    })
}
