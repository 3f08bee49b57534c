//! Willmore energy, harmonicity of the complex structure and classical
//! cross-checks on surfaces in R⁴.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::CurveField;
use crate::grid::{diff, Axis, Chart};
use crate::quaternion::HMatrix;
use crate::surface::{curvature_at, first_derivatives, SurfaceMap};

/// Below this the Hopf field `A` is considered identically zero.
pub const ENERGY_EPS: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    /// Partition-weighted contributions of chart A and chart B.
    pub charts: [f64; 2],
    pub resolution: usize,
    /// Richardson estimate from a half-resolution run, when available.
    pub error_estimate: Option<f64>,
    /// `A` vanishes to quadrature accuracy.
    pub vanishing: bool,
}

/// `2⟨(A∧*A)(∂x, ∂y)⟩ = −2⟨A_x² + A_y²⟩` with `⟨B⟩ = ¼ tr_R B`.
pub fn energy_density(ax: &HMatrix, ay: &HMatrix) -> f64 {
    -2.0 * (&(ax * ax) + &(ay * ay)).quarter_real_trace()
}

/// `W = 2∫⟨A∧*A⟩` over the sphere.
pub fn willmore_energy(field: &CurveField) -> EnergyReport {
    let g = &field.grid;
    let charts = Chart::BOTH.map(|c| {
        // collected before summing so the result does not depend on thread scheduling
        let terms: Vec<f64> = (0..g.len())
            .into_par_iter()
            .filter(|&k| g.partition(k) > 0.0)
            .map(|k| {
                let (ax, ay) = field.hopf_a(c, k);
                g.weight(k) * energy_density(&ax, &ay)
            })
            .collect();
        terms.iter().sum::<f64>()
    });
    let energy = charts[0] + charts[1];
    EnergyReport { energy, charts, resolution: g.n, error_estimate: None, vanishing: energy.abs() < ENERGY_EPS }
}

/// Attach `|W_N − W_{N/2}| / (2^p − 1)` to the finer report.
pub fn richardson(fine: &mut EnergyReport, coarse: &EnergyReport, order: f64) {
    let ratio = fine.resolution as f64 / coarse.resolution as f64;
    fine.error_estimate = Some((fine.energy - coarse.energy).abs() / (ratio.powf(order) - 1.0));
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityReport {
    pub resolution: usize,
    /// `max ‖∂x A_x + ∂y A_y‖` over owned samples.
    pub max: f64,
    /// Partition-weighted L² norm over the sphere.
    pub l2: f64,
    /// `log₂` of the L² ratio against a coarser run, when available.
    pub order: Option<f64>,
}

/// Residual of `d*A = 0`, with `d*A(∂x, ∂y) = −(∂x A_x + ∂y A_y)`.
pub fn harmonicity(field: &CurveField) -> HarmonicityReport {
    let g = &field.grid;
    let st = 4 * field.m() * field.m();
    let mut max: f64 = 0.0;
    let mut l2 = 0.0;
    for c in Chart::BOTH {
        let (ax, ay) = field.hopf_a_grid(c);
        let dx = diff(g, &ax, st, Axis::X);
        let dy = diff(g, &ay, st, Axis::Y);
        for k in 0..g.len() {
            let r = k * st..(k + 1) * st;
            let v: f64 = dx[r.clone()].iter().zip(&dy[r]).map(|(a, b)| (a + b).powi(2)).sum();
            l2 += g.weight(k) * v;
            if g.owned(c, k) {
                max = max.max(v.sqrt());
            }
        }
    }
    HarmonicityReport { resolution: g.n, max, l2: l2.sqrt(), order: None }
}

/// Attach the observed convergence order of the L² residual.
pub fn harmonicity_order(fine: &mut HarmonicityReport, coarse: &HarmonicityReport) {
    let ratio = fine.resolution as f64 / coarse.resolution as f64;
    fine.order = Some((coarse.l2 / fine.l2).ln() / ratio.ln());
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// `½∫(|H|² − K − K⊥) dA`, with `K⊥` taken for the normal orientation
    /// induced by the complex structure (twistor spheres give zero).
    pub energy: f64,
    /// The same with the opposite normal orientation.
    pub energy_opposite: f64,
    /// `½∫|H|² dA`.
    pub mean_curvature: f64,
    /// Chart area of the exclusion disks.
    pub excluded_area: f64,
    /// Round-sphere area of the exclusion disks over `4π`.
    pub excluded_fraction: f64,
    /// Samples near punctures whose stencils leave the map.
    pub skipped: usize,
}

/// Classical Willmore energy of a sampled map, from finite-difference fundamental forms.
pub fn classical_oracle(map: &SurfaceMap) -> Result<OracleReport> {
    let g = &map.grid;
    let mut out = OracleReport { excluded_area: map.excluded_area(), excluded_fraction: map.excluded_fraction(), ..Default::default() };
    for c in Chart::BOTH {
        let rows: Vec<(usize, Option<crate::surface::Curvature>)> = (0..g.len())
            .into_par_iter()
            .filter(|&k| g.partition(k) > 0.0 && !map.excluded(c, k))
            .map(|k| (k, curvature_at(map, c, k)))
            .collect();
        for (k, cv) in rows {
            let Some(cv) = cv else {
                out.skipped += 1;
                continue;
            };
            if !(cv.area > 1e-12) {
                return Err(Error::Numerical(format!("map is not immersed at chart {c:?} sample {k}")));
            }
            let w = 0.5 * g.weight(k) * cv.area;
            out.energy += w * (cv.h2 - cv.k + cv.k_perp);
            out.energy_opposite += w * (cv.h2 - cv.k - cv.k_perp);
            out.mean_curvature += w * cv.h2;
        }
    }
    Ok(out)
}

/// `max (| |F_x| − |F_y| | + |⟨F_x, F_y⟩|) / (|F_x|² + |F_y|²)` over owned, unexcluded samples.
pub fn conformality_residual(map: &SurfaceMap) -> f64 {
    let g = &map.grid;
    Chart::BOTH
        .iter()
        .map(|&c| {
            g.owned_indices(c)
                .into_par_iter()
                .filter(|&k| !map.excluded(c, k))
                .filter_map(|k| first_derivatives(map, c, k))
                .map(|(fx, fy)| {
                    let (a, b) = (norm(&fx), norm(&fy));
                    let ip: f64 = fx.iter().zip(&fy).map(|(x, y)| x * y).sum();
                    ((a - b).abs() + ip.abs()) / (a * a + b * b)
                })
                .reduce(|| 0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn norm(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ChartGrid;

    fn map_of(n: usize, f: impl Fn(f64, f64) -> [f64; 4] + Sync) -> SurfaceMap {
        SurfaceMap::from_fn(ChartGrid::new(n), |p| {
            let z = p.local();
            f(z.re, z.im)
        })
    }

    /// Unit sphere in R³ ⊂ R⁴ by inverse stereographic projection in both charts.
    fn round_sphere(n: usize) -> SurfaceMap {
        map_of(n, |x, y| {
            let r2 = x * x + y * y;
            [2.0 * x / (1.0 + r2), 2.0 * y / (1.0 + r2), (r2 - 1.0) / (r2 + 1.0), 0.0]
        })
    }

    #[test]
    fn identity_map_is_conformal() {
        assert!(conformality_residual(&map_of(32, |x, y| [x, y, 0.0, 0.0])) < 1e-12);
    }

    #[test]
    fn sheared_map_has_conformality_one_fifth() {
        let r = conformality_residual(&map_of(32, |x, y| [x, 2.0 * y, 0.0, 0.0]));
        assert!((r - 0.2).abs() < 1e-12, "{r}");
    }

    #[test]
    fn flat_plane_has_zero_classical_energy() {
        let o = classical_oracle(&map_of(32, |x, y| [x, 0.3 * x + y, -y, 0.5 * x])).unwrap();
        assert!(o.energy.abs() < 1e-10 && o.mean_curvature.abs() < 1e-10, "{o:?}");
    }

    #[test]
    fn round_sphere_has_zero_classical_energy() {
        let o = classical_oracle(&round_sphere(128)).unwrap();
        assert!(o.energy.abs() < 1e-5, "{o:?}");
        assert!(o.energy_opposite.abs() < 1e-5);
        // ½∫|H|² = ½·4π for the unit sphere
        assert!((o.mean_curvature - 2.0 * std::f64::consts::PI).abs() < 1e-5, "{o:?}");
    }

    #[test]
    fn collapsed_map_is_not_immersed() {
        assert!(classical_oracle(&map_of(16, |x, _| [x, 0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn richardson_estimate_scales_the_difference() {
        let coarse = EnergyReport { energy: 1.0, resolution: 64, ..Default::default() };
        let mut fine = EnergyReport { energy: 1.15, resolution: 128, ..Default::default() };
        richardson(&mut fine, &coarse, 4.0);
        assert!((fine.error_estimate.unwrap() - 0.01).abs() < 1e-12);
    }
}
