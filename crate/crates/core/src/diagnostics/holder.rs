use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::galerkin::Snapshot;
use crate::spectral::{Basis, DerivativeOrder};

/// Empirical Hölder exponents and constants, from log–log least squares of
/// `sup_x |u(t2) - u(t1)|` against `|t2 - t1|` and of
/// `sup_t |u(x + dx) - u(x)|` against `dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderProbe {
    pub conclusive: bool,
    pub exponent_time: Option<f64>,
    pub constant_time: Option<f64>,
    pub exponent_space: Option<f64>,
    pub constant_space: Option<f64>,
    pub samples_time: usize,
    pub samples_space: usize,
    /// Smallest sampled `|t2 - t1|`.
    pub resolution_time: f64,
    /// Grid spacing.
    pub resolution_space: f64,
}

/// Least-squares line through `(log x, log y)`: returns `(slope, exp(intercept))`.
fn loglog_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, (my - slope * mx).exp()))
}

pub fn holder_probe(snapshots: &[Snapshot], basis: &Basis) -> Result<HolderProbe> {
    let fields: Vec<Vec<f64>> = snapshots
        .iter()
        .map(|s| {
            basis
                .synthesize(&s.coeffs, DerivativeOrder::Value)
                .map(|f| f.u)
        })
        .collect::<Result<_>>()?;
    let mut time_pts = Vec::new();
    let mut resolution_time = f64::INFINITY;
    for i in 0..snapshots.len() {
        for j in i + 1..snapshots.len() {
            let dt = snapshots[j].t - snapshots[i].t;
            if dt <= 0.0 {
                continue;
            }
            resolution_time = resolution_time.min(dt);
            let du = fields[i]
                .iter()
                .zip(&fields[j])
                .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
            time_pts.push((dt, du));
        }
    }
    let g = basis.grid_len();
    let h = basis.weight();
    let mut space_pts = Vec::new();
    let mut offset = 1;
    while offset < g / 2 {
        let du = fields.iter().fold(0.0f64, |a, u| {
            (0..g - offset).fold(a, |b, i| b.max((u[i + offset] - u[i]).abs()))
        });
        space_pts.push((offset as f64 * h, du));
        offset *= 2;
    }
    let t_fit = loglog_fit(&time_pts);
    let x_fit = loglog_fit(&space_pts);
    Ok(HolderProbe {
        conclusive: t_fit.is_some() && x_fit.is_some(),
        exponent_time: t_fit.map(|f| f.0),
        constant_time: t_fit.map(|f| f.1),
        exponent_space: x_fit.map(|f| f.0),
        constant_space: x_fit.map(|f| f.1),
        samples_time: time_pts.iter().filter(|p| p.1 > 0.0).count(),
        samples_space: space_pts.iter().filter(|p| p.1 > 0.0).count(),
        resolution_time: if resolution_time.is_finite() {
            resolution_time
        } else {
            0.0
        },
        resolution_space: h,
    })
}
