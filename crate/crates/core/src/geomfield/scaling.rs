use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomfield::DistanceField;

/// Least-squares power law `value ≈ prefactor · r^exponent` in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_range: (f64, f64),
    /// RMS residual of the log-log fit.
    pub residual: f64,
}

/// `n` radii geometrically spaced over `[lo, hi]`, both ends included.
pub fn geometric_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// Fits `log y = a + b log x`; returns `(b, a, rms)`.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points".into()));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::DegenerateFit("nonpositive value in log-log fit".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok((slope, intercept, rms))
}

/// `|A_r| ≈ h^d · #{Ω cells with d_Γ < r}`.
pub fn neighborhood_volume(df: &DistanceField, r: f64) -> f64 {
    let count = df.sorted_omega_distances().partition_point(|&v| v < r);
    count as f64 * df.grid().cell_volume()
}

/// Power-law fit of `|A_r|` against `r`; the exponent is the log-log slope.
pub fn volume_scaling(df: &DistanceField, r_min: f64, r_max: f64, n_points: usize) -> Result<ScalingFit> {
    if !(r_min > 0.0 && r_min < r_max) || n_points < 2 {
        return Err(Error::invalid(format!(
            "need 0 < r_min < r_max and n_points >= 2, got [{r_min}, {r_max}] with {n_points}"
        )));
    }
    let radii = geometric_radii(r_min, r_max, n_points);
    let volumes: Vec<f64> = radii.iter().map(|&r| neighborhood_volume(df, r)).collect();
    if volumes.iter().all(|&v| v == volumes[0]) {
        return Err(Error::DegenerateFit("neighborhood volume is constant over the range".into()));
    }
    let (slope, intercept, rms) = fit_log_log(&radii, &volumes)?;
    Ok(ScalingFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_range: (r_min, r_max),
        residual: rms,
    })
}

/// Minkowski dimension `d − slope` of `log |A_r|` against `log r`.
pub fn minkowski_dimension(df: &DistanceField, r_min: f64, r_max: f64, n_points: usize) -> Result<ScalingFit> {
    let h = df.spacing();
    if r_min < 4.0 * h * (1.0 - 1e-12) {
        return Err(Error::invalid(format!("r_min {r_min} below 4h = {}", 4.0 * h)));
    }
    if r_max > df.boundary_diameter() / 4.0 * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "r_max {r_max} above diam/4 = {}",
            df.boundary_diameter() / 4.0
        )));
    }
    if n_points < 4 {
        return Err(Error::invalid("minkowski fit needs at least 4 radii"));
    }
    let fit = volume_scaling(df, r_min, r_max, n_points)?;
    Ok(ScalingFit {
        exponent: df.dim() as f64 - fit.exponent,
        ..fit
    })
}

/// The default fit window `[4h, diam/8]`.
pub fn default_fit_range(df: &DistanceField) -> (f64, f64) {
    (4.0 * df.spacing(), df.boundary_diameter() / 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomfield::{distance_field, Grid};
    use crate::simsys::{BoundaryGeometry, DomainRule, Segment};

    fn flat_segment(res: usize) -> DistanceField {
        // Ω is the upper half of the box above the segment y = 0, x ∈ [0, 1].
        let geom = BoundaryGeometry::from_segments(
            vec![Segment::new([0.0, 0.0], [1.0, 0.0])],
            DomainRule::ComplementOfPrimitives,
        )
        .unwrap();
        let grid = Grid::over_box(&geom, &[0.0, 0.0], &[1.0, 1.0], res).unwrap();
        distance_field(&geom, &grid)
    }

    #[test]
    fn volume_below_smallest_distance_is_zero() {
        let df = flat_segment(64);
        let min = df.sorted_omega_distances()[0];
        assert_eq!(neighborhood_volume(&df, min), 0.0);
        assert!(neighborhood_volume(&df, min * 1.0001) > 0.0);
    }

    #[test]
    fn one_sided_tube_of_a_segment() {
        // Within the box the tube is exactly the strip [0,1] × [0, r): volume r.
        let df = flat_segment(1024);
        let h = df.spacing();
        for r in [8.0 * h, 32.0 * h, 0.1] {
            let v = neighborhood_volume(&df, r);
            assert!((v - r).abs() <= h, "{v} vs {r}");
        }
        let fit = volume_scaling(&df, 4.0 * h, 0.1, 8).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.02);
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let xs = geometric_radii(0.01, 1.0, 9);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(0.7)).collect();
        let (b, a, rms) = fit_log_log(&xs, &ys).unwrap();
        assert!((b - 0.7).abs() < 1e-12 && (a.exp() - 3.0).abs() < 1e-12 && rms < 1e-12);
    }

    #[test]
    fn constant_volumes_are_degenerate() {
        let df = flat_segment(64);
        let h = df.spacing();
        // below the first cell center every volume is zero
        assert!(matches!(
            volume_scaling(&df, 0.01 * h, 0.4 * h, 5),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn volume_is_monotone() {
        let df = flat_segment(128);
        let mut last = 0.0;
        for r in geometric_radii(1e-3, 1.0, 40) {
            let v = neighborhood_volume(&df, r);
            assert!(v >= last);
            last = v;
        }
    }
}
