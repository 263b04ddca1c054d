use crate::error::{Error, Result};
use crate::forms::{ball_cells, clamped_power};
use crate::geomfield::DistanceField;

/// `∫_{Ω_{z,ρ} ∩ {d < τ}} d^{δ−2}`, with `d` clamped below at `h/2`.
pub fn collar_integral(df: &DistanceField, delta: f64, z: &[f64], rho: f64, tau: f64) -> Result<f64> {
    region_sum(df, delta, z, rho, tau, |d| d < tau)
}

/// `∫_{Ω_{z,ρ} ∩ {d ≥ τ}} d^{δ−2}`, the part of the singular integral away
/// from the τ-collar; grows like `τ^{−(2+s−d−δ)}` when that exponent is
/// positive.
pub fn truncated_singular_integral(df: &DistanceField, delta: f64, z: &[f64], rho: f64, tau: f64) -> Result<f64> {
    region_sum(df, delta, z, rho, tau, |d| d >= tau)
}

fn region_sum(
    df: &DistanceField,
    delta: f64,
    z: &[f64],
    rho: f64,
    tau: f64,
    keep: impl Fn(f64) -> bool,
) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::invalid(format!("delta {delta} must be nonnegative")));
    }
    if !(tau > 0.0 && tau < rho) {
        return Err(Error::invalid(format!("tau {tau} must lie in (0, rho = {rho})")));
    }
    let cells = ball_cells(df, z, rho)?;
    if cells.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let h = df.spacing();
    let p = delta - 2.0;
    let s: f64 = cells
        .iter()
        .map(|&i| df.value(i))
        .filter(|&d| keep(d))
        .map(|d| clamped_power(d, h, p))
        .sum();
    Ok(df.grid().cell_volume() * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomfield::{field_for, fit_log_log};
    use crate::simsys::koch_snowflake;

    fn koch() -> DistanceField {
        let geom = koch_snowflake(1.0 / 3.0, 5).unwrap();
        field_for(&geom, 128, 0.02).unwrap()
    }

    #[test]
    fn delta_two_gives_collar_volume() {
        let df = koch();
        let (z, rho, tau) = ([0.5, 0.0], 0.3, 0.05);
        let v = collar_integral(&df, 2.0, &z, rho, tau).unwrap();
        let count = (0..df.grid().len())
            .filter(|&i| {
                let c = df.grid().center(i);
                df.grid().in_omega(i) && df.value(i) < tau && (c[0] - z[0]).hypot(c[1] - z[1]) < rho
            })
            .count();
        assert!((v - count as f64 * df.grid().cell_volume()).abs() < 1e-14);
    }

    #[test]
    fn collar_integral_is_monotone_in_tau_and_rho() {
        let df = koch();
        let z = [0.5, 0.0];
        let mut last = 0.0;
        for tau in [0.01, 0.02, 0.04, 0.08] {
            let v = collar_integral(&df, 0.5, &z, 0.3, tau).unwrap();
            assert!(v >= last);
            last = v;
        }
        let a = collar_integral(&df, 0.5, &z, 0.2, 0.05).unwrap();
        let b = collar_integral(&df, 0.5, &z, 0.3, 0.05).unwrap();
        assert!(b >= a);
    }

    #[test]
    fn pieces_add_up_to_full_integral() {
        let df = koch();
        let z = [0.5, 0.0];
        let inner = collar_integral(&df, 0.7, &z, 0.3, 0.05).unwrap();
        let outer = truncated_singular_integral(&df, 0.7, &z, 0.3, 0.05).unwrap();
        let all = collar_integral(&df, 0.7, &z, 0.3, 0.1).unwrap()
            + truncated_singular_integral(&df, 0.7, &z, 0.3, 0.1).unwrap();
        assert!((inner + outer - all).abs() < 1e-12 * all);
    }

    #[test]
    fn truncated_integral_grows_as_tau_shrinks() {
        let df = koch();
        let h = df.spacing();
        let taus: Vec<f64> = [4.0, 8.0, 16.0].iter().map(|k| k * h).collect();
        let vals: Vec<f64> = taus
            .iter()
            .map(|&t| truncated_singular_integral(&df, 0.5, &[0.5, 0.0], 0.4, t).unwrap())
            .collect();
        let (slope, _, _) = fit_log_log(&taus, &vals).unwrap();
        assert!(slope < -0.3, "{slope}");
    }

    #[test]
    fn bad_tau_and_empty_region() {
        let df = koch();
        assert!(collar_integral(&df, 0.5, &[0.5, 0.0], 0.1, 0.2).is_err());
        assert_eq!(collar_integral(&df, 0.5, &[9.0, 9.0], 0.1, 0.05), Err(Error::EmptyRegion));
    }
}
