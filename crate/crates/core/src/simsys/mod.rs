//! Similarity systems and the self-similar boundaries they generate.

pub mod export;
mod geometry;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use export::{read_geometry, write_geometry};
pub use geometry::{
    cantor_dust, cantor_dust_with, koch_curve, koch_snowflake, koch_snowflake_with, vicsek,
    vicsek_with, AaBox, BoundaryGeometry, DomainRule, GeneratorLimits, Primitives, Segment,
};

const ORTHOGONALITY_TOL: f64 = 1e-12;
const MORAN_MAX_ITERS: usize = 200;

/// A contracting similarity `x ↦ ratio · R x + t` of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    ratio: f64,
    /// Row-major `d × d` orthogonal matrix.
    rotation: Vec<f64>,
    translation: Vec<f64>,
}

impl Similarity {
    pub fn new(ratio: f64, rotation: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let dim = translation.len();
        if dim == 0 {
            return Err(Error::invalid("similarity needs at least one coordinate"));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::invalid(format!("ratio {ratio} not in (0, 1)")));
        }
        if rotation.len() != dim * dim {
            return Err(Error::invalid(format!(
                "rotation has {} entries, expected {}",
                rotation.len(),
                dim * dim
            )));
        }
        // RᵀR = I
        for i in 0..dim {
            for j in 0..dim {
                let dot: f64 = (0..dim)
                    .map(|k| rotation[k * dim + i] * rotation[k * dim + j])
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).abs() > ORTHOGONALITY_TOL {
                    return Err(Error::invalid("rotation matrix is not orthogonal"));
                }
            }
        }
        Ok(Self {
            ratio,
            rotation,
            translation,
        })
    }

    /// Pure scaling plus translation.
    pub fn scaling(ratio: f64, translation: Vec<f64>) -> Result<Self> {
        let dim = translation.len();
        let mut rotation = vec![0.0; dim * dim];
        for i in 0..dim {
            rotation[i * dim + i] = 1.0;
        }
        Self::new(ratio, rotation, translation)
    }

    /// Planar similarity with rotation angle `theta` (radians, counterclockwise).
    pub fn planar(ratio: f64, theta: f64, translation: [f64; 2]) -> Result<Self> {
        let (sin, cos) = theta.sin_cos();
        Self::new(ratio, vec![cos, -sin, sin, cos], translation.to_vec())
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|i| {
                let rx: f64 = (0..dim).map(|k| self.rotation[i * dim + k] * x[k]).sum();
                self.ratio * rx + self.translation[i]
            })
            .collect()
    }
}

/// Which of the named self-similar families a system (or geometry) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "lambda", rename_all = "snake_case")]
pub enum Family {
    Koch(f64),
    Vicsek(f64),
    CantorDust(f64),
    Custom,
}

impl Family {
    pub fn lambda(&self) -> Option<f64> {
        match *self {
            Family::Koch(l) | Family::Vicsek(l) | Family::CantorDust(l) => Some(l),
            Family::Custom => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Family::Koch(_) => "koch",
            Family::Vicsek(_) => "vicsek",
            Family::CantorDust(_) => "cantor",
            Family::Custom => "custom",
        }
    }

    /// Parses the short tag used on the command line and in geometry files.
    pub fn from_tag(tag: &str, lambda: Option<f64>) -> Result<Self> {
        let need = |l: Option<f64>| l.ok_or_else(|| Error::invalid(format!("family {tag} needs a lambda")));
        match tag {
            "koch" => Ok(Family::Koch(need(lambda)?)),
            "vicsek" => Ok(Family::Vicsek(need(lambda)?)),
            "cantor" | "cantor_dust" => Ok(Family::CantorDust(need(lambda)?)),
            "custom" => Ok(Family::Custom),
            other => Err(Error::invalid(format!("unknown family {other:?}"))),
        }
    }

    fn check_lambda(&self) -> Result<()> {
        match *self {
            Family::Koch(l) if !(l > 0.0 && l <= 1.0 / 3.0) => {
                Err(Error::invalid(format!("Koch lambda {l} not in (0, 1/3]")))
            }
            Family::Vicsek(l) | Family::CantorDust(l) if !(l > 0.0 && l < 0.5) => {
                Err(Error::invalid(format!("lambda {l} not in (0, 1/2)")))
            }
            _ => Ok(()),
        }
    }
}

/// An iterated function system of contracting similarities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilaritySystem {
    ambient_dim: usize,
    maps: Vec<Similarity>,
    family: Family,
    /// Caller's declaration that the open set condition holds. Never verified.
    open_set_condition: bool,
}

impl SimilaritySystem {
    pub fn new(ambient_dim: usize, maps: Vec<Similarity>, family: Family) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::invalid("similarity system needs at least one map"));
        }
        if let Some(m) = maps.iter().find(|m| m.dim() != ambient_dim) {
            return Err(Error::invalid(format!(
                "map of dimension {} in a {ambient_dim}-dimensional system",
                m.dim()
            )));
        }
        family.check_lambda()?;
        let open_set_condition = !matches!(family, Family::Custom);
        Ok(Self {
            ambient_dim,
            maps,
            family,
            open_set_condition,
        })
    }

    /// A user-supplied system. The open set condition is whatever the caller declares.
    pub fn custom(ambient_dim: usize, maps: Vec<Similarity>, open_set_condition: bool) -> Result<Self> {
        let mut sys = Self::new(ambient_dim, maps, Family::Custom)?;
        sys.open_set_condition = open_set_condition;
        Ok(sys)
    }

    /// The modified von Koch curve on the unit segment `[0,1] × {0}`.
    ///
    /// The middle piece of length `λ` is replaced by the two sides of an
    /// equilateral triangle pointing to negative `y`, i.e. to the right of
    /// the direction of travel; on a counterclockwise polygon that is outward.
    pub fn koch(lambda: f64) -> Result<Self> {
        Family::Koch(lambda).check_lambda()?;
        let side = (1.0 - lambda) / 2.0;
        let third = std::f64::consts::FRAC_PI_3;
        let apex = [0.5, -lambda * third.sin()];
        let maps = vec![
            Similarity::planar(side, 0.0, [0.0, 0.0])?,
            Similarity::planar(lambda, -third, [side, 0.0])?,
            Similarity::planar(lambda, third, apex)?,
            Similarity::planar(side, 0.0, [1.0 - side, 0.0])?,
        ];
        Self::new(2, maps, Family::Koch(lambda))
    }

    /// Vicsek snowflake on `[-1/2, 1/2]^d`: the central cube of side
    /// `1 − 2λ` and the `2^d` corner cubes of side `λ`.
    pub fn vicsek(lambda: f64, dim: usize) -> Result<Self> {
        Family::Vicsek(lambda).check_lambda()?;
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let mut maps = vec![Similarity::scaling(1.0 - 2.0 * lambda, vec![0.0; dim])?];
        let offset = 0.5 - lambda / 2.0;
        for corner in 0..(1usize << dim) {
            let t = (0..dim)
                .map(|k| if corner >> k & 1 == 1 { offset } else { -offset })
                .collect();
            maps.push(Similarity::scaling(lambda, t)?);
        }
        Self::new(dim, maps, Family::Vicsek(lambda))
    }

    /// Cantor dust on `[0, 1]^d`: the `2^d` corner cubes of side `λ`.
    pub fn cantor_dust(lambda: f64, dim: usize) -> Result<Self> {
        Family::CantorDust(lambda).check_lambda()?;
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let maps = (0..(1usize << dim))
            .map(|corner| {
                let t = (0..dim)
                    .map(|k| if corner >> k & 1 == 1 { 1.0 - lambda } else { 0.0 })
                    .collect();
                Similarity::scaling(lambda, t)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, maps, Family::CantorDust(lambda))
    }

    /// The system for a named family in dimension `dim` (ignored for Koch).
    pub fn for_family(family: Family, dim: usize) -> Result<Self> {
        match family {
            Family::Koch(l) => Self::koch(l),
            Family::Vicsek(l) => Self::vicsek(l, dim),
            Family::CantorDust(l) => Self::cantor_dust(l, dim),
            Family::Custom => Err(Error::invalid("custom systems have no canonical construction")),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn open_set_condition(&self) -> bool {
        self.open_set_condition
    }

    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.maps.iter().map(Similarity::ratio)
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios().fold(0.0, f64::max)
    }

    fn moran_sum(&self, s: f64) -> f64 {
        self.ratios().map(|r| r.powf(s)).sum()
    }
}

/// Solves the Moran equation `Σ_k r_k^s = 1` for the similarity dimension.
///
/// Bisection on `[0, d]`; the map `s ↦ Σ r_k^s` is strictly decreasing, so the
/// bracket is always valid once `Σ r_k^d ≤ 1`.
pub fn similarity_dimension(system: &SimilaritySystem, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    let dim = system.ambient_dim();
    let f = |s: f64| system.moran_sum(s) - 1.0;

    let at_top = system.moran_sum(dim as f64);
    if at_top > 1.0 + 4.0 * f64::EPSILON * system.maps().len() as f64 {
        return Err(Error::NoSolutionInRange { dim, sum: at_top });
    }
    if f(0.0) <= tol {
        return Ok(0.0);
    }

    let (mut lo, mut hi) = (0.0, dim as f64);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MORAN_MAX_ITERS {
        mid = 0.5 * (lo + hi);
        let value = f(mid);
        if value.abs() <= tol && hi - lo <= tol {
            break;
        }
        if value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            mid = 0.5 * (lo + hi);
            break;
        }
    }
    Ok(mid)
}

/// The Markov-uniqueness threshold `δ_c = 1 + (s − (d − 1))`.
pub fn critical_delta(s: f64, dim: usize) -> f64 {
    1.0 + (s - (dim as f64 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-13;

    #[test]
    fn single_map_has_dimension_zero() {
        let sys = SimilaritySystem::custom(1, vec![Similarity::scaling(0.5, vec![0.0]).unwrap()], true).unwrap();
        assert_eq!(similarity_dimension(&sys, TOL).unwrap(), 0.0);
    }

    #[test]
    fn cantor_dust_plane_quarter_is_one() {
        let sys = SimilaritySystem::cantor_dust(0.25, 2).unwrap();
        let s = similarity_dimension(&sys, TOL).unwrap();
        assert!((s - 1.0).abs() < 1e-12, "{s}");
    }

    #[test]
    fn koch_third_is_log4_log3() {
        let sys = SimilaritySystem::koch(1.0 / 3.0).unwrap();
        let s = similarity_dimension(&sys, TOL).unwrap();
        assert!((s - 4f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((s - 1.2618595).abs() < 1e-7);
    }

    #[test]
    fn vicsek_cube_third_is_two() {
        let sys = SimilaritySystem::vicsek(1.0 / 3.0, 3).unwrap();
        assert_eq!(sys.maps().len(), 9);
        assert!(sys.ratios().all(|r| (r - 1.0 / 3.0).abs() < 1e-15));
        let s = similarity_dimension(&sys, TOL).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vicsek_lambda4_sits_on_codimension_one() {
        // 2^4 λ^3 + (1 − 2λ)^3 = 1 at λ = (√21 − 3)/4
        let lambda = (21f64.sqrt() - 3.0) / 4.0;
        let sys = SimilaritySystem::vicsek(lambda, 4).unwrap();
        let s = similarity_dimension(&sys, TOL).unwrap();
        assert!((s - 3.0).abs() < 1e-10, "{s}");
    }

    #[test]
    fn overfull_system_is_rejected() {
        let maps = (0..5)
            .map(|k| Similarity::scaling(0.5, vec![k as f64]).unwrap())
            .collect();
        let sys = SimilaritySystem::custom(1, maps, false).unwrap();
        assert!(matches!(
            similarity_dimension(&sys, TOL),
            Err(Error::NoSolutionInRange { dim: 1, .. })
        ));
    }

    #[test]
    fn critical_delta_reference_points() {
        for d in 1..=4 {
            assert_eq!(critical_delta(d as f64 - 1.0, d), 1.0);
            assert_eq!(critical_delta(d as f64 - 2.0, d), 0.0);
        }
        let s = 4f64.ln() / 3f64.ln();
        assert!((critical_delta(s, 2) - s).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_maps_and_lambdas() {
        assert!(Similarity::scaling(1.0, vec![0.0]).is_err());
        assert!(Similarity::new(0.5, vec![1.0, 0.1, 0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(SimilaritySystem::koch(0.34).is_err());
        assert!(SimilaritySystem::vicsek(0.5, 2).is_err());
        assert!(SimilaritySystem::cantor_dust(0.0, 2).is_err());
    }

    #[test]
    fn koch_maps_fix_the_segment_endpoints() {
        let sys = SimilaritySystem::koch(0.25).unwrap();
        let first = sys.maps()[0].apply(&[0.0, 0.0]);
        let last = sys.maps()[3].apply(&[1.0, 0.0]);
        assert!(first.iter().all(|v| v.abs() < 1e-15));
        assert!((last[0] - 1.0).abs() < 1e-15 && last[1].abs() < 1e-15);
        // consecutive pieces join up
        for k in 0..3 {
            let end = sys.maps()[k].apply(&[1.0, 0.0]);
            let start = sys.maps()[k + 1].apply(&[0.0, 0.0]);
            assert!((end[0] - start[0]).abs() < 1e-14 && (end[1] - start[1]).abs() < 1e-14);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn system_from(ratios: &[f64]) -> SimilaritySystem {
            let maps = ratios
                .iter()
                .enumerate()
                .map(|(k, &r)| Similarity::scaling(r, vec![k as f64, 0.0]).unwrap())
                .collect();
            SimilaritySystem::custom(2, maps, true).unwrap()
        }

        proptest! {
            #[test]
            fn residual_within_tolerance(ratios in prop::collection::vec(0.05f64..0.5, 2..4)) {
                let sys = system_from(&ratios);
                let s = similarity_dimension(&sys, 1e-12).unwrap();
                let residual: f64 = ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
                prop_assert!(residual.abs() <= 1e-12);
                prop_assert!((0.0..=2.0).contains(&s));
            }

            #[test]
            fn increasing_a_ratio_increases_dimension(
                ratios in prop::collection::vec(0.05f64..0.45, 2..4),
                which in 0usize..4,
                bump in 0.01f64..0.04,
            ) {
                let base = similarity_dimension(&system_from(&ratios), 1e-13).unwrap();
                let mut bigger = ratios.clone();
                let k = which % bigger.len();
                bigger[k] += bump;
                let grown = similarity_dimension(&system_from(&bigger), 1e-13).unwrap();
                prop_assert!(grown > base, "{} !> {}", grown, base);
            }
        }
    }
}
