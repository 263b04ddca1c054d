//! Builds domains from a resolved [`Config`] and runs single operations.

use std::collections::BTreeMap;
use std::time::Instant;

use fractform_core::forms::{assemble_form_with, capacity_relaxed_with, EdgeMean};
use fractform_core::geomfield::{build_grid, default_fit_range, depth_for_spacing, distance_field};
use fractform_core::linalg::CgOptions;
use fractform_core::record::expand_seed;
use fractform_core::simsys::{GeneratorLimits, SimilaritySystem};
use fractform_core::{
    capacity_upper_eta, collar_integral, critical_delta, hardy_quotient, minkowski_dimension, similarity_dimension,
    truncated_singular_integral, volume_scaling, walk_absorption, BoundaryGeometry, DistanceField, ExperimentRecord,
    Family, SparseForm, Target, WalkConfig,
};

use crate::config::Config;
use crate::error::{CliError, CliResult};

pub const DEFAULT_CG_TOL: f64 = 1e-8;
const MORAN_TOL: f64 = 1e-13;

/// Family, dimension and similarity dimension, before any grid is built.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub tag: String,
    pub family: Option<Family>,
    pub dim: usize,
    pub s: f64,
}

impl FamilySpec {
    pub fn from_config(cfg: &Config) -> CliResult<Self> {
        let tag = cfg
            .family
            .clone()
            .ok_or_else(|| CliError::config("no family given (koch, vicsek, cantor, interval)"))?;
        if tag == "interval" {
            let dim = cfg.dim.unwrap_or(1);
            if dim != 1 {
                return Err(CliError::config("the interval family is one-dimensional"));
            }
            return Ok(Self {
                tag,
                family: None,
                dim,
                s: 0.0,
            });
        }
        let lambda = cfg.lambda.unwrap_or(match tag.as_str() {
            "cantor" | "cantor_dust" => 0.25,
            _ => 1.0 / 3.0,
        });
        let family = Family::from_tag(&tag, Some(lambda))?;
        if matches!(family, Family::Custom) {
            return Err(CliError::config("custom systems are available through the library only"));
        }
        let dim = cfg.dim.unwrap_or(2);
        let system = SimilaritySystem::for_family(family, dim)?;
        let s = similarity_dimension(&system, MORAN_TOL)?;
        Ok(Self {
            tag: family.tag().to_string(),
            family: Some(family),
            dim,
            s,
        })
    }

    pub fn lambda(&self) -> Option<f64> {
        self.family.and_then(|f| f.lambda())
    }

    pub fn delta_c(&self) -> f64 {
        critical_delta(self.s, self.dim)
    }

    fn system(&self) -> Option<SimilaritySystem> {
        self.family.map(|f| SimilaritySystem::for_family(f, self.dim).expect("validated"))
    }

    fn geometry(&self, depth: usize) -> CliResult<BoundaryGeometry> {
        use fractform_core::simsys::{cantor_dust, koch_snowflake, vicsek};
        Ok(match self.family.expect("fractal family") {
            Family::Koch(l) => koch_snowflake(l, depth)?,
            Family::Vicsek(l) => vicsek(l, self.dim, depth)?,
            Family::CantorDust(l) => cantor_dust(l, self.dim, depth)?,
            Family::Custom => unreachable!("rejected in from_config"),
        })
    }

    fn max_depth(&self) -> usize {
        match self.family {
            Some(Family::Koch(_)) => GeneratorLimits::KOCH.max_depth,
            _ => GeneratorLimits::boxes(self.dim).max_depth,
        }
    }

    fn default_margin(&self) -> f64 {
        match self.family {
            Some(Family::Koch(_)) => 0.01,
            _ => 0.1,
        }
    }
}

/// A discretized domain: geometry realization plus distance field.
pub struct Domain {
    pub spec: FamilySpec,
    pub depth: usize,
    pub resolution: usize,
    pub geometry: Option<BoundaryGeometry>,
    pub df: DistanceField,
}

impl Domain {
    pub fn build(spec: &FamilySpec, cfg: &Config, resolution: usize) -> CliResult<Self> {
        if spec.tag == "interval" {
            let boundary = cfg.boundary.clone().unwrap_or_else(|| vec![0.0, 1.0]);
            return Ok(Self {
                spec: spec.clone(),
                depth: 0,
                resolution,
                geometry: None,
                df: DistanceField::interval(resolution, &boundary)?,
            });
        }
        let margin = cfg.margin.unwrap_or_else(|| spec.default_margin());
        let depth = match cfg.depth {
            Some(k) => k,
            None => {
                let coarse = build_grid(&spec.geometry(2.min(spec.max_depth()))?, resolution, margin)?;
                depth_for_spacing(&spec.system().expect("fractal"), coarse.spacing(), spec.max_depth())
            }
        };
        let geometry = spec.geometry(depth)?;
        let grid = build_grid(&geometry, resolution, margin)?;
        let df = distance_field(&geometry, &grid);
        Ok(Self {
            spec: spec.clone(),
            depth,
            resolution,
            geometry: Some(geometry),
            df,
        })
    }

    pub fn from_config(cfg: &Config) -> CliResult<Self> {
        let spec = FamilySpec::from_config(cfg)?;
        let resolution = cfg
            .resolution
            .unwrap_or(if spec.tag == "interval" { 1000 } else { 256 });
        Self::build(&spec, cfg, resolution)
    }

    pub fn spacing(&self) -> f64 {
        self.df.spacing()
    }

    /// A point on the boundary, used as the default center of local regions.
    pub fn boundary_point(&self) -> Vec<f64> {
        vec![0.0; self.spec.dim]
    }

    /// A point well inside Ω, used as the default start of walks.
    pub fn interior_point(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.spec.dim];
        match self.spec.family {
            None => p[0] = 0.5,
            Some(Family::Koch(_)) => p = vec![0.5, 3f64.sqrt() / 6.0],
            Some(Family::CantorDust(_)) => p.fill(0.5),
            Some(Family::Vicsek(l)) => p[0] = 0.5 - 0.5 * l,
            Some(Family::Custom) => {}
        }
        p
    }

    pub fn form(&self, cfg: &Config, delta: f64) -> CliResult<SparseForm> {
        let mean = if cfg.harmonic.unwrap_or(false) {
            EdgeMean::Harmonic
        } else {
            EdgeMean::Arithmetic
        };
        Ok(assemble_form_with(&self.df, delta, mean)?)
    }

    pub fn record(&self, operation: &str, delta: f64, seed: u64) -> ExperimentRecord {
        let lambda = self.spec.lambda();
        let id = format!(
            "{operation}-{}-d{}-l{}-D{delta:.6}-r{}",
            self.spec.tag,
            self.spec.dim,
            lambda.map_or("none".to_string(), |l| format!("{l:.6}")),
            self.resolution
        );
        ExperimentRecord {
            seed: expand_seed(seed, &id),
            id,
            version: fractform_core::VERSION.to_string(),
            family: self.spec.tag.clone(),
            lambda,
            depth: self.depth,
            dim: self.spec.dim,
            s: self.spec.s,
            delta,
            delta_c: self.spec.delta_c(),
            resolution: self.resolution,
            operation: operation.to_string(),
            outputs: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            wall_time: 0.0,
            verdict: None,
        }
    }
}

/// Result of a single operation plus an optional solver trace.
pub struct Run {
    pub record: ExperimentRecord,
    pub trace: Vec<(usize, f64)>,
}

fn delta_of(cfg: &Config) -> CliResult<f64> {
    cfg.delta.ok_or_else(|| CliError::config("this operation needs --delta"))
}

fn timed(start: Instant, mut record: ExperimentRecord) -> ExperimentRecord {
    record.wall_time = start.elapsed().as_secs_f64();
    record
}

pub fn dimension(cfg: &Config) -> CliResult<Run> {
    let start = Instant::now();
    let spec = FamilySpec::from_config(cfg)?;
    let lambda = spec.lambda();
    let id = format!(
        "dimension-{}-d{}-l{}",
        spec.tag,
        spec.dim,
        lambda.map_or("none".to_string(), |l| format!("{l:.6}"))
    );
    let mut record = ExperimentRecord {
        seed: expand_seed(cfg.seed.unwrap_or(0), &id),
        id,
        version: fractform_core::VERSION.to_string(),
        family: spec.tag.clone(),
        lambda,
        depth: 0,
        dim: spec.dim,
        s: spec.s,
        delta: cfg.delta.unwrap_or(0.0),
        delta_c: spec.delta_c(),
        resolution: 0,
        operation: "dimension".into(),
        outputs: BTreeMap::new(),
        tolerances: BTreeMap::from([("moran_tol".into(), MORAN_TOL)]),
        wall_time: 0.0,
        verdict: None,
    };
    if let Some(sys) = spec.system() {
        record.outputs.insert("max_ratio".into(), sys.max_ratio());
        record.outputs.insert("maps".into(), sys.maps().len() as f64);
    }
    Ok(Run {
        record: timed(start, record),
        trace: Vec::new(),
    })
}

pub fn fractal(cfg: &Config, domain: &Domain) -> CliResult<Run> {
    let start = Instant::now();
    let mut record = domain.record("fractal", cfg.delta.unwrap_or(0.0), cfg.seed.unwrap_or(0));
    let df = &domain.df;
    let grid = df.grid();
    let out = &mut record.outputs;
    out.insert("omega_cells".into(), grid.masked_count() as f64);
    out.insert("omega_volume".into(), grid.masked_count() as f64 * grid.cell_volume());
    out.insert("spacing".into(), df.spacing());
    if let Some(geom) = &domain.geometry {
        out.insert("primitives".into(), geom.len() as f64);
        out.insert("approx_error".into(), geom.approx_error());
        let (lo, hi) = default_fit_range(df);
        let mink = minkowski_dimension(df, lo, hi, 16)?;
        let vol = volume_scaling(df, lo, hi, 16)?;
        out.insert("minkowski_dimension".into(), mink.exponent);
        out.insert("volume_exponent".into(), vol.exponent);
        out.insert("fit_residual".into(), vol.residual);
        record.tolerances.insert("fit_r_min".into(), lo);
        record.tolerances.insert("fit_r_max".into(), hi);
    }
    Ok(Run {
        record: timed(start, record),
        trace: Vec::new(),
    })
}

pub fn capacity(cfg: &Config, domain: &Domain, want_trace: bool) -> CliResult<Run> {
    let start = Instant::now();
    let delta = delta_of(cfg)?;
    let h = domain.spacing();
    let eps = cfg.eps.unwrap_or(8.0 * h);
    let tol = cfg.cg_tol.unwrap_or(DEFAULT_CG_TOL);
    let form = domain.form(cfg, delta)?;
    let target = Target::whole(&domain.df);
    let opts = CgOptions {
        tol,
        max_iter: None,
        trace: want_trace,
    };
    let relaxed = capacity_relaxed_with(&form, &target, eps, &opts)?;
    let ns = [4u32, 16, 64];
    let rs: Vec<f64> = ns.iter().map(|&n| eps * n as f64).collect();
    let eta = capacity_upper_eta(&form, &target, &rs, &ns)?;

    let mut record = domain.record("capacity", delta, cfg.seed.unwrap_or(0));
    let out = &mut record.outputs;
    out.insert("capacity".into(), relaxed.value);
    out.insert("collar_eps".into(), relaxed.collar_eps);
    out.insert("collar_cells".into(), relaxed.collar_cells as f64);
    out.insert("solver_iters".into(), relaxed.solver_iters as f64);
    out.insert("residual".into(), relaxed.residual);
    out.insert("eta_bound".into(), eta.value);
    out.insert("eta_r".into(), eta.r);
    out.insert("eta_n".into(), eta.n as f64);
    record.tolerances.insert("cg_tol".into(), tol);
    Ok(Run {
        record: timed(start, record),
        trace: relaxed.trace,
    })
}

pub fn hardy(cfg: &Config, domain: &Domain) -> CliResult<Run> {
    let start = Instant::now();
    let delta = delta_of(cfg)?;
    let z = cfg.center.clone().unwrap_or_else(|| domain.boundary_point());
    let radius = cfg.radius.unwrap_or(if domain.spec.tag == "interval" { 2.0 } else { 0.25 });
    let tol = cfg.tol.unwrap_or(1e-8);
    let res = hardy_quotient(&domain.df, delta, &z, radius, tol)?;
    let mut record = domain.record("hardy", delta, cfg.seed.unwrap_or(0));
    record.outputs.insert("hardy_quotient".into(), res.quotient);
    record.outputs.insert("iterations".into(), res.iterations as f64);
    record.outputs.insert("support_cells".into(), res.cells.len() as f64);
    record.outputs.insert("radius".into(), radius);
    record.tolerances.insert("tol".into(), tol);
    Ok(Run {
        record: timed(start, record),
        trace: Vec::new(),
    })
}

pub fn collar(cfg: &Config, domain: &Domain) -> CliResult<Run> {
    let start = Instant::now();
    let delta = delta_of(cfg)?;
    let z = cfg.center.clone().unwrap_or_else(|| domain.boundary_point());
    let rho = cfg.radius.unwrap_or(0.25);
    let tau = cfg.tau.unwrap_or(8.0 * domain.spacing());
    let inner = collar_integral(&domain.df, delta, &z, rho, tau)?;
    let outer = truncated_singular_integral(&domain.df, delta, &z, rho, tau)?;
    let mut record = domain.record("collar", delta, cfg.seed.unwrap_or(0));
    record.outputs.insert("collar_integral".into(), inner);
    record.outputs.insert("truncated_integral".into(), outer);
    record.outputs.insert("tau".into(), tau);
    record.outputs.insert("rho".into(), rho);
    Ok(Run {
        record: timed(start, record),
        trace: Vec::new(),
    })
}

pub fn walk(cfg: &Config, domain: &Domain) -> CliResult<Run> {
    let start = Instant::now();
    let delta = delta_of(cfg)?;
    let point = cfg.start.clone().unwrap_or_else(|| domain.interior_point());
    let cell = domain
        .df
        .grid()
        .locate(&point)
        .ok_or_else(|| CliError::config(format!("start point {point:?} is outside the grid")))?;
    let mut record = domain.record("walk", delta, cfg.seed.unwrap_or(0));
    let wc = WalkConfig {
        start: cell,
        horizon: cfg.horizon.unwrap_or(0.05),
        trials: cfg.trials.unwrap_or(10_000),
        seed: record.seed,
        absorb_eps: cfg.absorb_eps.unwrap_or_else(|| 0.05f64.max(2.0 * domain.spacing())),
    };
    let form = domain.form(cfg, delta)?;
    let res = walk_absorption(&form, &domain.df, &wc)?;
    let out = &mut record.outputs;
    out.insert("p_hat".into(), res.p_hat);
    out.insert("stderr".into(), res.stderr);
    out.insert("hits".into(), res.hits as f64);
    out.insert("trials".into(), res.trials as f64);
    out.insert("clamp_events".into(), res.clamp_events as f64);
    record.tolerances.insert("horizon".into(), wc.horizon);
    record.tolerances.insert("absorb_eps".into(), wc.absorb_eps);
    Ok(Run {
        record: timed(start, record),
        trace: Vec::new(),
    })
}
