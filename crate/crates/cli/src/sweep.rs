//! Parallel (λ, δ) sweeps of the capacity trend, resumable by record id.

use std::collections::{BTreeMap, HashSet};
use std::fs::OpenOptions;
use std::io::BufReader;
use std::path::Path;
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;

use fractform_core::record::{read_records, write_record};
use fractform_core::{capacity_relaxed, ExperimentRecord, Target};

use crate::config::{parse_range, Config};
use crate::error::{CliError, CliResult};
use crate::experiment::{Domain, FamilySpec, DEFAULT_CG_TOL};

pub const VANISHING: &str = "vanishing";
pub const POSITIVE: &str = "positive";

/// Collar width in cells of each level.
const COLLAR_CELLS: f64 = 8.0;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub written: usize,
    pub skipped: usize,
}

/// `vanishing` if the capacity dropped at least half-way (in log scale)
/// toward the `2^{-(d-s)}` decay of a collar volume.
pub fn verdict(ratio: f64, dim: usize, s: f64) -> &'static str {
    if ratio <= 2f64.powf(-(dim as f64 - s) / 2.0) {
        VANISHING
    } else {
        POSITIVE
    }
}

struct Level {
    coarse: Domain,
    fine: Domain,
}

fn cell_record(level: &Level, cfg: &Config, delta: f64, seed: u64) -> CliResult<ExperimentRecord> {
    let start = Instant::now();
    let tol = cfg.cg_tol.unwrap_or(DEFAULT_CG_TOL);
    let mut caps = [0.0; 2];
    for (k, dom) in [&level.coarse, &level.fine].into_iter().enumerate() {
        let form = dom.form(cfg, delta)?;
        let eps = COLLAR_CELLS * dom.spacing();
        caps[k] = capacity_relaxed(&form, &Target::whole(&dom.df), eps, tol)?.value;
    }
    let fine = &level.fine;
    let mut record = fine.record("sweep", delta, seed);
    let ratio = caps[1] / caps[0];
    record.outputs.insert("capacity_coarse".into(), caps[0]);
    record.outputs.insert("capacity_fine".into(), caps[1]);
    record.outputs.insert("ratio".into(), ratio);
    record.tolerances.insert("cg_tol".into(), tol);
    record.tolerances.insert("collar_cells".into(), COLLAR_CELLS);
    record.verdict = Some(verdict(ratio, fine.spec.dim, fine.spec.s).to_string());
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(record)
}

/// Cuts a final line left without its newline by an interrupted write.
fn drop_torn_tail(path: &Path) -> CliResult<()> {
    let bytes = std::fs::read(path)?;
    if bytes.last().is_some_and(|&b| b != b'\n') {
        let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
    }
    Ok(())
}

/// Runs every (λ, δ) cell not already present in `out`, appending records in
/// grid order (λ outer, δ inner).
pub fn run(cfg: &Config, out: &Path) -> CliResult<SweepSummary> {
    let lambdas = parse_range(cfg.lambdas.as_deref().ok_or_else(|| CliError::config("sweep needs --lambdas"))?)?;
    let deltas = parse_range(cfg.deltas.as_deref().ok_or_else(|| CliError::config("sweep needs --deltas"))?)?;
    let mut cfg = cfg.clone();
    cfg.family.get_or_insert_with(|| "cantor".into());
    if cfg.family.as_deref() == Some("interval") {
        return Err(CliError::config("the interval family has no λ to sweep"));
    }
    let resolution = cfg.resolution.unwrap_or(512);
    if resolution < 16 {
        return Err(CliError::config("sweep resolution must be at least 16"));
    }
    let seed = cfg.seed.unwrap_or(0);

    let specs: Vec<FamilySpec> = lambdas
        .iter()
        .map(|&l| FamilySpec::from_config(&Config { lambda: Some(l), ..cfg.clone() }))
        .collect::<CliResult<_>>()?;

    let done: HashSet<String> = if out.exists() {
        drop_torn_tail(out)?;
        let file = std::fs::File::open(out)?;
        read_records(BufReader::new(file))?.into_iter().map(|r| r.id).collect()
    } else {
        HashSet::new()
    };

    // (λ index, δ) for every cell still missing, in grid order
    let mut pending = Vec::new();
    let mut skipped = 0;
    for (li, spec) in specs.iter().enumerate() {
        for &delta in &deltas {
            let probe = probe_id(spec, delta, resolution);
            if done.contains(&probe) {
                skipped += 1;
            } else {
                pending.push((li, delta));
            }
        }
    }
    if pending.is_empty() {
        return Ok(SweepSummary { written: 0, skipped });
    }

    let needed: Vec<usize> = {
        let mut v: Vec<usize> = pending.iter().map(|p| p.0).collect();
        v.dedup();
        v
    };
    let levels: BTreeMap<usize, Level> = needed
        .par_iter()
        .map(|&li| {
            Ok((
                li,
                Level {
                    coarse: Domain::build(&specs[li], &cfg, resolution / 2)?,
                    fine: Domain::build(&specs[li], &cfg, resolution)?,
                },
            ))
        })
        .collect::<CliResult<_>>()?;

    let mut sink = OpenOptions::new().create(true).append(true).open(out)?;
    let (tx, rx) = mpsc::channel::<(usize, CliResult<ExperimentRecord>)>();
    let mut written = 0;
    let mut failure = None;
    std::thread::scope(|scope| {
        let levels = &levels;
        let pending = &pending;
        let cfg = &cfg;
        scope.spawn(move || {
            pending.par_iter().enumerate().for_each_with(tx, |tx, (k, &(li, delta))| {
                let _ = tx.send((k, cell_record(&levels[&li], cfg, delta, seed)));
            });
        });
        // single writer: emit in grid order through a reorder buffer
        let mut buffer = BTreeMap::new();
        for (k, result) in rx {
            buffer.insert(k, result);
            while let Some(result) = buffer.remove(&written) {
                if failure.is_some() {
                    break;
                }
                match result.and_then(|r| write_record(&r, &mut sink).map_err(CliError::from)) {
                    Ok(()) => written += 1,
                    Err(e) => failure = Some(e),
                }
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(SweepSummary { written, skipped }),
    }
}

fn probe_id(spec: &FamilySpec, delta: f64, resolution: usize) -> String {
    format!(
        "sweep-{}-d{}-l{}-D{delta:.6}-r{resolution}",
        spec.tag,
        spec.dim,
        spec.lambda().map_or("none".to_string(), |l| format!("{l:.6}"))
    )
}
