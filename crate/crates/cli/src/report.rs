//! CSV tables and the (λ, δ) phase-diagram SVG derived from a record stream.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use fractform_core::simsys::SimilaritySystem;
use fractform_core::{critical_delta, similarity_dimension, ExperimentRecord, Family};

use crate::error::{CliError, CliResult};
use crate::sweep::VANISHING;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const CURVE_SAMPLES: usize = 400;

/// One row per record; output and tolerance columns are the union over the stream.
pub fn csv_table(records: &[ExperimentRecord]) -> String {
    let outputs: BTreeSet<&str> = records.iter().flat_map(|r| r.outputs.keys().map(String::as_str)).collect();
    let tolerances: BTreeSet<&str> = records.iter().flat_map(|r| r.tolerances.keys().map(String::as_str)).collect();
    let mut out = String::from("id,version,family,lambda,depth,dim,s,delta,delta_c,resolution,operation,seed,wall_time,verdict");
    for k in &outputs {
        write!(out, ",{k}").unwrap();
    }
    for k in &tolerances {
        write!(out, ",tol_{k}").unwrap();
    }
    out.push('\n');
    for r in records {
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.id,
            r.version,
            r.family,
            r.lambda.map_or(String::new(), |l| l.to_string()),
            r.depth,
            r.dim,
            r.s,
            r.delta,
            r.delta_c,
            r.resolution,
            r.operation,
            r.seed,
            r.wall_time,
            r.verdict.as_deref().unwrap_or(""),
        )
        .unwrap();
        for k in &outputs {
            write!(out, ",{}", r.outputs.get(*k).map_or(String::new(), |v| v.to_string())).unwrap();
        }
        for k in &tolerances {
            write!(out, ",{}", r.tolerances.get(*k).map_or(String::new(), |v| v.to_string())).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Axis-aligned map from data coordinates to the plot area.
#[derive(Debug, Clone, Copy)]
struct Axes {
    lambda: (f64, f64),
    delta: (f64, f64),
}

impl Axes {
    fn x(&self, lambda: f64) -> f64 {
        LEFT + (lambda - self.lambda.0) / (self.lambda.1 - self.lambda.0) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, delta: f64) -> f64 {
        HEIGHT - BOTTOM - (delta - self.delta.0) / (self.delta.1 - self.delta.0) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Cell edges for sorted centers: midpoints, with half-steps at the ends.
fn edges(centers: &[f64]) -> Vec<f64> {
    if centers.len() == 1 {
        let c = centers[0];
        let half = if c == 0.0 { 0.05 } else { 0.05 * c.abs() };
        return vec![c - half, c + half];
    }
    let n = centers.len();
    let mut e = Vec::with_capacity(n + 1);
    e.push(centers[0] - 0.5 * (centers[1] - centers[0]));
    for w in centers.windows(2) {
        e.push(0.5 * (w[0] + w[1]));
    }
    e.push(centers[n - 1] + 0.5 * (centers[n - 1] - centers[n - 2]));
    e
}

fn unique_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    v
}

fn index_of(sorted: &[f64], x: f64) -> usize {
    sorted
        .iter()
        .position(|&v| (v - x).abs() <= 1e-12 * x.abs().max(1.0))
        .expect("value taken from the same records")
}

/// Critical curve `δ_c(λ)` for the family of the sweep, sampled over `[lo, hi]`.
fn critical_curve(family: &str, dim: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut lambdas: Vec<f64> = (0..=CURVE_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / CURVE_SAMPLES as f64)
        .collect();
    // include the quarter exactly when in range (s = d/2 for the Cantor dust)
    if lo < 0.25 && 0.25 < hi {
        lambdas.push(0.25);
        lambdas.sort_by(f64::total_cmp);
    }
    lambdas
        .into_iter()
        .filter_map(|l| {
            let fam = Family::from_tag(family, Some(l)).ok()?;
            let sys = SimilaritySystem::for_family(fam, dim).ok()?;
            let s = similarity_dimension(&sys, 1e-13).ok()?;
            Some((l, critical_delta(s, dim)))
        })
        .collect()
}

/// Heatmap of sweep verdicts over (λ, δ) with `δ = δ_c(λ)` overlaid.
pub fn phase_svg(records: &[ExperimentRecord]) -> CliResult<String> {
    let sweep: Vec<&ExperimentRecord> = records
        .iter()
        .filter(|r| r.verdict.is_some() && r.lambda.is_some())
        .collect();
    let first = sweep
        .first()
        .ok_or_else(|| CliError::config("record stream has no sweep records with verdicts"))?;
    let (family, dim) = (first.family.clone(), first.dim);
    if sweep.iter().any(|r| r.family != family || r.dim != dim) {
        return Err(CliError::config("sweep records mix families or dimensions"));
    }
    let lambdas = unique_sorted(sweep.iter().map(|r| r.lambda.unwrap()));
    let deltas = unique_sorted(sweep.iter().map(|r| r.delta));
    let (le, de) = (edges(&lambdas), edges(&deltas));
    let axes = Axes {
        lambda: (le[0], *le.last().unwrap()),
        delta: (de[0], *de.last().unwrap()),
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-lambda-range="{} {}" data-delta-range="{} {}" data-plot-box="{LEFT} {TOP} {} {}">"#,
        axes.lambda.0,
        axes.lambda.1,
        axes.delta.0,
        axes.delta.1,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM,
    )
    .unwrap();
    writeln!(
        svg,
        r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath></defs>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(svg, r#"<g class="cells">"#).unwrap();
    for r in &sweep {
        let i = index_of(&lambdas, r.lambda.unwrap());
        let j = index_of(&deltas, r.delta);
        let (x0, x1) = (axes.x(le[i]), axes.x(le[i + 1]));
        let (y0, y1) = (axes.y(de[j + 1]), axes.y(de[j]));
        let vanishing = r.verdict.as_deref() == Some(VANISHING);
        let fill = if vanishing { "#3b6fb6" } else { "#e0913a" };
        writeln!(
            svg,
            r#"<rect x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="{fill}"><title>{}: {}</title></rect>"#,
            x1 - x0,
            y1 - y0,
            r.id,
            r.verdict.as_deref().unwrap_or(""),
        )
        .unwrap();
    }
    writeln!(svg, "</g>").unwrap();

    let curve = critical_curve(&family, dim, axes.lambda.0.max(1e-6), axes.lambda.1);
    let points: Vec<String> = curve
        .iter()
        .map(|&(l, d)| format!("{:.4},{:.4}", axes.x(l), axes.y(d)))
        .collect();
    writeln!(
        svg,
        r#"<polyline class="critical" clip-path="url(#plot)" fill="none" stroke="black" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    )
    .unwrap();

    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    writeln!(svg, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0).unwrap();
    for &l in &lambdas {
        writeln!(svg, r#"<text x="{:.2}" y="{}" font-size="11" text-anchor="middle">{l:.3}</text>"#, axes.x(l), y1 + 16.0).unwrap();
    }
    for &d in &deltas {
        writeln!(svg, r#"<text x="{}" y="{:.2}" font-size="11" text-anchor="end">{d:.2}</text>"#, x0 - 6.0, axes.y(d) + 4.0).unwrap();
    }
    writeln!(svg, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">λ</text>"#, 0.5 * (x0 + x1), HEIGHT - 12.0).unwrap();
    writeln!(svg, r#"<text x="18" y="{}" font-size="13" text-anchor="middle">δ</text>"#, 0.5 * (y0 + y1)).unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="20" font-size="13" text-anchor="middle">{family}, d = {dim}: capacity trend (blue vanishing, orange positive), line δ = δc(λ)</text>"#,
        0.5 * (x0 + x1)
    )
    .unwrap();
    svg.push_str("</svg>\n");
    Ok(svg)
}
