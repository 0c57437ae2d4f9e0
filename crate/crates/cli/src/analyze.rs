//! `analyze`: the propagation study with raw sample buffers, fitted density
//! curves and a bandwidth summary written as CSV.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use colreg_risk::density::{
    fit_with_selector, isj, silverman, unwrap_around_mean, BandwidthSelector, DensityEstimate, GridSearch, Topology,
};
use colreg_risk::estimator::{propagation_study, PropagationSetup};
use colreg_risk::Exec;

use crate::{bearing_label, csv_f64, CliError, CliResult};

/// Points per density curve on the line.
const LINE_POINTS: usize = 512;
/// One point per half degree on the circle.
const CIRCLE_POINTS: usize = 721;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub setup: PropagationSetup,
    pub out_dir: PathBuf,
    pub selector: BandwidthSelector,
}

struct Quantity<'a> {
    name: &'static str,
    column: &'static str,
    samples: &'a [f64],
    topology: Topology,
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

fn opt(x: Option<f64>) -> String {
    x.map(csv_f64).unwrap_or_default()
}

/// Runs the study and writes all files; returns their paths in write order.
pub fn run_analysis(opts: &AnalyzeOptions, exec: Exec) -> CliResult<Vec<PathBuf>> {
    let buffers = propagation_study(&opts.setup, exec).map_err(|e| CliError::numeric("propagation study", e))?;
    fs::create_dir_all(&opts.out_dir).map_err(|e| CliError::io(&opts.out_dir, e))?;

    let mut written = Vec::new();
    let mut summary = vec!["quantity,bearing,n,h_silverman,h_isj,h_grid,h_selected,selector,fell_back".to_string()];
    for buf in &buffers {
        let label = bearing_label(buf.bearing);
        let quantities = [
            Quantity {
                name: "tcpa",
                column: "tcpa_s",
                samples: &buf.tcpa,
                topology: Topology::Line,
            },
            Quantity {
                name: "dcpa",
                column: "dcpa_m",
                samples: &buf.dcpa,
                topology: Topology::Line,
            },
            Quantity {
                name: "bearing",
                column: "bearing_deg",
                samples: &buf.relative_bearing,
                topology: Topology::Circle360,
            },
        ];
        for q in &quantities {
            let raw = opts.out_dir.join(format!("{}_{label}.csv", q.name));
            write_file(&raw, |w| {
                writeln!(w, "{}", q.column)?;
                q.samples.iter().try_for_each(|x| writeln!(w, "{}", csv_f64(*x)))
            })?;
            written.push(raw);

            let context = format!("{} density at bearing {label}", q.name);
            let (density, chosen) = fit_with_selector(q.samples, q.topology, opts.selector, exec)
                .map_err(|e| CliError::numeric(&context, e))?;
            let curve = opts.out_dir.join(format!("kde_{}_{label}.csv", q.name));
            write_file(&curve, |w| write_curve(w, &density))?;
            written.push(curve);

            let basis = match q.topology {
                Topology::Line => q.samples.to_vec(),
                Topology::Circle360 => unwrap_around_mean(q.samples),
            };
            let h_grid = match chosen.selector {
                BandwidthSelector::Grid(_) if !chosen.degenerate => Some(chosen.h),
                _ => None,
            };
            summary.push(format!(
                "{},{label},{},{},{},{},{},{},{}",
                q.name,
                q.samples.len(),
                opt(silverman(&basis).ok()),
                opt(isj(&basis).ok()),
                opt(h_grid),
                csv_f64(chosen.h),
                selector_name(chosen.selector),
                chosen.fell_back
            ));
        }
    }
    let path = opts.out_dir.join("bandwidths.csv");
    write_file(&path, |w| summary.iter().try_for_each(|l| writeln!(w, "{l}")))?;
    written.push(path);
    Ok(written)
}

fn write_curve<W: Write>(w: &mut W, d: &DensityEstimate) -> std::io::Result<()> {
    match d.topology() {
        Topology::Circle360 => d.write_csv(w, 0.0, 360.0, CIRCLE_POINTS),
        Topology::Line => {
            let s = d.samples();
            let (lo, hi) = s
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            let pad = 4.0 * d.bandwidth();
            d.write_csv(w, lo - pad, hi + pad, LINE_POINTS)
        }
    }
}

pub fn selector_name(s: BandwidthSelector) -> &'static str {
    match s {
        BandwidthSelector::Silverman => "silverman",
        BandwidthSelector::Isj => "isj",
        BandwidthSelector::Grid(_) => "grid",
    }
}

/// Parses `isj`, `silverman` or `grid` (the default search grid).
pub fn parse_selector(s: &str) -> Option<BandwidthSelector> {
    match s {
        "isj" => Some(BandwidthSelector::Isj),
        "silverman" => Some(BandwidthSelector::Silverman),
        "grid" => Some(BandwidthSelector::Grid(GridSearch::default())),
        _ => None,
    }
}
