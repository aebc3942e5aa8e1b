//! Result emission: the curve CSV, a self-contained SVG plot, and the JSON
//! run manifest.

use crate::analysis::ModelSelectionReport;
use crate::error::{Error, Result};
use crate::experiment::{EiCurve, ExperimentConfig, ScalePoint};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "system,block_size,ei_mean_bits,ei_sem_bits,replicates,seed";

/// Renders a curve as CSV: the pinned header plus one row per scale.
/// Floats use the shortest representation that parses back to the same
/// value, so emit/parse is an exact round trip.
pub fn emit_csv(curve: &EiCurve) -> Result<String> {
    if curve.points.is_empty() {
        return Err(Error::Config("cannot emit an empty curve".into()));
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        if !p.ei_mean_bits.is_finite() || !p.ei_sem_bits.is_finite() {
            return Err(Error::Config(format!("non-finite EI at block size {}", p.block_size)));
        }
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            curve.system, p.block_size, p.ei_mean_bits, p.ei_sem_bits, p.replicates, curve.master_seed
        ));
    }
    Ok(out)
}

/// Parses CSV produced by [`emit_csv`]. The fingerprint and per-scale
/// degeneracy counters have no CSV columns and come back empty.
pub fn parse_csv(text: &str) -> Result<EiCurve> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end() == CSV_HEADER => {}
        Some((_, first)) => {
            return Err(Error::Parse(format!("line 1: expected header `{CSV_HEADER}`, got `{first}`")))
        }
        None => return Err(Error::Parse("empty input".into())),
    }
    let mut system: Option<String> = None;
    let mut seed: Option<u64> = None;
    let mut points = Vec::new();
    for (idx, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!("line {lineno}: expected 6 fields, got {}", fields.len())));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse(format!("line {lineno}: bad {what} `{s}`")))
        };
        let parse_u = |s: &str, what: &str| -> Result<u64> {
            s.parse().map_err(|_| Error::Parse(format!("line {lineno}: bad {what} `{s}`")))
        };
        match &system {
            None => system = Some(fields[0].to_string()),
            Some(sys) if sys == fields[0] => {}
            Some(sys) => {
                return Err(Error::Parse(format!(
                    "line {lineno}: mixed systems `{sys}` and `{}` in one curve",
                    fields[0]
                )))
            }
        }
        let row_seed = parse_u(fields[5], "seed")?;
        match seed {
            None => seed = Some(row_seed),
            Some(s) if s == row_seed => {}
            Some(s) => {
                return Err(Error::Parse(format!("line {lineno}: mixed seeds {s} and {row_seed}")))
            }
        }
        points.push(ScalePoint {
            block_size: parse_u(fields[1], "block_size")? as usize,
            ei_mean_bits: parse_f(fields[2], "ei_mean_bits")?,
            ei_sem_bits: parse_f(fields[3], "ei_sem_bits")?,
            replicates: parse_u(fields[4], "replicates")? as usize,
            degenerate_trials: 0,
        });
    }
    if points.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(EiCurve {
        system: system.unwrap(),
        points,
        config_fingerprint: String::new(),
        master_seed: seed.unwrap(),
    })
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 48.0;

/// Scatter plot with +-1 s.e.m. error bars on a log2 block-size axis,
/// annotated with the selected peak (or the winning monotone shape). Pure
/// inline SVG: no scripts, stylesheets, fonts, or external references.
pub fn emit_svg(curve: &EiCurve, report: Option<&ModelSelectionReport>) -> Result<String> {
    if curve.points.is_empty() {
        return Err(Error::Config("cannot plot an empty curve".into()));
    }
    let mut pts: Vec<&ScalePoint> = curve.points.iter().collect();
    pts.sort_by_key(|p| p.block_size);
    for p in &pts {
        if !p.ei_mean_bits.is_finite() || !p.ei_sem_bits.is_finite() || p.block_size == 0 {
            return Err(Error::Config(format!("unplottable point at block size {}", p.block_size)));
        }
    }
    let xs: Vec<f64> = pts.iter().map(|p| (p.block_size as f64).log2()).collect();
    let (x_min, x_max) = (xs[0] - 0.5, xs[xs.len() - 1] + 0.5);
    let y_top = pts
        .iter()
        .map(|p| p.ei_mean_bits + p.ei_sem_bits)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(1e-3);
    let (y_min, y_max) = (0.0, y_top * 1.08);

    let to_x = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * (SVG_W - MARGIN_L - MARGIN_R);
    let to_y = |y: f64| SVG_H - MARGIN_B - (y - y_min) / (y_max - y_min) * (SVG_H - MARGIN_T - MARGIN_B);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SVG_W} {SVG_H}\" \
         font-family=\"monospace\" font-size=\"12\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>\n"
    ));

    // Axes.
    let x0 = to_x(x_min);
    let x1 = to_x(x_max);
    let y0 = to_y(y_min);
    let y1 = to_y(y_max);
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    for (p, &x) in pts.iter().zip(&xs) {
        let px = to_x(x);
        s.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{y0}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>\n",
            y0 + 4.0
        ));
        s.push_str(&format!(
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            y0 + 18.0,
            p.block_size
        ));
    }
    let y_ticks = 5;
    for t in 0..=y_ticks {
        let v = y_min + (y_max - y_min) * t as f64 / y_ticks as f64;
        let py = to_y(v);
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{x0}\" y2=\"{py}\" stroke=\"black\"/>\n",
            x0 - 4.0
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{v:.2}</text>\n",
            x0 - 8.0,
            py + 4.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">block size b (log2 axis)</text>\n",
        (x0 + x1) / 2.0,
        SVG_H - 10.0
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">EI (bits)</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));

    // Mean polyline under the markers.
    let path: Vec<String> =
        pts.iter().zip(&xs).map(|(p, &x)| format!("{},{}", to_x(x), to_y(p.ei_mean_bits))).collect();
    s.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
        path.join(" ")
    ));

    // Error bars with caps, then markers.
    for (p, &x) in pts.iter().zip(&xs) {
        let px = to_x(x);
        let lo = to_y(p.ei_mean_bits - p.ei_sem_bits);
        let hi = to_y(p.ei_mean_bits + p.ei_sem_bits);
        s.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{lo}\" x2=\"{px}\" y2=\"{hi}\" stroke=\"black\"/>\n"
        ));
        for y in [lo, hi] {
            s.push_str(&format!(
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"black\"/>\n",
                px - 3.0,
                px + 3.0
            ));
        }
        s.push_str(&format!(
            "<circle cx=\"{px}\" cy=\"{}\" r=\"3.5\" fill=\"steelblue\"/>\n",
            to_y(p.ei_mean_bits)
        ));
    }

    // Peak annotation from the model-selection report when available,
    // otherwise from the raw argmax.
    let annotation = match report {
        Some(r) => match r.peak_scale {
            Some(b) => {
                let ci = r
                    .peak_ci
                    .map(|(lo, hi)| format!(" (95% CI {lo}..{hi})"))
                    .unwrap_or_default();
                Some((b, format!("peak b={b}{ci}")))
            }
            None => None,
        },
        None => pts
            .iter()
            .max_by(|a, b| a.ei_mean_bits.partial_cmp(&b.ei_mean_bits).unwrap())
            .map(|p| (p.block_size, format!("max b={}", p.block_size))),
    };
    if let Some((b, label)) = annotation {
        let px = to_x((b as f64).log2());
        s.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{y0}\" x2=\"{px}\" y2=\"{y1}\" stroke=\"firebrick\" \
             stroke-dasharray=\"4 3\"/>\n"
        ));
        s.push_str(&format!(
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\" fill=\"firebrick\">{label}</text>\n",
            y1 - 6.0
        ));
    } else if let Some(r) = report {
        let shape = match r.best_model {
            crate::analysis::FitModel::MonotoneIncreasing => "monotone increasing",
            crate::analysis::FitModel::MonotoneDecreasing => "monotone decreasing",
            crate::analysis::FitModel::Unimodal => "unimodal",
        };
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"firebrick\">{shape}</text>\n",
            x0 + 8.0,
            y1 + 14.0
        ));
    }
    let degenerate: usize = pts.iter().map(|p| p.degenerate_trials).sum();
    if degenerate > 0 {
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"darkorange\">{degenerate} degenerate trials dropped</text>\n",
            x0 + 8.0,
            y1 + 28.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"16\" text-anchor=\"end\">{} seed={}</text>\n",
        SVG_W - 8.0,
        curve.system,
        curve.master_seed
    ));
    s.push_str("</svg>\n");
    Ok(s)
}

/// Provenance record emitted next to every simulation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub package_version: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub config_fingerprint: String,
    pub wall_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, wall_seconds: f64, outputs: Vec<String>) -> Self {
        Self {
            format_version: 1,
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            master_seed: config.master_seed,
            config_fingerprint: config.fingerprint(),
            wall_seconds,
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
