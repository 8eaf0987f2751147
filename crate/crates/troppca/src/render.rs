//! SVG scatter plots of a three-vertex fit. Each projected sample sits at
//! `(λ₂ - λ₁, λ₃ - λ₁)`.

use std::collections::BTreeMap;
use std::fmt::Write;

use troppca_core::ultrametric::topology_of_point;
use troppca_core::TropicalPoint;

use crate::error::{AppError, AppResult};
use crate::newick::topology_newick;
use crate::report::FitReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorMode {
    ByTopology,
    ByGroup,
    /// By topology, with the rarest topologies (together at most
    /// `percentile` percent of the samples) drawn black.
    LowerPercentileBlack,
}

impl std::str::FromStr for ColorMode {
    type Err = AppError;

    fn from_str(s: &str) -> AppResult<Self> {
        match s {
            "by-topology" => Ok(ColorMode::ByTopology),
            "by-group" => Ok(ColorMode::ByGroup),
            "lower-percentile-black" => Ok(ColorMode::LowerPercentileBlack),
            other => Err(AppError::Usage(format!(
                "unknown color mode '{other}' (by-topology, by-group, lower-percentile-black)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    pub mode: ColorMode,
    pub percentile: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self { width: 800, height: 600, mode: ColorMode::ByTopology, percentile: 5.0 }
    }
}

impl RenderSpec {
    pub fn validate(&self) -> AppResult<()> {
        if !(self.percentile > 0.0 && self.percentile < 100.0) {
            return Err(AppError::Usage(format!("percentile must lie in (0, 100), got {}", self.percentile)));
        }
        if self.width < 200 || self.height < 100 {
            return Err(AppError::Usage("image must be at least 200 x 100 pixels".into()));
        }
        Ok(())
    }
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];
const BLACK: &str = "#000000";

fn color(i: usize) -> String {
    match PALETTE.get(i) {
        Some(c) => c.to_string(),
        None => format!("hsl({:.1},65%,45%)", (i as f64 * 137.508) % 360.0),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Category key of every sample under `mode`.
pub fn categories(fit: &FitReport, mode: ColorMode) -> AppResult<Vec<String>> {
    let m = fit.polytope.m;
    fit.samples
        .iter()
        .map(|s| match mode {
            ColorMode::ByGroup => Ok(s.group.clone().unwrap_or_else(|| "ungrouped".to_string())),
            ColorMode::ByTopology | ColorMode::LowerPercentileBlack => {
                let p = TropicalPoint::new(s.projection.clone())?;
                let topo = topology_of_point(&p, m)
                    .map_err(|e| AppError::Numeric(format!("projection of sample {} is not ultrametric: {e}", s.index)))?;
                Ok(topology_newick(&topo, &fit.polytope.labels))
            }
        })
        .collect()
}

/// Color per category: most frequent first, ties broken by key.
pub fn assign_colors(keys: &[String], mode: ColorMode, percentile: f64) -> Vec<(String, usize, String)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    let mut order: Vec<(&str, usize)> = counts.into_iter().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let limit = percentile / 100.0 * keys.len() as f64;
    order
        .iter()
        .enumerate()
        .map(|(i, &(k, n))| {
            let rare_mass: usize = order.iter().filter(|o| o.1 <= n).map(|o| o.1).sum();
            let c = if mode == ColorMode::LowerPercentileBlack && rare_mass as f64 <= limit {
                BLACK.to_string()
            } else {
                color(i)
            };
            (k.to_string(), n, c)
        })
        .collect()
}

pub fn render_svg(fit: &FitReport, spec: &RenderSpec) -> AppResult<String> {
    spec.validate()?;
    if fit.polytope.vertices.len() != 3 || fit.samples.iter().any(|s| s.lambda.len() != 3) {
        return Err(AppError::Usage(format!(
            "render requires 3 vertices, the fit has {}",
            fit.polytope.vertices.len()
        )));
    }
    let keys = categories(fit, spec.mode)?;
    let legend = assign_colors(&keys, spec.mode, spec.percentile);
    let color_of: BTreeMap<&str, &str> = legend.iter().map(|(k, _, c)| (k.as_str(), c.as_str())).collect();

    let xy: Vec<(f64, f64)> = fit.samples.iter().map(|s| (s.lambda[1] - s.lambda[0], s.lambda[2] - s.lambda[0])).collect();
    let (w, h) = (spec.width as f64, spec.height as f64);
    let legend_w = (w * 0.35).min(320.0);
    let margin = 40.0;
    let plot_w = w - legend_w - 2.0 * margin;
    let plot_h = h - 2.0 * margin;
    let bounds = |f: fn(&(f64, f64)) -> f64| {
        let lo = xy.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = xy.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (xlo, xhi) = bounds(|p| p.0);
    let (ylo, yhi) = bounds(|p| p.1);
    let span = |lo: f64, hi: f64| if hi - lo > 1e-12 { hi - lo } else { 1.0 };
    let sx = |x: f64| if xhi - xlo > 1e-12 { margin + (x - xlo) / span(xlo, xhi) * plot_w } else { margin + plot_w / 2.0 };
    let sy = |y: f64| if yhi - ylo > 1e-12 { margin + plot_h - (y - ylo) / span(ylo, yhi) * plot_h } else { margin + plot_h / 2.0 };

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<rect x="{margin}" y="{margin}" width="{plot_w:.3}" height="{plot_h:.3}" fill="none" stroke="#cccccc"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12" text-anchor="middle">λ2 - λ1</text>"#,
        margin + plot_w / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="12" y="{:.3}" font-family="sans-serif" font-size="12" transform="rotate(-90 12 {:.3})" text-anchor="middle">λ3 - λ1</text>"#,
        margin + plot_h / 2.0,
        margin + plot_h / 2.0
    );
    let _ = writeln!(out, r#"<g id="points">"#);
    for ((x, y), (s, k)) in xy.iter().zip(fit.samples.iter().zip(&keys)) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="{}" fill-opacity="0.8"><title>sample {}</title></circle>"#,
            sx(*x),
            sy(*y),
            color_of[k.as_str()],
            s.index
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="legend" font-family="sans-serif" font-size="11">"#);
    let lx = w - legend_w + 10.0;
    for (i, (k, n, c)) in legend.iter().enumerate() {
        let ly = margin + 18.0 * i as f64;
        let _ = writeln!(out, r#"<rect x="{lx:.3}" y="{:.3}" width="10" height="10" fill="{c}"/>"#, ly);
        let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}">{} ({n})</text>"#, lx + 16.0, ly + 9.0, escape(k));
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rare_topologies_turn_black() {
        let mut keys: Vec<String> = vec!["a".into(); 97];
        keys.extend(["b".to_string(), "b".to_string(), "c".to_string()]);
        let legend = assign_colors(&keys, ColorMode::LowerPercentileBlack, 5.0);
        assert_eq!(legend[0].2, PALETTE[0]);
        assert_eq!(legend[1].2, BLACK);
        assert_eq!(legend[2].2, BLACK);
        let plain = assign_colors(&keys, ColorMode::ByTopology, 5.0);
        assert!(plain.iter().all(|l| l.2 != BLACK));
    }

    #[test]
    fn percentile_bounds() {
        assert!(RenderSpec { percentile: 0.0, ..RenderSpec::default() }.validate().is_err());
        assert!(RenderSpec { percentile: 100.0, ..RenderSpec::default() }.validate().is_err());
        assert!("nope".parse::<ColorMode>().is_err());
    }
}
