//! Minimal standalone SVG line plots.
//!
//! Each series is one `<polyline>`; series with a nonzero standard error
//! also get a shaded `<path class="band">`. An optional dashed
//! `<path class="guide">` has slope −1 in plot coordinates (after the log
//! transform), the reference for a 1:1 tradeoff.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::output::AggregateSeries;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxesSpec {
    pub log_x: bool,
    pub log_y: bool,
    pub x_label: String,
    pub y_label: String,
    pub title: String,
    pub guide_line: bool,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Maps plot coordinates (log₁₀ of the data on log axes) to pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotFrame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub log_x: bool,
    pub log_y: bool,
}

impl PlotFrame {
    pub fn plot_x(&self, x: f64) -> f64 {
        if self.log_x {
            x.log10()
        } else {
            x
        }
    }

    pub fn plot_y(&self, y: f64) -> f64 {
        if self.log_y {
            y.log10()
        } else {
            y
        }
    }

    /// Plot coordinates to pixels.
    pub fn to_pixel(&self, u: f64, v: f64) -> (f64, f64) {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        let px = LEFT + (u - x0) / (x1 - x0) * (WIDTH - LEFT - RIGHT);
        let py = HEIGHT - BOTTOM - (v - y0) / (y1 - y0) * (HEIGHT - TOP - BOTTOM);
        (px, py)
    }

    /// Pixels back to plot coordinates.
    pub fn from_pixel(&self, px: f64, py: f64) -> (f64, f64) {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        let u = x0 + (px - LEFT) / (WIDTH - LEFT - RIGHT) * (x1 - x0);
        let v = y0 + (HEIGHT - BOTTOM - py) / (HEIGHT - TOP - BOTTOM) * (y1 - y0);
        (u, v)
    }

    fn data_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        self.to_pixel(self.plot_x(x), self.plot_y(y))
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn validate(series: &[AggregateSeries], axes: &AxesSpec) -> Result<()> {
    if series.iter().all(|s| s.x.is_empty()) {
        return Err(HarnessError::Plot("nothing to plot".into()));
    }
    for s in series {
        if s.mean.len() != s.x.len() || s.std_err.len() != s.x.len() {
            return Err(HarnessError::Plot(format!("series {} has misaligned columns", s.label)));
        }
        for (&x, &y) in s.x.iter().zip(&s.mean) {
            if !x.is_finite() || !y.is_finite() {
                return Err(HarnessError::Plot(format!("series {} has a non-finite point", s.label)));
            }
            if axes.log_x && x <= 0.0 {
                return Err(HarnessError::Plot(format!("log x axis but series {} has x = {x}", s.label)));
            }
            if axes.log_y && y <= 0.0 {
                return Err(HarnessError::Plot(format!("log y axis but series {} has y = {y}", s.label)));
            }
        }
    }
    Ok(())
}

fn frame_for(series: &[AggregateSeries], axes: &AxesSpec) -> PlotFrame {
    let mut frame = PlotFrame { x_range: (0.0, 1.0), y_range: (0.0, 1.0), log_x: axes.log_x, log_y: axes.log_y };
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for s in series {
        for i in 0..s.x.len() {
            xs.push(frame.plot_x(s.x[i]));
            ys.push(frame.plot_y(s.mean[i]));
            let hi = s.mean[i] + s.std_err[i];
            ys.push(frame.plot_y(hi));
            let lo = s.mean[i] - s.std_err[i];
            if !axes.log_y || lo > 0.0 {
                ys.push(frame.plot_y(lo));
            }
        }
    }
    let range = |v: &[f64]| padded(v.iter().copied().fold(f64::INFINITY, f64::min), v.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    frame.x_range = range(&xs);
    frame.y_range = range(&ys);
    frame
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.round() as i64)
    } else if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 1000.0).round() / 1000.0)
    }
}

fn ticks(range: (f64, f64), log: bool) -> Vec<f64> {
    if log && range.1 - range.0 >= 1.0 {
        (range.0.ceil() as i64..=range.1.floor() as i64).map(|k| k as f64).collect()
    } else {
        (0..=4).map(|i| range.0 + (range.1 - range.0) * (0.1 + 0.2 * i as f64)).collect()
    }
}

/// Renders the plot and returns the markup with the frame used.
pub fn render_svg(series: &[AggregateSeries], axes: &AxesSpec) -> Result<(String, PlotFrame)> {
    validate(series, axes)?;
    let frame = frame_for(series, axes);
    let mut svg = String::new();
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<defs><clipPath id="frame"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath></defs>"#);
    let _ = writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="white" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&axes.title));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 12.0, escape(&axes.x_label));
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(&axes.y_label)
    );
    for u in ticks(frame.x_range, axes.log_x) {
        let (px, _) = frame.to_pixel(u, frame.y_range.0);
        let _ = writeln!(svg, r#"<text x="{px:.3}" y="{}" text-anchor="middle">{}</text>"#, HEIGHT - BOTTOM + 18.0, tick_label(u, axes.log_x));
    }
    for v in ticks(frame.y_range, axes.log_y) {
        let (_, py) = frame.to_pixel(frame.x_range.0, v);
        let _ = writeln!(svg, r#"<text x="{}" y="{py:.3}" text-anchor="end">{}</text>"#, LEFT - 6.0, tick_label(v, axes.log_y));
    }

    let _ = writeln!(svg, r#"<g clip-path="url(#frame)">"#);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if s.std_err.iter().any(|e| *e > 0.0) {
            let mut d = String::new();
            for i in 0..s.x.len() {
                let (px, py) = frame.data_pixel(s.x[i], s.mean[i] + s.std_err[i]);
                let _ = write!(d, "{}{px:.3} {py:.3} ", if i == 0 { "M " } else { "L " });
            }
            for i in (0..s.x.len()).rev() {
                let lo = s.mean[i] - s.std_err[i];
                let (px, py) = if axes.log_y && lo <= 0.0 {
                    frame.to_pixel(frame.plot_x(s.x[i]), frame.y_range.0)
                } else {
                    frame.data_pixel(s.x[i], lo)
                };
                let _ = write!(d, "L {px:.3} {py:.3} ");
            }
            let _ = writeln!(svg, r#"<path class="band" d="{}Z" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, d);
        }
        let points: Vec<String> = (0..s.x.len())
            .map(|i| {
                let (px, py) = frame.data_pixel(s.x[i], s.mean[i]);
                format!("{px:.3},{py:.3}")
            })
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, points.join(" "));
    }
    if axes.guide_line {
        let (x0, x1) = frame.x_range;
        let yc = (frame.y_range.0 + frame.y_range.1) / 2.0;
        let xc = (x0 + x1) / 2.0;
        let (ax, ay) = frame.to_pixel(x0, yc + (xc - x0));
        let (bx, by) = frame.to_pixel(x1, yc - (x1 - xc));
        let _ = writeln!(
            svg,
            r#"<path class="guide" d="M {ax:.6} {ay:.6} L {bx:.6} {by:.6}" stroke="grey" stroke-dasharray="6,4" fill="none"/>"#
        );
    }
    let _ = writeln!(svg, "</g>");
    for (k, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" fill="{}">{}</text>"#,
            LEFT + 10.0,
            PALETTE[k % PALETTE.len()],
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok((svg, frame))
}

pub fn emit_svg_plot(series: &[AggregateSeries], axes: &AxesSpec, path: &Path) -> Result<PlotFrame> {
    let (svg, frame) = render_svg(series, axes)?;
    std::fs::write(path, svg).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(x: &[f64], y: &[f64], se: f64) -> AggregateSeries {
        AggregateSeries { x: x.to_vec(), mean: y.to_vec(), std_err: vec![se; x.len()], label: "s".into() }
    }

    #[test]
    fn one_polyline_per_series() {
        let (svg, _) = render_svg(&[series(&[1.0, 2.0], &[3.0, 4.0], 0.0)], &AxesSpec::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("class=\"band\"").count(), 0);
        let (svg, _) = render_svg(&[series(&[1.0, 2.0], &[3.0, 4.0], 0.1), series(&[1.0], &[2.0], 0.0)], &AxesSpec::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("class=\"band\"").count(), 1);
    }

    #[test]
    fn log_axes_reject_nonpositive() {
        let axes = AxesSpec { log_y: true, ..Default::default() };
        assert!(matches!(render_svg(&[series(&[1.0, 2.0], &[0.0, 1.0], 0.0)], &axes), Err(HarnessError::Plot(_))));
        let axes = AxesSpec { log_x: true, ..Default::default() };
        assert!(render_svg(&[series(&[-1.0, 2.0], &[1.0, 1.0], 0.0)], &axes).is_err());
        assert!(render_svg(&[], &AxesSpec::default()).is_err());
        assert!(render_svg(&[series(&[], &[], 0.0)], &AxesSpec::default()).is_err());
    }

    #[test]
    fn pixel_transform_inverts() {
        let (_, frame) = render_svg(&[series(&[1.0, 100.0], &[5.0, 0.05], 0.0)], &AxesSpec { log_x: true, log_y: true, ..Default::default() }).unwrap();
        for (u, v) in [(0.0, 0.0), (1.3, -0.7), (2.0, 1.0)] {
            let (px, py) = frame.to_pixel(u, v);
            let (u2, v2) = frame.from_pixel(px, py);
            assert!((u - u2).abs() < 1e-12 && (v - v2).abs() < 1e-12);
        }
    }
}
