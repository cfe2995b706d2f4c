//! Minimal self-contained SVG line charts.
//!
//! No drawing dependency: the output is a single `<svg>` document with
//! axes, 1-2-5 ticks, a legend, and one polyline per series segment.
//! Everything is a pure function of the input data, so re-rendering the
//! same data yields byte-identical files.

use std::fmt::Write as _;

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: String,
    /// Polyline segments; a gap in the data starts a new segment.
    pub segments: Vec<Vec<(f64, f64)>>,
}

impl Series {
    pub fn contiguous(label: impl Into<String>, color: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            color: color.to_string(),
            segments: vec![points],
        }
    }

    fn points(&self) -> impl Iterator<Item = &(f64, f64)> {
        self.segments.iter().flatten()
    }
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 58.0;

/// Tick step from the 1-2-5 ladder giving roughly `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.abs().log10().floor());
    let norm = raw / mag;
    let factor = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let step = nice_step(hi - lo, 6.0);
    let first = (lo / step).ceil();
    let last = (hi / step).floor();
    (first as i64..=last as i64)
        .map(|k| {
            let v = k as f64 * step;
            if v == 0.0 {
                0.0 // avoid "-0"
            } else {
                v
            }
        })
        .collect()
}

fn fmt_tick(v: f64) -> String {
    // ticks are nice numbers; round away accumulated noise first
    let rounded = (v * 1e9).round() / 1e9;
    format!("{rounded}")
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render the chart. Returns `None` when no series carries any point.
pub fn render(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Option<String> {
    let mut xs = series.iter().flat_map(|s| s.points().map(|p| p.0));
    let (mut x_lo, mut x_hi) = {
        let first = xs.next()?;
        (first, first)
    };
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points() {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    if !y_lo.is_finite() {
        return None;
    }
    // anchor magnitude axes at zero when the data sits above it
    if y_lo > 0.0 && y_lo < 0.35 * y_hi {
        y_lo = 0.0;
    }
    if (y_hi - y_lo).abs() < 1e-300 {
        y_hi = y_lo + 1.0;
    }
    if (x_hi - x_lo).abs() < 1e-300 {
        x_hi = x_lo + 1.0;
    }
    let y_pad = 0.04 * (y_hi - y_lo);
    let (y_min, y_max) = (if y_lo == 0.0 { 0.0 } else { y_lo - y_pad }, y_hi + y_pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_px = |x: f64, y: f64| {
        (
            MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w,
            MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h,
        )
    };

    let mut out = String::with_capacity(16 * 1024);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        esc(title)
    );

    // gridlines and ticks
    for tx in ticks(x_lo, x_hi) {
        let (px, _) = to_px(tx, y_min);
        let _ = writeln!(
            out,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + plot_h + 18.0,
            fmt_tick(tx)
        );
    }
    for ty in ticks(y_min, y_max) {
        let (_, py) = to_px(x_lo, ty);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 8.0,
            py + 4.0,
            fmt_tick(ty)
        );
    }

    // axes
    let _ = writeln!(
        out,
        r#"<line x1="{l:.1}" y1="{t:.1}" x2="{l:.1}" y2="{b:.1}" stroke="black" stroke-width="1.5"/>"#,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        out,
        r#"<line x1="{l:.1}" y1="{b:.1}" x2="{r:.1}" y2="{b:.1}" stroke="black" stroke-width="1.5"/>"#,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        b = MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        esc(y_label)
    );

    // data
    for s in series {
        for segment in &s.segments {
            if segment.is_empty() {
                continue;
            }
            let mut path = String::with_capacity(segment.len() * 14);
            for (i, &(x, y)) in segment.iter().enumerate() {
                let (px, py) = to_px(x, y);
                let _ = write!(path, "{}{px:.2},{py:.2}", if i == 0 { "" } else { " " });
            }
            if segment.len() == 1 {
                let (px, py) = to_px(segment[0].0, segment[0].1);
                let _ = writeln!(
                    out,
                    r#"<circle cx="{px:.2}" cy="{py:.2}" r="2.5" fill="{}"/>"#,
                    s.color
                );
            } else {
                let _ = writeln!(
                    out,
                    r#"<polyline points="{path}" fill="none" stroke="{}" stroke-width="1.8"/>"#,
                    s.color
                );
            }
        }
    }

    // legend, top-right inside the plot
    let legend_x = MARGIN_LEFT + plot_w - 150.0;
    let mut legend_y = MARGIN_TOP + 14.0;
    for s in series {
        let _ = writeln!(
            out,
            r#"<line x1="{legend_x:.1}" y1="{legend_y:.1}" x2="{:.1}" y2="{legend_y:.1}" stroke="{}" stroke-width="2.5"/>"#,
            legend_x + 26.0,
            s.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13">{}</text>"#,
            legend_x + 32.0,
            legend_y + 4.0,
            esc(&s.label)
        );
        legend_y += 18.0;
    }

    out.push_str("</svg>\n");
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_render_nothing() {
        assert!(render("t", "x", "y", &[]).is_none());
        let empty = Series::contiguous("s", PALETTE[0], vec![]);
        assert!(render("t", "x", "y", &[empty]).is_none());
    }

    #[test]
    fn rendering_is_deterministic() {
        let s = Series::contiguous(
            "demo",
            PALETTE[0],
            (0..100)
                .map(|i| (i as f64, (i as f64 * 0.1).sin()))
                .collect(),
        );
        let a = render("demo", "x", "y", std::slice::from_ref(&s)).unwrap();
        let b = render("demo", "x", "y", &[s]).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert!(a.contains("polyline"));
    }

    #[test]
    fn ticks_cover_the_span_with_nice_steps() {
        let t = ticks(0.0, 359.0);
        assert!(t.contains(&0.0) && t.contains(&300.0));
        let t = ticks(0.0, 2.1);
        assert!(t.iter().any(|&v| (v - 2.0).abs() < 1e-12));
    }
}
