//! Minimal SVG line charts for asymmetry time series.

use std::fmt::Write;

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    /// `(frame, value)`; `None` values are skipped.
    pub points: Vec<(f64, Option<f64>)>,
}

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub y_range: (f64, f64),
    pub series: Vec<Series<'a>>,
    /// Horizontal reference lines `(value, label)`.
    pub thresholds: Vec<(f64, &'a str)>,
}

const W: f64 = 720.0;
const H: f64 = 360.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 120.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Chart<'_> {
    pub fn to_svg(&self) -> String {
        let xs = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
        let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        let (x0, x1) = if x0.is_finite() && x1 > x0 { (x0, x1) } else { (0.0, 1.0) };
        let (y0, y1) = self.y_range;
        let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let py = |y: f64| TOP + (1.0 - (y.clamp(y0, y1) - y0) / (y1 - y0)) * ph;

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="22" font-size="15" text-anchor="middle">{}</text>"#, W / 2.0, escape(self.title));
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
        );
        for k in 0..=4 {
            let y = y0 + (y1 - y0) * k as f64 / 4.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                py(y) + 4.0,
                tick(y)
            );
            let x = x0 + (x1 - x0) * k as f64 / 4.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
                px(x),
                TOP + ph + 16.0,
                tick(x)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 10.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(self.y_label)
        );
        for &(v, label) in &self.thresholds {
            let _ = writeln!(
                s,
                r##"<line class="threshold" x1="{LEFT}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
                LEFT + pw,
                y = py(v)
            );
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.2}" font-size="11">{}</text>"#, LEFT + pw + 6.0, py(v) + 4.0, escape(label));
        }
        for (k, series) in self.series.iter().enumerate() {
            let pts: Vec<String> =
                series.points.iter().filter_map(|&(x, y)| y.map(|y| format!("{:.2},{:.2}", px(x), py(y)))).collect();
            let _ = writeln!(
                s,
                r#"<polyline data-series="{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                escape(series.name),
                series.color,
                pts.join(" ")
            );
            let ly = TOP + 14.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{ly:.1}" font-size="11" fill="{}">{}</text>"#,
                LEFT + pw + 6.0,
                series.color,
                escape(series.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_well_formed_svg() {
        let chart = Chart {
            title: "a < b & c",
            x_label: "frame",
            y_label: "score",
            y_range: (0.0, 2.0),
            series: vec![
                Series { name: "one", color: "red", points: vec![(0.0, Some(0.5)), (1.0, None), (2.0, Some(1.5))] },
                Series { name: "two", color: "blue", points: vec![(0.0, Some(1.0)), (2.0, Some(1.0))] },
            ],
            thresholds: vec![(1.0, "1.0")],
        };
        let svg = chart.to_svg();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let lines: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("polyline")).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].attribute("points").unwrap().split(' ').count(), 2);
        assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("threshold")).count(), 1);
    }
}
