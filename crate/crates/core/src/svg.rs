//! Minimal SVG writer for spectrum scatter plots and node-value heatmaps.

use std::fmt::Write as _;

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height, body: String::new() }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}"/>"#);
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="1"/>"#
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.1}" font-family="sans-serif" text-anchor="{anchor}">{}</text>"#,
            escape(content)
        );
    }

    pub fn render(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Stem-free scatter of `(variation, magnitude)` pairs.
pub fn spectrum_plot(title: &str, x_label: &str, points: &[(f64, f64)]) -> String {
    let (w, h) = (480.0, 320.0);
    let (left, right, top, bottom) = (56.0, 16.0, 32.0, 44.0);
    let mut svg = Svg::new(w, h);
    let x_max = points.iter().map(|p| p.0).fold(0.0, f64::max).max(1e-12);
    let y_max = points.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-12);
    let px = |x: f64| left + (w - left - right) * x / x_max;
    let py = |y: f64| h - bottom - (h - top - bottom) * y / y_max;
    svg.line(left, h - bottom, w - right, h - bottom, "black");
    svg.line(left, top, left, h - bottom, "black");
    svg.text(w / 2.0, 20.0, 14.0, "middle", title);
    svg.text(w / 2.0, h - 10.0, 12.0, "middle", x_label);
    svg.text(left - 6.0, top + 4.0, 10.0, "end", &format!("{y_max:.3}"));
    svg.text(left - 6.0, h - bottom, 10.0, "end", "0");
    svg.text(w - right, h - bottom + 14.0, 10.0, "end", &format!("{x_max:.3}"));
    for &(x, y) in points {
        svg.line(px(x), py(0.0), px(x), py(y), "#9ab");
        svg.circle(px(x), py(y), 3.0, "#1f4e79");
    }
    svg.render()
}

fn diverging(t: f64) -> String {
    // t in [-1, 1]: blue for negative, red for positive
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

/// One row of cells per labelled signal, colored by value relative to the
/// largest magnitude in that row.
pub fn heatmap(title: &str, rows: &[(String, Vec<f64>)]) -> String {
    let n = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let cell = 18.0;
    let label_w = 120.0;
    let (w, h) = (label_w + cell * n as f64 + 16.0, 40.0 + cell * rows.len() as f64 + 16.0);
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 20.0, 14.0, "middle", title);
    for (r, (label, values)) in rows.iter().enumerate() {
        let y = 32.0 + cell * r as f64;
        svg.text(label_w - 6.0, y + cell * 0.7, 10.0, "end", label);
        let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        for (i, v) in values.iter().enumerate() {
            svg.rect(label_w + cell * i as f64, y, cell - 1.0, cell - 1.0, &diverging(v / scale));
        }
    }
    svg.render()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_shape() {
        let doc = spectrum_plot("A <test>", "variation", &[(0.0, 1.0), (0.5, 0.25)]);
        assert!(doc.starts_with("<svg "));
        assert!(doc.ends_with("</svg>\n"));
        assert!(doc.contains("A &lt;test&gt;"));
        assert_eq!(doc.matches("<circle").count(), 2);
    }

    #[test]
    fn heatmap_cells() {
        let doc = heatmap("h", &[("s".into(), vec![1.0, -1.0, 0.0])]);
        assert!(doc.contains("#ff0000") && doc.contains("#0000ff") && doc.contains("#ffffff"));
        assert_eq!(doc.matches("<rect").count(), 4);
    }
}
