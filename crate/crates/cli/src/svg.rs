//! Minimal static SVG figures.

use std::fmt::Write;

use concyclic_core::Complex64;

enum Item {
    Line { pts: Vec<Complex64>, stroke: &'static str, width: f64, closed: bool },
    Dot { at: Complex64, fill: &'static str, r: f64 },
}

#[derive(Default)]
pub struct Figure {
    items: Vec<Item>,
}

impl Figure {
    pub fn polyline(&mut self, pts: Vec<Complex64>, stroke: &'static str, width: f64) -> &mut Self {
        self.items.push(Item::Line { pts, stroke, width, closed: false });
        self
    }

    pub fn polygon(&mut self, pts: Vec<Complex64>, stroke: &'static str, width: f64) -> &mut Self {
        self.items.push(Item::Line { pts, stroke, width, closed: true });
        self
    }

    pub fn dot(&mut self, at: Complex64, fill: &'static str, r: f64) -> &mut Self {
        self.items.push(Item::Dot { at, fill, r });
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut take = |z: &Complex64| {
            if z.re.is_finite() && z.im.is_finite() {
                b = (b.0.min(z.re), b.1.min(z.im), b.2.max(z.re), b.3.max(z.im));
            }
        };
        for item in &self.items {
            match item {
                Item::Line { pts, .. } => pts.iter().for_each(&mut take),
                Item::Dot { at, .. } => take(at),
            }
        }
        if !b.0.is_finite() {
            return (-1.0, -1.0, 1.0, 1.0);
        }
        b
    }

    /// Renders with y pointing up; line widths are fractions of the extent.
    pub fn render(&self, size: f64) -> String {
        let (x0, y0, x1, y1) = self.bounds();
        let extent = (x1 - x0).max(y1 - y0).max(1e-12);
        let pad = 0.05 * extent;
        let scale = size / (extent + 2.0 * pad);
        let w = (x1 - x0 + 2.0 * pad) * scale;
        let h = (y1 - y0 + 2.0 * pad) * scale;
        let map = |z: &Complex64| ((z.re - x0 + pad) * scale, (y1 + pad - z.im) * scale);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for item in &self.items {
            match item {
                Item::Line { pts, stroke, width, closed } => {
                    let coords: Vec<String> = pts
                        .iter()
                        .map(|z| {
                            let (x, y) = map(z);
                            format!("{x:.2},{y:.2}")
                        })
                        .collect();
                    let tag = if *closed { "polygon" } else { "polyline" };
                    let _ = writeln!(
                        out,
                        r#"<{tag} points="{}" fill="none" stroke="{stroke}" stroke-width="{:.2}"/>"#,
                        coords.join(" "),
                        width * size
                    );
                }
                Item::Dot { at, fill, r } => {
                    let (x, y) = map(at);
                    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{fill}"/>"#, r * size);
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}
