//! Minimal line-plot SVG output.

use std::fmt::Write;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Shaded x interval, e.g. a known satisfying region.
    pub band: Option<(f64, f64)>,
}

const W: f64 = 360.0;
const H: f64 = 280.0;
const ML: f64 = 56.0;
const MR: f64 = 12.0;
const MT: f64 = 28.0;
const MB: f64 = 44.0;

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn panel(out: &mut String, p: &Panel, ox: f64) {
    let (x0, x1) = bounds(p.series.iter().flat_map(|s| s.points.iter().map(|q| q.0)));
    let (y0, y1) = bounds(p.series.iter().flat_map(|s| s.points.iter().map(|q| q.1)));
    let pw = W - ML - MR;
    let ph = H - MT - MB;
    let sx = |x: f64| ox + ML + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MT + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="18" font-size="13" text-anchor="middle">{}</text>"#,
        ox + ML + pw / 2.0,
        esc(&p.title)
    );
    if let Some((a, b)) = p.band {
        let (a, b) = (a.max(x0), b.min(x1));
        if b > a {
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{MT:.2}" width="{:.2}" height="{ph:.2}" fill="#e8f4e8"/>"##,
                sx(a),
                sx(b) - sx(a)
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<rect x="{:.2}" y="{MT:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#,
        ox + ML
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{fx:.2}</text>"#,
            sx(fx),
            MT + ph + 14.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{fy:.3}</text>"#,
            ox + ML - 4.0,
            sy(fy) + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
        ox + ML + pw / 2.0,
        H - 10.0,
        esc(&p.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        ox + 12.0,
        MT + ph / 2.0,
        ox + 12.0,
        MT + ph / 2.0,
        esc(&p.y_label)
    );
    for (i, s) in p.series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|q| q.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if s.dashed { r#" stroke-dasharray="5,3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            pts.join(" "),
            s.color
        );
        let ly = MT + 12.0 + 14.0 * i as f64;
        let lx = ox + ML + pw - 90.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            ly - 3.0,
            lx + 16.0,
            ly - 3.0,
            s.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{ly:.2}" font-size="10">{}</text>"#,
            lx + 20.0,
            esc(&s.label)
        );
    }
}

/// Panels side by side in one SVG document.
pub fn render(panels: &[Panel]) -> String {
    let width = W * panels.len() as f64;
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{H:.0}" viewBox="0 0 {width:.0} {H:.0}" font-family="sans-serif">"#
    );
    out.push('\n');
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    for (i, p) in panels.iter().enumerate() {
        panel(&mut out, p, W * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_deterministically() {
        let p = Panel {
            title: "psat".into(),
            x_label: "a".into(),
            y_label: "p".into(),
            series: vec![Series {
                label: "x<y".into(),
                color: "black",
                points: vec![(0.0, 0.0), (1.0, 1.0), (2.0, f64::NAN)],
                dashed: false,
            }],
            band: Some((0.5, 1.5)),
        };
        let a = render(&[p.clone(), p.clone()]);
        assert_eq!(a, render(&[p.clone(), p]));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("x&lt;y"));
        assert_eq!(a.matches("<polyline").count(), 2);
    }
}
