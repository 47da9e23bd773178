//! Minimal SVG charts: power curves with the combined test drawn as a
//! connected line, and the p-value panels of the group-comparison demo.

use std::fmt::Write as _;

use multigof::studies::{AnovaDemo, PowerResult, RC_LABEL};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf",
];
const RC_COLOR: &str = "#d62728";

/// Plot area in pixels with data ranges.
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(left: f64, top: f64, width: f64, height: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        let x = if x.0 < x.1 { x } else { (x.0 - 0.5, x.0 + 0.5) };
        Frame {
            left,
            top,
            width,
            height,
            x,
            y,
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.left + (v - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, v: f64) -> f64 {
        self.top + self.height - (v - self.y.0) / (self.y.1 - self.y.0) * self.height
    }

    fn axes(&self, s: &mut String, xlabel: &str, ylabel: &str) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        writeln!(
            s,
            r##"<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="#000"/>"##
        )
        .unwrap();
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = self.x.0 + f * (self.x.1 - self.x.0);
            let yv = self.y.0 + f * (self.y.1 - self.y.0);
            let (xp, yp) = (self.px(xv), self.py(yv));
            writeln!(
                s,
                r##"<line x1="{xp:.1}" y1="{b}" x2="{xp:.1}" y2="{b2}" stroke="#000"/><text x="{xp:.1}" y="{ty}" font-size="11" text-anchor="middle">{}</text>"##,
                tick(xv),
                b = t + h,
                b2 = t + h + 4.0,
                ty = t + h + 17.0
            )
            .unwrap();
            writeln!(
                s,
                r##"<line x1="{l}" y1="{yp:.1}" x2="{l2}" y2="{yp:.1}" stroke="#000"/><text x="{tx}" y="{ty:.1}" font-size="11" text-anchor="end">{}</text>"##,
                tick(yv),
                l2 = l - 4.0,
                tx = l - 7.0,
                ty = yp + 4.0
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            l + w / 2.0,
            t + h + 34.0,
            escape(xlabel)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-size="12" text-anchor="middle" transform="rotate(-90 {x} {y})">{}</text>"#,
            escape(ylabel),
            x = l - 40.0,
            y = t + h / 2.0
        )
        .unwrap();
    }
}

fn tick(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    format!("{r}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn open(s: &mut String, title: &str) {
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    )
    .unwrap();
    writeln!(s, r##"<rect width="100%" height="100%" fill="#fff"/>"##).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="22" font-size="15" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
}

fn polyline(s: &mut String, pts: &[(f64, f64)], color: &str, width: f64) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
    writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

/// Power curves of one case at alpha index `ai`.
pub fn power_svg(r: &PowerResult, ai: usize) -> String {
    let mut s = String::new();
    open(&mut s, &format!("{} (alpha = {})", r.case, r.alphas[ai]));
    let lo = r.grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = r.grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f = Frame::new(70.0, 40.0, 500.0, 340.0, (lo, hi), (0.0, 1.0));
    f.axes(&mut s, "parameter", "power");
    let mut others = 0;
    for (li, label) in r.labels.iter().enumerate() {
        let pts: Vec<(f64, f64)> = r
            .grid
            .iter()
            .zip(&r.power[ai])
            .map(|(&g, row)| (f.px(g), f.py(row[li])))
            .collect();
        let (color, radius) = if label == RC_LABEL {
            polyline(&mut s, &pts, RC_COLOR, 2.0);
            (RC_COLOR, 3.5)
        } else {
            others += 1;
            (PALETTE[(others - 1) % PALETTE.len()], 2.5)
        };
        for (x, y) in &pts {
            writeln!(
                s,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="{radius}" fill="{color}"/>"#
            )
            .unwrap();
        }
        let ly = 50.0 + 16.0 * li as f64;
        writeln!(
            s,
            r#"<circle cx="592" cy="{:.1}" r="4" fill="{color}"/><text x="602" y="{ly:.1}" font-size="11">{}</text>"#,
            ly - 4.0,
            escape(label)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn histogram(s: &mut String, f: &Frame, values: &[f64], bins: usize, color: &str) {
    let mut counts = vec![0usize; bins];
    for &v in values {
        counts[((v * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let n = values.len().max(1) as f64;
    for (j, &c) in counts.iter().enumerate() {
        let density = c as f64 / n * bins as f64;
        let x0 = f.px(j as f64 / bins as f64);
        let x1 = f.px((j + 1) as f64 / bins as f64);
        let y = f.py(density.min(f.y.1));
        writeln!(
            s,
            r##"<rect x="{x0:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{color}" stroke="#fff"/>"##,
            x1 - x0,
            f.py(0.0) - y
        )
        .unwrap();
    }
    let one = f.py(1.0);
    writeln!(
        s,
        r##"<line x1="{}" y1="{one:.1}" x2="{}" y2="{one:.1}" stroke="#000" stroke-dasharray="4 3"/>"##,
        f.left,
        f.left + f.width
    )
    .unwrap();
}

/// Histograms of the raw and adjusted minima beside the adjustment curve.
pub fn demo_svg(demo: &AnovaDemo) -> String {
    const BINS: usize = 20;
    let mut s = String::new();
    open(
        &mut s,
        &format!(
            "{} observations, {} groups, {} comparisons",
            demo.n_obs, demo.n_groups, demo.comparisons
        ),
    );
    let peak = |v: &[f64]| {
        let mut c = [0usize; BINS];
        for &x in v {
            c[((x * BINS as f64) as usize).min(BINS - 1)] += 1;
        }
        let m = *c.iter().max().unwrap_or(&0) as f64 / v.len().max(1) as f64 * BINS as f64;
        m.max(1.5).ceil()
    };
    let top = peak(&demo.raw).max(peak(&demo.adjusted));
    let raw = Frame::new(55.0, 50.0, 170.0, 320.0, (0.0, 1.0), (0.0, top));
    raw.axes(&mut s, "minimum p-value", "density");
    histogram(&mut s, &raw, &demo.raw, BINS, "#1f77b4");
    let adj = Frame::new(295.0, 50.0, 170.0, 320.0, (0.0, 1.0), (0.0, top));
    adj.axes(&mut s, "adjusted", "density");
    histogram(&mut s, &adj, &demo.adjusted, BINS, RC_COLOR);
    let cur = Frame::new(535.0, 50.0, 170.0, 320.0, (0.0, 1.0), (0.0, 1.0));
    cur.axes(&mut s, "minimum p-value", "adjusted");
    let grid = demo.curve.grid();
    let line = |ys: &[f64]| -> Vec<(f64, f64)> {
        grid.iter()
            .zip(ys)
            .map(|(&x, &y)| (cur.px(x), cur.py(y)))
            .collect()
    };
    polyline(&mut s, &line(&grid), "#7f7f7f", 1.0);
    polyline(&mut s, &line(&demo.independent_overlay()), "#2ca02c", 1.5);
    polyline(&mut s, &line(demo.curve.values()), RC_COLOR, 2.0);
    s.push_str("</svg>\n");
    s
}
