//! Minimal static SVG line chart for a population series: axes, ticks, a
//! legend and one polyline per level (upper solid, middle dashed, lower
//! dotted). Output depends only on the input, so repeated runs are
//! byte-identical.

use std::fmt::Write;

use crate::state::{AtomicLevel, PopulationSeries};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

fn line_style(level: AtomicLevel) -> (&'static str, &'static str, &'static str) {
    // (label, colour, dash pattern)
    match level {
        AtomicLevel::Upper => ("|C+|^2", "#1f3a93", ""),
        AtomicLevel::Middle => ("|C0|^2", "#c0392b", "8 5"),
        AtomicLevel::Lower => ("|C-|^2", "#1e8449", "2 4"),
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac < 1.5 {
        1.0
    } else if frac < 3.5 {
        2.0
    } else if frac < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn render(series: &PopulationSeries, title: &str) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let (t0, t1) = match (series.times.first(), series.times.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a, a + 1.0),
        _ => (0.0, 1.0),
    };
    let x = |t: f64| LEFT + (t - t0) / (t1 - t0) * plot_w;
    let y = |p: f64| TOP + (1.0 - p.clamp(0.0, 1.0)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // axes
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT:.2},{TOP:.2} V{:.2} H{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );
    let step = nice_step(t1 - t0);
    let mut k = (t0 / step).ceil() as i64;
    while (k as f64) * step <= t1 + 1e-9 * step {
        let tv = k as f64 * step;
        let xv = x(tv);
        let _ = writeln!(
            s,
            r#"<line x1="{xv:.2}" y1="{:.2}" x2="{xv:.2}" y2="{:.2}" stroke="black"/><text x="{xv:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            fmt_tick(tv)
        );
        k += 1;
    }
    for i in 0..=5 {
        let pv = i as f64 / 5.0;
        let yv = y(pv);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{yv:.2}" x2="{LEFT:.2}" y2="{yv:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            yv + 4.0,
            fmt_tick(pv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">t</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">probability</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for level in AtomicLevel::ALL {
        let (_, colour, dash) = line_style(level);
        let mut points = String::new();
        for (t, p) in series.times.iter().zip(series.column(level)) {
            let _ = write!(points, "{:.2},{:.2} ", x(*t), y(*p));
        }
        let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        let _ = writeln!(
            s,
            r#"<polyline class="{}" fill="none" stroke="{colour}" stroke-width="1.5"{dash_attr} points="{}"/>"#,
            level.name(),
            points.trim_end()
        );
    }

    // legend
    for (i, level) in AtomicLevel::ALL.iter().enumerate() {
        let (label, colour, dash) = line_style(*level);
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w - 130.0;
        let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="1.5"{dash_attr}/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{label}</text>"#,
            lx + 36.0,
            lx + 44.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
