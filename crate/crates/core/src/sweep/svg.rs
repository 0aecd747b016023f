//! Minimal SVG plots: line charts with log or linear axes, and a heatmap
//! for long-format grids.

use super::{Column, PlotKind, SweepResult};
use std::fmt::Write;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

pub fn render_svg(result: &SweepResult) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_width() / 2.0,
        escape(&result.plot.title)
    );
    match result.plot.kind {
        PlotKind::Lines => lines(result, &mut svg),
        PlotKind::Heatmap => heatmap(result, &mut svg),
    }
    svg.push_str("</svg>\n");
    svg
}

fn plot_width() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_height() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Debug, Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    /// Bounds over the usable values; `None` when there are none.
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Scale> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            return None;
        }
        if log {
            lo = lo.log10().floor();
            hi = hi.log10().ceil();
            if hi == lo {
                hi += 1.0;
            }
        } else if hi == lo {
            lo -= 1.0;
            hi += 1.0;
        } else {
            let step = nice_step((hi - lo) / 6.0);
            lo = (lo / step).floor() * step;
            hi = (hi / step).ceil() * step;
        }
        Some(Scale { lo, hi, log })
    }

    /// Position in [0, 1], or `None` if the value cannot be drawn.
    fn unit(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let t = if self.log { v.log10() } else { v };
        Some((t - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo as i32, self.hi as i32);
            let every = ((b - a) / 10 + 1).max(1);
            (a..=b)
                .filter(|e| (e - a) % every == 0)
                .map(|e| ((e - a) as f64 / (b - a) as f64, format!("1e{e}")))
                .collect()
        } else {
            let step = nice_step((self.hi - self.lo) / 6.0);
            let n = ((self.hi - self.lo) / step).round() as i64;
            (0..=n)
                .map(|i| {
                    let v = self.lo + i as f64 * step;
                    (i as f64 / n as f64, format_tick(v, step))
                })
                .collect()
        }
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn format_tick(v: f64, step: f64) -> String {
    if v.abs() < step * 1e-9 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        format!("{v:.decimals$}")
    }
}

fn axes(svg: &mut String, x: &Scale, y: &Scale, x_label: &str, y_label: &str) {
    let (w, h) = (plot_width(), plot_height());
    let _ = writeln!(svg, r##"<rect x="{LEFT}" y="{TOP}" width="{w}" height="{h}" fill="none" stroke="#333"/>"##);
    for (t, label) in x.ticks() {
        let px = LEFT + t * w;
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + h,
            TOP + h + 18.0,
            escape(&label)
        );
    }
    for (t, label) in y.ticks() {
        let py = TOP + (1.0 - t) * h;
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + w,
            LEFT - 6.0,
            py + 4.0,
            escape(&label)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + w / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + h / 2.0,
        TOP + h / 2.0,
        escape(y_label)
    );
}

/// Polyline paths, broken wherever a point cannot be drawn.
fn path(xs: &[f64], ys: &[f64], x: &Scale, y: &Scale) -> String {
    let mut d = String::new();
    let mut pen_down = false;
    for (&a, &b) in xs.iter().zip(ys) {
        match (x.unit(a), y.unit(b)) {
            (Some(u), Some(v)) => {
                let px = LEFT + u * plot_width();
                let py = TOP + (1.0 - v) * plot_height();
                let _ = write!(d, "{}{px:.2},{py:.2} ", if pen_down { "L" } else { "M" });
                pen_down = true;
            }
            _ => pen_down = false,
        }
    }
    d.trim_end().to_string()
}

fn lines(result: &SweepResult, svg: &mut String) {
    let abscissa = result.abscissa();
    let xs = abscissa.values().unwrap_or(&[]);
    let series: Vec<&Column> = result
        .plot
        .series
        .iter()
        .filter_map(|&i| result.columns.get(i))
        .filter(|c| c.values().is_some())
        .collect();
    let all_x = xs.iter().copied().chain(result.references.iter().flat_map(|r| r.x.iter().copied()));
    let all_y = series
        .iter()
        .flat_map(|c| c.values().unwrap_or(&[]).iter().copied())
        .chain(result.references.iter().flat_map(|r| r.y.iter().copied()));
    let (Some(x), Some(y)) = (Scale::fit(all_x, result.plot.x_log), Scale::fit(all_y, result.plot.y_log)) else {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">no finite data</text>"#, WIDTH / 2.0, HEIGHT / 2.0);
        return;
    };
    let y_unit = series.first().map_or("", |c| c.unit.as_str());
    axes(svg, &x, &y, &abscissa.header(), &format!("[{y_unit}]"));

    let mut legend: Vec<(String, &str, bool)> = Vec::new();
    for (i, c) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let d = path(xs, c.values().unwrap_or(&[]), &x, &y);
        let _ = writeln!(svg, r#"<path d="{d}" fill="none" stroke="{colour}" stroke-width="1.6"/>"#);
        legend.push((c.header(), colour, false));
    }
    for (i, r) in result.references.iter().enumerate() {
        let colour = PALETTE[(series.len() + i) % PALETTE.len()];
        let d = path(&r.x, &r.y, &x, &y);
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="{colour}" stroke-width="1.6" stroke-dasharray="6 4"/>"#
        );
        legend.push((format!("{} [{}]", r.label, r.y_unit), colour, true));
    }
    let lx = LEFT + plot_width() + 14.0;
    for (i, (label, colour, dashed)) in legend.iter().enumerate() {
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
    }
}

/// Blue to yellow ramp.
fn colour_ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: u8, b: u8| (f64::from(a) + (f64::from(b) - f64::from(a)) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(0x30, 0xfd), lerp(0x12, 0xe7), lerp(0x8c, 0x25))
}

fn distinct(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn heatmap(result: &SweepResult, svg: &mut String) {
    let (Some(xs), Some(ys)) = (
        result.columns.first().and_then(Column::values),
        result.columns.get(1).and_then(Column::values),
    ) else {
        return;
    };
    let Some(value_col) = result.plot.series.first().and_then(|&i| result.columns.get(i)) else {
        return;
    };
    let zs = value_col.values().unwrap_or(&[]);
    let (ux, uy) = (distinct(xs), distinct(ys));
    let finite = zs.iter().copied().filter(|z| z.is_finite());
    let (zmin, zmax) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), z| (a.min(z), b.max(z)));
    let span = if zmax > zmin { zmax - zmin } else { 1.0 };
    let edges = |u: &[f64]| -> Scale {
        let lo = u.first().copied().unwrap_or(0.0);
        let hi = u.last().copied().unwrap_or(1.0);
        let pad = if u.len() > 1 { (hi - lo) / (u.len() - 1) as f64 / 2.0 } else { 0.5 };
        Scale { lo: lo - pad, hi: hi + pad, log: false }
    };
    let (sx, sy) = (edges(&ux), edges(&uy));
    axes(svg, &sx, &sy, &result.columns[0].header(), &result.columns[1].header());
    let cw = plot_width() / ux.len() as f64;
    let ch = plot_height() / uy.len() as f64;
    for ((&x, &y), &z) in xs.iter().zip(ys).zip(zs) {
        let (Some(u), Some(v)) = (sx.unit(x), sy.unit(y)) else { continue };
        let fill = if z.is_finite() { colour_ramp((z - zmin) / span) } else { "#999999".into() };
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{cw:.2}" height="{ch:.2}" fill="{fill}"><title>{x}, {y}: {z}</title></rect>"#,
            LEFT + u * plot_width() - cw / 2.0,
            TOP + (1.0 - v) * plot_height() - ch / 2.0
        );
    }
    let bx = LEFT + plot_width() + 20.0;
    for i in 0..50 {
        let t = i as f64 / 49.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{bx:.2}" y="{:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            TOP + (1.0 - t) * plot_height() - plot_height() / 50.0,
            plot_height() / 50.0 + 0.5,
            colour_ramp(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}">{zmax:.2}</text><text x="{:.2}" y="{:.2}">{zmin:.2}</text><text x="{:.2}" y="{:.2}">{}</text>"#,
        bx + 24.0,
        TOP + 10.0,
        bx + 24.0,
        TOP + plot_height(),
        bx,
        TOP - 8.0,
        escape(&value_col.header())
    );
}
