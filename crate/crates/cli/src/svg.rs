//! Minimal static line charts.

use std::fmt::Write as _;

use mudforce::ForceTrace;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 320.0;
const MARGIN: f64 = 48.0;

struct Panel<'a> {
    title: &'a str,
    x_label: &'a str,
    y_label: &'a str,
    x: Vec<f64>,
    y: Vec<f64>,
}

fn range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn panel(out: &mut String, p: &Panel, x0: f64) {
    let (xl, xh) = range(&p.x);
    let (yl, yh) = range(&p.y);
    let w = WIDTH - 2.0 * MARGIN;
    let h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| x0 + MARGIN + (x - xl) / (xh - xl) * w;
    let sy = |y: f64| MARGIN + (yh - y) / (yh - yl) * h;

    let _ = writeln!(
        out,
        r#"<rect x="{:.1}" y="{MARGIN:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="black"/>"#,
        x0 + MARGIN
    );
    if yl < 0.0 && yh > 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#999" stroke-dasharray="4 3"/>"##,
            x0 + MARGIN,
            x0 + MARGIN + w,
            y = sy(0.0)
        );
    }
    let points: Vec<String> =
        p.x.iter()
            .zip(&p.y)
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
    let _ = writeln!(
        out,
        r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1.2" points="{}"/>"##,
        points.join(" ")
    );
    let text = |out: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" font-size="11" text-anchor="{anchor}">{s}</text>"#
        );
    };
    text(out, x0 + WIDTH / 2.0, MARGIN - 14.0, "middle", p.title);
    text(out, x0 + WIDTH / 2.0, HEIGHT - 10.0, "middle", p.x_label);
    text(
        out,
        x0 + MARGIN,
        HEIGHT - MARGIN + 14.0,
        "middle",
        &format!("{xl:.3}"),
    );
    text(
        out,
        x0 + MARGIN + w,
        HEIGHT - MARGIN + 14.0,
        "middle",
        &format!("{xh:.3}"),
    );
    text(
        out,
        x0 + MARGIN - 4.0,
        MARGIN + 4.0,
        "end",
        &format!("{yh:.3}"),
    );
    text(
        out,
        x0 + MARGIN - 4.0,
        MARGIN + h,
        "end",
        &format!("{yl:.3}"),
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        x0 + 12.0,
        HEIGHT / 2.0,
        x0 + 12.0,
        HEIGHT / 2.0,
        p.y_label
    );
}

/// Force against time and force against depth, side by side.
pub fn trace_chart(trace: &ForceTrace, normalized: bool) -> String {
    let y_label = if normalized { "F / max|F|" } else { "F (N)" };
    let s = trace.samples();
    let f: Vec<f64> = s.iter().map(|x| x.force).collect();
    let panels = [
        Panel {
            title: "Force history",
            x_label: "t (s)",
            y_label,
            x: s.iter().map(|x| x.t).collect(),
            y: f.clone(),
        },
        Panel {
            title: "Force against depth",
            x_label: "z_i (m)",
            y_label,
            x: s.iter().map(|x| x.z_i).collect(),
            y: f,
        },
    ];
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{HEIGHT:.0}" viewBox="0 0 {:.0} {HEIGHT:.0}">"#,
        2.0 * WIDTH,
        2.0 * WIDTH
    );
    for (i, p) in panels.iter().enumerate() {
        panel(&mut out, p, i as f64 * WIDTH);
    }
    out.push_str("</svg>\n");
    out
}
