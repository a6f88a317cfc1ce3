//! Histogram SVG drawn from rect/path primitives, with a density curve
//! overlay in red. No plotting dependency.

use std::fmt::Write as _;

use resvar::sim::Histogram;

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 25.0;
const MARGIN_T: f64 = 45.0;
const MARGIN_B: f64 = 65.0;

/// Render a bar histogram with a curve overlay; curve points are
/// (x, y) pairs already scaled to the counts axis.
pub fn histogram_svg(hist: &Histogram, curve: &[(f64, f64)], x_label: &str, title: &str) -> String {
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let x_lo = hist.edges[0];
    let x_hi = *hist.edges.last().expect("edges nonempty");
    let y_max = hist
        .counts
        .iter()
        .map(|&c| c as f64)
        .chain(curve.iter().map(|&(_, y)| y))
        .fold(1.0f64, f64::max)
        * 1.08;

    let x_px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let y_px = |y: f64| MARGIN_T + plot_h - y / y_max * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="26" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>"#,
        WIDTH / 2.0
    );

    // Bars.
    for (k, &count) in hist.counts.iter().enumerate() {
        let x0 = x_px(hist.edges[k]);
        let x1 = x_px(hist.edges[k + 1]);
        let y0 = y_px(count as f64);
        let h = MARGIN_T + plot_h - y0;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#7b9fc9" stroke="white" stroke-width="0.5"/>"##,
            x0,
            y0,
            x1 - x0,
            h
        );
    }

    // Density curve.
    if !curve.is_empty() {
        let mut path = String::new();
        for (i, &(x, y)) in curve.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.2} {:.2} ", x_px(x), y_px(y));
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="red" stroke-width="1.8"/>"#,
            path.trim_end()
        );
    }

    // Axes.
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN_L}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        MARGIN_T + plot_h,
        MARGIN_L + plot_w,
        MARGIN_T + plot_h
    );
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{}" stroke="black"/>"#,
        MARGIN_T + plot_h
    );

    // X ticks at bin edges, thinned to at most nine labels.
    let bins = hist.counts.len();
    let step = (bins / 8).max(1);
    for (k, &edge) in hist.edges.iter().enumerate() {
        if k % step != 0 && k != bins {
            continue;
        }
        let x = x_px(edge);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{edge:.3}</text>"#,
            MARGIN_T + plot_h + 18.0
        );
    }

    // Y ticks.
    for k in 0..=4 {
        let y_val = y_max / 1.08 * k as f64 / 4.0;
        let y = y_px(y_val);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/>"#,
            MARGIN_L - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{y_val:.0}</text>"#,
            MARGIN_L - 9.0,
            y + 4.0
        );
    }

    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{x_label}</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{MARGIN_T}" font-family="sans-serif" font-size="13">count</text>"#
    );
    s.push_str("</svg>\n");
    s
}
