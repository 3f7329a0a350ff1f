//! Minimal SVG step plots of empirical distribution functions.

use std::fmt::Write as _;

use nodal_census::stats::EmpiricalCdf;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 3] = ["#1f4e9c", "#c0392b", "#2e8b57"];

/// Step plot of one or more CDFs on shared axes, each with a one-stderr band.
/// The t axis stops where every curve has reached 0.99.
pub fn step_plot(title: &str, series: &[(&str, &EmpiricalCdf)]) -> String {
    let t_max = series
        .iter()
        .map(|(_, c)| {
            let k = c.values.iter().position(|&p| p >= 0.99).unwrap_or(c.values.len() - 1);
            c.breakpoints[k]
        })
        .fold(0.0, f64::max)
        .max(1e-12);
    let x = |t: f64| MARGIN + (t.min(t_max) / t_max) * (WIDTH - 2.0 * MARGIN);
    let y = |p: f64| HEIGHT - MARGIN - p.clamp(0.0, 1.0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, x1, y0, y1) = (x(0.0), x(t_max), y(0.0), y(1.0));
    let _ =
        writeln!(svg, r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#);
    for k in 0..=4 {
        let p = k as f64 / 4.0;
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{p}</text>"#, x0 - 6.0, y(p) + 4.0);
        let t = t_max * p;
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t:.1}</text>"#, x(t), y0 + 18.0);
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#, WIDTH / 2.0, HEIGHT - 8.0);

    for (k, (name, cdf)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        // band: upper edge left to right, lower edge back
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        let mut prev = (0.0, 0.0);
        for ((&t, &p), &s) in cdf.breakpoints.iter().zip(&cdf.values).zip(&cdf.stderr) {
            if t > t_max {
                break;
            }
            upper.push((x(t), y(prev.0 + prev.1)));
            upper.push((x(t), y(p + s)));
            lower.push((x(t), y(prev.0 - prev.1)));
            lower.push((x(t), y(p - s)));
            prev = (p, s);
        }
        upper.push((x(t_max), y(prev.0 + prev.1)));
        lower.push((x(t_max), y(prev.0 - prev.1)));
        let mut band = String::new();
        for (i, (px, py)) in upper.iter().chain(lower.iter().rev()).enumerate() {
            let _ = write!(band, "{}{px:.2},{py:.2} ", if i == 0 { "M" } else { "L" });
        }
        let _ = writeln!(svg, r#"<path d="{}Z" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, band);

        let mut line = format!("M{:.2},{:.2}", x(0.0), y(0.0));
        let mut last = 0.0;
        for (&t, &p) in cdf.breakpoints.iter().zip(&cdf.values) {
            if t > t_max {
                break;
            }
            let _ = write!(line, " H{:.2} V{:.2}", x(t), y(p));
            last = p;
        }
        let _ = write!(line, " H{:.2}", x(t_max));
        let _ = writeln!(svg, r#"<path d="{line}" fill="none" stroke="{color}" stroke-width="1.5"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{} (n = {}, end {last:.3})</text>"#,
            x0 + 10.0,
            y1 + 16.0 * (k as f64 + 1.0),
            escape(name),
            cdf.total_count
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
