//! Log-log error plot as a standalone SVG document.

use std::fmt::Write;

use toddsum::emcore::loglog_fit;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// A rendered plot plus how many zero errors were left out.
#[derive(Debug, PartialEq)]
pub struct Plot {
    pub svg: String,
    pub slope: f64,
    pub dropped: usize,
}

fn decades(lo: f64, hi: f64) -> (f64, f64) {
    let a = lo.log10().floor();
    let mut b = hi.log10().ceil();
    if b <= a {
        b = a + 1.0;
    }
    (a, b)
}

fn fmt_pow10(e: f64) -> String {
    format!("1e{}", e as i64)
}

/// Error against `N` on log-log axes with the fitted line. `None` when fewer
/// than two errors are positive.
pub fn emit_plot(points: &[(u64, f64)], title: &str) -> Option<Plot> {
    let positive: Vec<(f64, f64)> =
        points.iter().filter(|(_, e)| *e > 0.0 && e.is_finite()).map(|(n, e)| (*n as f64, *e)).collect();
    let dropped = points.len() - positive.len();
    if positive.len() < 2 {
        return None;
    }
    let (slope, intercept) = loglog_fit(&positive)?;

    let (x0, x1) = decades(
        positive.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        positive.iter().map(|p| p.0).fold(0.0, f64::max),
    );
    let (y0, y1) = decades(
        positive.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        positive.iter().map(|p| p.1).fold(0.0, f64::max),
    );
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x.log10() - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y.log10()) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);

    for e in (x0 as i64)..=(x1 as i64) {
        let x = LEFT + (e as f64 - x0) / (x1 - x0) * pw;
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##, TOP + ph);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            fmt_pow10(e as f64)
        );
    }
    for e in (y0 as i64)..=(y1 as i64) {
        let y = TOP + (y1 - e as f64) / (y1 - y0) * ph;
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_pow10(e as f64)
        );
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">N</text>"#, LEFT + pw / 2.0, HEIGHT - 14.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">|Riemann - estimate|</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    // fitted line clipped to the data's N range
    let nmin = positive.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let nmax = positive.iter().map(|p| p.0).fold(0.0, f64::max);
    let fit = |n: f64| (slope * n.ln() + intercept).exp();
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
        sx(nmin),
        sy(fit(nmin)),
        sx(nmax),
        sy(fit(nmax))
    );
    for (n, e) in &positive {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#2471a3"/>"##, sx(*n), sy(*e));
    }

    let lx = LEFT + pw - 190.0;
    let mut ly = TOP + 18.0;
    let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#2471a3"/>"##, lx, ly - 4.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">abs error</text>"#, lx + 10.0);
    ly += 18.0;
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
        lx - 5.0,
        ly - 4.0,
        lx + 5.0,
        ly - 4.0
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">fit, slope = {slope:.3}</text>"#, lx + 10.0);
    if dropped > 0 {
        ly += 18.0;
        let plural = if dropped == 1 { "" } else { "s" };
        let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">{dropped} zero error{plural} not shown</text>"#, lx + 10.0);
    }
    s.push_str("</svg>\n");
    Some(Plot { svg: s, slope, dropped })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_slope() {
        let p = emit_plot(&[(10, 1e-2), (100, 1e-4)], "t").unwrap();
        assert!((p.slope + 2.0).abs() < 1e-12);
        assert!(p.svg.contains("slope = -2.000"));
        assert_eq!(p.dropped, 0);
        assert!(!p.svg.contains("not shown"));
    }

    #[test]
    fn zeros() {
        assert_eq!(emit_plot(&[(1, 0.0), (2, 0.0)], "t"), None);
        assert_eq!(emit_plot(&[(1, 0.0), (2, 1e-3)], "t"), None);
        let p = emit_plot(&[(1, 0.0), (2, 1e-3), (4, 1e-4)], "t").unwrap();
        assert_eq!(p.dropped, 1);
        assert!(p.svg.contains("1 zero error not shown"));
    }

    #[test]
    fn deterministic() {
        let pts = [(10, 3.1e-3), (20, 4.4e-4), (40, 5.9e-5)];
        assert_eq!(emit_plot(&pts, "a<b").unwrap().svg, emit_plot(&pts, "a<b").unwrap().svg);
        assert!(emit_plot(&pts, "a<b").unwrap().svg.contains("a&lt;b"));
    }
}
