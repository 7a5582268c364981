//! Deterministic SVG line plots of table columns.
//!
//! Output is a pure function of the table and plot spec: fixed canvas, fixed
//! palette, fixed tick layout, floats printed with enough digits to be
//! reproducible byte for byte.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::table::Table;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x_column: String,
    pub y_column: String,
    /// Optional column whose distinct values split the rows into one
    /// polyline each.
    pub series_column: Option<String>,
    pub log_y: bool,
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Render a line plot. Errors on an empty table or when fewer than two
/// points end up in a polyline.
pub fn emit_svg(table: &Table, spec: &PlotSpec) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::Plot("table has no rows".to_string()));
    }
    let xs = table.column_f64(&spec.x_column)?;
    let ys_raw = table.column_f64(&spec.y_column)?;
    let series: Vec<f64> = match &spec.series_column {
        Some(c) => table.column_f64(c)?,
        None => vec![0.0; xs.len()],
    };

    // series keys in first-appearance order
    let mut keys: Vec<f64> = Vec::new();
    for &s in &series {
        if !keys.contains(&s) {
            keys.push(s);
        }
    }

    let ys: Vec<f64> = if spec.log_y {
        ys_raw
            .iter()
            .map(|&y| if y > 0.0 { y.log10() } else { f64::NAN })
            .collect()
    } else {
        ys_raw.clone()
    };

    let finite = |v: &&f64| v.is_finite();
    let x_lo = xs.iter().filter(finite).cloned().fold(f64::INFINITY, f64::min);
    let x_hi = xs.iter().filter(finite).cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut y_lo = ys.iter().filter(finite).cloned().fold(f64::INFINITY, f64::min);
    let mut y_hi = ys.iter().filter(finite).cloned().fold(f64::NEG_INFINITY, f64::max);
    if x_lo >= x_hi {
        return Err(Error::Plot("need at least two distinct x values".to_string()));
    }
    if !(y_lo.is_finite() && y_hi.is_finite()) {
        return Err(Error::Plot("no finite y values to plot".to_string()));
    }
    if y_lo == y_hi {
        y_lo -= 0.5;
        y_hi += 0.5;
    }

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="18" font-family="monospace" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        spec.title
    );

    // axes
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        fmt(MARGIN_L),
        fmt(MARGIN_T),
        fmt(plot_w),
        fmt(plot_h)
    );

    // ticks: 6 per axis
    for i in 0..=5 {
        let frac = f64::from(i) / 5.0;
        let xv = x_lo + frac * (x_hi - x_lo);
        let yv = y_lo + frac * (y_hi - y_lo);
        let xp = sx(xv);
        let yp = sy(yv);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            fmt(xp),
            fmt(MARGIN_T + plot_h),
            fmt(xp),
            fmt(MARGIN_T + plot_h + 5.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="11" text-anchor="middle">{}</text>"#,
            fmt(xp),
            fmt(MARGIN_T + plot_h + 18.0),
            format_args!("{xv:.3e}")
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            fmt(MARGIN_L - 5.0),
            fmt(yp),
            fmt(MARGIN_L),
            fmt(yp)
        );
        let label = if spec.log_y {
            format!("1e{yv:.2}")
        } else {
            format!("{yv:.3e}")
        };
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="11" text-anchor="end">{}</text>"#,
            fmt(MARGIN_L - 8.0),
            fmt(yp + 4.0),
            label
        );
    }

    // axis labels
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="13" text-anchor="middle">{}</text>"#,
        fmt(MARGIN_L + plot_w / 2.0),
        fmt(HEIGHT - 12.0),
        spec.x_column
    );
    let y_label = if spec.log_y {
        format!("log10 {}", spec.y_column)
    } else {
        spec.y_column.clone()
    };
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        fmt(MARGIN_T + plot_h / 2.0),
        fmt(MARGIN_T + plot_h / 2.0),
        y_label
    );

    // one polyline per series key
    for (ki, &key) in keys.iter().enumerate() {
        let mut points = String::new();
        let mut count = 0usize;
        for i in 0..xs.len() {
            if series[i] != key || !ys[i].is_finite() {
                continue;
            }
            let _ = write!(points, "{},{} ", fmt(sx(xs[i])), fmt(sy(ys[i])));
            count += 1;
        }
        if count < 2 {
            return Err(Error::Plot(format!(
                "series {key} has {count} plottable points; need at least 2"
            )));
        }
        let color = PALETTE[ki % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points.trim_end(),
            color
        );
        if let Some(series_name) = &spec.series_column {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="monospace" font-size="11" fill="{}">{}={}</text>"#,
                fmt(MARGIN_L + plot_w - 150.0),
                fmt(MARGIN_T + 16.0 + 14.0 * ki as f64),
                color,
                series_name,
                format_args!("{key:.3e}")
            );
        }
    }

    let _ = writeln!(out, "</svg>");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Table;

    fn sample_table() -> Table {
        let mut t = Table::new(&["t", "f", "n"]);
        for series in [1.0, 2.0] {
            for i in 0..10 {
                let x = f64::from(i) * 0.1;
                t.push_row(vec![x.into(), (-series * x).exp().into(), series.into()]);
            }
        }
        t
    }

    fn spec() -> PlotSpec {
        PlotSpec {
            title: "decay".to_string(),
            x_column: "t".to_string(),
            y_column: "f".to_string(),
            series_column: Some("n".to_string()),
            log_y: false,
        }
    }

    #[test]
    fn renders_polyline_per_series() {
        let svg = emit_svg(&sample_table(), &spec()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("</svg>"));
    }

    #[test]
    fn deterministic_output() {
        let a = emit_svg(&sample_table(), &spec()).unwrap();
        let b = emit_svg(&sample_table(), &spec()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_empty_and_single_row() {
        let empty = Table::new(&["t", "f"]);
        let mut spec1 = spec();
        spec1.series_column = None;
        assert!(emit_svg(&empty, &spec1).is_err());

        let mut single = Table::new(&["t", "f"]);
        single.push_row(vec![0.0.into(), 1.0.into()]);
        assert!(emit_svg(&single, &spec1).is_err());
    }
}
