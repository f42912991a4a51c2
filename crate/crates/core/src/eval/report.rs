//! CSV and SVG renderings of evaluation results.

use std::fmt::Write as _;

use super::benchmark::BenchmarkMatrix;
use super::binned::Bin;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

/// One line per cell: row, column, n, mae, mape, mbe, r2, out_of_validity, flagged.
pub fn benchmark_csv(m: &BenchmarkMatrix) -> String {
    let mut s =
        String::from("calm_model,correction,n,mae_w,mape,mbe_w,r2,out_of_validity,flagged\n");
    for c in &m.cells {
        let r = c.report;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            c.row,
            c.column,
            r.map_or(0, |r| r.n),
            opt(r.map(|r| r.mae)),
            opt(r.map(|r| r.mape)),
            opt(r.map(|r| r.mbe)),
            opt(r.and_then(|r| r.r2)),
            c.out_of_validity,
            c.flagged
        );
    }
    s
}

pub fn bins_csv(bins: &[Bin]) -> String {
    let mut s = String::from("lo,hi,count,mape,std\n");
    for b in bins {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            b.lo,
            b.hi,
            b.count,
            opt(b.mape),
            opt(b.std)
        );
    }
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Heat-map of MAPE per cell. Flagged or undefined cells are grey and
/// labelled "n/a".
pub fn benchmark_svg(m: &BenchmarkMatrix) -> String {
    let rows = m.rows();
    let cols = m.columns();
    let (cw, ch, left, top) = (130.0, 34.0, 150.0, 40.0);
    let width = left + cw * cols.len() as f64 + 10.0;
    let height = top + ch * rows.len() as f64 + 10.0;
    let worst = m
        .cells
        .iter()
        .filter_map(|c| c.mape())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    for (j, col) in cols.iter().enumerate() {
        let x = left + cw * (j as f64 + 0.5);
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            top - 12.0,
            escape(col)
        );
    }
    for (i, row) in rows.iter().enumerate() {
        let y = top + ch * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 8.0,
            y + ch / 2.0 + 4.0,
            escape(row)
        );
        for (j, col) in cols.iter().enumerate() {
            let Some(cell) = m.get(row, col) else {
                continue;
            };
            let x = left + cw * j as f64;
            let (fill, label) = match cell.mape() {
                Some(v) => {
                    let t = (v / worst).clamp(0.0, 1.0);
                    let g = (255.0 * (1.0 - 0.75 * t)) as u8;
                    (format!("rgb(255,{g},{g})"), format!("{:.2}%", v * 100.0))
                }
                None => ("rgb(200,200,200)".to_string(), "n/a".to_string()),
            };
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{cw}" height="{ch}" fill="{fill}" stroke="white"/><text x="{}" y="{}" text-anchor="middle">{label}</text>"#,
                x + cw / 2.0,
                y + ch / 2.0 + 4.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Line chart of per-bin MAPE for several named series, sharing the bin
/// edges of the first series. Empty bins break the line.
pub fn bins_svg(series: &[(String, Vec<Bin>)], x_label: &str) -> String {
    let (w, h, left, right, top, bottom) = (640.0, 360.0, 60.0, 160.0, 20.0, 40.0);
    let bins: Vec<&Bin> = series.iter().flat_map(|(_, b)| b).collect();
    let x_lo = bins.iter().map(|b| b.lo).fold(f64::INFINITY, f64::min);
    let x_hi = bins.iter().map(|b| b.hi).fold(f64::NEG_INFINITY, f64::max);
    let y_hi = bins
        .iter()
        .filter_map(|b| b.mape)
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.1;
    let span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let px = |x: f64| left + (x - x_lo) / span * (w - left - right);
    let py = |y: f64| h - bottom - y / y_hi * (h - top - bottom);
    let palette = [
        "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    ];
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<path d="M{left},{top} V{} H{}" fill="none" stroke="black"/>"#,
        h - bottom,
        w - right
    );
    for i in 0..=4 {
        let y = y_hi * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{:.1}%</text>"#,
            left - 4.0,
            py(y) + 4.0,
            y * 100.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="start">{:.2}</text>"#,
        left,
        h - bottom + 14.0,
        x_lo
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{:.2}</text>"#,
        w - right,
        h - bottom + 14.0,
        x_lo + span
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (left + w - right) / 2.0,
        h - 8.0,
        escape(x_label)
    );
    for (k, (name, bins)) in series.iter().enumerate() {
        let colour = palette[k % palette.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for b in bins {
            match b.mape {
                Some(m) => {
                    let _ = write!(
                        d,
                        "{}{:.2},{:.2} ",
                        if pen_down { "L" } else { "M" },
                        px(0.5 * (b.lo + b.hi)),
                        py(m)
                    );
                    pen_down = true;
                }
                None => pen_down = false,
            }
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        let ly = top + 14.0 * k as f64 + 6.0;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            w - right + 10.0,
            w - right + 28.0,
            w - right + 32.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}
