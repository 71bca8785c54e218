//! Self-contained SVG emission: one QFI-vs-photon-number curve per
//! `(probe, order)` pair.

use std::path::Path;

use crate::error::{Error, Result};

use super::sweep::{RowStatus, SweepRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Write an SVG plot of the successful rows. Errors when nothing is
/// plottable rather than emitting an empty file.
pub fn emit_plot(rows: &[SweepRow], path: &Path) -> Result<()> {
    let ok: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.status == RowStatus::Ok && r.qfi.is_finite())
        .collect();
    if ok.is_empty() {
        return Err(Error::InvalidArgument(
            "no successful rows to plot".into(),
        ));
    }
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for row in &ok {
        let key = format!("{} ({})", row.probe, row.order);
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((row.n_mean, row.qfi)),
            None => series.push((key, vec![(row.n_mean, row.qfi)])),
        }
    }
    for (_, pts) in &mut series {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (0.0f64, f64::NEG_INFINITY);
    for r in &ok {
        x_min = x_min.min(r.n_mean);
        x_max = x_max.max(r.n_mean);
        y_min = y_min.min(r.qfi);
        y_max = y_max.max(r.qfi);
    }
    if x_max == x_min {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max <= y_min {
        y_max = y_min + 1.0;
    }
    y_max *= 1.05;

    let px = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = WIDTH - MARGIN_R,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B
    ));
    // ticks
    for i in 0..=5 {
        let xv = x_min + (x_max - x_min) * i as f64 / 5.0;
        let yv = y_min + (y_max - y_min) * i as f64 / 5.0;
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"black\"/>\n\
             <text x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\">{xv:.2}</text>\n",
            x = px(xv),
            b = HEIGHT - MARGIN_B,
            b2 = HEIGHT - MARGIN_B + 5.0,
            ty = HEIGHT - MARGIN_B + 20.0,
        ));
        svg.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{y}\" x2=\"{l2}\" y2=\"{y}\" stroke=\"black\"/>\n\
             <text x=\"{tx}\" y=\"{y2}\" text-anchor=\"end\">{yv:.3}</text>\n",
            l = MARGIN_L,
            l2 = MARGIN_L - 5.0,
            y = py(yv),
            tx = MARGIN_L - 9.0,
            y2 = py(yv) + 4.0,
        ));
    }
    // axis labels
    svg.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\">mean photon number</text>\n",
        x = MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        y = HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{y}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {y})\">QFI</text>\n",
        y = MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0
    ));
    // curves and legend
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if pts.len() > 1 {
            let path_pts: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                path_pts.join(" ")
            ));
        }
        for &(x, y) in pts {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{color}\"/>\n",
                px(x),
                py(y)
            ));
        }
        let ly = MARGIN_T + 18.0 * i as f64 + 10.0;
        svg.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"14\" height=\"4\" fill=\"{color}\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\">{label}</text>\n",
            x = WIDTH - MARGIN_R + 12.0,
            y = ly - 2.0,
            tx = WIDTH - MARGIN_R + 32.0,
            ty = ly + 4.0,
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}
