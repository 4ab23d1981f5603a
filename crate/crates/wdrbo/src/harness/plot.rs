//! Minimal SVG line plot of cumulative regret: one line per algorithm with a
//! shaded mean +/- standard-error band. Hand-rolled so the output is a pure
//! function of the summaries.

use super::output::AlgoSummary;
use crate::error::Result;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Frame {
    t_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        MARGIN_LEFT + (t - 1.0) / (self.t_max - 1.0).max(1.0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        HEIGHT - MARGIN_BOTTOM - (v - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn fmt(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 100.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

/// Render the plot as an SVG document.
pub fn regret_svg(summaries: &[AlgoSummary]) -> String {
    let t_max = summaries.iter().map(|s| s.horizon).max().unwrap_or(1) as f64;
    let mut y_max = f64::MIN;
    let mut y_min: f64 = 0.0;
    for s in summaries {
        for t in 0..s.horizon {
            y_max = y_max.max(s.mean_cumulative[t] + s.stderr_cumulative[t]);
            y_min = y_min.min(s.mean_cumulative[t] - s.stderr_cumulative[t]);
        }
    }
    if !y_max.is_finite() || y_max <= y_min {
        y_max = y_min + 1.0;
    }
    let frame = Frame {
        t_max,
        y_min,
        y_max: y_max + 0.05 * (y_max - y_min),
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">Cumulative expected regret (mean \u{00b1} standard error)</text>\n",
        WIDTH / 2.0
    ));

    // Axes.
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    svg.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x0:.1}\" y2=\"{y1:.1}\" stroke=\"black\"/>\n"
    ));

    for k in 0..=5 {
        let t = 1.0 + (frame.t_max - 1.0) * k as f64 / 5.0;
        let xp = frame.x(t);
        svg.push_str(&format!(
            "<line x1=\"{xp:.1}\" y1=\"{y0:.1}\" x2=\"{xp:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            y0 + 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{xp:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            y0 + 18.0,
            fmt(t.round())
        ));
        let v = frame.y_min + (frame.y_max - frame.y_min) * k as f64 / 5.0;
        let yp = frame.y(v);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{yp:.1}\" x2=\"{x0:.1}\" y2=\"{yp:.1}\" stroke=\"black\"/>\n",
            x0 - 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            x0 - 8.0,
            yp + 4.0,
            fmt(v)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">step t</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    ));

    // Bands then lines, so lines stay visible.
    for (i, s) in summaries.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut band = String::from("<polygon points=\"");
        for t in 0..s.horizon {
            band.push_str(&format!(
                "{:.2},{:.2} ",
                frame.x((t + 1) as f64),
                frame.y(s.mean_cumulative[t] + s.stderr_cumulative[t])
            ));
        }
        for t in (0..s.horizon).rev() {
            band.push_str(&format!(
                "{:.2},{:.2} ",
                frame.x((t + 1) as f64),
                frame.y(s.mean_cumulative[t] - s.stderr_cumulative[t])
            ));
        }
        band.push_str(&format!("\" fill=\"{color}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n"));
        svg.push_str(&band);
    }
    for (i, s) in summaries.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut line = String::from("<polyline points=\"");
        for t in 0..s.horizon {
            line.push_str(&format!(
                "{:.2},{:.2} ",
                frame.x((t + 1) as f64),
                frame.y(s.mean_cumulative[t])
            ));
        }
        line.push_str(&format!(
            "\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n"
        ));
        svg.push_str(&line);

        // Legend entry.
        let ly = MARGIN_TOP + 16.0 * i as f64 + 8.0;
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            x0 + 10.0,
            x0 + 34.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            x0 + 40.0,
            ly + 4.0,
            s.algo
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Write the plot to a file.
pub fn write_regret_svg(path: &std::path::Path, summaries: &[AlgoSummary]) -> Result<()> {
    std::fs::write(path, regret_svg(summaries)).map_err(|e| crate::error::Error::io(path, e))
}
