//! Static SVG rendering of confidence curves: step functions for the
//! lower and upper bounds plus point markers for the CDF estimate.

use anyhow::{bail, Result};
use mixcdf::ci::ConfidenceCurve;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn x_px(p: f64) -> f64 {
    MARGIN_LEFT + p * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
}

fn y_px(q: f64) -> f64 {
    HEIGHT - MARGIN_BOTTOM - q * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
}

/// Step path through (p, value) points: horizontal segment to the next p,
/// then vertical jump.
fn step_path(points: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (i, &(p, v)) in points.iter().enumerate() {
        if i == 0 {
            d.push_str(&format!("M {:.2} {:.2}", x_px(p), y_px(v)));
        } else {
            d.push_str(&format!(" H {:.2} V {:.2}", x_px(p), y_px(v)));
        }
    }
    d
}

/// Renders the curve (and optional estimate points) as a standalone SVG
/// document. Errors on an empty curve.
pub fn render_curve_svg(curve: &ConfidenceCurve, estimates: &[(f64, f64)]) -> Result<String> {
    if curve.p_grid.is_empty() {
        bail!("cannot render an empty confidence curve");
    }
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes and grid lines at deciles.
    for d in 0..=10 {
        let t = d as f64 / 10.0;
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            x_px(t), y_px(0.0), x_px(t), y_px(1.0)
        ));
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            x_px(0.0), y_px(t), x_px(1.0), y_px(t)
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{:.1}</text>\n",
            x_px(t),
            y_px(0.0) + 20.0,
            t
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{:.1}</text>\n",
            x_px(0.0) - 8.0,
            y_px(t) + 4.0,
            t
        ));
    }
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        x_px(0.0), y_px(0.0), x_px(1.0), y_px(0.0)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        x_px(0.0), y_px(0.0), x_px(0.0), y_px(1.0)
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">success probability</text>\n",
        x_px(0.5),
        HEIGHT - 15.0
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">mixing CDF</text>\n",
        y_px(0.5),
        y_px(0.5)
    ));

    let lower: Vec<(f64, f64)> = curve
        .p_grid
        .iter()
        .zip(&curve.lower)
        .map(|(&p, &v)| (p, v))
        .collect();
    let upper: Vec<(f64, f64)> = curve
        .p_grid
        .iter()
        .zip(&curve.upper)
        .map(|(&p, &v)| (p, v))
        .collect();
    svg.push_str(&format!(
        "  <path d=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
        step_path(&lower)
    ));
    svg.push_str(&format!(
        "  <path d=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n",
        step_path(&upper)
    ));
    for &(p, v) in estimates {
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"black\"/>\n",
            x_px(p),
            y_px(v)
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#1f77b4\">lower {:.0}% bound</text>\n",
        x_px(0.02),
        y_px(0.97),
        100.0 * (1.0 - curve.alpha)
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#d62728\">upper {:.0}% bound</text>\n",
        x_px(0.02),
        y_px(0.93),
        100.0 * (1.0 - curve.alpha)
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}
