//! Minimal self-contained SVG line and scatter plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use snakevqe::st_stationary;

use crate::table::NumericCsv;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

impl Plot {
    pub fn to_svg(&self) -> String {
        let (x0, x1) = bounds(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| p.0)),
        );
        let (y0, y1) = bounds(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| p.1)),
        );
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

        let mut svg = String::new();
        writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            escape(&self.title)
        )
        .unwrap();
        writeln!(
            svg,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let (px, py) = (sx(xv), sy(yv));
            writeln!(
                svg,
                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                MARGIN_TOP + ph,
                MARGIN_TOP + ph + 5.0,
                MARGIN_TOP + ph + 19.0,
                tick_label(xv)
            )
            .unwrap();
            writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT - 8.0,
                py + 4.0,
                tick_label(yv)
            )
            .unwrap();
        }
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            MARGIN_TOP + ph / 2.0,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        )
        .unwrap();

        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            writeln!(svg, r#"<g class="series" data-name="{}">"#, escape(&s.name)).unwrap();
            let finite: Vec<(f64, f64)> = s
                .points
                .iter()
                .copied()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            match s.style {
                Style::Line => {
                    let pts: Vec<String> = finite
                        .iter()
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    writeln!(
                        svg,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                        pts.join(" ")
                    )
                    .unwrap();
                }
                Style::Markers => {
                    for &(x, y) in &finite {
                        writeln!(
                            svg,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                            sx(x),
                            sy(y)
                        )
                        .unwrap();
                    }
                }
            }
            writeln!(svg, "</g>").unwrap();
            let ly = MARGIN_TOP + 10.0 + 16.0 * k as f64;
            let lx = WIDTH - MARGIN_RIGHT + 12.0;
            writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
                lx + 18.0,
                lx + 24.0,
                ly + 4.0,
                escape(&s.name)
            )
            .unwrap();
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_svg()).with_context(|| format!("writing {}", path.display()))
    }
}

/// Energy against the family parameter, with the exact curve when present.
pub fn energy_plot(data: &NumericCsv) -> Result<Plot> {
    let lambda = data.values("lambda")?;
    let energy = data.values("energy")?;
    let exact_col = data.column("exact_energy")?;
    let mut series = vec![Series {
        name: "optimized".into(),
        points: lambda.iter().copied().zip(energy).collect(),
        style: Style::Markers,
    }];
    let exact: Vec<(f64, f64)> = lambda
        .iter()
        .zip(&data.rows)
        .map(|(&l, r)| (l, r[exact_col]))
        .filter(|p| p.1.is_finite())
        .collect();
    if !exact.is_empty() {
        series.insert(
            0,
            Series {
                name: "exact".into(),
                points: exact,
                style: Style::Line,
            },
        );
    }
    Ok(Plot {
        title: "Energy along the family".into(),
        x_label: "lambda".into(),
        y_label: "energy".into(),
        series,
    })
}

/// One curve per (snapshot, parameter) pair of a trajectory file.
pub fn parameter_plot(data: &NumericCsv) -> Result<Plot> {
    let iteration = data.values("iteration")?;
    let lambda = data.values("lambda")?;
    let thetas: Vec<(String, Vec<f64>)> = data
        .header
        .iter()
        .filter(|h| h.starts_with("theta_"))
        .map(|h| Ok((h.clone(), data.values(h)?)))
        .collect::<Result<_>>()?;
    if thetas.is_empty() {
        bail!("trajectory has no theta columns");
    }
    let mut snapshots: Vec<f64> = Vec::new();
    for &it in &iteration {
        if snapshots.last() != Some(&it) {
            snapshots.push(it);
        }
    }
    let mut series = Vec::new();
    for &snap in &snapshots {
        for (name, values) in &thetas {
            let points = (0..lambda.len())
                .filter(|&r| iteration[r] == snap)
                .map(|r| (lambda[r], values[r]))
                .collect();
            let label = if thetas.len() == 1 {
                format!("iteration {snap}")
            } else {
                format!("{name} @ {snap}")
            };
            series.push(Series {
                name: label,
                points,
                style: Style::Line,
            });
        }
    }
    Ok(Plot {
        title: "Parameters along the family".into(),
        x_label: "lambda".into(),
        y_label: "theta".into(),
        series,
    })
}

/// Final positions of both optimizers over the two ST minima curves.
pub fn st_plot(data: &NumericCsv) -> Result<Plot> {
    let t = data.values("t")?;
    let snake = data.values("snake_x")?;
    let gd = data.values("gd_x")?;
    let curve = |pick: fn(f64) -> f64| t.iter().map(|&t| (t, pick(t))).collect();
    Ok(Plot {
        title: "Styblinski-Tang: final x against t".into(),
        x_label: "t".into(),
        y_label: "x".into(),
        series: vec![
            Series {
                name: "global minimum".into(),
                points: curve(|t| st_stationary(t).global),
                style: Style::Line,
            },
            Series {
                name: "local minimum".into(),
                points: curve(|t| st_stationary(t).local),
                style: Style::Line,
            },
            Series {
                name: "snake".into(),
                points: t.iter().copied().zip(snake).collect(),
                style: Style::Markers,
            },
            Series {
                name: "gd".into(),
                points: t.iter().copied().zip(gd).collect(),
                style: Style::Markers,
            },
        ],
    })
}

/// Second parameter of both optimizers against the family parameter.
pub fn nonconvex_plot(data: &NumericCsv) -> Result<Plot> {
    let lambda = data.values("lambda")?;
    let mut series = Vec::new();
    for name in ["snake_theta_2", "gd_theta_2"] {
        series.push(Series {
            name: name.into(),
            points: lambda.iter().copied().zip(data.values(name)?).collect(),
            style: Style::Markers,
        });
    }
    Ok(Plot {
        title: "Symmetry-breaking parameter".into(),
        x_label: "lambda".into(),
        y_label: "theta_2".into(),
        series,
    })
}

/// Picks a plot from the file's header and writes it into `out_dir`.
pub fn plot_file(input: &Path, out_dir: &Path) -> Result<PathBuf> {
    let data = NumericCsv::read(input)?;
    let (plot, name) = if data.starts_with(&["lambda", "energy", "exact_energy"]) {
        (energy_plot(&data), "energy.svg")
    } else if data.starts_with(&["iteration", "member", "lambda"]) {
        (parameter_plot(&data), "parameters.svg")
    } else if data.starts_with(&["t", "init_x"]) {
        (st_plot(&data), "st_basins.svg")
    } else if data.starts_with(&["lambda", "snake_theta_1"]) {
        (nonconvex_plot(&data), "nonconvex.svg")
    } else {
        bail!(
            "{}: unrecognized header {:?}",
            input.display(),
            data.header.join(",")
        );
    };
    let plot = plot.with_context(|| format!("plotting {}", input.display()))?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let file = if name == "parameters.svg" && stem != "trajectory" {
        format!("{stem}.svg")
    } else {
        name.to_string()
    };
    let path = out_dir.join(file);
    plot.save(&path)?;
    Ok(path)
}
