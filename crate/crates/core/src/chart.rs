//! Minimal SVG line charts and histograms from CSV tables.
//!
//! Output is plain text with fixed formatting, so identical inputs give
//! identical bytes.

use std::fmt::Write as _;

use thiserror::Error;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
const MAX_SERIES: usize = 3;
pub const HISTOGRAM_COLUMNS: [&str; 3] = ["bin_lo", "bin_hi", "count"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("CSV has no header")]
    NoHeader,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
    #[error("column `{0}` not in CSV header")]
    MissingColumn(String),
    #[error("between 1 and {MAX_SERIES} y columns are required, got {0}")]
    SeriesCount(usize),
    #[error("no finite data to plot")]
    NoData,
}

/// Numeric CSV table; `nan` cells parse to NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, ChartError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(ChartError::NoHeader)?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() {
                return Err(ChartError::Row {
                    line: i + 2,
                    reason: format!("{} fields, header has {}", fields.len(), columns.len()),
                });
            }
            let row = fields
                .iter()
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|_| ChartError::Row {
                        line: i + 2,
                        reason: format!("not a number: `{f}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, ChartError> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| ChartError::MissingColumn(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn is_histogram(&self) -> bool {
        self.columns == HISTOGRAM_COLUMNS
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub x: String,
    pub y: Vec<String>,
    pub title: String,
    pub log_y: bool,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Data range padded so that a flat series still gets a visible axis.
fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return None;
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    fn axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str, log_y: bool) {
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
        );
        for t in ticks(self.x.0, self.x.1) {
            let px = self.px(t);
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
                y0 + 5.0,
                y0 + 18.0,
                label(t)
            );
        }
        for t in ticks(self.y.0, self.y.1) {
            let py = self.py(t);
            let text = if log_y {
                format!("1e{}", label(t))
            } else {
                label(t)
            };
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                text
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 12.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// One polyline per y column against the x column, with legend and title.
/// With `log_y`, values are plotted as `log10(y)` and non-positive ones dropped.
pub fn line_chart(table: &Table, spec: &ChartSpec) -> Result<String, ChartError> {
    if spec.y.is_empty() || spec.y.len() > MAX_SERIES {
        return Err(ChartError::SeriesCount(spec.y.len()));
    }
    let xs = table.column(&spec.x)?;
    let series: Vec<(String, Vec<(f64, f64)>)> = spec
        .y
        .iter()
        .map(|name| {
            let ys = table.column(name)?;
            let pts = xs
                .iter()
                .zip(ys)
                .map(|(&x, y)| {
                    (
                        x,
                        if spec.log_y {
                            if y > 0.0 {
                                y.log10()
                            } else {
                                f64::NAN
                            }
                        } else {
                            y
                        },
                    )
                })
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            Ok((name.clone(), pts))
        })
        .collect::<Result<_, ChartError>>()?;
    let frame = Frame {
        x: range(series.iter().flat_map(|s| s.1.iter().map(|p| p.0))).ok_or(ChartError::NoData)?,
        y: range(series.iter().flat_map(|s| s.1.iter().map(|p| p.1))).ok_or(ChartError::NoData)?,
    };
    let mut out = header();
    let y_label = if spec.log_y {
        format!("log10({})", spec.y.join(", "))
    } else {
        spec.y.join(", ")
    };
    frame.axes(&mut out, &spec.title, &spec.x, &y_label, spec.log_y);
    for (i, (name, pts)) in series.iter().enumerate() {
        let points: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            COLORS[i],
            points.join(" ")
        );
        let ly = TOP + 8.0 + 16.0 * i as f64;
        let lx = WIDTH - RIGHT - 150.0;
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="4" fill="{}"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            ly - 2.0,
            COLORS[i],
            lx + 18.0,
            ly + 4.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One bar per `bin_lo,bin_hi,count` row.
pub fn histogram_chart(table: &Table, title: &str) -> Result<String, ChartError> {
    let lo = table.column(HISTOGRAM_COLUMNS[0])?;
    let hi = table.column(HISTOGRAM_COLUMNS[1])?;
    let counts = table.column(HISTOGRAM_COLUMNS[2])?;
    if counts.is_empty() {
        return Err(ChartError::NoData);
    }
    let max_count = counts.iter().copied().fold(0.0, f64::max).max(1.0);
    let frame = Frame {
        x: range(lo.iter().chain(&hi).copied()).ok_or(ChartError::NoData)?,
        y: (0.0, max_count),
    };
    let mut out = header();
    frame.axes(&mut out, title, "value", "count", false);
    let n = counts.len() as f64;
    let slot = (WIDTH - LEFT - RIGHT) / n;
    for (i, &c) in counts.iter().enumerate() {
        // Bars share equal slots so zero-width bins stay visible.
        let x = if lo[i] < hi[i] {
            frame.px(lo[i])
        } else {
            LEFT + slot * i as f64
        };
        let w = if lo[i] < hi[i] {
            frame.px(hi[i]) - frame.px(lo[i])
        } else {
            slot
        };
        let top = frame.py(c);
        let _ = writeln!(
            out,
            r#"<rect class="bar" x="{x:.2}" y="{top:.2}" width="{w:.2}" height="{:.2}" fill="{}" stroke="white"/>"#,
            frame.py(0.0) - top,
            COLORS[0]
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
