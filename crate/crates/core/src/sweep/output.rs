use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::grid::GridResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        }
    }

    /// Format implied by a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

/// `<stem>-<digest>.<ext>`
pub fn file_name(stem: &str, digest: &str, format: OutputFormat) -> String {
    format!("{stem}-{digest}.{}", format.extension())
}

/// 17 significant digits, enough to recover every double exactly.
fn number(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => "NaN".into(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io {
        path: "<csv buffer>".into(),
        message: e.to_string(),
    }
}

fn to_csv(res: &GridResult) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let mut header: Vec<String> = res.axes.grid.iter().map(|a| a.name.clone()).collect();
    if res.axes.time.is_some() {
        header.push("t".into());
    }
    header.extend(res.axes.columns.iter().cloned());
    header.push("flag".into());
    w.write_record(&header).map_err(csv_error)?;

    let width = res.axes.columns.len();
    let times = res.axes.time.clone();
    for (cell, (row, flag)) in res.values.iter().zip(&res.flags).enumerate() {
        let coords: Vec<String> = res.coordinates(cell).into_iter().map(|c| number(Some(c))).collect();
        let label = flag.label();
        for (k, chunk) in row.chunks(width).enumerate() {
            let mut record = coords.clone();
            if let Some(ts) = &times {
                record.push(number(Some(ts[k])));
            }
            record.extend(chunk.iter().map(|&v| number(v)));
            record.push(label.clone());
            w.write_record(&record).map_err(csv_error)?;
        }
    }
    w.into_inner().map_err(|e| Error::Io {
        path: "<csv buffer>".into(),
        message: e.to_string(),
    })
}

fn to_json(res: &GridResult) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(res).map_err(|e| Error::InvalidInput(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 80.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Perceptually ordered ramp with strictly increasing luminance.
fn color(x: f64) -> String {
    const RAMP: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let x = if x.is_finite() { x.clamp(0.0, 1.0) } else { 0.0 };
    let pos = x * (RAMP.len() - 1) as f64;
    let i = (pos.floor() as usize).min(RAMP.len() - 2);
    let f = pos - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |u: f64, v: f64| (u + (v - u) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn frame(svg: &mut String, title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = write!(
        svg,
        concat!(
            "<rect x=\"{x0}\" y=\"{y1}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"black\"/>\n",
            "<text x=\"{cx}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n",
            "<text x=\"{cx}\" y=\"{xl}\" text-anchor=\"middle\" font-size=\"14\">{xlab}</text>\n",
            "<text x=\"20\" y=\"{cy}\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 {cy})\">{ylab}</text>\n",
            "<text x=\"{x0}\" y=\"{tick_y}\" text-anchor=\"start\" font-size=\"11\">{xmin:.4}</text>\n",
            "<text x=\"{x1}\" y=\"{tick_y}\" text-anchor=\"end\" font-size=\"11\">{xmax:.4}</text>\n",
            "<text x=\"{tick_x}\" y=\"{y0}\" text-anchor=\"end\" font-size=\"11\">{ymin:.4}</text>\n",
            "<text x=\"{tick_x}\" y=\"{y1t}\" text-anchor=\"end\" font-size=\"11\">{ymax:.4}</text>\n",
        ),
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
        w = x1 - x0,
        h = y0 - y1,
        cx = WIDTH / 2.0,
        ty = MARGIN / 2.0,
        xl = HEIGHT - MARGIN / 3.0,
        cy = HEIGHT / 2.0,
        title = escape(title),
        xlab = escape(x_label),
        ylab = escape(y_label),
        tick_y = y0 + 16.0,
        tick_x = x0 - 6.0,
        y1t = y1 + 10.0,
        xmin = x.0,
        xmax = x.1,
        ymin = y.0,
        ymax = y.1,
    );
}

fn title_of(res: &GridResult) -> String {
    res.params
        .get("name")
        .and_then(|v| v.as_str())
        .map_or_else(|| res.axes.columns.join(", "), str::to_string)
}

fn heatmap(res: &GridResult, svg: &mut String) {
    let (rows, cols) = (&res.axes.grid[0], &res.axes.grid[1]);
    let (n1, n2) = (rows.values.len(), cols.values.len());
    let (lo, hi) = range(res.values.iter().map(|r| r[0].unwrap_or(f64::NAN)));
    frame(
        svg,
        &format!("{} [{lo:.3e}, {hi:.3e}]", title_of(res)),
        &cols.name,
        &rows.name,
        range(cols.values.iter().copied()),
        range(rows.values.iter().copied()),
    );
    let cw = (WIDTH - 2.0 * MARGIN) / n2 as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / n1 as f64;
    for (cell, row) in res.values.iter().enumerate() {
        let (i, j) = (cell / n2, cell % n2);
        let fill = match row[0] {
            Some(v) if v.is_finite() => color((v - lo) / (hi - lo)),
            _ => "#bdbdbd".to_string(),
        };
        // first axis runs bottom to top
        let _ = writeln!(
            svg,
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{fill}\"/>",
            MARGIN + j as f64 * cw,
            HEIGHT - MARGIN - (i + 1) as f64 * ch,
            cw,
            ch
        );
    }
}

fn lines(res: &GridResult, svg: &mut String) {
    let (x_label, xs): (String, Vec<f64>) = match (&res.axes.time, res.axes.grid.as_slice()) {
        (Some(t), _) => ("t".into(), t.clone()),
        (None, [axis]) => (axis.name.clone(), axis.values.clone()),
        (None, _) => ("cell".into(), (0..res.values.len()).map(|i| i as f64).collect()),
    };
    // one curve per (cell, column) along the x axis
    let mut curves: Vec<(String, Vec<Option<f64>>)> = Vec::new();
    if res.axes.time.is_some() {
        for cell in 0..res.values.len() {
            let coords = res.coordinates(cell);
            let tag: Vec<String> = res.axes.grid.iter().zip(&coords).map(|(a, c)| format!("{}={c}", a.name)).collect();
            for (c, name) in res.axes.columns.iter().enumerate() {
                curves.push((format!("{name} {}", tag.join(" ")), res.series(cell, c)));
            }
        }
    } else {
        for (c, name) in res.axes.columns.iter().enumerate() {
            curves.push((name.clone(), res.values.iter().map(|r| r[c]).collect()));
        }
    }
    let x_range = range(xs.iter().copied());
    let y_range = range(curves.iter().flat_map(|(_, v)| v.iter().map(|x| x.unwrap_or(f64::NAN))));
    frame(svg, &title_of(res), &x_label, &res.axes.columns.join(", "), x_range, y_range);
    let sx = |x: f64| MARGIN + (x - x_range.0) / (x_range.1 - x_range.0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_range.0) / (y_range.1 - y_range.0) * (HEIGHT - 2.0 * MARGIN);
    let n = curves.len().max(2);
    for (k, (label, ys)) in curves.iter().enumerate() {
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter_map(|(&x, y)| y.filter(|v| v.is_finite()).map(|y| format!("{:.3},{:.3}", sx(x), sy(y))))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"><title>{}</title></polyline>",
            color(k as f64 / (n - 1) as f64 * 0.9),
            points.join(" "),
            escape(label)
        );
    }
}

fn to_svg(res: &GridResult) -> Vec<u8> {
    let mut svg = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    if res.axes.grid.len() == 2 && res.axes.time.is_none() && res.axes.columns.len() == 1 {
        heatmap(res, &mut svg);
    } else {
        lines(res, &mut svg);
    }
    svg.push_str("</svg>\n");
    svg.into_bytes()
}

/// Renders `res` as CSV (RFC 4180, header plus one row per cell and time
/// point), JSON (`{schema, params, axes, values, flags}`) or a
/// self-contained SVG (heatmap for a two-axis scalar grid, curves
/// otherwise).
pub fn serialize_result(res: &GridResult, format: OutputFormat) -> Result<Vec<u8>> {
    res.validate()?;
    match format {
        OutputFormat::Csv => to_csv(res),
        OutputFormat::Json => to_json(res),
        OutputFormat::Svg => Ok(to_svg(res)),
    }
}

pub fn write_result(res: &GridResult, format: OutputFormat, path: &Path) -> Result<()> {
    let bytes = serialize_result(res, format)?;
    std::fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::grid::{CellFlag, GridAxes, GridAxis};

    fn scalar_grid(n1: usize, n2: usize) -> GridResult {
        let axis = |name: &str, n: usize| GridAxis {
            name: name.into(),
            values: (0..n).map(|i| i as f64 + 0.5).collect(),
        };
        GridResult::new(
            serde_json::json!({"name": "demo"}),
            GridAxes {
                grid: vec![axis("delta", n1), axis("lambda", n2)],
                time: None,
                columns: vec!["N".into()],
            },
            (0..n1 * n2).map(|i| vec![Some(0.1 * i as f64 / 3.0)]).collect(),
            vec![CellFlag::ok(); n1 * n2],
        )
        .unwrap()
    }

    #[test]
    fn single_cell_csv_has_two_lines() {
        let csv = String::from_utf8(serialize_result(&scalar_grid(1, 1), OutputFormat::Csv).unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("delta,lambda,N,flag\r\n"));
        assert!(csv.contains("5.0000000000000000e-1"));
    }

    #[test]
    fn csv_values_round_trip_exactly() {
        let res = scalar_grid(2, 3);
        let bytes = serialize_result(&res, OutputFormat::Csv).unwrap();
        let mut rd = csv::Reader::from_reader(bytes.as_slice());
        for (rec, row) in rd.records().zip(&res.values) {
            let v: f64 = rec.unwrap()[2].parse().unwrap();
            assert_eq!(v, row[0].unwrap());
        }
    }

    #[test]
    fn csv_quotes_flag_messages() {
        let mut res = scalar_grid(1, 2);
        res.values[1][0] = None;
        res.flags[1] = CellFlag::error("bad, \"worse\"");
        let csv = String::from_utf8(serialize_result(&res, OutputFormat::Csv).unwrap()).unwrap();
        assert!(csv.contains("NaN,\"error: bad, \"\"worse\"\"\""));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let mut res = scalar_grid(3, 2);
        res.values[0][0] = Some(std::f64::consts::PI / 7.0);
        res.values[1][0] = None;
        res.flags[1] = CellFlag::error("x");
        let a = serialize_result(&res, OutputFormat::Json).unwrap();
        let back: GridResult = serde_json::from_slice(&a).unwrap();
        assert_eq!(back, res);
        assert_eq!(serialize_result(&back, OutputFormat::Json).unwrap(), a);
        let text = String::from_utf8(a).unwrap();
        let order: Vec<usize> = ["\"schema\"", "\"params\"", "\"axes\"", "\"values\"", "\"flags\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("null"));
    }

    #[test]
    fn heatmap_has_one_rect_per_cell() {
        let svg = String::from_utf8(serialize_result(&scalar_grid(4, 5), OutputFormat::Svg).unwrap()).unwrap();
        // background and frame are the two extra rects
        assert_eq!(svg.matches("<rect").count(), 20 + 2);
        assert!(svg.contains(">lambda</text>") && svg.contains(">delta</text>"));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn color_ramp_is_monotone_in_luminance() {
        let lum = |c: String| {
            let v = u32::from_str_radix(&c[1..], 16).unwrap();
            let (r, g, b) = ((v >> 16) & 255, (v >> 8) & 255, v & 255);
            0.2126 * r as f64 + 0.7152 * g as f64 + 0.0722 * b as f64
        };
        let l: Vec<f64> = (0..=100).map(|i| lum(color(i as f64 / 100.0))).collect();
        assert!(l.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn series_svg_draws_polylines() {
        let res = GridResult::new(
            serde_json::json!({}),
            GridAxes {
                grid: vec![GridAxis {
                    name: "lambda".into(),
                    values: vec![0.1, 1.0],
                }],
                time: Some(vec![0.0, 1.0, 2.0]),
                columns: vec!["C_l1".into()],
            },
            vec![vec![Some(1.0), Some(0.9), Some(0.8)], vec![Some(1.0), Some(0.7), Some(0.5)]],
            vec![CellFlag::ok(); 2],
        )
        .unwrap();
        let svg = String::from_utf8(serialize_result(&res, OutputFormat::Svg).unwrap()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        let csv = String::from_utf8(serialize_result(&res, OutputFormat::Csv).unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 1 + 6);
    }

    #[test]
    fn formats_parse_and_name_files() {
        assert_eq!("CSV".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert!(matches!("xml".parse::<OutputFormat>(), Err(Error::UnsupportedFormat(_))));
        assert_eq!(file_name("fig2-gp0", "abc", OutputFormat::Svg), "fig2-gp0-abc.svg");
        assert_eq!(OutputFormat::from_path(Path::new("a/b.json")), Some(OutputFormat::Json));
    }

    #[test]
    fn write_failure_names_the_path() {
        let err = write_result(&scalar_grid(1, 1), OutputFormat::Csv, Path::new("/nonexistent/dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.csv"));
    }
}
