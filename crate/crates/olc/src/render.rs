//! ASCII and SVG drawings of several polygons on a common frame.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use ol_crystal::polygon::Polygon;

/// A polygon with the name and glyph it is drawn with.
#[derive(Debug, Clone)]
pub struct Curve {
    pub name: String,
    pub glyph: char,
    pub polygon: Polygon,
}

impl Curve {
    pub fn new(name: &str, glyph: char, polygon: Polygon) -> Curve {
        Curve { name: name.to_string(), glyph, polygon }
    }
}

const COLUMNS_PER_UNIT: usize = 6;
const MAX_ROWS: usize = 40;
const COLORS: [&str; 6] = ["#c0392b", "#2471a3", "#239b56", "#7d3c98", "#b9770e", "#566573"];

/// `(x, P(x))` for every integer abscissa, with exact labels.
pub fn vertex_labels(p: &Polygon) -> String {
    p.values()
        .iter()
        .enumerate()
        .map(|(x, y)| format!("({x},{y})"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn breakpoint_labels(p: &Polygon) -> String {
    let values = p.values();
    p.breakpoints()
        .iter()
        .map(|&x| format!("({x},{})", values[x]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn common_width(curves: &[Curve]) -> usize {
    curves.iter().map(|c| c.polygon.width()).max().unwrap_or(0)
}

fn max_value(curves: &[Curve]) -> BigRational {
    curves
        .iter()
        .flat_map(|c| c.polygon.values())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

/// Value of the piecewise linear graph at the rational abscissa `x`.
fn value_at(values: &[BigRational], x: &BigRational) -> BigRational {
    let i = x.floor().to_integer().to_usize().unwrap_or(0);
    if i + 1 >= values.len() {
        return values[values.len() - 1].clone();
    }
    let t = x - BigRational::from_integer(BigInt::from(i));
    &values[i] + (&values[i + 1] - &values[i]) * t
}

/// Rows per unit of height: the lcm of the denominators, reduced to fit `MAX_ROWS`.
fn row_scale(curves: &[Curve], top: &BigRational) -> BigRational {
    let lcm = curves
        .iter()
        .flat_map(|c| c.polygon.values())
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scale = BigRational::from_integer(lcm);
    let limit = BigRational::from_integer(BigInt::from(MAX_ROWS));
    if top.is_zero() || &scale * top <= limit {
        scale
    } else {
        limit / top
    }
}

/// Character plot with one glyph per curve; `#` marks points shared by every curve and
/// `*` points shared by some of them.
#[allow(clippy::needless_range_loop)]
pub fn ascii(curves: &[Curve]) -> String {
    let h = common_width(curves);
    let mut out = String::new();
    if h == 0 {
        out.push_str("(empty polygon: width 0)\n");
        for c in curves {
            out.push_str(&format!("{} {}: (0,0)\n", c.glyph, c.name));
        }
        return out;
    }
    let top = max_value(curves);
    let scale = row_scale(curves, &top);
    let rows = (&top * &scale).round().to_integer().to_usize().unwrap_or(0) + 1;
    let cols = h * COLUMNS_PER_UNIT + 1;
    let mut grid: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); cols]; rows];
    let values: Vec<Vec<BigRational>> = curves.iter().map(|c| c.polygon.values()).collect();
    for col in 0..cols {
        let x = BigRational::new(BigInt::from(col), BigInt::from(COLUMNS_PER_UNIT));
        for (k, vals) in values.iter().enumerate() {
            if vals.len() <= 1 || x > BigRational::from_integer(BigInt::from(vals.len() - 1)) {
                continue;
            }
            let y = value_at(vals, &x);
            let row = (y * &scale).round().to_integer().to_usize().unwrap_or(0).min(rows - 1);
            grid[row][col].push(k);
        }
    }
    let label_width = format!("{top}").len().max(1);
    for row in (0..rows).rev() {
        let y = BigRational::from_integer(BigInt::from(row)) / &scale;
        let label = if y.is_integer() || row == rows - 1 { format!("{y}") } else { String::new() };
        out.push_str(&format!("{label:>label_width$} |"));
        let line: String = grid[row]
            .iter()
            .map(|cell| match cell.len() {
                0 => ' ',
                1 => curves[cell[0]].glyph,
                n if n == curves.len() => '#',
                _ => '*',
            })
            .collect();
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push_str(&format!("{:>label_width$} +{}\n", "", "-".repeat(cols)));
    let mut axis = vec![' '; cols];
    for x in 0..=h {
        let digits: Vec<char> = x.to_string().chars().collect();
        for (j, ch) in digits.iter().enumerate() {
            if let Some(slot) = axis.get_mut(x * COLUMNS_PER_UNIT + j) {
                *slot = *ch;
            }
        }
    }
    out.push_str(&format!("{:>label_width$}  {}\n", "", axis.iter().collect::<String>().trim_end()));
    for c in curves {
        out.push_str(&format!("{} {}: {}\n", c.glyph, c.name, vertex_labels(&c.polygon)));
        out.push_str(&format!("  breakpoints {}\n", breakpoint_labels(&c.polygon)));
    }
    out
}

fn coord(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(0.0)
}

/// Plain SVG 1.1: one polyline per curve, breakpoints as dots, exact labels at breakpoints.
pub fn svg(curves: &[Curve]) -> String {
    let h = common_width(curves);
    let top = coord(&max_value(curves)).max(1.0);
    let unit_x = 80.0;
    let unit_y = (320.0 / top).min(80.0);
    let margin = 50.0;
    let width = margin * 2.0 + unit_x * h as f64;
    let height = margin * 2.0 + unit_y * top + 20.0 * curves.len() as f64;
    let px = |x: f64| margin + unit_x * x;
    let py = |y: f64| margin + unit_y * (top - y);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.1}\" height=\"{height:.1}\" viewBox=\"0 0 {width:.1} {height:.1}\">\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        px(0.0),
        py(0.0),
        px(h as f64),
        py(0.0)
    ));
    out.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        px(0.0),
        py(0.0),
        px(0.0),
        py(top)
    ));
    for x in 0..=h {
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{x}</text>\n",
            px(x as f64),
            py(0.0) + 16.0
        ));
    }
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let values = c.polygon.values();
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(x, y)| format!("{:.3},{:.3}", px(x as f64), py(coord(y))))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"><title>{}</title></polyline>\n",
            points.join(" "),
            c.name
        ));
        for &x in &c.polygon.breakpoints() {
            let y = &values[x];
            out.push_str(&format!(
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"{color}\"/>\n",
                px(x as f64),
                py(coord(y))
            ));
            out.push_str(&format!(
                "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"11\" fill=\"{color}\">({x},{y})</text>\n",
                px(x as f64) + 4.0,
                py(coord(y)) - 4.0 - 12.0 * k as f64
            ));
        }
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{color}\">{}: {}</text>\n",
            margin,
            py(0.0) + 36.0 + 20.0 * k as f64,
            c.name,
            vertex_labels(&c.polygon)
        ));
    }
    out.push_str("</svg>\n");
    out
}
