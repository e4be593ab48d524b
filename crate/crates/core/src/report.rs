//! CSV tables, SVG plots and report rows.
//!
//! Every writer is deterministic: floats go through [`fmt_num`], rows keep
//! the order in which they were produced.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::band::{BandFunction, EnergyReport};
use crate::bounds::BoundRow;
use crate::error::Result;
use crate::format::fmt_num;
use crate::geometry::GeometryClass;

/// Serializes infinite floats as the strings `"inf"` / `"-inf"` and NaN as `"nan"`.
pub mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&crate::format::fmt_num(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// `tau,s_value,L,n,order,residual`.
pub fn band_csv(band: &BandFunction) -> String {
    let m = &band.solver_meta;
    let mut s = String::from("tau,s_value,L,n,order,residual\n");
    for ((t, v), r) in band.taus.iter().zip(&band.values).zip(&band.residuals) {
        let _ = writeln!(s, "{},{},{},{},{},{}", fmt_num(*t), fmt_num(*v), fmt_num(m.length), m.n, m.order, fmt_num(*r));
    }
    s
}

/// `alpha,bound_z,bound_gauss,sigma_lower,E_fem,strict_certified`.
pub fn bound_csv(rows: &[BoundRow]) -> String {
    let mut s = String::from("alpha,bound_z,bound_gauss,sigma_lower,E_fem,strict_certified\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_num(r.alpha),
            fmt_num(r.bound_z),
            fmt_num(r.bound_gauss),
            fmt_num(r.sigma_lower),
            opt(r.e_fem),
            r.strict_certified
        );
    }
    s
}

/// One point of an opening-angle sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub alpha: f64,
    #[serde(rename = "E", with = "extended_float")]
    pub energy: f64,
    #[serde(rename = "E_star", with = "extended_float")]
    pub e_star: f64,
    #[serde(with = "extended_float")]
    pub s_ess_inf: f64,
    pub klass: GeometryClass,
    pub strict: bool,
    pub bound_small_angle: Option<f64>,
    /// `E > E* + margin`: the discretization is too coarse for this opening.
    pub anomalous: bool,
    /// Solver message when the point failed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl ReportRow {
    pub fn from_report(r: &EnergyReport, bound_small_angle: Option<f64>) -> Self {
        ReportRow {
            alpha: r.alpha,
            energy: r.energy,
            e_star: r.e_star,
            s_ess_inf: r.s_ess_inf,
            klass: r.klass,
            strict: r.strict,
            bound_small_angle,
            anomalous: r.energy > r.e_star + r.margin,
            error: None,
        }
    }

    pub fn failed(alpha: f64, klass: GeometryClass, message: String) -> Self {
        ReportRow {
            alpha,
            energy: f64::NAN,
            e_star: f64::NAN,
            s_ess_inf: f64::NAN,
            klass,
            strict: false,
            bound_small_angle: None,
            anomalous: false,
            error: Some(message),
        }
    }
}

/// `alpha,E,E_star,s_ess_inf,klass,strict,bound_small_angle`.
pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut s = String::from("alpha,E,E_star,s_ess_inf,klass,strict,bound_small_angle\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            fmt_num(r.alpha),
            fmt_num(r.energy),
            fmt_num(r.e_star),
            fmt_num(r.s_ess_inf),
            r.klass,
            r.strict,
            opt(r.bound_small_angle)
        );
    }
    s
}

/// `theta,sigma,sigma_lower`.
pub fn sigma_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("theta,sigma,sigma_lower\n");
    for (t, v, l) in rows {
        let _ = writeln!(s, "{},{},{}", fmt_num(*t), fmt_num(*v), fmt_num(*l));
    }
    s
}

/// One curve of a plot.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

impl Series {
    pub fn line(name: &str, points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Series { name: name.into(), points, color, dashed: false }
    }

    /// Horizontal line at `y` over `[x0, x1]`.
    pub fn level(name: &str, y: f64, x0: f64, x1: f64, color: &'static str) -> Self {
        Series { name: name.into(), points: vec![(x0, y), (x1, y)], color, dashed: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        let pad = ((y1 - y0) * 0.05).max(1e-3);
        (x0, x1, y0 - pad, y1 + pad)
    }

    pub fn to_svg(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        let c = |v: f64| format!("{:.2}", v);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
            w = WIDTH,
            h = HEIGHT
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, c(WIDTH / 2.0), escape(&self.title));
        let _ = writeln!(
            s,
            r#"<path d="M{a},{b} L{a},{d} L{e},{d}" fill="none" stroke="black"/>"#,
            a = c(MARGIN),
            b = c(MARGIN),
            d = c(HEIGHT - MARGIN),
            e = c(WIDTH - MARGIN)
        );
        for t in ticks(x0, x1) {
            let _ = writeln!(
                s,
                r#"<line x1="{x}" y1="{a}" x2="{x}" y2="{b}" stroke="black"/><text x="{x}" y="{c}" text-anchor="middle">{t}</text>"#,
                x = c(sx(t)),
                a = c(HEIGHT - MARGIN),
                b = c(HEIGHT - MARGIN + 5.0),
                c = c(HEIGHT - MARGIN + 18.0),
                t = fmt_num((t * 1e9).round() / 1e9)
            );
        }
        for t in ticks(y0, y1) {
            let _ = writeln!(
                s,
                r#"<line x1="{a}" y1="{y}" x2="{b}" y2="{y}" stroke="black"/><text x="{c}" y="{y}" text-anchor="end" dominant-baseline="middle">{t}</text>"#,
                y = c(sy(t)),
                a = c(MARGIN - 5.0),
                b = c(MARGIN),
                c = c(MARGIN - 8.0),
                t = fmt_num((t * 1e9).round() / 1e9)
            );
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, c(WIDTH / 2.0), c(HEIGHT - 15.0), escape(&self.xlabel));
        let _ = writeln!(
            s,
            r#"<text x="15" y="{y}" text-anchor="middle" transform="rotate(-90 15 {y})">{}</text>"#,
            escape(&self.ylabel),
            y = c(HEIGHT / 2.0)
        );
        for (k, series) in self.series.iter().enumerate() {
            let pts: Vec<String> = series
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{},{}", c(sx(x)), c(sy(y))))
                .collect();
            let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{}/>"#,
                pts.join(" "),
                series.color,
                dash
            );
            let ly = MARGIN + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{a}" y1="{y}" x2="{b}" y2="{y}" stroke="{col}"{dash}/><text x="{t}" y="{y}" dominant-baseline="middle">{name}</text>"#,
                a = c(WIDTH - MARGIN - 150.0),
                b = c(WIDTH - MARGIN - 125.0),
                t = c(WIDTH - MARGIN - 120.0),
                y = c(ly),
                col = series.color,
                name = escape(&series.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    /// `series,x,y`: exactly the plotted points.
    pub fn sidecar_csv(&self) -> String {
        let mut s = String::from("series,x,y\n");
        for series in &self.series {
            for &(x, y) in series.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
                let _ = writeln!(s, "{},{},{}", series.name, fmt_num(x), fmt_num(y));
            }
        }
        s
    }

    /// Writes `<stem>.svg` and its sidecar `<stem>_plot.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        fs::write(dir.join(format!("{stem}.svg")), self.to_svg())?;
        fs::write(dir.join(format!("{stem}_plot.csv")), self.sidecar_csv())?;
        Ok(())
    }
}
