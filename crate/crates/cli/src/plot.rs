//! Deterministic SVG line charts of entropy traces and sweep reports.

use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("malformed CSV: {0}")]
    Malformed(String),
    #[error("no data rows")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, PlotError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| PlotError::Malformed(e.to_string()))?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        if header.is_empty() || header.iter().any(|h| h.is_empty()) {
            return Err(PlotError::Malformed("missing header".into()));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| PlotError::Malformed(e.to_string()))?;
            let row = rec
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| PlotError::Malformed(format!("not a number: '{s}'")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(PlotError::Empty);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, PlotError> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PlotError::Malformed(format!("missing column '{name}'")))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Series<'a> {
    name: &'a str,
    x: Vec<f64>,
    y: Vec<f64>,
    markers: bool,
}

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    logx: bool,
    logy: bool,
}

impl Axes {
    fn tx(&self, v: f64) -> f64 {
        let v = if self.logx { v.log10() } else { v };
        MARGIN + (v - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn ty(&self, v: f64) -> f64 {
        let v = if self.logy { v.log10() } else { v };
        H - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn chart(title: &str, xlabel: &str, series: &[Series], logx: bool, logy: bool) -> String {
    let keep = |v: f64, log: bool| v.is_finite() && (!log || v > 0.0);
    let tr = |v: f64, log: bool| if log { v.log10() } else { v };
    let (x0, x1) = range(series.iter().flat_map(|s| {
        s.x.iter()
            .copied()
            .filter(|&v| keep(v, logx))
            .map(|v| tr(v, logx))
    }));
    let (y0, y1) = range(series.iter().flat_map(|s| {
        s.y.iter()
            .copied()
            .filter(|&v| keep(v, logy))
            .map(|v| tr(v, logy))
    }));
    let ax = Axes {
        x0,
        x1,
        y0,
        y1,
        logx,
        logy,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{title}</text>"#,
        W / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {m} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{xlabel}</text>"#,
        W / 2.0,
        H - 20.0
    );
    let fmt_tick = |v: f64, log: bool| {
        if log {
            format!("1e{v:.1}")
        } else {
            format!("{v:.3e}")
        }
    };
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-size="10">{}</text>"#,
        H - MARGIN + 14.0,
        fmt_tick(x0, logx)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{}</text>"#,
        W - MARGIN,
        H - MARGIN + 14.0,
        fmt_tick(x1, logx)
    );
    let _ = writeln!(
        svg,
        r#"<text x="4" y="{}" font-size="10">{}</text>"#,
        H - MARGIN,
        fmt_tick(y0, logy)
    );
    let _ = writeln!(
        svg,
        r#"<text x="4" y="{}" font-size="10">{}</text>"#,
        MARGIN,
        fmt_tick(y1, logy)
    );

    for (i, s) in series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let pts: Vec<(f64, f64)> =
            s.x.iter()
                .zip(&s.y)
                .filter(|(&x, &y)| keep(x, logx) && keep(y, logy))
                .map(|(&x, &y)| (ax.tx(x), ax.ty(y)))
                .collect();
        if pts.len() > 1 {
            let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{colour}"/>"#,
                d.join(" ")
            );
        }
        if s.markers {
            for (x, y) in &pts {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{colour}"/>"#
                );
            }
        }
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" font-size="11" fill="{colour}">{}</text>"#,
            W - MARGIN - 150.0,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Trace CSVs give the entropy components over time; sweep reports give the
/// decay of `sup_t (H − floor)` against the Mach number.
pub fn render(text: &str) -> Result<String, PlotError> {
    let t = Table::parse(text)?;
    match t.header.first().map(String::as_str) {
        Some("t") => {
            let x = t.column("t")?;
            let names = ["H", "comp_velocity", "comp_pressure", "comp_quantum"];
            let series = names
                .iter()
                .map(|n| {
                    Ok(Series {
                        name: n,
                        x: x.clone(),
                        y: t.column(n)?,
                        markers: false,
                    })
                })
                .collect::<Result<Vec<_>, PlotError>>()?;
            Ok(chart("relative entropy", "t", &series, false, false))
        }
        Some("eps") => {
            let x = t.column("eps")?;
            let series = [
                Series {
                    name: "sup_H_minus_floor",
                    x: x.clone(),
                    y: t.column("sup_H_minus_floor")?,
                    markers: true,
                },
                Series {
                    name: "sup_H",
                    x,
                    y: t.column("sup_H")?,
                    markers: false,
                },
            ];
            Ok(chart("Mach number sweep", "eps", &series, true, true))
        }
        _ => Err(PlotError::Malformed(
            "expected a trace or sweep header".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = "eps,sup_H,sup_H_minus_floor,sup_strong_gap,fitted_rate,C_fit,M_fit\n\
                         0.2,4e-3,1.5e-3,1e-14,NaN,1,2\n0.1,1.2e-3,2.9e-4,1e-14,2.4,1,1.7\n0.05,2.8e-4,6.6e-5,1e-14,2.1,1,0.5\n";

    #[test]
    fn sweep_chart_has_three_markers() {
        let svg = render(SWEEP).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg, render(SWEEP).unwrap());
    }

    #[test]
    fn trace_chart() {
        let csv = "t,E,H,comp_velocity,comp_pressure,comp_quantum,strong_gap\n0,1,0,0,0,0,0\n0.1,1,0.2,0.1,0.05,0.05,0\n";
        let svg = render(csv).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn empty_and_malformed() {
        assert!(matches!(
            render("t,E,H,comp_velocity,comp_pressure,comp_quantum\n"),
            Err(PlotError::Empty)
        ));
        assert!(render("").is_err());
        assert!(render("t,H\n0,abc\n").is_err());
        assert!(render("x,y\n0,1\n").is_err());
    }
}
