//! CSV tables and log-log SVG plots of study results.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::{Case, StudyOutput};
use crate::verification::ERROR_NAMES;
use crate::Result;

pub const CSV_HEADER: [&str; 17] = [
    "study",
    "k",
    "N",
    "h",
    "theta",
    "eps",
    "inv_gamma",
    "zeta",
    "mode",
    "dofs",
    "status",
    "err_u",
    "err_gradu",
    "err_p",
    "err_u_gamma",
    "err_gradu_gamma",
    "err_p_gamma",
];

fn case_fields(study: &str, c: &Case, n: String, h: String) -> Vec<String> {
    vec![
        study.to_string(),
        c.order.to_string(),
        n,
        h,
        c.theta.to_string(),
        c.eps.to_string(),
        c.inv_gamma.to_string(),
        format!("{:+}", c.zeta as i32),
        c.mode.name().to_string(),
    ]
}

pub fn write_csv<W: Write>(w: W, out: &StudyOutput) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    let study = out.spec.study.name();
    for r in &out.rows {
        let mut rec = case_fields(study, &r.case, r.case.n.to_string(), r.case.h().to_string());
        rec.push(r.dofs.to_string());
        rec.push(r.status.clone());
        match &r.errors {
            Some(e) => rec.extend(e.as_array().iter().map(f64::to_string)),
            None => rec.extend(std::iter::repeat_n(String::new(), 6)),
        }
        wtr.write_record(&rec)?;
    }
    for r in &out.rates {
        let mut rec = case_fields(
            study,
            &r.fine,
            format!("{}-{}", r.coarse.n, r.fine.n),
            format!("{}-{}", r.coarse.h(), r.fine.h()),
        );
        rec.push(String::new());
        rec.push("rate".to_string());
        rec.extend(r.rates.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, out: &StudyOutput) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), out)
}

const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
type Series = Vec<(String, Vec<(f64, [f64; 6])>)>;

const DASHES: [&str; 4] = ["", "6,3", "2,2", "8,3,2,3"];

/// Log-log plot of every error norm against `h`, one polyline per norm
/// and parameter series.
pub fn svg_plot(out: &StudyOutput) -> String {
    let (w, hgt, margin) = (720.0, 480.0, 60.0);
    let legend_w = 220.0;

    // series keyed by (eps, 1/γ, mode)
    let mut series: Series = Vec::new();
    for r in out.rows.iter().filter(|r| r.converged()) {
        let key = format!("eps={} 1/g={} {}", r.case.eps, r.case.inv_gamma, r.case.mode.name());
        let e = r.errors.expect("converged rows carry errors").as_array();
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((r.case.h(), e)),
            None => series.push((key, vec![(r.case.h(), e)])),
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (_, pts) in &series {
        for (h, e) in pts {
            xs.push(h.log10());
            ys.extend(e.iter().filter(|v| **v > 0.0).map(|v| v.log10()));
        }
    }
    let bounds = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            (lo.floor(), hi.ceil().max(lo.floor() + 1.0))
        } else {
            (-2.0, 0.0)
        }
    };
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let plot_w = w - 2.0 * margin - legend_w;
    let plot_h = hgt - 2.0 * margin;
    let px = |lx: f64| margin + (lx - x0) / (x1 - x0) * plot_w;
    let py = |ly: f64| hgt - margin - (ly - y0) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for d in (x0 as i32)..=(x1 as i32) {
        let x = px(d as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="lightgray"/><text x="{x}" y="{}" text-anchor="middle">1e{d}</text>"#,
            margin,
            hgt - margin,
            hgt - margin + 18.0
        );
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let y = py(d as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{margin}" y1="{y}" x2="{}" y2="{y}" stroke="lightgray"/><text x="{}" y="{}" text-anchor="end">1e{d}</text>"#,
            margin + plot_w,
            margin - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">h</text>"#,
        margin + plot_w / 2.0,
        hgt - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{} k={}</text>"#,
        margin + plot_w / 2.0,
        margin - 20.0,
        out.spec.study.name(),
        out.spec.order
    );

    let mut legend_y = margin;
    for (si, (key, pts)) in series.iter().enumerate() {
        let dash = DASHES[si % DASHES.len()];
        for (ni, name) in ERROR_NAMES.iter().enumerate() {
            let coords: Vec<String> = pts
                .iter()
                .filter(|(_, e)| e[ni] > 0.0)
                .map(|(h, e)| format!("{:.2},{:.2}", px(h.log10()), py(e[ni].log10())))
                .collect();
            if coords.is_empty() {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="{dash}"/>"#,
                coords.join(" "),
                COLOURS[ni]
            );
            let lx = w - legend_w - margin / 2.0 + 20.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{}" stroke-dasharray="{dash}"/><text x="{}" y="{}">{name} {key}</text>"#,
                lx + 20.0,
                COLOURS[ni],
                lx + 25.0,
                legend_y + 4.0
            );
            legend_y += 14.0;
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{CaseResult, RateRow, Study, StudySpec};
    use crate::verification::ErrorReport;

    fn fake_output() -> StudyOutput {
        let spec = StudySpec::new(Study::Converge);
        let row = |n: usize, e: f64| CaseResult {
            case: Case::new(1, n),
            dofs: 100,
            status: "converged".into(),
            errors: Some(ErrorReport {
                l2_u_bulk: e,
                l2_gradu_bulk: e,
                l2_p_bulk: e,
                l2_u_gamma: e,
                l2_gradu_gamma: e,
                l2_p_gamma: e,
                dofs: 100,
                h: 0.0,
            }),
            pressure: None,
        };
        let rows = vec![row(8, 0.01), row(16, 0.0025)];
        let rates = vec![RateRow {
            coarse: rows[0].case,
            fine: rows[1].case,
            rates: [Some(2.0); 6],
        }];
        StudyOutput { spec, rows, rates }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &fake_output()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("converge,1,8,0.4,"));
        assert!(lines[1].contains(",1e0,10,+1,nitsche,100,converged,0.01,"));
        assert!(lines[3].contains(",8-16,0.4-0.2,"));
        assert!(lines[3].ends_with(",rate,2,2,2,2,2,2"));
    }

    #[test]
    fn svg_is_well_formed() {
        let svg = svg_plot(&fake_output());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 6);
    }
}
