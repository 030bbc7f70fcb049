//! CSV renderings and atomic file output.

use std::io::Write;
use std::path::Path;

use convexma::approx::ConvergenceReport;
use convexma::measure::{AtomicMeasure, DegreeReport};
use convexma::rational::{format_rational, to_decimal, Rational};

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn axis_names(n: usize) -> Vec<String> {
    match n {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

fn exact_and_decimal(r: &Rational) -> [String; 2] {
    [format_rational(r), to_decimal(r, 12)]
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn measure_csv(mu: &AtomicMeasure) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = axis_names(mu.ambient_dim());
    header.extend(["mass".into(), "mass_decimal".into()]);
    w.write_record(&header).expect("in-memory");
    for (p, m) in mu.atoms() {
        let mut row: Vec<String> = p.coords().iter().map(format_rational).collect();
        row.extend(exact_and_decimal(m));
        w.write_record(&row).expect("in-memory");
    }
    finish(w)
}

pub fn degree_csv(reports: &[DegreeReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let n = reports.first().map_or(0, |r| r.vertex.dim());
    let mut header = axis_names(n);
    header.extend(
        ["ma_mass", "ma_mass_decimal", "toric_degree", "toric_degree_decimal", "deg_s", "rescale", "integral_degree"]
            .map(String::from),
    );
    w.write_record(&header).expect("in-memory");
    for r in reports {
        let mut row: Vec<String> = r.vertex.coords().iter().map(format_rational).collect();
        row.extend(exact_and_decimal(&r.ma_mass));
        row.extend(exact_and_decimal(&r.toric_degree));
        row.extend([r.deg_s.to_string(), r.rescale.to_string(), r.integral_degree.to_string()]);
        w.write_record(&row).expect("in-memory");
    }
    finish(w)
}

pub fn study_csv(report: &ConvergenceReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["step", "step_decimal", "error", "error_decimal", "oscillation_bound", "pieces", "atoms"]
        .map(String::from)
        .to_vec();
    for t in &report.test_names {
        header.push(t.clone());
        header.push(format!("{t}_decimal"));
    }
    w.write_record(&header).expect("in-memory");
    for r in &report.rows {
        let mut row = Vec::new();
        row.extend(exact_and_decimal(&r.step));
        row.extend(exact_and_decimal(&r.error));
        row.extend([format_rational(&r.oscillation_bound), r.pieces.to_string(), r.atoms.to_string()]);
        for v in &r.integrals {
            row.extend(exact_and_decimal(v));
        }
        w.write_record(&row).expect("in-memory");
    }
    finish(w)
}
