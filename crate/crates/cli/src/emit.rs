use std::io::{self, Write};

use morsim::scan::{AnchorCheck, FigureReport, Relation, SpectrumRow};
use morsim::units::ScaledParams;
use serde_json::{json, Map, Value};

pub const COLUMNS: [&str; 12] = [
    "scan_var",
    "re_s_plus_0",
    "im_s_plus_0",
    "re_s_minus_0",
    "im_s_minus_0",
    "re_s_plus_c",
    "im_s_plus_c",
    "ty_off",
    "ty_on",
    "eta",
    "theta",
    "regime",
];

fn numbers(row: &SpectrumRow) -> [f64; 11] {
    [
        row.scan_value,
        row.s_plus_0.re,
        row.s_plus_0.im,
        row.s_minus_0.re,
        row.s_minus_0.im,
        row.s_plus_c.re,
        row.s_plus_c.im,
        row.ty_off,
        row.ty_on,
        row.eta,
        row.theta,
    ]
}

/// 17 significant digits, so the text parses back to the same `f64`.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rows_csv(out: &mut dyn Write, rows: &[SpectrumRow]) -> io::Result<()> {
    writeln!(out, "{}", COLUMNS.join(","))?;
    for row in rows {
        let mut fields: Vec<String> = numbers(row).iter().map(|&x| number(x)).collect();
        fields.push(row.regime.regime.to_string());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::Null
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn rows_json(out: &mut dyn Write, rows: &[SpectrumRow]) -> io::Result<()> {
    let table: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut object = Map::new();
            for (name, x) in COLUMNS.iter().zip(numbers(row)) {
                object.insert((*name).into(), json_number(x));
            }
            object.insert("regime".into(), json!(row.regime.regime.to_string()));
            Value::Object(object)
        })
        .collect();
    serde_json::to_writer_pretty(&mut *out, &table)?;
    writeln!(out)
}

pub fn roots_csv(out: &mut dyn Write, variable: &str, roots: &[f64]) -> io::Result<()> {
    writeln!(out, "{variable}")?;
    for &r in roots {
        writeln!(out, "{}", number(r))?;
    }
    Ok(())
}

pub fn roots_json(out: &mut dyn Write, variable: &str, n: u32, roots: &[f64]) -> io::Result<()> {
    let value = json!({ "variable": variable, "n": n, "roots": roots });
    serde_json::to_writer_pretty(&mut *out, &value)?;
    writeln!(out)
}

pub fn units_text(out: &mut dyn Write, scaled: &ScaledParams) -> io::Result<()> {
    let width = scaled.conversions.iter().map(|c| c.quantity.len()).max().unwrap_or(0);
    for c in &scaled.conversions {
        writeln!(out, "{:width$}  {:>24}  {}", c.quantity, number(c.value), c.formula)?;
    }
    Ok(())
}

pub fn units_json(out: &mut dyn Write, scaled: &ScaledParams) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, scaled)?;
    writeln!(out)
}

fn relation(a: &AnchorCheck) -> String {
    match a.relation {
        Relation::Near => format!("{:.6} +/- {:.3e}", a.expected, a.tolerance),
        Relation::Below => format!("< {:.3e}", a.expected),
    }
}

pub fn report_text(out: &mut dyn Write, report: &FigureReport) -> io::Result<()> {
    writeln!(out, "{}", report.figure)?;
    let width = report.anchors.iter().map(|a| a.name.len()).max().unwrap_or(0);
    for a in &report.anchors {
        let verdict = if a.pass { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "  {verdict}  {:width$}  expected {:<28} computed {:.6e}",
            a.name,
            relation(a),
            a.computed
        )?;
    }
    for m in &report.markers {
        writeln!(out, "  marker {} = {:.6e}", m.label, m.value)?;
    }
    Ok(())
}

pub fn report_json(report: &FigureReport) -> Value {
    json!({
        "figure": report.figure.to_string(),
        "anchors": report.anchors.iter().map(|a| json!({
            "name": a.name,
            "expected": json_number(a.expected),
            "computed": json_number(a.computed),
            "tolerance": json_number(a.tolerance),
            "relation": a.relation,
            "pass": a.pass,
        })).collect::<Vec<_>>(),
        "markers": report.markers,
        "pass": report.all_pass(),
    })
}
