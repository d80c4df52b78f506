//! Rendering of analysis reports as a text table, JSON or CSV.

use std::fmt::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::AnalysisReport;
use crate::model::{Counterexample, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`; expected table, json or csv")),
        }
    }
}

pub const TABLE_HEADER: &str = "Program | LoC | T | S | M | η | Φ";

/// The summary row, e.g. `Motivating Example | 30 | 5 | 4 | 1 | 25% | output ≤ 10`.
pub fn table_row(r: &AnalysisReport) -> String {
    format!(
        "{} | {} | {} | {} | {} | {} | {}",
        r.program,
        r.loc,
        r.t,
        r.s,
        r.m,
        r.eta_text(),
        r.phi_text
    )
}

fn witness(c: &Counterexample) -> String {
    let mut s = format!("params={:?}", c.inputs.params);
    if c.inputs.reads.iter().any(|r| !r.is_empty()) {
        let _ = write!(s, " reads={:?}", c.inputs.reads);
    }
    if c.fresh_reads.iter().any(|r| !r.is_empty()) {
        let _ = write!(s, " fresh={:?}", c.fresh_reads);
    }
    let _ = write!(s, " use#{} bit {}", c.hook.occurrence, c.bit);
    if let Some(n) = c.cycles {
        let _ = write!(s, " cycles={n}");
    }
    s
}

fn verdict_cell(v: &Verdict) -> String {
    match v.direction {
        Some(d) => format!("{} ({d})", v.classification),
        None if v.pruned => format!("{} (sliced)", v.classification),
        None => v.classification.to_string(),
    }
}

fn table(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{TABLE_HEADER}");
    let _ = writeln!(out, "{}", table_row(r));
    let _ = writeln!(out);
    let rows: Vec<[String; 6]> = r
        .per_variable
        .iter()
        .map(|v| {
            [
                v.variable.clone(),
                if v.in_slice { "yes" } else { "no" }.to_string(),
                verdict_cell(&v.verdict),
                match (&v.oracle, v.agree) {
                    (Some(o), Some(a)) => {
                        format!("{}{}", verdict_cell(o), if a { "" } else { "  MISMATCH" })
                    }
                    _ => v.engine.to_string(),
                },
                v.verdict.counterexample.as_ref().map(witness).unwrap_or_default(),
                format!("{:.1} ms", v.elapsed_ms),
            ]
        })
        .collect();
    let oracle_col = if r.per_variable.iter().any(|v| v.oracle.is_some()) {
        "oracle"
    } else {
        "engine"
    };
    let header = ["variable", "slice", "verdict", oracle_col, "witness", "time"];
    let mut widths = header.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(out, "{}", line(&header.map(String::from)));
    for row in &rows {
        let _ = writeln!(out, "{}", line(row));
    }
    let _ = writeln!(
        out,
        "\nCRVs: {} of {} relevant ({} unknown)",
        r.crv_count, r.s, r.unknown_count
    );
    out
}

#[derive(Clone, Serialize)]
struct CsvRow<'a> {
    row: &'a str,
    program: &'a str,
    variable: Option<&'a str>,
    in_slice: Option<bool>,
    classification: Option<String>,
    direction: Option<String>,
    agree: Option<bool>,
    witness: Option<String>,
    loc: Option<usize>,
    t: Option<usize>,
    s: Option<usize>,
    m: Option<usize>,
    eta: Option<String>,
    unknown: Option<usize>,
    phi: Option<&'a str>,
}

fn csv(r: &AnalysisReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let empty = CsvRow {
        row: "variable",
        program: &r.program,
        variable: None,
        in_slice: None,
        classification: None,
        direction: None,
        agree: None,
        witness: None,
        loc: None,
        t: None,
        s: None,
        m: None,
        eta: None,
        unknown: None,
        phi: None,
    };
    for v in &r.per_variable {
        w.serialize(CsvRow {
            variable: Some(&v.variable),
            in_slice: Some(v.in_slice),
            classification: Some(v.verdict.classification.to_string()),
            direction: v.verdict.direction.map(|d| d.to_string()),
            agree: v.agree,
            witness: v.verdict.counterexample.as_ref().map(witness),
            ..empty.clone()
        })
        .expect("writing to memory");
    }
    w.serialize(CsvRow {
        row: "summary",
        loc: Some(r.loc),
        t: Some(r.t),
        s: Some(r.s),
        m: Some(r.m),
        eta: Some(r.eta_text()),
        unknown: Some(r.unknown_count),
        phi: Some(&r.phi_text),
        ..empty
    })
    .expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
}

pub fn emit_report(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Table => table(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => csv(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{eta, Engine};

    fn report(s: usize, m: usize) -> AnalysisReport {
        AnalysisReport {
            program: "Motivating Example".into(),
            loc: 30,
            t: 5,
            s,
            m,
            eta: eta(s, m),
            crv_count: s - m,
            unknown_count: 0,
            phi_text: "output ≤ 10".into(),
            property: "always output <= 10".into(),
            engine: Engine::Checker,
            relevant_variables: Vec::new(),
            per_variable: Vec::new(),
        }
    }

    #[test]
    fn eta_of_one_in_four_is_25_percent() {
        let r = report(4, 1);
        assert_eq!(r.eta_text(), "25%");
        assert_eq!(table_row(&r), "Motivating Example | 30 | 5 | 4 | 1 | 25% | output ≤ 10");
    }

    #[test]
    fn empty_slice_has_no_eta() {
        let r = report(0, 0);
        assert_eq!(r.eta, None);
        assert!(table_row(&r).contains("| n/a |"));
        assert!(emit_report(&r, Format::Json).contains("\"eta\": null"));
    }

    #[test]
    fn csv_has_a_summary_row() {
        let text = emit_report(&report(4, 1), Format::Csv);
        let last = text.lines().last().unwrap();
        assert!(last.starts_with("summary,Motivating Example"));
        assert!(last.contains("25%"));
    }
}
