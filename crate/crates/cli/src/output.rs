//! Report and table serialization.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;

use ballcheck::report::{sort_reports, VerificationReport};
use ballcheck::verify::{CharacterizationOutcome, CheckOptions, MembraneBundle};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub enum Output {
    Table(Table),
    Reports(Vec<VerificationReport>),
    Characterization(CharacterizationOutcome),
    Membrane(MembraneBundle),
}

/// One CSV row per report; diagnostics are kept as a JSON object string.
#[derive(Serialize)]
struct FlatReport<'a> {
    name: &'a str,
    lhs: f64,
    rhs: f64,
    residual: f64,
    tolerance: f64,
    error_bar: f64,
    verdict: String,
    diagnostics: String,
}

fn report_csv(reports: &[VerificationReport]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(FlatReport {
            name: &r.name,
            lhs: r.lhs,
            rhs: r.rhs,
            residual: r.residual,
            tolerance: r.tolerance,
            error_bar: r.error_bar,
            verdict: r.verdict.to_string(),
            diagnostics: serde_json::to_string(&r.diagnostics)?,
        })?;
    }
    Ok(w.into_inner()?)
}

fn table_csv(t: &Table) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns)?;
    for row in &t.rows {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    Ok(w.into_inner()?)
}

fn table_json(t: &Table) -> serde_json::Value {
    t.rows
        .iter()
        .map(|row| {
            t.columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.clone(), serde_json::json!(v)))
                .collect::<serde_json::Map<_, _>>()
                .into()
        })
        .collect::<Vec<serde_json::Value>>()
        .into()
}

fn annotate(r: &mut VerificationReport, opts: &CheckOptions) {
    let defaults = [
        ("seed", serde_json::json!(opts.seed)),
        ("mc_samples", opts.samples.into()),
        ("radial_nodes", opts.radial_nodes.into()),
        ("angular_resolution", opts.angular_resolution.into()),
        ("box_nodes", opts.box_nodes.into()),
    ];
    for (k, v) in defaults {
        r.diagnostics.entry(k.to_string()).or_insert(v);
    }
}

impl Output {
    /// Record the run settings in every report that did not set them itself.
    pub fn with_settings(mut self, opts: &CheckOptions) -> Self {
        let reports: Vec<&mut VerificationReport> = match &mut self {
            Output::Table(_) => Vec::new(),
            Output::Reports(r) => r.iter_mut().collect(),
            Output::Characterization(c) => c.identities.iter_mut().chain([&mut c.size_condition]).collect(),
            Output::Membrane(b) => b.reports.iter_mut().collect(),
        };
        for r in reports {
            annotate(r, opts);
        }
        self
    }

    fn default_format(&self) -> Format {
        match self {
            Output::Table(_) => Format::Csv,
            _ => Format::Json,
        }
    }

    pub fn render(mut self, format: Option<Format>) -> anyhow::Result<Vec<u8>> {
        let format = format.unwrap_or(self.default_format());
        if let Output::Reports(r) = &mut self {
            sort_reports(r);
        }
        let mut bytes = match (&self, format) {
            (Output::Table(t), Format::Csv) => return table_csv(t),
            (Output::Table(t), Format::Json) => serde_json::to_vec_pretty(&table_json(t))?,
            (Output::Reports(r), Format::Json) if r.len() == 1 => serde_json::to_vec_pretty(&r[0])?,
            (Output::Reports(r), Format::Json) => serde_json::to_vec_pretty(r)?,
            (Output::Reports(r), Format::Csv) => return report_csv(r),
            (Output::Characterization(c), Format::Json) => serde_json::to_vec_pretty(c)?,
            (Output::Characterization(c), Format::Csv) => return report_csv(&c.reports()),
            (Output::Membrane(b), Format::Json) => serde_json::to_vec_pretty(b)?,
            (Output::Membrane(b), Format::Csv) => return report_csv(&b.reports),
        };
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn emit(self, format: Option<Format>, path: Option<&Path>) -> anyhow::Result<()> {
        let bytes = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&bytes)?;
                Ok(out.flush()?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_formats() {
        let t = Table { columns: vec!["t".into(), "value".into()], rows: vec![vec![0.0, 1.0], vec![0.5, 0.25]] };
        let csv = String::from_utf8(Output::Table(t.clone()).render(None).unwrap()).unwrap();
        assert_eq!(csv, "t,value\n0,1\n0.5,0.25\n");
        let json: serde_json::Value = serde_json::from_slice(&Output::Table(t).render(Some(Format::Json)).unwrap()).unwrap();
        assert_eq!(json[1]["value"], 0.25);
    }

    #[test]
    fn reports_sorted_and_flattened() {
        let a = VerificationReport::equality("b", 1.0, 1.0, 1e-8, 0.0).with("seed", 3);
        let b = VerificationReport::equality("a", 2.0, 1.0, 1e-8, 0.0);
        let csv = String::from_utf8(Output::Reports(vec![a.clone(), b.clone()]).render(Some(Format::Csv)).unwrap()).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "name,lhs,rhs,residual,tolerance,error_bar,verdict,diagnostics");
        assert!(lines[1].starts_with("a,2.0,1.0,1.0,"));
        assert!(!lines[2].contains("fail") && lines[2].contains(r#""{""seed"":3}""#));

        let json = Output::Reports(vec![a.clone()]).render(None).unwrap();
        let back: VerificationReport = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, a);
    }
}
