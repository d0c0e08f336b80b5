//! Machine-readable run reports.
//!
//! A report is a stream of line-delimited JSON records: one header echoing
//! the effective parameters and every tolerance in use, the per-case records,
//! and one summary with the max residual and the verdict. The stream is a
//! pure function of config + seed — wall time is reported only on the
//! human-readable side so identical runs produce byte-identical reports.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum ReportRecord {
    Header {
        command: String,
        dimension: usize,
        lambda: Vec<f64>,
        epsilon: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        tolerances: BTreeMap<String, f64>,
    },
    Eigenvalue {
        n: Vec<i64>,
        value: f64,
    },
    Degeneracy {
        value: f64,
        multiplicity: usize,
    },
    Case {
        index: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        detail: Option<String>,
        residual: f64,
    },
    U2Row {
        index: usize,
        label: Vec<i64>,
        re: Vec<f64>,
        im: Vec<f64>,
    },
    HolonomySummary {
        steps: usize,
        box_radius: i64,
        box_margin: i64,
        interior_depth: i64,
        interior_unitarity_defect: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        closed_form_deviation: Option<f64>,
    },
    Summary {
        cases: usize,
        max_residual: f64,
        verdict: String,
    },
}

#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub records: Vec<ReportRecord>,
    pub cases: usize,
    pub max_residual: f64,
    pub pass: bool,
    pub wall_ms: u128,
}

impl Report {
    pub fn builder(command: &str) -> ReportBuilder {
        ReportBuilder {
            command: command.to_string(),
            records: Vec::new(),
            cases: 0,
            max_residual: 0.0,
            pass: true,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "pass"
        } else {
            "fail"
        }
    }

    /// Write the line-delimited record stream.
    pub fn write_records(&self, mut w: impl Write) -> std::io::Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut w, record)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Human-readable summary table (goes to stderr, not the record stream).
    pub fn write_summary(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "command:      {}", self.command)?;
        writeln!(w, "cases:        {}", self.cases)?;
        writeln!(w, "max residual: {:.3e}", self.max_residual)?;
        writeln!(w, "verdict:      {}", self.verdict().to_uppercase())?;
        writeln!(w, "wall time:    {} ms", self.wall_ms)
    }
}

pub struct ReportBuilder {
    command: String,
    records: Vec<ReportRecord>,
    cases: usize,
    max_residual: f64,
    pass: bool,
}

impl ReportBuilder {
    pub fn header(
        mut self,
        dimension: usize,
        lambda: &[f64],
        epsilon: &[f64],
        seed: Option<u64>,
        tolerances: impl IntoIterator<Item = (&'static str, f64)>,
    ) -> Self {
        self.records.push(ReportRecord::Header {
            command: self.command.clone(),
            dimension,
            lambda: lambda.to_vec(),
            epsilon: epsilon.to_vec(),
            seed,
            tolerances: tolerances
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        });
        self
    }

    pub fn push(&mut self, record: ReportRecord) {
        self.records.push(record);
    }

    /// Record one residual against its tolerance.
    pub fn case(&mut self, index: usize, detail: Option<String>, residual: f64, tolerance: f64) {
        self.cases += 1;
        self.max_residual = self.max_residual.max(residual);
        if residual > tolerance {
            self.pass = false;
        }
        self.records.push(ReportRecord::Case {
            index,
            detail,
            residual,
        });
    }

    /// Track a residual without emitting a per-case record.
    pub fn check(&mut self, residual: f64, tolerance: f64) {
        self.max_residual = self.max_residual.max(residual);
        if residual > tolerance {
            self.pass = false;
        }
    }

    pub fn count_case(&mut self) {
        self.cases += 1;
    }

    pub fn finish(mut self, wall_ms: u128) -> Report {
        let verdict = if self.pass { "pass" } else { "fail" };
        self.records.push(ReportRecord::Summary {
            cases: self.cases,
            max_residual: self.max_residual,
            verdict: verdict.to_string(),
        });
        Report {
            command: self.command,
            records: self.records,
            cases: self.cases,
            max_residual: self.max_residual,
            pass: self.pass,
            wall_ms,
        }
    }
}
