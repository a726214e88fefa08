//! Flat report rows, CSV emission and per-scenario summary records.

use serde::Serialize;

pub const CSV_HEADER: &str = "scenario,analysis,metric,verdict,limit_norm,residual,depth,seed";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub scenario: String,
    pub analysis: String,
    pub metric: String,
    pub verdict: String,
    pub limit_norm: Option<f64>,
    pub residual: Option<f64>,
    pub depth: usize,
    pub seed: u64,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl ReportRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        [
            quote(&self.scenario),
            quote(&self.analysis),
            quote(&self.metric),
            quote(&self.verdict),
            opt(self.limit_norm),
            opt(self.residual),
            self.depth.to_string(),
            self.seed.to_string(),
        ]
        .join(",")
    }
}

/// Header plus one line per row, LF terminated.
pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisError {
    pub analysis: String,
    pub message: String,
}

/// One line of `summary.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub status: &'static str,
    pub rows: usize,
    pub csv: String,
    pub errors: Vec<AnalysisError>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub count: usize,
    pub failed: usize,
    pub scenarios: Vec<ScenarioSummary>,
}

impl RunSummary {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.scenarios {
            out.push_str(&serde_json::to_string(s).expect("summary serializes"));
            out.push('\n');
        }
        out
    }
}
