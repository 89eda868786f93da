//! On-disk formats: JSON documents for complexes, metrics and ψ vectors,
//! and the degeneration CSV.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::sig12;
use crate::hexagon::DegenerationRow;
use crate::psi::{Metric, PsiVector};
use crate::triangulation::GluingSpec;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed {kind} document: {source}")]
    Json {
        kind: &'static str,
        source: serde_json::Error,
    },
}

/// `{"lengths": [...]}`, ordered by edge index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    pub lengths: Metric,
}

/// `{"psi": [...]}`, ordered by edge index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiFile {
    pub psi: PsiVector,
}

fn parse<'a, T: Deserialize<'a>>(kind: &'static str, text: &'a str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|source| FormatError::Json { kind, source })
}

pub fn parse_complex(text: &str) -> Result<GluingSpec, FormatError> {
    parse("triangulation", text)
}

pub fn parse_metric(text: &str) -> Result<Metric, FormatError> {
    parse::<MetricFile>("metric", text).map(|f| f.lengths)
}

pub fn parse_psi(text: &str) -> Result<PsiVector, FormatError> {
    parse::<PsiFile>("psi", text).map(|f| f.psi)
}

pub fn complex_json(spec: &GluingSpec) -> String {
    serde_json::to_string(spec).expect("plain data serializes")
}

pub fn metric_json(metric: &Metric) -> String {
    serde_json::to_string(&MetricFile {
        lengths: metric.clone(),
    })
    .expect("plain data serializes")
}

pub fn psi_json(psi: &PsiVector) -> String {
    serde_json::to_string(&PsiFile { psi: psi.clone() }).expect("plain data serializes")
}

pub const DEGENERATION_HEADER: &str = "t,l1,l2,l3,theta1,theta2,theta3,r1,r2,r3";

pub fn degeneration_csv(rows: &[DegenerationRow]) -> String {
    let mut out = String::from(DEGENERATION_HEADER);
    out.push('\n');
    for row in rows {
        let g = &row.geometry;
        let fields: Vec<String> = std::iter::once(row.t)
            .chain(g.l)
            .chain(g.theta)
            .chain(g.r)
            .map(sig12)
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
