//! Pipe-separated hourly clinical records, one file per patient.
//!
//! Format: first line is the pipe-separated header, each following line one
//! hour of pipe-separated values, literal `NaN` marking a missing value. A
//! `SepsisLabel` column with 0/1 entries is required.

use thiserror::Error;

pub const SEPSIS_LABEL_COLUMN: &str = "SepsisLabel";

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("record text is empty")]
    EmptyText,
    #[error("missing {SEPSIS_LABEL_COLUMN} column")]
    MissingLabelColumn,
    #[error("line {line}: expected {expected} fields, found {got}")]
    RaggedRow {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: cannot parse numeric token {token:?}")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: {SEPSIS_LABEL_COLUMN} must be 0 or 1, found {token:?}")]
    BadLabel { line: usize, token: String },
    #[error("column {name:?} not found")]
    UnknownColumn { name: String },
}

/// One patient's hourly record.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientRecord {
    pub id: String,
    pub columns: Vec<String>,
    /// Full grid of values (label column included); `None` is missing.
    pub rows: Vec<Vec<Option<f64>>>,
    /// The per-hour sepsis label, extracted from the label column.
    pub labels: Vec<bool>,
}

impl PatientRecord {
    pub fn column_index(&self, name: &str) -> Result<usize, DataError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| DataError::UnknownColumn { name: name.into() })
    }

    pub fn hours(&self) -> usize {
        self.rows.len()
    }

    /// Any hour labeled septic?
    pub fn is_septic(&self) -> bool {
        self.labels.iter().any(|&l| l)
    }

    /// First septic hour, if any.
    pub fn onset_hour(&self) -> Option<usize> {
        self.labels.iter().position(|&l| l)
    }
}

/// A set of patient records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cohort {
    pub patients: Vec<PatientRecord>,
}

impl Cohort {
    pub fn new(patients: Vec<PatientRecord>) -> Self {
        Self { patients }
    }

    pub fn len(&self) -> usize {
        self.patients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patients.is_empty()
    }

    pub fn septic_indices(&self) -> Vec<usize> {
        (0..self.patients.len())
            .filter(|&i| self.patients[i].is_septic())
            .collect()
    }

    pub fn nonseptic_indices(&self) -> Vec<usize> {
        (0..self.patients.len())
            .filter(|&i| !self.patients[i].is_septic())
            .collect()
    }
}

/// Parse one record. The caller supplies the patient id (usually the file
/// stem) afterwards.
pub fn parse_psv(text: &str) -> Result<PatientRecord, DataError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(DataError::EmptyText);
    };
    let columns: Vec<String> = header.split('|').map(|c| c.trim().to_string()).collect();
    let label_col = columns
        .iter()
        .position(|c| c == SEPSIS_LABEL_COLUMN)
        .ok_or(DataError::MissingLabelColumn)?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (line_idx, line) in lines {
        let line_no = line_idx + 1;
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() != columns.len() {
            return Err(DataError::RaggedRow {
                line: line_no,
                expected: columns.len(),
                got: fields.len(),
            });
        }
        let mut row = Vec::with_capacity(fields.len());
        for (col, field) in fields.iter().enumerate() {
            let token = field.trim();
            let value = if token == "NaN" {
                None
            } else {
                let parsed: f64 = token.parse().map_err(|_| DataError::BadNumber {
                    line: line_no,
                    token: token.to_string(),
                })?;
                if !parsed.is_finite() {
                    return Err(DataError::BadNumber {
                        line: line_no,
                        token: token.to_string(),
                    });
                }
                Some(parsed)
            };
            if col == label_col {
                match value {
                    Some(v) if v == 0.0 => labels.push(false),
                    Some(v) if v == 1.0 => labels.push(true),
                    _ => {
                        return Err(DataError::BadLabel {
                            line: line_no,
                            token: token.to_string(),
                        })
                    }
                }
            }
            row.push(value);
        }
        rows.push(row);
    }

    Ok(PatientRecord {
        id: String::new(),
        columns,
        rows,
        labels,
    })
}

/// Serialize back to the pipe-separated format with shortest round-trip
/// decimal representations and the literal `NaN` missing token.
pub fn serialize_psv(record: &PatientRecord) -> String {
    let mut out = String::new();
    out.push_str(&record.columns.join("|"));
    out.push('\n');
    for row in &record.rows {
        let rendered: Vec<String> = row
            .iter()
            .map(|v| match v {
                Some(x) => format!("{x}"),
                None => "NaN".to_string(),
            })
            .collect();
        out.push_str(&rendered.join("|"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_stated_format() {
        let rec = parse_psv("HR|O2Sat|SepsisLabel\n80|97|0\n").unwrap();
        assert_eq!(rec.columns, vec!["HR", "O2Sat", "SepsisLabel"]);
        assert_eq!(rec.rows, vec![vec![Some(80.0), Some(97.0), Some(0.0)]]);
        assert_eq!(rec.labels, vec![false]);
        assert!(!rec.is_septic());
    }

    #[test]
    fn nan_token_is_missing() {
        let rec = parse_psv("HR|O2Sat|SepsisLabel\nNaN|97|0\n").unwrap();
        assert_eq!(rec.rows[0][0], None);
        assert_eq!(rec.rows[0][1], Some(97.0));
    }

    #[test]
    fn ragged_rows_are_rejected_with_line_number() {
        let err = parse_psv("HR|O2Sat|SepsisLabel\n80|0\n").unwrap_err();
        assert_eq!(
            err,
            DataError::RaggedRow {
                line: 2,
                expected: 3,
                got: 2
            }
        );
    }

    #[test]
    fn missing_label_column_is_rejected() {
        assert_eq!(
            parse_psv("HR|O2Sat\n80|97\n").unwrap_err(),
            DataError::MissingLabelColumn
        );
    }

    #[test]
    fn unparseable_tokens_and_bad_labels_are_rejected() {
        assert_eq!(
            parse_psv("HR|SepsisLabel\nabc|0\n").unwrap_err(),
            DataError::BadNumber {
                line: 2,
                token: "abc".into()
            }
        );
        assert_eq!(
            parse_psv("HR|SepsisLabel\n80|0.5\n").unwrap_err(),
            DataError::BadLabel {
                line: 2,
                token: "0.5".into()
            }
        );
        assert_eq!(
            parse_psv("HR|SepsisLabel\n80|NaN\n").unwrap_err(),
            DataError::BadLabel {
                line: 2,
                token: "NaN".into()
            }
        );
    }

    #[test]
    fn onset_and_septic_flags() {
        let rec = parse_psv("HR|SepsisLabel\n80|0\n81|0\n82|1\n83|1\n").unwrap();
        assert!(rec.is_septic());
        assert_eq!(rec.onset_hour(), Some(2));
    }

    #[test]
    fn round_trip_is_identity_on_records() {
        let text = "HR|O2Sat|Temp|SepsisLabel\n80|97|36.6|0\nNaN|96.5|NaN|0\n75|NaN|37.1|1\n";
        let rec = parse_psv(text).unwrap();
        let serialized = serialize_psv(&rec);
        let reparsed = parse_psv(&serialized).unwrap();
        assert_eq!(rec, reparsed);
    }

    #[test]
    fn empty_text_is_rejected() {
        assert_eq!(parse_psv("").unwrap_err(), DataError::EmptyText);
    }
}
