//! Evaluation corpus: record file parsing, the batch evaluation driver,
//! and the corpus-size figure.
//!
//! A corpus file holds blank-line-separated records of `key: value`
//! fields (`id`, `lang`, `context`, `source`, `reference`); a line that
//! starts with neither a key nor `#` continues the previous field. Every
//! record pins its language and context explicitly so evaluation runs are
//! reproducible even when automatic identification would tie.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::bundle::ResourceBundle;
use crate::metrics::{corpus_size, evaluate_pair, EvalReport, MetricError};
use crate::pipeline::{translate, PipelineError, TranslateOptions};
use crate::text::{tokenize, LanguageTag};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("cannot read corpus file {path}: {reason}")]
    FileUnreadable { path: String, reason: String },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
}

/// One source text with its reference translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRecord {
    pub id: String,
    pub language: LanguageTag,
    pub context: String,
    pub source: String,
    pub reference: String,
}

const FIELDS: [&str; 5] = ["id", "lang", "context", "source", "reference"];

/// Load and validate a corpus file.
pub fn load_corpus(path: &Path) -> Result<Vec<CorpusRecord>, CorpusError> {
    let display = path.display().to_string();
    let body = fs::read_to_string(path).map_err(|e| CorpusError::FileUnreadable {
        path: display.clone(),
        reason: e.to_string(),
    })?;
    let mut records = Vec::new();
    let mut fields: Vec<(String, String, usize)> = Vec::new();
    let mut record_line = 0;

    let flush = |fields: &mut Vec<(String, String, usize)>,
                 records: &mut Vec<CorpusRecord>,
                 line: usize|
     -> Result<(), CorpusError> {
        if fields.is_empty() {
            return Ok(());
        }
        let take = |name: &str| -> Result<String, CorpusError> {
            fields
                .iter()
                .find(|(key, _, _)| key == name)
                .map(|(_, value, _)| value.clone())
                .filter(|v| !v.is_empty())
                .ok_or_else(|| CorpusError::Format {
                    path: display.clone(),
                    line,
                    message: format!("record is missing the '{name}' field"),
                })
        };
        let id = take("id")?;
        let lang = take("lang")?;
        let language = LanguageTag::from_code(&lang).ok_or_else(|| CorpusError::Format {
            path: display.clone(),
            line,
            message: format!("record '{id}': unknown language code '{lang}'"),
        })?;
        let record = CorpusRecord {
            id,
            language,
            context: take("context")?,
            source: take("source")?,
            reference: take("reference")?,
        };
        if records.iter().any(|r: &CorpusRecord| r.id == record.id) {
            return Err(CorpusError::Format {
                path: display.clone(),
                line,
                message: format!("duplicate record id '{}'", record.id),
            });
        }
        fields.clear();
        records.push(record);
        Ok(())
    };

    for (idx, raw) in body.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            flush(&mut fields, &mut records, record_line)?;
            continue;
        }
        let parsed = trimmed
            .split_once(':')
            .map(|(key, value)| (key.trim(), value.trim()))
            .filter(|(key, _)| FIELDS.contains(key));
        match parsed {
            Some((key, value)) => {
                if fields.is_empty() {
                    record_line = line;
                }
                if fields.iter().any(|(k, _, _)| k == key) {
                    return Err(CorpusError::Format {
                        path: display.clone(),
                        line,
                        message: format!("field '{key}' repeated within one record"),
                    });
                }
                fields.push((key.to_string(), value.to_string(), line));
            }
            None => {
                // Continuation of the previous field.
                match fields.last_mut() {
                    Some((_, value, _)) => {
                        if !value.is_empty() {
                            value.push(' ');
                        }
                        value.push_str(trimmed);
                    }
                    None => {
                        return Err(CorpusError::Format {
                            path: display.clone(),
                            line,
                            message: "text before the first field of a record".to_string(),
                        });
                    }
                }
            }
        }
    }
    flush(&mut fields, &mut records, record_line)?;
    if records.is_empty() {
        log::warn!("corpus {display} has no records");
    }
    Ok(records)
}

/// Why one record could not be scored.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecordFailure {
    #[error("translation failed: {0}")]
    Translation(#[from] PipelineError),
    #[error("scoring failed: {0}")]
    Metric(#[from] MetricError),
}

/// Scores (or the failure) of one record.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordEvaluation {
    pub id: String,
    pub output: Option<String>,
    pub result: Result<EvalReport<Real>, RecordFailure>,
}

/// A whole corpus run: per-record rows plus the arithmetic mean over the
/// rows that scored.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEvaluation {
    pub records: Vec<RecordEvaluation>,
    pub averages: Option<EvalReport<Real>>,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Translate every record with its pinned language and context, score the
/// output against the reference, and average the scores. Failed records
/// are reported and excluded from the averages.
pub fn evaluate_corpus(records: &[CorpusRecord], bundle: &ResourceBundle) -> CorpusEvaluation {
    let mut rows = Vec::new();
    let mut sums = EvalReport {
        cosine: 0.0,
        angle_degrees: 0.0,
        precision: 0.0,
        recall: 0.0,
        f_measure: 0.0,
    };
    let mut evaluated = 0usize;
    for record in records {
        let options = TranslateOptions {
            language: Some(record.language),
            context: Some(record.context.clone()),
        };
        let row = match translate(&record.source, bundle, &options) {
            Ok(result) => {
                match evaluate_pair::<Real>(&result.output, &record.reference) {
                    Ok(report) => {
                        sums.cosine += report.cosine;
                        sums.angle_degrees += report.angle_degrees;
                        sums.precision += report.precision;
                        sums.recall += report.recall;
                        sums.f_measure += report.f_measure;
                        evaluated += 1;
                        RecordEvaluation {
                            id: record.id.clone(),
                            output: Some(result.output),
                            result: Ok(report),
                        }
                    }
                    Err(e) => RecordEvaluation {
                        id: record.id.clone(),
                        output: Some(result.output),
                        result: Err(e.into()),
                    },
                }
            }
            Err(failure) => RecordEvaluation {
                id: record.id.clone(),
                output: None,
                result: Err(failure.error.into()),
            },
        };
        rows.push(row);
    }
    let averages = if evaluated > 0 {
        let n = evaluated as Real;
        Some(EvalReport {
            cosine: sums.cosine / n,
            angle_degrees: sums.angle_degrees / n,
            precision: sums.precision / n,
            recall: sums.recall / n,
            f_measure: sums.f_measure / n,
        })
    } else {
        None
    };
    CorpusEvaluation {
        skipped: rows.len() - evaluated,
        records: rows,
        averages,
        evaluated,
    }
}

/// How record lengths are measured for the corpus-size figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthUnit {
    #[default]
    Tokens,
    Chars,
}

/// Length of one record's source text in the given unit.
pub fn record_length(record: &CorpusRecord, unit: LengthUnit) -> usize {
    match unit {
        LengthUnit::Tokens => tokenize(&record.source).len(),
        LengthUnit::Chars => record.source.chars().filter(|c| !c.is_whitespace()).count(),
    }
}

/// Corpus size: the Euclidean norm over the records' source lengths.
pub fn measure_corpus(records: &[CorpusRecord], unit: LengthUnit) -> Real {
    corpus_size(records.iter().map(|r| record_length(r, unit)))
}

fn score_cells(report: &EvalReport<Real>) -> [String; 5] {
    [
        format!("{:.6}", report.cosine),
        format!("{:.6}", report.angle_degrees),
        format!("{:.6}", report.precision),
        format!("{:.6}", report.recall),
        format!("{:.6}", report.f_measure),
    ]
}

const HEADER: [&str; 6] = ["id", "cosine", "angle", "precision", "recall", "f-measure"];

/// Fixed-width table with one row per record and an `average` footer.
pub fn render_table(eval: &CorpusEvaluation) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    rows.push(HEADER.iter().map(|s| s.to_string()).collect());
    for record in &eval.records {
        match &record.result {
            Ok(report) => {
                let mut row = vec![record.id.clone()];
                row.extend(score_cells(report));
                rows.push(row);
            }
            Err(failure) => {
                rows.push(vec![record.id.clone(), format!("(skipped: {failure})")]);
            }
        }
    }
    if let Some(avg) = &eval.averages {
        let mut row = vec!["average".to_string()];
        row.extend(score_cells(avg));
        rows.push(row);
    }
    let mut widths = vec![0usize; HEADER.len()];
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(cell.chars().count());
            }
        }
    }
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{:<width$}", cell, width = widths.get(i).copied().unwrap_or(0));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    if eval.skipped > 0 {
        let _ = writeln!(
            out,
            "({} of {} records skipped)",
            eval.skipped,
            eval.records.len()
        );
    }
    out
}

/// Tab-separated rows with the same columns as the table.
pub fn render_tsv(eval: &CorpusEvaluation) -> String {
    let mut out = String::new();
    out.push_str(&HEADER.join("\t"));
    out.push('\n');
    for record in &eval.records {
        match &record.result {
            Ok(report) => {
                let _ = writeln!(out, "{}\t{}", record.id, score_cells(report).join("\t"));
            }
            Err(failure) => {
                let _ = writeln!(out, "{}\tskipped: {}", record.id, failure);
            }
        }
    }
    if let Some(avg) = &eval.averages {
        let _ = writeln!(out, "average\t{}", score_cells(avg).join("\t"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_corpus(name: &str, body: &str) -> std::path::PathBuf {
        let file = std::env::temp_dir().join(format!("{}-{name}", std::process::id()));
        std::fs::write(&file, body).unwrap();
        file
    }

    #[test]
    fn records_parse_with_continuations() {
        let file = write_corpus(
            "corpus-ok.txt",
            "# header comment\nid: A1\nlang: en\ncontext: Cinema\nsource: The point\n where images\nreference: النقطة\n\nid: B1\nlang: ar\ncontext: Shibam\nsource: شبام\nreference: Shibam\n",
        );
        let records = load_corpus(&file).unwrap();
        std::fs::remove_file(&file).ok();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].source, "The point where images");
        assert_eq!(records[0].language, LanguageTag::English);
        assert_eq!(records[1].context, "Shibam");
    }

    #[test]
    fn missing_fields_are_rejected() {
        let file = write_corpus("corpus-missing.txt", "id: A1\nlang: en\nsource: x\n");
        let err = load_corpus(&file).unwrap_err();
        std::fs::remove_file(&file).ok();
        match err {
            CorpusError::Format { message, .. } => assert!(message.contains("context")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let body = "id: A1\nlang: en\ncontext: C\nsource: x\nreference: y\n\nid: A1\nlang: en\ncontext: C\nsource: x\nreference: y\n";
        let file = write_corpus("corpus-dup.txt", body);
        let err = load_corpus(&file).unwrap_err();
        std::fs::remove_file(&file).ok();
        assert!(matches!(err, CorpusError::Format { .. }));
    }

    #[test]
    fn corpus_size_follows_the_unit() {
        let record = |id: &str, source: &str| CorpusRecord {
            id: id.to_string(),
            language: LanguageTag::English,
            context: "C".to_string(),
            source: source.to_string(),
            reference: "r".to_string(),
        };
        let records = vec![record("A", "one"), record("B", "two words")];
        // Token lengths 1 and 2: sqrt(5).
        assert!((measure_corpus(&records, LengthUnit::Tokens) - 5f64.sqrt()).abs() < 1e-9);
        // Character lengths 3 and 8: sqrt(73).
        assert!((measure_corpus(&records, LengthUnit::Chars) - 73f64.sqrt()).abs() < 1e-9);
    }
}
