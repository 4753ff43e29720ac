//! Dataset loaders, model files and iteration logs.
//!
//! Every writer goes through [`write_atomic`]: the bytes land in a temporary
//! file next to the target, which is then renamed over it.
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::booster::{IterationRecord, TrainedModel};
use crate::error::{Error, Result};
use crate::learner::StumpHypothesis;
use crate::model::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Libsvm,
}

/// Feature rows with labels when the file carries them.
#[derive(Debug, Clone, PartialEq)]
pub struct RawData {
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<f64>>,
}

impl RawData {
    pub fn into_dataset(self) -> Result<Dataset> {
        match self.labels {
            Some(labels) => Dataset::new(self.rows, labels),
            None => Err(Error::Input("the data has no label column".into())),
        }
    }
}

/// Loads a labelled dataset.
pub fn load_dataset(path: &Path, format: DataFormat) -> Result<Dataset> {
    load_raw(path, format)?.into_dataset()
}

/// Loads rows whose labels may be absent (CSV without a `label` column).
pub fn load_raw(path: &Path, format: DataFormat) -> Result<RawData> {
    let text = fs::read_to_string(path)?;
    match format {
        DataFormat::Csv => parse_csv(&text),
        DataFormat::Libsvm => parse_libsvm(&text),
    }
}

fn parse_label(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("label `{}` is not a number", token.trim()),
    })?;
    if v == 1.0 {
        Ok(1.0)
    } else if v == -1.0 || v == 0.0 {
        Ok(-1.0)
    } else {
        Err(Error::Parse {
            line,
            message: format!("label {} is not in {{-1, +1}} or {{0, 1}}", v),
        })
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    match token.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("`{}` is not a finite number", token.trim()),
        }),
    }
}

/// CSV with a header row; a final column named `label` holds the labels.
pub fn parse_csv(text: &str) -> Result<RawData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let width = header.len();
    let labelled = header.get(width - 1) == Some("label");
    let p = if labelled { width - 1 } else { width };
    if p == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "no feature columns".into(),
        });
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", width, record.len()),
            });
        }
        let row = (0..p)
            .map(|k| parse_value(&record[k], line))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        if labelled {
            labels.push(parse_label(&record[p], line)?);
        }
    }
    Ok(RawData {
        rows,
        labels: labelled.then_some(labels),
    })
}

/// `label idx:val ...` lines with 1-based indices; absent entries are zero.
pub fn parse_libsvm(text: &str) -> Result<RawData> {
    let mut sparse = Vec::new();
    let mut labels = Vec::new();
    let mut width = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = parse_label(tokens.next().unwrap_or(""), line)?;
        let mut entries = Vec::new();
        for token in tokens {
            let (idx, val) = token.split_once(':').ok_or_else(|| Error::Parse {
                line,
                message: format!("`{}` is not idx:val", token),
            })?;
            let idx: usize = idx.parse().ok().filter(|&i| i >= 1).ok_or_else(|| Error::Parse {
                line,
                message: format!("`{}` is not a 1-based index", idx),
            })?;
            width = width.max(idx);
            entries.push((idx - 1, parse_value(val, line)?));
        }
        sparse.push(entries);
        labels.push(label);
    }
    let rows = sparse
        .into_iter()
        .map(|entries| {
            let mut row = vec![0.0; width];
            for (i, v) in entries {
                row[i] = v;
            }
            row
        })
        .collect();
    Ok(RawData {
        rows,
        labels: Some(labels),
    })
}

/// CSV with header `f0,…,f{p−1},label`; values use the shortest round-trip form.
pub fn dataset_to_csv(data: &Dataset) -> String {
    let mut out: String = (0..data.num_features())
        .map(|k| format!("f{},", k))
        .collect();
    out.push_str("label\n");
    for i in 0..data.len() {
        for v in data.row(i) {
            out.push_str(&format!("{},", v));
        }
        out.push_str(if data.label(i) > 0.0 { "1\n" } else { "-1\n" });
    }
    out
}

pub fn save_dataset(path: &Path, data: &Dataset) -> Result<()> {
    write_atomic(path, dataset_to_csv(data).as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub soft_margin: f64,
    pub smoothed: f64,
}

/// On-disk form of a stump ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub hypotheses: Vec<StumpHypothesis>,
    pub weights: Vec<f64>,
    pub objectives: Objectives,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_features: Option<usize>,
}

impl From<&TrainedModel<StumpHypothesis>> for ModelFile {
    fn from(m: &TrainedModel<StumpHypothesis>) -> Self {
        Self {
            hypotheses: m.hypotheses.clone(),
            weights: m.weights.clone(),
            objectives: Objectives {
                soft_margin: m.soft_margin,
                smoothed: m.smoothed,
            },
            converged: m.converged,
            num_features: m.num_features,
        }
    }
}

impl From<ModelFile> for TrainedModel<StumpHypothesis> {
    fn from(f: ModelFile) -> Self {
        Self {
            hypotheses: f.hypotheses,
            weights: f.weights,
            soft_margin: f.objectives.soft_margin,
            smoothed: f.objectives.smoothed,
            converged: f.converged,
            num_features: f.num_features,
        }
    }
}

pub fn model_to_json(model: &TrainedModel<StumpHypothesis>) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&ModelFile::from(model))?;
    s.push('\n');
    Ok(s)
}

pub fn save_model(path: &Path, model: &TrainedModel<StumpHypothesis>) -> Result<()> {
    write_atomic(path, model_to_json(model)?.as_bytes())
}

pub fn load_model(path: &Path) -> Result<TrainedModel<StumpHypothesis>> {
    let file: ModelFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    if file.hypotheses.len() != file.weights.len() {
        return Err(Error::Input(format!(
            "{} hypotheses but {} weights",
            file.hypotheses.len(),
            file.weights.len()
        )));
    }
    Ok(file.into())
}

/// One JSON object per line, LF-terminated.
pub fn records_to_jsonl(records: &[IterationRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_log(path: &Path, records: &[IterationRecord]) -> Result<()> {
    write_atomic(path, records_to_jsonl(records)?.as_bytes())
}
