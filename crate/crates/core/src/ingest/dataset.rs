use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::features::FEATURE_NAMES;

use super::RawSpan;

pub const TEXT_HEADER: [&str; 6] = ["doc_id", "seq", "text", "font_size", "bold", "label"];

pub const FEATURE_HEADER: [&str; 15] = [
    "characters",
    "words",
    "text_case",
    "bold",
    "font_flag",
    "verbs",
    "nouns",
    "adjectives",
    "adverbs",
    "pronouns",
    "cardinals",
    "coord_conj",
    "predeterminers",
    "interjections",
    "label",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Text,
    Feature,
}

/// Whether an empty `label` cell is accepted in text-mode files.
///
/// `extract` writes unlabeled rows; training and evaluation need labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPolicy {
    Required,
    Optional,
}

/// A text-mode row: a span plus its label, if known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanRecord {
    pub span: RawSpan,
    pub label: Option<u8>,
}

/// Feature matrix (row-major) with 0/1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    columns: Vec<String>,
    values: Vec<f64>,
    labels: Vec<u8>,
    pub provenance: Option<PathBuf>,
}

impl LabeledDataset {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            values: Vec::new(),
            labels: Vec::new(),
            provenance: None,
        }
    }

    /// Empty dataset over the fourteen canonical feature columns.
    pub fn with_canonical_columns() -> Self {
        Self::new(FEATURE_NAMES.iter().map(|s| s.to_string()).collect())
    }

    pub fn from_rows(columns: Vec<String>, rows: &[Vec<f64>], labels: &[u8]) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let mut ds = Self::new(columns);
        for (row, &label) in rows.iter().zip(labels) {
            ds.push(row, label)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, row: &[f64], label: u8) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Dataset(format!(
                "row has {} values but the dataset has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if label > 1 {
            return Err(Error::Dataset(format!("label {label} is not 0 or 1")));
        }
        self.values.extend_from_slice(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.columns.len();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.columns.len() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Rows at `indices`, in that order (duplicates allowed).
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut out = Self::new(self.columns.clone());
        out.values.reserve(indices.len() * self.n_cols());
        for &i in indices {
            out.values.extend_from_slice(self.row(i));
            out.labels.push(self.labels[i]);
        }
        out.provenance = self.provenance.clone();
        out
    }

    /// Appends all rows of `other`, which must have the same columns.
    pub fn extend(&mut self, other: &LabeledDataset) -> Result<()> {
        if other.columns != self.columns {
            return Err(Error::Dataset("column mismatch".into()));
        }
        self.values.extend_from_slice(&other.values);
        self.labels.extend_from_slice(&other.labels);
        Ok(())
    }
}

/// Either kind of file `load_dataset` can return.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Text(Vec<SpanRecord>),
    Feature(LabeledDataset),
}

/// Reads the header of `path` and reports which schema it follows.
pub fn detect_schema(path: &Path) -> Result<Schema> {
    let mut rdr = reader(path)?;
    let header = read_header(&mut rdr, path)?;
    if header == TEXT_HEADER {
        Ok(Schema::Text)
    } else if header == FEATURE_HEADER {
        Ok(Schema::Feature)
    } else {
        Err(Error::Header {
            path: path.to_path_buf(),
            expected: format!("{} | {}", TEXT_HEADER.join(","), FEATURE_HEADER.join(",")),
            found: header.join(","),
        })
    }
}

/// Loads a labeled file in the given schema. Text-mode labels are required.
pub fn load_dataset(path: &Path, schema: Schema) -> Result<Dataset> {
    match schema {
        Schema::Text => load_text_dataset(path, LabelPolicy::Required).map(Dataset::Text),
        Schema::Feature => load_feature_dataset(path).map(Dataset::Feature),
    }
}

pub fn write_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    match dataset {
        Dataset::Text(records) => write_text_dataset(records, path),
        Dataset::Feature(ds) => write_feature_dataset(ds, path),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file))
}

fn read_header(rdr: &mut csv::Reader<File>, path: &Path) -> Result<Vec<String>> {
    let mut record = csv::StringRecord::new();
    let found = rdr.read_record(&mut record).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    if !found {
        return Err(Error::Header {
            path: path.to_path_buf(),
            expected: "a header row".into(),
            found: String::new(),
        });
    }
    Ok(record.iter().map(|s| s.trim_start_matches('\u{feff}').to_string()).collect())
}

fn check_header(found: &[String], expected: &[&str], path: &Path) -> Result<()> {
    if found.len() != expected.len() || found.iter().zip(expected).any(|(f, e)| f != e) {
        // Name the first expected column that is missing or out of place.
        let missing = expected
            .iter()
            .enumerate()
            .find(|(i, e)| found.get(*i).map(String::as_str) != Some(**e))
            .map(|(_, e)| *e)
            .unwrap_or("");
        return Err(Error::Header {
            path: path.to_path_buf(),
            expected: expected.join(","),
            found: format!("{} (first mismatch at `{missing}`)", found.join(",")),
        });
    }
    Ok(())
}

struct Rows {
    rdr: csv::Reader<File>,
    path: PathBuf,
    width: usize,
    row: usize,
}

impl Rows {
    fn next(&mut self) -> Result<Option<csv::StringRecord>> {
        let mut record = csv::StringRecord::new();
        let found = self.rdr.read_record(&mut record).map_err(|e| Error::Csv {
            path: self.path.clone(),
            source: e,
        })?;
        if !found {
            return Ok(None);
        }
        self.row += 1;
        if record.len() != self.width {
            return Err(Error::Field {
                path: self.path.clone(),
                row: self.row,
                column: "*".into(),
                message: format!("expected {} fields, found {}", self.width, record.len()),
            });
        }
        Ok(Some(record))
    }

    fn field_err(&self, column: &str, message: impl Into<String>) -> Error {
        Error::Field {
            path: self.path.clone(),
            row: self.row,
            column: column.to_string(),
            message: message.into(),
        }
    }

    fn binary(&self, raw: &str, column: &str) -> Result<u8> {
        let v: i64 = raw
            .trim()
            .parse()
            .map_err(|_| self.field_err(column, format!("`{raw}` is not an integer")))?;
        match v {
            0 | 1 => Ok(v as u8),
            _ => Err(self.field_err(column, format!("{v} is not 0 or 1"))),
        }
    }
}

fn open_rows(path: &Path, expected: &[&str]) -> Result<Rows> {
    let mut rdr = reader(path)?;
    let header = read_header(&mut rdr, path)?;
    check_header(&header, expected, path)?;
    Ok(Rows {
        rdr,
        path: path.to_path_buf(),
        width: expected.len(),
        row: 0,
    })
}

/// Loads a text-mode file. Row numbers in errors count data rows from 1.
pub fn load_text_dataset(path: &Path, policy: LabelPolicy) -> Result<Vec<SpanRecord>> {
    let mut rows = open_rows(path, &TEXT_HEADER)?;
    let mut out = Vec::new();
    while let Some(rec) = rows.next()? {
        let seq = rec[1]
            .trim()
            .parse::<usize>()
            .map_err(|_| rows.field_err("seq", format!("`{}` is not a non-negative integer", &rec[1])))?;
        let font_size = rec[3]
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&s| s >= 1)
            .ok_or_else(|| rows.field_err("font_size", format!("`{}` is not a positive integer", &rec[3])))?;
        let bold = rows.binary(&rec[4], "bold")? == 1;
        let label = match (rec[5].trim(), policy) {
            ("", LabelPolicy::Optional) => None,
            ("", LabelPolicy::Required) => return Err(rows.field_err("label", "missing label")),
            (raw, _) => Some(rows.binary(raw, "label")?),
        };
        out.push(SpanRecord {
            span: RawSpan {
                doc_id: rec[0].to_string(),
                seq,
                text: rec[2].to_string(),
                font_size,
                bold,
            },
            label,
        });
    }
    Ok(out)
}

/// Loads a feature-mode file into a dataset over the canonical columns.
pub fn load_feature_dataset(path: &Path) -> Result<LabeledDataset> {
    let mut rows = open_rows(path, &FEATURE_HEADER)?;
    let mut ds = LabeledDataset::with_canonical_columns();
    ds.provenance = Some(path.to_path_buf());
    let n = FEATURE_NAMES.len();
    let mut buf = vec![0.0; n];
    while let Some(rec) = rows.next()? {
        for (j, slot) in buf.iter_mut().enumerate() {
            let raw = rec[j].trim();
            *slot = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| rows.field_err(FEATURE_HEADER[j], format!("`{raw}` is not a number")))?;
        }
        let label = rows.binary(&rec[n], "label")?;
        ds.push(&buf, label)?;
    }
    Ok(ds)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn quote_always(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn quote_if_needed(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.starts_with(' ') || s.ends_with(' ') {
        quote_always(s)
    } else {
        s.to_string()
    }
}

/// Formats a feature value: integral values without a decimal point,
/// anything else in the shortest round-tripping form.
pub(crate) fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub fn write_text_dataset(records: &[SpanRecord], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", TEXT_HEADER.join(",")).map_err(io)?;
    for r in records {
        let label = r.label.map(|l| l.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            quote_if_needed(&r.span.doc_id),
            r.span.seq,
            quote_always(&r.span.text),
            r.span.font_size,
            u8::from(r.span.bold),
            label
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_feature_dataset(ds: &LabeledDataset, path: &Path) -> Result<()> {
    if ds.columns().iter().map(String::as_str).ne(FEATURE_NAMES.iter().copied()) {
        return Err(Error::Dataset(
            "feature-mode files carry exactly the fourteen canonical columns".into(),
        ));
    }
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", FEATURE_HEADER.join(",")).map_err(io)?;
    let mut line = String::new();
    for i in 0..ds.n_rows() {
        line.clear();
        for v in ds.row(i) {
            line.push_str(&format_value(*v));
            line.push(',');
        }
        line.push_str(&ds.label(i).to_string());
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}
