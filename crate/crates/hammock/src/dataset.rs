//! Typed in-memory tables loaded from CSV, with explicit missing cells and
//! optional value-label metadata.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),
    #[error("column '{name}' has {got} cells, expected {expected}")]
    LengthMismatch {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("no such column '{0}'")]
    NoSuchColumn(String),
    #[error("column '{col}': {kind} predicate does not apply to a {col_kind} column")]
    PredicateKindMismatch {
        col: String,
        kind: &'static str,
        col_kind: ColumnKind,
    },
    #[error("label map is not valid JSON: {0}")]
    LabelMapJson(#[from] serde_json::Error),
    #[error("label map names column '{0}' which does not exist")]
    LabelMapUnknownColumn(String),
    #[error("label map key '{key}' for column '{col}' is not an integer code")]
    LabelMapBadCode { col: String, key: String },
    #[error("column '{col}' holds non-integer value {value}; cannot attach value labels")]
    LabelMapNonInteger { col: String, value: f64 },
    #[error("cell value {value} in column '{col}' does not match its {kind} kind")]
    CellKindMismatch {
        col: String,
        value: String,
        kind: ColumnKind,
    },
}

/// One cell of a column. Numbers are always finite: non-finite input
/// (NaN, inf) is stored as `Missing`.
#[derive(Debug, Clone, Copy)]
pub enum CellValue {
    Number(f64),
    Code(i64),
    Missing,
}

impl CellValue {
    pub fn is_missing(&self) -> bool {
        matches!(self, CellValue::Missing)
    }

    /// Numeric view used by correlation: the number itself, or the code
    /// as a float. `None` for missing.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            CellValue::Number(v) => Some(*v),
            CellValue::Code(c) => Some(*c as f64),
            CellValue::Missing => None,
        }
    }

    fn sort_key(&self) -> (u8, i64, u64) {
        match self {
            CellValue::Missing => (0, 0, 0),
            CellValue::Code(c) => (1, *c, 0),
            // Finite floats order correctly under the sign-flipped bit trick.
            CellValue::Number(v) => {
                let bits = v.to_bits() as i64;
                let ord = if bits < 0 { !(bits as u64) } else { (bits as u64) | (1 << 63) };
                (2, 0, ord)
            }
        }
    }
}

// Total equality/order is sound because stored numbers are finite and
// -0.0 is normalized to 0.0 on ingestion.
impl PartialEq for CellValue {
    fn eq(&self, other: &Self) -> bool {
        self.sort_key() == other.sort_key()
    }
}
impl Eq for CellValue {}
impl PartialOrd for CellValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for CellValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}
impl std::hash::Hash for CellValue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.sort_key().hash(state);
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::Number(v) => write!(f, "{v}"),
            CellValue::Code(c) => write!(f, "{c}"),
            CellValue::Missing => write!(f, "."),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnKind::Numeric => write!(f, "numeric"),
            ColumnKind::Categorical => write!(f, "categorical"),
        }
    }
}

/// One variable: a name, an optional display label, and a typed cell vector.
/// Categorical columns carry a code -> label map; codes without a label
/// render as their integer text.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub label: String,
    pub kind: ColumnKind,
    pub cells: Vec<CellValue>,
    pub value_labels: BTreeMap<i64, String>,
}

impl Column {
    pub fn numeric(name: &str, values: Vec<Option<f64>>) -> Column {
        let cells = values
            .into_iter()
            .map(|v| match v {
                Some(x) if x.is_finite() => CellValue::Number(if x == 0.0 { 0.0 } else { x }),
                _ => CellValue::Missing,
            })
            .collect();
        Column {
            name: name.to_string(),
            label: name.to_string(),
            kind: ColumnKind::Numeric,
            cells,
            value_labels: BTreeMap::new(),
        }
    }

    pub fn categorical(name: &str, codes: Vec<Option<i64>>, labels: BTreeMap<i64, String>) -> Column {
        let cells = codes
            .into_iter()
            .map(|c| match c {
                Some(c) => CellValue::Code(c),
                None => CellValue::Missing,
            })
            .collect();
        Column {
            name: name.to_string(),
            label: name.to_string(),
            kind: ColumnKind::Categorical,
            cells,
            value_labels: labels,
        }
    }

    /// Build a categorical column from string tokens, assigning codes in
    /// first-appearance order. Tokens become the value labels.
    pub fn from_tokens(name: &str, tokens: Vec<Option<&str>>) -> Column {
        let mut labels = BTreeMap::new();
        let mut seen: BTreeMap<String, i64> = BTreeMap::new();
        let mut cells = Vec::with_capacity(tokens.len());
        for tok in tokens {
            match tok {
                None => cells.push(CellValue::Missing),
                Some(t) => {
                    let next = seen.len() as i64;
                    let code = *seen.entry(t.to_string()).or_insert(next);
                    if code == next {
                        labels.insert(code, t.to_string());
                    }
                    cells.push(CellValue::Code(code));
                }
            }
        }
        Column {
            name: name.to_string(),
            label: name.to_string(),
            kind: ColumnKind::Categorical,
            cells,
            value_labels: labels,
        }
    }

    pub fn n_missing(&self) -> usize {
        self.cells.iter().filter(|c| c.is_missing()).count()
    }

    /// Display text for a band key on this column.
    pub fn key_label(&self, key: &CellValue) -> String {
        match key {
            CellValue::Code(c) => self
                .value_labels
                .get(c)
                .cloned()
                .unwrap_or_else(|| c.to_string()),
            other => other.to_string(),
        }
    }

    /// Codes observed in the data, ascending.
    pub fn observed_codes(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self
            .cells
            .iter()
            .filter_map(|c| match c {
                CellValue::Code(c) => Some(*c),
                _ => None,
            })
            .collect();
        set.into_iter().collect()
    }

    fn check_cells(&self) -> Result<(), DataError> {
        for cell in &self.cells {
            let ok = match (self.kind, cell) {
                (_, CellValue::Missing) => true,
                (ColumnKind::Numeric, CellValue::Number(_)) => true,
                (ColumnKind::Categorical, CellValue::Code(_)) => true,
                _ => false,
            };
            if !ok {
                return Err(DataError::CellKindMismatch {
                    col: self.name.clone(),
                    value: cell.to_string(),
                    kind: self.kind,
                });
            }
        }
        Ok(())
    }
}

/// An immutable table: uniquely named columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    n_rows: usize,
}

impl Dataset {
    pub fn from_columns(columns: Vec<Column>) -> Result<Dataset, DataError> {
        let n_rows = columns.first().map_or(0, |c| c.cells.len());
        let mut names = BTreeSet::new();
        for col in &columns {
            if !names.insert(col.name.clone()) {
                return Err(DataError::DuplicateColumn(col.name.clone()));
            }
            if col.cells.len() != n_rows {
                return Err(DataError::LengthMismatch {
                    name: col.name.clone(),
                    got: col.cells.len(),
                    expected: n_rows,
                });
            }
            col.check_cells()?;
        }
        Ok(Dataset { columns, n_rows })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&Column, DataError> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| DataError::NoSuchColumn(name.to_string()))
    }
}

/// Missing tokens used when the caller does not supply a set: the empty
/// string and ".".
pub fn default_missing_tokens() -> BTreeSet<String> {
    [String::new(), ".".to_string()].into_iter().collect()
}

fn parse_finite(token: &str) -> Option<f64> {
    let v: f64 = token.trim().parse().ok()?;
    // Tokens that parse to NaN or infinity are treated as missing.
    v.is_finite().then_some(if v == 0.0 { 0.0 } else { v })
}

/// Load a header-bearing CSV file. Each column is typed numeric if every
/// non-missing token parses as a finite number, categorical otherwise;
/// `type_hints` overrides inference per column.
pub fn load_csv(
    path: &Path,
    type_hints: &BTreeMap<String, ColumnKind>,
    missing_tokens: &BTreeSet<String>,
) -> Result<Dataset, DataError> {
    let pstr = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_open_error(&pstr, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv {
            path: pstr.clone(),
            source: e,
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let mut seen = BTreeSet::new();
    for h in &headers {
        if !seen.insert(h.clone()) {
            return Err(DataError::DuplicateColumn(h.clone()));
        }
    }

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for record in reader.records() {
        let record = record.map_err(|e| DataError::Csv {
            path: pstr.clone(),
            source: e,
        })?;
        for (i, field) in record.iter().enumerate() {
            raw[i].push(field.to_string());
        }
    }

    let columns = headers
        .iter()
        .zip(raw)
        .map(|(name, tokens)| build_column(name, &tokens, type_hints.get(name), missing_tokens))
        .collect();
    Dataset::from_columns(columns)
}

fn csv_open_error(path: &str, e: csv::Error) -> DataError {
    if let csv::ErrorKind::Io(_) = e.kind() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => DataError::Io {
                path: path.to_string(),
                source: io,
            },
            _ => unreachable!(),
        }
    } else {
        DataError::Csv {
            path: path.to_string(),
            source: e,
        }
    }
}

fn build_column(
    name: &str,
    tokens: &[String],
    hint: Option<&ColumnKind>,
    missing_tokens: &BTreeSet<String>,
) -> Column {
    let present: Vec<Option<&str>> = tokens
        .iter()
        .map(|t| (!missing_tokens.contains(t)).then_some(t.as_str()))
        .collect();
    let numeric = match hint {
        Some(ColumnKind::Numeric) => true,
        Some(ColumnKind::Categorical) => false,
        None => present
            .iter()
            .flatten()
            .all(|t| t.trim().parse::<f64>().is_ok()),
    };
    if numeric {
        let values = present
            .iter()
            .map(|t| t.and_then(parse_finite))
            .collect();
        Column::numeric(name, values)
    } else {
        Column::from_tokens(name, present)
    }
}

/// Write a dataset back to CSV. Missing cells are written as "."; reloading
/// with the original kinds as hints reproduces the dataset.
pub fn write_csv<W: std::io::Write>(ds: &Dataset, sink: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(ds.columns().iter().map(|c| c.name.as_str()))?;
    for row in 0..ds.n_rows() {
        let fields: Vec<String> = ds
            .columns()
            .iter()
            .map(|c| match &c.cells[row] {
                CellValue::Missing => ".".to_string(),
                CellValue::Number(v) => format!("{v}"),
                CellValue::Code(code) => c.key_label(&CellValue::Code(*code)),
            })
            .collect();
        writer.write_record(&fields)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, serde::Deserialize)]
struct LabelMapEntry {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    values: Option<BTreeMap<String, String>>,
}

/// Attach variable labels and value labels from a JSON map file:
/// `{column: {"label": string, "values": {code: string}}}`.
///
/// A `values` entry on a numeric column converts it to categorical with
/// codes equal to its integer values, mirroring labeled-numeric data.
pub fn apply_label_map(ds: &Dataset, map_path: &Path) -> Result<Dataset, DataError> {
    let text = std::fs::read_to_string(map_path).map_err(|e| DataError::Io {
        path: map_path.display().to_string(),
        source: e,
    })?;
    let map: BTreeMap<String, LabelMapEntry> = serde_json::from_str(&text)?;

    let mut columns = ds.columns().to_vec();
    for (col_name, entry) in map {
        let col = columns
            .iter_mut()
            .find(|c| c.name == col_name)
            .ok_or_else(|| DataError::LabelMapUnknownColumn(col_name.clone()))?;
        if let Some(label) = entry.label {
            col.label = label;
        }
        if let Some(values) = entry.values {
            let mut parsed = BTreeMap::new();
            for (key, text) in values {
                let code: i64 = key.trim().parse().map_err(|_| DataError::LabelMapBadCode {
                    col: col_name.clone(),
                    key: key.clone(),
                })?;
                parsed.insert(code, text);
            }
            if col.kind == ColumnKind::Numeric {
                numeric_to_categorical(col)?;
            }
            // Codes in the map but not in the data are retained.
            col.value_labels.extend(parsed);
        }
    }
    Dataset::from_columns(columns)
}

fn numeric_to_categorical(col: &mut Column) -> Result<(), DataError> {
    let mut cells = Vec::with_capacity(col.cells.len());
    for cell in &col.cells {
        cells.push(match cell {
            CellValue::Missing => CellValue::Missing,
            CellValue::Number(v) if v.fract() == 0.0 && v.abs() < 2f64.powi(53) => {
                CellValue::Code(*v as i64)
            }
            CellValue::Number(v) => {
                return Err(DataError::LabelMapNonInteger {
                    col: col.name.clone(),
                    value: *v,
                })
            }
            CellValue::Code(c) => CellValue::Code(*c),
        });
    }
    col.cells = cells;
    col.kind = ColumnKind::Categorical;
    Ok(())
}

/// A row predicate over a single column. Numeric comparisons apply only to
/// numeric columns and are never satisfied by missing cells.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    EqualsCode(i64),
    EqualsNumber(f64),
    IsMissing,
    GreaterThan(f64),
    LessThan(f64),
    InCodes(Vec<i64>),
}

impl Predicate {
    fn kind_name(&self) -> &'static str {
        match self {
            Predicate::EqualsCode(_) => "equals-code",
            Predicate::EqualsNumber(_) => "equals-number",
            Predicate::IsMissing => "is-missing",
            Predicate::GreaterThan(_) => "greater-than",
            Predicate::LessThan(_) => "less-than",
            Predicate::InCodes(_) => "in-set",
        }
    }

    /// Check the predicate is applicable to a column of the given kind.
    pub fn check_kind(&self, col: &Column) -> Result<(), DataError> {
        let ok = match self {
            Predicate::IsMissing => true,
            Predicate::EqualsCode(_) | Predicate::InCodes(_) => col.kind == ColumnKind::Categorical,
            Predicate::EqualsNumber(_) | Predicate::GreaterThan(_) | Predicate::LessThan(_) => {
                col.kind == ColumnKind::Numeric
            }
        };
        if ok {
            Ok(())
        } else {
            Err(DataError::PredicateKindMismatch {
                col: col.name.clone(),
                kind: self.kind_name(),
                col_kind: col.kind,
            })
        }
    }

    pub fn matches(&self, cell: &CellValue) -> bool {
        match (self, cell) {
            (Predicate::IsMissing, c) => c.is_missing(),
            (Predicate::EqualsCode(want), CellValue::Code(c)) => c == want,
            (Predicate::InCodes(set), CellValue::Code(c)) => set.contains(c),
            (Predicate::EqualsNumber(want), CellValue::Number(v)) => v == want,
            (Predicate::GreaterThan(bound), CellValue::Number(v)) => v > bound,
            (Predicate::LessThan(bound), CellValue::Number(v)) => v < bound,
            _ => false,
        }
    }
}

/// Indices of the rows whose cell in `col_name` satisfies the predicate,
/// ascending.
pub fn select_rows(ds: &Dataset, col_name: &str, pred: &Predicate) -> Result<Vec<usize>, DataError> {
    let col = ds.column(col_name)?;
    pred.check_kind(col)?;
    Ok(col
        .cells
        .iter()
        .enumerate()
        .filter(|(_, cell)| pred.matches(cell))
        .map(|(i, _)| i)
        .collect())
}
