//! Data model and ingestion: CSV/Parquet tables, attribute lists and column
//! selection.

use std::collections::HashSet;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parquet::data_type::{ByteArray, ByteArrayType, DoubleType};
use parquet::file::properties::WriterProperties;
use parquet::file::reader::{FileReader, SerializedFileReader};
use parquet::file::writer::SerializedFileWriter;
use parquet::record::Field;
use parquet::basic::{ConvertedType, Repetition, Type as PhysicalType};
use parquet::schema::types::Type;

use crate::error::{Error, Result};

const PARQUET_MAGIC: &[u8; 4] = b"PAR1";

/// One named attribute column of uniformly sampled, finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    samples: Vec<f64>,
    sample_rate_hz: Option<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, samples: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonNumericColumn(name));
        }
        Ok(Self {
            name,
            samples,
            sample_rate_hz: None,
        })
    }

    pub fn with_sample_rate(mut self, hz: f64) -> Result<Self> {
        if !(hz.is_finite() && hz > 0.0) {
            return Err(Error::InvalidParameter(format!("sample rate {hz}")));
        }
        self.sample_rate_hz = Some(hz);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> Option<f64> {
        self.sample_rate_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Parquet,
}

/// Raw cell contents of one column. Empty numeric cells load as NaN.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Numeric(Vec<f64>),
    /// At least one cell did not parse as a number; unusable for analysis.
    Text(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: ColumnValues,
}

impl Column {
    pub fn is_numeric(&self) -> bool {
        matches!(self.values, ColumnValues::Numeric(_))
    }

    pub fn len(&self) -> usize {
        match &self.values {
            ColumnValues::Numeric(v) => v.len(),
            ColumnValues::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub source_path: PathBuf,
    pub format: Format,
    columns: Vec<Column>,
}

impl Dataset {
    /// Builds a dataset, enforcing unique names and equal column lengths.
    pub fn new(source_path: impl Into<PathBuf>, format: Format, columns: Vec<Column>) -> Result<Self> {
        let source_path = source_path.into();
        if columns.is_empty() || columns[0].is_empty() {
            return Err(Error::EmptyDataset);
        }
        let rows = columns[0].len();
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(unreadable(&source_path, format!("duplicate column {:?}", c.name)));
            }
            if c.len() != rows {
                return Err(unreadable(&source_path, "columns differ in length"));
            }
        }
        Ok(Self {
            source_path,
            format,
            columns,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn rows(&self) -> usize {
        self.columns[0].len()
    }

    /// File stem used to label results.
    pub fn label(&self) -> String {
        self.source_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.source_path.display().to_string())
    }
}

fn unreadable(path: &Path, reason: impl ToString) -> Error {
    Error::UnreadableFile {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Load a CSV or Parquet table. The format comes from the extension when it
/// is `.csv` or `.parquet`/`.pq`, otherwise from the content: the Parquet
/// magic `PAR1`, else UTF-8 text is read as CSV.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| unreadable(path, e))?;
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase());
    let format = match ext.as_deref() {
        Some("csv") => Format::Csv,
        Some("parquet") | Some("pq") => Format::Parquet,
        _ if bytes.starts_with(PARQUET_MAGIC) => Format::Parquet,
        _ if std::str::from_utf8(&bytes).is_ok() => Format::Csv,
        _ => return Err(Error::UnknownFormat(path.to_path_buf())),
    };
    let columns = match format {
        Format::Csv => parse_csv(path, &bytes)?,
        Format::Parquet => parse_parquet(path)?,
    };
    Dataset::new(path, format, columns)
}

enum Builder {
    Numeric(Vec<f64>),
    Text(Vec<String>),
}

impl Builder {
    fn push(&mut self, cell: &str) {
        match self {
            Builder::Numeric(nums) => {
                let t = cell.trim();
                let parsed = if t.is_empty() { Some(f64::NAN) } else { t.parse::<f64>().ok() };
                match parsed {
                    Some(v) => nums.push(v),
                    None => {
                        let mut raw: Vec<String> = nums.iter().map(|v| format_cell(*v)).collect();
                        raw.push(cell.to_string());
                        *self = Builder::Text(raw);
                    }
                }
            }
            Builder::Text(raw) => raw.push(cell.to_string()),
        }
    }

    fn finish(self) -> ColumnValues {
        match self {
            Builder::Numeric(nums) => ColumnValues::Numeric(nums),
            Builder::Text(raw) => ColumnValues::Text(raw),
        }
    }
}

fn format_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:?}")
    }
}

// Comma-delimited, header row, '.' decimal point. Ragged rows are an error.
fn parse_csv(path: &Path, bytes: &[u8]) -> Result<Vec<Column>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| unreadable(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::EmptyDataset);
    }
    let mut builders: Vec<Builder> = headers
        .iter()
        .map(|_| Builder::Numeric(Vec::new()))
        .collect();
    for record in rdr.records() {
        let record = record.map_err(|e| unreadable(path, e))?;
        for (b, cell) in builders.iter_mut().zip(record.iter()) {
            b.push(cell);
        }
    }
    Ok(headers
        .into_iter()
        .zip(builders)
        .map(|(name, b)| Column {
            name,
            values: b.finish(),
        })
        .collect())
}

fn field_number(f: &Field) -> Option<f64> {
    Some(match f {
        Field::Null => f64::NAN,
        Field::Byte(v) => *v as f64,
        Field::Short(v) => *v as f64,
        Field::Int(v) => *v as f64,
        Field::Long(v) => *v as f64,
        Field::UByte(v) => *v as f64,
        Field::UShort(v) => *v as f64,
        Field::UInt(v) => *v as f64,
        Field::ULong(v) => *v as f64,
        Field::Float16(v) => f64::from(*v),
        Field::Float(v) => *v as f64,
        Field::Double(v) => *v,
        _ => return None,
    })
}

fn parse_parquet(path: &Path) -> Result<Vec<Column>> {
    let file = File::open(path).map_err(|e| unreadable(path, e))?;
    let reader = SerializedFileReader::new(file).map_err(|e| unreadable(path, e))?;
    let schema = reader.metadata().file_metadata().schema_descr_ptr();
    let names: Vec<String> = schema
        .root_schema()
        .get_fields()
        .iter()
        .map(|f| f.name().to_string())
        .collect();
    let mut builders: Vec<Builder> = names
        .iter()
        .map(|_| Builder::Numeric(Vec::new()))
        .collect();
    let rows = reader.get_row_iter(None).map_err(|e| unreadable(path, e))?;
    for row in rows {
        let row = row.map_err(|e| unreadable(path, e))?;
        for (b, (_, field)) in builders.iter_mut().zip(row.get_column_iter()) {
            match (field_number(field), &mut *b) {
                (Some(v), Builder::Numeric(nums)) => nums.push(v),
                (_, b) => b.push(&field_text(field)),
            }
        }
    }
    Ok(names
        .into_iter()
        .zip(builders)
        .map(|(name, b)| Column {
            name,
            values: b.finish(),
        })
        .collect())
}

fn field_text(field: &Field) -> String {
    match field {
        Field::Str(s) => s.clone(),
        Field::Null => String::new(),
        other => other.to_string(),
    }
}

/// Write the dataset as CSV. Numbers use the shortest representation that
/// parses back to the identical `f64`; NaN becomes an empty cell.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| unreadable(path, e))?;
    let cols = dataset.columns();
    w.write_record(cols.iter().map(|c| c.name.as_str()))
        .map_err(|e| unreadable(path, e))?;
    for r in 0..dataset.rows() {
        let row: Vec<String> = cols
            .iter()
            .map(|c| match &c.values {
                ColumnValues::Numeric(v) => format_cell(v[r]),
                ColumnValues::Text(v) => v[r].clone(),
            })
            .collect();
        w.write_record(&row).map_err(|e| unreadable(path, e))?;
    }
    w.flush().map_err(|e| unreadable(path, e))
}

/// Write the dataset as a single-row-group Parquet file: numeric columns as
/// optional DOUBLE (NaN stored as null), text columns as optional UTF8.
pub fn write_parquet(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let err = |e: parquet::errors::ParquetError| unreadable(path, e);
    let fields = dataset
        .columns()
        .iter()
        .map(|c| {
            let builder = match c.values {
                ColumnValues::Numeric(_) => Type::primitive_type_builder(&c.name, PhysicalType::DOUBLE),
                ColumnValues::Text(_) => Type::primitive_type_builder(&c.name, PhysicalType::BYTE_ARRAY)
                    .with_converted_type(ConvertedType::UTF8),
            };
            builder.with_repetition(Repetition::OPTIONAL).build().map(Arc::new)
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(err)?;
    let schema = Arc::new(Type::group_type_builder("dataset").with_fields(fields).build().map_err(err)?);
    let file = File::create(path).map_err(|e| unreadable(path, e))?;
    let mut writer = SerializedFileWriter::new(file, schema, Arc::new(WriterProperties::builder().build())).map_err(err)?;
    let mut group = writer.next_row_group().map_err(err)?;
    let mut cols = dataset.columns().iter();
    while let Some(mut cw) = group.next_column().map_err(err)? {
        let col = cols.next().expect("schema matches columns");
        match &col.values {
            ColumnValues::Numeric(v) => {
                let defs: Vec<i16> = v.iter().map(|x| i16::from(!x.is_nan())).collect();
                let present: Vec<f64> = v.iter().copied().filter(|x| !x.is_nan()).collect();
                cw.typed::<DoubleType>().write_batch(&present, Some(&defs), None).map_err(err)?;
            }
            ColumnValues::Text(v) => {
                let vals: Vec<ByteArray> = v.iter().map(|s| ByteArray::from(s.as_str())).collect();
                let defs = vec![1i16; v.len()];
                cw.typed::<ByteArrayType>().write_batch(&vals, Some(&defs), None).map_err(err)?;
            }
        }
        cw.close().map_err(err)?;
    }
    group.close().map_err(err)?;
    writer.close().map_err(err)?;
    Ok(())
}

/// Ordered, duplicate-free list of attribute (column) names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeList(Vec<String>);

impl AttributeList {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyAttributeList);
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateAttribute(n.clone()));
            }
        }
        Ok(Self(names))
    }

    /// One name per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let names = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect();
        Self::new(names)
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn read_attribute_list(path: impl AsRef<Path>) -> Result<AttributeList> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| unreadable(path, e))?;
    AttributeList::parse(&text)
}

/// How non-finite cells are treated when a column is validated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NanPolicy {
    /// Any non-finite cell makes the column unusable.
    #[default]
    Reject,
    /// Trim a contiguous non-finite prefix and suffix; interior gaps still reject.
    TrimEdges,
}

/// Validate one column into a finite series.
pub fn column_series(dataset: &Dataset, name: &str, policy: NanPolicy) -> Result<TimeSeries> {
    let col = dataset
        .column(name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    let ColumnValues::Numeric(values) = &col.values else {
        return Err(Error::NonNumericColumn(name.to_string()));
    };
    let slice = match policy {
        NanPolicy::Reject => &values[..],
        NanPolicy::TrimEdges => {
            let start = values.iter().position(|v| v.is_finite()).unwrap_or(values.len());
            let end = values.iter().rposition(|v| v.is_finite()).map_or(start, |e| e + 1);
            &values[start..end]
        }
    };
    TimeSeries::new(name, slice.to_vec())
}

/// Project the requested attributes in list order. Each entry is validated
/// independently so one bad column does not hide the others.
pub fn select_columns(dataset: &Dataset, attrs: &AttributeList, policy: NanPolicy) -> Vec<Result<TimeSeries>> {
    attrs
        .names()
        .iter()
        .map(|n| column_series(dataset, n, policy))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attribute_list_format() {
        let a = AttributeList::parse("kneeX\n# comment\nkneeY\n").unwrap();
        assert_eq!(a.names(), ["kneeX", "kneeY"]);
        let a = AttributeList::parse("  hip \n\n\tankle\t\n").unwrap();
        assert_eq!(a.names(), ["hip", "ankle"]);
    }

    #[test]
    fn attribute_list_errors() {
        assert_eq!(AttributeList::parse("# only\n#comments\n"), Err(Error::EmptyAttributeList));
        assert_eq!(AttributeList::parse("a\na\n"), Err(Error::DuplicateAttribute("a".into())));
    }

    fn ds(cols: Vec<(&str, ColumnValues)>) -> Dataset {
        Dataset::new(
            "mem.csv",
            Format::Csv,
            cols.into_iter()
                .map(|(n, values)| Column { name: n.into(), values })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn nan_policy() {
        let d = ds(vec![
            ("edge", ColumnValues::Numeric(vec![f64::NAN, 1.0, 2.0, f64::NAN])),
            ("gap", ColumnValues::Numeric(vec![1.0, f64::NAN, 2.0, 3.0])),
        ]);
        assert!(matches!(column_series(&d, "edge", NanPolicy::Reject), Err(Error::NonNumericColumn(_))));
        assert_eq!(column_series(&d, "edge", NanPolicy::TrimEdges).unwrap().samples(), [1.0, 2.0]);
        assert!(matches!(column_series(&d, "gap", NanPolicy::TrimEdges), Err(Error::NonNumericColumn(_))));
    }

    #[test]
    fn all_nan_column_is_unusable_even_when_trimming() {
        let d = ds(vec![("x", ColumnValues::Numeric(vec![f64::NAN; 3]))]);
        assert!(matches!(column_series(&d, "x", NanPolicy::TrimEdges), Err(Error::NonNumericColumn(_))));
    }

    #[test]
    fn dataset_rejects_ragged_and_duplicate_columns() {
        let r = Dataset::new(
            "x.csv",
            Format::Csv,
            vec![
                Column { name: "a".into(), values: ColumnValues::Numeric(vec![1.0]) },
                Column { name: "a".into(), values: ColumnValues::Numeric(vec![1.0]) },
            ],
        );
        assert!(matches!(r, Err(Error::UnreadableFile { .. })));
        let r = Dataset::new(
            "x.csv",
            Format::Csv,
            vec![
                Column { name: "a".into(), values: ColumnValues::Numeric(vec![1.0]) },
                Column { name: "b".into(), values: ColumnValues::Numeric(vec![1.0, 2.0]) },
            ],
        );
        assert!(matches!(r, Err(Error::UnreadableFile { .. })));
    }
}
