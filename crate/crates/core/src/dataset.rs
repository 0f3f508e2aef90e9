//! Loading numeric tabular data from delimited text, plus the two bundled
//! fixtures.
//!
//! A [`Dataset`] holds `n` observations of `k` finite attributes in source
//! order, with optional per-row identifiers and class tags. Missing or
//! non-finite cells are rejected at load time rather than imputed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

const COUNTRY_CSV: &str = include_str!("../data/country.csv");
const IRIS_CSV: &str = include_str!("../data/iris.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    attribute_names: Vec<String>,
    values: Vec<f64>,
    ids: Option<Vec<String>>,
    classes: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from rows, validating shape and finiteness.
    pub fn new(attribute_names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let k = attribute_names.len();
        let mut values = Vec::with_capacity(rows.len() * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: k,
                    found: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        row: i,
                        column: attribute_names[j].clone(),
                    });
                }
            }
            values.extend(row);
        }
        Ok(Dataset {
            attribute_names,
            values,
            ids: None,
            classes: None,
        })
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        self.check_len(ids.len())?;
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn with_classes(mut self, classes: Vec<String>) -> Result<Self> {
        self.check_len(classes.len())?;
        self.classes = Some(classes);
        Ok(self)
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim().max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of attributes `k`.
    pub fn dim(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.dim();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim())
    }

    /// All values of attribute `j`, in row order.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    pub fn classes(&self) -> Option<&[String]> {
        self.classes.as_deref()
    }

    /// Row identifier, falling back to the 0-based index.
    pub fn row_name(&self, i: usize) -> String {
        match &self.ids {
            Some(ids) => ids[i].clone(),
            None => i.to_string(),
        }
    }

    /// Index of the first row whose identifier equals `id`.
    pub fn find_id(&self, id: &str) -> Option<usize> {
        self.ids.as_ref()?.iter().position(|x| x == id)
    }

    /// Keeps only the given attributes, in the given order.
    pub fn select(&self, columns: &[ColumnRef]) -> Result<Dataset> {
        let idx = columns
            .iter()
            .map(|c| c.resolve(&self.attribute_names))
            .collect::<Result<Vec<_>>>()?;
        let names = idx
            .iter()
            .map(|&j| self.attribute_names[j].clone())
            .collect();
        let rows = self
            .rows()
            .map(|r| idx.iter().map(|&j| r[j]).collect())
            .collect();
        let mut out = Dataset::new(names, rows)?;
        out.ids = self.ids.clone();
        out.classes = self.classes.clone();
        Ok(out)
    }

    /// Applies `f(attribute, value)` to every value.
    pub fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> Result<Dataset> {
        let rows = self
            .rows()
            .map(|r| r.iter().enumerate().map(|(j, &v)| f(j, v)).collect())
            .collect();
        let mut out = Dataset::new(self.attribute_names.clone(), rows)?;
        out.ids = self.ids.clone();
        out.classes = self.classes.clone();
        Ok(out)
    }

    /// Z-scores every attribute (population standard deviation). Constant
    /// attributes are centered only.
    pub fn standardized(&self) -> Result<Dataset> {
        let n = self.len() as f64;
        let stats: Vec<(f64, f64)> = (0..self.dim())
            .map(|j| {
                let col = self.column(j);
                let mean = col.iter().sum::<f64>() / n;
                let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                (mean, var.sqrt())
            })
            .collect();
        self.map_values(|j, v| {
            let (mean, sd) = stats[j];
            if sd > 0.0 {
                (v - mean) / sd
            } else {
                v - mean
            }
        })
    }

    /// Writes the dataset as comma-delimited text with a header row. Values
    /// use the shortest representation that parses back to the same `f64`.
    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(vec![]);
        let mut header = vec![];
        if self.ids.is_some() {
            header.push("id".to_string());
        }
        header.extend(self.attribute_names.iter().cloned());
        if self.classes.is_some() {
            header.push("class".to_string());
        }
        w.write_record(&header).expect("in-memory write");
        for i in 0..self.len() {
            let mut rec = vec![];
            if let Some(ids) = &self.ids {
                rec.push(ids[i].clone());
            }
            rec.extend(self.row(i).iter().map(|v| {
                let mut s = String::new();
                write!(s, "{v:?}").unwrap();
                s
            }));
            if let Some(cls) = &self.classes {
                rec.push(cls[i].clone());
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// A column chosen by header name or by 0-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl ColumnRef {
    fn resolve(&self, header: &[String]) -> Result<usize> {
        match self {
            ColumnRef::Name(name) => header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.clone())),
            ColumnRef::Index(i) if *i < header.len() => Ok(*i),
            ColumnRef::Index(i) => Err(Error::MissingColumn(format!("#{i}"))),
        }
    }
}

impl FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    /// Bare non-negative integers are positions; anything else is a name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.trim().to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    #[default]
    Comma,
    /// Any run of spaces or tabs.
    Whitespace,
    Byte(u8),
}

#[derive(Debug, Clone, Serialize)]
pub struct LoadOptions {
    pub delimiter: Delimiter,
    pub has_header: bool,
    pub id_column: Option<ColumnRef>,
    pub class_column: Option<ColumnRef>,
    /// Empty means every column that is neither id nor class.
    pub attribute_columns: Vec<ColumnRef>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            delimiter: Delimiter::Comma,
            has_header: true,
            id_column: None,
            class_column: None,
            attribute_columns: vec![],
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_delimited(&text, options)
}

pub fn parse_delimited(text: &str, options: &LoadOptions) -> Result<Dataset> {
    let records = split_records(text, options.delimiter)?;
    let mut records = records.into_iter();

    let header: Vec<String> = if options.has_header {
        match records.next() {
            Some(h) => h,
            None => return Err(Error::EmptyDataset),
        }
    } else {
        vec![]
    };
    let body: Vec<Vec<String>> = records
        .filter(|r| !r.iter().all(|f| f.is_empty()))
        .collect();
    let width = if options.has_header {
        header.len()
    } else {
        body.first().map(Vec::len).ok_or(Error::EmptyDataset)?
    };
    let header: Vec<String> = if options.has_header {
        header
    } else {
        (0..width).map(|j| format!("x{}", j + 1)).collect()
    };

    let id_col = options
        .id_column
        .as_ref()
        .map(|c| c.resolve(&header))
        .transpose()?;
    let class_col = options
        .class_column
        .as_ref()
        .map(|c| c.resolve(&header))
        .transpose()?;
    let attr_cols: Vec<usize> = if options.attribute_columns.is_empty() {
        (0..width)
            .filter(|j| Some(*j) != id_col && Some(*j) != class_col)
            .collect()
    } else {
        options
            .attribute_columns
            .iter()
            .map(|c| c.resolve(&header))
            .collect::<Result<_>>()?
    };

    if body.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut rows = Vec::with_capacity(body.len());
    let mut ids = vec![];
    let mut classes = vec![];
    for (i, rec) in body.iter().enumerate() {
        if rec.len() != width {
            return Err(Error::RaggedRow {
                row: i,
                expected: width,
                found: rec.len(),
            });
        }
        let row = attr_cols
            .iter()
            .map(|&j| parse_cell(&rec[j], i, &header[j]))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
        if let Some(j) = id_col {
            ids.push(rec[j].clone());
        }
        if let Some(j) = class_col {
            classes.push(rec[j].clone());
        }
    }

    let names = attr_cols.iter().map(|&j| header[j].clone()).collect();
    let mut ds = Dataset::new(names, rows)?;
    if id_col.is_some() {
        ds = ds.with_ids(ids)?;
    }
    if class_col.is_some() {
        ds = ds.with_classes(classes)?;
    }
    Ok(ds)
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| Error::NonNumeric {
        row,
        column: column.to_string(),
        value: cell.to_string(),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            row,
            column: column.to_string(),
        });
    }
    Ok(v)
}

fn split_records(text: &str, delimiter: Delimiter) -> Result<Vec<Vec<String>>> {
    let byte = match delimiter {
        Delimiter::Whitespace => {
            return Ok(text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| l.split_whitespace().map(str::to_string).collect())
                .collect())
        }
        Delimiter::Comma => b',',
        Delimiter::Byte(b) => b,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(byte)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    rdr.records()
        .map(|r| Ok(r?.iter().map(str::to_string).collect()))
        .collect()
}

/// The bundled datasets.
///
/// `country`: birth and death rates (per 1000) for 70 countries, attributes
/// `birth_rate, death_rate`, row ids are country names.
/// `iris`: Fisher's 150 iris flowers, four measurements plus class tags.
pub fn fixture(name: &str) -> Result<Dataset> {
    match name {
        "country" => parse_delimited(
            COUNTRY_CSV,
            &LoadOptions {
                id_column: Some(ColumnRef::Name("country".into())),
                ..LoadOptions::default()
            },
        ),
        "iris" => parse_delimited(
            IRIS_CSV,
            &LoadOptions {
                id_column: Some(ColumnRef::Name("id".into())),
                class_column: Some(ColumnRef::Name("class".into())),
                ..LoadOptions::default()
            },
        ),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}
