use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg;

/// One borrowed sample record: a feature vector and a scalar label.
#[derive(Debug, Clone, Copy)]
pub struct SampleRef<'a> {
    pub x: &'a [f64],
    pub y: f64,
}

/// A row-major sample set with O(1) access by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize, features: Vec<f64>, labels: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dataset dimension must be at least 1"));
        }
        if labels.is_empty() {
            return Err(Error::invalid("dataset must contain at least one sample"));
        }
        if features.len() != dim * labels.len() {
            return Err(Error::DimensionMismatch { expected: dim * labels.len(), got: features.len() });
        }
        linalg::check_finite(&features)?;
        linalg::check_finite(&labels)?;
        Ok(Dataset { dim, features, labels })
    }

    pub fn from_samples<I>(samples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, f64)>,
    {
        let mut dim = None;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (x, y) in samples {
            let d = *dim.get_or_insert(x.len());
            linalg::check_dim(d, x.len())?;
            features.extend_from_slice(&x);
            labels.push(y);
        }
        Dataset::new(dim.unwrap_or(0), features, labels)
    }

    /// Reads one sample per row: feature columns followed by the label. A
    /// first row that does not parse as numbers is treated as a header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(v) => rows.push(v),
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::Io(format!("row {}: {e}", i + 1))),
            }
        }
        let samples = rows.into_iter().map(|mut row| {
            let y = row.pop().unwrap_or(f64::NAN);
            (row, y)
        });
        Dataset::from_samples(samples)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Dataset::from_csv_reader(f)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for i in 0..self.len() {
            let s = self.sample(i);
            let mut row: Vec<String> = s.x.iter().map(|v| format!("{v:e}")).collect();
            row.push(format!("{}", s.y));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample(&self, i: usize) -> SampleRef<'_> {
        self.view().sample(i)
    }

    pub fn view(&self) -> DataView<'_> {
        DataView { dim: self.dim, features: &self.features, labels: &self.labels }
    }

    pub fn max_feature_norm(&self) -> f64 {
        self.view().max_feature_norm()
    }
}

/// A borrowed, contiguous block of a [`Dataset`].
#[derive(Debug, Clone, Copy)]
pub struct DataView<'a> {
    dim: usize,
    features: &'a [f64],
    labels: &'a [f64],
}

impl<'a> DataView<'a> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn sample(&self, i: usize) -> SampleRef<'a> {
        SampleRef { x: &self.features[i * self.dim..(i + 1) * self.dim], y: self.labels[i] }
    }

    /// Samples `start..end` (0-based, end exclusive).
    pub fn range(&self, start: usize, end: usize) -> Result<DataView<'a>> {
        if start > end || end > self.len() {
            return Err(Error::invalid(format!("sample range {start}..{end} out of bounds for {} samples", self.len())));
        }
        Ok(DataView {
            dim: self.dim,
            features: &self.features[start * self.dim..end * self.dim],
            labels: &self.labels[start..end],
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = SampleRef<'a>> + '_ {
        (0..self.len()).map(move |i| self.sample(i))
    }

    pub fn max_feature_norm(&self) -> f64 {
        self.iter().map(|s| linalg::norm(s.x)).fold(0.0, f64::max)
    }
}
