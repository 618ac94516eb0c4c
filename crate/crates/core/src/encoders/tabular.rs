//! Numeric tables with a trailing class-name column (IRIS and friends).

use std::path::Path;

use crate::error::{Error, Result};

const IRIS_CSV: &str = include_str!("../../data/iris.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Class names in order of first appearance; `labels` index into this.
    pub class_names: Vec<String>,
}

impl TabularDataset {
    /// Parses `f1,...,fn,class` rows. A first row whose leading field is not
    /// numeric is treated as a header.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut ds = TabularDataset {
            features: Vec::new(),
            labels: Vec::new(),
            class_names: Vec::new(),
        };
        let mut width = None;
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(i as u64 + 1, |p| p.line());
            let err = |msg: String| Error::Parse {
                path: origin.to_path_buf(),
                line,
                msg,
            };
            if record.iter().all(|f| f.trim().is_empty()) {
                continue;
            }
            if record.len() < 2 {
                return Err(err("expected numeric columns followed by a class".into()));
            }
            let n = record.len() - 1;
            if i == 0 && record[0].trim().parse::<f64>().is_err() {
                continue;
            }
            if *width.get_or_insert(n) != n {
                return Err(err(format!("expected {} feature columns, found {n}", width.unwrap())));
            }
            let row = (0..n)
                .map(|j| {
                    record[j]
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| err(format!("column {}: {e}", j + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            let name = record[n].trim();
            let class = match ds.class_names.iter().position(|c| c == name) {
                Some(c) => c,
                None => {
                    ds.class_names.push(name.to_string());
                    ds.class_names.len() - 1
                }
            };
            ds.features.push(row);
            ds.labels.push(class);
        }
        Ok(ds)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&std::fs::read_to_string(path)?, path)
    }

    /// Fisher's IRIS data (150 rows, 4 features, 3 classes).
    pub fn iris() -> Self {
        Self::parse(IRIS_CSV, Path::new("<builtin iris.csv>")).expect("bundled IRIS data parses")
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }
}
