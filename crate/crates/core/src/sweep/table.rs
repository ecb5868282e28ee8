use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Free-form provenance and parameter record attached to a table.
pub type Metadata = BTreeMap<String, serde_json::Value>;

/// A named grid coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub points: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced points from `start` to `stop` inclusive.
    pub fn linspace(name: &str, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Invalid(format!(
                "axis {name}: at least 2 points are required, got {count}"
            )));
        }
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(Error::Invalid(format!(
                "axis {name}: need start < stop, got [{start}, {stop}]"
            )));
        }
        let step = (stop - start) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
        points[count - 1] = stop;
        Ok(Self {
            name: name.to_string(),
            points,
        })
    }

    /// `count` evenly spaced points on `(0, stop]`.
    pub fn half_open(name: &str, stop: f64, count: usize) -> Result<Self> {
        if count < 2 || !(stop.is_finite() && stop > 0.0) {
            return Err(Error::Invalid(format!(
                "axis {name}: need count >= 2 and stop > 0, got count {count}, stop {stop}"
            )));
        }
        let points = (1..=count)
            .map(|i| stop * i as f64 / count as f64)
            .collect();
        Ok(Self {
            name: name.to_string(),
            points,
        })
    }

    /// An explicit list of coordinates.
    pub fn values(name: &str, points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid(format!("axis {name}: no points given")));
        }
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::Invalid(format!(
                "axis {name}: coordinate {bad} is not finite"
            )));
        }
        Ok(Self {
            name: name.to_string(),
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Rectangular grid of samples. Grid points are ordered row-major (last
/// axis fastest) and each point carries one value per column. Failed points
/// hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axes: Vec<Axis>,
    pub columns: Vec<String>,
    pub values: Vec<f64>,
    pub metadata: Metadata,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    format: String,
    version: String,
    axes: Vec<Axis>,
    columns: Vec<String>,
    values: Vec<Option<f64>>,
    metadata: Metadata,
}

const JSON_FORMAT: &str = "gpdephase-table";

impl SweepTable {
    pub fn new(
        axes: Vec<Axis>,
        columns: Vec<String>,
        values: Vec<f64>,
        metadata: Metadata,
    ) -> Result<Self> {
        if axes.len() > 2 {
            return Err(Error::Invalid(format!(
                "tables have at most 2 axes, got {}",
                axes.len()
            )));
        }
        if columns.is_empty() {
            return Err(Error::Invalid("table needs at least one column".into()));
        }
        let points: usize = axes.iter().map(Axis::len).product();
        if values.len() != points * columns.len() {
            return Err(Error::Invalid(format!(
                "table expects {} values ({} points x {} columns), got {}",
                points * columns.len(),
                points,
                columns.len(),
                values.len()
            )));
        }
        Ok(Self {
            axes,
            columns,
            values,
            metadata,
        })
    }

    pub fn points(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    /// Axis coordinates of grid point `index`.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut coords = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            coords[k] = axis.points[rest % axis.len()];
            rest /= axis.len();
        }
        coords
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, point: usize, column: usize) -> f64 {
        self.values[point * self.columns.len() + column]
    }

    /// All values of one column, in grid order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column_index(name)?;
        Some((0..self.points()).map(|p| self.get(p, c)).collect())
    }

    pub fn flagged(&self) -> usize {
        self.values.iter().filter(|v| !v.is_finite()).count()
    }

    fn shape(&self) -> String {
        if self.axes.is_empty() {
            "scalar".to_string()
        } else {
            self.axes
                .iter()
                .map(|a| a.len().to_string())
                .collect::<Vec<_>>()
                .join("x")
        }
    }

    /// CSV with `#` comment lines carrying the tool version, grid shape and
    /// metadata, then a header row and one row per grid point. Numbers are
    /// written with 17 significant digits; failed points as `nan`.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        let meta = serde_json::to_string(&self.metadata)
            .map_err(|e| Error::Invalid(format!("metadata is not serializable: {e}")))?;
        let _ = writeln!(out, "# gpdephase {}", crate::VERSION);
        let _ = writeln!(out, "# shape: {}", self.shape());
        let _ = writeln!(out, "# metadata: {meta}");
        let header: Vec<&str> = self
            .axes
            .iter()
            .map(|a| a.name.as_str())
            .chain(self.columns.iter().map(String::as_str))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        let width = self.columns.len();
        for p in 0..self.points() {
            let fields: Vec<String> = self
                .coordinates(p)
                .into_iter()
                .chain(self.values[p * width..(p + 1) * width].iter().copied())
                .map(format_number)
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut shape = None;
        let mut metadata = None;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some(s) = line.strip_prefix("# shape: ") {
                shape = Some(s.trim().to_string());
            } else if let Some(m) = line.strip_prefix("# metadata: ") {
                metadata = Some(
                    serde_json::from_str::<Metadata>(m)
                        .map_err(|e| Error::Invalid(format!("bad metadata line: {e}")))?,
                );
            }
        }
        let shape = shape.ok_or_else(|| Error::Invalid("missing '# shape:' line".into()))?;
        let dims: Vec<usize> = if shape == "scalar" {
            Vec::new()
        } else {
            shape
                .split('x')
                .map(|d| {
                    d.parse()
                        .map_err(|_| Error::Invalid(format!("bad shape {shape:?}")))
                })
                .collect::<Result<_>>()?
        };

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Invalid(format!("bad CSV header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        if header.len() <= dims.len() {
            return Err(Error::Invalid("CSV header has no value columns".into()));
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Invalid(format!("bad CSV row: {e}")))?;
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Invalid(format!("bad number {f:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != header.len() {
                return Err(Error::Invalid("ragged CSV row".into()));
            }
            rows.push(row);
        }
        let points: usize = dims.iter().product();
        if rows.len() != points {
            return Err(Error::Invalid(format!(
                "shape {shape} implies {points} rows, found {}",
                rows.len()
            )));
        }

        let mut axes = Vec::with_capacity(dims.len());
        let mut stride = points;
        for (k, &n) in dims.iter().enumerate() {
            stride /= n;
            let pts = (0..n).map(|i| rows[i * stride][k]).collect();
            axes.push(Axis {
                name: header[k].clone(),
                points: pts,
            });
        }
        let columns = header[dims.len()..].to_vec();
        let values = rows
            .into_iter()
            .flat_map(|r| r.into_iter().skip(dims.len()))
            .collect();
        Self::new(axes, columns, values, metadata.unwrap_or_default())
    }

    /// JSON object with axes, columns, row-major values (`null` for failed
    /// points) and metadata.
    pub fn to_json(&self) -> Result<String> {
        let doc = JsonTable {
            format: JSON_FORMAT.to_string(),
            version: crate::VERSION.to_string(),
            axes: self.axes.clone(),
            columns: self.columns.clone(),
            values: self
                .values
                .iter()
                .map(|v| v.is_finite().then_some(*v))
                .collect(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string(&doc)
            .map_err(|e| Error::Invalid(format!("JSON encoding failed: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonTable = serde_json::from_str(text)
            .map_err(|e| Error::Invalid(format!("bad JSON table: {e}")))?;
        if doc.format != JSON_FORMAT {
            return Err(Error::Invalid(format!(
                "unexpected format tag {:?}",
                doc.format
            )));
        }
        let values = doc
            .values
            .into_iter()
            .map(|v| v.unwrap_or(f64::NAN))
            .collect();
        Self::new(doc.axes, doc.columns, values, doc.metadata)
    }
}

fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}
