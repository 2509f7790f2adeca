//! JSON formats: structure instances, snapshot families and serde helpers.
//!
//! Instance format (0-based canonical indices, omitted entries are zero):
//!
//! ```json
//! { "dim": 2, "metric": [[1, 0], [0, 1]], "cubic": [ {"idx": [0, 0, 0], "val": 2.0} ] }
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tensor::{Metric, StatStructure, SymCubic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubicEntry {
    pub idx: [usize; 3],
    pub val: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub cubic: Vec<CubicEntry>,
}

/// An instance tagged with its family parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub t: f64,
    pub dim: usize,
    #[serde(default)]
    pub metric: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub cubic: Vec<CubicEntry>,
}

impl Instance {
    pub fn from_structure(s: &StatStructure) -> Self {
        let g = s.metric().gram();
        Self {
            dim: s.dim(),
            metric: Some(
                (0..g.nrows())
                    .map(|r| (0..g.ncols()).map(|c| g[(r, c)]).collect())
                    .collect(),
            ),
            cubic: s
                .cubic()
                .entries()
                .into_iter()
                .map(|(idx, val)| CubicEntry { idx, val })
                .collect(),
        }
    }

    pub fn to_structure(&self) -> Result<StatStructure> {
        build(self.dim, self.metric.as_deref(), &self.cubic)
    }
}

impl Snapshot {
    pub fn to_structure(&self) -> Result<StatStructure> {
        build(self.dim, self.metric.as_deref(), &self.cubic)
    }
}

fn build(dim: usize, metric: Option<&[Vec<f64>]>, cubic: &[CubicEntry]) -> Result<StatStructure> {
    let entries: Vec<_> = cubic.iter().map(|e| (e.idx, e.val)).collect();
    let cubic = SymCubic::from_entries(dim, &entries)?;
    let metric = match metric {
        None => Metric::identity(dim),
        Some(rows) => {
            if rows.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: rows.len(),
                });
            }
            if let Some(r) = rows.iter().find(|r| r.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            Metric::new(DMatrix::from_fn(dim, dim, |r, c| rows[r][c]))?
        }
    };
    StatStructure::new(metric, cubic)
}

pub fn parse_instance(text: &str) -> Result<StatStructure> {
    let inst: Instance = serde_json::from_str(text)?;
    inst.to_structure()
}

pub fn instance_json(s: &StatStructure) -> serde_json::Value {
    serde_json::to_value(Instance::from_structure(s)).expect("instance serializes")
}

pub fn parse_snapshots(text: &str) -> Result<Vec<(f64, StatStructure)>> {
    let snaps: Vec<Snapshot> = serde_json::from_str(text)?;
    snaps
        .iter()
        .map(|s| Ok((s.t, s.to_structure()?)))
        .collect()
}

pub fn ser_vector<S: Serializer>(v: &DVector<f64>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(v.iter())
}

pub fn ser_vectors<S: Serializer>(
    vs: &[DVector<f64>],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = vs.iter().map(|v| v.iter().copied().collect()).collect();
    rows.serialize(ser)
}

pub fn de_vectors<'de, D: Deserializer<'de>>(
    de: D,
) -> std::result::Result<Vec<DVector<f64>>, D::Error> {
    let rows: Vec<Vec<f64>> = Vec::deserialize(de)?;
    Ok(rows.into_iter().map(DVector::from_vec).collect())
}
