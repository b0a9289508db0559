//! JSON model files.
//!
//! ```json
//! {
//!   "n": 3,
//!   "thresholds": [1, 1, 1],
//!   "weight_scale": "1e-3",
//!   "weights": [[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]],
//!   "input_layer": { "coupling": 0.05, "input_gap": 0 }
//! }
//! ```
//!
//! * numbers are JSON numbers or strings holding a decimal (`"5e-11"`) or a
//!   fraction (`"1/3"`); strings are read exactly by rational models;
//! * weights are given either as dense rows (`weights`) or as a list of
//!   `[j, k, w]` entries (`weight_triplets`, zero-based, mirrored to `[k, j]`);
//! * `weight_scale` (default 1) multiplies every weight;
//! * `reduced: true` admits zero or negative thresholds;
//! * `input_layer.input_gap` defaults to 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::NetworkModel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Number(f64),
    Text(String),
}

impl Literal {
    pub fn to_scalar<T: Scalar>(&self) -> Result<T> {
        match self {
            Literal::Number(x) if x.is_finite() => Ok(T::of(*x)),
            Literal::Number(x) => Err(Error::Format(format!("non-finite number {x}"))),
            Literal::Text(s) => T::parse_literal(s).ok_or_else(|| Error::Format(format!("cannot parse number {s:?}"))),
        }
    }

    pub fn from_scalar<T: Scalar>(x: &T) -> Self {
        if T::is_exact() {
            Literal::Text(x.to_string())
        } else {
            Literal::Number(x.as_f64())
        }
    }
}

impl From<f64> for Literal {
    fn from(x: f64) -> Self {
        Literal::Number(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputLayerFile {
    pub coupling: Literal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_gap: Option<Literal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    pub thresholds: Vec<Literal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_scale: Option<Literal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<Literal>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_triplets: Option<Vec<(usize, usize, Literal)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_layer: Option<InputLayerFile>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reduced: bool,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Format("empty model file".into()));
        }
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    pub fn to_model<T: Scalar>(&self) -> Result<NetworkModel<T>> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Format("n must be positive".into()));
        }
        if self.thresholds.len() != n {
            return Err(Error::Format(format!("expected {n} thresholds, found {}", self.thresholds.len())));
        }
        let thresholds = self.thresholds.iter().map(Literal::to_scalar).collect::<Result<Vec<T>>>()?;
        let scale: T = match &self.weight_scale {
            Some(s) => s.to_scalar()?,
            None => T::one(),
        };
        let mut weights = vec![vec![T::zero(); n]; n];
        match (&self.weights, &self.weight_triplets) {
            (Some(_), Some(_)) => return Err(Error::Format("give either weights or weight_triplets, not both".into())),
            (Some(rows), None) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Format(format!("weights must be a {n}x{n} matrix")));
                }
                for (j, row) in rows.iter().enumerate() {
                    for (k, w) in row.iter().enumerate() {
                        weights[j][k] = w.to_scalar::<T>()? * scale.clone();
                    }
                }
            }
            (None, Some(triplets)) => {
                for (j, k, w) in triplets {
                    if *j >= n || *k >= n {
                        return Err(Error::Format(format!("weight entry ({j}, {k}) out of range")));
                    }
                    let w = w.to_scalar::<T>()? * scale.clone();
                    weights[*j][*k] = w.clone();
                    weights[*k][*j] = w;
                }
            }
            (None, None) => {}
        }
        let model = if self.reduced {
            NetworkModel::new_reduced(thresholds, weights)?
        } else {
            NetworkModel::new(thresholds, weights)?
        };
        match &self.input_layer {
            Some(layer) => {
                let gap = match &layer.input_gap {
                    Some(g) => g.to_scalar()?,
                    None => T::zero(),
                };
                model.with_input_layer(layer.coupling.to_scalar()?, gap)
            }
            None => Ok(model),
        }
    }

    /// Dense-row file describing `model`.
    pub fn from_model<T: Scalar>(model: &NetworkModel<T>) -> Self {
        ModelFile {
            n: model.n(),
            thresholds: model.thresholds().iter().map(Literal::from_scalar).collect(),
            weight_scale: None,
            weights: Some(
                model
                    .weights()
                    .iter()
                    .map(|row| row.iter().map(Literal::from_scalar).collect())
                    .collect(),
            ),
            weight_triplets: None,
            input_layer: model.input_layer().map(|l| InputLayerFile {
                coupling: Literal::from_scalar(&l.coupling),
                input_gap: Some(Literal::from_scalar(&l.input_gap)),
            }),
            reduced: model.is_reduced(),
        }
    }
}

pub fn parse_model<T: Scalar>(text: &str) -> Result<NetworkModel<T>> {
    ModelFile::parse(text)?.to_model()
}

pub fn write_model<T: Scalar>(model: &NetworkModel<T>) -> String {
    ModelFile::from_model(model).to_json()
}
