//! Instance file format.
//!
//! ```json
//! {"customers": [..], "facilities": [..], "weights": [..],
//!  "dist": [[..], ..], "numeric_mode": "f64" | "rational"}
//! ```
//!
//! Rational entries are `"p/q"` strings; `weights` is optional. A free-form
//! `meta` object is accepted and ignored, so generated files can record how
//! they were made.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{Label, MedianInstance};
use crate::scalar::{NumericMode, Rational, Scalar};

/// An instance in whichever numeric mode its file declared.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyInstance {
    Float(MedianInstance<f64>),
    Rational(MedianInstance<Rational>),
}

impl AnyInstance {
    pub fn mode(&self) -> NumericMode {
        match self {
            AnyInstance::Float(_) => NumericMode::Float,
            AnyInstance::Rational(_) => NumericMode::Rational,
        }
    }
}

impl From<MedianInstance<f64>> for AnyInstance {
    fn from(i: MedianInstance<f64>) -> Self {
        AnyInstance::Float(i)
    }
}

impl From<MedianInstance<Rational>> for AnyInstance {
    fn from(i: MedianInstance<Rational>) -> Self {
        AnyInstance::Rational(i)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    customers: Vec<Label>,
    facilities: Vec<Label>,
    #[serde(default)]
    weights: Option<Vec<Value>>,
    dist: Vec<Vec<Value>>,
    #[serde(default)]
    numeric_mode: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    meta: Option<serde_json::Map<String, Value>>,
}

fn convert<S: Scalar>(raw: RawInstance) -> Result<MedianInstance<S>> {
    let dist = raw
        .dist
        .iter()
        .enumerate()
        .map(|(u, row)| {
            row.iter()
                .enumerate()
                .map(|(f, v)| S::parse_json(v).map_err(|e| Error::invalid(format!("dist[{u}][{f}]"), e)))
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = raw
        .weights
        .map(|w| {
            w.iter()
                .enumerate()
                .map(|(u, v)| S::parse_json(v).map_err(|e| Error::invalid(format!("weights[{u}]"), e)))
                .collect::<Result<Vec<S>>>()
        })
        .transpose()?;
    MedianInstance::new(raw.customers, raw.facilities, dist, weights)
}

pub fn parse_instance(text: &str) -> Result<AnyInstance> {
    let raw: RawInstance = serde_json::from_str(text)?;
    let mode: NumericMode = match &raw.numeric_mode {
        None => NumericMode::Float,
        Some(s) => s.parse().map_err(|e| Error::invalid("numeric_mode", e))?,
    };
    Ok(match mode {
        NumericMode::Float => AnyInstance::Float(convert(raw)?),
        NumericMode::Rational => AnyInstance::Rational(convert(raw)?),
    })
}

fn entry<S: Scalar>(v: &S) -> Value {
    match S::MODE {
        NumericMode::Float => v.to_json(),
        // always the explicit "p/q" form in instance files
        NumericMode::Rational => {
            let r = Rational::parse_json(&v.to_json()).expect("canonical rational");
            Value::String(format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

pub fn instance_to_json<S: Scalar>(inst: &MedianInstance<S>) -> Value {
    let mut obj = json!({
        "customers": inst.customers(),
        "facilities": inst.facilities(),
        "dist": inst.rows().iter().map(|row| row.iter().map(entry).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "numeric_mode": S::MODE.as_str(),
    });
    if let Some(w) = inst.weights() {
        obj["weights"] = Value::Array(w.iter().map(entry).collect());
    }
    obj
}

pub fn any_instance_to_json(inst: &AnyInstance) -> Value {
    match inst {
        AnyInstance::Float(i) => instance_to_json(i),
        AnyInstance::Rational(i) => instance_to_json(i),
    }
}
