//! Problem files: a `kind` tag, a kind-specific `payload`, and optional
//! run settings.
//!
//! Matrices are arrays of rows; each entry is a `[re, im]` pair.

use std::fmt;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dilation::OperatorMap;
use crate::framing::Framing;
use crate::naimark::Povm;
use crate::numlin::{self, CMatrix, Tolerance};
use crate::subspace::Subspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Framing,
    Generator,
    Ovm,
    Dilation,
    Naimark,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Kind::Framing => "framing",
            Kind::Generator => "generator",
            Kind::Ovm => "ovm",
            Kind::Dilation => "dilation",
            Kind::Naimark => "naimark",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    pub payload: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Tolerance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

pub type MatrixRows = Vec<Vec<Complex64>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramingPayload {
    pub framing: Framing,
    /// Space on which reconstruction is checked; `F_max` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Subspace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorPayload {
    pub framing: Framing,
    #[serde(rename = "A")]
    pub a: MatrixRows,
    #[serde(rename = "B")]
    pub b: MatrixRows,
    /// The space `F`; the largest admissible one when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Subspace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OvmPayload {
    pub framing: Framing,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<MatrixRows>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Subspace>,
}

#[derive(Debug, Clone)]
pub enum Payload {
    Framing(FramingPayload),
    Generator(GeneratorPayload),
    Ovm(OvmPayload),
    Dilation(OperatorMap),
    Naimark(Povm),
}

/// Malformed input, with the JSON path where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "at {}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for InputError {}

impl InputError {
    pub fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

fn deserialize_at<T: DeserializeOwned>(value: &serde_json::Value, prefix: &str) -> Result<T, InputError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            prefix.to_string()
        } else {
            format!("{prefix}.{inner}")
        };
        InputError::new(path, e.into_inner())
    })
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            InputError::new(path, e.into_inner())
        })
    }

    pub fn payload(&self) -> Result<Payload, InputError> {
        let v = &self.payload;
        Ok(match self.kind {
            Kind::Framing => Payload::Framing(deserialize_at(v, "payload")?),
            Kind::Generator => Payload::Generator(deserialize_at(v, "payload")?),
            Kind::Ovm => Payload::Ovm(deserialize_at(v, "payload")?),
            Kind::Dilation => Payload::Dilation(deserialize_at(v, "payload")?),
            Kind::Naimark => Payload::Naimark(deserialize_at(v, "payload")?),
        })
    }
}

/// A square operator on `C^dim` from rows, reporting errors at `path`.
pub fn operator_from_rows(rows: &MatrixRows, dim: usize, path: &str) -> Result<CMatrix, InputError> {
    numlin::matrix_from_rows(rows, (dim, dim), path).map_err(|e| InputError::new(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_and_unknown_fields() {
        let ok = r#"{"kind":"naimark","payload":{"dimE":1,"atoms":[[[[1.0,0.0]]]]}}"#;
        let p = ProblemFile::parse(ok).unwrap();
        assert_eq!(p.kind, Kind::Naimark);
        assert!(matches!(p.payload().unwrap(), Payload::Naimark(_)));

        let extra = r#"{"kind":"naimark","payload":{},"colour":1}"#;
        assert!(ProblemFile::parse(extra).is_err());
        let bad_kind = r#"{"kind":"nope","payload":{}}"#;
        assert_eq!(ProblemFile::parse(bad_kind).unwrap_err().path, "kind");
    }

    #[test]
    fn payload_errors_name_the_path() {
        let text = r#"{"kind":"naimark","payload":{"dimE":1,"atoms":[[[[1.0]]]]}}"#;
        let err = ProblemFile::parse(text).unwrap().payload().unwrap_err();
        assert!(err.path.starts_with("payload.atoms"), "{err}");

        let text = r#"{"kind":"framing","payload":{"framing":{"dim":1,"g":[],"h":[]},"extra":0}}"#;
        let err = ProblemFile::parse(text).unwrap().payload().unwrap_err();
        assert!(err.path.starts_with("payload"), "{err}");
        assert!(err.message.contains("extra"), "{err}");
    }

    #[test]
    fn tolerance_is_validated() {
        let text = r#"{"kind":"naimark","payload":{},"tolerance":{"rel":-1.0,"abs":0.0}}"#;
        assert_eq!(ProblemFile::parse(text).unwrap_err().path, "tolerance");
    }
}
