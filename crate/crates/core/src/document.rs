//! JSON documents for the four kinds of objects.
//!
//! Complex numbers are `[re, im]` pairs and matrices are nested row-major
//! arrays of them. Floats are written in shortest round-trip form, so
//! `parse(emit(doc)) == doc` holds bit for bit.

use serde::{Deserialize, Serialize};

use crate::colligation::Colligation;
use crate::conjclass::TriColligation;
use crate::doublecoset::DoubleCosetFamily;
use crate::error::{Error, Result};
use crate::matrixcore::{c64, ComplexMatrix, Tolerances};
use crate::multicolligation::MultiColligation;

pub const SCHEMA_VERSION: &str = "1";

/// Row-major matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("matrix rows have different lengths".into()));
        }
        if self.0.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
            let [re, im] = self.0[i][j];
            c64(re, im)
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Colligation {
        alpha: usize,
        inner: usize,
        matrix: MatrixJson,
    },
    Multi {
        alpha: usize,
        inner: usize,
        members: Vec<MatrixJson>,
    },
    Tri {
        alpha: usize,
        p: usize,
        slots: usize,
        matrix: MatrixJson,
    },
    Doublecoset {
        alpha: usize,
        inner: usize,
        members: Vec<MatrixJson>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    #[serde(flatten)]
    pub payload: Payload,
    #[serde(default)]
    pub metadata: Metadata,
}

/// A validated document.
#[derive(Debug, Clone)]
pub enum Object {
    Colligation(Colligation),
    Multi(MultiColligation),
    Tri(TriColligation),
    DoubleCoset(DoubleCosetFamily),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Colligation(_) => "colligation",
            Object::Multi(_) => "multi",
            Object::Tri(_) => "tri",
            Object::DoubleCoset(_) => "doublecoset",
        }
    }

    pub fn to_document(&self, seed: Option<u64>) -> Document {
        let payload = match self {
            Object::Colligation(c) => Payload::Colligation {
                alpha: c.alpha(),
                inner: c.inner(),
                matrix: MatrixJson::from_matrix(c.matrix()),
            },
            Object::Multi(m) => Payload::Multi {
                alpha: m.alpha(),
                inner: m.inner(),
                members: m
                    .members()
                    .iter()
                    .map(|c| MatrixJson::from_matrix(c.matrix()))
                    .collect(),
            },
            Object::Tri(t) => Payload::Tri {
                alpha: t.alpha(),
                p: t.p(),
                slots: t.slots(),
                matrix: MatrixJson::from_matrix(t.matrix()),
            },
            Object::DoubleCoset(f) => Payload::Doublecoset {
                alpha: f.alpha(),
                inner: f.inner(),
                members: f.members().iter().map(MatrixJson::from_matrix).collect(),
            },
        };
        Document {
            payload,
            metadata: Metadata {
                seed,
                ..Metadata::default()
            },
        }
    }

    /// Product of two objects of the same kind.
    pub fn product(&self, other: &Object) -> Result<Object> {
        match (self, other) {
            (Object::Colligation(a), Object::Colligation(b)) => a.product(b).map(Object::Colligation),
            (Object::Multi(a), Object::Multi(b)) => a.product(b).map(Object::Multi),
            (Object::Tri(a), Object::Tri(b)) => a.product(b).map(Object::Tri),
            (Object::DoubleCoset(a), Object::DoubleCoset(b)) => a.product(b).map(Object::DoubleCoset),
            (a, b) => Err(Error::DimensionMismatch(format!(
                "cannot multiply a {} document by a {} document",
                a.kind(),
                b.kind()
            ))),
        }
    }
}

fn members_to_matrices(members: &[MatrixJson]) -> Result<Vec<ComplexMatrix>> {
    members.iter().map(MatrixJson::to_matrix).collect()
}

fn check_size(m: &ComplexMatrix, size: usize, what: &str) -> Result<()> {
    if m.shape() != (size, size) {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be {size}x{size}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

impl Document {
    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Canonical form: compact JSON followed by a newline.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Colligation { .. } => "colligation",
            Payload::Multi { .. } => "multi",
            Payload::Tri { .. } => "tri",
            Payload::Doublecoset { .. } => "doublecoset",
        }
    }

    /// Checks every invariant and builds the object.
    pub fn to_object(&self, tol: &Tolerances) -> Result<Object> {
        match &self.payload {
            Payload::Colligation { alpha, inner, matrix } => {
                let m = matrix.to_matrix()?;
                check_size(&m, alpha + inner, "colligation matrix")?;
                Colligation::new(m, *alpha, tol).map(Object::Colligation)
            }
            Payload::Multi { alpha, inner, members } => {
                let ms = members_to_matrices(members)?;
                for m in &ms {
                    check_size(m, alpha + inner, "member")?;
                }
                MultiColligation::from_matrices(ms, *alpha, tol).map(Object::Multi)
            }
            Payload::Tri {
                alpha,
                p,
                slots,
                matrix,
            } => {
                let m = matrix.to_matrix()?;
                TriColligation::new(m, *alpha, *p, *slots, tol).map(Object::Tri)
            }
            Payload::Doublecoset { alpha, inner, members } => {
                let ms = members_to_matrices(members)?;
                for m in &ms {
                    check_size(m, alpha + inner, "member")?;
                }
                DoubleCosetFamily::new(ms, *alpha, tol).map(Object::DoubleCoset)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::rng;

    #[test]
    fn round_trip_is_exact() {
        let docs = [
            Object::Colligation(Colligation::random(2, 3, &mut rng(1))),
            Object::Multi(MultiColligation::random(3, 1, 2, &mut rng(2))),
            Object::Tri(TriColligation::random(1, 2, 2, &mut rng(3))),
            Object::DoubleCoset(DoubleCosetFamily::random(2, 2, 1, &mut rng(4))),
        ];
        for obj in &docs {
            let doc = obj.to_document(Some(7));
            let text = doc.emit();
            let back = Document::parse(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.emit(), text);
            assert_eq!(back.kind(), obj.kind());
            back.to_object(&Tolerances::default()).unwrap();
        }
    }

    #[test]
    fn identity_document_validates() {
        let text = r#"{"kind":"colligation","alpha":1,"inner":1,"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        let doc = Document::parse(text).unwrap();
        assert_eq!(doc.metadata.schema_version, SCHEMA_VERSION);
        assert!(doc.to_object(&Tolerances::default()).is_ok());
    }

    #[test]
    fn invariant_violations() {
        let tol = Tolerances::default();
        let bad = r#"{"kind":"colligation","alpha":1,"inner":1,"matrix":[[[2,0],[0,0]],[[0,0],[1,0]]]}"#;
        let err = Document::parse(bad).unwrap().to_object(&tol).unwrap_err();
        assert!(err.to_string().starts_with("NotUnitary"));
        let ragged = r#"{"kind":"colligation","alpha":1,"inner":1,"matrix":[[[1,0]],[[0,0],[1,0]]]}"#;
        assert!(Document::parse(ragged).unwrap().to_object(&tol).is_err());
        let wrong_size = r#"{"kind":"colligation","alpha":1,"inner":2,"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        assert!(Document::parse(wrong_size).unwrap().to_object(&tol).is_err());
        assert!(Document::parse(r#"{"kind":"colligation","alpha":1"#).is_err());
        assert!(Document::parse(r#"{"kind":"nothing"}"#).is_err());
    }

    #[test]
    fn kind_mismatch_in_product() {
        let a = Object::Multi(MultiColligation::identity(2, 1, 1));
        let b = Object::Tri(TriColligation::identity(1, 1, 2));
        assert!(a.product(&b).is_err());
    }
}
