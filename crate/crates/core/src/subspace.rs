//! Linear subspaces of `C^d` held as orthonormal column bases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{self, CMatrix, CVector, Tolerance};

/// Orthonormality slack accepted for a stored basis.
pub const ORTHONORMAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceJson", into = "SubspaceJson")]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Self {
            basis: CMatrix::zeros(dim, 0),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            basis: numlin::identity(dim),
        }
    }

    pub(crate) fn from_basis_unchecked(basis: CMatrix) -> Self {
        Self { basis }
    }

    /// Wraps a basis that is already orthonormal within [`ORTHONORMAL_EPS`].
    pub fn from_orthonormal(basis: CMatrix) -> Result<Self> {
        numlin::ensure_finite(&basis, "subspace basis")?;
        let k = basis.ncols();
        let defect = (basis.adjoint() * &basis - numlin::identity(k)).norm();
        if defect > ORTHONORMAL_EPS {
            return Err(Error::RankDeficient(format!(
                "basis columns are not orthonormal (‖Q*Q − I‖ = {defect:e})"
            )));
        }
        Ok(Self { basis })
    }

    /// The span of `vectors`, which must be linearly independent at `tol`.
    pub fn span(vectors: &[CVector], tol: &Tolerance) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Shape(
                "cannot infer the ambient dimension of an empty span".into(),
            ));
        };
        let dim = first.len();
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(
                "spanning vectors have different lengths".into(),
            ));
        }
        let m = CMatrix::from_columns(vectors);
        Self::span_of_columns(&m, tol, true)
    }

    /// Column span of `m`. With `require_independent`, a rank-deficient `m`
    /// is rejected rather than silently reduced.
    pub fn span_of_columns(m: &CMatrix, tol: &Tolerance, require_independent: bool) -> Result<Self> {
        numlin::ensure_finite(m, "spanning set")?;
        let range = numlin::range_basis(m, tol);
        if require_independent && range.rank() != m.ncols() {
            return Err(Error::RankDeficient(format!(
                "{} vectors span only {} dimensions",
                m.ncols(),
                range.rank()
            )));
        }
        Ok(range)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Number of basis columns.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `‖(I − P)·M‖₂`, how far the columns of `m` stick out of the subspace.
    pub fn distance_of(&self, m: &CMatrix) -> f64 {
        let outside = m - &self.basis * (self.basis.adjoint() * m);
        numlin::spectral_norm(&outside)
    }

    /// Sine of the largest principal angle between equal-rank subspaces;
    /// `1` when the ranks differ.
    pub fn max_angle_sine(&self, other: &Subspace) -> f64 {
        if self.rank() != other.rank() || self.ambient_dim() != other.ambient_dim() {
            return 1.0;
        }
        self.distance_of(&other.basis)
            .max(other.distance_of(&self.basis))
            .min(1.0)
    }

    /// Largest principal angle in radians.
    pub fn max_principal_angle(&self, other: &Subspace) -> f64 {
        self.max_angle_sine(other).asin()
    }

    pub fn same_as(&self, other: &Subspace, angle: f64) -> bool {
        self.rank() == other.rank() && self.max_principal_angle(other) <= angle
    }

    pub fn orthogonal_complement(&self, tol: &Tolerance) -> Subspace {
        numlin::nullspace(&self.basis.adjoint(), tol)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceJson {
    dim: usize,
    basis_columns: Vec<Vec<num_complex::Complex64>>,
}

impl TryFrom<SubspaceJson> for Subspace {
    type Error = Error;

    fn try_from(raw: SubspaceJson) -> Result<Self> {
        if let Some(bad) = raw.basis_columns.iter().position(|c| c.len() != raw.dim) {
            return Err(Error::DimensionMismatch(format!(
                "basis column {bad} has length {} but dim is {}",
                raw.basis_columns[bad].len(),
                raw.dim
            )));
        }
        if raw.basis_columns.is_empty() {
            return Ok(Subspace::zero(raw.dim));
        }
        let cols: Vec<CVector> = raw
            .basis_columns
            .into_iter()
            .map(CVector::from_vec)
            .collect();
        let m = CMatrix::from_columns(&cols);
        // orthonormal input is kept bit for bit so reports round-trip
        Subspace::from_orthonormal(m).or_else(|_| Subspace::span(&cols, &Tolerance::default()))
    }
}

impl From<Subspace> for SubspaceJson {
    fn from(s: Subspace) -> Self {
        SubspaceJson {
            dim: s.ambient_dim(),
            basis_columns: s
                .basis
                .column_iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
        }
    }
}
