//! Naimark dilation of finite POVMs.
//!
//! A POVM `E_0, …, E_{m-1}` becomes the map `φ(σ) = Σ_{a∈σ} E_a` on the
//! semigroup of subsets of `{0, …, m-1}` under intersection, with the
//! identity involution. Its minimal dilation is a projection-valued
//! measure `Φ` on `K` with `φ(σ) = V*·Φ(σ)·V`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::dilation::{self, BoundednessEntry, Dilation, OperatorMap};
use crate::error::{Error, Result};
use crate::numlin::{self, CMatrix, Tolerance};
use crate::sampling;
use crate::semigroup::{subset_semigroup, MAX_ATOMS};

/// Hermitian tolerance for atoms, relative to `max(1, ‖E_a‖)`.
pub const ATOM_HERMITIAN_EPS: f64 = 1e-10;

/// Pair checks are exhaustive up to this many subset pairs and sampled
/// beyond it.
pub const MAX_EXHAUSTIVE_PAIRS: usize = 1 << 16;

const PAIR_SAMPLE_SEED: u64 = 0x5eed_f9a1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmJson", into = "PovmJson")]
pub struct Povm {
    dim: usize,
    atoms: Vec<CMatrix>,
}

impl Povm {
    /// Atoms are stored as their Hermitian parts.
    pub fn new(dim: usize, atoms: Vec<CMatrix>, tol: &Tolerance) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimE must be positive".into()));
        }
        if atoms.is_empty() {
            return Err(Error::Shape("a POVM needs at least one atom".into()));
        }
        let mut clean = Vec::with_capacity(atoms.len());
        for (a, e) in atoms.iter().enumerate() {
            if e.shape() != (dim, dim) {
                return Err(Error::Shape(format!(
                    "atom {a} is {}x{}, expected {dim}x{dim}",
                    e.nrows(),
                    e.ncols()
                )));
            }
            numlin::ensure_finite(e, &format!("atom {a}"))?;
            let residual = numlin::hermitian_residual(e);
            if residual > ATOM_HERMITIAN_EPS * numlin::spectral_norm(e).max(1.0) {
                return Err(Error::AtomNotHermitian { atom: a, residual });
            }
            let h = numlin::hermitian_part(e);
            let psd = numlin::psd_check(&h, tol)?;
            if !psd.is_psd {
                return Err(Error::AtomNotPsd {
                    atom: a,
                    min_eigenvalue: psd.min_eigenvalue,
                });
            }
            clean.push(h);
        }
        Ok(Self { dim, atoms: clean })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[CMatrix] {
        &self.atoms
    }

    /// `Σ E_a`.
    pub fn total(&self) -> CMatrix {
        self.atoms
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, e| acc + e)
    }

    /// `‖I − Σ E_a‖₂`.
    pub fn normalization_defect(&self) -> f64 {
        numlin::spectral_norm(&(numlin::identity(self.dim) - self.total()))
    }

    /// Sum of the atoms indexed by the bits of `mask`.
    pub fn measure(&self, mask: usize) -> CMatrix {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(a, _)| mask >> a & 1 == 1)
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, (_, e)| acc + e)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PovmJson {
    #[serde(rename = "dimE")]
    dim_e: usize,
    atoms: Vec<Vec<Vec<Complex64>>>,
}

impl TryFrom<PovmJson> for Povm {
    type Error = Error;

    fn try_from(raw: PovmJson) -> Result<Self> {
        let atoms = raw
            .atoms
            .iter()
            .enumerate()
            .map(|(a, rows)| numlin::matrix_from_rows(rows, (raw.dim_e, raw.dim_e), &format!("atoms.{a}")))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(raw.dim_e, atoms, &Tolerance::default())
    }
}

impl From<Povm> for PovmJson {
    fn from(p: Povm) -> Self {
        PovmJson {
            dim_e: p.dim,
            atoms: p.atoms.iter().map(numlin::matrix_to_rows).collect(),
        }
    }
}

/// The POVM as an operator map over the subset semigroup, with `F = E`.
pub fn povm_to_operator_map(p: &Povm) -> Result<OperatorMap> {
    if p.len() > MAX_ATOMS {
        return Err(Error::TooManyAtoms {
            atoms: p.len(),
            max: MAX_ATOMS,
        });
    }
    let sg = subset_semigroup(p.len())?;
    let phi = (0..sg.len()).map(|mask| p.measure(mask)).collect();
    OperatorMap::new(sg, p.dim, p.dim, phi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PvmDilation {
    povm: Povm,
    om: OperatorMap,
    dil: Dilation,
}

impl PvmDilation {
    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn operator_map(&self) -> &OperatorMap {
        &self.om
    }

    pub fn dilation(&self) -> &Dilation {
        &self.dil
    }

    /// Dimension of `K`.
    pub fn k_dim(&self) -> usize {
        self.dil.rank()
    }

    /// `V: E → K`, the dilation's embedding `T`.
    pub fn v(&self) -> &CMatrix {
        self.dil.t()
    }

    /// `Φ(σ)` for the subset with bitmask `mask`.
    pub fn projection(&self, mask: usize) -> &CMatrix {
        self.dil.phi(mask)
    }

    pub fn projections(&self) -> &[CMatrix] {
        self.dil.phis()
    }
}

/// Minimal dilation of `p`. A positive-definiteness failure here is a
/// conditioning problem with the input, reported as `PositivityBroken`.
pub fn naimark_dilate(p: &Povm, tol: &Tolerance) -> Result<PvmDilation> {
    let om = povm_to_operator_map(p)?;
    let pd = dilation::check_positive_definite(&om, tol)?;
    if !pd.positive_definite {
        return Err(Error::PositivityBroken {
            min_eigenvalue: pd.min_eigenvalue,
        });
    }
    let dil = match dilation::build_dilation(&om, tol) {
        Err(Error::NotPositiveDefinite { min_eigenvalue }) => {
            return Err(Error::PositivityBroken { min_eigenvalue })
        }
        other => other?,
    };
    Ok(PvmDilation {
        povm: p.clone(),
        om,
        dil,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvmReport {
    pub k_dim: usize,
    pub atoms: usize,
    pub subsets: usize,
    pub pairs_checked: usize,
    pub exhaustive_pairs: bool,
    /// `max ‖Φ(σ)² − Φ(σ)‖₂`.
    pub idempotency: f64,
    /// `max ‖Φ(σ) − Φ(σ)*‖₂`.
    pub self_adjointness: f64,
    /// `max ‖Φ(σ)Φ(τ) − Φ(τ)Φ(σ)‖₂`.
    pub commutation: f64,
    /// `max ‖Φ(σ∩τ) − Φ(σ)Φ(τ)‖₂`.
    pub multiplicativity: f64,
    /// `max ‖Φ(σ∪τ) − Φ(σ) − Φ(τ)‖₂` over disjoint pairs.
    pub additivity: f64,
    /// `max ‖Φ(σ)‖₂`.
    pub max_projection_norm: f64,
    /// `max ‖V*Φ(σ)V − φ(σ)‖₂`.
    pub factorization: f64,
    /// Rank of `Φ({a})` for each atom.
    pub projection_ranks: Vec<usize>,
    /// Largest eigenvalue of `φ(X)`, the best `c` in `⟨φ(X)f, f⟩ ≤ c‖f‖²`.
    pub total_bound: f64,
    pub v_norm_sq: f64,
    pub normalized: bool,
    /// `‖I − φ(X)‖₂`.
    pub normalization_defect: f64,
    /// `I − φ(X)` as rows.
    pub defect: Vec<Vec<Complex64>>,
    /// `‖V*V − I‖₂`, for normalized POVMs.
    pub isometry_residual: Option<f64>,
    /// `‖(VV*)² − VV*‖₂`, for normalized POVMs.
    pub range_projection_residual: Option<f64>,
    pub c_table: Vec<BoundednessEntry>,
    pub threshold: f64,
    pub passed: bool,
}

/// Certifies that `Φ` is a projection-valued measure factoring `φ`
/// through `V`.
pub fn verify_pvm(pd: &PvmDilation, tol: &Tolerance) -> Result<PvmReport> {
    let om = &pd.om;
    let sg = om.semigroup();
    let n = sg.len();
    let m = pd.povm.len();
    let r = pd.k_dim();
    let phis = pd.projections();
    let v = pd.v();
    let norm = |x: &CMatrix| numlin::spectral_norm(x);
    let total = om.phi(sg.unit());
    let total_bound = numlin::hermitian_eigen(total)
        .values
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    let threshold = tol.threshold_for(total_bound.max(1.0));

    let mut idempotency = 0.0f64;
    let mut self_adjointness = 0.0f64;
    let mut max_projection_norm = 0.0f64;
    let mut factorization = 0.0f64;
    for (s, p) in phis.iter().enumerate() {
        idempotency = idempotency.max(norm(&(p * p - p)));
        self_adjointness = self_adjointness.max(norm(&(p - p.adjoint())));
        max_projection_norm = max_projection_norm.max(norm(p));
        factorization = factorization.max(norm(&(v.adjoint() * p * v - om.phi(s))));
    }

    let exhaustive_pairs = n * n <= MAX_EXHAUSTIVE_PAIRS;
    let pairs: Vec<(usize, usize)> = if exhaustive_pairs {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        let mut rng = sampling::rng(PAIR_SAMPLE_SEED);
        (0..MAX_EXHAUSTIVE_PAIRS)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
            .collect()
    };
    let mut commutation = 0.0f64;
    let mut multiplicativity = 0.0f64;
    let mut additivity = 0.0f64;
    for &(a, b) in &pairs {
        let ab = &phis[a] * &phis[b];
        let ba = &phis[b] * &phis[a];
        commutation = commutation.max(norm(&(&ab - ba)));
        multiplicativity = multiplicativity.max(norm(&(&phis[sg.mul(a, b)] - ab)));
        if a & b == 0 {
            let sum = &phis[a] + &phis[b];
            additivity = additivity.max(norm(&(&phis[a | b] - sum)));
        }
    }

    let projection_ranks = (0..m).map(|a| numlin::rank(&phis[1 << a], tol)).collect();
    let v_norm_sq = norm(v).powi(2);
    let defect_matrix = numlin::identity(pd.povm.dim()) - total;
    let normalization_defect = norm(&defect_matrix);
    let normalized = normalization_defect <= threshold;
    let (isometry_residual, range_projection_residual) = if normalized {
        let vv = v * v.adjoint();
        (
            Some(norm(&(v.adjoint() * v - numlin::identity(pd.povm.dim())))),
            Some(norm(&(&vv * &vv - &vv))),
        )
    } else {
        (None, None)
    };
    let c_table = dilation::boundedness_table(&pd.dil, om, tol)?;

    let within = |x: f64| x <= threshold;
    let passed = [
        idempotency,
        self_adjointness,
        commutation,
        multiplicativity,
        additivity,
        factorization,
    ]
    .into_iter()
    .all(within)
        && max_projection_norm <= 1.0 + threshold
        && v_norm_sq <= total_bound + threshold
        && isometry_residual.is_none_or(within)
        && range_projection_residual.is_none_or(within)
        && c_table.iter().all(|e| e.passed && e.c <= 1.0 + threshold);

    Ok(PvmReport {
        k_dim: r,
        atoms: m,
        subsets: n,
        pairs_checked: pairs.len(),
        exhaustive_pairs,
        idempotency,
        self_adjointness,
        commutation,
        multiplicativity,
        additivity,
        max_projection_norm,
        factorization,
        projection_ranks,
        total_bound,
        v_norm_sq,
        normalized,
        normalization_defect,
        defect: numlin::matrix_to_rows(&defect_matrix),
        isometry_residual,
        range_projection_residual,
        c_table,
        threshold,
        passed,
    })
}

/// The two-outcome fair coin on `C¹`.
pub fn coin() -> Povm {
    let half = numlin::real_diag(&[0.5]);
    Povm::new(1, vec![half.clone(), half], &Tolerance::default()).expect("valid POVM")
}

/// The qubit POVM `diag(3/4, 1/4)`, `diag(1/4, 3/4)`.
pub fn qubit_povm() -> Povm {
    Povm::new(
        2,
        vec![numlin::real_diag(&[0.75, 0.25]), numlin::real_diag(&[0.25, 0.75])],
        &Tolerance::default(),
    )
    .expect("valid POVM")
}
