//! Dilations of operator maps `φ: S → L(F, E)` over finite *-semigroups.
//!
//! The orbit functions `φ_{s,f}(t) = φ(ts)f` span a space `D`. For a
//! positive-definite `φ` the form `⟨φ_{s,f}, φ_{t,g}⟩ = ⟨φ(t*s)f, g⟩` is a
//! semi-inner product on `D`; factoring out its null space gives the
//! dilation space `K`, on which `Φ(u)φ_{s,f} = φ_{us,f}` is a
//! *-homomorphism with `φ(u) = S·Φ(u)·T`.
//!
//! Orbit coordinates are indexed by pairs `(s, i)` flattened as
//! `s·dim_f + i`, where `i` runs over the standard basis of `F`. `F` sits in
//! `E` as the span of the first `dim_f` coordinates.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{self, CMatrix, CVector, Tolerance};
use crate::sampling;
use crate::semigroup::FiniteStarSemigroup;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorMapJson", into = "OperatorMapJson")]
pub struct OperatorMap {
    sg: FiniteStarSemigroup,
    dim_f: usize,
    dim_e: usize,
    phi: Vec<CMatrix>,
}

impl OperatorMap {
    pub fn new(sg: FiniteStarSemigroup, dim_f: usize, dim_e: usize, phi: Vec<CMatrix>) -> Result<Self> {
        if dim_f == 0 || dim_e == 0 {
            return Err(Error::Shape("dimF and dimE must be positive".into()));
        }
        if phi.len() != sg.len() {
            return Err(Error::Shape(format!(
                "{} matrices for {} semigroup elements",
                phi.len(),
                sg.len()
            )));
        }
        for (s, m) in phi.iter().enumerate() {
            if m.shape() != (dim_e, dim_f) {
                return Err(Error::Shape(format!(
                    "φ({s}) is {}x{}, expected {dim_e}x{dim_f}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            numlin::ensure_finite(m, &format!("φ({s})"))?;
        }
        Ok(Self {
            sg,
            dim_f,
            dim_e,
            phi,
        })
    }

    pub fn semigroup(&self) -> &FiniteStarSemigroup {
        &self.sg
    }

    pub fn dim_f(&self) -> usize {
        self.dim_f
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn phi(&self, s: usize) -> &CMatrix {
        &self.phi[s]
    }

    pub fn phis(&self) -> &[CMatrix] {
        &self.phi
    }

    /// Number of orbit coordinates, `|S|·dim_f`.
    pub fn orbit_len(&self) -> usize {
        self.sg.len() * self.dim_f
    }

    fn check_element(&self, s: usize) -> Result<()> {
        if s < self.sg.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: s,
                len: self.sg.len(),
            })
        }
    }

    fn ensure_f_in_e(&self) -> Result<()> {
        if self.dim_f <= self.dim_e {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "F = C^{} cannot be a subspace of E = C^{}",
                self.dim_f, self.dim_e
            )))
        }
    }

    /// Matrix `M` with `M[:, (s,i)] = φ(s)·e_i`, the map `S` on orbit
    /// coordinates.
    fn evaluation_matrix(&self) -> CMatrix {
        let k = self.dim_f;
        CMatrix::from_fn(self.dim_e, self.orbit_len(), |r, c| {
            self.phi[c / k][(r, c % k)]
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorMapJson {
    semigroup: FiniteStarSemigroup,
    #[serde(rename = "dimF")]
    dim_f: usize,
    #[serde(rename = "dimE")]
    dim_e: usize,
    phi: BTreeMap<String, Vec<Vec<Complex64>>>,
}

impl TryFrom<OperatorMapJson> for OperatorMap {
    type Error = Error;

    fn try_from(raw: OperatorMapJson) -> Result<Self> {
        let n = raw.semigroup.len();
        let mut slots: Vec<Option<CMatrix>> = vec![None; n];
        for (key, rows) in &raw.phi {
            let s: usize = key
                .parse()
                .map_err(|_| Error::Shape(format!("phi key {key:?} is not an element index")))?;
            if s >= n {
                return Err(Error::IndexOutOfRange { index: s, len: n });
            }
            slots[s] = Some(numlin::matrix_from_rows(
                rows,
                (raw.dim_e, raw.dim_f),
                &format!("phi.{key}"),
            )?);
        }
        let phi = slots
            .into_iter()
            .enumerate()
            .map(|(s, m)| m.ok_or_else(|| Error::Shape(format!("phi has no matrix for element {s}"))))
            .collect::<Result<Vec<_>>>()?;
        OperatorMap::new(raw.semigroup, raw.dim_f, raw.dim_e, phi)
    }
}

impl From<OperatorMap> for OperatorMapJson {
    fn from(om: OperatorMap) -> Self {
        OperatorMapJson {
            dim_f: om.dim_f,
            dim_e: om.dim_e,
            phi: om
                .phi
                .iter()
                .enumerate()
                .map(|(s, m)| (s.to_string(), numlin::matrix_to_rows(m)))
                .collect(),
            semigroup: om.sg,
        }
    }
}

/// A finitely supported combination `Σ ξ_{(s,i)} φ_{s,e_i}` in `D`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OrbitVector {
    pub coeffs: BTreeMap<(usize, usize), Complex64>,
}

impl OrbitVector {
    pub fn single(s: usize, i: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((s, i), numlin::C_ONE);
        Self { coeffs }
    }

    pub fn add(&mut self, s: usize, i: usize, xi: Complex64) {
        *self.coeffs.entry((s, i)).or_insert(numlin::C_ZERO) += xi;
    }

    /// Dense orbit coordinates.
    pub fn coordinates(&self, om: &OperatorMap) -> Result<CVector> {
        let mut x = CVector::zeros(om.orbit_len());
        for (&(s, i), &xi) in &self.coeffs {
            om.check_element(s)?;
            if i >= om.dim_f {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: om.dim_f,
                });
            }
            x[s * om.dim_f + i] += xi;
        }
        Ok(x)
    }

    /// The function value at `t`: `Σ ξ_{(s,i)} φ(ts)·e_i`.
    pub fn evaluate(&self, om: &OperatorMap, t: usize) -> Result<CVector> {
        om.check_element(t)?;
        let mut out = CVector::zeros(om.dim_e);
        for (&(s, i), &xi) in &self.coeffs {
            out += orbit_eval(om, s, &numlin::basis_vector(om.dim_f, i), t)? * xi;
        }
        Ok(out)
    }
}

/// `φ_{s,f}(t) = φ(ts)·f`.
pub fn orbit_eval(om: &OperatorMap, s: usize, f: &CVector, t: usize) -> Result<CVector> {
    om.check_element(s)?;
    om.check_element(t)?;
    if f.len() != om.dim_f {
        return Err(Error::DimensionMismatch(format!(
            "f has length {} but dim F is {}",
            f.len(),
            om.dim_f
        )));
    }
    Ok(&om.phi[om.sg.mul(t, s)] * f)
}

/// Gram matrix with `G[(t,j),(s,i)] = ⟨φ_{s,e_i}, φ_{t,e_j}⟩ = ⟨φ(t*s)e_i, e_j⟩`,
/// so that `⟨x, y⟩_D = y*·G·x` on orbit coordinates.
pub fn gram_matrix(om: &OperatorMap) -> Result<CMatrix> {
    om.ensure_f_in_e()?;
    Ok(block_gram(om, |t, s| om.sg.mul(om.sg.star(t), s)))
}

/// `G_u[(t,j),(s,i)] = ⟨φ(t*·u*·u·s)e_i, e_j⟩`, the form `x ↦ ‖Φ(u)x‖²`.
pub fn shifted_gram(om: &OperatorMap, u: usize) -> Result<CMatrix> {
    om.ensure_f_in_e()?;
    om.check_element(u)?;
    let sg = &om.sg;
    let uu = sg.mul(sg.star(u), u);
    Ok(block_gram(om, |t, s| sg.mul(sg.star(t), sg.mul(uu, s))))
}

fn block_gram(om: &OperatorMap, element: impl Fn(usize, usize) -> usize) -> CMatrix {
    let k = om.dim_f;
    let n = om.sg.len();
    let mut g = CMatrix::zeros(n * k, n * k);
    for t in 0..n {
        for s in 0..n {
            let phi = &om.phi[element(t, s)];
            for j in 0..k {
                for i in 0..k {
                    g[(t * k + j, s * k + i)] = phi[(j, i)];
                }
            }
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositiveDefiniteReport {
    pub gram_size: usize,
    pub positive_definite: bool,
    /// Smallest eigenvalue of the Hermitian part of the Gram matrix.
    pub min_eigenvalue: f64,
    pub hermitian_residual: f64,
    pub threshold: f64,
}

/// Positive definiteness of `φ` on the basis-indexed block Gram matrix,
/// which suffices by sesquilinearity. A non-Hermitian Gram matrix means
/// `φ(s*) ≠ φ(s)*` and is reported as not positive definite.
pub fn check_positive_definite(om: &OperatorMap, tol: &Tolerance) -> Result<PositiveDefiniteReport> {
    let g = gram_matrix(om)?;
    let threshold = tol.threshold(&g);
    let hermitian_residual = numlin::hermitian_residual(&g);
    let min_eigenvalue = numlin::hermitian_eigen(&g)
        .values
        .first()
        .copied()
        .unwrap_or(0.0);
    Ok(PositiveDefiniteReport {
        gram_size: g.nrows(),
        positive_definite: hermitian_residual <= threshold && min_eigenvalue >= -threshold,
        min_eigenvalue,
        hermitian_residual,
        threshold,
    })
}

/// Choice of orthonormal coordinates on the quotient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuotientBasis {
    /// Gram eigenvectors in ascending eigenvalue order.
    #[default]
    Spectral,
    /// Spectral coordinates rotated by a seeded Haar unitary.
    Rotated { seed: u64 },
}

/// The quotient construction: `K = C^r` with `P: orbit coordinates → K`,
/// `P*P = G`, and the operators `Φ(u)`, `T`, `S` in those coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    gram: CMatrix,
    embed: CMatrix,
    embed_pinv: CMatrix,
    phi: Vec<CMatrix>,
    t: CMatrix,
    sop: CMatrix,
    tol: Tolerance,
    phi_leaks: Vec<f64>,
    s_leak: f64,
}

impl Dilation {
    pub fn rank(&self) -> usize {
        self.embed.nrows()
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// `P`, the `r × |S|·dim_f` map from orbit coordinates to `K`.
    pub fn embed(&self) -> &CMatrix {
        &self.embed
    }

    /// `Φ(u)` on `K`.
    pub fn phi(&self, u: usize) -> &CMatrix {
        &self.phi[u]
    }

    pub fn phis(&self) -> &[CMatrix] {
        &self.phi
    }

    /// `T: F → K`, `f ↦ φ_{1,f}`.
    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    /// `S: K → E`, `φ_{s,f} ↦ φ(s)f`.
    pub fn sop(&self) -> &CMatrix {
        &self.sop
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// `‖Φ(u)·P − P·L_u‖₂` per element, the numerical well-definedness
    /// certificate for `Φ(u)` on the quotient.
    pub fn phi_leaks(&self) -> &[f64] {
        &self.phi_leaks
    }

    /// `‖S·P − M‖₂`, the well-definedness certificate for `S`.
    pub fn s_leak(&self) -> f64 {
        self.s_leak
    }

    /// Image of an orbit vector in `K`.
    pub fn project(&self, om: &OperatorMap, x: &OrbitVector) -> Result<CVector> {
        Ok(&self.embed * x.coordinates(om)?)
    }
}

pub fn build_dilation(om: &OperatorMap, tol: &Tolerance) -> Result<Dilation> {
    build_dilation_with(om, tol, QuotientBasis::Spectral)
}

pub fn build_dilation_with(om: &OperatorMap, tol: &Tolerance, basis: QuotientBasis) -> Result<Dilation> {
    let pd = check_positive_definite(om, tol)?;
    if !pd.positive_definite {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: pd.min_eigenvalue,
        });
    }
    let gram = gram_matrix(om)?;
    let n = om.sg.len();
    let k = om.dim_f;
    let len = om.orbit_len();

    let eig = numlin::hermitian_eigen(&gram);
    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let thr = tol.threshold_for(scale);
    let kept: Vec<usize> = (0..len).filter(|&c| eig.values[c] > thr).collect();
    let r = kept.len();

    // P = Λ₊^{1/2} U₊*, P⁺ = U₊ Λ₊^{-1/2}
    let mut embed = CMatrix::from_fn(r, len, |row, col| {
        eig.vectors[(col, kept[row])].conj() * eig.values[kept[row]].sqrt()
    });
    let mut embed_pinv = CMatrix::from_fn(len, r, |row, col| {
        eig.vectors[(row, kept[col])] / eig.values[kept[col]].sqrt()
    });
    if let QuotientBasis::Rotated { seed } = basis {
        let w = sampling::haar_unitary(&mut sampling::rng(seed), r);
        embed = &w * embed;
        embed_pinv *= w.adjoint();
    }

    let leak_threshold = tol.threshold_for(scale.sqrt().max(1.0));
    let mut phi = Vec::with_capacity(n);
    let mut phi_leaks = Vec::with_capacity(n);
    for u in 0..n {
        // (P·L_u)[:, (s,i)] = P[:, (us,i)]
        let shifted = CMatrix::from_fn(r, len, |row, col| {
            embed[(row, om.sg.mul(u, col / k) * k + col % k)]
        });
        let phi_u = &shifted * &embed_pinv;
        let residual = numlin::spectral_norm(&(&phi_u * &embed - &shifted));
        if residual > leak_threshold {
            return Err(Error::QuotientLeak {
                element: u,
                residual,
                threshold: leak_threshold,
            });
        }
        phi.push(phi_u);
        phi_leaks.push(residual);
    }

    let unit = om.sg.unit();
    let t = embed.columns(unit * k, k).into_owned();

    let m = om.evaluation_matrix();
    let sop = &m * &embed_pinv;
    let s_leak = numlin::spectral_norm(&(&sop * &embed - &m));
    let s_threshold = tol.threshold_for(numlin::spectral_norm(&m).max(1.0));
    if s_leak > s_threshold {
        return Err(Error::QuotientLeak {
            element: unit,
            residual: s_leak,
            threshold: s_threshold,
        });
    }

    Ok(Dilation {
        gram,
        embed,
        embed_pinv,
        phi,
        t,
        sop,
        tol: *tol,
        phi_leaks,
        s_leak,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingCheck {
    /// `⟨φ(1)f, f⟩ = ‖f‖²` on `F`, so `T*T = I` is checked.
    Isometry { residual: f64 },
    /// `⟨φ(1)f, f⟩ ≤ c‖f‖²` on `F`, so `‖T‖² ≤ c` is checked.
    Bounded { c: f64, t_norm_sq: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationReport {
    pub rank: usize,
    pub gram_size: usize,
    /// `max ‖Φ(uv) − Φ(u)Φ(v)‖₂` over all pairs.
    pub homomorphism_residual: f64,
    /// `‖Φ(1) − I‖₂`.
    pub unit_residual: f64,
    /// `max ‖S·Φ(u)·T − φ(u)‖₂`.
    pub dilation_formula_residual: f64,
    /// Rank of `[Φ(u)·T]_u`; minimal when it equals `rank`.
    pub orbit_rank: usize,
    /// `‖I − Π‖₂` with `Π` the projector onto the span of `Φ(u)·T·e_i`.
    pub minimality_residual: f64,
    /// `max ‖Φ(u*) − Φ(u)*‖₂`.
    pub star_residual: f64,
    /// `‖S|_F − T*‖₂`, where `S|_F` keeps the rows of `S` along `F`.
    pub adjointness_residual: f64,
    pub embedding: EmbeddingCheck,
    pub max_phi_leak: f64,
    pub s_leak: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Checks homomorphism, unit, dilation formula, minimality, the
/// *-property, `S = T*` and the isometry/boundedness of `T`.
pub fn verify_dilation(dil: &Dilation, om: &OperatorMap, tol: &Tolerance) -> Result<DilationReport> {
    let n = om.sg.len();
    if dil.phi.len() != n || dil.t.ncols() != om.dim_f || dil.sop.nrows() != om.dim_e {
        return Err(Error::DimensionMismatch(
            "dilation was not built from this operator map".into(),
        ));
    }
    let r = dil.rank();
    let k = om.dim_f;
    let norm = |m: &CMatrix| numlin::spectral_norm(m);

    let mut homomorphism_residual = 0.0f64;
    for u in 0..n {
        for v in 0..n {
            let d = &dil.phi[om.sg.mul(u, v)] - &dil.phi[u] * &dil.phi[v];
            homomorphism_residual = homomorphism_residual.max(norm(&d));
        }
    }
    let unit_residual = norm(&(&dil.phi[om.sg.unit()] - numlin::identity(r)));

    let mut dilation_formula_residual = 0.0f64;
    let mut star_residual = 0.0f64;
    let mut orbit = CMatrix::zeros(r, n * k);
    for u in 0..n {
        let back = &dil.sop * &dil.phi[u] * &dil.t;
        dilation_formula_residual = dilation_formula_residual.max(norm(&(back - &om.phi[u])));
        let s = &dil.phi[om.sg.star(u)] - dil.phi[u].adjoint();
        star_residual = star_residual.max(norm(&s));
        orbit.columns_mut(u * k, k).copy_from(&(&dil.phi[u] * &dil.t));
    }
    let orbit_span = numlin::range_basis(&orbit, tol);
    let orbit_rank = orbit_span.rank();
    let minimality_residual = norm(&(numlin::identity(r) - orbit_span.projector()));

    let s_on_f = dil.sop.rows(0, k).into_owned();
    let adjointness_residual = norm(&(s_on_f - dil.t.adjoint()));

    let scale = dil
        .phi
        .iter()
        .map(|p| norm(p).powi(2))
        .fold(norm(&dil.gram), f64::max)
        .max(1.0);
    let threshold = tol.threshold_for(scale);

    let unit_block = om.phi[om.sg.unit()].rows(0, k).into_owned();
    let t_gram = dil.t.adjoint() * &dil.t;
    let embedding = if norm(&(&unit_block - numlin::identity(k))) <= threshold {
        EmbeddingCheck::Isometry {
            residual: norm(&(t_gram - numlin::identity(k))),
        }
    } else {
        let c = numlin::hermitian_eigen(&unit_block)
            .values
            .last()
            .copied()
            .unwrap_or(0.0);
        EmbeddingCheck::Bounded {
            c,
            t_norm_sq: norm(&dil.t).powi(2),
        }
    };
    let embedding_ok = match &embedding {
        EmbeddingCheck::Isometry { residual } => *residual <= threshold,
        EmbeddingCheck::Bounded { c, t_norm_sq } => *t_norm_sq <= c + threshold,
    };

    let max_phi_leak = dil.phi_leaks.iter().copied().fold(0.0, f64::max);
    let passed = homomorphism_residual <= threshold
        && unit_residual <= threshold
        && dilation_formula_residual <= threshold
        && orbit_rank == r
        && star_residual <= threshold
        && adjointness_residual <= threshold
        && embedding_ok;
    Ok(DilationReport {
        rank: r,
        gram_size: dil.gram.nrows(),
        homomorphism_residual,
        unit_residual,
        dilation_formula_residual,
        orbit_rank,
        minimality_residual,
        star_residual,
        adjointness_residual,
        embedding,
        max_phi_leak,
        s_leak: dil.s_leak,
        threshold,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundednessEntry {
    pub element: usize,
    pub label: String,
    /// Smallest `c(u)` with `G_u ≼ c(u)·G`.
    pub c: f64,
    pub phi_norm_sq: f64,
    pub passed: bool,
}

/// `c(u)` for one element, with the check `‖Φ(u)‖² ≤ c(u) + tol`.
pub fn boundedness_constant(
    dil: &Dilation,
    om: &OperatorMap,
    u: usize,
    tol: &Tolerance,
) -> Result<BoundednessEntry> {
    let gu = shifted_gram(om, u)?;
    let c = numlin::max_generalized_eigenvalue(&gu, &dil.gram, tol)?;
    let phi_norm_sq = numlin::spectral_norm(&dil.phi[u]).powi(2);
    let passed = phi_norm_sq <= c + tol.threshold_for(c.max(1.0));
    Ok(BoundednessEntry {
        element: u,
        label: om.sg.label(u),
        c,
        phi_norm_sq,
        passed,
    })
}

pub fn boundedness_table(dil: &Dilation, om: &OperatorMap, tol: &Tolerance) -> Result<Vec<BoundednessEntry>> {
    (0..om.sg.len())
        .map(|u| boundedness_constant(dil, om, u, tol))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntertwinerReport {
    /// `max(‖W*W − I‖₂, ‖WW* − I‖₂)`.
    pub unitarity_residual: f64,
    /// `max_u ‖W·Φ_a(u) − Φ_b(u)·W‖₂`.
    pub intertwining_residual: f64,
    /// `‖W·T_a − T_b‖₂`.
    pub embedding_residual: f64,
}

impl IntertwinerReport {
    pub fn max_residual(&self) -> f64 {
        self.unitarity_residual
            .max(self.intertwining_residual)
            .max(self.embedding_residual)
    }
}

/// Solves for the `W` carrying one minimal dilation `(Φ_a, T_a)` onto
/// another `(Φ_b, T_b)` through their orbits: `W·Φ_a(u)·T_a = Φ_b(u)·T_b`.
pub fn intertwining_unitary(
    phi_a: &[CMatrix],
    t_a: &CMatrix,
    phi_b: &[CMatrix],
    t_b: &CMatrix,
    tol: &Tolerance,
) -> Result<(CMatrix, IntertwinerReport)> {
    if phi_a.len() != phi_b.len() || t_a.ncols() != t_b.ncols() {
        return Err(Error::DimensionMismatch(
            "dilations are over different semigroups or spaces".into(),
        ));
    }
    let (ra, rb) = (t_a.nrows(), t_b.nrows());
    if ra != rb {
        return Err(Error::DimensionMismatch(format!(
            "dilation spaces have dimensions {ra} and {rb}"
        )));
    }
    let orbit = |phis: &[CMatrix], t: &CMatrix| {
        let k = t.ncols();
        let mut m = CMatrix::zeros(t.nrows(), phis.len() * k);
        for (u, p) in phis.iter().enumerate() {
            m.columns_mut(u * k, k).copy_from(&(p * t));
        }
        m
    };
    let oa = orbit(phi_a, t_a);
    let ob = orbit(phi_b, t_b);
    let w = &ob * numlin::pinv(&oa, tol);
    let id = numlin::identity(ra);
    let norm = |m: &CMatrix| numlin::spectral_norm(m);
    let unitarity_residual = norm(&(w.adjoint() * &w - &id)).max(norm(&(&w * w.adjoint() - &id)));
    let intertwining_residual = phi_a
        .iter()
        .zip(phi_b)
        .map(|(a, b)| norm(&(&w * a - b * &w)))
        .fold(0.0, f64::max);
    let embedding_residual = norm(&(&w * t_a - t_b));
    Ok((
        w,
        IntertwinerReport {
            unitarity_residual,
            intertwining_residual,
            embedding_residual,
        },
    ))
}

/// [`intertwining_unitary`] between two dilations of the same map.
pub fn compare_dilations(a: &Dilation, b: &Dilation, tol: &Tolerance) -> Result<IntertwinerReport> {
    intertwining_unitary(&a.phi, &a.t, &b.phi, &b.t, tol).map(|(_, r)| r)
}
