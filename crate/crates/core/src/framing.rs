//! Framings `(g_n, h_n)` in `C^d`: the reconstruction `f = Σ⟨f, g_n⟩ h_n`,
//! its maximal space `F_max`, rescaling, and framings generated by operator
//! pairs `(A g_n, B h_n)`.
//!
//! In finite dimension `F_max` is the fixed space of the synthesis matrix
//! `S = Σ h_n g_n*`, every operator is bounded, and weak and norm
//! convergence coincide. Unconditional convergence is probed with random
//! rearrangements and random subseries of the partial sums.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{self, CMatrix, CVector, Tolerance};
use crate::sampling;
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FramingJson", into = "FramingJson")]
pub struct Framing {
    dim: usize,
    g: Vec<CVector>,
    h: Vec<CVector>,
}

impl Framing {
    pub fn new(dim: usize, g: Vec<CVector>, h: Vec<CVector>) -> Result<Self> {
        if g.is_empty() {
            return Err(Error::Shape("a framing needs at least one pair".into()));
        }
        if g.len() != h.len() {
            return Err(Error::DimensionMismatch(format!(
                "g has {} vectors but h has {}",
                g.len(),
                h.len()
            )));
        }
        for (name, seq) in [("g", &g), ("h", &h)] {
            for (n, v) in seq.iter().enumerate() {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "{name}[{n}] has length {} but dim is {dim}",
                        v.len()
                    )));
                }
                if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite(format!("{name}[{n}]")));
                }
            }
        }
        Ok(Self { dim, g, h })
    }

    /// Builds a framing from the columns of two `d × N` matrices.
    pub fn from_matrices(g: &CMatrix, h: &CMatrix) -> Result<Self> {
        if g.shape() != h.shape() {
            return Err(Error::DimensionMismatch(format!(
                "g is {}x{} but h is {}x{}",
                g.nrows(),
                g.ncols(),
                h.nrows(),
                h.ncols()
            )));
        }
        let cols = |m: &CMatrix| m.column_iter().map(|c| c.into_owned()).collect();
        Self::new(g.nrows(), cols(g), cols(h))
    }

    /// The orthonormal basis framing `g = h = {e_0, …, e_{d−1}}`.
    pub fn orthonormal_basis(dim: usize) -> Self {
        let e: Vec<CVector> = (0..dim).map(|k| numlin::basis_vector(dim, k)).collect();
        Self::new(dim, e.clone(), e).expect("well-formed")
    }

    /// Unit vectors `u_n` at 90°, 210° and 330° in the real plane of `C²`,
    /// with `h_n = u_n` and `g_n = (2/3)·u_n`.
    pub fn mercedes() -> Self {
        let u = mercedes_vectors();
        let g = u.iter().map(|v| v.map(|z| z * (2.0 / 3.0))).collect();
        Self::new(2, g, u).expect("well-formed")
    }

    /// The Mercedes frame in its self-dual form `g_n = h_n = √(2/3)·u_n`.
    pub fn mercedes_self_dual() -> Self {
        let s = (2.0f64 / 3.0).sqrt();
        let v: Vec<CVector> = mercedes_vectors().iter().map(|u| u.map(|z| z * s)).collect();
        Self::new(2, v.clone(), v).expect("well-formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn g(&self) -> &[CVector] {
        &self.g
    }

    pub fn h(&self) -> &[CVector] {
        &self.h
    }

    /// `d × N` matrix with columns `g_n`.
    pub fn g_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.g)
    }

    pub fn h_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.h)
    }

    /// Simultaneous permutation: pair `n` of the result is pair `perm[n]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        for &p in perm {
            if p >= self.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Shape(format!(
                    "not a permutation of 0..{}",
                    self.len()
                )));
            }
        }
        if perm.len() != self.len() {
            return Err(Error::Shape(format!("not a permutation of 0..{}", self.len())));
        }
        Self::new(
            self.dim,
            perm.iter().map(|&p| self.g[p].clone()).collect(),
            perm.iter().map(|&p| self.h[p].clone()).collect(),
        )
    }

    /// Sum over all pairs of `|⟨f, g_n⟩|·‖h_n‖`, an a priori bound on every
    /// partial sum of every subseries.
    fn absolute_bound(&self, f: &CVector) -> f64 {
        self.g
            .iter()
            .zip(&self.h)
            .map(|(g, h)| g.dotc(f).norm() * h.norm())
            .sum()
    }

    fn round_off_scale(&self) -> f64 {
        self.g
            .iter()
            .zip(&self.h)
            .map(|(g, h)| g.norm() * h.norm())
            .sum::<f64>()
            .max(1.0)
    }
}

fn mercedes_vectors() -> Vec<CVector> {
    [90.0f64, 210.0, 330.0]
        .iter()
        .map(|deg| {
            let t = deg.to_radians();
            CVector::from_vec(vec![
                Complex64::new(t.cos(), 0.0),
                Complex64::new(t.sin(), 0.0),
            ])
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FramingJson {
    dim: usize,
    g: Vec<Vec<Complex64>>,
    h: Vec<Vec<Complex64>>,
}

impl TryFrom<FramingJson> for Framing {
    type Error = Error;

    fn try_from(raw: FramingJson) -> Result<Self> {
        let conv = |vs: Vec<Vec<Complex64>>| vs.into_iter().map(CVector::from_vec).collect();
        Framing::new(raw.dim, conv(raw.g), conv(raw.h))
    }
}

impl From<Framing> for FramingJson {
    fn from(fr: Framing) -> Self {
        let conv = |vs: Vec<CVector>| vs.into_iter().map(|v| v.iter().copied().collect()).collect();
        FramingJson {
            dim: fr.dim,
            g: conv(fr.g),
            h: conv(fr.h),
        }
    }
}

/// Coefficient `⟨f, g⟩ = g* f`, linear in `f`.
fn inner(f: &CVector, g: &CVector) -> Complex64 {
    g.dotc(f)
}

/// `Σ_n h_n g_n*`, the matrix of `f ↦ Σ⟨f, g_n⟩ h_n`.
pub fn synthesis_operator(fr: &Framing) -> CMatrix {
    fr.g.iter()
        .zip(&fr.h)
        .fold(CMatrix::zeros(fr.dim, fr.dim), |acc, (g, h)| {
            acc + numlin::rank_one(g, h)
        })
}

/// `F_max = ker(S − I)`.
pub fn compute_fmax(fr: &Framing, tol: &Tolerance) -> Subspace {
    let s = synthesis_operator(fr);
    numlin::nullspace(&(s - numlin::identity(fr.dim)), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructionReport {
    pub seed: u64,
    pub trials: usize,
    pub subspace_dim: usize,
    /// Largest `‖Σ_n⟨f, g_π(n)⟩h_π(n) − f‖` over trials, for unit `f`.
    pub max_terminal_error: f64,
    pub max_partial_sum_norm: f64,
    pub max_subseries_norm: f64,
    /// Largest `Σ_n |⟨f, g_n⟩|·‖h_n‖` over the sampled `f`.
    pub subseries_bound: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Random unit vectors of `F` are reconstructed along `trials` random
/// rearrangements; each trial also sums a random subseries in the same
/// order and records the largest partial-sum norm.
pub fn verify_reconstruction(
    fr: &Framing,
    space: &Subspace,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<ReconstructionReport> {
    if space.ambient_dim() != fr.dim {
        return Err(Error::DimensionMismatch(format!(
            "subspace lives in C^{} but the framing in C^{}",
            space.ambient_dim(),
            fr.dim
        )));
    }
    if trials == 0 {
        return Err(Error::Shape("at least one trial is required".into()));
    }
    let threshold = tol.threshold_for(fr.round_off_scale());
    let mut report = ReconstructionReport {
        seed,
        trials,
        subspace_dim: space.rank(),
        max_terminal_error: 0.0,
        max_partial_sum_norm: 0.0,
        max_subseries_norm: 0.0,
        subseries_bound: 0.0,
        threshold,
        passed: true,
    };
    if space.is_zero() {
        return Ok(report);
    }
    let mut rng = sampling::rng(seed);
    for _ in 0..trials {
        let coeffs = sampling::gaussian_vector(&mut rng, space.rank());
        let mut f = space.basis() * coeffs;
        f /= Complex64::new(f.norm(), 0.0);
        let perm = sampling::permutation(&mut rng, fr.len());
        let keep: Vec<bool> = (0..fr.len()).map(|_| rand::Rng::random(&mut rng)).collect();

        let mut partial = CVector::zeros(fr.dim);
        let mut sub = CVector::zeros(fr.dim);
        for &n in &perm {
            let term = fr.h[n].map(|z| z * inner(&f, &fr.g[n]));
            partial += &term;
            report.max_partial_sum_norm = report.max_partial_sum_norm.max(partial.norm());
            if keep[n] {
                sub += &term;
                report.max_subseries_norm = report.max_subseries_norm.max(sub.norm());
            }
        }
        report.max_terminal_error = report.max_terminal_error.max((partial - &f).norm());
        report.subseries_bound = report.subseries_bound.max(fr.absolute_bound(&f));
    }
    report.passed = report.max_terminal_error <= threshold
        && report.max_subseries_norm <= report.subseries_bound * (1.0 + 1e-12) + threshold;
    Ok(report)
}

/// `(β_n g_n, α_n h_n)`, provided `α_n·conj(β_n) = 1` for every `n`.
pub fn rescale(
    fr: &Framing,
    alpha: &[Complex64],
    beta: &[Complex64],
    tol: &Tolerance,
) -> Result<Framing> {
    if alpha.len() != fr.len() || beta.len() != fr.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} pairs but {} alphas and {} betas",
            fr.len(),
            alpha.len(),
            beta.len()
        )));
    }
    let slack = tol.threshold_for(1.0);
    for (index, (a, b)) in alpha.iter().zip(beta).enumerate() {
        let product = a * b.conj();
        if (product - numlin::C_ONE).norm() > slack {
            return Err(Error::RescaleViolation { index, product });
        }
    }
    Framing::new(
        fr.dim,
        fr.g.iter().zip(beta).map(|(g, b)| g.map(|z| z * b)).collect(),
        fr.h.iter().zip(alpha).map(|(h, a)| h.map(|z| z * a)).collect(),
    )
}

/// Operators `A`, `B` together with a nonzero space `F` on which
/// `B·A* = I` and `A*F ⊆ F_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPair {
    a: CMatrix,
    b: CMatrix,
    space: Subspace,
    fmax: Subspace,
    condition1_residual: f64,
    condition2_distance: f64,
}

impl GeneratorPair {
    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    /// `F_max` of the framing the pair was validated against.
    pub fn fmax(&self) -> &Subspace {
        &self.fmax
    }

    /// `‖(B·A* − I)·Q_F‖₂`.
    pub fn condition1_residual(&self) -> f64 {
        self.condition1_residual
    }

    /// `‖(I − P_Fmax)·A*·Q_F‖₂`.
    pub fn condition2_distance(&self) -> f64 {
        self.condition2_distance
    }
}

fn ensure_operator(m: &CMatrix, dim: usize, name: &str) -> Result<()> {
    if m.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{} but the framing lives in C^{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    numlin::ensure_finite(m, name)
}

pub fn check_generator_pair(
    fr: &Framing,
    a: &CMatrix,
    b: &CMatrix,
    space: &Subspace,
    tol: &Tolerance,
) -> Result<GeneratorPair> {
    ensure_operator(a, fr.dim, "A")?;
    ensure_operator(b, fr.dim, "B")?;
    if space.ambient_dim() != fr.dim {
        return Err(Error::DimensionMismatch(format!(
            "F lives in C^{} but the framing in C^{}",
            space.ambient_dim(),
            fr.dim
        )));
    }
    if space.is_zero() {
        return Err(Error::ZeroF);
    }
    let a_adj = a.adjoint();
    let q = space.basis();
    let norm_a = numlin::spectral_norm(a);

    let defect = (b * &a_adj - numlin::identity(fr.dim)) * q;
    let condition1_residual = numlin::spectral_norm(&defect);
    let threshold = tol.threshold_for((numlin::spectral_norm(b) * norm_a).max(1.0));
    if condition1_residual > threshold {
        return Err(Error::Condition1Violation {
            residual: condition1_residual,
            threshold,
        });
    }

    let fmax = compute_fmax(fr, tol);
    let condition2_distance = fmax.distance_of(&(&a_adj * q));
    let threshold = tol.threshold_for(norm_a.max(1.0));
    if condition2_distance > threshold {
        return Err(Error::Condition2Violation {
            distance: condition2_distance,
            threshold,
        });
    }

    Ok(GeneratorPair {
        a: a.clone(),
        b: b.clone(),
        space: space.clone(),
        fmax,
        condition1_residual,
        condition2_distance,
    })
}

/// Largest `F ⊆ F_max` with `B·A* = I` on `F` and `A*F ⊆ F_max`: the kernel
/// of `[B·A* − I; (I − P)·A*; I − P]` with `P` the projector onto `F_max`.
pub fn maximal_generator_space(
    fr: &Framing,
    a: &CMatrix,
    b: &CMatrix,
    tol: &Tolerance,
) -> Result<Subspace> {
    ensure_operator(a, fr.dim, "A")?;
    ensure_operator(b, fr.dim, "B")?;
    let d = fr.dim;
    let outside = numlin::identity(d) - compute_fmax(fr, tol).projector();
    let a_adj = a.adjoint();
    let mut stacked = CMatrix::zeros(3 * d, d);
    stacked
        .rows_mut(0, d)
        .copy_from(&(b * &a_adj - numlin::identity(d)));
    stacked.rows_mut(d, d).copy_from(&(&outside * &a_adj));
    stacked.rows_mut(2 * d, d).copy_from(&outside);
    Ok(numlin::nullspace(&stacked, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationReport {
    pub space_dim: usize,
    pub new_fmax_dim: usize,
    /// `‖(I − P_new)·Q_F‖₂` where `P_new` projects onto the generated
    /// framing's `F_max`.
    pub containment_distance: f64,
    /// Largest `‖Σ_n⟨A*f, g_n⟩·B h_n − f‖` over a basis of `F`.
    pub soundness_residual: f64,
    pub threshold: f64,
    pub reconstruction: ReconstructionReport,
    pub passed: bool,
}

/// `(A g_n, B h_n)` and a report confirming it is a framing for `F`.
pub fn generate_framing(
    gp: &GeneratorPair,
    fr: &Framing,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<(Framing, GenerationReport)> {
    ensure_operator(&gp.a, fr.dim, "A")?;
    let generated = Framing::new(
        fr.dim,
        fr.g.iter().map(|g| &gp.a * g).collect(),
        fr.h.iter().map(|h| &gp.b * h).collect(),
    )?;
    let new_fmax = compute_fmax(&generated, tol);
    let q = gp.space.basis();
    let containment_distance = new_fmax.distance_of(q);

    let a_adj = gp.a.adjoint();
    let mut soundness_residual = 0.0f64;
    for f in q.column_iter() {
        let f = f.into_owned();
        let af = &a_adj * &f;
        let mut sum = CVector::zeros(fr.dim);
        for (g, h) in fr.g.iter().zip(&fr.h) {
            sum += (&gp.b * h).map(|z| z * inner(&af, g));
        }
        soundness_residual = soundness_residual.max((sum - f).norm());
    }

    let reconstruction = verify_reconstruction(&generated, &gp.space, trials, seed, tol)?;
    let threshold = tol.threshold_for(generated.round_off_scale());
    let passed = containment_distance <= threshold
        && soundness_residual <= threshold
        && reconstruction.passed;
    let report = GenerationReport {
        space_dim: gp.space.rank(),
        new_fmax_dim: new_fmax.rank(),
        containment_distance,
        soundness_residual,
        threshold,
        reconstruction,
        passed,
    };
    Ok((generated, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualReport {
    pub space_dim: usize,
    pub space: Option<Subspace>,
    pub framing: Option<Framing>,
    pub generation: Option<GenerationReport>,
    pub failure: Option<String>,
    pub passed: bool,
}

/// Swaps the roles of `A` and `B`: finds the largest `F' ⊆ F_max` with
/// `A·B* = I` on `F'` and `B*F' ⊆ F_max`, then generates `(B g_n, A h_n)`.
/// Failure is reported, not returned as an error.
pub fn dual_framing(
    gp: &GeneratorPair,
    fr: &Framing,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> DualReport {
    let failed = |space_dim, space, msg: String| DualReport {
        space_dim,
        space,
        framing: None,
        generation: None,
        failure: Some(msg),
        passed: false,
    };
    let space = match maximal_generator_space(fr, &gp.b, &gp.a, tol) {
        Ok(s) => s,
        Err(e) => return failed(0, None, e.to_string()),
    };
    if space.is_zero() {
        return failed(
            0,
            Some(space),
            "no nonzero subspace of F_max has A·B* = I and B*F' ⊆ F_max".into(),
        );
    }
    let swapped = match check_generator_pair(fr, &gp.b, &gp.a, &space, tol) {
        Ok(p) => p,
        Err(e) => return failed(space.rank(), Some(space), e.to_string()),
    };
    match generate_framing(&swapped, fr, trials, seed, tol) {
        Ok((framing, report)) => DualReport {
            space_dim: space.rank(),
            space: Some(space),
            framing: Some(framing),
            passed: report.passed,
            generation: Some(report),
            failure: None,
        },
        Err(e) => failed(space.rank(), Some(space), e.to_string()),
    }
}
