//! Operator-valued measures attached to a framing:
//! `F(σ) = Σ_{i∈σ} h_i g_i*` for index sets `σ`.
//!
//! Matrices are total on `C^d`; restrictions to `F_max` or `F` happen in the
//! checks only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::{self, Framing, GeneratorPair};
use crate::naimark::Povm;
use crate::numlin::{self, CMatrix, Tolerance};
use crate::sampling;

/// Exhaustive subset enumeration is used up to this many indices.
pub const MAX_EXHAUSTIVE_INDICES: usize = 12;
/// Number of random subsets drawn beyond the exhaustive limit.
pub const SAMPLED_SUBSETS: usize = 1 << 12;

/// The rank-one operator `f ↦ ⟨f, g⟩·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOne {
    pub g: numlin::CVector,
    pub h: numlin::CVector,
}

impl RankOne {
    pub fn matrix(&self) -> CMatrix {
        numlin::rank_one(&self.g, &self.h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FramingOvm {
    framing: Framing,
}

impl FramingOvm {
    pub fn new(framing: Framing) -> Self {
        Self { framing }
    }

    pub fn framing(&self) -> &Framing {
        &self.framing
    }

    pub fn len(&self) -> usize {
        self.framing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.framing.is_empty()
    }

    pub fn atom(&self, i: usize) -> Result<RankOne> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(RankOne {
            g: self.framing.g()[i].clone(),
            h: self.framing.h()[i].clone(),
        })
    }
}

/// `F(σ)`, summed in the order the indices are listed. Repeated indices
/// count once.
pub fn ovm_eval(m: &FramingOvm, sigma: &[usize]) -> Result<CMatrix> {
    let d = m.framing.dim();
    let mut seen = vec![false; m.len()];
    let mut out = CMatrix::zeros(d, d);
    for &i in sigma {
        if i >= m.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: m.len(),
            });
        }
        if !std::mem::replace(&mut seen[i], true) {
            out += m.atom(i)?.matrix();
        }
    }
    Ok(out)
}

fn full_index(m: &FramingOvm) -> Vec<usize> {
    (0..m.len()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TotalReport {
    pub dim: usize,
    pub fmax_dim: usize,
    /// `‖(F(all) − I)·Q_Fmax‖₂`.
    pub residual_on_fmax: f64,
    /// `‖F(all) − I‖₂`.
    pub identity_defect: f64,
    pub equal_on_whole_space: bool,
    /// `F(all) ⊂ I` holds only on a proper subspace.
    pub proper: bool,
    pub threshold: f64,
    pub passed: bool,
}

/// Checks `F(all)·f = f` on a basis of `F_max` and whether the equality
/// extends to all of `C^d`.
pub fn ovm_total_check(m: &FramingOvm, tol: &Tolerance) -> TotalReport {
    let d = m.framing.dim();
    let total = ovm_eval(m, &full_index(m)).expect("indices in range");
    let defect = total - numlin::identity(d);
    let fmax = framing::compute_fmax(&m.framing, tol);
    let residual_on_fmax = numlin::spectral_norm(&(&defect * fmax.basis()));
    let identity_defect = numlin::spectral_norm(&defect);
    let threshold = tol.threshold_for(1.0);
    let equal_on_whole_space = identity_defect <= threshold;
    TotalReport {
        dim: d,
        fmax_dim: fmax.rank(),
        residual_on_fmax,
        identity_defect,
        equal_on_whole_space,
        proper: !equal_on_whole_space,
        threshold,
        passed: residual_on_fmax <= threshold,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformReport {
    pub subsets_checked: usize,
    pub exhaustive: bool,
    /// Largest `‖(F_{A,B}(σ) − B·F(σ)·A*)·Q_F‖₂`.
    pub max_residual: f64,
    /// Sorted index list attaining `max_residual`.
    pub worst_subset: Vec<usize>,
    /// Largest `‖offdiag(B·F(σ)·A*)‖_F / ‖B·F(σ)·A*‖_F`; informational.
    pub max_offdiagonal_fraction: f64,
    pub seed: u64,
    pub threshold: f64,
    pub passed: bool,
}

fn subsets(n: usize, seed: u64) -> (Vec<Vec<usize>>, bool) {
    if n <= MAX_EXHAUSTIVE_INDICES {
        let all = (0u32..1 << n)
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
            .collect();
        (all, true)
    } else {
        let mut rng = sampling::rng(seed);
        let drawn = (0..SAMPLED_SUBSETS)
            .map(|_| sampling::subset(&mut rng, n))
            .collect();
        (drawn, false)
    }
}

fn offdiagonal_fraction(m: &CMatrix) -> f64 {
    let total = m.norm();
    if total == 0.0 {
        return 0.0;
    }
    let off: f64 = m
        .iter()
        .enumerate()
        .filter(|(k, _)| k % m.nrows() != k / m.nrows())
        .map(|(_, z)| z.norm_sqr())
        .sum();
    off.sqrt() / total
}

/// Verifies `F_{A,B}(σ) = B·F(σ)·A*` on `F` over all subsets (up to
/// [`MAX_EXHAUSTIVE_INDICES`] indices) or a seeded random family.
pub fn ovm_transform_check(
    m: &FramingOvm,
    gp: &GeneratorPair,
    seed: u64,
    tol: &Tolerance,
) -> Result<TransformReport> {
    let fr = &m.framing;
    let d = fr.dim();
    if gp.a().nrows() != d {
        return Err(Error::DimensionMismatch(format!(
            "generator pair acts on C^{} but the framing lives in C^{d}",
            gp.a().nrows()
        )));
    }
    let generated = FramingOvm::new(Framing::new(
        d,
        fr.g().iter().map(|g| gp.a() * g).collect(),
        fr.h().iter().map(|h| gp.b() * h).collect(),
    )?);
    let q = gp.space().basis();
    let a_adj = gp.a().adjoint();
    let (family, exhaustive) = subsets(fr.len(), seed);

    let mut max_residual = 0.0f64;
    let mut worst_subset = Vec::new();
    let mut max_offdiagonal_fraction = 0.0f64;
    for sigma in &family {
        let lhs = ovm_eval(&generated, sigma)?;
        let rhs = gp.b() * ovm_eval(m, sigma)? * &a_adj;
        let residual = numlin::spectral_norm(&((lhs - &rhs) * q));
        if residual > max_residual {
            max_residual = residual;
            worst_subset = sigma.clone();
        }
        max_offdiagonal_fraction = max_offdiagonal_fraction.max(offdiagonal_fraction(&rhs));
    }
    let scale = numlin::spectral_norm(gp.a())
        * numlin::spectral_norm(gp.b())
        * fr.g()
            .iter()
            .zip(fr.h())
            .map(|(g, h)| g.norm() * h.norm())
            .sum::<f64>();
    let threshold = tol.threshold_for(scale.max(1.0));
    Ok(TransformReport {
        subsets_checked: family.len(),
        exhaustive,
        max_residual,
        worst_subset,
        max_offdiagonal_fraction,
        seed,
        threshold,
        passed: max_residual <= threshold,
    })
}

/// Outcome of [`framing_to_povm`].
#[derive(Debug, Clone, PartialEq)]
pub enum PovmConversion {
    Accepted(Povm),
    Rejected { atom: Option<usize>, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmConversionReport {
    pub accepted: bool,
    pub atoms: usize,
    pub failing_atom: Option<usize>,
    pub reason: Option<String>,
    /// `‖I − Σ E_i‖₂` when accepted.
    pub normalization_defect: Option<f64>,
}

impl PovmConversion {
    pub fn report(&self) -> PovmConversionReport {
        match self {
            PovmConversion::Accepted(p) => PovmConversionReport {
                accepted: true,
                atoms: p.atoms().len(),
                failing_atom: None,
                reason: None,
                normalization_defect: Some(p.normalization_defect()),
            },
            PovmConversion::Rejected { atom, reason } => PovmConversionReport {
                accepted: false,
                atoms: 0,
                failing_atom: *atom,
                reason: Some(reason.clone()),
                normalization_defect: None,
            },
        }
    }
}

/// Packages the atoms `h_i g_i*` as a POVM when each is Hermitian PSD and
/// their total is Hermitian; otherwise names the first failing atom.
pub fn framing_to_povm(m: &FramingOvm, tol: &Tolerance) -> PovmConversion {
    let d = m.framing.dim();
    let mut atoms = Vec::with_capacity(m.len());
    for i in 0..m.len() {
        let e = m.atom(i).expect("in range").matrix();
        let thr = tol.threshold(&e);
        let residual = numlin::hermitian_residual(&e);
        if residual > thr {
            return PovmConversion::Rejected {
                atom: Some(i),
                reason: format!("atom {i} is not Hermitian (‖E − E*‖ = {residual:e})"),
            };
        }
        match numlin::psd_check(&e, tol) {
            Ok(c) if c.is_psd => {}
            Ok(c) => {
                return PovmConversion::Rejected {
                    atom: Some(i),
                    reason: format!(
                        "atom {i} is not positive semidefinite (minimum eigenvalue {:e})",
                        c.min_eigenvalue
                    ),
                }
            }
            Err(e) => {
                return PovmConversion::Rejected {
                    atom: Some(i),
                    reason: e.to_string(),
                }
            }
        }
        atoms.push(numlin::hermitian_part(&e));
    }
    let total = ovm_eval(m, &full_index(m)).expect("indices in range");
    let residual = numlin::hermitian_residual(&total);
    if residual > tol.threshold(&total) {
        return PovmConversion::Rejected {
            atom: None,
            reason: format!("total F(all) is not Hermitian (‖T − T*‖ = {residual:e})"),
        };
    }
    match Povm::new(d, atoms, tol) {
        Ok(p) => PovmConversion::Accepted(p),
        Err(e) => PovmConversion::Rejected {
            atom: None,
            reason: e.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::check_generator_pair;
    use crate::numlin::{basis_vector, real_diag};
    use crate::subspace::Subspace;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn eval_examples() {
        let m = FramingOvm::new(Framing::orthonormal_basis(2));
        assert_eq!(ovm_eval(&m, &[0]).unwrap(), real_diag(&[1.0, 0.0]));
        assert_eq!(ovm_eval(&m, &[]).unwrap(), CMatrix::zeros(2, 2));
        let merc = FramingOvm::new(Framing::mercedes());
        let full = ovm_eval(&merc, &[0, 1, 2]).unwrap();
        assert!((full - framing::synthesis_operator(merc.framing())).norm() < 1e-15);
        assert!((ovm_eval(&merc, &[2, 0, 1]).unwrap() - numlin::identity(2)).norm() < 1e-15);
        assert!(matches!(
            ovm_eval(&m, &[0, 5]),
            Err(Error::IndexOutOfRange { index: 5, len: 2 })
        ));
    }

    #[test]
    fn total_examples() {
        let r = ovm_total_check(&FramingOvm::new(Framing::orthonormal_basis(2)), &tol());
        assert!(r.passed && r.equal_on_whole_space && !r.proper);

        let e1 = Framing::new(2, vec![basis_vector(2, 0)], vec![basis_vector(2, 0)]).unwrap();
        let r = ovm_total_check(&FramingOvm::new(e1), &tol());
        assert!(r.passed && r.proper && !r.equal_on_whole_space);
        assert_eq!(r.fmax_dim, 1);

        let r = ovm_total_check(&FramingOvm::new(Framing::mercedes()), &tol());
        assert!(r.passed && r.equal_on_whole_space);
    }

    #[test]
    fn transform_examples() {
        let onb = Framing::orthonormal_basis(2);
        let m = FramingOvm::new(onb.clone());
        let id = numlin::identity(2);
        let gp = check_generator_pair(&onb, &id, &id, &Subspace::full(2), &tol()).unwrap();
        let r = ovm_transform_check(&m, &gp, 0, &tol()).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.subsets_checked, 4);

        let a = real_diag(&[1.0, 2.0]);
        let b = real_diag(&[1.0, 0.5]);
        let gp = check_generator_pair(&onb, &a, &b, &Subspace::full(2), &tol()).unwrap();
        // By hand: (B e2)(A e2)* = (e2/2)(2 e2)* = e2 e2*, and B·e2e2*·A* = e2 e2*.
        let e22 = real_diag(&[0.0, 1.0]);
        let generated = FramingOvm::new(
            Framing::new(2, onb.g().iter().map(|g| &a * g).collect(), onb.h().iter().map(|h| &b * h).collect()).unwrap(),
        );
        assert!((ovm_eval(&generated, &[1]).unwrap() - &e22).norm() < 1e-15);
        assert!((&b * ovm_eval(&m, &[1]).unwrap() * a.adjoint() - &e22).norm() < 1e-15);
        let r = ovm_transform_check(&m, &gp, 0, &tol()).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn transform_on_random_framing_all_subsets() {
        let mut rng = sampling::rng(2024);
        let fr = sampling::framing_with_fixed_space(&mut rng, 4, 6, 4);
        let a = sampling::invertible_diagonal(&mut rng, 4);
        let b = numlin::pinv(&a.adjoint(), &tol());
        let gp = check_generator_pair(&fr, &a, &b, &Subspace::full(4), &tol()).unwrap();
        let m = FramingOvm::new(fr.clone());
        let r = ovm_transform_check(&m, &gp, 0, &tol()).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.subsets_checked, 64);
        assert!(r.passed, "{r:?}");
        // Brute force: rebuild both sides from scratch for every subset.
        for mask in 0u32..64 {
            let mut lhs = CMatrix::zeros(4, 4);
            let mut mid = CMatrix::zeros(4, 4);
            for i in (0..6).filter(|i| mask >> i & 1 == 1) {
                lhs += (&b * &fr.h()[i]) * (&a * &fr.g()[i]).adjoint();
                mid += &fr.h()[i] * fr.g()[i].adjoint();
            }
            assert!((lhs - &b * mid * a.adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn povm_conversion_examples() {
        let conv = framing_to_povm(&FramingOvm::new(Framing::mercedes_self_dual()), &tol());
        match conv {
            PovmConversion::Accepted(p) => {
                assert_eq!(p.atoms().len(), 3);
                assert!((p.total() - numlin::identity(2)).norm() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        match framing_to_povm(&FramingOvm::new(Framing::orthonormal_basis(2)), &tol()) {
            PovmConversion::Accepted(p) => {
                assert_eq!(p.atoms()[1], real_diag(&[0.0, 1.0]));
            }
            other => panic!("{other:?}"),
        }
        let skew = Framing::new(2, vec![basis_vector(2, 0)], vec![basis_vector(2, 1)]).unwrap();
        let r = framing_to_povm(&FramingOvm::new(skew), &tol()).report();
        assert!(!r.accepted);
        assert_eq!(r.failing_atom, Some(0));
    }

    #[test]
    fn negative_atom_rejected() {
        let fr = Framing::new(1, vec![basis_vector(1, 0)], vec![basis_vector(1, 0).map(|z| -z)]).unwrap();
        let r = framing_to_povm(&FramingOvm::new(fr), &tol()).report();
        assert!(!r.accepted);
        assert!(r.reason.unwrap().contains("positive semidefinite"));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn finite_additivity(seed in any::<u64>(), d in 1usize..5, n in 1usize..11) {
                let mut rng = sampling::rng(seed);
                let m = FramingOvm::new(sampling::random_framing(&mut rng, d, n));
                let labels: Vec<u8> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0..3)).collect();
                let sigma: Vec<usize> = (0..n).filter(|&i| labels[i] == 1).collect();
                let tau: Vec<usize> = (0..n).filter(|&i| labels[i] == 2).collect();
                let union: Vec<usize> = (0..n).filter(|&i| labels[i] != 0).collect();
                let lhs = ovm_eval(&m, &union).unwrap();
                let rhs = ovm_eval(&m, &sigma).unwrap() + ovm_eval(&m, &tau).unwrap();
                prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + m.framing().g_matrix().norm() * m.framing().h_matrix().norm()));
            }

            #[test]
            fn enumeration_order_irrelevant(seed in any::<u64>(), d in 1usize..5, n in 1usize..11) {
                let mut rng = sampling::rng(seed);
                let m = FramingOvm::new(sampling::random_framing(&mut rng, d, n));
                let sigma = sampling::subset(&mut rng, n);
                let mut shuffled = sigma.clone();
                rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
                let a = ovm_eval(&m, &sigma).unwrap();
                let b = ovm_eval(&m, &shuffled).unwrap();
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + m.framing().g_matrix().norm() * m.framing().h_matrix().norm()));
            }
        }
    }
}
