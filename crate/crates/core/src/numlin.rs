//! Dense complex linear algebra shared by every other module.
//!
//! Rank decisions always go through singular values. Hermitian inputs are
//! symmetrized as `(G + G*) / 2` before they are handed to the eigensolver,
//! which removes round-off asymmetry.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subspace::Subspace;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative and absolute thresholds for numerical rank decisions.
///
/// The effective threshold for a matrix `M` is `max(abs, rel · ‖M‖₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTolerance")]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerance {
    rel: f64,
    abs: f64,
}

impl TryFrom<RawTolerance> for Tolerance {
    type Error = Error;

    fn try_from(raw: RawTolerance) -> Result<Self> {
        Tolerance::new(raw.rel, raw.abs)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if ok(rel) && ok(abs) {
            Ok(Self { rel, abs })
        } else {
            Err(Error::InvalidTolerance { rel, abs })
        }
    }

    pub fn threshold_for(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale)
    }

    /// Effective threshold for `m`, scaled by its largest singular value.
    pub fn threshold(&self, m: &CMatrix) -> f64 {
        self.threshold_for(spectral_norm(m))
    }
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn ensure_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub fn ensure_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// Thin SVD with singular values sorted in decreasing order.
///
/// `u` is `rows × k` and `v` is `cols × k` where `k = min(rows, cols)`.
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            u: CMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: CMatrix::zeros(cols, 0),
        };
    }
    let raw = m.clone().svd(true, true);
    let u = raw.u.expect("left singular vectors requested");
    let v_t = raw.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| raw.singular_values[b].total_cmp(&raw.singular_values[a]));
    let singular_values = order.iter().map(|&i| raw.singular_values[i]).collect();
    let u = CMatrix::from_fn(rows, k, |r, c| u[(r, order[c])]);
    let v = CMatrix::from_fn(cols, k, |r, c| v_t[(order[c], r)].conj());
    Svd {
        u,
        singular_values,
        v,
    }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows().min(m.ncols()) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn rank(m: &CMatrix, tol: &Tolerance) -> usize {
    let s = singular_values(m);
    let thr = tol.threshold_for(s.first().copied().unwrap_or(0.0));
    s.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis of the numerical kernel of `m`.
pub fn nullspace(m: &CMatrix, tol: &Tolerance) -> Subspace {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Subspace::zero(0);
    }
    // Pad wide matrices to square so the SVD yields a full set of right
    // singular vectors.
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(m);
        p
    } else {
        m.clone()
    };
    let dec = svd(&padded);
    let thr = tol.threshold_for(dec.singular_values.first().copied().unwrap_or(0.0));
    let keep: Vec<usize> = (0..cols)
        .filter(|&k| dec.singular_values[k] <= thr)
        .collect();
    let basis = CMatrix::from_fn(cols, keep.len(), |r, c| dec.v[(r, keep[c])]);
    Subspace::from_basis_unchecked(basis)
}

/// Orthonormal basis of the numerical column space of `m`.
pub fn range_basis(m: &CMatrix, tol: &Tolerance) -> Subspace {
    let rows = m.nrows();
    let dec = svd(m);
    let thr = tol.threshold_for(dec.singular_values.first().copied().unwrap_or(0.0));
    let r = dec.singular_values.iter().filter(|&&s| s > thr).count();
    Subspace::from_basis_unchecked(if r == 0 {
        CMatrix::zeros(rows, 0)
    } else {
        dec.u.columns(0, r).into_owned()
    })
}

/// Moore–Penrose pseudoinverse; singular values at or below the effective
/// threshold are treated as zero.
pub fn pinv(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let (rows, cols) = m.shape();
    let dec = svd(m);
    let thr = tol.threshold_for(dec.singular_values.first().copied().unwrap_or(0.0));
    let mut out = CMatrix::zeros(cols, rows);
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s > thr {
            let v = dec.v.column(k);
            let u = dec.u.column(k);
            out += (v * u.adjoint()).map(|z| z / s);
        }
    }
    out
}

pub fn hermitian_part(g: &CMatrix) -> CMatrix {
    (g + g.adjoint()).map(|z| z * 0.5)
}

/// `‖G − G*‖₂`.
pub fn hermitian_residual(g: &CMatrix) -> f64 {
    spectral_norm(&(g - g.adjoint()))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Eigendecomposition of the Hermitian part of `g`. `g` must be square.
pub fn hermitian_eigen(g: &CMatrix) -> HermitianEigen {
    let n = g.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(hermitian_part(g));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    HermitianEigen {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    pub threshold: f64,
}

/// Decides whether a Hermitian matrix is positive semidefinite.
pub fn psd_check(g: &CMatrix, tol: &Tolerance) -> Result<PsdCheck> {
    ensure_square(g, "Gram matrix")?;
    let threshold = tol.threshold(g);
    let residual = hermitian_residual(g);
    if residual > threshold {
        return Err(Error::NonHermitian {
            residual,
            threshold,
        });
    }
    let min_eigenvalue = hermitian_eigen(g).values.first().copied().unwrap_or(0.0);
    Ok(PsdCheck {
        is_psd: min_eigenvalue >= -threshold,
        min_eigenvalue,
        threshold,
    })
}

/// Smallest `c` with `Gu ≼ c·G`, computed on an orthonormal basis of
/// `range(G)`.
pub fn max_generalized_eigenvalue(gu: &CMatrix, g: &CMatrix, tol: &Tolerance) -> Result<f64> {
    ensure_square(g, "G")?;
    ensure_square(gu, "Gu")?;
    if gu.shape() != g.shape() {
        return Err(Error::DimensionMismatch(format!(
            "Gu is {}x{} but G is {}x{}",
            gu.nrows(),
            gu.ncols(),
            g.nrows(),
            g.ncols()
        )));
    }
    let n = g.nrows();
    let g_norm = spectral_norm(g);
    let gu_norm = spectral_norm(gu);
    let thr_g = tol.threshold_for(g_norm);
    let eig = hermitian_eigen(g);
    let kept: Vec<usize> = (0..n).filter(|&k| eig.values[k] > thr_g).collect();
    let q = CMatrix::from_fn(n, kept.len(), |r, c| eig.vectors[(r, kept[c])]);

    let gu_h = hermitian_part(gu);
    let outside = &gu_h - &q * (q.adjoint() * &gu_h);
    let leak = spectral_norm(&outside);
    let threshold = tol.threshold_for(gu_norm.max(g_norm));
    if leak > threshold {
        return Err(Error::RangeViolation { leak, threshold });
    }
    if kept.is_empty() {
        return Ok(0.0);
    }
    let inv_sqrt: Vec<f64> = kept.iter().map(|&k| eig.values[k].sqrt().recip()).collect();
    let reduced = q.adjoint() * &gu_h * &q;
    let scaled = CMatrix::from_fn(kept.len(), kept.len(), |r, c| {
        reduced[(r, c)] * (inv_sqrt[r] * inv_sqrt[c])
    });
    let top = hermitian_eigen(&scaled).values.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0))
}

/// Builds a matrix from JSON-style rows, checking the expected shape.
pub fn matrix_from_rows(rows: &[Vec<Complex64>], shape: (usize, usize), what: &str) -> Result<CMatrix> {
    let (r, c) = shape;
    if rows.len() != r {
        return Err(Error::Shape(format!("{what}: expected {r} rows, got {}", rows.len())));
    }
    if let Some(bad) = rows.iter().position(|row| row.len() != c) {
        return Err(Error::Shape(format!(
            "{what}: row {bad} has {} entries, expected {c}",
            rows[bad].len()
        )));
    }
    let m = CMatrix::from_fn(r, c, |i, j| rows[i][j]);
    ensure_finite(&m, what)?;
    Ok(m)
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|row| row.iter().copied().collect()).collect()
}

/// Rank-one matrix `h·g*`, the operator `f ↦ ⟨f, g⟩·h`.
pub fn rank_one(g: &CVector, h: &CVector) -> CMatrix {
    h * g.adjoint()
}

/// Column `k` of the identity of size `n`.
pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = C_ONE;
    v
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(values[r], 0.0)
        } else {
            C_ZERO
        }
    })
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols, "row-major data length");
    CMatrix::from_fn(rows, cols, |r, c| Complex64::new(data[r * cols + c], 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, eps: f64) -> bool {
        a.shape() == b.shape() && (a - b).norm() <= eps
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint(&identity(2)), identity(2));
        let n = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(adjoint(&n), real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0]));
        let i = CMatrix::from_element(1, 1, C_I);
        assert_eq!(adjoint(&i)[(0, 0)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn nullspace_examples() {
        let tol = Tolerance::default();
        assert_eq!(nullspace(&CMatrix::zeros(2, 2), &tol).rank(), 2);
        assert_eq!(nullspace(&identity(3), &tol).rank(), 0);
        let k = nullspace(&real_diag(&[1.0, 0.0]), &tol);
        assert_eq!(k.rank(), 1);
        assert!(k.same_as(&Subspace::span(&[basis_vector(2, 1)], &tol).unwrap(), 1e-12));
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let tol = Tolerance::default();
        let m = real_matrix(1, 3, &[1.0, 1.0, 0.0]);
        let k = nullspace(&m, &tol);
        assert_eq!(k.rank(), 2);
        assert!((&m * k.basis()).norm() < 1e-14);
    }

    #[test]
    fn psd_examples() {
        let tol = Tolerance::default();
        let c = psd_check(&real_diag(&[1.0, 0.0]), &tol).unwrap();
        assert!(c.is_psd);
        assert!(c.min_eigenvalue.abs() < 1e-15);
        let c = psd_check(&real_diag(&[1.0, -1.0]), &tol).unwrap();
        assert!(!c.is_psd);
        assert!((c.min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn psd_check_against_characteristic_polynomial() {
        // Coefficients of det(λI − G) for a real symmetric 3x3, then roots by
        // bisection on sign changes.
        let g = [[0.5, 0.0, 0.5], [0.0, 0.5, 0.5], [0.5, 0.5, 1.0]];
        let tr = g[0][0] + g[1][1] + g[2][2];
        let minors = g[0][0] * g[1][1] - g[0][1] * g[1][0] + g[0][0] * g[2][2]
            - g[0][2] * g[2][0]
            + g[1][1] * g[2][2]
            - g[1][2] * g[2][1];
        let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        let p = |l: f64| l * l * l - tr * l * l + minors * l - det;
        let mut roots = Vec::new();
        let mut x = -3.0;
        let step = 1e-3 * std::f64::consts::PI;
        while x < 3.0 {
            let (a, b) = (x, x + step);
            if p(a) == 0.0 {
                roots.push(a);
            } else if p(a) * p(b) < 0.0 {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if p(lo) * p(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            x = b;
        }
        assert_eq!(roots.len(), 3);
        let oracle_min = roots.iter().copied().fold(f64::INFINITY, f64::min);

        let m = real_matrix(3, 3, &g.concat());
        let c = psd_check(&m, &Tolerance::default()).unwrap();
        assert!(c.is_psd);
        assert!((c.min_eigenvalue - oracle_min).abs() < 1e-12);
    }

    #[test]
    fn psd_rejects_non_hermitian() {
        let m = real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            psd_check(&m, &Tolerance::default()),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn generalized_eigenvalue_examples() {
        let tol = Tolerance::default();
        let c = max_generalized_eigenvalue(&identity(2), &identity(2), &tol).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let c = max_generalized_eigenvalue(&real_diag(&[2.0, 2.0]), &identity(2), &tol).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_eigenvalue_by_axis_ratios() {
        // Both matrices are diagonal: the ratio is maximized on a coordinate
        // axis, so the oracle is max_k gu_k / g_k.
        let gu = [1.0, 0.0];
        let g = [2.0, 1.0];
        let oracle = gu
            .iter()
            .zip(&g)
            .map(|(a, b)| a / b)
            .fold(0.0_f64, f64::max);
        let c =
            max_generalized_eigenvalue(&real_diag(&gu), &real_diag(&g), &Tolerance::default())
                .unwrap();
        assert!((c - oracle).abs() < 1e-12);
        assert!((c - 0.5).abs() < 1e-12);
    }

    #[test]
    fn generalized_eigenvalue_range_violation() {
        let r = max_generalized_eigenvalue(
            &real_diag(&[0.0, 1.0]),
            &real_diag(&[1.0, 0.0]),
            &Tolerance::default(),
        );
        assert!(matches!(r, Err(Error::RangeViolation { .. })));
    }

    fn penrose_residual(m: &CMatrix, p: &CMatrix) -> f64 {
        let a = (m * p * m - m).norm();
        let b = (p * m * p - p).norm();
        let c = ((m * p).adjoint() - m * p).norm();
        let d = ((p * m).adjoint() - p * m).norm();
        a.max(b).max(c).max(d)
    }

    #[test]
    fn pinv_examples() {
        let tol = Tolerance::default();
        assert!(close(&pinv(&identity(2), &tol), &identity(2), 1e-14));
        assert!(close(
            &pinv(&real_diag(&[2.0, 0.0]), &tol),
            &real_diag(&[0.5, 0.0]),
            1e-14
        ));
        let ones = real_matrix(2, 2, &[1.0; 4]);
        let p = pinv(&ones, &tol);
        assert!(penrose_residual(&ones, &p) < 1e-12);
        assert!(close(&p, &real_matrix(2, 2, &[0.25; 4]), 1e-14));
    }

    #[test]
    fn tolerance_rejects_negative() {
        assert!(Tolerance::new(-1.0, 0.0).is_err());
        assert!(Tolerance::new(0.0, f64::NAN).is_err());
        let t: std::result::Result<Tolerance, _> =
            serde_json::from_str(r#"{"rel": 1e-6, "abs": -1}"#);
        assert!(t.is_err());
    }

    mod props {
        use super::super::*;
        use crate::sampling;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn double_adjoint_is_exact(seed in any::<u64>(), r in 1usize..6, c in 1usize..6) {
                let m = sampling::gaussian_matrix(&mut sampling::rng(seed), r, c);
                prop_assert_eq!(adjoint(&adjoint(&m)), m);
            }

            #[test]
            fn nullspace_is_orthonormal_kernel(seed in any::<u64>(), r in 1usize..6, c in 1usize..7, k in 0usize..4) {
                let mut rng = sampling::rng(seed);
                let k = k.min(r).min(c);
                // rank-k product so kernels are nontrivial
                let m = sampling::gaussian_matrix(&mut rng, r, k) * sampling::gaussian_matrix(&mut rng, k, c);
                let tol = Tolerance::default();
                let q = nullspace(&m, &tol);
                let thr = tol.threshold(&m);
                prop_assert!(spectral_norm(&(&m * q.basis())) <= thr);
                let gram = q.basis().adjoint() * q.basis();
                prop_assert!((gram - identity(q.rank())).norm() <= 1e-12);
                prop_assert_eq!(q.rank(), c - k);
            }

            #[test]
            fn pinv_satisfies_penrose(seed in any::<u64>(), r in 1usize..6, c in 1usize..6, k in 1usize..5) {
                let mut rng = sampling::rng(seed);
                let k = k.min(r).min(c);
                let m = sampling::gaussian_matrix(&mut rng, r, k) * sampling::gaussian_matrix(&mut rng, k, c);
                let tol = Tolerance::default();
                let p = pinv(&m, &tol);
                let scale = spectral_norm(&m) * spectral_norm(&p);
                prop_assert!(super::penrose_residual(&m, &p) <= 10.0 * tol.threshold_for(scale.max(1.0)));
            }

            #[test]
            fn generalized_eigenvalue_of_g_against_itself(seed in any::<u64>(), n in 1usize..7, k in 1usize..7) {
                let mut rng = sampling::rng(seed);
                let x = sampling::gaussian_matrix(&mut rng, n, k.min(n));
                let g = &x * x.adjoint();
                let c = max_generalized_eigenvalue(&g, &g, &Tolerance::default()).unwrap();
                prop_assert!((c - 1.0).abs() <= 1e-9);
            }
        }
    }
}
