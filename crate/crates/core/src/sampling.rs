//! Seeded random instances: Gaussian vectors, Haar unitaries, framings with
//! a prescribed fixed space, POVMs and positive-definite operator maps.
//!
//! Everything draws from `ChaCha8Rng` so runs are reproducible from a `u64`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dilation::OperatorMap;
use crate::framing::Framing;
use crate::naimark::Povm;
use crate::numlin::{self, CMatrix, CVector, Tolerance};
use crate::semigroup::FiniteStarSemigroup;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| complex_gaussian(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    // Row-major fill keeps the draw order independent of storage layout.
    let data: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    DMatrix::from_row_slice(rows, cols, &data)
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase fix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let qr = gaussian_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { numlin::C_ONE };
        let mut col = out.column_mut(k);
        col *= phase;
    }
    out
}

pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Random subset of `0..n` as a sorted index list; each element with
/// probability 1/2.
pub fn subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.random::<bool>()).collect()
}

pub fn random_framing<R: Rng + ?Sized>(rng: &mut R, dim: usize, len: usize) -> Framing {
    let g = (0..len).map(|_| gaussian_vector(rng, dim)).collect();
    let h = (0..len).map(|_| gaussian_vector(rng, dim)).collect();
    Framing::new(dim, g, h).expect("well-formed random framing")
}

/// Framing of `len` pairs in `C^dim` whose fixed space is a random
/// `k`-dimensional subspace of `span{h_n}`. Requires `k ≤ min(dim, len)`.
///
/// The synthesis matrix is `S = QQ* + H·Y·(I − QQ*)`; `g` is chosen as
/// `G* = H⁺S`, so `H·G* = S` because `range(S) ⊆ range(H)`.
pub fn framing_with_fixed_space<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    len: usize,
    k: usize,
) -> Framing {
    assert!(k <= dim.min(len), "fixed space must fit inside span(h)");
    let tol = Tolerance::default();
    let h = gaussian_matrix(rng, dim, len);
    let q = if k == 0 {
        CMatrix::zeros(dim, 0)
    } else {
        let spread = &h * gaussian_matrix(rng, len, k);
        numlin::range_basis(&spread, &tol).basis().clone()
    };
    let pq = &q * q.adjoint();
    let y = gaussian_matrix(rng, len, dim);
    let s = &pq + &h * y * (numlin::identity(dim) - &pq);
    let g_adj = numlin::pinv(&h, &tol) * s;
    let g = g_adj.adjoint();
    Framing::from_matrices(&g, &h).expect("well-formed framing")
}

/// Rescaling coefficients with `α_n·conj(β_n) = 1`: a common random phase
/// and reciprocal log-uniform moduli in `[1/4, 4]`.
pub fn rescaling<R: Rng + ?Sized>(rng: &mut R, len: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut alpha = Vec::with_capacity(len);
    let mut beta = Vec::with_capacity(len);
    for _ in 0..len {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let r = 4f64.powf(rng.random_range(-1.0..1.0));
        let phase = Complex64::from_polar(1.0, theta);
        alpha.push(phase * r);
        beta.push(phase / r);
    }
    (alpha, beta)
}

/// Invertible diagonal matrix with entries of modulus in `[1/2, 2]` and
/// random phases.
pub fn invertible_diagonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let mut d = CMatrix::zeros(n, n);
    for k in 0..n {
        let r = 2f64.powf(rng.random_range(-1.0..1.0));
        d[(k, k)] = Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
    }
    d
}

fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> CMatrix {
    let x = gaussian_matrix(rng, dim, rank);
    &x * x.adjoint()
}

fn inverse_sqrt(s: &CMatrix) -> CMatrix {
    let eig = numlin::hermitian_eigen(s);
    let n = s.nrows();
    let scaled = CMatrix::from_fn(n, n, |r, c| eig.vectors[(r, c)] / eig.values[c].sqrt());
    &scaled * eig.vectors.adjoint()
}

/// Random POVM with `atoms` outcomes on `C^dim`. Atom ranks are random in
/// `1..=dim`. When `normalized`, the atoms are conjugated by `S^{-1/2}`
/// with `S` their sum, so they add up to the identity.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, atoms: usize, normalized: bool) -> Povm {
    assert!(atoms >= 1 && dim >= 1);
    let mut raw: Vec<CMatrix> = (0..atoms)
        .map(|a| {
            // the first atom has full rank so the sum is invertible
            let rank = if a == 0 { dim } else { rng.random_range(1..=dim) };
            random_psd(rng, dim, rank)
        })
        .collect();
    if normalized {
        let total: CMatrix = raw.iter().fold(CMatrix::zeros(dim, dim), |acc, e| acc + e);
        let w = inverse_sqrt(&total);
        raw = raw.iter().map(|e| numlin::hermitian_part(&(&w * e * &w))).collect();
    } else {
        let scale = 1.0 / numlin::spectral_norm(&raw.iter().fold(CMatrix::zeros(dim, dim), |acc, e| acc + e));
        raw = raw.iter().map(|e| e.map(|z| z * scale)).collect();
    }
    Povm::new(dim, raw, &Tolerance::default()).expect("random POVM is valid")
}

/// Positive-definite map `φ(s) = V*·Π(s)·V` where `Π` is the left regular
/// representation of the group `sg` conjugated by a Haar unitary and `V` is
/// a Gaussian `n × dim` matrix. `sg` must be a group whose involution is
/// the inverse, so `Π(s*) = Π(s)*`.
pub fn compressed_representation<R: Rng + ?Sized>(
    rng: &mut R,
    sg: &FiniteStarSemigroup,
    dim: usize,
) -> OperatorMap {
    let n = sg.len();
    let w = haar_unitary(rng, n);
    let v = gaussian_matrix(rng, n, dim).map(|z| z / (n as f64).sqrt());
    let phi = (0..n)
        .map(|s| {
            let mut perm = CMatrix::zeros(n, n);
            for t in 0..n {
                perm[(sg.mul(s, t), t)] = numlin::C_ONE;
            }
            let rep = &w * perm * w.adjoint();
            v.adjoint() * rep * &v
        })
        .collect();
    OperatorMap::new(sg.clone(), dim, dim, phi).expect("well-formed operator map")
}
