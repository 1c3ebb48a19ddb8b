//! SVD and polar factors `A = QP = FQ`, with a PSD square root as oracle.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{is_normal, AdjacencyMatrix};
use crate::linalg::{frobenius, svd_real, symmetric_from_eigen};

/// Singular values at or below this fraction of the largest count as zero.
pub const NULL_RTOL: f64 = 1e-12;


#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DMatrix<f64>,
    /// Nonincreasing.
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (j, sj) in self.s.iter().enumerate() {
            us.column_mut(j).scale_mut(*sj);
        }
        us * self.v.transpose()
    }

    /// Number of singular values above `NULL_RTOL · s_max`.
    pub fn rank(&self) -> usize {
        let cut = null_cutoff(&self.s);
        self.s.iter().filter(|&&x| x > cut).count()
    }
}

#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub q: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub svd: SvdFactors,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarReport {
    /// `‖A − QP‖_F`
    pub left_residual: f64,
    /// `‖A − FQ‖_F`
    pub right_residual: f64,
    /// `‖QᵀQ − I‖_F`
    pub orthogonality_residual: f64,
    pub min_eigenvalue_p: f64,
    pub min_eigenvalue_f: f64,
    pub rank: usize,
}

impl PolarReport {
    /// Checks the residuals against `tol · max(1, ‖A‖_F)` and the PSD bounds
    /// against `tol` relative to the largest singular value.
    pub fn passes(&self, a_norm: f64, s_max: f64, tol: f64) -> bool {
        let scale = a_norm.max(1.0);
        self.left_residual <= tol * scale
            && self.right_residual <= tol * scale
            && self.orthogonality_residual <= tol
            && self.min_eigenvalue_p >= -tol * s_max.max(f64::MIN_POSITIVE)
            && self.min_eigenvalue_f >= -tol * s_max.max(f64::MIN_POSITIVE)
    }
}

fn null_cutoff(s: &[f64]) -> f64 {
    NULL_RTOL * s.first().copied().unwrap_or(0.0)
}

pub fn svd(a: &AdjacencyMatrix) -> Result<SvdFactors> {
    svd_of(a.matrix())
}

pub(crate) fn svd_of(m: &DMatrix<f64>) -> Result<SvdFactors> {
    let n = m.nrows();
    if n == 0 {
        return Ok(SvdFactors { u: m.clone(), s: Vec::new(), v: m.clone() });
    }
    let (u, s, v) = svd_real(m)?;
    Ok(SvdFactors { u, s, v })
}

/// `Q = UVᵀ`, `P = VΣVᵀ`, `F = UΣUᵀ`.
///
/// When A is singular the left null vectors are rotated onto the right null
/// vectors as closely as possible, so that Q acts as the identity on ker A
/// whenever ker A = ker Aᵀ (normal A). P and F are unaffected.
pub fn polar_decompose(a: &AdjacencyMatrix) -> Result<PolarFactors> {
    let m = a.matrix();
    let pattern = if is_normal(a, NORMAL_RTOL) {
        // ker A = ker Aᵀ: Q acts as the identity there.
        DMatrix::identity(a.n(), a.n())
    } else {
        inferred_pattern(m)
    };
    polar_decompose_with_pattern(a, &pattern)
}

/// Polar decomposition whose `Q` pairs disjoint kernels of `A` and `Aᵀ`
/// along `pattern` (any matrix; its nonzeros are the preferred support of
/// `Q` on the null space). Use this when the intended layout is known but
/// not recoverable from `A`, e.g. a block-cyclic graph whose undirected
/// version is disconnected.
pub fn polar_decompose_with_pattern(a: &AdjacencyMatrix, pattern: &DMatrix<f64>) -> Result<PolarFactors> {
    if pattern.shape() != (a.n(), a.n()) {
        return Err(Error::DimensionMismatch { expected: a.n(), found: pattern.nrows() });
    }
    let mut factors = svd(a)?;
    align_null_space(&mut factors, pattern)?;
    let SvdFactors { u, s, v } = &factors;
    let q = u * v.transpose();
    let p = symmetric_from_eigen(v, s);
    let f = symmetric_from_eigen(u, s);
    Ok(PolarFactors { q, p, f, svd: factors })
}

const NORMAL_RTOL: f64 = 1e-10;

fn align_null_space(f: &mut SvdFactors, pattern: &DMatrix<f64>) -> Result<()> {
    let n = f.s.len();
    let cut = null_cutoff(&f.s);
    let start = f.s.iter().position(|&x| x <= cut).unwrap_or(n);
    if start == n {
        return Ok(());
    }
    let k = n - start;
    let u0 = f.u.columns(start, k).into_owned();
    let v0 = f.v.columns(start, k).into_owned();
    let target = u0.transpose() * generic_weights(pattern) * &v0;
    let (wu, _, wv) = svd_real(&target)?;
    let w = wu * wv.transpose();
    f.u.columns_mut(start, k).copy_from(&(u0 * w));
    Ok(())
}

/// Pattern of `H·|A|·H` with `H = I + |A|ᵀ|A| + |A||A|ᵀ`. Every word in `A`,
/// `Aᵀ` with one more `A` than `Aᵀ` keeps a block-cyclic shift, so nodes
/// without out-links still get a target in the next block.
fn inferred_pattern(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let b = a.abs();
    let h = DMatrix::identity(n, n) + b.transpose() * &b + &b * b.transpose();
    &h * &b * &h
}

/// Deterministic weights in [1, 2) on the nonzeros of `pattern`, unit Frobenius norm.
fn generic_weights(pattern: &DMatrix<f64>) -> DMatrix<f64> {
    let n = pattern.nrows();
    let scale = pattern.amax();
    let mut g = DMatrix::from_fn(n, n, |i, j| {
        if pattern[(i, j)].abs() > 1e-12 * scale {
            1.0 + ((i * n + j + 1) as f64 * 0.618_033_988_749_894_9).fract()
        } else {
            0.0
        }
    });
    let norm = g.norm();
    if norm > 0.0 {
        g /= norm;
    }
    g
}

/// `W·diag(√λ)·Wᵀ` for symmetric PSD `S`; eigenvalues down to `−1e-10·‖S‖₂`
/// are clipped to zero, as are those below `n·ε·‖S‖₂`.
pub fn psd_sqrt(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(Error::NotSquare { rows: n, cols: s.ncols() });
    }
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let asym = frobenius(&(s - s.transpose()));
    if asym > 1e-10 * frobenius(s).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    if n == 0 {
        return Ok(s.clone());
    }
    let eig = SymmetricEigen::new((s + s.transpose()) * 0.5);
    let norm2 = eig.eigenvalues.amax();
    let min = eig.eigenvalues.min();
    if min < -1e-10 * norm2 {
        return Err(Error::Indefinite(min));
    }
    // Below n·ε·‖S‖₂ an eigenvalue is rounding noise; its root would not be.
    let floor = n as f64 * f64::EPSILON * norm2;
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|&l| if l <= floor { 0.0 } else { l.sqrt() }).collect();
    Ok(symmetric_from_eigen(&eig.eigenvectors, &roots))
}

fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new((m + m.transpose()) * 0.5).eigenvalues.min()
}

pub fn verify_polar(a: &AdjacencyMatrix, f: &PolarFactors) -> PolarReport {
    let am = a.matrix();
    let n = am.nrows();
    PolarReport {
        left_residual: frobenius(&(am - &f.q * &f.p)),
        right_residual: frobenius(&(am - &f.f * &f.q)),
        orthogonality_residual: frobenius(&(f.q.transpose() * &f.q - DMatrix::identity(n, n))),
        min_eigenvalue_p: min_symmetric_eigenvalue(&f.p),
        min_eigenvalue_f: min_symmetric_eigenvalue(&f.f),
        rank: f.svd.rank(),
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of R's diagonal moved into Q.
pub fn haar_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Monte Carlo check that no Haar-random orthogonal matrix is closer to A
/// than `q` in Frobenius norm.
pub fn closest_unitary_check(
    a: &AdjacencyMatrix,
    q: &DMatrix<f64>,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let n = a.n();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.nrows() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_q = frobenius(&(a.matrix() - q));
    for _ in 0..trials {
        let w = haar_orthogonal(n, &mut rng);
        if d_q > frobenius(&(a.matrix() - w)) + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        generate_directed_cycle, generate_directed_torus, in_link_symmetrization,
        out_link_symmetrization, random_dense, random_digraph,
    };

    fn adj(rows: usize, data: &[f64]) -> AdjacencyMatrix {
        AdjacencyMatrix::new(DMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    fn single_edge() -> AdjacencyMatrix {
        adj(2, &[0.0, 0.0, 1.0, 0.0])
    }

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        frobenius(&(a - b)) <= tol
    }

    #[test]
    fn singular_values_of_small_cases() {
        assert_eq!(svd(&AdjacencyMatrix::identity(3)).unwrap().s, vec![1.0; 3]);
        let s = svd(&adj(2, &[3.0, 0.0, 0.0, 0.0])).unwrap().s;
        assert!((s[0] - 3.0).abs() < 1e-14 && s[1].abs() < 1e-14);
        let f = svd(&single_edge()).unwrap();
        assert!((f.s[0] - 1.0).abs() < 1e-14 && f.s[1].abs() < 1e-14);
        assert!(close(&f.reconstruct(), single_edge().matrix(), 1e-14));
        assert_eq!(f.rank(), 1);
    }

    #[test]
    fn svd_sorted_and_orthogonal() {
        let a = random_dense(12, 5);
        let f = svd(&a).unwrap();
        assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
        let eye = DMatrix::identity(12, 12);
        assert!(close(&(f.u.transpose() * &f.u), &eye, 1e-10));
        assert!(close(&(f.v.transpose() * &f.v), &eye, 1e-10));
        assert!(close(&f.reconstruct(), a.matrix(), 1e-10 * a.frobenius_norm().max(1.0)));
    }

    #[test]
    fn polar_of_identity_and_permutation() {
        let eye = AdjacencyMatrix::identity(4);
        let f = polar_decompose(&eye).unwrap();
        for m in [&f.q, &f.p, &f.f] {
            assert!(close(m, eye.matrix(), 1e-14));
        }
        let c4 = generate_directed_cycle(4, 1.0).unwrap();
        let f = polar_decompose(&c4).unwrap();
        assert!(close(&f.q, c4.matrix(), 1e-14));
        assert!(close(&f.p, eye.matrix(), 1e-14));
        assert!(close(&f.f, eye.matrix(), 1e-14));
    }

    #[test]
    fn polar_of_single_edge() {
        let a = single_edge();
        let f = polar_decompose(&a).unwrap();
        // P = √(AᵀA) lives on the source node, F = √(AAᵀ) on the target
        assert!(close(&f.p, &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), 1e-14));
        assert!(close(&f.f, &DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]), 1e-14));
        assert!(close(&(&f.q * &f.p), a.matrix(), 1e-14));
        assert!(close(&(&f.f * &f.q), a.matrix(), 1e-14));
    }

    #[test]
    fn polar_matches_psd_sqrt_oracle() {
        for seed in 0..10 {
            let a = random_digraph(15, 0.3, seed);
            let f = polar_decompose(&a).unwrap();
            let bound = 1e-8 * a.frobenius_norm().max(1.0);
            let p = psd_sqrt(out_link_symmetrization(&a).matrix()).unwrap();
            let ff = psd_sqrt(in_link_symmetrization(&a).matrix()).unwrap();
            assert!(close(&f.p, &p, bound));
            assert!(close(&f.f, &ff, bound));
            let rep = verify_polar(&a, &f);
            assert!(rep.passes(a.frobenius_norm(), f.svd.s[0], 1e-10), "{rep:?}");
        }
    }

    #[test]
    fn normal_singular_q_is_identity_on_kernel() {
        let a = generate_directed_torus(6, 6).unwrap();
        let f = polar_decompose(&a).unwrap();
        assert!(f.svd.rank() < 36);
        assert!(close(&f.p, &f.f, 1e-8 * a.frobenius_norm()));
        for j in f.svd.rank()..36 {
            let x = f.svd.v.column(j);
            assert!((&f.q * x - x).norm() < 1e-10);
        }
        // Q commutes with A for normal A once the kernel is fixed
        assert!(close(&(&f.q * a.matrix()), &(a.matrix() * &f.q), 1e-10));
    }

    #[test]
    fn zero_matrix_polar() {
        let z = AdjacencyMatrix::zeros(3);
        let f = polar_decompose(&z).unwrap();
        assert!(close(&f.q, &DMatrix::identity(3, 3), 1e-14));
        assert_eq!(f.svd.rank(), 0);
    }

    #[test]
    fn psd_sqrt_cases() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 9.0]));
        let r = psd_sqrt(&d).unwrap();
        assert!(close(&r, &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]), 1e-14));
        assert!(close(&psd_sqrt(&DMatrix::identity(3, 3)).unwrap(), &DMatrix::identity(3, 3), 1e-14));
        let c = out_link_symmetrization(&single_edge());
        assert!(close(&psd_sqrt(c.matrix()).unwrap(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), 1e-14));
        assert!(matches!(
            psd_sqrt(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])),
            Err(Error::NotSymmetric(_))
        ));
        assert!(matches!(
            psd_sqrt(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])),
            Err(Error::Indefinite(_))
        ));
        // tiny negative eigenvalue is clipped
        let r = psd_sqrt(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-13])).unwrap();
        assert_eq!(r[(1, 1)], 0.0);
    }

    #[test]
    fn report_on_exact_and_corrupted_factors() {
        let eye = AdjacencyMatrix::identity(3);
        let rep = verify_polar(&eye, &polar_decompose(&eye).unwrap());
        assert_eq!(rep.left_residual, 0.0);
        assert_eq!(rep.right_residual, 0.0);
        assert_eq!(rep.orthogonality_residual, 0.0);

        let a = random_digraph(20, 0.3, 3);
        let mut f = polar_decompose(&a).unwrap();
        let rep = verify_polar(&a, &f);
        assert!(rep.left_residual < 1e-10 && rep.right_residual < 1e-10);
        f.q[(0, 0)] += 0.1;
        assert!(verify_polar(&a, &f).orthogonality_residual > 0.05);
    }

    #[test]
    fn haar_draws_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = haar_orthogonal(6, &mut rng);
        assert!(close(&(w.transpose() * &w), &DMatrix::identity(6, 6), 1e-12));
    }

    #[test]
    fn closest_unitary() {
        let c = generate_directed_cycle(5, 1.0).unwrap();
        assert!(closest_unitary_check(&c, c.matrix(), 10, 0).unwrap());
        let a = random_digraph(10, 0.4, 11);
        let f = polar_decompose(&a).unwrap();
        assert!(closest_unitary_check(&a, &f.q, 1000, 7).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let wrong = haar_orthogonal(10, &mut rng);
        assert!(!closest_unitary_check(&a, &wrong, 1000, 7).unwrap());
        assert!(closest_unitary_check(&a, &f.q, 0, 7).is_err());
    }
}
