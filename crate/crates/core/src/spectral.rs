//! Eigendecompositions, variation measures and ordered graph Fourier bases.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::decomposition::polar_decompose;
use crate::error::{Error, Result};
use crate::graph::{is_normal, AdjacencyMatrix, GraphSignal};
use crate::linalg::{frobenius, svd_complex, svd_real, to_complex, CMatrix, CVector, RealSchur, C64};

/// Basis condition above which a system counts as not diagonalizable.
pub const DEFAULT_COND_LIMIT: f64 = 1e8;

/// Variations closer than this belong to one degeneracy group.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Relative tolerance for merging computed eigenvalues into one cluster.
const CLUSTER_RTOL: f64 = 1e-9;

/// Singular values of `A − λI` below this (relative to `‖A‖_F`) mark null vectors.
const NULL_VECTOR_RTOL: f64 = 1e-8;

/// Eigenvalues with modulus at or below this fraction of the spectral radius
/// are treated as zero.
pub const ZERO_EIGENVALUE_RTOL: f64 = 1e-12;

const NORMALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OperatorKind {
    Symmetric,
    Orthogonal,
    General,
}

#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<C64>,
    /// Unit ℓ2-norm columns.
    pub eigenvectors: CMatrix,
    /// `X⁻¹`, present only when diagonalizable.
    pub inverse_basis: Option<CMatrix>,
    pub diagonalizable: bool,
    pub basis_condition: f64,
    kind: OperatorKind,
    conjugate_of: Vec<Option<usize>>,
}

impl EigenSystem {
    /// True when the eigenvectors are orthonormal by construction.
    pub fn has_unitary_basis(&self) -> bool {
        self.kind != OperatorKind::General
    }

    /// Index of the conjugate partner of eigenpair `i`, if it has one.
    pub fn conjugate_of(&self, i: usize) -> Option<usize> {
        self.conjugate_of[i]
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    /// `max_i ‖A x_i − λ_i x_i‖₂`.
    pub fn max_residual(&self, a: &DMatrix<f64>) -> f64 {
        let ac = to_complex(a);
        (0..self.n())
            .map(|i| {
                let x = self.eigenvectors.column(i);
                (&ac * x - x * self.eigenvalues[i]).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    TotalVariation,
    AngularFrequency,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::TotalVariation => "total-variation",
            Measure::AngularFrequency => "angular-frequency",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrderedGftBasis {
    /// Inverse transform: canonicalized eigenvectors as columns, in order.
    pub basis: CMatrix,
    /// Forward transform.
    pub forward: CMatrix,
    pub variations: Vec<f64>,
    pub eigenvalues: Vec<C64>,
    pub measure: Measure,
    /// Contiguous index ranges of equal variation.
    pub degeneracy_groups: Vec<Range<usize>>,
}

impl OrderedGftBasis {
    pub fn n(&self) -> usize {
        self.variations.len()
    }
}

fn check_finite_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub fn eig_symmetric(s: &DMatrix<f64>) -> Result<EigenSystem> {
    check_finite_square(s)?;
    let asym = frobenius(&(s - s.transpose()));
    if asym > 1e-10 * frobenius(s).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let n = s.nrows();
    let eig = SymmetricEigen::new((s + s.transpose()) * 0.5);
    let vectors = to_complex(&eig.eigenvectors);
    Ok(EigenSystem {
        eigenvalues: eig.eigenvalues.iter().map(|&l| C64::new(l, 0.0)).collect(),
        inverse_basis: Some(vectors.adjoint()),
        eigenvectors: vectors,
        diagonalizable: true,
        basis_condition: 1.0,
        kind: OperatorKind::Symmetric,
        conjugate_of: vec![None; n],
    })
}

pub fn eig_orthogonal(q: &DMatrix<f64>) -> Result<EigenSystem> {
    check_finite_square(q)?;
    let n = q.nrows();
    let res = frobenius(&(q.transpose() * q - DMatrix::identity(n, n)));
    if res > 1e-8 {
        return Err(Error::NotOrthogonal(res));
    }
    let schur = RealSchur::new(q)?;
    let (mut eigenvalues, vectors, conjugate_of) = normal_schur_vectors(&schur);
    for l in &mut eigenvalues {
        *l = if l.im == 0.0 { C64::new(l.re.signum(), 0.0) } else { *l / l.norm() };
    }
    Ok(EigenSystem {
        eigenvalues,
        inverse_basis: Some(vectors.adjoint()),
        eigenvectors: vectors,
        diagonalizable: true,
        basis_condition: 1.0,
        kind: OperatorKind::Orthogonal,
        conjugate_of,
    })
}

/// Eigenvectors read off the diagonal blocks of a real Schur form. Exact only
/// for normal matrices, whose Schur form is block diagonal.
fn normal_schur_vectors(s: &RealSchur) -> (Vec<C64>, CMatrix, Vec<Option<usize>>) {
    let n = s.t.nrows();
    let mut values = s.eigenvalues.clone();
    let mut vectors = CMatrix::zeros(n, n);
    let mut partner = vec![None; n];
    let scale = s.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let real_column = |k: usize| s.z.column(k).map(|e| C64::new(e, 0.0));
    for &(k, size) in &s.blocks {
        if size == 1 {
            vectors.set_column(k, &real_column(k));
            continue;
        }
        let (a, b) = (s.t[(k, k)], s.t[(k, k + 1)]);
        let (c, d) = (s.t[(k + 1, k)], s.t[(k + 1, k + 1)]);
        let l = s.eigenvalues[k];
        if l.im <= ZERO_EIGENVALUE_RTOL * scale {
            // a rounding-level pair is a real double eigenvalue of a normal
            // matrix; split it with the symmetric part of the block
            let off = 0.5 * (b + c);
            let eig = SymmetricEigen::new(DMatrix::from_row_slice(2, 2, &[a, off, off, d]));
            let rotated = s.z.columns(k, 2) * &eig.eigenvectors;
            for j in 0..2 {
                values[k + j] = C64::new(eig.eigenvalues[j], 0.0);
                vectors.set_column(k + j, &rotated.column(j).map(|e| C64::new(e, 0.0)));
            }
            continue;
        }
        let (v0, v1) = if b.abs() >= c.abs() {
            (C64::new(b, 0.0), l - a)
        } else {
            (l - d, C64::new(c, 0.0))
        };
        let x: CVector = DVector::from_fn(n, |i, _| v0 * s.z[(i, k)] + v1 * s.z[(i, k + 1)]);
        let x = &x / C64::new(x.norm(), 0.0);
        vectors.set_column(k, &x);
        vectors.set_column(k + 1, &x.map(|e| e.conj()));
        values[k + 1] = l.conj();
        partner[k] = Some(k + 1);
        partner[k + 1] = Some(k);
    }
    (values, vectors, partner)
}

/// Complex eigendecomposition of a real matrix. Defective eigenvalues leave a
/// rank-deficient basis, which reports an infinite condition number.
pub fn eig_general(a: &AdjacencyMatrix, cond_limit: f64) -> Result<EigenSystem> {
    let m = a.matrix();
    let n = m.nrows();
    let schur = RealSchur::new(m)?;
    let (eigenvalues, vectors, conjugate_of) = if is_normal(a, NORMALITY_TOL) {
        normal_schur_vectors(&schur)
    } else {
        cluster_null_vectors(m, &schur.eigenvalues)
    };

    let basis_condition = condition_number(&vectors);
    let diagonalizable = basis_condition <= cond_limit;
    let inverse_basis = if diagonalizable && n > 0 {
        vectors.clone().lu().try_inverse()
    } else if n == 0 {
        Some(vectors.clone())
    } else {
        None
    };
    let diagonalizable = diagonalizable && inverse_basis.is_some();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors: vectors,
        inverse_basis,
        diagonalizable,
        basis_condition,
        kind: OperatorKind::General,
        conjugate_of,
    })
}

fn cluster_null_vectors(m: &DMatrix<f64>, raw: &[C64]) -> (Vec<C64>, CMatrix, Vec<Option<usize>>) {
    let n = m.nrows();
    let scale = raw.iter().map(|l| l.norm()).fold(1.0, f64::max);
    let tol = CLUSTER_RTOL * scale;
    let null_tol = NULL_VECTOR_RTOL * frobenius(m).max(1.0);

    // clusters over the real axis and the upper half plane; lower-half
    // eigenvalues mirror their upper partners
    let upper: Vec<usize> = (0..n).filter(|&i| raw[i].im >= 0.0).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (x, &i) in upper.iter().enumerate() {
        for &j in &upper[x + 1..] {
            let both_real = raw[i].im == 0.0 && raw[j].im == 0.0;
            let both_complex = raw[i].im > 0.0 && raw[j].im > 0.0;
            if (both_real || both_complex) && (raw[i] - raw[j]).norm() <= tol {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for &i in &upper {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(i);
    }

    let mut values = raw.to_vec();
    let mut vectors = CMatrix::zeros(n, n);
    let mut partner = vec![None; n];
    let ac = to_complex(m);
    for members in &clusters {
        let center = members.iter().map(|&i| raw[i]).sum::<C64>() / members.len() as f64;
        let is_real = raw[members[0]].im == 0.0;
        let center = if is_real { C64::new(center.re, 0.0) } else { center };
        let null = null_vectors(&ac, center, members.len(), null_tol, is_real);
        for (k, &i) in members.iter().enumerate() {
            values[i] = center;
            vectors.set_column(i, &null[k.min(null.len() - 1)]);
            if !is_real {
                // the Schur form stores each complex pair as (upper, lower)
                let j = i + 1;
                values[j] = center.conj();
                vectors.set_column(j, &null[k.min(null.len() - 1)].map(|e| e.conj()));
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
        }
    }
    (values, vectors, partner)
}

/// Right singular vectors of `A − cI` for the smallest singular values: always
/// at least one, at most `count`, and beyond the first only those under `tol`.
fn null_vectors(a: &CMatrix, c: C64, count: usize, tol: f64, real: bool) -> Vec<CVector> {
    let n = a.nrows();
    let shifted = a - CMatrix::identity(n, n) * c;
    let svd = if real { svd_real(&shifted.map(|e| e.re)).map(|(_, s, v)| (s, to_complex(&v))) } else {
        svd_complex(&shifted).map(|(_, s, v)| (s, v))
    };
    let Ok((sv, right)) = svd else { return Vec::new() };
    let mut out = Vec::new();
    for (rank, k) in (0..n).rev().enumerate().take(count) {
        if rank > 0 && sv[k] > tol {
            break;
        }
        out.push(right.column(k).into_owned());
    }
    out
}

/// `σ_max / σ_min` of the column-normalized matrix; infinite when singular.
fn condition_number(x: &CMatrix) -> f64 {
    if x.is_empty() {
        return 1.0;
    }
    let mut y = x.clone();
    for mut col in y.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= C64::new(norm, 0.0);
        }
    }
    let Ok((_, sv, _)) = svd_complex(&y) else { return f64::INFINITY };
    let (max, min) = (sv[0], sv[sv.len() - 1]);
    if min <= max * f64::EPSILON {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &AdjacencyMatrix) -> Result<f64> {
    let s = RealSchur::new(a.matrix())?;
    Ok(s.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max))
}

/// `‖A s / max|λ(A)| − s‖₁`.
pub fn total_variation(a: &AdjacencyMatrix, s: &GraphSignal) -> Result<f64> {
    s.check_len(a.n())?;
    let rho = spectral_radius(a)?;
    if rho <= ZERO_EIGENVALUE_RTOL * a.frobenius_norm() {
        return Err(Error::ZeroSpectralRadius);
    }
    let shifted = a.matrix() * s.values() / rho - s.values();
    Ok(shifted.iter().map(|x| x.abs()).sum())
}

/// `|1 − λ / λ_max|`, the total variation of an ℓ1-normalized eigenvector.
pub fn eigenvector_tv(lambda: C64, lambda_max_abs: f64) -> Result<f64> {
    if lambda_max_abs.is_nan() || lambda_max_abs <= 0.0 {
        return Err(Error::ZeroSpectralRadius);
    }
    Ok((C64::new(1.0, 0.0) - lambda / lambda_max_abs).norm())
}

/// Principal argument in `(−π, π]` of a unit-modulus eigenvalue.
pub fn angular_frequency(lambda: C64) -> Result<f64> {
    if (lambda.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::OffUnitCircle(format!("{lambda}")));
    }
    let w = lambda.arg();
    Ok(if w <= -PI { PI } else { w })
}

/// Unit ℓ2 norm, then rotated so the first (near-)largest entry is positive real.
fn canonicalize(x: &CVector) -> (CVector, C64) {
    let norm = x.norm();
    if norm == 0.0 {
        return (x.clone(), C64::new(1.0, 0.0));
    }
    let max = x.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let pivot = x.iter().position(|e| e.norm() >= max * (1.0 - 1e-9)).unwrap();
    let p = x[pivot];
    let factor = p.conj() / (p.norm() * norm);
    let mut y = x * factor;
    y[pivot] = C64::new(y[pivot].norm(), 0.0);
    if x.iter().all(|e| e.im == 0.0) {
        y.iter_mut().for_each(|e| e.im = 0.0);
    }
    (y, factor)
}

/// Descending lexicographic order over `(re, im)` of the entries, so that
/// standard basis vectors come out in index order.
fn lexicographic(a: &CVector, b: &CVector) -> Ordering {
    for (y, x) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Splits sorted values into maximal runs whose consecutive gaps are ≤ `tol`.
fn chain_groups(sorted: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            groups.push(start..i);
            start = i;
        }
    }
    groups
}

/// Orders the eigenvectors by variation under `measure`.
pub fn build_gft(sys: &EigenSystem, measure: Measure) -> Result<OrderedGftBasis> {
    if !sys.diagonalizable {
        return Err(Error::NotDiagonalizable(sys.basis_condition));
    }
    let n = sys.n();
    let variation: Vec<f64> = match measure {
        Measure::TotalVariation => {
            let lmax = sys.spectral_radius();
            sys.eigenvalues.iter().map(|&l| eigenvector_tv(l, lmax)).collect::<Result<_>>()?
        }
        Measure::AngularFrequency => sys
            .eigenvalues
            .iter()
            .map(|&l| angular_frequency(l).map(f64::abs))
            .collect::<Result<_>>()?,
    };
    let canon: Vec<(CVector, C64)> =
        (0..n).map(|i| canonicalize(&sys.eigenvectors.column(i).into_owned())).collect();

    // ordering units: conjugate pairs stay together under angular frequency,
    // the member with negative phase first
    let mut units: Vec<Vec<usize>> = Vec::new();
    let mut taken = vec![false; n];
    for i in 0..n {
        if taken[i] {
            continue;
        }
        taken[i] = true;
        match (measure, sys.conjugate_of[i]) {
            (Measure::AngularFrequency, Some(j)) if !taken[j] => {
                taken[j] = true;
                let (neg, pos) = if sys.eigenvalues[i].im < 0.0 { (i, j) } else { (j, i) };
                units.push(vec![neg, pos]);
            }
            _ => units.push(vec![i]),
        }
    }
    units.sort_by(|u, v| {
        variation[u[0]].total_cmp(&variation[v[0]]).then_with(|| lexicographic(&canon[u[0]].0, &canon[v[0]].0))
    });
    let unit_var: Vec<f64> = units.iter().map(|u| variation[u[0]]).collect();
    for g in chain_groups(&unit_var, DEGENERACY_TOL) {
        units[g].sort_by(|u, v| lexicographic(&canon[u[0]].0, &canon[v[0]].0));
    }
    let order: Vec<usize> = units.into_iter().flatten().collect();

    let basis = CMatrix::from_fn(n, n, |r, c| canon[order[c]].0[r]);
    let forward = if sys.has_unitary_basis() {
        basis.adjoint()
    } else {
        let inv = sys.inverse_basis.as_ref().expect("diagonalizable system has an inverse");
        CMatrix::from_fn(n, n, |r, c| inv[(order[r], c)] / canon[order[r]].1)
    };
    let variations: Vec<f64> = order.iter().map(|&i| variation[i]).collect();
    let degeneracy_groups = chain_groups(&variations, DEGENERACY_TOL);
    Ok(OrderedGftBasis {
        basis,
        forward,
        eigenvalues: order.iter().map(|&i| sys.eigenvalues[i]).collect(),
        variations,
        measure,
        degeneracy_groups,
    })
}

pub fn gft_forward(b: &OrderedGftBasis, s: &GraphSignal) -> Result<CVector> {
    s.check_len(b.n())?;
    Ok(&b.forward * to_complex(&DMatrix::from_column_slice(s.len(), 1, s.as_slice())).column(0))
}

/// Inverse transform; fails if the result is not real up to `1e-8 · ‖c‖₂`.
pub fn gft_inverse(b: &OrderedGftBasis, c: &CVector) -> Result<GraphSignal> {
    if c.len() != b.n() {
        return Err(Error::DimensionMismatch { expected: b.n(), found: c.len() });
    }
    let y = &b.basis * c;
    let residue = y.iter().map(|e| e.im * e.im).sum::<f64>().sqrt();
    let limit = 1e-8 * c.norm();
    if residue > limit {
        return Err(Error::ImaginaryResidue { residue, limit });
    }
    GraphSignal::new(y.map(|e| e.re))
}

/// `(variation, |coefficient|)` pairs in basis order.
pub fn spectrum(b: &OrderedGftBasis, s: &GraphSignal) -> Result<Vec<(f64, f64)>> {
    let c = gft_forward(b, s)?;
    Ok(b.variations.iter().zip(c.iter()).map(|(&v, x)| (v, x.norm())).collect())
}

fn orthonormal_columns(m: CMatrix) -> Result<CMatrix> {
    Ok(svd_complex(&m)?.0)
}

/// True iff every degeneracy group spans the same subspace in both bases, up
/// to principal-angle sines of `tol`.
pub fn check_equivalence(b1: &OrderedGftBasis, b2: &OrderedGftBasis, tol: f64) -> Result<bool> {
    if b1.n() != b2.n() {
        return Err(Error::DimensionMismatch { expected: b1.n(), found: b2.n() });
    }
    if b1.degeneracy_groups != b2.degeneracy_groups {
        return Err(Error::GroupStructureMismatch);
    }
    for g in &b1.degeneracy_groups {
        let x1 = orthonormal_columns(b1.basis.columns(g.start, g.len()).into_owned())?;
        let x2 = orthonormal_columns(b2.basis.columns(g.start, g.len()).into_owned())?;
        let residual = &x2 - &x1 * (x1.adjoint() * &x2);
        if svd_complex(&residual)?.1[0] > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Λ = Σ·Θ`: moduli and unit phases, with `Θ = 1` for zero eigenvalues.
pub fn magnitude_phase_split(sys: &EigenSystem) -> (Vec<f64>, Vec<C64>) {
    let cut = ZERO_EIGENVALUE_RTOL * sys.spectral_radius();
    sys.eigenvalues
        .iter()
        .map(|&l| {
            let r = l.norm();
            if r <= cut {
                (r, C64::new(1.0, 0.0))
            } else {
                (r, l / r)
            }
        })
        .unzip()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectraMatching {
    /// Largest gap between matched `|λ(A)|` and `λ(P)`.
    pub magnitude_discrepancy: f64,
    /// Largest gap between matched phases of `λ(A)` and `λ(Q)`.
    pub phase_discrepancy: f64,
}

impl SpectraMatching {
    pub fn max_discrepancy(&self) -> f64 {
        self.magnitude_discrepancy.max(self.phase_discrepancy)
    }
}

fn greedy_match(from: &[C64], to: &[C64]) -> f64 {
    let mut used = vec![false; to.len()];
    let mut worst: f64 = 0.0;
    for x in from {
        let (best, dist) = to
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("multisets of equal size");
        used[best] = true;
        worst = worst.max(dist);
    }
    worst
}

/// For normal A: `|λ(A)|` matches `λ(P)` and the phases of `λ(A)` match `λ(Q)`.
pub fn match_normal_spectra(a: &AdjacencyMatrix) -> Result<SpectraMatching> {
    if !is_normal(a, NORMALITY_TOL) {
        return Err(Error::NotNormal);
    }
    let sys = eig_general(a, f64::INFINITY)?;
    let (sigma, theta) = magnitude_phase_split(&sys);
    let polar = polar_decompose(a)?;
    let p = eig_symmetric(&polar.p)?;
    let q = eig_orthogonal(&polar.q)?;
    let mags: Vec<C64> = sigma.iter().map(|&r| C64::new(r, 0.0)).collect();
    Ok(SpectraMatching {
        magnitude_discrepancy: greedy_match(&mags, &p.eigenvalues),
        phase_discrepancy: greedy_match(&theta, &q.eigenvalues),
    })
}
