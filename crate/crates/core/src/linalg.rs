//! Dense helpers shared by the decomposition and spectral modules.
//!
//! The real Schur factorization lives here because the Francis iteration in
//! `nalgebra::Schur` has no exceptional shifts and stalls on cyclic
//! permutation matrices, which are exactly the operators this crate cares
//! about most.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Maximum QR sweeps per eigenvalue before the Schur iteration gives up.
const SCHUR_MAX_SWEEPS: usize = 60;

/// Real Schur factorization `A = Z T Zᵀ` with `Z` orthogonal and `T`
/// quasi upper triangular (1×1 and 2×2 diagonal blocks).
#[derive(Debug, Clone)]
pub struct RealSchur {
    pub z: DMatrix<f64>,
    pub t: DMatrix<f64>,
    /// Eigenvalues in diagonal-block order; complex pairs appear as
    /// `(re + j·im, re − j·im)` with `im > 0` first.
    pub eigenvalues: Vec<C64>,
    /// Start index and size (1 or 2) of every diagonal block.
    pub blocks: Vec<(usize, usize)>,
}

impl RealSchur {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "real Schur needs a square matrix");
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut h = a.clone();
        let mut z = DMatrix::<f64>::identity(n, n);
        if n == 0 {
            return Ok(RealSchur { z, t: h, eigenvalues: Vec::new(), blocks: Vec::new() });
        }
        if h.iter().all(|x| *x == 0.0) {
            return Ok(RealSchur {
                z,
                t: h,
                eigenvalues: vec![C64::new(0.0, 0.0); n],
                blocks: (0..n).map(|i| (i, 1)).collect(),
            });
        }
        hessenberg(&mut h, &mut z);
        let (re, im) = francis_qr(&mut h, &mut z)?;

        for j in 0..n {
            for i in (j + 2)..n {
                h[(i, j)] = 0.0;
            }
        }
        let mut blocks = Vec::with_capacity(n);
        let mut eigenvalues = Vec::with_capacity(n);
        let mut i = 0;
        while i < n {
            if i + 1 < n && im[i] > 0.0 && im[i + 1] < 0.0 {
                blocks.push((i, 2));
                eigenvalues.push(C64::new(re[i], im[i]));
                eigenvalues.push(C64::new(re[i + 1], im[i + 1]));
                i += 2;
            } else {
                if i + 1 < n {
                    h[(i + 1, i)] = 0.0;
                }
                blocks.push((i, 1));
                eigenvalues.push(C64::new(h[(i, i)], 0.0));
                i += 1;
            }
        }
        Ok(RealSchur { z, t: h, eigenvalues, blocks })
    }
}

/// Householder reduction to upper Hessenberg form, accumulating the
/// orthogonal similarity into `z`.
fn hessenberg(h: &mut DMatrix<f64>, z: &mut DMatrix<f64>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }

    for m in (1..high).rev() {
        if h[(m, m - 1)] == 0.0 {
            continue;
        }
        for i in (m + 1)..=high {
            ort[i] = h[(i, m - 1)];
        }
        for j in m..=high {
            let mut g = 0.0;
            for i in m..=high {
                g += ort[i] * z[(i, j)];
            }
            // two divisions to avoid underflow
            g = (g / ort[m]) / h[(m, m - 1)];
            for i in m..=high {
                z[(i, j)] += g * ort[i];
            }
        }
    }
    for j in 0..n {
        for i in (j + 2)..n {
            h[(i, j)] = 0.0;
        }
    }
}

/// Double-shift Francis QR on an upper Hessenberg matrix with Wilkinson and
/// ad hoc exceptional shifts. Returns real and imaginary eigenvalue parts in
/// diagonal order.
#[allow(unused_assignments)]
fn francis_qr(h: &mut DMatrix<f64>, v: &mut DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let nn = h.nrows();
    let low = 0usize;
    let high = nn - 1;
    let eps = f64::EPSILON;
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut w, mut x, mut y): (f64, f64, f64);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    while n >= low as isize {
        let nu = n as usize;
        // look for a single small sub-diagonal element
        let mut l = nu;
        while l > low {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            h[(nu, nu)] += exshift;
            d[nu] = h[(nu, nu)];
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;
            x = h[(nu, nu)];

            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
                x = h[(nu, nu - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in (nu - 1)..nn {
                    z = h[(nu - 1, j)];
                    h[(nu - 1, j)] = q * z + p * h[(nu, j)];
                    h[(nu, j)] = q * h[(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[(i, nu - 1)];
                    h[(i, nu - 1)] = q * z + p * h[(i, nu)];
                    h[(i, nu)] = q * h[(i, nu)] - p * z;
                }
                for i in low..=high {
                    z = v[(i, nu - 1)];
                    v[(i, nu - 1)] = q * z + p * v[(i, nu)];
                    v[(i, nu)] = q * v[(i, nu)] - p * z;
                }
                h[(nu, nu - 1)] = 0.0;
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }

            // exceptional shifts break the symmetry that stalls plain
            // Francis steps on permutation-like matrices
            if iter % 30 == 10 {
                exshift += x;
                for i in low..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter % 30 == 20 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            if iter > SCHUR_MAX_SWEEPS * nn.max(1) {
                return Err(Error::NoConvergence("real Schur"));
            }

            // look for two consecutive small sub-diagonal elements
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // double QR step on rows l..=n and columns m..=n
            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                    for i in low..=high {
                        p = x * v[(i, k)] + y * v[(i, k + 1)];
                        if notlast {
                            p += z * v[(i, k + 2)];
                            v[(i, k + 2)] -= p * r;
                        }
                        v[(i, k)] -= p;
                        v[(i, k + 1)] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((d, e))
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn frobenius_c(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `X·Xᵀ` with both triangles filled from one computation so the result is
/// exactly symmetric.
pub fn gram_rows(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let k = x.ncols();
    let mut out = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = 0.0;
            for l in 0..k {
                acc += x[(i, l)] * x[(j, l)];
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc;
        }
    }
    out
}

/// Thin SVD `M = U·diag(s)·Vᵀ` with `s` descending.
pub fn svd_real(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Ok((DMatrix::zeros(r, 0), Vec::new(), DMatrix::zeros(c, 0)));
    }
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = fm.thin_svd().map_err(|_| Error::NoConvergence("SVD"))?;
    let (u, v, d) = (svd.U(), svd.V(), svd.S().column_vector());
    let order = descending(k, |i| d[i]);
    Ok((
        DMatrix::from_fn(r, k, |i, j| u[(i, order[j])]),
        order.iter().map(|&i| d[i]).collect(),
        DMatrix::from_fn(c, k, |i, j| v[(i, order[j])]),
    ))
}

/// Complex thin SVD `M = U·diag(s)·Vᴴ` with `s` descending.
pub fn svd_complex(m: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Ok((CMatrix::zeros(r, 0), Vec::new(), CMatrix::zeros(c, 0)));
    }
    let fm = faer::Mat::<faer::c64>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = fm.thin_svd().map_err(|_| Error::NoConvergence("SVD"))?;
    let (u, v, d) = (svd.U(), svd.V(), svd.S().column_vector());
    let order = descending(k, |i| d[i].re);
    Ok((
        CMatrix::from_fn(r, k, |i, j| u[(i, order[j])]),
        order.iter().map(|&i| d[i].re).collect(),
        CMatrix::from_fn(c, k, |i, j| v[(i, order[j])]),
    ))
}

fn descending(k: usize, key: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| key(j).total_cmp(&key(i)));
    order
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    svd_real(m).map_or(f64::NAN, |(_, s, _)| s.first().copied().unwrap_or(0.0))
}

/// Rebuilds `W·diag(d)·Wᵀ` and symmetrizes the rounding.
pub fn symmetric_from_eigen(w: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let mut scaled = w.clone();
    for (j, dj) in d.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*dj);
    }
    let m = scaled * w.transpose();
    (&m + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[((i + 1) % n, i)] = 1.0;
        }
        a
    }

    fn check(a: &DMatrix<f64>) -> RealSchur {
        let s = RealSchur::new(a).unwrap();
        let n = a.nrows();
        let rec = &s.z * &s.t * s.z.transpose();
        assert!(frobenius(&(rec - a)) <= 1e-12 * frobenius(a).max(1.0));
        let orth = s.z.transpose() * &s.z - DMatrix::<f64>::identity(n, n);
        assert!(frobenius(&orth) <= 1e-12);
        for j in 0..n {
            for i in (j + 2)..n {
                assert_eq!(s.t[(i, j)], 0.0);
            }
        }
        s
    }

    #[test]
    fn schur_of_cycles_converges() {
        for n in [2, 3, 4, 5, 16, 32, 100] {
            let s = check(&cycle(n));
            for ev in &s.eigenvalues {
                assert!((ev.norm() - 1.0).abs() < 1e-10, "n={n} ev={ev}");
            }
        }
    }

    #[test]
    fn schur_of_random_matrix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(30, 30, |_, _| rng.random_range(-1.0..1.0));
        let s = check(&a);
        let trace: f64 = (0..30).map(|i| a[(i, i)]).sum();
        let sum: C64 = s.eigenvalues.iter().sum();
        assert!((sum.re - trace).abs() < 1e-10 && sum.im.abs() < 1e-10);
    }

    #[test]
    fn schur_of_zero_and_nilpotent() {
        let s = check(&DMatrix::zeros(3, 3));
        assert!(s.eigenvalues.iter().all(|e| e.norm() == 0.0));
        let mut a = DMatrix::zeros(2, 2);
        a[(1, 0)] = 1.0;
        let s = check(&a);
        assert!(s.eigenvalues.iter().all(|e| e.norm() < 1e-12));
    }

    #[test]
    fn gram_is_exactly_symmetric() {
        let a = DMatrix::from_fn(7, 7, |i, j| ((i * 7 + j) as f64 * 0.37).sin());
        let g = gram_rows(&a);
        assert_eq!(g, g.transpose());
    }
}
