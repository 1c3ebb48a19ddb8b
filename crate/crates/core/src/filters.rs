//! Polynomial graph filters: least-squares design, Horner application, the
//! cascade `p_θ(Q)·p_r(P)` and its separable spectral counterpart.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::decomposition::{polar_decompose, PolarFactors};
use crate::error::{Error, Result};
use crate::graph::{is_normal, random_signal, AdjacencyMatrix, GraphSignal};
use crate::linalg::{frobenius_c, CMatrix, CVector, C64};
use crate::spectral::{eig_general, magnitude_phase_split, EigenSystem, DEFAULT_COND_LIMIT};

pub const DEFAULT_DEGREE: usize = 8;
pub const DEFAULT_CIRCLE_CUTOFF: f64 = PI / 2.0;
/// Default PSD cutoff as a fraction of `λ_max`.
pub const DEFAULT_PSD_CUTOFF_RATIO: f64 = 0.5;

const GRID_POINTS: usize = 512;
const RIDGE: f64 = 1e-10;
const EQUIVALENCE_SIGNALS: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterDomain {
    PsdSpectrum,
    UnitCircle,
}

impl FilterDomain {
    pub fn name(self) -> &'static str {
        match self {
            FilterDomain::PsdSpectrum => "psd-spectrum",
            FilterDomain::UnitCircle => "unit-circle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Lowpass,
    Highpass,
    Custom,
}

impl FilterKind {
    pub fn short(self) -> &'static str {
        match self {
            FilterKind::Lowpass => "low",
            FilterKind::Highpass => "high",
            FilterKind::Custom => "custom",
        }
    }
}

/// `p(t) = c₀ + c₁t + … + c_d t^d` tagged with the spectral domain it was
/// designed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialFilter {
    pub domain: FilterDomain,
    pub kind: FilterKind,
    pub cutoff: f64,
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub fit_residual: f64,
}

impl PolynomialFilter {
    pub fn custom(domain: FilterDomain, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument("a filter needs at least one coefficient".into()));
        }
        let f = Self {
            domain,
            kind: FilterKind::Custom,
            cutoff: 0.0,
            degree: coefficients.len() - 1,
            coefficients,
            fit_residual: 0.0,
        };
        f.validate()?;
        Ok(f)
    }

    /// The identity filter `p ≡ 1`.
    pub fn identity(domain: FilterDomain) -> Self {
        Self::custom(domain, vec![1.0]).expect("constant filter is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.len() != self.degree + 1 {
            return Err(Error::InvalidArgument(format!(
                "degree {} needs {} coefficients, got {}",
                self.degree,
                self.degree + 1,
                self.coefficients.len()
            )));
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) || !self.cutoff.is_finite() {
            return Err(Error::NonFinite);
        }
        if self.fit_residual.is_nan() || self.fit_residual < 0.0 {
            return Err(Error::InvalidArgument("fit_residual must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn eval_complex(&self, z: C64) -> C64 {
        self.coefficients.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `p(e^{jω})`, summed term by term so that `p(e^{−jω})` is exactly the
    /// conjugate of `p(e^{jω})`.
    pub fn eval_circle(&self, omega: f64) -> C64 {
        self.coefficients.iter().enumerate().fold(C64::new(0.0, 0.0), |acc, (k, c)| {
            let a = k as f64 * omega;
            acc + C64::new(c * a.cos(), c * a.sin())
        })
    }

    fn expect_domain(&self, domain: FilterDomain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::DomainMismatch { expected: domain.name(), found: self.domain.name() });
        }
        Ok(())
    }
}

/// Sampled response of a filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterResponse {
    /// λ for PSD filters, ω for unit-circle filters.
    pub points: Vec<f64>,
    pub values: Vec<C64>,
}

/// Response on `samples` evenly spaced points of `[0, λ_max]`, or of `[−π, π]`
/// for unit-circle filters.
pub fn filter_response(f: &PolynomialFilter, lambda_max: f64, samples: usize) -> FilterResponse {
    let (lo, hi) = match f.domain {
        FilterDomain::PsdSpectrum => (0.0, lambda_max),
        FilterDomain::UnitCircle => (-PI, PI),
    };
    let points: Vec<f64> = (0..samples)
        .map(|i| {
            if samples == 1 {
                return lo;
            }
            // built from the midpoint outwards so the circle grid is exactly symmetric
            let offset = (2.0 * i as f64 - (samples - 1) as f64) / (samples - 1) as f64;
            0.5 * (lo + hi) + 0.5 * (hi - lo) * offset
        })
        .collect();
    let values = points
        .iter()
        .map(|&x| match f.domain {
            FilterDomain::PsdSpectrum => C64::new(f.eval(x), 0.0),
            FilterDomain::UnitCircle => f.eval_circle(x),
        })
        .collect();
    FilterResponse { points, values }
}

fn grid(hi: f64) -> impl Iterator<Item = f64> {
    (0..GRID_POINTS).map(move |i| hi * i as f64 / (GRID_POINTS - 1) as f64)
}

fn check_kind(kind: FilterKind) -> Result<()> {
    if kind == FilterKind::Custom {
        return Err(Error::InvalidArgument("only lowpass and highpass filters can be designed".into()));
    }
    Ok(())
}

fn solve_normal_equations(g: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    match Cholesky::new(g.clone()) {
        Some(ch) => Ok(ch.solve(&rhs)),
        None => g.lu().solve(&rhs).ok_or(Error::NoConvergence("filter least squares")),
    }
}

/// Least-squares polynomial fit to an ideal lowpass or highpass response on
/// the spectrum `[0, λ_max]` of a PSD operator.
///
/// Variation on a PSD operator is `1 − λ/λ_max`, so "low" frequencies sit near
/// `λ_max`: a lowpass filter passes eigenvalues with `λ_max − λ ≤ cutoff`.
pub fn design_psd_filter(kind: FilterKind, cutoff: f64, degree: usize, lambda_max: f64) -> Result<PolynomialFilter> {
    check_kind(kind)?;
    if !lambda_max.is_finite() || lambda_max <= 0.0 {
        return Err(Error::InvalidArgument(format!("degenerate spectrum interval [0, {lambda_max}]")));
    }
    if !(cutoff > 0.0 && cutoff <= lambda_max) {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} outside (0, {lambda_max}]")));
    }
    let d = degree;
    let rel_cut = cutoff / lambda_max;
    // fit in x = λ/λ_max for conditioning, then rescale
    let xs: Vec<f64> = grid(1.0).collect();
    let target: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let pass_low = 1.0 - x <= rel_cut;
            match kind {
                FilterKind::Lowpass => f64::from(u8::from(pass_low)),
                _ => f64::from(u8::from(!pass_low)),
            }
        })
        .collect();
    let v = DMatrix::from_fn(xs.len(), d + 1, |i, k| xs[i].powi(k as i32));
    let g = v.transpose() * &v + DMatrix::identity(d + 1, d + 1) * RIDGE;
    let rhs = v.transpose() * DVector::from_column_slice(&target);
    let c = solve_normal_equations(g, rhs)?;
    let fitted = &v * &c;
    let rms = (fitted.iter().zip(&target).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    let coefficients = c.iter().enumerate().map(|(k, ck)| ck / lambda_max.powi(k as i32)).collect();
    Ok(PolynomialFilter {
        domain: FilterDomain::PsdSpectrum,
        kind,
        cutoff,
        degree: d,
        coefficients,
        fit_residual: rms,
    })
}

/// Real-coefficient least-squares fit on the unit circle. The target is the
/// ideal indicator in `|ω|` times the linear phase `e^{jDω}`, `D = ⌊d/2⌋`, so
/// the magnitude response approximates the indicator.
pub fn design_circle_filter(kind: FilterKind, cutoff: f64, degree: usize) -> Result<PolynomialFilter> {
    check_kind(kind)?;
    if !(cutoff > 0.0 && cutoff <= PI) {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} outside (0, π]")));
    }
    let d = degree;
    let delay = (d / 2) as f64;
    let ws: Vec<f64> = grid(PI).collect();
    let target: Vec<f64> = ws
        .iter()
        .map(|&w| {
            let pass_low = w <= cutoff;
            match kind {
                FilterKind::Lowpass => f64::from(u8::from(pass_low)),
                _ => f64::from(u8::from(!pass_low)),
            }
        })
        .collect();
    let mut g = DMatrix::<f64>::identity(d + 1, d + 1) * RIDGE;
    let mut rhs = DVector::<f64>::zeros(d + 1);
    for (&w, &t) in ws.iter().zip(&target) {
        for k in 0..=d {
            for l in 0..=d {
                g[(k, l)] += ((k as f64 - l as f64) * w).cos();
            }
            rhs[k] += t * ((delay - k as f64) * w).cos();
        }
    }
    let c = solve_normal_equations(g, rhs)?;
    let mut f = PolynomialFilter {
        domain: FilterDomain::UnitCircle,
        kind,
        cutoff,
        degree: d,
        coefficients: c.iter().copied().collect(),
        fit_residual: 0.0,
    };
    let ss: f64 = ws
        .iter()
        .zip(&target)
        .map(|(&w, &t)| (f.eval_circle(w) * C64::from_polar(1.0, -delay * w) - t).norm_sqr())
        .sum();
    f.fit_residual = (ss / ws.len() as f64).sqrt();
    Ok(f)
}

/// Horner evaluation of `p(M)·s` with exactly `d` matrix–vector products.
pub fn apply_polynomial(m: &DMatrix<f64>, f: &PolynomialFilter, s: &GraphSignal) -> Result<GraphSignal> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    s.check_len(m.nrows())?;
    let x = s.values();
    let mut coeffs = f.coefficients.iter().rev();
    let mut y = x * *coeffs.next().expect("filters have at least one coefficient");
    for c in coeffs {
        y = m * y;
        y.axpy(*c, x, 1.0);
    }
    GraphSignal::new(y)
}

/// `p(M)` as a dense matrix. Only used to cross-check the vector paths.
pub fn matrix_polynomial(m: &DMatrix<f64>, f: &PolynomialFilter) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for c in f.coefficients.iter().rev() {
        out = m * out;
        for i in 0..n {
            out[(i, i)] += c;
        }
    }
    out
}

/// `y = p_θ(Q)·p_r(P)·s`.
pub fn cascade_filter(
    pf: &PolarFactors,
    p_theta: &PolynomialFilter,
    p_r: &PolynomialFilter,
    s: &GraphSignal,
) -> Result<GraphSignal> {
    p_r.expect_domain(FilterDomain::PsdSpectrum)?;
    p_theta.expect_domain(FilterDomain::UnitCircle)?;
    let shaped = apply_polynomial(&pf.p, p_r, s)?;
    apply_polynomial(&pf.q, p_theta, &shaped)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableOutput {
    pub signal: GraphSignal,
    /// `‖Im(X·diag(r)·X⁻¹·s)‖₂`
    pub imaginary_residue: f64,
    /// Set when the residue exceeds `1e-6·‖s‖₂`.
    pub residue_warning: bool,
}

/// Per-eigenvalue responses `p_r(|λ|)·p_θ(λ/|λ|)`.
pub fn separable_responses(sys: &EigenSystem, p_theta: &PolynomialFilter, p_r: &PolynomialFilter) -> Vec<C64> {
    let (sigma, theta) = magnitude_phase_split(sys);
    sigma.iter().zip(&theta).map(|(&r, &t)| p_theta.eval_complex(t) * p_r.eval(r)).collect()
}

/// `X·diag(p_r(Σ)·p_θ(Θ))·X⁻¹·s` from the eigendecomposition of A.
pub fn separable_spectral_filter(
    a: &AdjacencyMatrix,
    p_theta: &PolynomialFilter,
    p_r: &PolynomialFilter,
    s: &GraphSignal,
) -> Result<SeparableOutput> {
    let sys = eig_general(a, DEFAULT_COND_LIMIT)?;
    separable_with_system(&sys, p_theta, p_r, s)
}

/// As [`separable_spectral_filter`] with a precomputed eigensystem.
pub fn separable_with_system(
    sys: &EigenSystem,
    p_theta: &PolynomialFilter,
    p_r: &PolynomialFilter,
    s: &GraphSignal,
) -> Result<SeparableOutput> {
    p_r.expect_domain(FilterDomain::PsdSpectrum)?;
    p_theta.expect_domain(FilterDomain::UnitCircle)?;
    s.check_len(sys.n())?;
    let inverse = match (&sys.inverse_basis, sys.diagonalizable) {
        (Some(inv), true) => inv,
        _ => return Err(Error::NotDiagonalizable(sys.basis_condition)),
    };
    let responses = separable_responses(sys, p_theta, p_r);
    let sc: CVector = s.values().map(|x| C64::new(x, 0.0));
    let mut coeffs = inverse * sc;
    for (c, r) in coeffs.iter_mut().zip(&responses) {
        *c *= r;
    }
    let y = &sys.eigenvectors * coeffs;
    let imaginary_residue = y.iter().map(|e| e.im * e.im).sum::<f64>().sqrt();
    Ok(SeparableOutput {
        signal: GraphSignal::new(y.map(|e| e.re))?,
        imaginary_residue,
        residue_warning: imaginary_residue > 1e-6 * s.norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CascadeEquivalenceReport {
    /// Largest `‖cascade − separable‖₂ / ‖s‖₂` over the seeded signals.
    pub signal_residual: f64,
    /// `‖p_θ(Q)·p_r(P) − X·p_θ(Θ)·p_r(Σ)·Xᴴ‖_F`.
    pub matrix_residual: f64,
}

impl CascadeEquivalenceReport {
    pub fn max_residual(&self) -> f64 {
        self.signal_residual.max(self.matrix_residual)
    }
}

/// Checks that cascade and separable filtering agree on a normal A.
pub fn verify_cascade_equivalence(
    a: &AdjacencyMatrix,
    p_theta: &PolynomialFilter,
    p_r: &PolynomialFilter,
) -> Result<CascadeEquivalenceReport> {
    if !is_normal(a, 1e-10) {
        return Err(Error::NotNormal);
    }
    let n = a.n();
    let polar = polar_decompose(a)?;
    let sys = eig_general(a, DEFAULT_COND_LIMIT)?;
    if !sys.diagonalizable {
        return Err(Error::NotDiagonalizable(sys.basis_condition));
    }
    let mut signal_residual: f64 = 0.0;
    for seed in 0..EQUIVALENCE_SIGNALS {
        let s = random_signal(n, seed)?;
        let cascade = cascade_filter(&polar, p_theta, p_r, &s)?;
        let separable = separable_with_system(&sys, p_theta, p_r, &s)?;
        let gap = (cascade.values() - separable.signal.values()).norm() / s.norm();
        signal_residual = signal_residual.max(gap);
    }

    let brute = matrix_polynomial(&polar.q, p_theta) * matrix_polynomial(&polar.p, p_r);
    let responses = separable_responses(&sys, p_theta, p_r);
    let x = &sys.eigenvectors;
    let mut xr = x.clone();
    for (j, r) in responses.iter().enumerate() {
        xr.column_mut(j).iter_mut().for_each(|e| *e *= r);
    }
    let spectral: CMatrix = xr * x.adjoint();
    let diff = spectral - brute.map(|e| C64::new(e, 0.0));
    Ok(CascadeEquivalenceReport { signal_residual, matrix_residual: frobenius_c(&diff) })
}
