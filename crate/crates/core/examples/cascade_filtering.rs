//! Designs a PSD lowpass p_r and a unit-circle lowpass p_θ, then compares the
//! cascade p_θ(Q)·p_r(P)·s with the separable spectral filter on a normal
//! graph (where they agree) and a non-normal one (where they do not).
//!
//! ```text
//! cargo run --example cascade_filtering
//! ```

use std::f64::consts::FRAC_PI_2;

use polar_gft::decomposition::polar_decompose;
use polar_gft::filters::{
    cascade_filter, design_circle_filter, design_psd_filter, filter_response, separable_spectral_filter,
    verify_cascade_equivalence, FilterKind,
};
use polar_gft::graph::{generate_circulant, random_signal, AdjacencyMatrix};
use polar_gft::spectral::eig_symmetric;

fn compare(name: &str, a: &AdjacencyMatrix) -> polar_gft::Result<()> {
    let pf = polar_decompose(a)?;
    let lambda_max = eig_symmetric(&pf.p)?.spectral_radius();
    let p_r = design_psd_filter(FilterKind::Lowpass, 0.5 * lambda_max, 8, lambda_max)?;
    let p_theta = design_circle_filter(FilterKind::Lowpass, FRAC_PI_2, 8)?;
    let s = random_signal(a.n(), 1)?;

    let cascade = cascade_filter(&pf, &p_theta, &p_r, &s)?;
    let separable = separable_spectral_filter(a, &p_theta, &p_r, &s)?;
    let gap = (cascade.values() - separable.signal.values()).norm() / s.norm();
    println!(
        "{name:<24} ‖cascade − separable‖/‖s‖ = {gap:.2e}, imaginary residue {:.2e}",
        separable.imaginary_residue
    );
    if let Ok(report) = verify_cascade_equivalence(a, &p_theta, &p_r) {
        println!("{:<24} matrix residual {:.2e}", "", report.matrix_residual);
    }
    Ok(())
}

fn main() -> polar_gft::Result<()> {
    let circle = design_circle_filter(FilterKind::Lowpass, FRAC_PI_2, 8)?;
    let response = filter_response(&circle, 1.0, 9);
    println!("p_θ magnitude on the circle:");
    for (w, v) in response.points.iter().zip(&response.values) {
        println!("    ω = {w:+.3}  |p_θ| = {:.3}", v.norm());
    }

    compare("normal circulant n=12", &generate_circulant(12, &[(1, 1.0), (2, 0.5), (5, -0.3)])?)?;
    let skew = AdjacencyMatrix::from_edges(
        6,
        &[(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5), (2, 3, 1.0), (3, 4, 1.5), (4, 5, 1.0), (5, 3, 0.7), (4, 1, 0.3)],
    )?;
    compare("non-normal 6-node graph", &skew)?;
    Ok(())
}
