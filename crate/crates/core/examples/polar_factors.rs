//! Polar decomposition of a random digraph: residuals, the square-root
//! oracle and a Monte Carlo check that Q is the closest orthogonal matrix.
//!
//! ```text
//! cargo run --example polar_factors -- [n] [seed]
//! ```

use polar_gft::decomposition::{closest_unitary_check, polar_decompose, psd_sqrt, verify_polar};
use polar_gft::graph::{in_link_symmetrization, out_link_symmetrization, random_digraph};

fn main() -> polar_gft::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(12);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let a = random_digraph(n, 0.3, seed);
    let pf = polar_decompose(&a)?;
    let r = verify_polar(&a, &pf);
    println!("n = {n}, rank = {}, ‖A‖_F = {:.4}", r.rank, a.frobenius_norm());
    println!("‖A − QP‖_F   = {:.2e}", r.left_residual);
    println!("‖A − FQ‖_F   = {:.2e}", r.right_residual);
    println!("‖QᵀQ − I‖_F  = {:.2e}", r.orthogonality_residual);
    println!("min λ(P), λ(F) = {:.2e}, {:.2e}", r.min_eigenvalue_p, r.min_eigenvalue_f);

    let p_oracle = psd_sqrt(out_link_symmetrization(&a).matrix())?;
    let f_oracle = psd_sqrt(in_link_symmetrization(&a).matrix())?;
    println!("‖P − √(AᵀA)‖_F = {:.2e}", (&pf.p - p_oracle).norm());
    println!("‖F − √(AAᵀ)‖_F = {:.2e}", (&pf.f - f_oracle).norm());

    let closest = closest_unitary_check(&a, &pf.q, 1000, seed)?;
    println!("Q closer to A than 1000 Haar samples: {closest}");
    Ok(())
}
