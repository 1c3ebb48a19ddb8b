//! For normal graphs the magnitudes and phases of λ(A) are the spectra of
//! P and Q. Prints the matching gap for a cycle, a circulant and a torus,
//! and the unit-circle spectrum of Q for a non-normal graph.
//!
//! ```text
//! cargo run --example normal_spectra
//! ```

use polar_gft::decomposition::polar_decompose;
use polar_gft::graph::{generate_circulant, generate_directed_cycle, generate_directed_torus, random_digraph};
use polar_gft::spectral::{eig_orthogonal, match_normal_spectra};

fn main() -> polar_gft::Result<()> {
    let graphs = [
        ("directed 32-cycle", generate_directed_cycle(32, 1.0)?),
        ("circulant n=11", generate_circulant(11, &[(1, 0.8), (3, -0.4)])?),
        ("6x6 directed torus", generate_directed_torus(6, 6)?),
    ];
    for (name, a) in &graphs {
        let m = match_normal_spectra(a)?;
        println!(
            "{name:<20} |λ(A)| vs λ(P): {:.2e}   ∠λ(A) vs λ(Q): {:.2e}",
            m.magnitude_discrepancy, m.phase_discrepancy
        );
    }

    let a = random_digraph(15, 0.3, 5);
    println!("random digraph: {}", match_normal_spectra(&a).map_or_else(|e| e.to_string(), |_| "normal".into()));
    let q = eig_orthogonal(&polar_decompose(&a)?.q)?;
    let worst = q.eigenvalues.iter().map(|l| (l.norm() - 1.0).abs()).fold(0.0, f64::max);
    println!("its Q still has every eigenvalue on the unit circle: max ||λ| − 1| = {worst:.2e}");
    Ok(())
}
