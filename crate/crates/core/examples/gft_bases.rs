//! Builds the GFT bases of A, P, F and Q for a random digraph and prints the
//! spectrum of one signal in each, ordered by variation.
//!
//! ```text
//! cargo run --example gft_bases -- [n] [seed]
//! ```

use polar_gft::decomposition::polar_decompose;
use polar_gft::graph::{in_link_symmetrization, out_link_symmetrization, random_digraph, random_signal};
use polar_gft::spectral::{
    build_gft, check_equivalence, eig_general, eig_orthogonal, eig_symmetric, spectrum, Measure, OrderedGftBasis,
    DEFAULT_COND_LIMIT,
};

fn show(name: &str, b: &OrderedGftBasis, s: &polar_gft::graph::GraphSignal) -> polar_gft::Result<()> {
    let rows = spectrum(b, s)?;
    let energy: f64 = rows.iter().map(|(_, m)| m * m).sum();
    let low: f64 = rows[..rows.len() / 2].iter().map(|(_, m)| m * m).sum();
    println!("{name} ({}): low-half energy share {:.3}", b.measure.name(), low / energy);
    for (v, m) in rows.iter().take(4) {
        println!("    variation {v:.4}  |ŝ| {m:.4}");
    }
    Ok(())
}

fn main() -> polar_gft::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(11);

    let a = random_digraph(n, 0.4, seed);
    let s = random_signal(n, seed)?;
    let pf = polar_decompose(&a)?;

    let gft_p = build_gft(&eig_symmetric(&pf.p)?, Measure::TotalVariation)?;
    let gft_f = build_gft(&eig_symmetric(&pf.f)?, Measure::TotalVariation)?;
    let gft_q = build_gft(&eig_orthogonal(&pf.q)?, Measure::AngularFrequency)?;
    show("P", &gft_p, &s)?;
    show("F", &gft_f, &s)?;
    show("Q", &gft_q, &s)?;
    match eig_general(&a, DEFAULT_COND_LIMIT) {
        Ok(sys) if sys.diagonalizable => show("A", &build_gft(&sys, Measure::TotalVariation)?, &s)?,
        Ok(sys) => println!("A: not diagonalizable (cond {:.2e})", sys.basis_condition),
        Err(e) => println!("A: {e}"),
    }

    let c_out = build_gft(&eig_symmetric(out_link_symmetrization(&a).matrix())?, Measure::TotalVariation)?;
    let b_in = build_gft(&eig_symmetric(in_link_symmetrization(&a).matrix())?, Measure::TotalVariation)?;
    println!("GFT(P) ≡ GFT(AᵀA): {}", check_equivalence(&gft_p, &c_out, 1e-6)?);
    println!("GFT(F) ≡ GFT(AAᵀ): {}", check_equivalence(&gft_f, &b_in, 1e-6)?);
    Ok(())
}
