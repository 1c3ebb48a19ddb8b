//! An 8-node M-block cyclic graph whose own support has no Hamiltonian cycle
//! while the support of its orthogonal polar factor Q does.
//!
//! ```text
//! cargo run --example hamiltonian_q
//! ```

use polar_gft::decomposition::polar_decompose_with_pattern;
use polar_gft::experiments::eight_node_example;
use polar_gft::graph::{default_support, find_hamiltonian_cycle, generate_m_block_cyclic};

fn main() -> polar_gft::Result<()> {
    let cfg = eight_node_example();
    let (a, partition) = generate_m_block_cyclic(&cfg)?;
    let pf = polar_decompose_with_pattern(&a, &partition.cyclic_pattern())?;

    let edges_a = default_support(a.matrix());
    let edges_q = default_support(&pf.q);
    println!("blocks: {:?}", partition.assignment());
    println!("G(A): {} edges, Hamiltonian cycle {:?}", edges_a.len(), find_hamiltonian_cycle(&edges_a, a.n())?);
    println!("G(Q): {} edges, Hamiltonian cycle {:?}", edges_q.len(), find_hamiltonian_cycle(&edges_q, a.n())?);
    let m = partition.block_count();
    let cyclic = edges_q.iter().all(|&(from, to)| partition.block_of(to) == (partition.block_of(from) + 1) % m);
    println!("Q keeps the block-cyclic layout: {cyclic}");
    Ok(())
}
