//! Runs the M-block cyclic case study and prints every metric and check.
//!
//! ```text
//! cargo run --example mblock_case_study -- [config.json] [out_dir]
//! ```

use std::path::PathBuf;

use polar_gft::experiments::{run_case_study, CaseStudyConfig};

fn main() -> polar_gft::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg: CaseStudyConfig = match args.next() {
        Some(path) => polar_gft::io::read_json(&PathBuf::from(path))?,
        None => CaseStudyConfig::default(),
    };
    cfg.output_dir = args.next().map(PathBuf::from);
    let report = run_case_study(&cfg)?;

    println!("n = {}, λmax(P) = {:.4}, A diagonalizable: {}", report.n, report.lambda_max_p, report.a_diagonalizable);
    println!(
        "input: within-block {:.4}, block-to-block {:.4}",
        report.within_block_input, report.block_to_block_input
    );
    println!("{:<10} {:>9} {:>9} {:>7} {:>7} {:>7} {:>7}", "combo", "within", "b2b", "loc P", "loc Q", "mid A", "corr");
    for c in &report.combinations {
        println!(
            "{:<10} {:>9.4} {:>9.4} {:>7.3} {:>7.3} {:>7} {:>7}",
            c.name,
            c.within_block,
            c.block_to_block,
            c.localization_p,
            c.localization_q,
            c.mid_frequency_a.map_or("-".into(), |x| format!("{x:.3}")),
            c.correlation.map_or("-".into(), |x| format!("{x:.3}")),
        );
    }
    println!("structure: {:?}", report.structure);
    for check in &report.checks {
        let mark = if check.passed { "pass" } else { "FAIL" };
        println!("{mark} {} = {:.4} ({} {})", check.name, check.value, check.rule, check.threshold);
    }
    println!("overall: {}", if report.passed { "pass" } else { "fail" });
    Ok(())
}
