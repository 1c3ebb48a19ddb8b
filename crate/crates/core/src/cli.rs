//! Command-line front end. Exit codes: 0 success, 1 check failure, 2 input
//! error, 3 refused operation, 4 misuse.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::decomposition::{closest_unitary_check, polar_decompose, psd_sqrt, verify_polar, PolarFactors};
use crate::error::{Error, Result};
use crate::experiments::{run_case_study, CaseStudyConfig};
use crate::filters::{
    cascade_filter, design_circle_filter, design_psd_filter, separable_spectral_filter, verify_cascade_equivalence, FilterKind,
    PolynomialFilter, DEFAULT_CIRCLE_CUTOFF, DEFAULT_DEGREE, DEFAULT_PSD_CUTOFF_RATIO,
};
use crate::graph::{in_link_symmetrization, is_normal, out_link_symmetrization, AdjacencyMatrix};
use crate::io::{load_graph, load_signal, read_edge_list, read_json, save_matrix, write_json, write_signal, write_spectrum};
use crate::linalg::{frobenius, RealSchur};
use crate::spectral::{
    build_gft, check_equivalence, eig_general, eig_orthogonal, eig_symmetric, spectrum, Measure, DEFAULT_COND_LIMIT,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_MISUSE: i32 = 4;

const EQUIVALENCE_TOL: f64 = 1e-6;
const UNIT_CIRCLE_TOL: f64 = 1e-10;
const NORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "polar-gft", version, about = "Polar-decomposition graph Fourier transforms for digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Basis {
    A,
    P,
    F,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Cascade,
    Separable,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Polar factors Q, P, F of a Matrix Market graph.
    Decompose {
        graph: PathBuf,
        /// Output directory for Q.mtx, P.mtx, F.mtx and polar_report.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Residual tolerance, relative to max(1, ‖A‖_F).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// GFT spectrum (`variation,magnitude`) of a signal on one basis.
    Spectrum {
        graph: PathBuf,
        signal: PathBuf,
        /// A and P/F are ordered by total variation, Q by |angular frequency|.
        #[arg(long, value_enum, default_value = "p", ignore_case = true)]
        basis: Basis,
        /// Condition-number limit for the eigenbasis of A.
        #[arg(long, default_value_t = DEFAULT_COND_LIMIT)]
        cond_limit: f64,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filters a signal with p_θ(Q)·p_r(P) or its separable counterpart.
    Filter {
        graph: PathBuf,
        signal: PathBuf,
        /// p_r: a filter JSON file or `low` / `high`.
        #[arg(long, default_value = "low")]
        p_r: String,
        /// p_θ: a filter JSON file or `low` / `high`.
        #[arg(long, default_value = "low")]
        p_theta: String,
        #[arg(long, value_enum, default_value = "cascade")]
        mode: Mode,
        /// Degree of designed filters.
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        degree: usize,
        /// Unit-circle cutoff in radians for a designed p_θ.
        #[arg(long, default_value_t = DEFAULT_CIRCLE_CUTOFF)]
        cutoff: f64,
        /// PSD cutoff for a designed p_r, as a fraction of ‖A‖₂.
        #[arg(long, default_value_t = DEFAULT_PSD_CUTOFF_RATIO)]
        r_cutoff_ratio: f64,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the invariant battery on a graph and prints a pass/fail table.
    Verify {
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Monte Carlo trials for the closest-unitary check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Filter degree for the cascade/separable agreement check.
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        degree: usize,
        #[arg(long, default_value_t = DEFAULT_CIRCLE_CUTOFF)]
        cutoff: f64,
    },
    /// M-block cyclic case study; exit 0 iff every threshold is met.
    Mblock {
        /// Case-study JSON config; built-in default when omitted.
        config: Option<PathBuf>,
        #[arg(long, default_value = "mblock_out")]
        out: PathBuf,
        /// Overrides the graph seed of the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        degree: Option<usize>,
        /// Overrides the unit-circle cutoff.
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Converts a `src,dst,weight` edge list into Matrix Market.
    Convert {
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Node count; defaults to one past the largest node id.
        #[arg(long)]
        nodes: Option<usize>,
    },
}

/// Maps a library error onto the exit-code contract.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotDiagonalizable(_)
        | Error::TooLarge { .. }
        | Error::NotNormal
        | Error::ZeroSpectralRadius
        | Error::ImaginaryResidue { .. } => EXIT_REFUSED,
        Error::DomainMismatch { .. } | Error::InvalidArgument(_) => EXIT_MISUSE,
        Error::NoConvergence(_) => EXIT_CHECK_FAILED,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_MISUSE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Decompose { graph, out, tol } => decompose(&graph, &out, tol),
        Command::Spectrum { graph, signal, basis, cond_limit, out } => {
            cmd_spectrum(&graph, &signal, basis, cond_limit, out.as_deref())
        }
        Command::Filter { graph, signal, p_r, p_theta, mode, degree, cutoff, r_cutoff_ratio, out } => {
            let a = load_graph(&graph)?;
            let s = load_signal(&signal)?;
            let polar = polar_decompose(&a)?;
            let lambda_max = polar.svd.s.first().copied().unwrap_or(0.0);
            let p_r = filter_arg(&p_r, |kind| design_psd_filter(kind, r_cutoff_ratio * lambda_max, degree, lambda_max))?;
            let p_theta = filter_arg(&p_theta, |kind| design_circle_filter(kind, cutoff, degree))?;
            let y = match mode {
                Mode::Cascade => cascade_filter(&polar, &p_theta, &p_r, &s)?,
                Mode::Separable => {
                    let sep = separable_spectral_filter(&a, &p_theta, &p_r, &s)?;
                    if sep.residue_warning {
                        eprintln!("warning: imaginary residue {:e}", sep.imaginary_residue);
                    }
                    sep.signal
                }
            };
            emit(out.as_deref(), |mut w| write_signal(&mut w, &y))?;
            Ok(EXIT_OK)
        }
        Command::Verify { graph, tol, trials, seed, degree, cutoff } => {
            let a = load_graph(&graph)?;
            let rows = verify_rows(&a, tol, trials, seed, degree, cutoff)?;
            print_table(&rows);
            Ok(if rows.iter().all(|r| r.status != Status::Fail) { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Mblock { config, out, seed, degree, cutoff } => {
            let mut cfg: CaseStudyConfig = match config {
                Some(path) => read_json(&path)?,
                None => CaseStudyConfig::default(),
            };
            if let Some(seed) = seed {
                cfg.mblock.seed = seed;
            }
            if let Some(d) = degree {
                cfg.psd_degree = d;
                cfg.circle_degree = d;
            }
            if let Some(c) = cutoff {
                cfg.circle_cutoff = c;
            }
            cfg.output_dir = Some(out.clone());
            let report = run_case_study(&cfg)?;
            for check in &report.checks {
                let mark = if check.passed { "pass" } else { "FAIL" };
                println!("{mark:<5} {:<36} {:>10.4} {} {}", check.name, check.value, check.rule, check.threshold);
            }
            println!("artifacts written to {}", out.display());
            Ok(if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Convert { edges, out, nodes } => {
            let file = std::fs::File::open(&edges)?;
            let a = read_edge_list(std::io::BufReader::new(file), nodes)?;
            save_matrix(&out, a.matrix())?;
            Ok(EXIT_OK)
        }
    }
}

fn decompose(graph: &Path, out: &Path, tol: f64) -> Result<i32> {
    let a = load_graph(graph)?;
    let polar = polar_decompose(&a)?;
    let report = verify_polar(&a, &polar);
    save_matrix(&out.join("Q.mtx"), &polar.q)?;
    save_matrix(&out.join("P.mtx"), &polar.p)?;
    save_matrix(&out.join("F.mtx"), &polar.f)?;
    write_json(&out.join("polar_report.json"), &report)?;
    let s_max = polar.svd.s.first().copied().unwrap_or(0.0);
    if report.passes(a.frobenius_norm(), s_max, tol) {
        Ok(EXIT_OK)
    } else {
        eprintln!("polar residuals exceed tolerance {tol:e}");
        Ok(EXIT_CHECK_FAILED)
    }
}

fn cmd_spectrum(graph: &Path, signal: &Path, basis: Basis, cond_limit: f64, out: Option<&Path>) -> Result<i32> {
    let a = load_graph(graph)?;
    let s = load_signal(signal)?;
    let gft = match basis {
        Basis::A => build_gft(&eig_general(&a, cond_limit)?, Measure::TotalVariation)?,
        Basis::P | Basis::F | Basis::Q => {
            let polar = polar_decompose(&a)?;
            match basis {
                Basis::P => build_gft(&eig_symmetric(&polar.p)?, Measure::TotalVariation)?,
                Basis::F => build_gft(&eig_symmetric(&polar.f)?, Measure::TotalVariation)?,
                _ => build_gft(&eig_orthogonal(&polar.q)?, Measure::AngularFrequency)?,
            }
        }
    };
    let spec = spectrum(&gft, &s)?;
    emit(out, |mut w| write_spectrum(&mut w, &spec))?;
    Ok(EXIT_OK)
}

fn filter_arg(arg: &str, design: impl Fn(FilterKind) -> Result<PolynomialFilter>) -> Result<PolynomialFilter> {
    match arg {
        "low" => design(FilterKind::Lowpass),
        "high" => design(FilterKind::Highpass),
        path => {
            let f: PolynomialFilter = read_json(Path::new(path))?;
            f.validate()?;
            Ok(f)
        }
    }
}

fn emit(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => crate::io::write_to_path(path, |w| body(w)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone)]
struct Row {
    name: &'static str,
    detail: String,
    status: Status,
}

fn row(name: &'static str, ok: bool, detail: String) -> Row {
    Row { name, detail, status: if ok { Status::Pass } else { Status::Fail } }
}

fn verify_rows(a: &AdjacencyMatrix, tol: f64, trials: usize, seed: u64, degree: usize, cutoff: f64) -> Result<Vec<Row>> {
    let polar = polar_decompose(a)?;
    let report = verify_polar(a, &polar);
    let a_norm = a.frobenius_norm();
    let s_max = polar.svd.s.first().copied().unwrap_or(0.0);
    let scale = a_norm.max(1.0);
    let mut rows = vec![row(
        "polar residuals",
        report.passes(a_norm, s_max, tol),
        format!(
            "QP {:.2e}, FQ {:.2e}, QᵀQ−I {:.2e}",
            report.left_residual, report.right_residual, report.orthogonality_residual
        ),
    )];

    let m = a.matrix();
    let p_gap = frobenius(&(&polar.p - psd_sqrt(&(m.transpose() * m))?));
    let f_gap = frobenius(&(&polar.f - psd_sqrt(&(m * m.transpose()))?));
    rows.push(row("P, F oracle", p_gap.max(f_gap) <= tol * scale, format!("{p_gap:.2e}, {f_gap:.2e}")));

    let (circle_gap, pairs_ok) = unit_circle_check(&polar)?;
    rows.push(row(
        "Q eigenvalues on unit circle",
        circle_gap <= UNIT_CIRCLE_TOL && pairs_ok,
        format!("max ||λ|−1| {circle_gap:.2e}, conjugate pairs {}", if pairs_ok { "ok" } else { "broken" }),
    ));

    let gp = build_gft(&eig_symmetric(&polar.p)?, Measure::TotalVariation)?;
    let gc = build_gft(&eig_symmetric(out_link_symmetrization(a).matrix())?, Measure::TotalVariation)?;
    let gf = build_gft(&eig_symmetric(&polar.f)?, Measure::TotalVariation)?;
    let gb = build_gft(&eig_symmetric(in_link_symmetrization(a).matrix())?, Measure::TotalVariation)?;
    rows.push(row("GFT(P) ≡ GFT(C_out)", check_equivalence(&gp, &gc, EQUIVALENCE_TOL)?, String::new()));
    rows.push(row("GFT(F) ≡ GFT(B_in)", check_equivalence(&gf, &gb, EQUIVALENCE_TOL)?, String::new()));

    if is_normal(a, NORMAL_TOL) && s_max > 0.0 {
        let mut worst: f64 = 0.0;
        for rk in [FilterKind::Lowpass, FilterKind::Highpass] {
            for tk in [FilterKind::Lowpass, FilterKind::Highpass] {
                let p_r = design_psd_filter(rk, DEFAULT_PSD_CUTOFF_RATIO * s_max, degree, s_max)?;
                let p_theta = design_circle_filter(tk, cutoff, degree)?;
                worst = worst.max(verify_cascade_equivalence(a, &p_theta, &p_r)?.max_residual());
            }
        }
        rows.push(row("cascade = separable (normal A)", worst <= tol, format!("max residual {worst:.2e}")));
    } else {
        rows.push(Row {
            name: "cascade = separable (normal A)",
            detail: "skipped (non-normal)".into(),
            status: Status::Skipped,
        });
    }

    let closest = closest_unitary_check(a, &polar.q, trials, seed)?;
    rows.push(row("Q closest orthogonal", closest, format!("{trials} trials, seed {seed}")));
    Ok(rows)
}

/// Largest `||λ| − 1|` over the raw Schur eigenvalues of Q, and whether the
/// non-real ones pair up with their conjugates.
pub fn unit_circle_check(polar: &PolarFactors) -> Result<(f64, bool)> {
    let schur = RealSchur::new(&polar.q)?;
    let eig = &schur.eigenvalues;
    let gap = eig.iter().map(|l| (l.norm() - 1.0).abs()).fold(0.0, f64::max);
    let pairs_ok = schur.blocks.iter().all(|&(start, size)| match size {
        2 => (eig[start] - eig[start + 1].conj()).norm() <= UNIT_CIRCLE_TOL,
        _ => eig[start].im == 0.0,
    });
    Ok((gap, pairs_ok))
}

fn print_table(rows: &[Row]) {
    for r in rows {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        println!("{status:<5} {:<32} {}", r.name, r.detail);
    }
}
