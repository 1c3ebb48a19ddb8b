//! M-block cyclic case study: filter a random signal with every lowpass /
//! highpass combination of `p_r(P)` and `p_θ(Q)`, then measure where the
//! output lives on GFT(A), GFT(P) and GFT(Q).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decomposition::polar_decompose_with_pattern;
use crate::error::{Error, Result};
use crate::filters::{
    cascade_filter, design_circle_filter, design_psd_filter, separable_with_system, FilterKind, PolynomialFilter,
    DEFAULT_CIRCLE_CUTOFF, DEFAULT_DEGREE, DEFAULT_PSD_CUTOFF_RATIO,
};
use crate::graph::{
    default_support, generate_m_block_cyclic, has_hamiltonian_cycle, random_signal, AdjacencyMatrix, BlockPartition,
    GraphSignal, MBlockConfig, HAMILTONIAN_MAX_NODES,
};
use crate::io::{save_matrix, save_signal, save_spectrum, write_json, write_to_path};
use crate::spectral::{
    build_gft, eig_general, eig_orthogonal, eig_symmetric, spectrum, Measure, OrderedGftBasis, DEFAULT_COND_LIMIT,
};
use crate::svg::{heatmap, spectrum_plot};

/// Environment variable bounding the number of worker threads (0 = auto).
pub const THREADS_ENV: &str = "POLAR_GFT_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub within_block_reduction: f64,
    pub block_to_block_reduction: f64,
    pub localization: f64,
    pub mid_frequency: f64,
    pub correlation: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            within_block_reduction: 0.5,
            block_to_block_reduction: 0.5,
            localization: 0.7,
            mid_frequency: 0.5,
            correlation: 0.9,
        }
    }
}

fn default_signal_seed() -> u64 {
    43
}
fn default_degree() -> usize {
    DEFAULT_DEGREE
}
fn default_psd_ratio() -> f64 {
    DEFAULT_PSD_CUTOFF_RATIO
}
fn default_circle_cutoff() -> f64 {
    DEFAULT_CIRCLE_CUTOFF
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseStudyConfig {
    pub mblock: MBlockConfig,
    #[serde(default = "default_signal_seed")]
    pub signal_seed: u64,
    #[serde(default = "default_degree")]
    pub psd_degree: usize,
    #[serde(default = "default_degree")]
    pub circle_degree: usize,
    /// PSD cutoff as a fraction of the largest eigenvalue of P.
    #[serde(default = "default_psd_ratio")]
    pub psd_cutoff_ratio: f64,
    #[serde(default = "default_circle_cutoff")]
    pub circle_cutoff: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for CaseStudyConfig {
    fn default() -> Self {
        Self {
            mblock: MBlockConfig {
                m: 4,
                block_sizes: vec![5; 4],
                edge_probability: 0.6,
                weight_low: 0.5,
                weight_high: 1.5,
                seed: 42,
            },
            signal_seed: default_signal_seed(),
            psd_degree: DEFAULT_DEGREE,
            circle_degree: DEFAULT_DEGREE,
            psd_cutoff_ratio: DEFAULT_PSD_CUTOFF_RATIO,
            circle_cutoff: DEFAULT_CIRCLE_CUTOFF,
            thresholds: Thresholds::default(),
            output_dir: None,
        }
    }
}

impl CaseStudyConfig {
    pub fn validate(&self) -> Result<()> {
        self.mblock.validate()?;
        if !(self.psd_cutoff_ratio > 0.0 && self.psd_cutoff_ratio <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "psd_cutoff_ratio must lie in (0, 1], got {}",
                self.psd_cutoff_ratio
            )));
        }
        if !(self.circle_cutoff > 0.0 && self.circle_cutoff <= std::f64::consts::PI) {
            return Err(Error::InvalidConfig(format!(
                "circle_cutoff must lie in (0, π], got {}",
                self.circle_cutoff
            )));
        }
        let t = &self.thresholds;
        let all = [t.within_block_reduction, t.block_to_block_reduction, t.localization, t.mid_frequency, t.correlation];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("thresholds must be finite".into()));
        }
        Ok(())
    }
}

/// Balanced 8-node graph (4 blocks of 2) whose G(A) has no Hamiltonian cycle
/// while G(Q) does.
pub fn eight_node_example() -> MBlockConfig {
    MBlockConfig {
        m: 4,
        block_sizes: vec![2; 4],
        edge_probability: 0.6,
        weight_low: 0.5,
        weight_high: 1.5,
        seed: 0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CombinationResult {
    /// `<p_r kind>_<p_θ kind>`, e.g. `low_high`.
    pub name: String,
    pub p_r: FilterKind,
    pub p_theta: FilterKind,
    pub within_block: f64,
    pub block_to_block: f64,
    pub within_block_reduction: f64,
    pub block_to_block_reduction: f64,
    /// Energy share on GFT(P) in the half matching p_r's passband.
    pub localization_p: f64,
    /// Energy share on GFT(Q) in the half matching p_θ's passband.
    pub localization_q: f64,
    /// Energy share on GFT(A) in the middle half of the ordering.
    pub mid_frequency_a: Option<f64>,
    /// Pearson correlation of cascade and separable outputs.
    pub correlation: Option<f64>,
    pub separable_imaginary_residue: Option<f64>,
    #[serde(skip)]
    pub cascade: GraphSignal,
    #[serde(skip)]
    pub separable: Option<GraphSignal>,
    #[serde(skip)]
    pub spectrum_a: Option<Vec<(f64, f64)>>,
    #[serde(skip)]
    pub spectrum_p: Vec<(f64, f64)>,
    #[serde(skip)]
    pub spectrum_q: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `">="` or `">"`.
    pub rule: &'static str,
    pub passed: bool,
}

impl Check {
    fn at_least(name: String, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold, rule: ">=", passed: value >= threshold }
    }

    fn above(name: String, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold, rule: ">", passed: value > threshold }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    /// Whether support(Q) only links block b to block b+1; balanced configs only.
    pub q_block_cyclic: Option<bool>,
    pub a_hamiltonian: Option<bool>,
    pub q_hamiltonian: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseStudyReport {
    pub config: CaseStudyConfig,
    /// The thresholds are calibration constants chosen for this toolkit.
    pub thresholds_are_calibrated: bool,
    pub n: usize,
    pub lambda_max_p: f64,
    pub a_diagonalizable: bool,
    pub a_basis_condition: f64,
    pub within_block_input: f64,
    pub block_to_block_input: f64,
    pub combinations: Vec<CombinationResult>,
    pub mid_frequency_concentration: Option<f64>,
    pub structure: StructureReport,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip)]
    pub graph: AdjacencyMatrix,
    #[serde(skip)]
    pub partition: BlockPartition,
    #[serde(skip)]
    pub signal: GraphSignal,
    #[serde(skip)]
    pub filters: Vec<PolynomialFilter>,
}

impl CaseStudyReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn block_means(s: &GraphSignal, part: &BlockPartition) -> Vec<(f64, usize)> {
    let mut sums = vec![(0.0, 0usize); part.block_count()];
    for (i, &x) in s.as_slice().iter().enumerate() {
        let b = part.block_of(i);
        sums[b].0 += x;
        sums[b].1 += 1;
    }
    sums.into_iter().map(|(s, c)| (if c == 0 { 0.0 } else { s / c as f64 }, c)).collect()
}

fn check_cover(s: &GraphSignal, part: &BlockPartition) -> Result<()> {
    if s.len() != part.node_count() {
        return Err(Error::DimensionMismatch { expected: part.node_count(), found: s.len() });
    }
    Ok(())
}

/// Mean over blocks of the population variance of `s` inside each block.
pub fn within_block_variation(s: &GraphSignal, part: &BlockPartition) -> Result<f64> {
    check_cover(s, part)?;
    let means = block_means(s, part);
    let mut var = vec![0.0; part.block_count()];
    for (i, &x) in s.as_slice().iter().enumerate() {
        let b = part.block_of(i);
        var[b] += (x - means[b].0).powi(2);
    }
    let total: f64 = var.iter().zip(&means).map(|(v, (_, c))| v / *c as f64).sum();
    Ok(total / part.block_count() as f64)
}

/// `Σ_b (mean_b − mean_{b+1 mod M})²`.
pub fn block_to_block_variation(s: &GraphSignal, part: &BlockPartition) -> Result<f64> {
    check_cover(s, part)?;
    if part.block_count() < 2 {
        return Err(Error::InvalidArgument("block-to-block variation needs at least two blocks".into()));
    }
    let means = block_means(s, part);
    let m = means.len();
    Ok((0..m).map(|b| (means[b].0 - means[(b + 1) % m].0).powi(2)).sum())
}

fn energy_share(spec: &[(f64, f64)], range: std::ops::Range<usize>) -> f64 {
    let total: f64 = spec.iter().map(|(_, m)| m * m).sum();
    if total == 0.0 {
        return 0.0;
    }
    spec[range].iter().map(|(_, m)| m * m).sum::<f64>() / total
}

/// Energy share in the half of the ordering a filter of `kind` passes.
pub fn passband_share(spec: &[(f64, f64)], kind: FilterKind) -> f64 {
    let n = spec.len();
    match kind {
        FilterKind::Highpass => energy_share(spec, n / 2..n),
        _ => energy_share(spec, 0..n / 2),
    }
}

/// Energy share in the central half `[n/4, n/4 + n/2)` of the ordering.
pub fn middle_share(spec: &[(f64, f64)]) -> f64 {
    let n = spec.len();
    energy_share(spec, n / 4..n / 4 + n / 2)
}

/// Mid-band energy share on GFT(A), averaged over the filter combinations.
pub fn mid_frequency_concentration(report: &CaseStudyReport) -> Result<f64> {
    let shares: Vec<f64> = report
        .combinations
        .iter()
        .map(|c| c.spectrum_a.as_deref().map(middle_share))
        .collect::<Option<_>>()
        .ok_or(Error::NotDiagonalizable(report.a_basis_condition))?;
    if shares.is_empty() {
        return Err(Error::InvalidArgument("report has no filter combinations".into()));
    }
    Ok(shares.iter().sum::<f64>() / shares.len() as f64)
}

/// Pearson correlation; 0 when either side is constant.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// True iff every edge of `support` runs from block b to block b+1 (mod M).
pub fn respects_block_cycle(q: &AdjacencyMatrix, part: &BlockPartition) -> bool {
    let m = part.block_count();
    default_support(q.matrix())
        .iter()
        .all(|&(from, to)| part.block_of(to) == (part.block_of(from) + 1) % m)
}

pub fn worker_count() -> usize {
    let auto = || std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(0) | None => auto(),
        Some(k) => k,
    }
}

fn reduction(before: f64, after: f64) -> f64 {
    if before == 0.0 {
        0.0
    } else {
        1.0 - after / before
    }
}

struct Bases {
    a: Option<OrderedGftBasis>,
    p: OrderedGftBasis,
    q: OrderedGftBasis,
}

/// Runs the case study and, when `output_dir` is set, writes its artifacts.
pub fn run_case_study(cfg: &CaseStudyConfig) -> Result<CaseStudyReport> {
    cfg.validate()?;
    let (graph, partition) = generate_m_block_cyclic(&cfg.mblock)?;
    let n = graph.n();
    let signal = random_signal(n, cfg.signal_seed)?;
    let polar = polar_decompose_with_pattern(&graph, &partition.cyclic_pattern())?;
    let lambda_max_p = polar.svd.s[0];

    let sys_a = eig_general(&graph, DEFAULT_COND_LIMIT)?;
    let bases = Bases {
        a: sys_a.diagonalizable.then(|| build_gft(&sys_a, Measure::TotalVariation)).transpose()?,
        p: build_gft(&eig_symmetric(&polar.p)?, Measure::TotalVariation)?,
        q: build_gft(&eig_orthogonal(&polar.q)?, Measure::AngularFrequency)?,
    };

    let kinds = [FilterKind::Lowpass, FilterKind::Highpass];
    let mut filters = Vec::new();
    for kind in kinds {
        filters.push(design_psd_filter(kind, cfg.psd_cutoff_ratio * lambda_max_p, cfg.psd_degree, lambda_max_p)?);
    }
    for kind in kinds {
        filters.push(design_circle_filter(kind, cfg.circle_cutoff, cfg.circle_degree)?);
    }
    let within_input = within_block_variation(&signal, &partition)?;
    let b2b_input = block_to_block_variation(&signal, &partition)?;

    let combos: Vec<(usize, usize)> = (0..2).flat_map(|r| (0..2).map(move |t| (r, t))).collect();
    let run = |&(r, t): &(usize, usize)| -> Result<CombinationResult> {
        let (p_r, p_theta) = (&filters[r], &filters[2 + t]);
        let cascade = cascade_filter(&polar, p_theta, p_r, &signal)?;
        let separable =
            if sys_a.diagonalizable { Some(separable_with_system(&sys_a, p_theta, p_r, &signal)?) } else { None };
        let spectrum_a = bases.a.as_ref().map(|b| spectrum(b, &cascade)).transpose()?;
        let spectrum_p = spectrum(&bases.p, &cascade)?;
        let spectrum_q = spectrum(&bases.q, &cascade)?;
        let within = within_block_variation(&cascade, &partition)?;
        let b2b = block_to_block_variation(&cascade, &partition)?;
        Ok(CombinationResult {
            name: format!("{}_{}", p_r.kind.short(), p_theta.kind.short()),
            p_r: p_r.kind,
            p_theta: p_theta.kind,
            within_block: within,
            block_to_block: b2b,
            within_block_reduction: reduction(within_input, within),
            block_to_block_reduction: reduction(b2b_input, b2b),
            localization_p: passband_share(&spectrum_p, p_r.kind),
            localization_q: passband_share(&spectrum_q, p_theta.kind),
            mid_frequency_a: spectrum_a.as_deref().map(middle_share),
            correlation: separable.as_ref().map(|s| correlation(cascade.as_slice(), s.signal.as_slice())),
            separable_imaginary_residue: separable.as_ref().map(|s| s.imaginary_residue),
            separable: separable.map(|s| s.signal),
            cascade,
            spectrum_a,
            spectrum_p,
            spectrum_q,
        })
    };

    let workers = worker_count().clamp(1, combos.len());
    let mut results: Vec<Option<Result<CombinationResult>>> = (0..combos.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (chunk_ids, chunk_out) in combos.chunks(combos.len().div_ceil(workers)).zip(
            results.chunks_mut(combos.len().div_ceil(workers)),
        ) {
            let run = &run;
            scope.spawn(move || {
                for (c, slot) in chunk_ids.iter().zip(chunk_out.iter_mut()) {
                    *slot = Some(run(c));
                }
            });
        }
    });
    let combinations = results.into_iter().map(|r| r.expect("every combination ran")).collect::<Result<Vec<_>>>()?;

    let q_graph = AdjacencyMatrix::new(polar.q.clone())?;
    let small = n <= HAMILTONIAN_MAX_NODES;
    let structure = StructureReport {
        q_block_cyclic: partition.is_balanced().then(|| respects_block_cycle(&q_graph, &partition)),
        a_hamiltonian: if small { Some(has_hamiltonian_cycle(&default_support(graph.matrix()), n)?) } else { None },
        q_hamiltonian: if small { Some(has_hamiltonian_cycle(&default_support(&polar.q), n)?) } else { None },
    };

    let mut report = CaseStudyReport {
        config: CaseStudyConfig { output_dir: None, ..cfg.clone() },
        thresholds_are_calibrated: true,
        n,
        lambda_max_p,
        a_diagonalizable: sys_a.diagonalizable,
        a_basis_condition: sys_a.basis_condition,
        within_block_input: within_input,
        block_to_block_input: b2b_input,
        combinations,
        mid_frequency_concentration: None,
        structure,
        checks: Vec::new(),
        passed: false,
        graph,
        partition,
        signal,
        filters,
    };
    report.mid_frequency_concentration = mid_frequency_concentration(&report).ok();
    report.checks = evaluate_checks(&report, &cfg.thresholds);
    report.passed = report.checks.iter().all(|c| c.passed);

    if let Some(dir) = &cfg.output_dir {
        write_artifacts(&report, dir)?;
    }
    Ok(report)
}

fn evaluate_checks(report: &CaseStudyReport, t: &Thresholds) -> Vec<Check> {
    let mut checks = Vec::new();
    for c in &report.combinations {
        if c.p_r == FilterKind::Lowpass {
            checks.push(Check::at_least(
                format!("within_block_reduction[{}]", c.name),
                c.within_block_reduction,
                t.within_block_reduction,
            ));
        }
        if c.p_theta == FilterKind::Lowpass {
            checks.push(Check::at_least(
                format!("block_to_block_reduction[{}]", c.name),
                c.block_to_block_reduction,
                t.block_to_block_reduction,
            ));
        }
    }
    for c in &report.combinations {
        checks.push(Check::at_least(format!("localization_p[{}]", c.name), c.localization_p, t.localization));
        checks.push(Check::at_least(format!("localization_q[{}]", c.name), c.localization_q, t.localization));
    }
    if let Some(mid) = report.mid_frequency_concentration {
        checks.push(Check::above("mid_frequency_concentration".into(), mid, t.mid_frequency));
    }
    for c in &report.combinations {
        if let Some(r) = c.correlation {
            checks.push(Check::at_least(format!("correlation[{}]", c.name), r, t.correlation));
        }
    }
    if let Some(ok) = report.structure.q_block_cyclic {
        checks.push(Check::at_least("q_block_cyclic".into(), f64::from(u8::from(ok)), 1.0));
    }
    checks
}

/// Writes every artifact of a case study run into `dir`.
pub fn write_artifacts(report: &CaseStudyReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir.join("plots"))?;
    save_matrix(&dir.join("graph.mtx"), report.graph.matrix())?;
    save_signal(&dir.join("signal.csv"), &report.signal)?;
    for f in &report.filters {
        let slot = match f.domain {
            crate::filters::FilterDomain::PsdSpectrum => "r",
            crate::filters::FilterDomain::UnitCircle => "theta",
        };
        write_json(&dir.join(format!("filter_{slot}_{}.json", f.kind.short())), f)?;
    }
    let mut rows = vec![("input".to_string(), report.signal.as_slice().to_vec())];
    for c in &report.combinations {
        save_signal(&dir.join(format!("filtered_{}.csv", c.name)), &c.cascade)?;
        if let Some(s) = &c.separable {
            save_signal(&dir.join(format!("separable_{}.csv", c.name)), s)?;
        }
        let spectra = [("A", c.spectrum_a.as_ref()), ("P", Some(&c.spectrum_p)), ("Q", Some(&c.spectrum_q))];
        for (basis, spec) in spectra {
            let Some(spec) = spec else { continue };
            save_spectrum(&dir.join(format!("spectrum_{basis}_{}.csv", c.name)), spec)?;
            let x_label = if basis == "Q" { "|angular frequency|" } else { "total variation" };
            let doc = spectrum_plot(&format!("GFT({basis}) spectrum, {}", c.name), x_label, spec);
            write_to_path(&dir.join(format!("plots/spectrum_{basis}_{}.svg", c.name)), |w| {
                std::io::Write::write_all(w, doc.as_bytes())?;
                Ok(())
            })?;
        }
        rows.push((format!("cascade {}", c.name), c.cascade.as_slice().to_vec()));
    }
    let doc = heatmap("node values", &rows);
    write_to_path(&dir.join("plots/signals.svg"), |w| {
        std::io::Write::write_all(w, doc.as_bytes())?;
        Ok(())
    })?;
    write_json(&dir.join("report.json"), report)
}
