//! Build an instance from a [`RunPlan`], evolve it, and write the results.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use dopwalk_core::density::POSITIVITY_TOLERANCE;
use dopwalk_core::measurement::MIN_OUTCOME_PROBABILITY;
use dopwalk_core::operator::{projection_residual, reflection_residual, unitarity_residual};
use dopwalk_core::{
    build_projector, build_reflection, build_swap, build_walk_unitary, check_state, collapse,
    line_window, paper_coin_family, paper_initial_state, pure_density, purity, required_radius,
    step, trace, validate_coin_family, vertex_distribution, BlockOperator, CoinFamily,
    DensityOperator, DirectedGraph, Effect, Pair, UnitalReport, WalkOperator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{Format, InitialSpec, OperatorKind, RunPlan, Source};
use crate::schema::{
    basis_pairs, dump_operator, load_operator, DistributionRecord, OperatorFile, StateDump,
    StatesFile,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("cannot parse {path}: {source}")]
    ParseConfig {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Validation(String),
    #[error("coin family violates the unital condition at {} vertex(es)", .0.violations().count())]
    Unital(UnitalReport),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{} invariant check(s) failed", .0.failures().count())]
    Invariants(InvariantReport),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ReadConfig { .. } | CliError::Io { .. } => 1,
            CliError::ParseConfig { .. } | CliError::Validation(_) | CliError::Unital(_) => 2,
            CliError::Invariants(_) => 3,
        }
    }

    /// Error line plus any per-item detail.
    pub fn report(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "error: {self}")?;
        match self {
            CliError::Unital(report) => {
                writeln!(w, "vertex\tresidual (tolerance {:e})", report.tolerance)?;
                for (v, r) in &report.residuals {
                    let mark = if report.violations().any(|(x, _)| x == *v) {
                        "  FAIL"
                    } else {
                        ""
                    };
                    writeln!(w, "{v}\t{r:e}{mark}")?;
                }
            }
            CliError::Invariants(report) => report.write(w)?,
            _ => {}
        }
        Ok(())
    }

    fn validation(e: impl std::fmt::Display) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub residual: f64,
    pub limit: f64,
}

impl InvariantCheck {
    pub fn passed(&self) -> bool {
        self.residual <= self.limit
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantReport {
    pub checks: Vec<InvariantCheck>,
}

impl InvariantReport {
    fn push(&mut self, name: &'static str, residual: f64, limit: f64) {
        self.checks.push(InvariantCheck {
            name,
            residual,
            limit,
        });
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn is_ok(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn write(&self, w: &mut dyn Write) -> io::Result<()> {
        for c in &self.checks {
            let status = if c.passed() { "ok" } else { "FAIL" };
            writeln!(
                w,
                "{status:4} {:<28} residual {:.3e} (limit {:.1e})",
                c.name, c.residual, c.limit
            )?;
        }
        Ok(())
    }
}

/// A built walk: graph, coins, validated unitary and initial state.
#[derive(Debug)]
pub struct Instance {
    pub graph: DirectedGraph,
    pub coins: CoinFamily,
    pub unital: UnitalReport,
    pub walk: WalkOperator,
    pub initial: DensityOperator,
}

pub fn build_instance(plan: &RunPlan) -> Result<Instance, CliError> {
    let (graph, coins) = match &plan.source {
        Source::Preset { margin } => {
            let g = line_window(required_radius(plan.steps, *margin));
            let f = paper_coin_family(&g);
            (g, f)
        }
        Source::Graph { graph, coins } => {
            let g = graph.build().map_err(CliError::validation)?;
            let f = coins.build().map_err(CliError::validation)?;
            (g, f)
        }
    };
    let unital =
        validate_coin_family(&graph, &coins, plan.tolerance).map_err(CliError::validation)?;
    if !unital.is_ok() {
        return Err(CliError::Unital(unital));
    }
    let walk = build_walk_unitary(&graph, &coins).map_err(CliError::validation)?;
    let basis = graph.pair_basis();
    let initial = match &plan.initial {
        None => paper_initial_state(basis).map_err(CliError::validation)?,
        Some(InitialSpec::Pure { coin, pair }) => {
            let u = coin.to_coin().ok_or_else(|| {
                CliError::validation("initial coin: `re` and `im` lengths differ")
            })?;
            if u.len() != coins.coin_dim() {
                return Err(CliError::Validation(format!(
                    "initial coin has {} entries, coin dimension is {}",
                    u.len(),
                    coins.coin_dim()
                )));
            }
            pure_density(&u, Pair::new(pair[0], pair[1]), basis).map_err(CliError::validation)?
        }
        Some(InitialSpec::Blocks { blocks }) => {
            let op =
                load_operator(blocks, basis, coins.coin_dim()).map_err(CliError::validation)?;
            let rho = DensityOperator::from_operator(op);
            let diag = check_state(&rho, plan.tolerance);
            if !diag.is_valid() {
                return Err(CliError::Validation(format!(
                    "initial blocks are not a density operator: hermiticity {:e}, trace {:e}, \
                     min eigenvalue {:e}",
                    diag.hermiticity_residual, diag.trace_residual, diag.min_eigenvalue
                )));
            }
            rho
        }
    };
    Ok(Instance {
        graph,
        coins,
        unital,
        walk,
        initial,
    })
}

/// What a successful run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<DistributionRecord>,
    pub invariants: Option<InvariantReport>,
    pub files: Vec<PathBuf>,
}

/// `dir/stem.<suffix>.json` next to `output`.
pub fn sibling_path(output: &Path, suffix: &str) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}.{suffix}.json"))
}

fn sample_outcome(rho: &DensityOperator, rng: &mut ChaCha8Rng) -> Pair {
    let effects: Vec<(Pair, f64)> = Effect::all(rho.basis())
        .map(|e| (e.pair(), e.probability(rho).max(0.0)))
        .collect();
    let total: f64 = effects
        .iter()
        .map(|&(_, p)| p)
        .filter(|&p| p > MIN_OUTCOME_PROBABILITY)
        .sum();
    let mut x = rng.gen::<f64>() * total;
    let mut last = None;
    for &(pair, p) in &effects {
        if p <= MIN_OUTCOME_PROBABILITY {
            continue;
        }
        if x < p {
            return pair;
        }
        x -= p;
        last = Some(pair);
    }
    // roundoff left x just past the final bucket
    last.expect("state has positive trace")
}

fn operator_checks(
    inst: &Instance,
    report: &mut InvariantReport,
    tol: f64,
) -> Result<(), CliError> {
    let pi = build_projector(&inst.graph, &inst.coins).map_err(CliError::validation)?;
    let r = build_reflection(&inst.graph, &inst.coins).map_err(CliError::validation)?;
    let s = build_swap(inst.graph.pair_basis(), inst.coins.coin_dim());
    let id = BlockOperator::identity(inst.graph.pair_basis(), inst.coins.coin_dim());
    report.push("unital condition", inst.unital.max_residual(), tol);
    report.push(
        "unitarity of U",
        unitarity_residual(inst.walk.operator()),
        tol,
    );
    report.push("projector Pi", projection_residual(&pi), tol);
    report.push("reflection 2Pi - I", reflection_residual(&r), tol);
    report.push("swap S^2 = I", s.mul(&s).max_abs_diff(&id), 0.0);
    Ok(())
}

#[derive(Default)]
struct StepResiduals {
    trace: f64,
    hermiticity: f64,
    effect_sum: f64,
    purity: f64,
}

impl StepResiduals {
    fn observe(&mut self, rho: &DensityOperator, initial_purity: f64, track_purity: bool) {
        let tr = trace(rho);
        let effects: f64 = Effect::all(rho.basis()).map(|e| e.probability(rho)).sum();
        self.trace = self.trace.max((tr - 1.0).abs());
        self.hermiticity = self.hermiticity.max(rho.operator().hermiticity_residual());
        self.effect_sum = self.effect_sum.max((effects - 1.0).abs());
        if track_purity {
            self.purity = self.purity.max((purity(rho) - initial_purity).abs());
        }
    }
}

/// Run a plan. Distributions go to `plan.output`, or to `stdout` when no
/// output path is set; the invariant report goes to `stderr`.
pub fn run(
    plan: &RunPlan,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<RunOutcome, CliError> {
    let inst = build_instance(plan)?;
    let basis = inst.graph.pair_basis();
    let coin_dim = inst.coins.coin_dim();
    let mut files = Vec::new();

    if let (Some(kind), Some(out)) = (plan.dump_operator, &plan.output) {
        let op = match kind {
            OperatorKind::Pi => {
                build_projector(&inst.graph, &inst.coins).map_err(CliError::validation)?
            }
            OperatorKind::Swap => build_swap(basis.clone(), coin_dim),
            OperatorKind::U => inst.walk.operator().clone(),
        };
        let file = OperatorFile {
            operator: kind.name().to_string(),
            coin_dim,
            basis: basis_pairs(&basis),
            blocks: dump_operator(&op),
        };
        let path = sibling_path(out, &format!("operator-{kind}"));
        write_json(&path, &file)?;
        files.push(path);
    }

    let mut report = plan.check_invariants.then(InvariantReport::default);
    if let Some(report) = report.as_mut() {
        operator_checks(&inst, report, plan.tolerance)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let initial_purity = purity(&inst.initial);
    let mut residuals = StepResiduals::default();
    let mut records = Vec::with_capacity(plan.steps + 1);
    let mut states = Vec::new();
    let mut rho = inst.initial.clone();
    for t in 0..=plan.steps {
        if t > 0 {
            rho = step(&inst.walk, &rho).map_err(CliError::validation)?;
        }
        if report.is_some() {
            residuals.observe(&rho, initial_purity, !plan.collapse_each_step);
        }
        let dist = vertex_distribution(&rho).map_err(|e| {
            let mut r = report.clone().unwrap_or_default();
            r.push("nonnegative probabilities", f64::INFINITY, 0.0);
            let _ = writeln!(stderr, "error: {e}");
            CliError::Invariants(r)
        })?;
        if plan.dump_states {
            states.push(StateDump::new(t, &rho));
        }
        let outcome = if plan.collapse_each_step {
            let pair = sample_outcome(&rho, &mut rng);
            rho = collapse(&rho, pair).map_err(CliError::validation)?;
            Some(pair)
        } else {
            None
        };
        records.push(DistributionRecord::new(t, &dist, outcome));
    }

    if let Some(report) = report.as_mut() {
        report.push("trace preservation", residuals.trace, plan.tolerance);
        report.push("hermiticity", residuals.hermiticity, plan.tolerance);
        report.push("effect completeness", residuals.effect_sum, plan.tolerance);
        if !plan.collapse_each_step {
            report.push("purity preservation", residuals.purity, plan.tolerance);
        }
        let diag = check_state(&rho, plan.tolerance);
        report.push(
            "positivity of final state",
            (-diag.min_eigenvalue).max(0.0),
            POSITIVITY_TOLERANCE,
        );
    }

    if plan.dump_states {
        if let Some(out) = &plan.output {
            let file = StatesFile {
                coin_dim,
                basis: basis_pairs(&basis),
                states,
            };
            let path = sibling_path(out, "states");
            write_json(&path, &file)?;
            files.push(path);
        }
    }

    match &plan.output {
        Some(path) => {
            let f = create(path)?;
            let mut w = BufWriter::new(f);
            write_records(&records, plan.format, &mut w)
                .and_then(|_| w.flush())
                .map_err(|source| io_error(path, source))?;
            files.push(path.clone());
        }
        None => write_records(&records, plan.format, stdout).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })?,
    }

    if let Some(report) = &report {
        // a failing report is printed by the caller along with the error
        if !report.is_ok() {
            return Err(CliError::Invariants(report.clone()));
        }
        report.write(stderr).map_err(|source| CliError::Io {
            path: "<stderr>".into(),
            source,
        })?;
    }
    Ok(RunOutcome {
        records,
        invariants: report,
        files,
    })
}

fn io_error(path: &Path, source: io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|source| io_error(path, source))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(create(path)?);
    serde_json::to_writer(&mut w, value)
        .map_err(io::Error::from)
        .and_then(|_| writeln!(w))
        .and_then(|_| w.flush())
        .map_err(|source| io_error(path, source))
}

/// JSON: an array of records. CSV: one row per `(t, vertex)`, with the
/// sampled outcome appended when present.
pub fn write_records(
    records: &[DistributionRecord],
    format: Format,
    w: &mut dyn Write,
) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, records)?;
            writeln!(w)
        }
        Format::Csv => {
            let with_outcome = records.iter().any(|r| r.outcome.is_some());
            let mut csv = csv::Writer::from_writer(w);
            let mut header = vec!["t", "vertex", "probability"];
            if with_outcome {
                header.extend(["outcome_first", "outcome_second"]);
            }
            csv.write_record(&header)?;
            for r in records {
                for &(v, p) in &r.probabilities.0 {
                    let mut row = vec![r.t.to_string(), v.to_string(), format!("{p:?}")];
                    if let Some([a, b]) = r.outcome {
                        row.extend([a.to_string(), b.to_string()]);
                    }
                    csv.write_record(&row)?;
                }
            }
            csv.flush()
        }
    }
}
