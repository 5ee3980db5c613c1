//! Declarative experiment sweeps over the full recovery pipeline, and the
//! CSV artifact formats.
//!
//! A sweep is the Cartesian product denoisers × grid sizes × seeds. Each row
//! runs sample generation, denoising, unwrapping, quasi-interpolation and
//! metric computation; rows are emitted sorted by (denoiser, n, seed) so the
//! output is schedule-independent.
//!
//! Output files are plain CSV with a `#`-prefixed metadata block (version,
//! config echo, seed list). `results.csv` and `summary.csv` are
//! byte-deterministic for a fixed spec: floats are written with Rust's
//! shortest round-trip formatting and row order is fixed. Wall-clock
//! timings go to a separate `timings.csv`, which is the one file excluded
//! from the determinism guarantee.

use crate::circle::FractionalPhase;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::knn_denoiser::{knn_denoise, KnnConfig};
use crate::lp_denoiser::{denoise, DenoisedModulo, LpConfig};
use crate::metrics_bounds::ErrorReport;
use crate::quasi_interpolant::{build_qi, RecoveredFunction};
use crate::signal_model::{sample_modulo, ModuloSamples, NoiseModel, TestFunction, UniformGrid};
use crate::unwrapper::{unwrap_phases, UnwrappedSamples};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denoiser {
    Lp,
    Knn,
}

impl fmt::Display for Denoiser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Denoiser::Lp => "lp",
            Denoiser::Knn => "knn",
        })
    }
}

impl FromStr for Denoiser {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Denoiser::Lp),
            "knn" => Ok(Denoiser::Knn),
            other => Err(Error::Parse {
                what: "denoiser id".into(),
                detail: format!("unknown denoiser {other:?} (expected lp or knn)"),
            }),
        }
    }
}

/// Local-polynomial stage parameters as they appear in configs: the
/// bandwidth follows `const · (ln n / n)^{β/(2β+1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LpParams {
    pub order_l: u32,
    pub beta: f64,
    pub bandwidth_const: f64,
    pub kernel: Kernel,
    pub min_eig_floor: f64,
}

impl Default for LpParams {
    fn default() -> Self {
        LpParams {
            order_l: 2,
            beta: 2.4,
            bandwidth_const: 0.1,
            kernel: Kernel::Epanechnikov,
            min_eig_floor: LpConfig::DEFAULT_MIN_EIG_FLOOR,
        }
    }
}

impl LpParams {
    pub fn bandwidth(&self, n: usize) -> f64 {
        crate::metrics_bounds::practical_bandwidth(self.bandwidth_const, self.beta, n)
    }

    pub fn to_config(&self, n: usize) -> Result<LpConfig> {
        Ok(LpConfig::new(self.order_l, self.bandwidth(n), self.kernel)?
            .with_min_eig_floor(self.min_eig_floor))
    }
}

/// Declarative sweep description; the JSON config schema mirrors this
/// struct field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub function_id: String,
    pub sigma: f64,
    pub n_list: Vec<usize>,
    pub seeds: Vec<u64>,
    pub denoisers: Vec<Denoiser>,
    pub lp: LpParams,
    pub knn: KnnConfig,
    pub qi_degree: usize,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            function_id: "paper_fn".into(),
            sigma: 0.12,
            n_list: vec![150, 300, 600, 1200],
            seeds: vec![1, 2, 3, 4, 5],
            denoisers: vec![Denoiser::Lp, Denoiser::Knn],
            lp: LpParams::default(),
            knn: KnnConfig::auto(),
            qi_degree: 2,
            output_dir: None,
        }
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn function(&self) -> Result<TestFunction> {
        self.function_id.parse()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::InvalidConfig("n_list must not be empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("seeds must not be empty".into()));
        }
        if self.denoisers.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one denoiser must be selected".into(),
            ));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sigma must be nonnegative, got {}",
                self.sigma
            )));
        }
        let n_floor = (8 * (self.lp.order_l as usize + 1)).max(self.qi_degree + 1);
        for &n in &self.n_list {
            if n < n_floor {
                return Err(Error::InvalidConfig(format!(
                    "n = {n} below minimum {n_floor} for these parameters"
                )));
            }
        }
        self.function()?;
        Ok(())
    }
}

/// One cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub function: TestFunction,
    pub sigma: f64,
    pub n: usize,
    pub base_seed: u64,
    pub denoiser: Denoiser,
    pub lp: LpParams,
    pub knn: KnnConfig,
    pub qi_degree: usize,
}

impl RunConfig {
    pub fn from_spec(
        spec: &ExperimentSpec,
        denoiser: Denoiser,
        n: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(RunConfig {
            function: spec.function()?,
            sigma: spec.sigma,
            n,
            base_seed: seed,
            denoiser,
            lp: spec.lp,
            knn: spec.knn,
            qi_degree: spec.qi_degree,
        })
    }
}

/// Mixes the user seed with the grid size so every sweep cell gets an
/// independent noise stream while the lp/knn rows of one cell share theirs
/// (fair method comparison on identical data).
pub fn derive_run_seed(base_seed: u64, n: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = base_seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Result row of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub denoiser: Denoiser,
    pub n: usize,
    pub seed: u64,
    pub run_seed: u64,
    /// Bandwidth for lp rows, neighbor count for knn rows.
    pub bandwidth_or_k: f64,
    pub runtime_ms: f64,
    pub metrics: Option<ErrorReport>,
    /// Error tag when the run failed.
    pub error: Option<String>,
}

/// Everything a single run produced, for artifact emission.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub record: RunRecord,
    pub truth: Vec<f64>,
    pub samples: ModuloSamples,
    pub denoised: DenoisedModulo,
    pub unwrapped: UnwrappedSamples,
    pub recovered: RecoveredFunction,
}

/// Runs generate → denoise → unwrap → recover → metrics for one cell.
///
/// Errors carry the failing stage; the process-level caller is expected to
/// exit nonzero on them.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineRun> {
    let start = Instant::now();
    let grid = UniformGrid::new(cfg.n).map_err(|e| e.in_stage("generate"))?;
    let run_seed = derive_run_seed(cfg.base_seed, cfg.n);
    let noise = NoiseModel::new(cfg.sigma, run_seed).map_err(|e| e.in_stage("generate"))?;
    let samples = sample_modulo(&cfg.function, &grid, &noise);

    let (denoised, bandwidth_or_k) = match cfg.denoiser {
        Denoiser::Lp => {
            let lp_cfg = cfg.lp.to_config(cfg.n).map_err(|e| e.in_stage("denoise"))?;
            let out = denoise(&samples, &lp_cfg).map_err(|e| e.in_stage("denoise"))?;
            (out, lp_cfg.bandwidth)
        }
        Denoiser::Knn => {
            let k = cfg
                .knn
                .resolve_k(cfg.n)
                .map_err(|e| e.in_stage("denoise"))?;
            let out = knn_denoise(&samples, &cfg.knn).map_err(|e| e.in_stage("denoise"))?;
            (out, k as f64)
        }
    };

    let unwrapped = unwrap_phases(&denoised.phases, &grid).map_err(|e| e.in_stage("unwrap"))?;
    let recovered = build_qi(&unwrapped, cfg.qi_degree).map_err(|e| e.in_stage("recover"))?;

    let truth: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| cfg.function.eval(x))
        .collect();
    let truth_phases: Vec<FractionalPhase> =
        truth.iter().map(|&v| FractionalPhase::wrap(v)).collect();
    let metrics = ErrorReport::compute(&denoised.phases, &truth_phases, &unwrapped.values, &truth)
        .map_err(|e| e.in_stage("metrics"))?;

    let record = RunRecord {
        denoiser: cfg.denoiser,
        n: cfg.n,
        seed: cfg.base_seed,
        run_seed,
        bandwidth_or_k,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        metrics: Some(metrics),
        error: None,
    };
    Ok(PipelineRun {
        record,
        truth,
        samples,
        denoised,
        unwrapped,
        recovered,
    })
}

/// Like [`run_pipeline`] but captures failures into the record so sweeps
/// keep going.
pub fn run_pipeline_record(cfg: &RunConfig) -> RunRecord {
    let start = Instant::now();
    match run_pipeline(cfg) {
        Ok(run) => run.record,
        Err(e) => RunRecord {
            denoiser: cfg.denoiser,
            n: cfg.n,
            seed: cfg.base_seed,
            run_seed: derive_run_seed(cfg.base_seed, cfg.n),
            bandwidth_or_k: match cfg.denoiser {
                Denoiser::Lp => cfg.lp.bandwidth(cfg.n),
                Denoiser::Knn => cfg
                    .knn
                    .resolve_k(cfg.n)
                    .map(|k| k as f64)
                    .unwrap_or(f64::NAN),
            },
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            metrics: None,
            error: Some(e.tag().to_string()),
        },
    }
}

/// Aggregate over the successful rows of one (denoiser, n) cell: mean and
/// sample standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub denoiser: Denoiser,
    pub n: usize,
    pub runs: usize,
    pub wrap_rmse_mean: f64,
    pub wrap_rmse_std: f64,
    pub wrap_max_mean: f64,
    pub wrap_max_std: f64,
    pub aligned_rmse_mean: f64,
    pub aligned_rmse_std: f64,
    pub aligned_max_mean: f64,
    pub aligned_max_std: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Runs the full sweep. Per-row failures are recorded with an error tag and
/// the sweep continues; rows come out sorted by (denoiser, n, seed).
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut denoisers = spec.denoisers.clone();
    denoisers.sort();
    denoisers.dedup();
    let mut rows = Vec::new();
    for &denoiser in &denoisers {
        for &n in &spec.n_list {
            for &seed in &spec.seeds {
                let cfg = RunConfig::from_spec(spec, denoiser, n, seed)?;
                rows.push(run_pipeline_record(&cfg));
            }
        }
    }
    rows.sort_by_key(|r| (r.denoiser, r.n, r.seed));

    let mut summary = Vec::new();
    for &denoiser in &denoisers {
        let mut ns = spec.n_list.clone();
        ns.sort_unstable();
        ns.dedup();
        for n in ns {
            let cell: Vec<&ErrorReport> = rows
                .iter()
                .filter(|r| r.denoiser == denoiser && r.n == n)
                .filter_map(|r| r.metrics.as_ref())
                .collect();
            if cell.is_empty() {
                continue;
            }
            let stat = |f: &dyn Fn(&ErrorReport) -> f64| mean_std(cell.iter().map(|r| f(r)));
            let (wrap_rmse_mean, wrap_rmse_std) = stat(&|r| r.wrap_rmse);
            let (wrap_max_mean, wrap_max_std) = stat(&|r| r.wrap_max);
            let (aligned_rmse_mean, aligned_rmse_std) = stat(&|r| r.aligned_rmse);
            let (aligned_max_mean, aligned_max_std) = stat(&|r| r.aligned_max);
            summary.push(SummaryRow {
                denoiser,
                n,
                runs: cell.len(),
                wrap_rmse_mean,
                wrap_rmse_std,
                wrap_max_mean,
                wrap_max_std,
                aligned_rmse_mean,
                aligned_rmse_std,
                aligned_max_mean,
                aligned_max_std,
            });
        }
    }
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        summary,
    })
}

fn mean_std(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let vals: Vec<f64> = values.collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

// ---------------------------------------------------------------------------
// CSV artifacts
// ---------------------------------------------------------------------------

fn metadata_block(spec_echo: &str, seeds: Option<&[u64]>) -> String {
    let mut out = String::new();
    out.push_str(&format!("# modrec {VERSION}\n"));
    out.push_str(&format!("# config: {spec_echo}\n"));
    if let Some(seeds) = seeds {
        let list: Vec<String> = seeds.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("# seeds: {}\n", list.join(",")));
    }
    out
}

impl SweepResult {
    fn spec_echo(&self) -> String {
        serde_json::to_string(&self.spec).expect("spec serializes")
    }

    /// Per-run results table; byte-deterministic for a fixed spec.
    pub fn results_csv(&self) -> String {
        let mut out = metadata_block(&self.spec_echo(), Some(&self.spec.seeds));
        out.push_str(
            "denoiser,n,seed,run_seed,wrap_rmse,wrap_max,aligned_rmse,aligned_max,shift_q,bandwidth_or_k,status\n",
        );
        for r in &self.rows {
            match (&r.metrics, &r.error) {
                (Some(m), _) => out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},ok\n",
                    r.denoiser,
                    r.n,
                    r.seed,
                    r.run_seed,
                    m.wrap_rmse,
                    m.wrap_max,
                    m.aligned_rmse,
                    m.aligned_max,
                    m.shift_q,
                    r.bandwidth_or_k
                )),
                (None, err) => out.push_str(&format!(
                    "{},{},{},{},,,,,,{},{}\n",
                    r.denoiser,
                    r.n,
                    r.seed,
                    r.run_seed,
                    r.bandwidth_or_k,
                    err.as_deref().unwrap_or("error")
                )),
            }
        }
        out
    }

    /// Mean ± sample-std aggregates per (denoiser, n); byte-deterministic.
    pub fn summary_csv(&self) -> String {
        let mut out = metadata_block(&self.spec_echo(), Some(&self.spec.seeds));
        out.push_str(
            "denoiser,n,runs,wrap_rmse_mean,wrap_rmse_std,wrap_max_mean,wrap_max_std,aligned_rmse_mean,aligned_rmse_std,aligned_max_mean,aligned_max_std\n",
        );
        for s in &self.summary {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                s.denoiser,
                s.n,
                s.runs,
                s.wrap_rmse_mean,
                s.wrap_rmse_std,
                s.wrap_max_mean,
                s.wrap_max_std,
                s.aligned_rmse_mean,
                s.aligned_rmse_std,
                s.aligned_max_mean,
                s.aligned_max_std
            ));
        }
        out
    }

    /// Wall-clock timings per row; the one artifact that is not
    /// byte-deterministic.
    pub fn timings_csv(&self) -> String {
        let mut out = metadata_block(&self.spec_echo(), Some(&self.spec.seeds));
        out.push_str("# wall-clock timings; excluded from determinism guarantees\n");
        out.push_str("denoiser,n,seed,runtime_ms\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.3}\n",
                r.denoiser, r.n, r.seed, r.runtime_ms
            ));
        }
        out
    }
}

/// Header line for single-run records (stdout of the pipeline subcommand).
pub fn record_csv_header() -> &'static str {
    "denoiser,n,seed,run_seed,wrap_rmse,wrap_max,aligned_rmse,aligned_max,shift_q,bandwidth_or_k,status"
}

pub fn record_csv_row(r: &RunRecord) -> String {
    match (&r.metrics, &r.error) {
        (Some(m), _) => format!(
            "{},{},{},{},{},{},{},{},{},{},ok",
            r.denoiser,
            r.n,
            r.seed,
            r.run_seed,
            m.wrap_rmse,
            m.wrap_max,
            m.aligned_rmse,
            m.aligned_max,
            m.shift_q,
            r.bandwidth_or_k
        ),
        (None, err) => format!(
            "{},{},{},{},,,,,,{},{}",
            r.denoiser,
            r.n,
            r.seed,
            r.run_seed,
            r.bandwidth_or_k,
            err.as_deref().unwrap_or("error")
        ),
    }
}

/// Metadata for staged sample files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleMeta {
    pub function_id: String,
    pub sigma: f64,
    pub seed: u64,
}

pub fn samples_csv(samples: &ModuloSamples, meta: &SampleMeta) -> String {
    let echo = serde_json::to_string(meta).expect("meta serializes");
    let mut out = metadata_block(&echo, None);
    out.push_str("i,x,y\n");
    for (i, (&x, &y)) in samples
        .grid
        .points()
        .iter()
        .zip(&samples.values)
        .enumerate()
    {
        out.push_str(&format!("{},{},{}\n", i + 1, x, y));
    }
    out
}

pub fn phases_csv(denoised: &DenoisedModulo) -> String {
    let mut out = String::from("# modrec ");
    out.push_str(VERSION);
    out.push('\n');
    if let Some(me) = denoised.min_eig_overall {
        out.push_str(&format!("# min_eig_overall: {me}\n"));
    }
    out.push_str("i,x,g_hat\n");
    for (i, (&x, p)) in denoised
        .grid
        .points()
        .iter()
        .zip(&denoised.phases)
        .enumerate()
    {
        out.push_str(&format!("{},{},{}\n", i + 1, x, p.value()));
    }
    out
}

pub fn unwrapped_csv(unwrapped: &UnwrappedSamples) -> String {
    let mut out = format!("# modrec {VERSION}\n");
    out.push_str("i,x,f_tilde\n");
    for (i, (&x, &v)) in unwrapped
        .grid
        .points()
        .iter()
        .zip(&unwrapped.values)
        .enumerate()
    {
        out.push_str(&format!("{},{},{}\n", i + 1, x, v));
    }
    out
}

/// Dense evaluation table of the recovered function.
pub fn recovered_csv(recovered: &RecoveredFunction, resolution: usize) -> String {
    let mut out = format!("# modrec {VERSION}\n");
    out.push_str(&format!("# qi_degree: {}\n", recovered.degree()));
    out.push_str("x,f_hat\n");
    for (x, v) in recovered.table(resolution) {
        out.push_str(&format!("{x},{v}\n"));
    }
    out
}

/// Grid-aligned plot data: truth, raw samples, unwrapped estimates and the
/// recovered function at the sample locations.
pub fn plotdata_csv(run: &PipelineRun) -> String {
    let mut out = format!("# modrec {VERSION}\n");
    out.push_str("x,f_true,y,g_hat,f_tilde,f_hat\n");
    let grid = run.samples.grid.points();
    for (i, &x) in grid.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            x,
            run.truth[i],
            run.samples.values[i],
            run.denoised.phases[i].value(),
            run.unwrapped.values[i],
            run.recovered.eval(x)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// CSV parsing for staged files
// ---------------------------------------------------------------------------

/// Parses a numeric CSV (possibly with `#` metadata lines and a header row)
/// into rows of floats.
pub fn parse_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if header.is_empty() {
            header = fields.iter().map(|s| s.to_string()).collect();
            continue;
        }
        let row: Result<Vec<f64>> = fields
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|e| Error::Parse {
                    what: "csv field".into(),
                    detail: format!("{f:?}: {e}"),
                })
            })
            .collect();
        rows.push(row?);
    }
    if header.is_empty() {
        return Err(Error::Parse {
            what: "csv".into(),
            detail: "no header row found".into(),
        });
    }
    Ok((header, rows))
}

fn column_index(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Parse {
            what: "csv header".into(),
            detail: format!("missing column {name:?} in {header:?}"),
        })
}

/// Reads a grid-aligned column (validating the `x` column against `i/n`).
fn read_grid_column(text: &str, value_col: &str) -> Result<(UniformGrid, Vec<f64>)> {
    let (header, rows) = parse_numeric_csv(text)?;
    let xi = column_index(&header, "x")?;
    let vi = column_index(&header, value_col)?;
    let n = rows.len();
    let grid = UniformGrid::new(n)?;
    let mut values = Vec::with_capacity(n);
    for (j, row) in rows.iter().enumerate() {
        if (row[xi] - grid.points()[j]).abs() > 1e-9 {
            return Err(Error::Parse {
                what: "grid column".into(),
                detail: format!(
                    "row {} has x = {} but a uniform grid of {} points expects {}",
                    j + 1,
                    row[xi],
                    n,
                    grid.points()[j]
                ),
            });
        }
        values.push(row[vi]);
    }
    Ok((grid, values))
}

pub fn read_samples_csv(text: &str) -> Result<ModuloSamples> {
    let (grid, values) = read_grid_column(text, "y")?;
    for &y in &values {
        if !(0.0..1.0).contains(&y) {
            return Err(Error::Parse {
                what: "samples".into(),
                detail: format!("modulo sample {y} outside [0, 1)"),
            });
        }
    }
    Ok(ModuloSamples { grid, values })
}

pub fn read_phases_csv(text: &str) -> Result<(UniformGrid, Vec<FractionalPhase>)> {
    let (grid, values) = read_grid_column(text, "g_hat")?;
    let phases: Result<Vec<FractionalPhase>> =
        values.into_iter().map(FractionalPhase::new).collect();
    Ok((grid, phases?))
}

pub fn read_unwrapped_csv(text: &str) -> Result<UnwrappedSamples> {
    let (grid, values) = read_grid_column(text, "f_tilde")?;
    Ok(UnwrappedSamples { grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> ExperimentSpec {
        ExperimentSpec {
            function_id: "paper_fn".into(),
            sigma: 0.12,
            n_list: vec![64, 128],
            seeds: vec![1, 2],
            denoisers: vec![Denoiser::Lp, Denoiser::Knn],
            qi_degree: 2,
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn identity_pipeline_has_zero_error() {
        let cfg = RunConfig {
            function: TestFunction::Constant(0.4),
            sigma: 0.0,
            n: 16,
            base_seed: 1,
            denoiser: Denoiser::Knn,
            lp: LpParams::default(),
            knn: KnnConfig::fixed(1),
            qi_degree: 2,
        };
        let run = run_pipeline(&cfg).unwrap();
        let m = run.record.metrics.unwrap();
        assert!(m.wrap_rmse <= 1e-12);
        assert!(m.wrap_max <= 1e-12);
        assert!(m.aligned_rmse <= 1e-12);
        assert!(m.aligned_max <= 1e-12);
    }

    #[test]
    fn noiseless_lp_pipeline_is_accurate() {
        let cfg = RunConfig {
            function: TestFunction::PaperFn,
            sigma: 0.0,
            n: 256,
            base_seed: 1,
            denoiser: Denoiser::Lp,
            lp: LpParams::default(),
            knn: KnnConfig::auto(),
            qi_degree: 2,
        };
        let run = run_pipeline(&cfg).unwrap();
        let m = run.record.metrics.unwrap();
        assert!(m.aligned_max < 1e-2, "aligned_max = {}", m.aligned_max);
    }

    #[test]
    fn benchmark_run_completes_and_tracks_truth() {
        let cfg = RunConfig {
            function: TestFunction::PaperFn,
            sigma: 0.12,
            n: 600,
            base_seed: 1,
            denoiser: Denoiser::Lp,
            lp: LpParams::default(),
            knn: KnnConfig::auto(),
            qi_degree: 2,
        };
        let run = run_pipeline(&cfg).unwrap();
        let m = run.record.metrics.unwrap();
        assert!(m.wrap_rmse.is_finite() && m.wrap_rmse > 0.0);
        // recovered curve follows the truth up to the integer shift
        let q = m.shift_q as f64;
        let mut dense_max = 0.0f64;
        for i in 0..=600 {
            let x = i as f64 / 600.0;
            let x = x.max(run.samples.grid.points()[0]);
            dense_max = dense_max.max((run.recovered.eval(x) + q - cfg.function.eval(x)).abs());
        }
        assert!(dense_max < 0.5, "recovered curve strays: {dense_max}");
    }

    #[test]
    fn sweep_shape_and_order() {
        let spec = tiny_spec();
        let result = run_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 2 * 2 * 2);
        let keys: Vec<(Denoiser, usize, u64)> = result
            .rows
            .iter()
            .map(|r| (r.denoiser, r.n, r.seed))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        // every run succeeded and summary means sit inside their row ranges
        assert!(result.rows.iter().all(|r| r.metrics.is_some()));
        for s in &result.summary {
            let cell: Vec<f64> = result
                .rows
                .iter()
                .filter(|r| r.denoiser == s.denoiser && r.n == s.n)
                .map(|r| r.metrics.unwrap().wrap_rmse)
                .collect();
            let lo = cell.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = cell.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(s.wrap_rmse_mean >= lo - 1e-15 && s.wrap_rmse_mean <= hi + 1e-15);
        }
    }

    #[test]
    fn sweep_single_cell_matches_pipeline() {
        let mut spec = tiny_spec();
        spec.n_list = vec![64];
        spec.seeds = vec![3];
        spec.denoisers = vec![Denoiser::Knn];
        let result = run_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 1);
        let cfg = RunConfig::from_spec(&spec, Denoiser::Knn, 64, 3).unwrap();
        let direct = run_pipeline(&cfg).unwrap();
        assert_eq!(result.rows[0].metrics, direct.record.metrics);
        assert_eq!(result.rows[0].run_seed, direct.record.run_seed);
    }

    #[test]
    fn sweep_rejects_empty_denoisers() {
        let mut spec = tiny_spec();
        spec.denoisers.clear();
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn sweep_csv_is_deterministic() {
        let spec = tiny_spec();
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a.results_csv(), b.results_csv());
        assert_eq!(a.summary_csv(), b.summary_csv());
    }

    #[test]
    fn failed_rows_are_tagged_and_sweep_continues() {
        let mut spec = tiny_spec();
        // bandwidth below 1/(2n) for n = 128: denoise stage must fail there
        spec.lp.bandwidth_const = 1e-5;
        spec.denoisers = vec![Denoiser::Lp];
        let result = run_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 4);
        for r in &result.rows {
            assert!(r.metrics.is_none());
            assert!(r.error.is_some());
        }
        let csv = result.results_csv();
        assert!(csv.contains("invalid_config") || csv.contains("ill_conditioned"));
    }

    #[test]
    fn run_seed_mixing_changes_with_n_not_denoiser() {
        assert_ne!(derive_run_seed(1, 150), derive_run_seed(1, 300));
        assert_ne!(derive_run_seed(1, 150), derive_run_seed(2, 150));
        let spec = tiny_spec();
        let result = run_sweep(&spec).unwrap();
        let lp: Vec<&RunRecord> = result
            .rows
            .iter()
            .filter(|r| r.denoiser == Denoiser::Lp)
            .collect();
        let knn: Vec<&RunRecord> = result
            .rows
            .iter()
            .filter(|r| r.denoiser == Denoiser::Knn)
            .collect();
        for (a, b) in lp.iter().zip(&knn) {
            assert_eq!((a.n, a.seed, a.run_seed), (b.n, b.seed, b.run_seed));
        }
    }

    #[test]
    fn spec_json_round_trip_and_validation() {
        let spec = tiny_spec();
        let text = serde_json::to_string(&spec).unwrap();
        let back = ExperimentSpec::from_json(&text).unwrap();
        assert_eq!(spec, back);

        let partial: ExperimentSpec =
            ExperimentSpec::from_json(r#"{"sigma": 0.05, "n_list": [128]}"#).unwrap();
        assert_eq!(partial.sigma, 0.05);
        assert_eq!(partial.n_list, vec![128]);
        assert_eq!(partial.seeds, vec![1, 2, 3, 4, 5]);

        assert!(ExperimentSpec::from_json(r#"{"n_list": []}"#).is_err());
        assert!(ExperimentSpec::from_json(r#"{"function_id": "nope"}"#).is_err());
        assert!(ExperimentSpec::from_json(r#"{"n_list": [8]}"#).is_err());
    }

    #[test]
    fn staged_csv_round_trips() {
        let grid = UniformGrid::new(32).unwrap();
        let samples = sample_modulo(
            &TestFunction::PaperFn,
            &grid,
            &NoiseModel::new(0.12, 7).unwrap(),
        );
        let meta = SampleMeta {
            function_id: "paper_fn".into(),
            sigma: 0.12,
            seed: 7,
        };
        let text = samples_csv(&samples, &meta);
        let back = read_samples_csv(&text).unwrap();
        assert_eq!(back.values, samples.values);
        assert_eq!(back.grid.n(), 32);

        let den = knn_denoise(&samples, &KnnConfig::fixed(3)).unwrap();
        let text = phases_csv(&den);
        let (grid2, phases) = read_phases_csv(&text).unwrap();
        assert_eq!(grid2.n(), 32);
        for (a, b) in phases.iter().zip(&den.phases) {
            assert_eq!(a.value(), b.value());
        }

        let unw = unwrap_phases(&den.phases, &grid).unwrap();
        let text = unwrapped_csv(&unw);
        let back = read_unwrapped_csv(&text).unwrap();
        assert_eq!(back.values, unw.values);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(read_samples_csv("i,x,y\n1,0.5,0.2\n").is_err()); // wrong grid x
        assert!(read_samples_csv("# only comments\n").is_err());
        assert!(read_samples_csv("i,x,z\n1,1,0.2\n").is_err()); // missing column
    }
}
