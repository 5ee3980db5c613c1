//! Command-line interface to the modulo-sample recovery pipeline.
//!
//! Subcommands mirror the pipeline stages (`generate`, `denoise`, `unwrap`,
//! `recover`), plus `pipeline` for an end-to-end run, `sweep` for the
//! experiment grid, and `bounds` for the theoretical calculators. Staged
//! subcommands exchange CSV files; `sweep` reads a JSON config that mirrors
//! the `ExperimentSpec` schema, with CLI flags taking precedence.

use clap::{Args, Parser, Subcommand};
use modrec::experiments::{
    self, record_csv_header, record_csv_row, run_pipeline, run_sweep, Denoiser, ExperimentSpec,
    LpParams, RunConfig, SampleMeta,
};
use modrec::knn_denoiser::KnnConfig;
use modrec::metrics_bounds::{
    a_sigma, practical_bandwidth, theoretical_bandwidth, theoretical_delta, TheoryConstants,
};
use modrec::signal_model::{
    sample_modulo, NoiseModel, SmoothnessParams, TestFunction, UniformGrid,
};
use modrec::unwrapper::check_unwrap_feasibility;
use modrec::{build_qi, denoise, knn_denoise, unwrap_phases, Error, Kernel, Result};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "modrec",
    version,
    about = "Recover smooth functions from noisy modulo-1 samples"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate noisy modulo-1 samples of a catalogue function
    Generate(GenerateArgs),
    /// Denoise a samples file into fractional phase estimates
    Denoise(DenoiseArgs),
    /// Sequentially unwrap a phases file into real-valued samples
    Unwrap(UnwrapArgs),
    /// Build the continuous estimate from unwrapped samples
    Recover(RecoverArgs),
    /// Run the full pipeline in one shot and print a result row
    Pipeline(PipelineArgs),
    /// Run a sweep over denoisers x grid sizes x seeds, writing CSV tables
    Sweep(SweepArgs),
    /// Evaluate the theoretical bound calculators
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct SignalArgs {
    /// Function id: paper_fn, constant:<c>, linear:<a>,<b>, poly:<c0>,<c1>,.., cos_k:<k>
    #[arg(long = "fn", value_name = "ID", default_value = "paper_fn")]
    function: String,
    /// Gaussian noise level
    #[arg(long, default_value_t = 0.12)]
    sigma: f64,
    /// Grid size
    #[arg(long, default_value_t = 600)]
    n: usize,
    /// Noise seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct DenoiserArgs {
    /// Stage-1 method: lp or knn
    #[arg(long, default_value = "lp")]
    denoiser: String,
    /// Local polynomial order
    #[arg(long, default_value_t = 2)]
    l: u32,
    /// Smoothness index used by the bandwidth rule
    #[arg(long, default_value_t = 2.4)]
    beta: f64,
    /// Constant of the bandwidth rule b = const (ln n / n)^(beta/(2 beta + 1))
    #[arg(long, default_value_t = 0.1)]
    bandwidth_const: f64,
    /// Kernel id: epanechnikov, box or triangular
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
    /// Fixed neighbor count for knn
    #[arg(long)]
    k: Option<usize>,
    /// Use the automatic neighbor rule k = ceil(0.09 n^(2/3) (ln n)^(1/3))
    #[arg(long)]
    k_auto: bool,
}

impl DenoiserArgs {
    fn denoiser(&self) -> Result<Denoiser> {
        self.denoiser.parse()
    }

    fn lp_params(&self) -> Result<LpParams> {
        Ok(LpParams {
            order_l: self.l,
            beta: self.beta,
            bandwidth_const: self.bandwidth_const,
            kernel: self.kernel.parse::<Kernel>()?,
            ..LpParams::default()
        })
    }

    fn knn_config(&self) -> KnnConfig {
        match (self.k, self.k_auto) {
            (Some(k), false) => KnnConfig::fixed(k),
            _ => KnnConfig::auto(),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DenoiseArgs {
    /// Samples CSV produced by `generate`
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[command(flatten)]
    denoiser: DenoiserArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UnwrapArgs {
    /// Phases CSV produced by `denoise`
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    /// Unwrapped CSV produced by `unwrap`
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Local degree of the quasi-interpolant
    #[arg(long, default_value_t = 2)]
    qi_degree: usize,
    /// Rows in the dense output table
    #[arg(long, default_value_t = 1000)]
    resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    signal: SignalArgs,
    #[command(flatten)]
    denoiser: DenoiserArgs,
    #[arg(long, default_value_t = 2)]
    qi_degree: usize,
    /// Rows in the dense recovered-function table
    #[arg(long, default_value_t = 1000)]
    resolution: usize,
    /// Directory for stage artifacts (samples, phases, unwrapped, recovered,
    /// plot data); row goes to stdout either way
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config mirroring the ExperimentSpec schema
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's function id
    #[arg(long = "fn")]
    function: Option<String>,
    /// Override the config's noise level
    #[arg(long)]
    sigma: Option<f64>,
    /// Override the config's grid sizes (comma-separated)
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Override the config's seeds (comma-separated)
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Override the config's denoisers (comma-separated)
    #[arg(long, value_delimiter = ',')]
    denoisers: Option<Vec<String>>,
    /// Override the config's quasi-interpolant degree
    #[arg(long)]
    qi_degree: Option<usize>,
    /// Output directory for results.csv, summary.csv, timings.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// JSON file with the constants (schema: TheoryConstants)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 600)]
    n: usize,
    #[arg(long)]
    sigma: Option<f64>,
    /// Probability exponent (>= 2)
    #[arg(long)]
    c: Option<f64>,
    /// Hölder constant of the circle components
    #[arg(long)]
    m_prime: Option<f64>,
    #[arg(long)]
    k_max: Option<f64>,
    /// Moment-matrix eigenvalue floor
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    beta: Option<f64>,
    /// Bandwidth-rule constant for the practical bandwidth line
    #[arg(long, default_value_t = 0.1)]
    bandwidth_const: f64,
    /// Lipschitz-scale constant of f; enables the unwrap feasibility line
    #[arg(long)]
    lipschitz: Option<f64>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        let mut source = std::error::Error::source(&e);
        while let Some(s) = source {
            eprintln!("  caused by: {s}");
            source = s.source();
        }
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Generate(args) => cmd_generate(args),
        Cmd::Denoise(args) => cmd_denoise(args),
        Cmd::Unwrap(args) => cmd_unwrap(args),
        Cmd::Recover(args) => cmd_recover(args),
        Cmd::Pipeline(args) => cmd_pipeline(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Bounds(args) => cmd_bounds(args),
    }
}

/// Writes to stdout, treating a closed pipe (e.g. piping into `head`) as a
/// normal way for the consumer to stop reading.
fn print_out(text: &str) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(path, text)?;
            Ok(())
        }
        None => {
            print_out(text);
            Ok(())
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let f: TestFunction = args.signal.function.parse()?;
    let grid = UniformGrid::new(args.signal.n)?;
    let noise = NoiseModel::new(args.signal.sigma, args.signal.seed)?;
    let samples = sample_modulo(&f, &grid, &noise);
    let meta = SampleMeta {
        function_id: args.signal.function.clone(),
        sigma: args.signal.sigma,
        seed: args.signal.seed,
    };
    emit(
        args.out.as_deref(),
        &experiments::samples_csv(&samples, &meta),
    )
}

fn cmd_denoise(args: DenoiseArgs) -> Result<()> {
    let samples = experiments::read_samples_csv(&fs::read_to_string(&args.input)?)?;
    let denoised = match args.denoiser.denoiser()? {
        Denoiser::Lp => {
            let cfg = args.denoiser.lp_params()?.to_config(samples.grid.n())?;
            denoise(&samples, &cfg)?
        }
        Denoiser::Knn => knn_denoise(&samples, &args.denoiser.knn_config())?,
    };
    emit(args.out.as_deref(), &experiments::phases_csv(&denoised))
}

fn cmd_unwrap(args: UnwrapArgs) -> Result<()> {
    let (grid, phases) = experiments::read_phases_csv(&fs::read_to_string(&args.input)?)?;
    let unwrapped = unwrap_phases(&phases, &grid)?;
    emit(args.out.as_deref(), &experiments::unwrapped_csv(&unwrapped))
}

fn cmd_recover(args: RecoverArgs) -> Result<()> {
    let unwrapped = experiments::read_unwrapped_csv(&fs::read_to_string(&args.input)?)?;
    let recovered = build_qi(&unwrapped, args.qi_degree)?;
    emit(
        args.out.as_deref(),
        &experiments::recovered_csv(&recovered, args.resolution),
    )
}

fn cmd_pipeline(args: PipelineArgs) -> Result<()> {
    let cfg = RunConfig {
        function: args.signal.function.parse()?,
        sigma: args.signal.sigma,
        n: args.signal.n,
        base_seed: args.signal.seed,
        denoiser: args.denoiser.denoiser()?,
        lp: args.denoiser.lp_params()?,
        knn: args.denoiser.knn_config(),
        qi_degree: args.qi_degree,
    };
    let run = run_pipeline(&cfg)?;
    print_out(&format!(
        "{}\n{}\n",
        record_csv_header(),
        record_csv_row(&run.record)
    ));
    if let Some(dir) = args.out {
        fs::create_dir_all(&dir)?;
        let meta = SampleMeta {
            function_id: args.signal.function.clone(),
            sigma: args.signal.sigma,
            seed: run.record.run_seed,
        };
        fs::write(
            dir.join("samples.csv"),
            experiments::samples_csv(&run.samples, &meta),
        )?;
        fs::write(
            dir.join("denoised.csv"),
            experiments::phases_csv(&run.denoised),
        )?;
        fs::write(
            dir.join("unwrapped.csv"),
            experiments::unwrapped_csv(&run.unwrapped),
        )?;
        fs::write(
            dir.join("recovered.csv"),
            experiments::recovered_csv(&run.recovered, args.resolution),
        )?;
        fs::write(dir.join("plotdata.csv"), experiments::plotdata_csv(&run))?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut spec = match &args.config {
        Some(path) => ExperimentSpec::from_json(&fs::read_to_string(path)?)?,
        None => ExperimentSpec::default(),
    };
    if let Some(f) = args.function {
        spec.function_id = f;
    }
    if let Some(s) = args.sigma {
        spec.sigma = s;
    }
    if let Some(n) = args.n {
        spec.n_list = n;
    }
    if let Some(seeds) = args.seeds {
        spec.seeds = seeds;
    }
    if let Some(ds) = args.denoisers {
        spec.denoisers = ds
            .iter()
            .map(|d| d.parse())
            .collect::<Result<Vec<Denoiser>>>()?;
    }
    if let Some(q) = args.qi_degree {
        spec.qi_degree = q;
    }
    spec.validate()?;

    let result = run_sweep(&spec)?;
    // the destination is not part of the experiment: keep it out of the
    // config echo so identical specs give byte-identical artifacts
    let dir = args
        .out
        .or_else(|| spec.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("results.csv"), result.results_csv())?;
    fs::write(dir.join("summary.csv"), result.summary_csv())?;
    fs::write(dir.join("timings.csv"), result.timings_csv())?;
    let failures = result.rows.iter().filter(|r| r.error.is_some()).count();
    print_out(&format!(
        "sweep: {} rows ({} failed) -> {}\n",
        result.rows.len(),
        failures,
        dir.display()
    ));
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let mut consts = match &args.config {
        Some(path) => serde_json::from_str::<TheoryConstants>(&fs::read_to_string(path)?)?,
        None => TheoryConstants {
            sigma: 0.12,
            c: 2.0,
            m_prime: 1314.0,
            k_max: 0.75,
            lambda0: 0.1,
            l: 2,
            beta: 2.4,
        },
    };
    if let Some(v) = args.sigma {
        consts.sigma = v;
    }
    if let Some(v) = args.c {
        consts.c = v;
    }
    if let Some(v) = args.m_prime {
        consts.m_prime = v;
    }
    if let Some(v) = args.k_max {
        consts.k_max = v;
    }
    if let Some(v) = args.lambda0 {
        consts.lambda0 = v;
    }
    if let Some(v) = args.l {
        consts.l = v;
    }
    if let Some(v) = args.beta {
        consts.beta = v;
    }
    consts.validate()?;

    let n = args.n;
    if n < 2 {
        return Err(Error::InvalidConfig("bounds need n >= 2".into()));
    }
    let mut report = String::from("quantity,value\n");
    report.push_str(&format!("n,{n}\n"));
    report.push_str(&format!("a_sigma,{}\n", a_sigma(consts.sigma)));
    report.push_str(&format!("b_star,{}\n", theoretical_bandwidth(&consts, n)));
    report.push_str(&format!(
        "b_practical,{}\n",
        practical_bandwidth(args.bandwidth_const, consts.beta, n)
    ));
    let delta = theoretical_delta(&consts, n);
    report.push_str(&format!("delta_n,{delta}\n"));
    if let Some(lip) = args.lipschitz {
        let sm = SmoothnessParams::new(
            consts.l,
            (consts.beta - consts.l as f64).clamp(f64::MIN_POSITIVE, 1.0),
            lip.max(f64::MIN_POSITIVE),
            lip.max(f64::MIN_POSITIVE),
        )?;
        report.push_str(&format!(
            "unwrap_feasible,{}\n",
            check_unwrap_feasibility(delta, &sm, n)
        ));
    }
    print_out(&report);
    Ok(())
}
