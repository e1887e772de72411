mod corpus;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use footprint_core::io::job::{run_job_detailed, EXIT_FATAL};
use footprint_core::io::{corpus_to_geojson, Format, JobConfig};
use footprint_core::{CornerMode, PipelineConfig, SimplifyConfig};

use corpus::CorpusArgs;

#[derive(Parser, Debug)]
#[command(name = "regularize", version, about = "Regularize noisy building footprint polygons")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic corpus with known ground truth as GeoJSON.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Also emit the clean outline of every case.
        #[arg(long)]
        with_clean: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Geojson,
    Wkt,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Geojson => Format::GeoJson,
            FormatArg::Wkt => Format::Wkt,
            FormatArg::Csv => Format::CsvXy,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    /// Tolerance 0.1 m.
    Cadastral,
    /// Tolerance 1.0 m.
    Planning,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CornerArg {
    Intersect,
    Project,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    DpFirst,
    DespikeFirst,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Input file. With --seed-corpus the generated corpus is written here first.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Input and output format; guessed from the extensions when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Simplification tolerance in meters.
    #[arg(long, value_name = "M", conflicts_with = "preset")]
    eps: Option<f64>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Largest vertex angle counted as sharp, degrees.
    #[arg(long, value_name = "DEG")]
    spike_angle: Option<f64>,
    /// Longest edge counted as short, meters.
    #[arg(long, value_name = "M", conflicts_with = "gsd")]
    spike_edge: Option<f64>,
    /// Largest triangle area counted as tiny, square meters.
    #[arg(long, value_name = "M2")]
    spike_area: Option<f64>,
    /// How many spike criteria must fire.
    #[arg(long, value_name = "N")]
    min_criteria: Option<usize>,
    /// Source raster pixel size; sets the short-edge limit to two pixels.
    #[arg(long, value_name = "M")]
    gsd: Option<f64>,
    #[arg(long, value_enum)]
    corner_mode: Option<CornerArg>,
    #[arg(long, value_enum)]
    order: Option<Order>,
    /// Write per-ring reports as JSON.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Write one before/after SVG per feature into this directory.
    #[arg(long, value_name = "PATH")]
    svg_dir: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Generate the input instead of reading it, e.g.
    /// "shape=l_shape,count=100,seed=7,burrs=5".
    #[arg(long, value_name = "SPEC")]
    seed_corpus: Option<String>,
}

impl RunArgs {
    fn pipeline(&self) -> Result<PipelineConfig, String> {
        let mut cfg = PipelineConfig::default();
        if let Some(eps) = self.eps {
            cfg.simplify = SimplifyConfig::new(eps).map_err(|e| e.to_string())?;
        }
        match self.preset {
            Some(Preset::Cadastral) => cfg.simplify = SimplifyConfig::cadastral(),
            Some(Preset::Planning) => cfg.simplify = SimplifyConfig::planning(),
            None => {}
        }
        if let Some(v) = self.spike_angle {
            cfg.spike.max_angle = v;
        }
        if let Some(v) = self.spike_edge {
            cfg.spike.max_edge = v;
        }
        if let Some(g) = self.gsd {
            cfg.spike.max_edge = 2.0 * g;
        }
        if let Some(v) = self.spike_area {
            cfg.spike.max_area = v;
        }
        if let Some(v) = self.min_criteria {
            cfg.spike.min_criteria = v;
        }
        if let Some(m) = self.corner_mode {
            cfg.corner_mode = match m {
                CornerArg::Intersect => CornerMode::Intersect,
                CornerArg::Project => CornerMode::Project,
            };
        }
        if let Some(o) = self.order {
            cfg.despike_before_simplify = matches!(o, Order::DespikeFirst);
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    fn job(&self) -> Result<JobConfig, String> {
        let input = self.input.clone().ok_or("--in is required")?;
        let output = self.out.clone().ok_or("--out is required")?;
        let mut job = JobConfig::new(input, output);
        job.pipeline = self.pipeline()?;
        job.report_path = self.report.clone();
        job.svg_path = self.svg_dir.clone();
        job.parallelism = self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        job.input_format = self.format.map(Format::from);
        job.output_format = self.format.map(Format::from);
        Ok(job)
    }
}

fn write_corpus(args: &CorpusArgs, path: &PathBuf, with_clean: bool) -> Result<usize, String> {
    let (template, count, seed, random_rotation) = args.resolve()?;
    let cases = footprint_core::synth::corpus(&template, count, seed, random_rotation).map_err(|e| e.to_string())?;
    std::fs::write(path, corpus_to_geojson(&cases, with_clean)).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(cases.len())
}

fn run(cli: Cli) -> Result<i32, String> {
    if let Some(Command::Synth { out, corpus, with_clean }) = cli.command {
        let n = write_corpus(&corpus, &out, with_clean)?;
        log::info!("wrote {n} case(s) to {}", out.display());
        return Ok(0);
    }
    let job = cli.run.job()?;
    if let Some(spec) = &cli.run.seed_corpus {
        let args = CorpusArgs::parse_compact(spec)?;
        write_corpus(&args, &job.input_path, false)?;
    }
    let summary = run_job_detailed(&job).map_err(|e| e.to_string())?;
    log::info!(
        "{} feature(s) in, {} out, {} skipped, {} degraded",
        summary.features_in,
        summary.features_out,
        summary.skipped,
        summary.degraded
    );
    Ok(summary.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("REGULARIZE_LOG", "warn")).init();
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("regularize: {msg}");
            EXIT_FATAL
        }
    };
    ExitCode::from(code as u8)
}
