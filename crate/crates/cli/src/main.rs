use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modesig_cli::{run, CliError, Command, GridRange, Outcome, Report, RunConfig};
use modesig_core::synth::presets;
use modesig_core::GeneratorSpec;

#[derive(Parser)]
#[command(name = "modesig", version, about = "Significance tests for the modes of a kernel density estimate")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Two-stage bootstrap test of every candidate mode.
    Test {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        h: f64,
    },
    /// Superlevel-set persistence with a bootstrap band (d <= 3).
    Persist {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        h: f64,
        /// Grid points per axis.
        #[arg(long)]
        grid_res: Option<usize>,
    },
    /// Picks the smallest bandwidth with the most significant modes.
    Bandwidth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid_min: Option<f64>,
        #[arg(long)]
        grid_max: Option<f64>,
        #[arg(long, default_value_t = modesig_core::bandwidth::DEFAULT_GRID_COUNT)]
        grid_count: usize,
    },
    /// Writes a synthetic sample to OUT/data.csv.
    Simulate {
        #[arg(long, value_enum)]
        family: Option<Family>,
        /// Generator spec as JSON; overrides the preset.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// CSV of points, one per row.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    input: Option<PathBuf>,
    /// Generator spec JSON to use instead of an input file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Skip the first CSV row.
    #[arg(long)]
    header: bool,
    #[arg(long, default_value_t = 0.10)]
    alpha: f64,
    /// Bootstrap replicates.
    #[arg(long = "B", default_value_t = modesig_core::modetest::DEFAULT_BOOTSTRAP)]
    b: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write SVG figures.
    #[arg(long)]
    plots: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Gaussian,
    Mixture,
    Ring,
    SingularMixture,
}

impl Family {
    fn preset(self, n: usize, seed: u64) -> GeneratorSpec {
        match self {
            Family::Gaussian => presets::standard_normal(n, seed),
            Family::Mixture => presets::three_gaussians_1d(n, seed),
            Family::Ring => presets::ring_with_blobs(n, seed),
            Family::SingularMixture => presets::singular_mixture(10.0, 1.0, n, seed),
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Mixture => "mixture",
            Family::Ring => "ring",
            Family::SingularMixture => "singular-mixture",
        }
    }
}

fn read_spec(path: &PathBuf) -> Result<GeneratorSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn base(command: Command, c: Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::new(command, c.out);
    cfg.generator = c.spec.as_ref().map(read_spec).transpose()?;
    cfg.input = c.input;
    cfg.header = c.header;
    cfg.alpha = c.alpha;
    cfg.b = c.b;
    cfg.seed = c.seed;
    cfg.plots = c.plots;
    Ok(cfg)
}

fn build(sub: Sub) -> Result<RunConfig, CliError> {
    Ok(match sub {
        Sub::Test { common, h } => RunConfig {
            h: Some(h),
            ..base(Command::Test, common)?
        },
        Sub::Persist { common, h, grid_res } => RunConfig {
            h: Some(h),
            grid_res,
            ..base(Command::Persist, common)?
        },
        Sub::Bandwidth {
            common,
            grid_min,
            grid_max,
            grid_count,
        } => RunConfig {
            grid: Some(GridRange {
                min: grid_min,
                max: grid_max,
                count: grid_count,
            }),
            ..base(Command::Bandwidth, common)?
        },
        Sub::Simulate {
            family,
            spec,
            n,
            seed,
            out,
        } => {
            let generator = match (spec, family) {
                (Some(path), family) => {
                    let g = read_spec(&path)?;
                    if let Some(f) = family {
                        let tag = serde_json::to_value(&g.family)?["family"].clone();
                        if tag != f.tag() {
                            return Err(CliError::Config(format!(
                                "--family {} disagrees with spec family {tag}",
                                f.tag()
                            )));
                        }
                    }
                    g
                }
                (None, Some(f)) => f.preset(n, seed),
                (None, None) => return Err(CliError::Config("simulate needs --family or --spec".into())),
            };
            RunConfig {
                generator: Some(generator),
                ..RunConfig::new(Command::Simulate, out)
            }
        }
        Sub::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|source| CliError::Io { path: config, source })?;
            RunConfig::from_json(&text)?
        }
    })
}

fn summarize(report: &Report) {
    if report.config.command != Command::Persist {
        println!(
            "candidates: {}, significant: {}",
            report.candidates.len(),
            report.significant_count()
        );
        for (j, p) in report.portraits.iter().enumerate() {
            println!(
                "  mode {}: at {:?}  C = [{:.4e}, {:.4e}]  {}",
                j + 1,
                p.location,
                p.c_interval[0],
                p.c_interval[1],
                if p.significant { "significant" } else { "not significant" }
            );
        }
    }
    if let Some(s) = &report.scan {
        println!("h_hat = {:.6e} with N = {}", s.h_hat, s.n.iter().max().unwrap_or(&0));
    }
    if let Some(p) = &report.persistence {
        let kept = p.retained.iter().filter(|&&r| r).count();
        println!("persistence: {} pairs, band {:.4e}, {kept} retained", p.pairs.len(), p.band);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = build(cli.command).and_then(|cfg| run(&cfg));
    match result {
        Ok(Outcome::Report { report, files }) => {
            summarize(&report);
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Ok(Outcome::Data(path)) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
