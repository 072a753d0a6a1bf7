use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use procmvs::io::{generate_dataset, preview_grid, preview_sheet, write_obj};
use procmvs::scene::{make_shape, SizeClass};
use procmvs::seed::Stream;
use procmvs::{parse_config, GeneratorConfig};

const EXIT_CONFIG: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "procmvs",
    version,
    about = "Procedural multi-view stereo dataset generator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a batch of scenes, each with 8 views, depth maps, cameras and a manifest.
    Generate {
        /// TOML configuration; defaults are used for absent keys or a missing file argument.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        scenes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "PROCMVS_WORKERS")]
        workers: Option<usize>,
    },
    /// Tile the 8 views of one scene directory, or of several, one row each.
    Preview {
        #[arg(long, num_args = 1.., required = true)]
        scene: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one generated shape as Wavefront OBJ.
    ExportMesh {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ShapeClass::Large)]
        class: ShapeClass,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeClass {
    Large,
    Small,
    Tiny,
}

enum Failure {
    Config(anyhow::Error),
    Other(anyhow::Error),
}

fn load_config(path: Option<&Path>) -> Result<GeneratorConfig, Failure> {
    let Some(path) = path else {
        return Ok(GeneratorConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Config)?;
    parse_config(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::Config)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Generate {
            config,
            seed,
            scenes,
            out,
            workers,
        } => {
            let mut config = load_config(config.as_deref())?;
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(n) = scenes {
                config.n_scenes = n;
            }
            config.validate().map_err(|e| Failure::Config(e.into()))?;
            let workers = workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            log::info!(
                "generating {} scenes with {workers} workers into {}",
                config.n_scenes,
                out.display()
            );
            let (records, skipped) =
                generate_dataset(&config, &out, workers).map_err(|e| Failure::Other(e.into()))?;
            println!("wrote {} scenes to {}", records.len(), out.display());
            if skipped.is_empty() {
                Ok(0)
            } else {
                for s in &skipped {
                    eprintln!(
                        "skipped scene {} (seed {:#018x}): {}",
                        s.index, s.seed, s.error
                    );
                }
                Ok(EXIT_PARTIAL)
            }
        }
        Command::Preview { scene, out } => {
            let result = if let [one] = scene.as_slice() {
                preview_sheet(one, &out)
            } else {
                let dirs: Vec<&Path> = scene.iter().map(PathBuf::as_path).collect();
                preview_grid(&dirs, &out)
            };
            result
                .with_context(|| format!("writing {}", out.display()))
                .map_err(Failure::Other)?;
            Ok(0)
        }
        Command::ExportMesh {
            seed,
            out,
            class,
            index,
            config,
        } => {
            let config = load_config(config.as_deref())?;
            let (stream, class) = match class {
                ShapeClass::Large => (Stream::LargeShapes, SizeClass::Large),
                ShapeClass::Small => (Stream::SmallShapes, SizeClass::Small),
                ShapeClass::Tiny => (Stream::GroundScatter, SizeClass::Tiny),
            };
            let mesh = make_shape(seed, stream, index, class, &config)
                .map_err(|e| Failure::Other(e.into()))?;
            write_obj(&out, &mesh).map_err(|e| Failure::Other(e.into()))?;
            println!(
                "wrote {} triangles to {}",
                mesh.triangle_count(),
                out.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
