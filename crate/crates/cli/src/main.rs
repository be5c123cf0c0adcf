mod commands;
mod formats;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tetrafold_core::bands::StripDirection;
use tetrafold_core::Error as CoreError;

use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "tetrafold", version, about = "Geodesic foldings of the regular tetrahedron")]
struct Cli {
    /// Cap on worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write a JSON run manifest listing parameters and output files.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the combinatorial deltahedron (a, b) and write it as JSON.
    Mesh {
        a: i64,
        b: i64,
        /// Output path (stdout when omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decompose (a, b) into geodesic bands.
    Bands {
        a: i64,
        b: i64,
        #[arg(long, value_enum, default_value_t = DirectionArg::Horizontal)]
        direction: DirectionArg,
        /// Write each band's planar strip as SVG (`<stem>-<i>.svg` when there are several).
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Millimetres per unit edge in the SVG.
        #[arg(long, default_value_t = 10.0)]
        scale_mm: f64,
        /// JSON report of the band face sequences.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// List coprime pairs sharing a band length, up to `s_max` faces.
    Common {
        #[arg(long)]
        s_max: i64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also group pairs with gcd(a, b) > 1.
        #[arg(long)]
        include_non_coprime: bool,
    },
    /// Embed (a, b) with unit edges, keeping the largest-volume restart.
    Embed {
        a: i64,
        b: i64,
        #[command(flatten)]
        relax: RelaxArgs,
        #[arg(long)]
        obj: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Relative-volume table for 1 <= a <= b <= max.
    Table {
        #[arg(long, default_value_t = 7)]
        max: i64,
        #[command(flatten)]
        relax: RelaxArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Horizontal,
    Rising,
    Falling,
}

impl From<DirectionArg> for StripDirection {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Horizontal => StripDirection::Horizontal,
            DirectionArg::Rising => StripDirection::Rising,
            DirectionArg::Falling => StripDirection::Falling,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct RelaxArgs {
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    time_step: Option<f64>,
    #[arg(long)]
    pressure: Option<f64>,
    #[arg(long)]
    pressure_decay: Option<f64>,
    /// Disable kinetic damping.
    #[arg(long)]
    no_damping: bool,
}

impl RelaxArgs {
    fn config(&self) -> tetrafold_core::RelaxConfig {
        let mut cfg = tetrafold_core::RelaxConfig { restarts: self.restarts, seed: self.seed, ..Default::default() };
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if let Some(n) = self.max_iterations {
            cfg.max_iterations = n;
        }
        if let Some(dt) = self.time_step {
            cfg.time_step = dt;
        }
        if let Some(p) = self.pressure {
            cfg.pressure.initial = p;
        }
        if let Some(d) = self.pressure_decay {
            cfg.pressure.decay = d;
        }
        cfg.kinetic_damping = !self.no_damping;
        cfg
    }
}

fn run(argv: Vec<String>) -> anyhow::Result<bool> {
    let cli = Cli::try_parse_from(&argv).unwrap_or_else(|e| e.exit());
    if let Command::Replay { manifest } = &cli.command {
        let recorded = RunManifest::read(manifest)?;
        return run(recorded.argv);
    }

    let started = chrono::Utc::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let outcome = pool.install(|| commands::dispatch(&cli.command))?;

    if let Some(path) = &cli.manifest {
        let m = RunManifest {
            command: outcome.command.to_string(),
            argv,
            parameters: outcome.parameters.clone(),
            seed: outcome.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: started.to_rfc3339(),
            finished_at: chrono::Utc::now().to_rfc3339(),
            outputs: outcome.outputs.iter().map(|p| p.display().to_string()).collect(),
        };
        m.write(path)?;
    }
    Ok(outcome.success)
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<CoreError>() {
                Some(CoreError::InvalidParameters { .. } | CoreError::InvalidConfig(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
