use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use copram::error::Error;
use copram::harness::{
    emit_csv, recover_single, run_block_sweep, run_noise_sweep, run_phase_transition,
    run_powerlaw_sweep, write_csv, ConfigOverrides, ExperimentGrid, ExperimentKind, Preset,
};

#[derive(Parser)]
#[command(name = "copram", version, about = "Sparse phase retrieval experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one planted instance and print its error trace.
    Recover(Flags),
    /// Recovery probability over (s, m).
    PhaseTransition(Flags),
    /// Block CoPRAM recovery probability over (b, m).
    BlockSweep(Flags),
    /// Mean relative error over the noise-to-signal ratio.
    NoiseSweep(Flags),
    /// Recovery probability for power-law signals over (alpha, m).
    PowerlawSweep(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    n: Option<String>,
    /// Sparsity (single, comma list or start:stop:step).
    #[arg(long)]
    s: Option<String>,
    /// Block length; 0 means unstructured signals.
    #[arg(long)]
    b: Option<String>,
    /// Number of nonzero blocks (sets s = k*b).
    #[arg(long)]
    k: Option<String>,
    /// Measurement counts (single, comma list or start:stop:step).
    #[arg(long)]
    m: Option<String>,
    /// Power-law exponents; `normal` adds the Gaussian baseline.
    #[arg(long)]
    alpha: Option<String>,
    /// Noise-to-signal ratios.
    #[arg(long)]
    nsr: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// copram or block-copram.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    t0: Option<String>,
    #[arg(long = "inner-iters")]
    inner_iters: Option<String>,
    #[arg(long = "success-threshold")]
    success_threshold: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<String>,
    /// paper or quick.
    #[arg(long)]
    preset: Option<String>,
    /// Flat TOML file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> Result<ConfigOverrides, Error> {
        let mut o = ConfigOverrides::default();
        let pairs = [
            ("n", &self.n),
            ("s", &self.s),
            ("b", &self.b),
            ("k", &self.k),
            ("m", &self.m),
            ("alpha", &self.alpha),
            ("nsr", &self.nsr),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("algo", &self.algo),
            ("t0", &self.t0),
            ("inner-iters", &self.inner_iters),
            ("success-threshold", &self.success_threshold),
            ("workers", &self.workers),
            ("preset", &self.preset),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                o.set(key, v)?;
            }
        }
        Ok(o)
    }

    fn grid(&self, kind: ExperimentKind) -> Result<ExperimentGrid, Error> {
        let cli = self.overrides()?;
        let file = match &self.config {
            Some(path) => ConfigOverrides::from_file(path)?,
            None => ConfigOverrides::default(),
        };
        let merged = cli.or(file);
        let preset: Preset = merged.preset.as_deref().unwrap_or("paper").parse()?;
        let mut grid = ExperimentGrid::preset(kind, preset);
        merged.apply(&mut grid)?;
        Ok(grid)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Convergence { .. } => 4,
        Error::Config { .. } | Error::Contract { .. } | Error::Dimension { .. } => 2,
    }
}

fn recover(flags: &Flags) -> Result<(), Error> {
    let grid = flags.grid(ExperimentKind::SingleRecover)?;
    let out = recover_single(&grid)?;
    let c = &out.cell;
    let mut w = std::io::stdout().lock();
    let io = |source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    (|| -> std::io::Result<()> {
        writeln!(
            w,
            "algorithm={} n={} s={} b={} m={} nsr={} seed={}",
            c.algorithm,
            c.n,
            c.s,
            c.b.map_or("-".to_string(), |b| b.to_string()),
            c.m,
            c.nsr,
            grid.master_seed
        )?;
        writeln!(w, "iter,dist,residual")?;
        for (t, (d, r)) in out
            .report
            .dist_trace
            .iter()
            .zip(&out.report.residual_trace)
            .enumerate()
        {
            writeln!(w, "{t},{d:.6e},{r:.6e}")?;
        }
        writeln!(w, "relative_error={:.6e}", out.verdict.relative_error)?;
        writeln!(w, "success={}", out.verdict.success)?;
        writeln!(w, "wall_time_seconds={:.6}", out.seconds)
    })()
    .map_err(io)
}

fn sweep(flags: &Flags, kind: ExperimentKind) -> Result<(), Error> {
    let grid = flags.grid(kind)?;
    let rows = match kind {
        ExperimentKind::PhaseTransition => run_phase_transition(&grid)?,
        ExperimentKind::BlockSweep => run_block_sweep(&grid)?,
        ExperimentKind::NoiseSweep => run_noise_sweep(&grid)?,
        _ => run_powerlaw_sweep(&grid)?,
    };
    match &flags.out {
        Some(path) => emit_csv(&rows, path),
        None => write_csv(&rows, std::io::stdout().lock()).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Recover(f) => recover(f),
        Command::PhaseTransition(f) => sweep(f, ExperimentKind::PhaseTransition),
        Command::BlockSweep(f) => sweep(f, ExperimentKind::BlockSweep),
        Command::NoiseSweep(f) => sweep(f, ExperimentKind::NoiseSweep),
        Command::PowerlawSweep(f) => sweep(f, ExperimentKind::PowerlawSweep),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
