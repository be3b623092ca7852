use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use z3ro_cli::config::{ChannelConfig, ConfigFile, Experiment, ExperimentConfig};
use z3ro_cli::{io, run_with_threads, sidecar};

#[derive(Parser)]
#[command(name = "z3ro", version, about = "Distortion-cancelling precoder experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CSV output path; a `.json` sidecar is written next to it. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Number of antennas.
    #[arg(long = "antennas", global = true)]
    m: Option<usize>,
    /// Number of saturated antennas.
    #[arg(long = "saturated", global = true)]
    m_s: Option<usize>,
    /// PA model, e.g. `rapp:S=2,psat=1`, `softlim:psat=1`, `third-order:a3=-0.05`, `linear`.
    #[arg(long, global = true)]
    pa: Option<String>,
    /// Channel vector CSV with columns index,re,im.
    #[arg(long, global = true)]
    channel_file: Option<PathBuf>,
    #[arg(long, global = true)]
    n_symbols: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form LOS array gain and penalty versus M.
    ArrayGain,
    /// Linear and distortion radiation patterns.
    Pattern,
    /// Line-search maxima for every choice of saturated antenna.
    CompareMaxima {
        /// Also write the best precoder as CSV (index,re,im,is_saturated).
        #[arg(long)]
        precoder_out: Option<PathBuf>,
    },
    /// SNR, SDR and SNDR over a back-off grid.
    SweepBackoff {
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Ergodic achievable rate over a back-off grid.
    Rate {
        #[arg(long)]
        n_channels: Option<usize>,
    },
    /// Run the built-in verification suites.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    FixedPpa,
    FixedPsat,
}

fn load_file(path: Option<&Path>) -> Result<ConfigFile, String> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ConfigFile::parse(&text).map_err(|errs| errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))
}

fn write_outputs(cfg: &ExperimentConfig, out: &z3ro_cli::RunOutput, path: Option<&Path>) -> Result<()> {
    let side = serde_json::to_string_pretty(&sidecar(cfg, out))?;
    match path {
        Some(p) => {
            std::fs::write(p, &out.csv).with_context(|| format!("writing {}", p.display()))?;
            let mut side_path = p.as_os_str().to_owned();
            side_path.push(".json");
            std::fs::write(&side_path, side + "\n")?;
        }
        None => {
            print!("{}", out.csv);
            eprintln!("{side}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut file = match load_file(cli.common.config.as_deref()) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("invalid config:\n{msg}");
            return ExitCode::from(2);
        }
    };

    let c = &cli.common;
    if c.seed.is_some() {
        file.seed = c.seed;
    }
    if c.out.is_some() {
        file.output_path = c.out.clone();
    }
    if c.m.is_some() {
        file.m = c.m;
    }
    if c.m_s.is_some() {
        file.m_s = c.m_s;
        file.saturated_set = None;
    }
    if c.pa.is_some() {
        file.pa = c.pa.clone();
    }
    if let Some(path) = &c.channel_file {
        file.channel = Some(ChannelConfig::File { path: path.clone() });
    }
    if c.n_symbols.is_some() {
        file.n_symbols = c.n_symbols;
    }

    let mut precoder_out = None;
    let experiment = match &cli.command {
        Command::ArrayGain => Experiment::ArrayGain,
        Command::Pattern => Experiment::Pattern,
        Command::CompareMaxima { precoder_out: p } => {
            precoder_out = p.clone();
            Experiment::CompareMaxima
        }
        Command::SweepBackoff { mode } => match mode {
            Some(Mode::FixedPpa) => Experiment::SweepBackoffFixedPpa,
            Some(Mode::FixedPsat) => Experiment::SweepBackoffFixedPsat,
            None => match file.experiment {
                Some(Experiment::SweepBackoffFixedPsat) => Experiment::SweepBackoffFixedPsat,
                _ => Experiment::SweepBackoffFixedPpa,
            },
        },
        Command::Rate { n_channels } => {
            if n_channels.is_some() {
                file.n_channels = *n_channels;
            }
            Experiment::ErgodicRate
        }
        Command::Verify => Experiment::Verify,
    };
    if let Some(e) = file.experiment.as_mut() {
        // The subcommand's sweep mode takes precedence over the file's.
        if matches!(experiment, Experiment::SweepBackoffFixedPpa | Experiment::SweepBackoffFixedPsat)
            && matches!(e, Experiment::SweepBackoffFixedPpa | Experiment::SweepBackoffFixedPsat)
        {
            *e = experiment;
        }
    }

    let cfg = match ExperimentConfig::resolve(experiment, file) {
        Ok(cfg) => cfg,
        Err(errs) => {
            eprintln!("invalid config:");
            for e in errs {
                eprintln!("  {e}");
            }
            return ExitCode::from(2);
        }
    };

    let result = run_with_threads(&cfg, c.threads).and_then(|out| {
        write_outputs(&cfg, &out, cfg.output_path.as_deref())?;
        if let (Some(path), Some(p)) = (&precoder_out, &out.precoder) {
            std::fs::write(path, io::precoder_csv(p)?)?;
        }
        Ok(out.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
