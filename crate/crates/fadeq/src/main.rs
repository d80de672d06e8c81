use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fadeq::config::RawConfig;
use fadeq::exec::Parallel;
use fadeq::run;
use fadeq_core::harness::{ExperimentConfig, SweepParam};

/// Monte Carlo BER and convergence experiments for ZF, LMS and RLS
/// equalizers over α–µ fading channels.
///
/// Worker threads come from the FADEQ_THREADS environment variable
/// (default: all cores). Results do not depend on the thread count.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER versus SNR.
    Ber {
        #[command(flatten)]
        opts: ExperimentArgs,
        /// Output CSV; the manifest is written next to it.
        #[arg(long, default_value = "ber.csv")]
        out: PathBuf,
    },
    /// Ensemble-averaged training MSE per iteration, at the first SNR.
    Converge {
        #[command(flatten)]
        opts: ExperimentArgs,
        #[arg(long, default_value = "converge.csv")]
        out: PathBuf,
    },
    /// One BER curve per value of a parameter.
    Sweep {
        #[command(flatten)]
        opts: ExperimentArgs,
        /// training_length, equalizer_taps, preset or channel_taps.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        /// Output directory.
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
    /// List the fitted link presets.
    Presets,
}

/// Flags override keys from `--config`.
#[derive(Args)]
struct ExperimentArgs {
    /// key = value config file.
    #[arg(long, allow_hyphen_values = true)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// SNR grid in dB: start:step:stop or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// none, zf, lms or rls.
    #[arg(long, allow_hyphen_values = true)]
    equalizer: Option<String>,
    /// rxtx1, rxtx2 or rxtx5.
    #[arg(long, allow_hyphen_values = true)]
    preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    channel_taps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    training_length: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eq_taps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    streams: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    step_size: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    forgetting: Option<String>,
}

impl ExperimentArgs {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::read(path)?,
            None => RawConfig::default(),
        };
        let flags = [
            ("seed", &self.seed),
            ("snr", &self.snr),
            ("equalizer", &self.equalizer),
            ("preset", &self.preset),
            ("channel_taps", &self.channel_taps),
            ("training_length", &self.training_length),
            ("equalizer_taps", &self.eq_taps),
            ("num_streams", &self.streams),
            ("step_size", &self.step_size),
            ("forgetting", &self.forgetting),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        Ok(raw.resolve()?)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Presets => print!("{}", run::presets_table()),
        Command::Ber { opts, out } => {
            let cfg = opts.resolve()?;
            run::ber(&cfg, &Parallel::from_env()?, &out)?;
        }
        Command::Converge { opts, out } => {
            let cfg = opts.resolve()?;
            run::converge(&cfg, &Parallel::from_env()?, &out)?;
        }
        Command::Sweep { opts, param, values, out } => {
            let cfg = opts.resolve()?;
            let param = SweepParam::from_key(&param).ok_or_else(|| {
                anyhow::anyhow!("--param must be training_length, equalizer_taps, preset or channel_taps")
            })?;
            let values = run::parse_sweep_values(param, &values)?;
            run::sweep(&cfg, param, &values, &Parallel::from_env()?, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
