use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scatterkit::numerics::potential::{preset, PRESET_NAMES};
use scatterkit::stationary::partial_wave::PHASE_SHIFT_SOLVERS;
use scatterkit::threebody::channel::CHANNEL_PROFILES;
use scatterkit::threebody::FORM_FACTORS;
use scatterkit::timedep::{MODIFIED_PHASES, PROPAGATION_SCHEMES};
use scatterkit_cli::config::ExperimentConfig;
use scatterkit_cli::experiments::EXPERIMENTS;
use scatterkit_cli::{output_dir, CliError, OUT_ENV};

#[derive(Parser)]
#[command(name = "scatterkit", version, about = "Run scattering experiments from a config file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its tables and summary.
    Run {
        config: PathBuf,
        /// Output directory (default: config `output`, then $SCATTERKIT_OUT, then ./scatterkit-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the numerical kernels.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// List potential presets and the named strategies a config may refer to.
    ListPresets,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, out, threads } => {
            let cfg = ExperimentConfig::load(&config)?;
            if let Some(n) = threads {
                if n == 0 {
                    return Err(CliError::Usage("--threads must be at least 1".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let dir = output_dir(out.as_deref(), &cfg);
            let bundle = scatterkit_cli::run(&cfg, &dir)?;
            println!("{} -> {}", bundle.experiment, dir.display());
            for (k, v) in &bundle.summary {
                println!("  {k} = {v:.16e}");
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let derived = scatterkit_cli::validate(&cfg)?;
            println!("ok: {}", cfg.experiment.name());
            for (k, v) in derived {
                println!("  {k} = {v}");
            }
            Ok(())
        }
        Command::ListPresets => {
            println!("potentials:");
            for name in PRESET_NAMES {
                let v = preset(name)?;
                println!("  {name:<28} {}", serde_json::to_string(&v.shape).expect("shape serializes"));
            }
            for (title, names) in [
                ("experiments", EXPERIMENTS),
                ("phase-shift solvers", PHASE_SHIFT_SOLVERS),
                ("propagation schemes", PROPAGATION_SCHEMES),
                ("modified phases", MODIFIED_PHASES),
                ("form factors", FORM_FACTORS),
                ("channel profiles", CHANNEL_PROFILES),
            ] {
                println!("{title}: {}", names.join(", "));
            }
            println!("default output directory: ${OUT_ENV}");
            Ok(())
        }
    }
}
