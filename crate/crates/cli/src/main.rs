use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hyplyap::commands::{cmd_check, cmd_run, cmd_sv, CliError};
use hyplyap::config::{apply_config, preset, ConfigError, RunConfig};
use hyplyap::table::{cmd_table, TableVariant};

#[derive(Parser)]
#[command(
    name = "hyplyap",
    about = "Simulates 1-D linear hyperbolic balance laws under boundary feedback and \
             verifies the discrete Lyapunov stability conditions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Cfl075,
    Cfl100,
}

impl From<VariantArg> for TableVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Cfl075 => TableVariant::Cfl075,
            VariantArg::Cfl100 => TableVariant::Cfl100,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and write the Lyapunov series as CSV.
    Run {
        /// Config file (`key = value` lines); layered over --preset if both given.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built-in preset: linear-4.1 or sv-4.2.
        #[arg(long)]
        preset: Option<String>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with code 2 if any stability condition fails.
        #[arg(long)]
        strict: bool,
    },
    /// Evaluate the stability conditions and decay-rate certificates.
    Check {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
    /// Envelope-gap norms and decay rates over J = 200, 400, 800, 1600.
    Table {
        /// Parameter set: cfl075 or cfl100.
        #[arg(value_enum, default_value = "cfl075")]
        variant: VariantArg,
        /// A `model = custom-table` config overriding the fixed parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render a markdown table (5 significant digits) instead of CSV.
        #[arg(long)]
        markdown: bool,
    },
    /// Shallow-water channel preset, swept over the weight rates.
    Sv {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
}

fn load_config(
    config: Option<&PathBuf>,
    preset_name: Option<&str>,
    base: RunConfig,
) -> Result<RunConfig, CliError> {
    let mut cfg = match preset_name {
        Some(name) => preset(name)?,
        None => base,
    };
    if let Some(path) = config {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(ConfigError {
                problems: vec![format!("cannot read {}: {e}", path.display())],
            })
        })?;
        cfg = apply_config(cfg, &text)?;
    }
    Ok(cfg)
}

fn with_output<T>(
    out_flag: Option<&PathBuf>,
    cfg_out: Option<&PathBuf>,
    f: impl FnOnce(&mut dyn Write) -> Result<T, CliError>,
) -> Result<T, CliError> {
    match out_flag.or(cfg_out) {
        Some(path) => {
            let mut file = std::io::BufWriter::new(fs::File::create(path)?);
            let value = f(&mut file)?;
            file.flush()?;
            Ok(value)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = std::io::BufWriter::new(stdout.lock());
            let value = f(&mut lock)?;
            lock.flush()?;
            Ok(value)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            preset: preset_name,
            out,
            strict,
        } => {
            let mut cfg = load_config(
                config.as_ref(),
                preset_name.as_deref(),
                RunConfig::default(),
            )?;
            cfg.strict |= strict;
            let cfg_out = cfg.out.clone();
            with_output(out.as_ref(), cfg_out.as_ref(), |w| cmd_run(&cfg, w))?;
            Ok(())
        }
        Command::Check {
            config,
            preset: preset_name,
            out,
            strict,
        } => {
            let mut cfg = load_config(
                config.as_ref(),
                preset_name.as_deref(),
                RunConfig::default(),
            )?;
            cfg.strict |= strict;
            let cfg_out = cfg.out.clone();
            with_output(out.as_ref(), cfg_out.as_ref(), |w| cmd_check(&cfg, w))?;
            Ok(())
        }
        Command::Table {
            variant,
            config,
            out,
            markdown,
        } => {
            let custom = match config {
                Some(path) => Some(load_config(Some(&path), None, RunConfig::default())?),
                None => None,
            };
            with_output(
                out.as_ref(),
                custom.as_ref().and_then(|c| c.out.as_ref()),
                |w| cmd_table(variant.into(), custom.as_ref(), markdown, w),
            )?;
            Ok(())
        }
        Command::Sv {
            config,
            out,
            strict,
        } => {
            let mut cfg = load_config(config.as_ref(), None, preset("sv-4.2")?)?;
            cfg.strict |= strict;
            let cfg_out = cfg.out.clone();
            with_output(out.as_ref(), cfg_out.as_ref(), |w| cmd_sv(&cfg, w))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
