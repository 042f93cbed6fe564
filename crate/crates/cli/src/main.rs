//! `pathlab`: runs the library's experiments from the command line.

mod experiments;
mod expr;
mod output;
mod params;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgMatches, Args, Command, FromArgMatches, ValueEnum};
use serde::Deserialize;

use experiments::Experiment;
use output::Header;
use params::Resolved;

/// Seed used when neither the flag nor the config file gives one.
const DEFAULT_SEED: u64 = 1;
/// Directory for relative output paths and for output when `--output` is
/// absent.
const OUTPUT_DIR_VAR: &str = "PATHLAB_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML file with optional `format`, `output`, `seed` and a `[params]`
    /// table; flags take precedence
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Set a parameter; repeatable
    #[arg(short = 'p', long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; relative paths resolve against $PATHLAB_OUTPUT_DIR
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Master seed of stochastic experiments
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: Option<String>,
    format: Option<Format>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    params: BTreeMap<String, toml::Value>,
}

fn about(e: Experiment) -> &'static str {
    match e {
        Experiment::RingPropagator => {
            "Ring propagator as a winding sum and as an eigenfunction expansion"
        }
        Experiment::Eq10Check => "Pair amplitude against its displacement-factor form",
        Experiment::Interferometer => {
            "Amplitudes and joint distribution of the two-particle interferometer"
        }
        Experiment::Chsh => "CHSH value, exact, sampled or from a local model",
        Experiment::RppTrials => "Random-path trials against the four-outcome distribution",
        Experiment::SpinClassify => "Homotopy class of a closed rotation path read from a file",
        Experiment::SpinPair => "Spin pair reduced to y-axis winding classes",
        Experiment::CorrelationScan => "Correlation over a grid of setting differences",
    }
}

fn schema_help(e: Experiment) -> String {
    let mut text = String::from("Parameters (-p NAME=VALUE):\n");
    for spec in e.schema() {
        let default = spec.default.unwrap_or("none");
        text.push_str(&format!(
            "  {:<10} [default: {default}]  {}\n",
            spec.name, spec.help
        ));
    }
    text.push_str("\nNumbers accept expressions such as pi/4 or 3pi/4.");
    text
}

fn cli() -> Command {
    let mut cmd = Command::new("pathlab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Path-space amplitude experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for e in Experiment::value_variants() {
        let sub = Command::new(e.name())
            .about(about(*e))
            .after_help(schema_help(*e));
        cmd = cmd.subcommand(CommonArgs::augment_args(sub));
    }
    cmd
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn toml_scalar(name: &str, value: &toml::Value) -> Result<String, CliError> {
    match value {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(n) => Ok(n.to_string()),
        toml::Value::Float(x) => Ok(x.to_string()),
        other => Err(CliError::Usage(format!(
            "parameter `{name}`: expected a number or string, found {}",
            other.type_str()
        ))),
    }
}

fn output_dir() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_DIR_VAR)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn under_output_dir(path: &Path) -> PathBuf {
    match output_dir() {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Compute(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display())))
}

fn run(experiment: Experiment, matches: &ArgMatches) -> Result<(), CliError> {
    let args = CommonArgs::from_arg_matches(matches).map_err(|e| CliError::Usage(e.to_string()))?;
    let config = match &args.config {
        Some(path) => read_config(path)?,
        None => ConfigFile::default(),
    };
    if let Some(name) = &config.experiment {
        if name != experiment.name() {
            return Err(CliError::Usage(format!(
                "config is for `{name}`, not `{}`",
                experiment.name()
            )));
        }
    }
    let file_params = config
        .params
        .iter()
        .map(|(k, v)| Ok((k.clone(), toml_scalar(k, v)?)))
        .collect::<Result<BTreeMap<_, _>, CliError>>()?;
    let flag_params = args
        .params
        .iter()
        .map(|f| params::split_flag(f))
        .collect::<Result<Vec<_>, _>>()?;
    let resolved = Resolved::new(&experiment.schema(), &file_params, &flag_params)?;
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let format = args.format.or(config.format).unwrap_or(Format::Table);
    let output = args.output.or(config.output);

    let result = experiment.run(&resolved, seed)?;
    let header = Header {
        experiment: experiment.name(),
        seed,
        params: &resolved,
    };
    let text = match format {
        Format::Table => output::table(&header, &result.report),
        Format::Json => output::json(&header, &result.report),
    };

    let destination = match output {
        Some(path) => Some(under_output_dir(&path)),
        None => output_dir().map(|dir| {
            let extension = if format == Format::Json {
                "json"
            } else {
                "csv"
            };
            dir.join(format!("{}.{extension}", experiment.name()))
        }),
    };
    if let Some(side) = &result.side_file {
        let path = under_output_dir(Path::new(&side.path));
        if destination.as_deref() == Some(path.as_path()) {
            return Err(CliError::Usage(format!(
                "parameter `{}` names the output file {}",
                side.param,
                path.display()
            )));
        }
        write_file(&path, &side.contents)?;
    }
    match destination {
        Some(path) => write_file(&path, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Compute(format!("cannot write output: {e}"))),
    }
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let experiment = Experiment::from_str(name, false).expect("registered subcommand");
    match run(experiment, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pathlab {name}: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
