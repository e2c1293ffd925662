//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid configuration, 4 runtime
//! failure, 5 I/O failure, 6 unknown configuration key, 7 malformed JSON or a
//! value of the wrong type.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::error::Error;
use crate::harness::{
    cdf_csv, config_hash, link_rows_csv, results_csv, run_experiment, summary_json, ExperimentConfig, ExperimentKind,
    PRESETS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;
pub const EXIT_IO: i32 = 5;
pub const EXIT_UNKNOWN_KEY: i32 = 6;
pub const EXIT_MALFORMED: i32 = 7;

pub const OUTPUT_DIR_ENV: &str = "ITLINQ_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "itlinq-out";

#[derive(Debug, Parser)]
#[command(name = "itlinq", version, about = "Interference-aware link scheduling simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by the config, whatever its kind.
    Simulate(RunArgs),
    /// Run a sum-rate sweep or link-rate CDF experiment.
    Sweep(RunArgs),
    /// Run a cover-fraction or gap experiment.
    Fraction(RunArgs),
    /// Tabulate the guaranteed-fraction curves.
    Theory(TheoryArgs),
    /// Parse and validate a config without running it.
    ValidateConfig(ConfigArgs),
    /// List the embedded presets, or print one.
    ListPresets {
        /// Print the JSON of this preset.
        #[arg(long)]
        show: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON config file.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Name of an embedded preset.
    #[arg(long)]
    pub preset: Option<String>,
    /// Override a config value: a dotted path (array indices as numbers) and
    /// a JSON value, e.g. `schemes.0.eta=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Directory for the output files.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Betas to tabulate (replaces the config's list).
    #[arg(long = "beta")]
    pub betas: Vec<f64>,
    /// Network sizes to tabulate (replaces the config's list).
    #[arg(long = "n")]
    pub n_list: Vec<usize>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => classify_config_message(msg),
            Error::InvalidParameter(_) | Error::InvalidPriority(_) => CliError::new(EXIT_CONFIG, e.to_string()),
            other => CliError::new(EXIT_RUNTIME, other.to_string()),
        }
    }
}

fn classify_config_message(msg: String) -> CliError {
    if msg.contains("unknown field") || msg.contains("unknown variant") {
        CliError::new(EXIT_UNKNOWN_KEY, msg)
    } else if msg.contains("invalid type") || msg.contains("expected") && msg.contains("line") {
        CliError::new(EXIT_MALFORMED, msg)
    } else {
        CliError::new(EXIT_CONFIG, msg)
    }
}

fn from_serde(e: serde_json::Error) -> CliError {
    use serde_json::error::Category;
    let msg = e.to_string();
    match e.classify() {
        Category::Syntax | Category::Eof => CliError::new(EXIT_MALFORMED, format!("malformed JSON: {msg}")),
        Category::Io => CliError::new(EXIT_IO, msg),
        Category::Data => classify_config_message(msg),
    }
}

/// Load the config named by the arguments and apply the overrides.
pub fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig, CliError> {
    let text = match (&args.config, &args.preset) {
        (Some(path), None) => fs::read_to_string(path)
            .map_err(|e| CliError::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))?,
        (None, Some(name)) => PRESETS
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.json.to_string())
            .ok_or_else(|| CliError::new(EXIT_USAGE, format!("unknown preset '{name}'")))?,
        _ => return Err(CliError::new(EXIT_USAGE, "give exactly one of --config and --preset")),
    };
    let mut value: Value = serde_json::from_str(&text).map_err(from_serde)?;
    for o in &args.overrides {
        apply_override(&mut value, o)?;
    }
    let cfg: ExperimentConfig = serde_json::from_value(value).map_err(from_serde)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Apply one `path=value` override. The value is parsed as JSON, and taken
/// as a string when it does not parse.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) =
        spec.split_once('=').ok_or_else(|| CliError::new(EXIT_USAGE, format!("override '{spec}' is not KEY=VALUE")))?;
    if path.is_empty() {
        return Err(CliError::new(EXIT_USAGE, format!("override '{spec}' has an empty key")));
    }
    let new = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let segments: Vec<&str> = path.split('.').collect();
    let mut cur = root;
    for (k, seg) in segments.iter().enumerate() {
        let last = k + 1 == segments.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(seg.to_string(), new);
                    return Ok(());
                }
                map.get_mut(*seg)
                    .ok_or_else(|| CliError::new(EXIT_UNKNOWN_KEY, format!("override '{path}': no key '{seg}'")))?
            }
            Value::Array(items) => {
                let idx: usize = seg.parse().map_err(|_| {
                    CliError::new(EXIT_UNKNOWN_KEY, format!("override '{path}': '{seg}' is not an array index"))
                })?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| {
                    CliError::new(EXIT_CONFIG, format!("override '{path}': index {idx} out of range ({len} items)"))
                })?;
                if last {
                    *slot = new;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::new(
                    EXIT_MALFORMED,
                    format!("override '{path}': '{seg}' is inside a non-container value"),
                ))
            }
        };
    }
    unreachable!("loop returns on the last segment")
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn require_kind(cfg: &ExperimentConfig, allowed: &[ExperimentKind], cmd: &str) -> Result<(), CliError> {
    if allowed.contains(&cfg.experiment) {
        Ok(())
    } else {
        let names: Vec<&str> = allowed.iter().map(|k| k.as_str()).collect();
        Err(CliError::new(
            EXIT_CONFIG,
            format!("'{cmd}' runs {} experiments, config has {}", names.join("/"), cfg.experiment.as_str()),
        ))
    }
}

fn run_and_write(cfg: &ExperimentConfig, output_dir: Option<&Path>, out: &mut impl Write) -> Result<(), CliError> {
    let dir = output_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let hash = config_hash(cfg);
    let result = run_experiment(cfg)?;
    let io = |e: std::io::Error, p: &Path| CliError::new(EXIT_IO, format!("cannot write {}: {e}", p.display()));
    fs::create_dir_all(&dir).map_err(|e| io(e, &dir))?;
    let mut files = vec![("results.csv", results_csv(&result)), ("summary.json", summary_json(cfg, &result))];
    if !result.cdfs.is_empty() {
        files.push(("cdf.csv", cdf_csv(&result)));
    }
    if cfg.emit_link_rows {
        files.push(("links.csv", link_rows_csv(&result)));
    }
    for (name, contents) in &files {
        let p = dir.join(name);
        write_atomic(&p, contents).map_err(|e| io(e, &p))?;
    }
    let _ = writeln!(out, "config_hash: {hash}");
    for (name, _) in &files {
        let _ = writeln!(out, "wrote {}", dir.join(name).display());
    }
    Ok(())
}

pub fn dispatch(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => {
            let cfg = load_config(&a.config)?;
            run_and_write(&cfg, a.output_dir.as_deref(), out)
        }
        Command::Sweep(a) => {
            let cfg = load_config(&a.config)?;
            require_kind(&cfg, &[ExperimentKind::SumRateSweep, ExperimentKind::LinkRateCdf], "sweep")?;
            run_and_write(&cfg, a.output_dir.as_deref(), out)
        }
        Command::Fraction(a) => {
            let cfg = load_config(&a.config)?;
            require_kind(
                &cfg,
                &[ExperimentKind::FractionVsN, ExperimentKind::FadingFraction, ExperimentKind::GapVsN],
                "fraction",
            )?;
            run_and_write(&cfg, a.output_dir.as_deref(), out)
        }
        Command::Theory(a) => {
            let mut args = a.run.config;
            if args.config.is_none() && args.preset.is_none() {
                args.preset = Some("theory".into());
            }
            if !a.betas.is_empty() {
                args.overrides.push(format!("betas={}", serde_json::to_string(&a.betas).expect("floats serialize")));
            }
            if !a.n_list.is_empty() {
                args.overrides.push(format!("n_list={}", serde_json::to_string(&a.n_list).expect("ints serialize")));
            }
            let cfg = load_config(&args)?;
            require_kind(&cfg, &[ExperimentKind::TheoryCurves], "theory")?;
            run_and_write(&cfg, a.run.output_dir.as_deref(), out)
        }
        Command::ValidateConfig(a) => {
            let cfg = load_config(&a)?;
            let _ = writeln!(out, "config_hash: {}", config_hash(&cfg));
            let _ = writeln!(out, "ok: {} experiment", cfg.experiment.as_str());
            Ok(())
        }
        Command::ListPresets { show } => match show {
            Some(name) => {
                let p = PRESETS
                    .iter()
                    .find(|p| p.name == name)
                    .ok_or_else(|| CliError::new(EXIT_USAGE, format!("unknown preset '{name}'")))?;
                let _ = write!(out, "{}", p.json);
                Ok(())
            }
            None => {
                for p in PRESETS {
                    let _ = writeln!(out, "{:<14}{}", p.name, p.description);
                }
                Ok(())
            }
        },
    }
}

/// Parse `args`, run, and return the process exit code. Messages go to
/// `out` and `err`.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
