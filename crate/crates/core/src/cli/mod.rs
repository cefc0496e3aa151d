//! `aerofoil` command-line frontend.
//!
//! Each command writes its outputs plus a `manifest.json` into an output
//! directory. Data goes to files (and, for `predict`/`eval`, a short summary
//! on stdout); diagnostics go to stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::dataio::{
    augment_flip, encode_dataset, encode_features, input_spec, load_dataset, oracle_dataset, parse_polar,
    save_dataset, DataEntry, Dataset, FlowCondition, OracleGrid, Origin,
};
use crate::error::{Error, Result};
use crate::geometry::{load_geometry, AirfoilGeometry};
use crate::net::{Activation, Architecture, Model};
use crate::raster::{rasterize, RasterConfig};
use crate::train::{correlation, fit, predict, predict_all, split_indices, TrainConfig, TrainHistory, DEFAULT_BATCH_SIZE};
use crate::util::fmt_sig;

mod config;
mod manifest;

pub use config::expand_config;
pub use manifest::{RunManifest, MANIFEST_FILE};

pub const DEFAULT_SEED: u64 = 42;
pub const DATASET_FILE: &str = "dataset.csv";
pub const MODEL_FILE: &str = "model.txt";
pub const HISTORY_FILE: &str = "history.csv";

#[derive(Debug, Parser)]
#[command(name = "aerofoil", version, about = "Airfoil lift-coefficient surrogates", args_override_self = true)]
pub struct Cli {
    /// File of `key = value` lines supplying defaults for the command's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a labeled dataset from coordinate files.
    Prepare(PrepareArgs),
    /// Render the artificial image of one airfoil.
    Rasterize(RasterizeArgs),
    /// Train a network on a prepared dataset.
    Train(TrainArgs),
    /// Score a trained model against a dataset.
    Eval(EvalArgs),
    /// Predict the lift coefficient of one airfoil at one flow condition.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("labels").required(true).args(["polars", "oracle"]))]
pub struct PrepareArgs {
    /// Directory of coordinate files.
    pub airfoil_dir: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Directory of solver polar files.
    #[arg(long)]
    pub polars: Option<PathBuf>,
    /// Label with the analytic oracle over the flow grid.
    #[arg(long)]
    pub oracle: bool,
    /// Add upside-down twins of every entry.
    #[arg(long)]
    pub flip: bool,
    /// Fail on the first unreadable file or rejected row instead of skipping.
    #[arg(long)]
    pub strict: bool,
    /// Oracle angles of attack (degrees).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    /// Oracle Mach numbers.
    #[arg(long, value_delimiter = ',')]
    pub machs: Option<Vec<f64>>,
    /// Oracle Reynolds numbers.
    #[arg(long, value_delimiter = ',')]
    pub reynolds: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct RasterizeArgs {
    pub airfoil_file: PathBuf,
    /// Angle of attack (degrees).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long)]
    pub mach: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = RasterConfig::default().resolution)]
    pub resolution: usize,
    #[arg(long, default_value_t = RasterConfig::default().supersample)]
    pub supersample: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Dataset CSV written by `prepare`.
    pub dataset: PathBuf,
    #[arg(long)]
    pub arch: Architecture,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub epochs: u64,
    /// Training share of the split.
    #[arg(long, default_value_t = 0.85)]
    pub split: f64,
    #[arg(long, env = "AEROFOIL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,
    /// Keep only entries at this Reynolds number.
    #[arg(long)]
    pub reynolds: Option<f64>,
    #[arg(long, default_value = "relu")]
    pub activation: Activation,
    #[arg(long)]
    pub out: PathBuf,
    /// Suppress per-epoch progress on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    pub model: PathBuf,
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Cl-alpha curve to export, as `NAME@MACH` or `NAME@MACH@RE`. Repeatable.
    #[arg(long)]
    pub curve: Vec<String>,
    /// Refuse models of any other architecture.
    #[arg(long)]
    pub arch: Option<Architecture>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    pub model: PathBuf,
    pub airfoil_file: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long)]
    pub mach: f64,
    /// Required unless the model ignores the Reynolds number.
    #[arg(long)]
    pub reynolds: Option<f64>,
    /// Refuse models of any other architecture.
    #[arg(long)]
    pub arch: Option<Architecture>,
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::InvalidConfig(_)) { 2 } else { 1 })
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Prepare(a) => cmd_prepare(&a).map(|_| ()),
        Command::Rasterize(a) => cmd_rasterize(&a),
        Command::Train(a) => cmd_train(&a).map(|_| ()),
        Command::Eval(a) => {
            let summary = cmd_eval(&a)?;
            for (side, mse) in &summary.mse {
                println!("{side}_mse {}", fmt_sig(*mse, 10));
            }
            println!("correlation {}", fmt_sig(summary.correlation, 10));
            Ok(())
        }
        Command::Predict(a) => {
            println!("{:.6}", cmd_predict(&a)?);
            Ok(())
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files)
}

fn read_geometry(path: &Path) -> Result<AirfoilGeometry> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_geometry(&text)
}

/// Outcome of `prepare`: the dataset plus the per-file problems skipped.
#[derive(Debug)]
pub struct PrepareReport {
    pub dataset: Dataset,
    pub skipped: Vec<String>,
}

pub fn cmd_prepare(args: &PrepareArgs) -> Result<PrepareReport> {
    let mut manifest = RunManifest::start("prepare");
    let mut skipped = Vec::new();
    let mut skip = |what: String, err: Error| -> Result<()> {
        if args.strict {
            return Err(Error::InvalidEntry(format!("{what}: {err}")));
        }
        eprintln!("skipping {what}: {err}");
        skipped.push(format!("{what}: {err}"));
        Ok(())
    };

    // (file stem, geometry), in file-name order.
    let mut airfoils: Vec<(String, AirfoilGeometry)> = Vec::new();
    for path in sorted_files(&args.airfoil_dir)? {
        manifest.hash_input(&path)?;
        match read_geometry(&path) {
            Ok(g) if airfoils.iter().any(|(_, o)| o.name == g.name) => {
                skip(path.display().to_string(), Error::InvalidEntry(format!("duplicate airfoil name {:?}", g.name)))?
            }
            Ok(g) => airfoils.push((stem(&path), g)),
            Err(e) => skip(path.display().to_string(), e)?,
        }
    }
    if airfoils.is_empty() {
        return Err(Error::EmptyCorpus(args.airfoil_dir.clone()));
    }

    let mut data = if args.oracle {
        let mut grid = OracleGrid::default();
        if let Some(a) = &args.alphas {
            grid.alphas = a.clone();
        }
        if let Some(m) = &args.machs {
            grid.machs = m.clone();
        }
        if let Some(r) = &args.reynolds {
            grid.reynolds = r.clone();
        }
        manifest.set("labels", "oracle");
        manifest.set("alphas", join(&grid.alphas));
        manifest.set("machs", join(&grid.machs));
        manifest.set("reynolds", join(&grid.reynolds));
        let geometries: Vec<AirfoilGeometry> = airfoils.iter().map(|(_, g)| g.clone()).collect();
        oracle_dataset(&geometries, &grid)?
    } else {
        let dir = args.polars.as_ref().expect("clap enforces one label source");
        manifest.set("labels", "polars");
        let mut data = Dataset::new();
        for (_, g) in &airfoils {
            data.add_airfoil(g.clone())?;
        }
        for path in sorted_files(dir)? {
            manifest.hash_input(&path)?;
            let what = path.display().to_string();
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let polar = match parse_polar(&text) {
                Ok(p) => p,
                Err(e) => {
                    skip(what, e)?;
                    continue;
                }
            };
            let file_stem = stem(&path);
            let owner = airfoils
                .iter()
                .find(|(_, g)| polar.name.as_deref() == Some(g.name.as_str()))
                .or_else(|| airfoils.iter().find(|(s, _)| file_stem.starts_with(s.as_str())));
            let Some((_, g)) = owner else {
                skip(what, Error::InvalidEntry("no matching airfoil".into()))?;
                continue;
            };
            for (alpha, cl) in polar.points {
                let entry = DataEntry {
                    airfoil: g.name.clone(),
                    flow: FlowCondition::new(alpha, polar.mach, polar.reynolds),
                    cl,
                    origin: Origin::Solver,
                };
                if let Err(e) = data.push(entry) {
                    skip(format!("{what} alpha {alpha}"), e)?;
                }
            }
        }
        data
    };
    if args.flip {
        data = augment_flip(&data);
    }
    data.sort_canonical();
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }

    create_dir(&args.out)?;
    let path = args.out.join(DATASET_FILE);
    save_dataset(&data, &path)?;
    manifest.set("flip", args.flip);
    manifest.set("strict", args.strict);
    manifest.set("entries", data.len());
    manifest.set("airfoils", data.airfoils().len());
    manifest.finish(&args.out)?;
    eprintln!("wrote {} entries for {} airfoils to {}", data.len(), data.airfoils().len(), path.display());
    Ok(PrepareReport { dataset: data, skipped })
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub const IMAGE_TEXT_FILE: &str = "image.txt";
pub const IMAGE_PGM_FILE: &str = "image.pgm";

pub fn cmd_rasterize(args: &RasterizeArgs) -> Result<()> {
    let mut manifest = RunManifest::start("rasterize");
    manifest.hash_input(&args.airfoil_file)?;
    let g = read_geometry(&args.airfoil_file)?;
    let cfg = RasterConfig {
        resolution: args.resolution,
        supersample: args.supersample,
        ..RasterConfig::default()
    };
    let image = rasterize(&g, args.alpha, args.mach, &cfg)?;
    create_dir(&args.out)?;
    let text_path = args.out.join(IMAGE_TEXT_FILE);
    let pgm_path = args.out.join(IMAGE_PGM_FILE);
    std::fs::write(&text_path, image.to_text()).map_err(|e| Error::io(&text_path, e))?;
    std::fs::write(&pgm_path, image.to_pgm()).map_err(|e| Error::io(&pgm_path, e))?;
    manifest.set("airfoil", &g.name);
    manifest.set("alpha", args.alpha);
    manifest.set("mach", args.mach);
    manifest.set("resolution", cfg.resolution);
    manifest.set("supersample", cfg.supersample);
    manifest.finish(&args.out)
}

/// Restricts a dataset to one Reynolds number when `reynolds` is set.
fn reynolds_subset(data: Dataset, reynolds: Option<f64>) -> Result<Dataset> {
    match reynolds {
        None => Ok(data),
        Some(re) => {
            let subset = data.filter(|e| e.flow.reynolds == re);
            if subset.is_empty() {
                return Err(Error::InvalidConfig(format!("no entries at Reynolds number {re}")));
            }
            Ok(subset)
        }
    }
}

pub fn cmd_train(args: &TrainArgs) -> Result<(Model, TrainHistory)> {
    let mut manifest = RunManifest::start("train");
    manifest.hash_input(&args.dataset)?;
    let data = reynolds_subset(load_dataset(&args.dataset)?, args.reynolds)?;
    let mut cfg = TrainConfig::new(args.arch, args.epochs as usize, args.split, args.seed);
    cfg.batch_size = args.batch_size;
    cfg.validate()?;

    let samples = encode_dataset(&data, args.arch, &RasterConfig::default())?;
    let (train_idx, val_idx) = split_indices(&samples.groups, cfg.split_train_fraction, cfg.seed)?;
    let (train_set, val_set) = (samples.subset(&train_idx), samples.subset(&val_idx));
    eprintln!(
        "training {} on {} entries ({} train / {} validation)",
        args.arch,
        samples.len(),
        train_set.len(),
        val_set.len()
    );

    let mut model = Model::new(args.arch, args.activation, args.seed);
    let quiet = args.quiet;
    let history = fit(&mut model.network, &train_set, &val_set, &cfg, |r| {
        if !quiet {
            eprintln!("epoch {:>4}  train {:.6}  val {:.6}  {:.1}s", r.epoch, r.train_mse, r.val_mse, r.seconds);
        }
    })?;

    model.meta.insert("split".into(), args.split.to_string());
    model.meta.insert("epochs".into(), args.epochs.to_string());
    model.meta.insert("batch_size".into(), args.batch_size.to_string());
    if let Some(re) = args.reynolds {
        model.meta.insert("reynolds".into(), re.to_string());
    }

    create_dir(&args.out)?;
    model.save(args.out.join(MODEL_FILE))?;
    history.save(args.out.join(HISTORY_FILE))?;
    manifest.seed = Some(args.seed);
    manifest.set("arch", args.arch);
    manifest.set("epochs", args.epochs);
    manifest.set("split", args.split);
    manifest.set("batch_size", args.batch_size);
    manifest.set("activation", args.activation);
    if let Some(re) = args.reynolds {
        manifest.set("reynolds", re);
    }
    manifest.finish(&args.out)?;
    Ok((model, history))
}

fn load_model(path: &Path, expected: Option<Architecture>) -> Result<Model> {
    let model = Model::load(path)?;
    if let Some(arch) = expected {
        if arch != model.arch {
            return Err(Error::ArchMismatch {
                model: model.arch.to_string(),
                expected: arch.to_string(),
            });
        }
    }
    Ok(model)
}

fn meta_f64(model: &Model, key: &str) -> Result<Option<f64>> {
    model
        .meta
        .get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("model header {key}:{v} is not a number")))
        })
        .transpose()
}

/// Per-split MSE and overall actual-vs-predicted correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub mse: BTreeMap<String, f64>,
    pub correlation: f64,
    pub rows: Vec<ScatterRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRow {
    pub actual: f64,
    pub predicted: f64,
    pub side: &'static str,
}

pub const SCATTER_FILE: &str = "scatter.csv";

/// Scores the model on the dataset. When the model header records its
/// training split, entries are labeled with the side they fell on.
pub fn cmd_eval(args: &EvalArgs) -> Result<EvalSummary> {
    let mut manifest = RunManifest::start("eval");
    manifest.hash_input(&args.model)?;
    manifest.hash_input(&args.dataset)?;
    let model = load_model(&args.model, args.arch)?;
    let data = reynolds_subset(load_dataset(&args.dataset)?, meta_f64(&model, "reynolds")?)?;
    let cfg = RasterConfig::default();
    let samples = encode_dataset(&data, model.arch, &cfg)?;
    let predicted = predict_all(&model.network, &samples)?;

    let mut sides = vec!["all"; samples.len()];
    if let Some(split) = meta_f64(&model, "split")? {
        let (train_idx, val_idx) = split_indices(&samples.groups, split, model.seed)?;
        for i in train_idx {
            sides[i] = "train";
        }
        for i in val_idx {
            sides[i] = "validation";
        }
    }
    let rows: Vec<ScatterRow> = samples
        .targets
        .iter()
        .zip(&predicted)
        .zip(&sides)
        .map(|((&actual, &predicted), &side)| ScatterRow { actual, predicted, side })
        .collect();

    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in &rows {
        let s = sums.entry(r.side.to_string()).or_default();
        s.0 += (r.predicted - r.actual).powi(2);
        s.1 += 1;
    }
    let mse = sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect();

    create_dir(&args.out)?;
    let mut scatter = String::from("actual_cl,predicted_cl,split_side\n");
    for r in &rows {
        scatter.push_str(&format!("{},{},{}\n", r.actual, r.predicted, r.side));
    }
    let path = args.out.join(SCATTER_FILE);
    std::fs::write(&path, scatter).map_err(|e| Error::io(&path, e))?;

    for spec in &args.curve {
        let (name, mach, reynolds) = parse_curve_spec(spec)?;
        let at_mach: Vec<usize> = (0..data.len())
            .filter(|&i| data.entries()[i].airfoil == name && data.entries()[i].flow.mach == mach)
            .collect();
        if at_mach.is_empty() {
            return Err(Error::InvalidConfig(format!("no entries for {name} at Mach {mach}")));
        }
        let re = reynolds.unwrap_or_else(|| pick_reynolds(at_mach.iter().map(|&i| data.entries()[i].flow.reynolds)));
        let mut curve: Vec<usize> = at_mach.into_iter().filter(|&i| data.entries()[i].flow.reynolds == re).collect();
        curve.sort_by(|&a, &b| data.entries()[a].flow.alpha.total_cmp(&data.entries()[b].flow.alpha));
        let mut text = String::from("alpha_deg,actual_cl,predicted_cl\n");
        for i in curve {
            text.push_str(&format!("{},{},{}\n", data.entries()[i].flow.alpha, samples.targets[i], predicted[i]));
        }
        let path = args.out.join(curve_file_name(&name, mach));
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        manifest.set(&format!("curve:{name}@{mach}"), re);
    }

    let summary = EvalSummary {
        mse,
        correlation: correlation(&samples.targets, &predicted),
        rows,
    };
    manifest.seed = Some(model.seed);
    manifest.set("arch", model.arch);
    for (side, v) in &summary.mse {
        manifest.set(&format!("{side}_mse"), v);
    }
    manifest.finish(&args.out)?;
    Ok(summary)
}

/// `NAME@MACH` or `NAME@MACH@RE`; the name may itself contain `@`.
pub fn parse_curve_spec(spec: &str) -> Result<(String, f64, Option<f64>)> {
    let bad = || Error::InvalidConfig(format!("curve {spec:?} is not NAME@MACH[@RE]"));
    let parts: Vec<&str> = spec.rsplitn(3, '@').collect();
    let num = |s: &str| s.trim().parse::<f64>().ok();
    match parts.as_slice() {
        [re, mach, name] if num(re).is_some() && num(mach).is_some() => {
            Ok((name.to_string(), num(mach).unwrap(), num(re)))
        }
        [mach, rest @ ..] if num(mach).is_some() && !rest.is_empty() => {
            let name = rest.iter().rev().copied().collect::<Vec<_>>().join("@");
            Ok((name, num(mach).unwrap(), None))
        }
        _ => Err(bad()),
    }
}

// Prefer Re = 1e6 when present, otherwise the smallest available.
fn pick_reynolds(values: impl Iterator<Item = f64>) -> f64 {
    let all: Vec<f64> = values.collect();
    if all.contains(&1e6) {
        return 1e6;
    }
    all.into_iter().fold(f64::INFINITY, f64::min)
}

/// `curve_<name>_<mach>.csv` with non-alphanumeric name characters replaced.
pub fn curve_file_name(name: &str, mach: f64) -> String {
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    format!("curve_{safe}_{mach}.csv")
}

pub fn cmd_predict(args: &PredictArgs) -> Result<f64> {
    let model = load_model(&args.model, args.arch)?;
    let reynolds = match (args.reynolds, model.arch.uses_reynolds()) {
        (Some(re), _) => re,
        (None, false) => 1e6,
        (None, true) => {
            return Err(Error::InvalidConfig(format!("--reynolds is required for {} models", model.arch)))
        }
    };
    let g = read_geometry(&args.airfoil_file)?;
    let flow = FlowCondition::new(args.alpha, args.mach, reynolds);
    for warning in flow.box_violations() {
        if warning.starts_with("reynolds") && !model.arch.uses_reynolds() {
            continue;
        }
        eprintln!("warning: {warning}; prediction is an extrapolation");
    }
    let cfg = RasterConfig::default();
    debug_assert_eq!(input_spec(model.arch, &cfg).0, model.network.input_shape());
    let f = encode_features(&g, &flow, model.arch, &cfg)?;
    let aux = (!f.aux.is_empty()).then_some(f.aux.as_slice());
    predict(&model.network, &f.input, aux)
}
