//! Command-line front end.
//!
//! Option values are resolved as command-line flag, then the `--config` JSON
//! file (keyed by flag name), then the built-in default. The resolved values
//! are echoed into every output, so an output file together with the crate
//! version determines the run.

mod figures;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::demon::{
    configuration_sweep, delta_n_distribution, delta_n_exact, effective_temperature,
    equilibration_analytic, equilibration_ensemble, fit_temperature,
    photon_energy_from_wavelength_nm, randomized_partition_estimate, DemonMode, FitBounds,
    ModeConfiguration, WeightedCounts, DEFAULT_WAVELENGTH_NM,
};
use crate::ensemble::{
    delta_n_from_distributions, mode_flux_histogram, DetectorModel, EnsembleSpec, FluxBins,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::haar_average::{haar_average_analytic, haar_average_empirical, HaarAveragedDistribution};
use crate::haar_unitary::{sample_haar, RandomSeed, UnitaryMatrix};
use crate::interference::{
    full_distribution, InputConfiguration, OutcomeDistribution, PhotonStatistics,
};
use crate::io::{self, Table, UnitaryFile};
use crate::symmetric_group::WeingartenCache;

pub use figures::Figure;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "photon-demon",
    version,
    about = "Multiphoton interference, Haar averages and a photonic Maxwell demon"
)]
pub struct Cli {
    /// Base seed of every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON object of option values keyed by flag name, e.g. {"M": 4, "seed": 7}.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Evaluate on one thread. Results are identical either way.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample Haar-random unitaries.
    HaarGen(HaarGenArgs),
    /// Tabulate the unitary Weingarten function Wg_{R,d}.
    Weingarten(WeingartenArgs),
    /// Outcome probabilities for one interferometer.
    OutcomeProbs(OutcomeArgs),
    /// Haar-averaged outcome distribution, analytic or over a sampled ensemble.
    HaarAverage(HaarAverageArgs),
    /// Maxwell-demon protocols.
    #[command(subcommand)]
    Demon(DemonCommand),
    /// Mode-0 photon statistics of the two-stage equilibration experiment.
    Equilibrate(EquilibrateArgs),
    /// Per-mode mean photon numbers over an ensemble, with detector bias.
    Ensemble(EnsembleArgs),
    /// Effective temperature from a photon density or a fitted distribution.
    Temperature(TemperatureArgs),
    /// Data behind one of the figures.
    Figure(FigureArgs),
}

#[derive(Debug, Default, Args)]
pub struct SystemArgs {
    /// Number of modes.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Number of photons, entering modes 0..N.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// dist, indist, or gram=<file> with a Gram matrix of internal-state overlaps.
    #[arg(long)]
    pub statistics: Option<String>,
}

#[derive(Debug, Args)]
pub struct HaarGenArgs {
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WeingartenArgs {
    #[arg(long = "R")]
    pub r: Option<usize>,
    #[arg(long = "d")]
    pub d: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutcomeArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Unitary JSON file; a Haar-random unitary is drawn when absent.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    /// Occupied input modes, comma separated. Defaults to 0..N.
    #[arg(long, value_delimiter = ',')]
    pub input: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct HaarAverageArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// analytic, a number K of Haar-random unitaries, or an ensemble file.
    #[arg(long)]
    pub unitaries: Option<String>,
}

#[derive(Debug, Args)]
pub struct DemonArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// passive or active.
    #[arg(long)]
    pub mode: Option<String>,
    /// analytic, a number K of Haar-random unitaries, or an ensemble file.
    #[arg(long)]
    pub unitaries: Option<String>,
    /// Per-mode detector count factors, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub detector: Option<Vec<f64>>,
    /// Sampled trials per unitary; exact distributions when absent.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long = "wavelength-nm")]
    pub wavelength_nm: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum DemonCommand {
    /// Delta n distribution for the canonical mode configuration.
    Run(DemonArgs),
    /// Mean Delta n for every mode configuration.
    Sweep(DemonArgs),
    /// Mode-randomisation protocol.
    Randomize {
        #[command(flatten)]
        args: DemonArgs,
        #[arg(long)]
        rounds: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct EquilibrateArgs {
    #[arg(long)]
    pub statistics: Option<String>,
    /// analytic or a number K of Haar-random unitary pairs.
    #[arg(long)]
    pub unitaries: Option<String>,
    #[arg(long = "wavelength-nm")]
    pub wavelength_nm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub unitaries: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub detector: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TemperatureArgs {
    /// Mean photon number per mode.
    #[arg(long)]
    pub density: Option<f64>,
    /// Observed single-mode distribution P(0), P(1), ... to fit instead.
    #[arg(long, value_delimiter = ',')]
    pub observed: Option<Vec<f64>>,
    #[arg(long = "wavelength-nm")]
    pub wavelength_nm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub which: Figure,
    /// Ensemble size of the simulated columns.
    #[arg(long)]
    pub unitaries: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub detector: Option<Vec<f64>>,
    #[arg(long = "wavelength-nm")]
    pub wavelength_nm: Option<f64>,
}

/// Flag, then config file, then default; records what was used.
pub(crate) struct Resolver {
    file: Map<String, Value>,
    resolved: Map<String, Value>,
}

impl Resolver {
    fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            None => Map::new(),
            Some(p) => match serde_json::from_str::<Value>(&fs::read_to_string(p)?)? {
                Value::Object(map) => map,
                _ => return Err(Error::invalid("config file must hold a JSON object")),
            },
        };
        Ok(Resolver {
            file,
            resolved: Map::new(),
        })
    }

    fn lookup<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.file.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| Error::invalid(format!("config key {key:?}: {e}"))),
        }
    }

    pub(crate) fn get<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T> {
        let v = match flag {
            Some(v) => v,
            None => self.lookup(key)?.unwrap_or(default),
        };
        self.resolved.insert(key.into(), serde_json::to_value(&v)?);
        Ok(v)
    }

    pub(crate) fn opt<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>> {
        let v = match flag {
            Some(v) => Some(v),
            None => self.lookup(key)?,
        };
        self.resolved.insert(key.into(), serde_json::to_value(&v)?);
        Ok(v)
    }
}

/// Result of a command: a JSON object and a flat table for CSV output.
pub struct Output {
    pub result: Map<String, Value>,
    pub table: Table,
}

pub(crate) struct Context {
    pub seed: RandomSeed,
    pub exec: Execution,
    pub cache: WeingartenCache,
}

pub fn parse_statistics(s: &str, photons: usize) -> Result<PhotonStatistics> {
    match s {
        "dist" | "distinguishable" => Ok(PhotonStatistics::Distinguishable),
        "indist" | "indistinguishable" => Ok(PhotonStatistics::Indistinguishable),
        other => match other.strip_prefix("gram=") {
            Some(path) => {
                let g = io::read_gram(Path::new(path))?;
                if g.photons() != photons {
                    return Err(Error::PhotonCountMismatch {
                        expected: photons,
                        found: g.photons(),
                    });
                }
                Ok(PhotonStatistics::Partial(g))
            }
            None => Err(Error::invalid(format!(
                "unknown statistics {other:?}, expected dist, indist or gram=<file>"
            ))),
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum UnitarySource {
    Analytic,
    Count(usize),
    File(PathBuf),
}

impl UnitarySource {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "analytic" {
            return Ok(UnitarySource::Analytic);
        }
        match s.parse::<usize>() {
            Ok(0) => Err(Error::invalid("the ensemble needs at least one unitary")),
            Ok(k) => Ok(UnitarySource::Count(k)),
            Err(_) => Ok(UnitarySource::File(PathBuf::from(s))),
        }
    }
}

fn f(x: f64) -> Value {
    json!(x)
}

fn to_map<T: Serialize>(value: &T) -> Result<Map<String, Value>> {
    match serde_json::to_value(value)? {
        Value::Object(m) => Ok(m),
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            Ok(m)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::HaarGen(_) => "haar-gen",
        Command::Weingarten(_) => "weingarten",
        Command::OutcomeProbs(_) => "outcome-probs",
        Command::HaarAverage(_) => "haar-average",
        Command::Demon(DemonCommand::Run(_)) => "demon run",
        Command::Demon(DemonCommand::Sweep(_)) => "demon sweep",
        Command::Demon(DemonCommand::Randomize { .. }) => "demon randomize",
        Command::Equilibrate(_) => "equilibrate",
        Command::Ensemble(_) => "ensemble",
        Command::Temperature(_) => "temperature",
        Command::Figure(_) => "figure",
    }
}

/// Renders the command's output; returns the text and the destination path.
pub fn render(cli: &Cli) -> Result<(String, Option<PathBuf>)> {
    let mut r = Resolver::load(cli.config.as_deref())?;
    let seed = r.get("seed", cli.seed, DEFAULT_SEED)?;
    let format = r.get("format", cli.format, Format::Json)?;
    let output = match &cli.output {
        Some(p) => Some(p.clone()),
        None => r.lookup::<PathBuf>("output")?,
    };
    let exec = if cli.sequential || r.lookup::<bool>("sequential")?.unwrap_or(false) {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let ctx = Context {
        seed: RandomSeed::new(seed),
        exec,
        cache: WeingartenCache::new(),
    };
    let out = dispatch(&cli.command, &mut r, &ctx)?;
    let header = json!({
        "command": command_name(&cli.command),
        "config": Value::Object(r.resolved),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let text = match format {
        Format::Json => {
            let mut doc = out.result;
            if let Value::Object(h) = header {
                doc.extend(h);
            }
            io::to_json_string(&doc)?
        }
        Format::Csv => out.table.to_csv(Some(&header))?,
    };
    Ok((text, output))
}

/// Renders and writes the output.
pub fn run(cli: &Cli) -> Result<()> {
    let (text, path) = render(cli)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn dispatch(cmd: &Command, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    match cmd {
        Command::HaarGen(a) => haar_gen(a, r, ctx),
        Command::Weingarten(a) => weingarten_table(a, r, ctx),
        Command::OutcomeProbs(a) => outcome_probs(a, r, ctx),
        Command::HaarAverage(a) => haar_average(a, r, ctx),
        Command::Demon(DemonCommand::Run(a)) => demon_run(a, r, ctx),
        Command::Demon(DemonCommand::Sweep(a)) => demon_sweep(a, r, ctx),
        Command::Demon(DemonCommand::Randomize { args, rounds }) => {
            demon_randomize(args, *rounds, r, ctx)
        }
        Command::Equilibrate(a) => equilibrate(a, r, ctx),
        Command::Ensemble(a) => ensemble_flux(a, r, ctx),
        Command::Temperature(a) => temperature(a, r),
        Command::Figure(a) => figures::figure(a, r, ctx),
    }
}

struct System {
    m: usize,
    n: usize,
    statistics: PhotonStatistics,
}

fn resolve_system(a: &SystemArgs, r: &mut Resolver, default_stats: &str) -> Result<System> {
    let m = r.get("M", a.m, 4)?;
    let n = r.get("N", a.n, 3)?;
    let stats = r.get("statistics", a.statistics.clone(), default_stats.to_string())?;
    if m == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok(System {
        m,
        n,
        statistics: parse_statistics(&stats, n)?,
    })
}

fn haar_gen(a: &HaarGenArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let m = r.get("M", a.m, 4)?;
    let count = r.get("count", a.count, 1)?;
    let us = ctx
        .exec
        .try_map(count, |i| sample_haar(m, ctx.seed.with_stream(i as u64)))?;
    let mut table = Table::new(["unitary", "row", "col", "re", "im"]);
    for (k, u) in us.iter().enumerate() {
        for row in 0..m {
            for col in 0..m {
                let z = u[(row, col)];
                table.push(vec![json!(k), json!(row), json!(col), f(z.re), f(z.im)]);
            }
        }
    }
    let files: Vec<UnitaryFile> = us.iter().map(UnitaryFile::from).collect();
    let mut result = Map::new();
    result.insert("unitaries".into(), serde_json::to_value(files)?);
    Ok(Output { result, table })
}

fn weingarten_table(a: &WeingartenArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let big_r = r.get("R", a.r, 4)?;
    let d = r.get("d", a.d, 3)?;
    let t = ctx.cache.table(big_r, d)?;
    let mut table = Table::new(["cycle_type", "class_size", "exact", "value"]);
    let mut values = Vec::new();
    for (ct, q) in t.iter() {
        let v = crate::symmetric_group::rational_to_f64(*q);
        table.push(vec![
            json!(ct.to_string()),
            json!(ct.class_size() as u64),
            json!(q.to_string()),
            f(v),
        ]);
        values.push(json!({
            "cycle_type": ct.parts(),
            "class_size": ct.class_size() as u64,
            "exact": q.to_string(),
            "value": v,
        }));
    }
    let mut result = Map::new();
    result.insert("R".into(), json!(big_r));
    result.insert("d".into(), json!(d));
    result.insert("values".into(), Value::Array(values));
    result.insert("class_weighted_sum".into(), json!(t.class_weighted_sum().to_string()));
    Ok(Output { result, table })
}

fn distribution_table(dist: &OutcomeDistribution, extra: Option<(&str, Vec<Value>)>) -> Table {
    let mut cols: Vec<String> = (0..dist.modes()).map(|j| format!("s{j}")).collect();
    cols.push("p".into());
    if let Some((name, _)) = &extra {
        cols.push(name.to_string());
    }
    let mut table = Table::new(cols);
    for (i, (s, p)) in dist.iter().enumerate() {
        let mut row: Vec<Value> = s.counts().iter().map(|&c| json!(c)).collect();
        row.push(f(p));
        if let Some((_, values)) = &extra {
            row.push(values[i].clone());
        }
        table.push(row);
    }
    table
}

fn distribution_result(dist: &OutcomeDistribution) -> Result<Map<String, Value>> {
    to_map(&io::DistributionFile::new(dist, None))
}

fn outcome_probs(a: &OutcomeArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let sys = resolve_system(&a.system, r, "indist")?;
    let file = r.opt("unitary", a.unitary.clone())?;
    let u = match file {
        Some(p) => io::read_unitaries(&p)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::invalid("unitary file is empty"))?,
        None => sample_haar(sys.m, ctx.seed)?,
    };
    let default_input: Vec<usize> = (0..sys.n).collect();
    let input = r.get("input", a.input.clone(), default_input)?;
    let input = InputConfiguration::new(input)?;
    if input.photons() != sys.n {
        return Err(Error::PhotonCountMismatch {
            expected: sys.n,
            found: input.photons(),
        });
    }
    let dist = full_distribution(&u, &input, &sys.statistics)?;
    let mut result = distribution_result(&dist)?;
    result.insert("statistics".into(), json!(sys.statistics.label()));
    result.insert("unitary".into(), serde_json::to_value(UnitaryFile::from(&u))?);
    Ok(Output {
        result,
        table: distribution_table(&dist, None),
    })
}

fn load_ensemble(source: &UnitarySource, m: usize, ctx: &Context) -> Result<Vec<UnitaryMatrix>> {
    match source {
        UnitarySource::Analytic => Err(Error::invalid("an explicit ensemble is required")),
        UnitarySource::Count(k) => ctx
            .exec
            .try_map(*k, |i| sample_haar(m, ctx.seed.with_stream(i as u64))),
        UnitarySource::File(p) => {
            let us = io::read_unitaries(p)?;
            if let Some(u) = us.iter().find(|u| u.dim() != m) {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: u.dim(),
                });
            }
            if us.is_empty() {
                return Err(Error::invalid("ensemble file is empty"));
            }
            Ok(us)
        }
    }
}

fn haar_average(a: &HaarAverageArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let sys = resolve_system(&a.system, r, "indist")?;
    let source = UnitarySource::parse(&r.get("unitaries", a.unitaries.clone(), "analytic".into())?)?;
    let avg: HaarAveragedDistribution = match &source {
        UnitarySource::Analytic => haar_average_analytic(sys.m, sys.n, &sys.statistics, &ctx.cache)?,
        other => {
            let us = load_ensemble(other, sys.m, ctx)?;
            haar_average_empirical(&us, &InputConfiguration::first(sys.n), &sys.statistics, ctx.exec)?
        }
    };
    let mut result = distribution_result(&avg.distribution)?;
    result.insert("statistics".into(), serde_json::to_value(avg.label)?);
    result.insert("samples".into(), json!(avg.samples));
    let extra = if let Some(exact) = &avg.exact {
        let v: Vec<Value> = exact.iter().map(|q| json!(q.to_string())).collect();
        result.insert("exact".into(), Value::Array(v.clone()));
        Some(("exact", v))
    } else if let Some(se) = &avg.std_errors {
        let v: Vec<Value> = se.iter().map(|&x| f(x)).collect();
        result.insert("std_errors".into(), Value::Array(v.clone()));
        Some(("std_error", v))
    } else {
        None
    };
    Ok(Output {
        table: distribution_table(&avg.distribution, extra),
        result,
    })
}

/// Per-unitary counts (or the single analytic law) behind the demon commands.
pub(crate) struct DemonInputs {
    pub mode: DemonMode,
    pub config: ModeConfiguration,
    pub spec: EnsembleSpec,
    pub photon_energy: f64,
    /// Ideal per-unitary distributions; one analytic law when `source` is analytic.
    pub dists: Vec<OutcomeDistribution>,
    pub analytic: Option<HaarAveragedDistribution>,
}

impl DemonInputs {
    pub fn counts(&self) -> Result<Vec<WeightedCounts>> {
        self.spec.bias(&self.dists)
    }
}

fn demon_inputs(a: &DemonArgs, r: &mut Resolver, ctx: &Context) -> Result<DemonInputs> {
    let sys = resolve_system(&a.system, r, "indist")?;
    let mode: DemonMode = r.get("mode", a.mode.clone(), "active".into())?.parse()?;
    let source = UnitarySource::parse(&r.get("unitaries", a.unitaries.clone(), "100".into())?)?;
    let detector = match r.opt("detector", a.detector.clone())? {
        Some(f) => DetectorModel::new(f)?,
        None => DetectorModel::ideal(sys.m),
    };
    let trials = r.opt("trials", a.trials)?;
    let wavelength = r.get("wavelength-nm", a.wavelength_nm, DEFAULT_WAVELENGTH_NM)?;
    let config = ModeConfiguration::canonical(sys.m)?;
    let k = match source {
        UnitarySource::Count(k) => k,
        _ => 1,
    };
    let spec = EnsembleSpec::new(sys.m, sys.n, k, sys.statistics.clone(), ctx.seed)
        .with_detector(detector)
        .with_trials(trials);
    let (dists, analytic) = match &source {
        UnitarySource::Analytic => {
            if trials.is_some() {
                return Err(Error::invalid("finite trials need an explicit ensemble"));
            }
            let avg = haar_average_analytic(sys.m, sys.n, &sys.statistics, &ctx.cache)?;
            (vec![avg.distribution.clone()], Some(avg))
        }
        UnitarySource::Count(_) => (spec.distributions(ctx.exec)?, None),
        UnitarySource::File(_) => {
            let us = load_ensemble(&source, sys.m, ctx)?;
            (spec.distributions_for(&us, ctx.exec)?, None)
        }
    };
    Ok(DemonInputs {
        mode,
        config,
        spec,
        photon_energy: photon_energy_from_wavelength_nm(wavelength)?,
        dists,
        analytic,
    })
}

/// Subset temperatures from the subset means averaged over the unitaries.
pub(crate) fn ensemble_temperatures(
    counts: &[WeightedCounts],
    config: &ModeConfiguration,
    mode: DemonMode,
    photon_energy: f64,
) -> Result<Value> {
    let k = counts.len() as f64;
    let half = config.subset_a().len() as f64;
    let (mut da, mut db) = (0.0, 0.0);
    for c in counts {
        let m = c.subset_means(config, mode)?;
        da += m.total_a / half / k;
        db += m.total_b / half / k;
    }
    Ok(json!({
        "A": effective_temperature(da.max(0.0), photon_energy)?,
        "B": effective_temperature(db.max(0.0), photon_energy)?,
    }))
}

fn demon_run(a: &DemonArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let inp = demon_inputs(a, r, ctx)?;
    let counts = inp.counts()?;
    let mut result = Map::new();
    let law = match &inp.analytic {
        Some(avg) => {
            let mean = counts[0].mean_delta_n(&inp.config, inp.mode)?;
            result.insert("mean".into(), f(mean));
            result.insert("std_error".into(), f(0.0));
            result.insert("k".into(), Value::Null);
            if inp.spec.detector.is_ideal() {
                if avg.exact.is_some() {
                    let (_, exact) = delta_n_exact(avg, &inp.config, inp.mode)?;
                    result.insert("exact_mean".into(), json!(exact.to_string()));
                }
                Some(delta_n_distribution(avg, &inp.config, inp.mode)?)
            } else {
                None
            }
        }
        None => {
            let e = delta_n_from_distributions(&inp.spec, &inp.dists, inp.mode, &inp.config)?;
            result.insert("mean".into(), f(e.stats.mean));
            result.insert("std_error".into(), f(e.stats.std_error));
            result.insert("k".into(), json!(e.stats.k));
            result.insert("per_unitary_means".into(), serde_json::to_value(&e.per_unitary_means)?);
            e.distribution
        }
    };
    result.insert("delta_n".into(), serde_json::to_value(&law)?);
    result.insert("configuration".into(), serde_json::to_value(&inp.config)?);
    result.insert(
        "temperatures".into(),
        ensemble_temperatures(&counts, &inp.config, inp.mode, inp.photon_energy)?,
    );
    let table = match &law {
        Some(law) => {
            let mut t = Table::new(["delta_n", "p"]);
            for (&k, &p) in &law.probs {
                t.push(vec![json!(k), f(p)]);
            }
            t
        }
        None => {
            let mut t = Table::new(["mean", "std_error"]);
            t.push(vec![result["mean"].clone(), result["std_error"].clone()]);
            t
        }
    };
    Ok(Output { result, table })
}

fn sweep_table(rows: &[crate::demon::SweepRow]) -> Table {
    let mut t = Table::new(["index", "subset_a", "subset_b", "measured_a", "measured_b", "mean", "std_error"]);
    for (i, row) in rows.iter().enumerate() {
        let join = |v: &[usize]| v.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" ");
        t.push(vec![
            json!(i),
            json!(join(row.config.subset_a())),
            json!(join(row.config.subset_b())),
            json!(row.config.measured_a()),
            json!(row.config.measured_b()),
            f(row.mean),
            f(row.std_error),
        ]);
    }
    t
}

fn demon_sweep(a: &DemonArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let inp = demon_inputs(a, r, ctx)?;
    let rows = configuration_sweep(&inp.counts()?, inp.mode, ctx.exec)?;
    let mut result = Map::new();
    result.insert("rows".into(), serde_json::to_value(&rows)?);
    Ok(Output {
        table: sweep_table(&rows),
        result,
    })
}

fn demon_randomize(
    a: &DemonArgs,
    rounds: Option<usize>,
    r: &mut Resolver,
    ctx: &Context,
) -> Result<Output> {
    let rounds = r.get("rounds", rounds, 1000)?;
    let inp = demon_inputs(a, r, ctx)?;
    let counts = inp.counts()?;
    let est = randomized_partition_estimate(&counts, rounds, inp.mode, ctx.seed, ctx.exec)?;
    let fixed = delta_n_from_distributions(&inp.spec, &inp.dists, inp.mode, &inp.config)?;
    let mut result = Map::new();
    result.insert("randomized".into(), serde_json::to_value(est)?);
    result.insert("fixed".into(), serde_json::to_value(fixed.stats)?);
    let mut t = Table::new(["protocol", "mean", "uncertainty"]);
    t.push(vec![json!("fixed"), f(fixed.stats.mean), f(fixed.stats.std_error)]);
    t.push(vec![json!("randomized"), f(est.mean), f(est.std_dev)]);
    Ok(Output { result, table: t })
}

fn marginal_json(m: &std::collections::BTreeMap<usize, f64>) -> Value {
    Value::Array(m.values().map(|&p| f(p)).collect())
}

fn equilibrate(a: &EquilibrateArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let stats_s = r.get("statistics", a.statistics.clone(), "indist".into())?;
    let stats = parse_statistics(&stats_s, 3)?;
    let source = UnitarySource::parse(&r.get("unitaries", a.unitaries.clone(), "50".into())?)?;
    let wavelength = r.get("wavelength-nm", a.wavelength_nm, DEFAULT_WAVELENGTH_NM)?;
    let energy = photon_energy_from_wavelength_nm(wavelength)?;
    let analytic = match stats {
        PhotonStatistics::Partial(_) => None,
        _ => Some(equilibration_analytic(&stats, &ctx.cache)?),
    };
    let sim = match source {
        UnitarySource::Analytic => None,
        UnitarySource::Count(k) => Some(equilibration_ensemble(k, &stats, ctx.seed, ctx.exec)?),
        UnitarySource::File(_) => {
            return Err(Error::invalid(
                "equilibrate samples its own unitary pairs; pass analytic or a count",
            ))
        }
    };
    let mut result = Map::new();
    let mut table = Table::new(["stage", "n", "analytic", "mean", "std_dev"]);
    for (stage, name) in [(0, "first"), (1, "second")] {
        let an = analytic.as_ref().map(|(a, b)| if stage == 0 { a } else { b });
        let sm = sim
            .as_ref()
            .map(|s| if stage == 0 { &s.first_stage } else { &s.second_stage });
        let mut obj = Map::new();
        if let Some(an) = an {
            obj.insert("analytic".into(), marginal_json(an));
        }
        if let Some(sm) = sm {
            obj.insert("mean".into(), marginal_json(&sm.mean));
            obj.insert("std_dev".into(), marginal_json(&sm.std_dev));
            let fit = fit_temperature(&sm.mean, energy, FitBounds::default())?;
            obj.insert("fitted_temperature".into(), serde_json::to_value(fit)?);
        }
        if let Some(an) = an {
            let fit = fit_temperature(an, energy, FitBounds::default())?;
            obj.insert("analytic_temperature".into(), serde_json::to_value(fit)?);
        }
        for n in 0..=3usize {
            table.push(vec![
                json!(name),
                json!(n),
                an.map_or(Value::Null, |m| f(m[&n])),
                sm.map_or(Value::Null, |s| f(s.mean[&n])),
                sm.map_or(Value::Null, |s| f(s.std_dev[&n])),
            ]);
        }
        result.insert(format!("{name}_stage"), Value::Object(obj));
    }
    Ok(Output { result, table })
}

fn ensemble_flux(a: &EnsembleArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let sys = resolve_system(&a.system, r, "indist")?;
    let k = r.get("unitaries", a.unitaries, 100)?;
    let detector = match r.opt("detector", a.detector.clone())? {
        Some(f) => DetectorModel::new(f)?,
        None => DetectorModel::ideal(sys.m),
    };
    let trials = r.opt("trials", a.trials)?;
    let spec = EnsembleSpec::new(sys.m, sys.n, k, sys.statistics, ctx.seed)
        .with_detector(detector)
        .with_trials(trials);
    let h = mode_flux_histogram(&spec, FluxBins::default(), ctx.exec)?;
    let mut table = Table::new(["unitary", "mode", "n_bar"]);
    for (i, row) in h.per_unitary.iter().enumerate() {
        for (j, &n) in row.iter().enumerate() {
            table.push(vec![json!(i), json!(j), f(n)]);
        }
    }
    Ok(Output {
        result: to_map(&h)?,
        table,
    })
}

fn temperature(a: &TemperatureArgs, r: &mut Resolver) -> Result<Output> {
    let wavelength = r.get("wavelength-nm", a.wavelength_nm, DEFAULT_WAVELENGTH_NM)?;
    let energy = photon_energy_from_wavelength_nm(wavelength)?;
    let observed = r.opt("observed", a.observed.clone())?;
    let result;
    let mut table = Table::new(["density", "temperature_K", "photon_energy_J", "fit_N", "fit_M", "total_variation"]);
    match observed {
        Some(p) => {
            if a.density.is_some() {
                return Err(Error::invalid("pass either --density or --observed"));
            }
            let obs = p.into_iter().enumerate().collect();
            let fit = fit_temperature(&obs, energy, FitBounds::default())?;
            let mut m = to_map(&fit.report)?;
            m.insert("fit".into(), serde_json::to_value(fit)?);
            result = m;
            table.push(vec![
                f(fit.report.photon_density),
                f(fit.report.temperature),
                f(energy),
                json!(fit.photons),
                json!(fit.modes),
                f(fit.total_variation),
            ]);
        }
        None => {
            let density = r.get("density", a.density, 1.0)?;
            let rep = effective_temperature(density, energy)?;
            result = to_map(&rep)?;
            table.push(vec![f(density), f(rep.temperature), f(energy), Value::Null, Value::Null, Value::Null]);
        }
    }
    Ok(Output { result, table })
}
