use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{ensemble_temperatures, Context, FigureArgs, Output, Resolver};
use crate::demon::{
    configuration_sweep, delta_n_distribution, equilibration_analytic, equilibration_ensemble,
    photon_energy_from_wavelength_nm, DemonMode, ModeConfiguration, WeightedCounts,
    DEFAULT_WAVELENGTH_NM,
};
use crate::ensemble::{mode_flux_histogram, DetectorModel, EnsembleSpec, FluxBins};
use crate::error::Result;
use crate::haar_average::haar_average_analytic;
use crate::interference::PhotonStatistics;
use crate::io::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    /// Mode-0 law after the three-mode stage: analytic and simulated.
    Fig2a,
    /// Mode-0 law after the four-mode stage: analytic and simulated.
    Fig2b,
    /// Passive Delta n laws.
    Fig3a,
    /// Active Delta n laws.
    Fig3b,
    /// Subset temperatures with and without the demon.
    Fig3c,
    /// Histogram of per-unitary mean photon numbers.
    #[value(name = "sm_flux", alias = "sm-flux")]
    #[serde(rename = "sm_flux")]
    SmFlux,
    /// Mean Delta n across all mode configurations.
    #[value(name = "sm_sweep", alias = "sm-sweep")]
    #[serde(rename = "sm_sweep")]
    SmSweep,
}

const BOTH: [PhotonStatistics; 2] = [
    PhotonStatistics::Indistinguishable,
    PhotonStatistics::Distinguishable,
];
const MODES: [DemonMode; 2] = [DemonMode::Passive, DemonMode::Active];

pub(super) fn figure(a: &FigureArgs, r: &mut Resolver, ctx: &Context) -> Result<Output> {
    let which = r.get("figure", Some(a.which), a.which)?;
    let default_k = match which {
        Figure::Fig2a | Figure::Fig2b => 50,
        _ => 100,
    };
    let k = r.get("unitaries", a.unitaries, default_k)?;
    let detector = r.opt("detector", a.detector.clone())?;
    let wavelength = r.get("wavelength-nm", a.wavelength_nm, DEFAULT_WAVELENGTH_NM)?;
    let energy = photon_energy_from_wavelength_nm(wavelength)?;
    match which {
        Figure::Fig2a => equilibration_figure(0, k, ctx),
        Figure::Fig2b => equilibration_figure(1, k, ctx),
        Figure::Fig3a => delta_n_figure(DemonMode::Passive, ctx),
        Figure::Fig3b => delta_n_figure(DemonMode::Active, ctx),
        Figure::Fig3c => temperature_figure(k, detector, energy, ctx),
        Figure::SmFlux => flux_figure(k, detector, ctx),
        Figure::SmSweep => sweep_figure(k, detector, ctx),
    }
}

fn equilibration_figure(stage: usize, k: usize, ctx: &Context) -> Result<Output> {
    let mut table = Table::new(["statistics", "n", "analytic", "mean", "std_dev"]);
    let mut result = Map::new();
    for stats in &BOTH {
        let (first, second) = equilibration_analytic(stats, &ctx.cache)?;
        let an = if stage == 0 { first } else { second };
        let sim = equilibration_ensemble(k, stats, ctx.seed, ctx.exec)?;
        let sm = if stage == 0 { sim.first_stage } else { sim.second_stage };
        for (&n, &p) in &an {
            table.push(vec![json!(stats.label()), json!(n), json!(p), json!(sm.mean[&n]), json!(sm.std_dev[&n])]);
        }
        result.insert(
            stats.label().into(),
            json!({ "analytic": an.values().collect::<Vec<_>>(), "simulated": sm }),
        );
    }
    Ok(Output { result, table })
}

fn delta_n_figure(mode: DemonMode, ctx: &Context) -> Result<Output> {
    let config = ModeConfiguration::canonical(4)?;
    let mut table = Table::new(["statistics", "delta_n", "p"]);
    let mut result = Map::new();
    for stats in &BOTH {
        let avg = haar_average_analytic(4, 3, stats, &ctx.cache)?;
        let law = delta_n_distribution(&avg, &config, mode)?;
        for (&d, &p) in &law.probs {
            table.push(vec![json!(stats.label()), json!(d), json!(p)]);
        }
        result.insert(stats.label().into(), serde_json::to_value(law)?);
    }
    Ok(Output { result, table })
}

fn spec_for(
    stats: &PhotonStatistics,
    k: usize,
    detector: &Option<Vec<f64>>,
    ctx: &Context,
) -> Result<EnsembleSpec> {
    let detector = match detector {
        Some(f) => DetectorModel::new(f.clone())?,
        None => DetectorModel::ideal(4),
    };
    Ok(EnsembleSpec::new(4, 3, k, stats.clone(), ctx.seed).with_detector(detector))
}

fn temperature_figure(
    k: usize,
    detector: Option<Vec<f64>>,
    energy: f64,
    ctx: &Context,
) -> Result<Output> {
    let config = ModeConfiguration::canonical(4)?;
    let mut table = Table::new(["statistics", "mode", "source", "T_A", "T_B"]);
    let mut result = Map::new();
    for stats in &BOTH {
        let avg = haar_average_analytic(4, 3, stats, &ctx.cache)?;
        let analytic = WeightedCounts::from(&avg)
            .scaled(spec_for(stats, 1, &detector, ctx)?.detector.factors())?;
        let counts = spec_for(stats, k, &detector, ctx)?.counts(ctx.exec)?;
        let mut per_stats = Map::new();
        for mode in MODES {
            let an = ensemble_temperatures(std::slice::from_ref(&analytic), &config, mode, energy)?;
            let sm = ensemble_temperatures(&counts, &config, mode, energy)?;
            for (source, t) in [("analytic", &an), ("simulated", &sm)] {
                table.push(vec![
                    json!(stats.label()),
                    json!(mode.to_string()),
                    json!(source),
                    t["A"]["temperature"].clone(),
                    t["B"]["temperature"].clone(),
                ]);
            }
            per_stats.insert(mode.to_string(), json!({ "analytic": an, "simulated": sm }));
        }
        result.insert(stats.label().into(), Value::Object(per_stats));
    }
    Ok(Output { result, table })
}

fn flux_figure(k: usize, detector: Option<Vec<f64>>, ctx: &Context) -> Result<Output> {
    let mut table = Table::new(["statistics", "mode", "bin_low", "bin_high", "count"]);
    let mut result = Map::new();
    for stats in &BOTH {
        let h = mode_flux_histogram(&spec_for(stats, k, &detector, ctx)?, FluxBins::default(), ctx.exec)?;
        for (j, row) in h.counts.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                table.push(vec![
                    json!(stats.label()),
                    json!(j),
                    json!(h.bin_edges[b]),
                    json!(h.bin_edges[b + 1]),
                    json!(c),
                ]);
            }
        }
        result.insert(stats.label().into(), serde_json::to_value(h)?);
    }
    Ok(Output { result, table })
}

fn sweep_figure(k: usize, detector: Option<Vec<f64>>, ctx: &Context) -> Result<Output> {
    let mut table = Table::new(["statistics", "mode", "index", "configuration", "mean", "std_error"]);
    let mut result = Map::new();
    for stats in &BOTH {
        let counts = spec_for(stats, k, &detector, ctx)?.counts(ctx.exec)?;
        let mut per_stats = Map::new();
        for mode in MODES {
            let rows = configuration_sweep(&counts, mode, ctx.exec)?;
            for (i, row) in rows.iter().enumerate() {
                table.push(vec![
                    json!(stats.label()),
                    json!(mode.to_string()),
                    json!(i),
                    json!(row.config.to_string()),
                    json!(row.mean),
                    json!(row.std_error),
                ]);
            }
            per_stats.insert(mode.to_string(), serde_json::to_value(rows)?);
        }
        result.insert(stats.label().into(), Value::Object(per_stats));
    }
    Ok(Output { result, table })
}
