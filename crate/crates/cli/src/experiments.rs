//! Sum-rate sweeps and convergence traces.

use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use timtin_core::baselines::{full_power_rates, igpc, max_sinr, sapc, tdma_rates};
use timtin_core::linalg::real_vector;
use timtin_core::zest::{run_zest, zest_init, zest_iterate, ZestRun, ZestState};
use timtin_core::{finite_snr_rates, gen_cyclic_random, Algorithm, ChannelSpec, TxConfig};

use crate::config::{ChannelSource, ExperimentConfig};
use crate::io::read_channel;

/// Derives an independent seed for item `index` of stream `tag`.
pub fn derive_seed(base: u64, tag: u64, index: u64) -> u64 {
    let mut z = base ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TAG_CHANNEL: u64 = 1;
const TAG_PHASES: u64 = 2;
const TAG_ZEST: u64 = 3;
const TAG_MAX_SINR: u64 = 4;

pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Channel used for realization `index`.
pub fn realization_channel(cfg: &ExperimentConfig, index: usize) -> Result<ChannelSpec> {
    let spec = match &cfg.channel {
        ChannelSource::Cyclic { users, x } => gen_cyclic_random(*users, *x, derive_seed(cfg.seed, TAG_CHANNEL, index as u64))?,
        ChannelSource::File { path } => read_channel(path)?,
    };
    Ok(match spec.theta() {
        Some(_) => spec,
        None => spec.with_random_phases(derive_seed(cfg.seed, TAG_PHASES, index as u64)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub algorithm: Algorithm,
    pub mean_sum_rate: f64,
    pub std_sum_rate: f64,
    pub n_realizations: usize,
}

/// Best ZEST configuration per SNR point for one realization.
struct ZestPick {
    tx: TxConfig,
    sum_rate: f64,
}

fn zest_picks(cfg: &ExperimentConfig, spec: &ChannelSpec, index: usize) -> Result<Vec<ZestPick>> {
    let p = &cfg.params;
    let b = vec![p.streams; spec.users()];
    let most = cfg.snr_db.iter().map(|&db| p.inits_at(db)).max().unwrap_or(1);
    let runs: Vec<ZestRun> = (0..most)
        .map(|i| run_zest(spec, p.n, &b, derive_seed(cfg.seed, TAG_ZEST, (index * 1000 + i) as u64), p.zest_max_iter, p.zest_tol))
        .collect::<timtin_core::Result<_>>()?;
    // The run with the largest sum-rate at each SNR point is kept.
    cfg.snr_db
        .iter()
        .map(|&db| {
            let power = db_to_power(db);
            let mut best: Option<ZestPick> = None;
            for run in &runs[..p.inits_at(db)] {
                let sum_rate: f64 = finite_snr_rates(spec, &run.tx, power)?.iter().sum();
                if best.as_ref().map_or(true, |b| sum_rate > b.sum_rate) {
                    best = Some(ZestPick { tx: run.tx.clone(), sum_rate });
                }
            }
            Ok(best.expect("at least one initialization"))
        })
        .collect()
}

fn igpc_tx(spec: &ChannelSpec, max_iter: usize) -> Result<TxConfig> {
    let out = igpc(spec, max_iter, 1e-9)?;
    Ok(TxConfig::single_stream(1, vec![real_vector(&[1.0]); spec.users()], &out.powers)?)
}

fn max_sinr_best(cfg: &ExperimentConfig, spec: &ChannelSpec, index: usize, db: f64) -> Result<f64> {
    let p = &cfg.params;
    let b = vec![p.streams; spec.users()];
    let power = db_to_power(db);
    let mut best = f64::NEG_INFINITY;
    for i in 0..p.inits_at(db) {
        let seed = derive_seed(cfg.seed, TAG_MAX_SINR, (index * 1000 + i) as u64);
        let r = max_sinr(spec, p.n, &b, power, seed, p.max_sinr_max_iter, None)?;
        best = best.max(r.result.sum_rate);
    }
    Ok(best)
}

/// Sum-rates of one realization: `[snr][algorithm]`, plus the chosen ZEST
/// configurations.
fn run_realization(cfg: &ExperimentConfig, index: usize) -> Result<(Vec<Vec<f64>>, Vec<TxConfig>)> {
    let spec = realization_channel(cfg, index)?;
    let zest = if cfg.algorithms.contains(&Algorithm::Zest) { zest_picks(cfg, &spec, index)? } else { Vec::new() };
    let igpc_config = if cfg.algorithms.contains(&Algorithm::Igpc) {
        Some(igpc_tx(&spec, cfg.params.igpc_max_iter)?)
    } else {
        None
    };
    let mut table = Vec::with_capacity(cfg.snr_db.len());
    for (s, &db) in cfg.snr_db.iter().enumerate() {
        let power = db_to_power(db);
        let row = cfg
            .algorithms
            .iter()
            .map(|alg| {
                Ok(match alg {
                    Algorithm::Zest => zest[s].sum_rate,
                    Algorithm::MaxSinr => max_sinr_best(cfg, &spec, index, db)?,
                    Algorithm::Sapc => sapc(&spec, power, cfg.params.sapc_max_iter, None)?.result.sum_rate,
                    Algorithm::Tdma => tdma_rates(&spec, power)?.sum_rate,
                    Algorithm::FullPower => full_power_rates(&spec, power)?.sum_rate,
                    Algorithm::Igpc => {
                        finite_snr_rates(&spec, igpc_config.as_ref().expect("computed above"), power)?.iter().sum()
                    }
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        table.push(row);
    }
    Ok((table, zest.into_iter().map(|z| z.tx).collect()))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every realization (in parallel) and averages per SNR and algorithm.
/// When `dump_dir` is set, the chosen ZEST configuration of each
/// realization and SNR point is written there.
pub fn run_sweep(cfg: &ExperimentConfig, dump_dir: Option<&Path>) -> Result<Vec<SweepRow>> {
    let results: Vec<(Vec<Vec<f64>>, Vec<TxConfig>)> = (0..cfg.realizations())
        .into_par_iter()
        .map(|i| run_realization(cfg, i).with_context(|| format!("realization {i}")))
        .collect::<Result<_>>()?;

    if let Some(dir) = dump_dir {
        std::fs::create_dir_all(dir)?;
        for (i, (_, configs)) in results.iter().enumerate() {
            for (tx, db) in configs.iter().zip(&cfg.snr_db) {
                std::fs::write(dir.join(format!("zest_r{i}_snr{db}.json")), tx.to_json())?;
            }
        }
    }

    let mut rows = Vec::new();
    for (s, &db) in cfg.snr_db.iter().enumerate() {
        for (a, &alg) in cfg.algorithms.iter().enumerate() {
            let samples: Vec<f64> = results.iter().map(|(t, _)| t[s][a]).collect();
            let (mean, std) = mean_std(&samples);
            rows.push(SweepRow {
                snr_db: db,
                algorithm: alg,
                mean_sum_rate: mean,
                std_sum_rate: std,
                n_realizations: samples.len(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergeRow {
    pub algorithm: Algorithm,
    pub iter: usize,
    pub sum_rate: f64,
    pub sum_gdof: Option<f64>,
}

/// Per-iteration traces of every algorithm on the first realization at the
/// first SNR point. ZEST configurations are dumped per iteration when
/// `dump_dir` is set.
pub fn run_converge(cfg: &ExperimentConfig, dump_dir: Option<&Path>) -> Result<Vec<ConvergeRow>> {
    let spec = realization_channel(cfg, 0)?;
    let db = cfg.snr_db[0];
    let power = db_to_power(db);
    let p = &cfg.params;
    let b = vec![p.streams; spec.users()];
    if let Some(dir) = dump_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut rows = Vec::new();
    for &alg in &cfg.algorithms {
        match alg {
            Algorithm::Zest => {
                let mut state = match &cfg.zest_start {
                    Some(path) => ZestState::from_tx(&spec, crate::io::read_tx(path)?)?,
                    None => zest_init(&spec, p.n, &b, derive_seed(cfg.seed, TAG_ZEST, 0))?,
                };
                let mut previous: Option<f64> = None;
                for _ in 0..p.zest_max_iter {
                    let tx = state.tx.clone();
                    state = zest_iterate(&state, &spec)?;
                    let row = state.trace.rows.last().expect("one row per cycle");
                    let sum_gdof = row.forward.sum();
                    if let Some(dir) = dump_dir {
                        std::fs::write(dir.join(format!("zest_iter{}.json", row.iteration)), tx.to_json())?;
                    }
                    rows.push(ConvergeRow {
                        algorithm: alg,
                        iter: row.iteration,
                        sum_rate: finite_snr_rates(&spec, &tx, power)?.iter().sum(),
                        sum_gdof: Some(sum_gdof),
                    });
                    if previous.is_some_and(|prev| (sum_gdof - prev).abs() < p.zest_tol) {
                        break;
                    }
                    previous = Some(sum_gdof);
                }
            }
            Algorithm::MaxSinr => {
                let r = max_sinr(&spec, p.n, &b, power, derive_seed(cfg.seed, TAG_MAX_SINR, 0), p.max_sinr_max_iter, None)?;
                rows.extend(history_rows(alg, &r.result.history));
            }
            Algorithm::Sapc => {
                let r = sapc(&spec, power, p.sapc_max_iter, None)?;
                rows.extend(history_rows(alg, &r.result.history));
            }
            Algorithm::Igpc => {
                let out = igpc(&spec, p.igpc_max_iter, 1e-9)?;
                // Like ZEST, each row holds the state entering that iteration.
                let rounds = out.power_trace.len() - 1;
                for (i, (r, tuple)) in out.power_trace.iter().zip(out.trace.iter().step_by(2)).take(rounds).enumerate() {
                    let tx = TxConfig::single_stream(1, vec![real_vector(&[1.0]); spec.users()], r)?;
                    rows.push(ConvergeRow {
                        algorithm: alg,
                        iter: i + 1,
                        sum_rate: finite_snr_rates(&spec, &tx, power)?.iter().sum(),
                        sum_gdof: Some(tuple.sum()),
                    });
                }
            }
            Algorithm::Tdma => rows.push(single_row(alg, tdma_rates(&spec, power)?.sum_rate)),
            Algorithm::FullPower => rows.push(single_row(alg, full_power_rates(&spec, power)?.sum_rate)),
        }
    }
    Ok(rows)
}

fn history_rows(alg: Algorithm, history: &[f64]) -> Vec<ConvergeRow> {
    history
        .iter()
        .enumerate()
        .map(|(i, &s)| ConvergeRow { algorithm: alg, iter: i + 1, sum_rate: s, sum_gdof: None })
        .collect()
}

fn single_row(alg: Algorithm, sum_rate: f64) -> ConvergeRow {
    ConvergeRow { algorithm: alg, iter: 1, sum_rate, sum_gdof: None }
}
