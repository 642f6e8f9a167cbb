//! Single-shot analyses behind the `gdof`, `zest`, `decompose` and
//! `neighboring` subcommands.

use std::io::Write;
use std::path::Path;

use anyhow::Result;
use serde::Serialize;
use timtin_core::linalg::real_vector;
use timtin_core::{
    compose, gdof_of_config, lexicographic_order, neighboring_achievability, neighboring_sym_gdof, reverse_lexicographic_order,
    run_zest, tim_solution_for, user_gdof, verify_scheme, zfsc_receivers, ChannelSpec, Decomposition, GdofTrace, GdofTuple,
    NeighborLayout, TimTopology, TxConfig, ZestRun,
};

use crate::Verification;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScOrder {
    Lexicographic,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GdofRow {
    pub user: usize,
    pub gdof: f64,
    pub zf_gdof: f64,
}

/// Per-user GDoF of `tx`, once from the exponent sums and once through
/// zero-forcing receivers with the given decoding order.
pub fn gdof_report(spec: &ChannelSpec, tx: &TxConfig, order: ScOrder) -> Result<Vec<GdofRow>> {
    let joint = gdof_of_config(spec, tx)?;
    let counts = tx.stream_counts();
    let sc = match order {
        ScOrder::Lexicographic => lexicographic_order(&counts),
        ScOrder::Reverse => reverse_lexicographic_order(&counts),
    };
    let rx = zfsc_receivers(spec, tx, &sc)?;
    let zf = user_gdof(spec, tx, &rx)?;
    Ok(joint.0.iter().zip(&zf.0).enumerate().map(|(k, (&g, &z))| GdofRow { user: k + 1, gdof: g, zf_gdof: z }).collect())
}

/// Writes a ZEST trace: the four stage sums per cycle followed by the
/// forward tuple.
pub fn write_trace<W: Write>(trace: &GdofTrace, users: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iter".to_string(), "sum_fwd".into(), "sum_switch_rev".into(), "sum_rev".into(), "sum_switch_fwd".into()];
    header.extend((1..=users).map(|k| format!("d_{k}")));
    w.write_record(&header)?;
    for row in &trace.rows {
        let mut record = vec![row.iteration.to_string()];
        record.extend(row.sums().iter().map(f64::to_string));
        record.extend(row.forward.0.iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub struct ZestArgs<'a> {
    pub n: usize,
    pub streams: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    pub trace: Option<&'a Path>,
    pub dump_config: Option<&'a Path>,
}

pub fn zest_command(spec: &ChannelSpec, args: &ZestArgs) -> Result<ZestRun> {
    let b = vec![args.streams; spec.users()];
    let run = run_zest(spec, args.n, &b, args.seed, args.max_iter, args.tol)?;
    if let Some(path) = args.trace {
        write_trace(&run.trace, spec.users(), std::io::BufWriter::new(std::fs::File::create(path)?))?;
    }
    if let Some(path) = args.dump_config {
        std::fs::write(path, run.tx.to_json())?;
    }
    Ok(run)
}

/// Where the zero-forcing beamformers of the TIM component come from.
pub enum TimSource {
    /// Single-stream beamformers read from a configuration file.
    Config(TxConfig),
    Neighboring { width: usize, layout: NeighborLayout },
    /// One channel use with a common scalar beamformer; works only when
    /// the TIM component has no cross links.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecomposeReport {
    pub tin_value: f64,
    pub tim_value: f64,
    pub product: f64,
    pub outer: f64,
    pub factor: f64,
    /// Largest exponent handed to the TIN component.
    pub tin_threshold: f64,
    /// `1 / (1 - tin_threshold)` when the threshold is at most one half.
    pub bound: Option<f64>,
    pub verified: bool,
}

pub fn decompose(spec: &ChannelSpec, decomposition: &Decomposition, source: &TimSource) -> Result<DecomposeReport> {
    let k = spec.users();
    let topology = match source {
        TimSource::Config(tx) => {
            if tx.stream_counts().iter().any(|&b| b != 1) {
                anyhow::bail!("TIM configuration must carry exactly one stream per user");
            }
            TimTopology::Explicit { n: tx.n, vectors: tx.users.iter().map(|s| s[0].v.clone()).collect() }
        }
        TimSource::Neighboring { width, layout } => TimTopology::Neighboring { users: k, width: *width, layout: *layout },
        TimSource::Trivial => TimTopology::Explicit { n: 1, vectors: vec![real_vector(&[1.0]); k] },
    };
    let tim = tim_solution_for(&decomposition.tim_component(spec), &topology)?;
    let (tin_value, tin) = timtin_core::decomposition::tin_value(&decomposition.tin_component(spec))?;
    let scheme = compose(&tim, &tin, spec)?;
    let verified = verify_scheme(spec, &scheme)?;
    let tim_value = tim.symmetric();
    let product = tim_value * tin_value;
    let outer = tim_value.min(tin_value);
    let tin_threshold = decomposition
        .tin_links()
        .iter()
        .filter(|(rx, tx)| rx != tx)
        .map(|&(rx, tx)| spec.alpha(rx, tx))
        .fold(0.0, f64::max);
    Ok(DecomposeReport {
        tin_value,
        tim_value,
        product,
        outer,
        factor: outer / product,
        tin_threshold,
        bound: (tin_threshold <= 0.5).then(|| 1.0 / (1.0 - tin_threshold)),
        verified,
    })
}

pub fn print_report<W: Write>(report: &DecomposeReport, mut out: W) -> Result<()> {
    writeln!(out, "tin_value {}", report.tin_value)?;
    writeln!(out, "tim_value {}", report.tim_value)?;
    writeln!(out, "product {}", report.product)?;
    writeln!(out, "outer {}", report.outer)?;
    writeln!(out, "factor {}", report.factor)?;
    writeln!(out, "tin_threshold {}", report.tin_threshold)?;
    match report.bound {
        Some(b) => writeln!(out, "bound {b}")?,
        None => writeln!(out, "bound n/a")?,
    }
    writeln!(out, "verified {}", report.verified)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighboringReport {
    pub strong: usize,
    pub medium: usize,
    pub users: usize,
    pub predicted: f64,
    pub achieved_min: f64,
    pub verified: bool,
}

/// Builds the neighbouring scheme and fails verification when it does not
/// reach the predicted symmetric value.
pub fn neighboring(s: usize, m: usize, k: usize, layout: NeighborLayout) -> Result<(NeighboringReport, GdofTuple)> {
    let scheme = neighboring_achievability(s, m, k, layout)?;
    let predicted = neighboring_sym_gdof(s, m);
    let achieved_min = scheme.achieved.min();
    let report = NeighboringReport { strong: s, medium: m, users: k, predicted, achieved_min, verified: scheme.verified };
    if !scheme.verified || (achieved_min - predicted).abs() > 1e-9 {
        return Err(Verification(format!("achieved {achieved_min} against predicted {predicted}")).into());
    }
    Ok((report, scheme.achieved))
}
