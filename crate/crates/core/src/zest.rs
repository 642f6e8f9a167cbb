//! The ZEST iteration: zero-forcing receiver updates alternated with dual
//! power updates in the reciprocal network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::gdof::{finite_snr_rates, user_gdof, zfsc_receivers, GdofTuple};
use crate::linalg::{random_unit_vector, INDICATOR_TOL};
use crate::scheme::{lexicographic_order, reverse_lexicographic_order, RxConfig, StreamId, TxConfig, TxStream};

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reciprocal,
}

/// One cycle's four GDoF tuples, in the order they are produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub forward: GdofTuple,
    pub switch_reciprocal: GdofTuple,
    pub reciprocal: GdofTuple,
    pub switch_forward: GdofTuple,
}

impl TraceRow {
    pub fn sums(&self) -> [f64; 4] {
        [self.forward.sum(), self.switch_reciprocal.sum(), self.reciprocal.sum(), self.switch_forward.sum()]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GdofTrace {
    pub rows: Vec<TraceRow>,
}

impl GdofTrace {
    /// Most negative step along the chain of sums, within and across cycles.
    /// Non-negative when the trace is monotone.
    pub fn worst_step(&self) -> f64 {
        let chain: Vec<f64> = self.rows.iter().flat_map(|r| r.sums()).collect();
        chain.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn is_monotone(&self, slack: f64) -> bool {
        self.rows.len() < 1 || self.worst_step() >= -slack
    }
}

/// Algorithm state between cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct ZestState {
    pub direction: Direction,
    /// Index of the next cycle to run, starting at 1.
    pub iteration: usize,
    pub tx: TxConfig,
    pub rx: RxConfig,
    pub trace: GdofTrace,
}

impl ZestState {
    /// Wraps a transmit configuration with zero-forcing receivers.
    pub fn from_tx(spec: &ChannelSpec, tx: TxConfig) -> Result<Self> {
        let rx = zfsc_receivers(spec, &tx, &lexicographic_order(&tx.stream_counts()))?;
        Ok(ZestState { direction: Direction::Forward, iteration: 1, tx, rx, trace: GdofTrace::default() })
    }
}

/// Random unit beamformers and power exponents uniform in `[-1, 0]`.
pub fn zest_init(spec: &ChannelSpec, n: usize, b: &[usize], seed: u64) -> Result<ZestState> {
    if b.len() != spec.users() {
        return Err(Error::DimensionMismatch(format!("{} stream counts for {} users", b.len(), spec.users())));
    }
    if n == 0 {
        return Err(Error::InvalidStreamCount("n must be positive".into()));
    }
    if let Some((k, &bk)) = b.iter().enumerate().find(|(_, &bk)| bk > n) {
        return Err(Error::InvalidStreamCount(format!("user {k} asks for {bk} streams over {n} channel uses")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = b
        .iter()
        .map(|&bk| {
            (0..bk)
                .map(|_| {
                    let v = random_unit_vector(n, &mut rng);
                    let r = -rng.gen::<f64>();
                    TxStream { v, r }
                })
                .collect()
        })
        .collect();
    ZestState::from_tx(spec, TxConfig::new(n, users)?)
}

/// Stream-level interference exponents that survive filtering and
/// successive cancellation. Rows are receiving streams, columns
/// transmitting streams, both in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveStrengthMatrix {
    pub streams: Vec<StreamId>,
    pub g: Vec<Vec<f64>>,
    /// Entries forced to zero by successive cancellation.
    pub cancelled: Vec<Vec<bool>>,
    /// Set when some `|u^H v|` lies within a decade of the indicator tolerance.
    pub near_tolerance: bool,
}

impl EffectiveStrengthMatrix {
    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.g[i]
    }
}

pub fn effective_strengths(spec: &ChannelSpec, tx: &TxConfig, rx: &RxConfig, tol: f64) -> Result<EffectiveStrengthMatrix> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    rx.validate(tx)?;
    let streams = tx.stream_ids();
    let positions = rx.decode_positions();
    let size = streams.len();
    let mut g = vec![vec![0.0; size]; size];
    let mut cancelled = vec![vec![false; size]; size];
    let mut near_tolerance = false;
    for (i, a) in streams.iter().enumerate() {
        let u = &rx.u[a.user][a.stream];
        for (j, b) in streams.iter().enumerate() {
            if a.user == b.user && positions[a.user][b.stream] < positions[a.user][a.stream] {
                cancelled[i][j] = true;
                continue;
            }
            let overlap = u.dotc(&tx.stream(*b).v).norm();
            if overlap > tol / 10.0 && overlap < tol * 10.0 {
                near_tolerance = true;
            }
            if overlap > tol {
                g[i][j] = spec.alpha(a.user, b.user);
            }
        }
    }
    Ok(EffectiveStrengthMatrix { streams, g, cancelled, near_tolerance })
}

/// `r_i <- -max_{j != i} max(0, G(i, j) + r_j)` for every stream.
pub fn dual_power_update(g: &EffectiveStrengthMatrix, r: &[f64]) -> Result<Vec<f64>> {
    if r.len() != g.len() {
        return Err(Error::DimensionMismatch(format!("{} powers for {} streams", r.len(), g.len())));
    }
    Ok((0..g.len())
        .map(|i| {
            let worst = (0..g.len())
                .filter(|&j| j != i)
                .map(|j| g.g[i][j] + r[j])
                .fold(0.0_f64, f64::max);
            -worst
        })
        .collect())
}

/// Swaps roles: the receive filters become beamformers with powers `r`.
fn switch(tx: &TxConfig, rx: &RxConfig, r: &[f64]) -> Result<(TxConfig, RxConfig)> {
    let mut powers = r.iter();
    let users = rx
        .u
        .iter()
        .map(|filters| filters.iter().map(|u| TxStream { v: u.clone(), r: *powers.next().expect("one power per stream") }).collect())
        .collect();
    let new_tx = TxConfig::new(tx.n, users)?;
    let new_rx = RxConfig {
        u: tx.users.iter().map(|s| s.iter().map(|st| st.v.clone()).collect()).collect(),
        sc_order: reverse_lexicographic_order(&tx.stream_counts()),
    };
    Ok((new_tx, new_rx))
}

/// One full cycle: forward receiver update, switch to the reciprocal
/// network, reciprocal receiver update, switch back.
pub fn zest_iterate(state: &ZestState, spec: &ChannelSpec) -> Result<ZestState> {
    let reciprocal = spec.reciprocal();
    let lex = lexicographic_order(&state.tx.stream_counts());

    let rx_fwd = zfsc_receivers(spec, &state.tx, &lex)?;
    let forward = user_gdof(spec, &state.tx, &rx_fwd)?;
    let g_fwd = effective_strengths(spec, &state.tx, &rx_fwd, INDICATOR_TOL)?;
    let r_rev = dual_power_update(&g_fwd, &state.tx.powers())?;
    let (tx_rev, rx_rev_switch) = switch(&state.tx, &rx_fwd, &r_rev)?;
    let switch_reciprocal = user_gdof(&reciprocal, &tx_rev, &rx_rev_switch)?;

    let rx_rev = zfsc_receivers(&reciprocal, &tx_rev, &lex)?;
    let reciprocal_tuple = user_gdof(&reciprocal, &tx_rev, &rx_rev)?;
    let g_rev = effective_strengths(&reciprocal, &tx_rev, &rx_rev, INDICATOR_TOL)?;
    let r_fwd = dual_power_update(&g_rev, &tx_rev.powers())?;
    let (tx_next, rx_fwd_switch) = switch(&tx_rev, &rx_rev, &r_fwd)?;
    let switch_forward = user_gdof(spec, &tx_next, &rx_fwd_switch)?;

    let mut trace = state.trace.clone();
    trace.rows.push(TraceRow {
        iteration: state.iteration,
        forward,
        switch_reciprocal,
        reciprocal: reciprocal_tuple,
        switch_forward,
    });
    let rx = zfsc_receivers(spec, &tx_next, &lex)?;
    Ok(ZestState { direction: Direction::Forward, iteration: state.iteration + 1, tx: tx_next, rx, trace })
}

/// Outcome of a ZEST run.
#[derive(Debug, Clone, PartialEq)]
pub struct ZestRun {
    pub tx: TxConfig,
    pub rx: RxConfig,
    pub trace: GdofTrace,
    /// GDoF of the final configuration under its zero-forcing receivers.
    pub gdof: GdofTuple,
    pub converged: bool,
}

impl ZestRun {
    pub fn sum_gdof(&self) -> f64 {
        self.gdof.sum()
    }
}

pub fn run_zest(spec: &ChannelSpec, n: usize, b: &[usize], seed: u64, max_iter: usize, tol: f64) -> Result<ZestRun> {
    run_zest_from(spec, zest_init(spec, n, b, seed)?, max_iter, tol)
}

/// Cycles from `state` until the forward sum changes by less than `tol`
/// between consecutive cycles, or `max_iter` cycles have run.
pub fn run_zest_from(spec: &ChannelSpec, state: ZestState, max_iter: usize, tol: f64) -> Result<ZestRun> {
    if max_iter == 0 {
        return Err(Error::InvalidRange("max_iter must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let mut state = state;
    let mut converged = false;
    for _ in 0..max_iter {
        state = zest_iterate(&state, spec)?;
        let rows = &state.trace.rows;
        if rows.len() >= 2 && (rows[rows.len() - 1].forward.sum() - rows[rows.len() - 2].forward.sum()).abs() < tol {
            converged = true;
            break;
        }
    }
    let gdof = user_gdof(spec, &state.tx, &state.rx)?;
    Ok(ZestRun { tx: state.tx, rx: state.rx, trace: state.trace, gdof, converged })
}

#[derive(Debug, Clone)]
pub struct MultiInitResult {
    pub best: usize,
    pub runs: Vec<ZestRun>,
}

impl MultiInitResult {
    pub fn best_run(&self) -> &ZestRun {
        &self.runs[self.best]
    }
}

/// Runs ZEST once per seed and keeps the largest final sum-GDoF. Ties are
/// broken by sum-rate at `tie_power` when given, then by seed order.
pub fn multi_init_best(
    spec: &ChannelSpec,
    n: usize,
    b: &[usize],
    seeds: &[u64],
    max_iter: usize,
    tol: f64,
    tie_power: Option<f64>,
) -> Result<MultiInitResult> {
    if seeds.is_empty() {
        return Err(Error::EmptySeedList);
    }
    let runs = seeds
        .iter()
        .map(|&s| run_zest(spec, n, b, s, max_iter, tol))
        .collect::<Result<Vec<_>>>()?;
    let best = select_best(spec, &runs, tie_power)?;
    Ok(MultiInitResult { best, runs })
}

/// Index of the run with the largest final sum-GDoF. Ties within 1e-9 go
/// to the larger sum-rate at `tie_power` when given, then to the earliest run.
pub fn select_best(spec: &ChannelSpec, runs: &[ZestRun], tie_power: Option<f64>) -> Result<usize> {
    if runs.is_empty() {
        return Err(Error::EmptySeedList);
    }
    let rate = |run: &ZestRun| -> Result<f64> {
        match tie_power {
            Some(p) => Ok(finite_snr_rates(spec, &run.tx, p)?.iter().sum()),
            None => Ok(0.0),
        }
    };
    let mut best = 0;
    let mut best_rate = rate(&runs[0])?;
    for (i, run) in runs.iter().enumerate().skip(1) {
        let (cand, cur) = (run.sum_gdof(), runs[best].sum_gdof());
        if cand > cur + 1e-9 {
            best = i;
            best_rate = rate(run)?;
        } else if (cand - cur).abs() <= 1e-9 && tie_power.is_some() {
            let r = rate(run)?;
            if r > best_rate {
                best = i;
                best_rate = r;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{planar, real_vector};

    fn two_user_free() -> ChannelSpec {
        ChannelSpec::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn init_is_deterministic_and_valid() {
        let spec = crate::channel::gen_cyclic_random(5, 0.5, 1).unwrap();
        let a = zest_init(&spec, 2, &[1; 5], 9).unwrap();
        let b = zest_init(&spec, 2, &[1; 5], 9).unwrap();
        assert_eq!(a, b);
        assert!(a.tx.powers().iter().all(|&r| (-1.0..=0.0).contains(&r)));
        assert!(zest_init(&spec, 2, &[3, 1, 1, 1, 1], 9).is_err());
        assert!(zest_init(&spec, 2, &[2; 5], 9).is_ok());
    }

    #[test]
    fn dual_update_without_interference_is_full_power() {
        let g = EffectiveStrengthMatrix {
            streams: vec![StreamId { user: 0, stream: 0 }, StreamId { user: 1, stream: 0 }],
            g: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            cancelled: vec![vec![false; 2]; 2],
            near_tolerance: false,
        };
        assert_eq!(dual_power_update(&g, &[-0.4, -0.9]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn dual_update_takes_strongest_row_entry() {
        let g = EffectiveStrengthMatrix {
            streams: (0..3).map(|user| StreamId { user, stream: 0 }).collect(),
            g: vec![vec![1.0, 0.6, 0.8], vec![0.2, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            cancelled: vec![vec![false; 3]; 3],
            near_tolerance: false,
        };
        let r = dual_power_update(&g, &[0.0, -0.1, -0.7]).unwrap();
        assert!((r[0] + 0.5).abs() < 1e-12);
        assert!((r[1] + 0.2).abs() < 1e-12);
        assert_eq!(r[2], 0.0);
    }

    #[test]
    fn orthogonal_filters_give_zero_strength_and_cancellation_is_marked() {
        let spec = ChannelSpec::new(vec![vec![1.0, 0.7], vec![0.7, 1.0]]).unwrap();
        let tx = TxConfig::new(
            2,
            vec![
                vec![TxStream { v: planar(0.0), r: 0.0 }, TxStream { v: planar(0.8), r: 0.0 }],
                vec![TxStream { v: planar(1.5), r: 0.0 }],
            ],
        )
        .unwrap();
        let rx = RxConfig {
            u: vec![vec![planar(0.0 + std::f64::consts::FRAC_PI_2), planar(0.8)], vec![planar(1.5)]],
            sc_order: vec![vec![0, 1], vec![0]],
        };
        let g = effective_strengths(&spec, &tx, &rx, INDICATOR_TOL).unwrap();
        assert_eq!(g.g[0][0], 0.0);
        assert!(g.cancelled[1][0]);
        assert_eq!(g.g[1][0], 0.0);
        assert!(!g.cancelled[0][1]);
    }

    #[test]
    fn interference_free_pair_reaches_full_gdof() {
        let spec = two_user_free();
        let tx = TxConfig::single_stream(1, vec![real_vector(&[1.0]), real_vector(&[1.0])], &[-0.3, -0.6]).unwrap();
        let state = ZestState::from_tx(&spec, tx).unwrap();
        let next = zest_iterate(&state, &spec).unwrap();
        assert_eq!(next.trace.rows[0].switch_forward, GdofTuple(vec![1.0, 1.0]));
        let run = run_zest_from(&spec, next, 10, DEFAULT_TOL).unwrap();
        assert!(run.converged);
        assert_eq!(run.gdof, GdofTuple(vec![1.0, 1.0]));
    }

    #[test]
    fn single_user_run() {
        let spec = ChannelSpec::new(vec![vec![1.0]]).unwrap();
        let run = run_zest(&spec, 1, &[1], 4, DEFAULT_MAX_ITER, DEFAULT_TOL).unwrap();
        assert!((run.sum_gdof() - 1.0).abs() < 1e-12);
        assert!((run.trace.rows[0].switch_forward.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multi_init_rejects_empty_and_keeps_first_duplicate() {
        let spec = crate::channel::gen_cyclic_random(4, 0.6, 2).unwrap();
        assert_eq!(multi_init_best(&spec, 2, &[1; 4], &[], 10, 1e-6, None).unwrap_err(), Error::EmptySeedList);
        let m = multi_init_best(&spec, 2, &[1; 4], &[5, 5], 10, 1e-6, None).unwrap();
        assert_eq!(m.best, 0);
        assert_eq!(m.runs[0], m.runs[1]);
        let single = run_zest(&spec, 2, &[1; 4], 5, 10, 1e-6).unwrap();
        assert_eq!(m.runs[0], single);
    }

    #[test]
    fn max_iter_bounds_trace_length() {
        let spec = crate::channel::gen_cyclic_random(5, 0.5, 3).unwrap();
        let run = run_zest(&spec, 2, &[1; 5], 1, 1, 1e-6).unwrap();
        assert_eq!(run.trace.rows.len(), 1);
    }
}
