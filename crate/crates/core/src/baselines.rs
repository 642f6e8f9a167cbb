//! Finite-SNR comparison schemes: time sharing, full-power TIN, Max-SINR
//! beamforming, successive-approximation power control and iterated dual
//! GDoF power control.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::gdof::{finite_snr_rates, GdofTuple};
use crate::linalg::{add_outer, normalize, random_unit_vector, real_vector, CMatrix, CVector};
use crate::scheme::{StreamId, TxConfig, TxStream};
use crate::tin::tin_gdof;

pub const DEFAULT_MAX_ITER: usize = 500;
pub const RATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Zest,
    MaxSinr,
    Sapc,
    Tdma,
    FullPower,
    Igpc,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Zest => "zest",
            Algorithm::MaxSinr => "max_sinr",
            Algorithm::Sapc => "sapc",
            Algorithm::Tdma => "tdma",
            Algorithm::FullPower => "full_power",
            Algorithm::Igpc => "igpc",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Algorithm::Zest, Algorithm::MaxSinr, Algorithm::Sapc, Algorithm::Tdma, Algorithm::FullPower, Algorithm::Igpc]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub algorithm: Algorithm,
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Sum-rate after each iteration.
    pub history: Vec<f64>,
}

impl BaselineResult {
    fn new(algorithm: Algorithm, rates: Vec<f64>, iterations: usize, converged: bool, history: Vec<f64>) -> Self {
        let sum_rate = rates.iter().sum();
        BaselineResult { algorithm, rates, sum_rate, iterations, converged, history }
    }
}

fn check_power(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::PowerTooLow(p));
    }
    Ok(())
}

/// Equal time sharing: each user is alone for a fraction `1/K` of the time.
pub fn tdma_rates(spec: &ChannelSpec, p: f64) -> Result<BaselineResult> {
    check_power(p)?;
    let k = spec.users() as f64;
    let rates = (0..spec.users()).map(|i| (1.0 + p.powf(spec.alpha(i, i))).log2() / k).collect();
    Ok(BaselineResult::new(Algorithm::Tdma, rates, 1, true, Vec::new()))
}

/// Every user transmits at full power; interference is treated as noise.
pub fn full_power_rates(spec: &ChannelSpec, p: f64) -> Result<BaselineResult> {
    let tx = TxConfig::single_stream(1, vec![real_vector(&[1.0]); spec.users()], &vec![0.0; spec.users()])?;
    let rates = finite_snr_rates(spec, &tx, p)?;
    Ok(BaselineResult::new(Algorithm::FullPower, rates, 1, true, Vec::new()))
}

/// Output of [`max_sinr`]: the scheme plus the beamformers it settled on.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxSinrResult {
    pub result: BaselineResult,
    pub tx: TxConfig,
}

/// Alternating Max-SINR beamforming over `n` channel uses with `b[k]`
/// streams per user, each stream getting an equal share of unit power.
/// Beamformers start from `init` when given, else from seeded random draws.
pub fn max_sinr(
    spec: &ChannelSpec,
    n: usize,
    b: &[usize],
    p: f64,
    seed: u64,
    max_iter: usize,
    init: Option<&TxConfig>,
) -> Result<MaxSinrResult> {
    check_power(p)?;
    if spec.theta().is_none() {
        return Err(Error::MissingPhases);
    }
    if b.len() != spec.users() {
        return Err(Error::DimensionMismatch(format!("{} stream counts for {} users", b.len(), spec.users())));
    }
    if let Some(&bk) = b.iter().find(|&&bk| bk > n) {
        return Err(Error::InvalidStreamCount(format!("{bk} streams over {n} channel uses")));
    }
    let powers: Vec<f64> = b.iter().flat_map(|&bk| std::iter::repeat(-(bk as f64).ln() / p.ln()).take(bk)).collect();
    let mut v: Vec<Vec<CVector>> = match init {
        Some(tx) => {
            if tx.n != n || tx.stream_counts() != b {
                return Err(Error::DimensionMismatch("initial beamformers do not match n and b".into()));
            }
            tx.users.iter().map(|s| s.iter().map(|st| st.v.clone()).collect()).collect()
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            b.iter().map(|&bk| (0..bk).map(|_| random_unit_vector(n, &mut rng)).collect()).collect()
        }
    };
    let ids: Vec<StreamId> = b
        .iter()
        .enumerate()
        .flat_map(|(user, &bk)| (0..bk).map(move |stream| StreamId { user, stream }))
        .collect();
    let weight = |g: f64, i: usize| g * p.powf(powers[i]);
    let reciprocal = spec.reciprocal();

    let build = |v: &[Vec<CVector>]| -> Result<TxConfig> {
        let mut it = powers.iter();
        TxConfig::new(
            n,
            v.iter()
                .map(|s| s.iter().map(|x| TxStream { v: x.clone(), r: *it.next().expect("power") }).collect())
                .collect(),
        )
    };

    let mut history = Vec::new();
    let mut previous = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let u = sinr_filters(spec, &ids, &v, n, p, &weight);
        v = sinr_filters(&reciprocal, &ids, &u, n, p, &weight);
        let sum: f64 = finite_snr_rates(spec, &build(&v)?, p)?.iter().sum();
        history.push(sum);
        if (sum - previous).abs() < RATE_TOL {
            converged = true;
            break;
        }
        previous = sum;
    }
    let tx = build(&v)?;
    let rates = finite_snr_rates(spec, &tx, p)?;
    Ok(MaxSinrResult { result: BaselineResult::new(Algorithm::MaxSinr, rates, iterations, converged, history), tx })
}

/// Whitened matched filter for every stream given the transmit vectors.
fn sinr_filters(
    spec: &ChannelSpec,
    ids: &[StreamId],
    v: &[Vec<CVector>],
    n: usize,
    p: f64,
    weight: &dyn Fn(f64, usize) -> f64,
) -> Vec<Vec<CVector>> {
    let mut out: Vec<Vec<CVector>> = v.iter().map(|s| s.clone()).collect();
    for (i, a) in ids.iter().enumerate() {
        let mut cov = CMatrix::identity(n, n);
        for (j, c) in ids.iter().enumerate() {
            if j != i {
                add_outer(&mut cov, &v[c.user][c.stream], weight(spec.gain(a.user, c.user, p), j));
            }
        }
        let own = &v[a.user][a.stream];
        let filtered = match cov.cholesky() {
            Some(ch) => ch.solve(own),
            None => own.clone(),
        };
        out[a.user][a.stream] = normalize(&filtered).unwrap_or_else(|| own.clone());
    }
    out
}

/// Output of [`sapc`].
#[derive(Debug, Clone, PartialEq)]
pub struct SapcResult {
    pub result: BaselineResult,
    /// Linear transmit powers in `(0, 1]`.
    pub powers: Vec<f64>,
}

const MIN_LINEAR_POWER: f64 = 1e-12;
const SAPC_INNER_ITER: usize = 50;

/// Successive-approximation power control for the TIN sum-rate.
///
/// Each outer round freezes the weights `a_k = SINR_k / (1 + SINR_k)` of
/// the lower bound `a log SINR + c <= log(1 + SINR)` and solves the
/// resulting problem by its fixed-point condition. Starts at full power
/// unless `init` supplies linear powers.
pub fn sapc(spec: &ChannelSpec, p: f64, max_iter: usize, init: Option<&[f64]>) -> Result<SapcResult> {
    check_power(p)?;
    let k = spec.users();
    let gain: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| spec.gain(i, j, p)).collect()).collect();
    let mut q = match init {
        Some(q0) if q0.len() == k => q0.iter().map(|&x| x.clamp(MIN_LINEAR_POWER, 1.0)).collect(),
        Some(q0) => return Err(Error::DimensionMismatch(format!("{} initial powers for {k} users", q0.len()))),
        None => vec![1.0; k],
    };
    let noise_plus_interference = |q: &[f64], i: usize| -> f64 {
        1.0 + (0..k).filter(|&j| j != i).map(|j| gain[i][j] * q[j]).sum::<f64>()
    };
    let rates_of = |q: &[f64]| -> Vec<f64> {
        (0..k).map(|i| (1.0 + gain[i][i] * q[i] / noise_plus_interference(q, i)).log2()).collect()
    };

    let mut history = Vec::new();
    let mut previous: f64 = rates_of(&q).iter().sum();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let a: Vec<f64> = (0..k)
            .map(|i| {
                let sinr = gain[i][i] * q[i] / noise_plus_interference(&q, i);
                sinr / (1.0 + sinr)
            })
            .collect();
        for _ in 0..SAPC_INNER_ITER {
            let interference: Vec<f64> = (0..k).map(|i| noise_plus_interference(&q, i)).collect();
            let next: Vec<f64> = (0..k)
                .map(|i| {
                    let price: f64 =
                        (0..k).filter(|&j| j != i).map(|j| a[j] * gain[j][i] / interference[j]).sum();
                    if price > 0.0 {
                        (a[i] / price).clamp(MIN_LINEAR_POWER, 1.0)
                    } else {
                        1.0
                    }
                })
                .collect();
            let change = next.iter().zip(&q).map(|(x, y)| (x.ln() - y.ln()).abs()).fold(0.0, f64::max);
            q = next;
            if change < 1e-9 {
                break;
            }
        }
        let sum: f64 = rates_of(&q).iter().sum();
        history.push(sum);
        if (sum - previous).abs() < RATE_TOL {
            converged = true;
            break;
        }
        previous = sum;
    }
    let rates = rates_of(&q);
    Ok(SapcResult { result: BaselineResult::new(Algorithm::Sapc, rates, iterations, converged, history), powers: q })
}

/// Output of [`igpc`].
#[derive(Debug, Clone, PartialEq)]
pub struct IgpcResult {
    pub powers: Vec<f64>,
    pub gdof: GdofTuple,
    /// Tuples after every half update, alternating between the channel
    /// and its reciprocal, starting with full power in the channel.
    pub trace: Vec<GdofTuple>,
    /// Power exponents in the channel before the first update and after
    /// every round trip; entry `i` produced `trace[2 * i]`.
    pub power_trace: Vec<Vec<f64>>,
    pub converged: bool,
}

/// `r_i <- -max_{j != i} max(0, alpha_ij + r_j)`.
fn scalar_dual(spec: &ChannelSpec, r: &[f64]) -> Vec<f64> {
    let k = spec.users();
    (0..k)
        .map(|i| -(0..k).filter(|&j| j != i).map(|j| spec.alpha(i, j) + r[j]).fold(0.0_f64, f64::max))
        .collect()
}

/// Iterated dual power control: alternate the scalar dual update between the
/// channel and its reciprocal, starting from full power.
pub fn igpc(spec: &ChannelSpec, max_iter: usize, tol: f64) -> Result<IgpcResult> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let reciprocal = spec.reciprocal();
    let mut r = vec![0.0; spec.users()];
    let mut gdof = tin_gdof(spec, &r)?;
    let mut trace = vec![gdof.clone()];
    let mut power_trace = vec![r.clone()];
    let mut converged = false;
    for _ in 0..max_iter.max(1) {
        let r_rev = scalar_dual(spec, &r);
        trace.push(tin_gdof(&reciprocal, &r_rev)?);
        r = scalar_dual(&reciprocal, &r_rev);
        power_trace.push(r.clone());
        let next = tin_gdof(spec, &r)?;
        trace.push(next.clone());
        let delta = (next.sum() - gdof.sum()).abs();
        gdof = next;
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(IgpcResult { powers: r, gdof, trace, power_trace, converged })
}

/// Converts GDoF power exponents into linear powers at nominal power `p`.
pub fn exponents_to_linear(r: &[f64], p: f64) -> Vec<f64> {
    r.iter().map(|&x| p.powf(x)).collect()
}
