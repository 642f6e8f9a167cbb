//! Interference-channel instances: strength exponents, phases, quantized
//! views, reciprocity and the random generators used by the experiments.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A K-user Gaussian interference channel described by its strength
/// exponents. `alpha[k][i]` is the exponent of the link from transmitter `i`
/// to receiver `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    alpha: Vec<Vec<f64>>,
    theta: Option<Vec<Vec<f64>>>,
    power: Option<f64>,
}

/// On-disk representation of a channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    #[serde(rename = "K")]
    pub k: usize,
    pub alpha: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<Vec<f64>>>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
}

impl ChannelSpec {
    pub fn new(alpha: Vec<Vec<f64>>) -> Result<Self> {
        let k = alpha.len();
        Self::from_parts(k, alpha, None, None)
    }

    pub fn from_parts(
        k: usize,
        alpha: Vec<Vec<f64>>,
        theta: Option<Vec<Vec<f64>>>,
        power: Option<f64>,
    ) -> Result<Self> {
        validate(k, &alpha, theta.as_deref(), power)?;
        Ok(ChannelSpec { alpha, theta, power })
    }

    pub fn with_theta(mut self, theta: Vec<Vec<f64>>) -> Result<Self> {
        validate(self.users(), &self.alpha, Some(&theta), self.power)?;
        self.theta = Some(theta);
        Ok(self)
    }

    pub fn with_power(mut self, power: f64) -> Result<Self> {
        validate(self.users(), &self.alpha, self.theta.as_deref(), Some(power))?;
        self.power = Some(power);
        Ok(self)
    }

    /// Attaches i.i.d. uniform phases in `[0, 2pi)`.
    pub fn with_random_phases(self, seed: u64) -> Self {
        let k = self.users();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = (0..k)
            .map(|_| (0..k).map(|_| rng.gen::<f64>() * 2.0 * PI).collect())
            .collect();
        ChannelSpec { theta: Some(theta), ..self }
    }

    pub fn users(&self) -> usize {
        self.alpha.len()
    }

    #[inline]
    pub fn alpha(&self, rx: usize, tx: usize) -> f64 {
        self.alpha[rx][tx]
    }

    /// Linear power gain of a link at nominal power `p`. Cross links with a
    /// zero exponent are treated as absent rather than as noise-level links.
    pub fn gain(&self, rx: usize, tx: usize, p: f64) -> f64 {
        let a = self.alpha[rx][tx];
        if rx != tx && a == 0.0 {
            0.0
        } else {
            p.powf(a)
        }
    }

    pub fn alpha_matrix(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn theta(&self) -> Option<&[Vec<f64>]> {
        self.theta.as_deref()
    }

    pub fn power(&self) -> Option<f64> {
        self.power
    }

    /// Cross links `(rx, tx)` with a strictly positive exponent.
    pub fn cross_links(&self) -> Vec<(usize, usize)> {
        let k = self.users();
        let mut links = Vec::new();
        for rx in 0..k {
            for tx in 0..k {
                if rx != tx && self.alpha[rx][tx] > 0.0 {
                    links.push((rx, tx));
                }
            }
        }
        links
    }

    /// The same network with transmitters and receivers swapped.
    pub fn reciprocal(&self) -> ChannelSpec {
        ChannelSpec {
            alpha: transpose(&self.alpha),
            theta: self.theta.as_ref().map(|t| transpose(t)),
            power: self.power,
        }
    }

    /// Copy keeping only the direct links and the listed cross links, with the
    /// cross exponents produced by `value`.
    pub fn restricted<F>(&self, keep: F) -> ChannelSpec
    where
        F: Fn(usize, usize, f64) -> Option<f64>,
    {
        let k = self.users();
        let alpha = (0..k)
            .map(|rx| {
                (0..k)
                    .map(|tx| {
                        let a = self.alpha[rx][tx];
                        if rx == tx {
                            a
                        } else {
                            keep(rx, tx, a).unwrap_or(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        ChannelSpec { alpha, theta: self.theta.clone(), power: self.power }
    }

    pub fn to_doc(&self) -> ChannelDoc {
        ChannelDoc {
            k: self.users(),
            alpha: self.alpha.clone(),
            theta: self.theta.clone(),
            power: self.power,
        }
    }

    pub fn from_doc(doc: ChannelDoc) -> Result<Self> {
        Self::from_parts(doc.k, doc.alpha, doc.theta, doc.power)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ChannelDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("channel serializes")
    }
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = m.len();
    (0..k).map(|i| (0..k).map(|j| m[j][i]).collect()).collect()
}

/// Checks the structural invariants of a channel description.
pub fn validate(
    k: usize,
    alpha: &[Vec<f64>],
    theta: Option<&[Vec<f64>]>,
    power: Option<f64>,
) -> Result<()> {
    if k == 0 {
        return Err(Error::DimensionMismatch("channel needs at least one user".into()));
    }
    let square = |m: &[Vec<f64>]| m.len() == k && m.iter().all(|row| row.len() == k);
    if !square(alpha) {
        return Err(Error::DimensionMismatch(format!("alpha must be {k}x{k}")));
    }
    if let Some(theta) = theta {
        if !square(theta) {
            return Err(Error::DimensionMismatch(format!("theta must be {k}x{k}")));
        }
    }
    for (rx, row) in alpha.iter().enumerate() {
        for (tx, &a) in row.iter().enumerate() {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::NegativeExponent { rx, tx, value: a });
            }
        }
        if row[rx] <= 0.0 {
            return Err(Error::NonPositiveDirectLink { user: rx, value: row[rx] });
        }
    }
    if let Some(p) = power {
        if !(p > 1.0) {
            return Err(Error::PowerTooLow(p));
        }
    }
    Ok(())
}

/// Cross-link quantization thresholds `t_1 < ... < t_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationScheme {
    thresholds: Vec<f64>,
}

impl QuantizationScheme {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidThresholds("need at least one threshold".into()));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidThresholds("thresholds must be finite".into()));
        }
        if thresholds[0] < 0.0 {
            return Err(Error::InvalidThresholds("t_1 must be non-negative".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidThresholds("thresholds must be strictly ascending".into()));
        }
        Ok(QuantizationScheme { thresholds })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// The largest threshold `t_l`.
    pub fn top(&self) -> f64 {
        *self.thresholds.last().expect("non-empty")
    }

    pub fn classify(&self, alpha: f64) -> LinkClass {
        let t = &self.thresholds;
        let l = t.len();
        if alpha <= t[0] {
            LinkClass::Weak
        } else if alpha >= t[l - 1] {
            LinkClass::Level(l)
        } else {
            // t_j < alpha < t_l: find the bin with t_j < alpha <= t_{j+1}
            let j = t.iter().rposition(|&tj| tj < alpha).expect("alpha > t_1");
            LinkClass::Level(j + 1)
        }
    }
}

/// Quantized class of a link. `Level(j)` is the j-th bin above the noise
/// floor; `Level(l)` is the top bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkClass {
    Direct,
    Weak,
    Level(usize),
}

/// Classifies every link of the channel under the quantization scheme.
pub fn classify_links(spec: &ChannelSpec, q: &QuantizationScheme) -> Vec<Vec<LinkClass>> {
    let k = spec.users();
    (0..k)
        .map(|rx| {
            (0..k)
                .map(|tx| if rx == tx { LinkClass::Direct } else { q.classify(spec.alpha(rx, tx)) })
                .collect()
        })
        .collect()
}

/// Random cyclic network: strong interference from the two ring neighbours
/// drawn from `[x, 1]`, every other cross link from `[0, 1 - x]`.
pub fn gen_cyclic_random(k: usize, x: f64, seed: u64) -> Result<ChannelSpec> {
    if k < 3 {
        return Err(Error::InvalidRange(format!("cyclic model needs K >= 3, got {k}")));
    }
    if !(0.5..=1.0).contains(&x) {
        return Err(Error::InvalidRange(format!("x must lie in [0.5, 1], got {x}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alpha = vec![vec![0.0; k]; k];
    for (i, row) in alpha.iter_mut().enumerate() {
        for (j, a) in row.iter_mut().enumerate() {
            let u: f64 = rng.gen();
            *a = if i == j {
                1.0
            } else if j == (i + 1) % k || j == (i + k - 1) % k {
                x + (1.0 - x) * u
            } else {
                (1.0 - x) * u
            };
        }
    }
    let theta = (0..k)
        .map(|_| (0..k).map(|_| rng.gen::<f64>() * 2.0 * PI).collect())
        .collect();
    ChannelSpec::from_parts(k, alpha, Some(theta), None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborLayout {
    Ring,
    Line,
}

pub const DEFAULT_STRONG_EXPONENT: f64 = 1.0;
pub const DEFAULT_MEDIUM_EXPONENT: f64 = 0.5;

/// Symmetric neighbouring channel: `s` strong interferers on each side,
/// followed by `m` medium interferers on each side.
pub fn gen_neighboring(k: usize, s: usize, m: usize, layout: NeighborLayout) -> Result<ChannelSpec> {
    gen_neighboring_with(k, s, m, layout, DEFAULT_STRONG_EXPONENT, DEFAULT_MEDIUM_EXPONENT)
}

pub fn gen_neighboring_with(
    k: usize,
    s: usize,
    m: usize,
    layout: NeighborLayout,
    strong: f64,
    medium: f64,
) -> Result<ChannelSpec> {
    let reach = s + m;
    if k == 0 {
        return Err(Error::TooFewUsers("need at least one user".into()));
    }
    if layout == NeighborLayout::Ring && k < 2 * reach + 2 {
        return Err(Error::TooFewUsers(format!(
            "ring with S={s}, M={m} needs K >= {}, got {k}",
            2 * reach + 2
        )));
    }
    let mut alpha = vec![vec![0.0; k]; k];
    for (rx, row) in alpha.iter_mut().enumerate() {
        row[rx] = 1.0;
        for offset in 1..=reach {
            let value = if offset <= s { strong } else { medium };
            let (below, above) = match layout {
                NeighborLayout::Ring => (Some((rx + k - offset) % k), Some((rx + offset) % k)),
                NeighborLayout::Line => (rx.checked_sub(offset), Some(rx + offset).filter(|&t| t < k)),
            };
            for tx in [below, above].into_iter().flatten() {
                row[tx] = value;
            }
        }
    }
    ChannelSpec::new(alpha)
}
