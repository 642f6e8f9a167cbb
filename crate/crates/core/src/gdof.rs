//! GDoF of beamforming/power configurations, zero-forcing receivers with
//! successive cancellation, and exact finite-SNR rates.

use std::cmp::Ordering;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::linalg::{add_outer, log2_det_hpd, normalize, CMatrix, CVector, Subspace, INDICATOR_TOL, SPAN_TOL};
use crate::scheme::{RxConfig, StreamId, TxConfig};

/// Vectors paired with their received power exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSet {
    vectors: Vec<CVector>,
    exponents: Vec<f64>,
}

impl ExponentSet {
    pub fn new(vectors: Vec<CVector>, exponents: Vec<f64>) -> Result<Self> {
        if vectors.len() != exponents.len() {
            return Err(Error::InvalidExponentSet(format!(
                "{} vectors but {} exponents",
                vectors.len(),
                exponents.len()
            )));
        }
        if let Some(&bad) = exponents.iter().find(|&&e| !(e >= 0.0) || !e.is_finite()) {
            return Err(Error::InvalidExponentSet(format!("exponent {bad} is not a finite non-negative value")));
        }
        if let Some(first) = vectors.first() {
            if vectors.iter().any(|v| v.len() != first.len()) {
                return Err(Error::InvalidExponentSet("vectors differ in length".into()));
            }
        }
        Ok(ExponentSet { vectors, exponents })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }
}

/// Outcome of the greedy independent-family scan.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantSum {
    pub gamma: usize,
    pub sum: f64,
    /// Indices into the input set, in scan order.
    pub selected: Vec<usize>,
}

/// Walks the set in descending exponent order (ties keep input order) and
/// keeps each vector whose residual against the kept ones exceeds `tol`.
pub fn dominant_exponent_sum(set: &ExponentSet, tol: f64) -> Result<DominantSum> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| descending(set.exponents[a], set.exponents[b]));
    let dim = set.vectors.first().map_or(0, |v| v.len());
    let mut span = Subspace::new(dim);
    let mut selected = Vec::new();
    let mut sum = 0.0;
    for i in order {
        if span.rank() == dim {
            break;
        }
        if span.insert(&set.vectors[i], tol) {
            selected.push(i);
            sum += set.exponents[i];
        }
    }
    Ok(DominantSum { gamma: selected.len(), sum, selected })
}

fn descending(a: f64, b: f64) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Per-user GDoF values.
#[derive(Debug, Clone, PartialEq)]
pub struct GdofTuple(pub Vec<f64>);

impl GdofTuple {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when every entry is at least the matching entry of `other` minus `slack`.
    pub fn dominates(&self, other: &GdofTuple, slack: f64) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| *a >= *b - slack)
    }
}

fn check_users(spec: &ChannelSpec, tx: &TxConfig) -> Result<()> {
    if spec.users() != tx.users() {
        return Err(Error::DimensionMismatch(format!(
            "channel has {} users, configuration has {}",
            spec.users(),
            tx.users()
        )));
    }
    Ok(())
}

/// Exponent at which stream `id` arrives at receiver `rx`.
pub fn received_exponent(spec: &ChannelSpec, tx: &TxConfig, rx: usize, id: StreamId) -> f64 {
    tx.stream(id).r + spec.alpha(rx, id.user)
}

/// GDoF of every user when each receiver decodes its own streams jointly
/// and treats everything else as noise.
pub fn gdof_of_config(spec: &ChannelSpec, tx: &TxConfig) -> Result<GdofTuple> {
    check_users(spec, tx)?;
    let ids = tx.stream_ids();
    let n = tx.n as f64;
    let values = (0..spec.users())
        .map(|k| {
            let mut all = (Vec::new(), Vec::new());
            let mut interference = (Vec::new(), Vec::new());
            for &id in &ids {
                let kappa = received_exponent(spec, tx, k, id);
                if kappa < 0.0 {
                    continue;
                }
                let v = tx.stream(id).v.clone();
                if id.user != k {
                    interference.0.push(v.clone());
                    interference.1.push(kappa);
                }
                all.0.push(v);
                all.1.push(kappa);
            }
            let with_desired = pi_sum(all.0, all.1)?;
            let without = pi_sum(interference.0, interference.1)?;
            Ok(((with_desired - without) / n).max(0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GdofTuple(values))
}

fn pi_sum(vectors: Vec<CVector>, exponents: Vec<f64>) -> Result<f64> {
    Ok(dominant_exponent_sum(&ExponentSet::new(vectors, exponents)?, SPAN_TOL)?.sum)
}

/// Streams `id` competes with at its receiver: every other stream except
/// the user's own streams cancelled before it.
fn competitors<'a>(tx: &'a TxConfig, positions: &[Vec<usize>], id: StreamId) -> impl Iterator<Item = StreamId> + 'a {
    let own_pos = positions[id.user][id.stream];
    let user_positions = positions[id.user].clone();
    tx.stream_ids()
        .into_iter()
        .filter(move |j| *j != id && !(j.user == id.user && user_positions[j.stream] < own_pos))
}

/// Zero-forcing receivers with successive cancellation in the given order.
///
/// Interferers are visited strongest first. Each one is nulled unless that
/// would also null the desired beam, in which case it is left as noise.
pub fn zfsc_receivers(spec: &ChannelSpec, tx: &TxConfig, sc_order: &[Vec<usize>]) -> Result<RxConfig> {
    check_users(spec, tx)?;
    let mut rx = RxConfig { u: Vec::with_capacity(tx.users()), sc_order: sc_order.to_vec() };
    // placeholder filters so validation can check the order before use
    rx.u = tx.users.iter().map(|s| s.iter().map(|st| st.v.clone()).collect()).collect();
    rx.validate(tx)?;
    let positions = rx.decode_positions();

    for k in 0..tx.users() {
        for l in 0..tx.users[k].len() {
            let id = StreamId { user: k, stream: l };
            let v = &tx.stream(id).v;
            let mut candidates: Vec<(StreamId, f64)> = competitors(tx, &positions, id)
                .map(|j| (j, received_exponent(spec, tx, k, j)))
                .filter(|&(_, kappa)| kappa > 0.0)
                .collect();
            candidates.sort_by(|a, b| descending(a.1, b.1).then(a.0.cmp(&b.0)));

            let mut nulled = Subspace::new(tx.n);
            for (j, _) in candidates {
                let w = &tx.stream(j).v;
                if nulled.contains(w, SPAN_TOL) {
                    continue;
                }
                let mut trial = nulled.clone();
                trial.insert(w, SPAN_TOL);
                if !trial.contains(v, SPAN_TOL) {
                    nulled = trial;
                }
            }
            rx.u[k][l] = normalize(&nulled.residual(v)).unwrap_or_else(|| v.clone());
        }
    }
    Ok(rx)
}

/// GDoF of every stream under the given receivers: own exponent minus the
/// strongest interference that survives filtering and cancellation.
pub fn stream_gdof(spec: &ChannelSpec, tx: &TxConfig, rx: &RxConfig) -> Result<Vec<Vec<f64>>> {
    check_users(spec, tx)?;
    rx.validate(tx)?;
    let positions = rx.decode_positions();
    let n = tx.n as f64;
    let visible = |u: &CVector, v: &CVector| u.dotc(v).norm() > INDICATOR_TOL;

    let out = (0..tx.users())
        .map(|k| {
            (0..tx.users[k].len())
                .map(|l| {
                    let id = StreamId { user: k, stream: l };
                    let u = &rx.u[k][l];
                    if !visible(u, &tx.stream(id).v) {
                        return 0.0;
                    }
                    let own = received_exponent(spec, tx, k, id);
                    let worst = competitors(tx, &positions, id)
                        .filter(|j| visible(u, &tx.stream(*j).v))
                        .map(|j| received_exponent(spec, tx, k, j))
                        .fold(0.0_f64, f64::max);
                    ((own - worst) / n).max(0.0)
                })
                .collect()
        })
        .collect();
    Ok(out)
}

/// Per-user sums of [`stream_gdof`].
pub fn user_gdof(spec: &ChannelSpec, tx: &TxConfig, rx: &RxConfig) -> Result<GdofTuple> {
    Ok(GdofTuple(stream_gdof(spec, tx, rx)?.iter().map(|s| s.iter().sum()).collect()))
}

/// Achievable rates in bits per channel use at nominal power `p`, with
/// every receiver decoding its own streams jointly.
pub fn finite_snr_rates(spec: &ChannelSpec, tx: &TxConfig, p: f64) -> Result<Vec<f64>> {
    check_users(spec, tx)?;
    if spec.theta().is_none() {
        return Err(Error::MissingPhases);
    }
    if !(p > 1.0) {
        return Err(Error::PowerTooLow(p));
    }
    let n = tx.n;
    let ids = tx.stream_ids();
    let rates = (0..spec.users())
        .map(|k| {
            // A unit-modulus channel phase multiplies v and cancels in v v^H.
            let mut noise = CMatrix::identity(n, n);
            let mut desired = CMatrix::zeros(n, n);
            for &id in &ids {
                let gain = spec.gain(k, id.user, p) * p.powf(tx.stream(id).r);
                let target = if id.user == k { &mut desired } else { &mut noise };
                add_outer(target, &tx.stream(id).v, gain);
            }
            let total = &desired + &noise;
            ((log2_det_hpd(&total) - log2_det_hpd(&noise)) / n as f64).max(0.0)
        })
        .collect();
    Ok(rates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{planar, real_vector};
    use crate::scheme::{lexicographic_order, TxStream};

    fn set(vs: &[(f64, f64, f64)]) -> ExponentSet {
        ExponentSet::new(vs.iter().map(|&(a, b, _)| real_vector(&[a, b])).collect(), vs.iter().map(|t| t.2).collect())
            .unwrap()
    }

    #[test]
    fn redundant_vector_is_skipped() {
        let d = dominant_exponent_sum(&set(&[(1.0, 0.0, 0.9), (1.0, 0.0, 0.5), (0.0, 1.0, 0.3)]), SPAN_TOL).unwrap();
        assert_eq!(d.gamma, 2);
        assert!((d.sum - 1.2).abs() < 1e-12);
        assert_eq!(d.selected, vec![0, 2]);
    }

    #[test]
    fn empty_set_sums_to_zero() {
        let d = dominant_exponent_sum(&ExponentSet::new(vec![], vec![]).unwrap(), SPAN_TOL).unwrap();
        assert_eq!((d.gamma, d.sum), (0, 0.0));
    }

    #[test]
    fn rejects_bad_tolerance_and_exponents() {
        let s = set(&[(1.0, 0.0, 0.1)]);
        assert_eq!(dominant_exponent_sum(&s, 0.0), Err(Error::NonPositiveTolerance(0.0)));
        assert!(ExponentSet::new(vec![planar(0.0)], vec![-0.1]).is_err());
        assert!(ExponentSet::new(vec![planar(0.0)], vec![]).is_err());
    }

    #[test]
    fn unsorted_input_is_scanned_by_exponent() {
        let d = dominant_exponent_sum(&set(&[(0.0, 1.0, 0.3), (1.0, 0.0, 0.5), (1.0, 1.0, 0.9)]), SPAN_TOL).unwrap();
        assert_eq!(d.selected, vec![2, 1]);
        assert!((d.sum - 1.4).abs() < 1e-12);
    }

    #[test]
    fn single_user_gets_its_direct_link() {
        let spec = ChannelSpec::new(vec![vec![1.0]]).unwrap();
        let tx = TxConfig::single_stream(1, vec![real_vector(&[1.0])], &[0.0]).unwrap();
        assert_eq!(gdof_of_config(&spec, &tx).unwrap(), GdofTuple(vec![1.0]));
        let rx = zfsc_receivers(&spec, &tx, &lexicographic_order(&[1])).unwrap();
        assert_eq!(rx.u[0][0], tx.users[0][0].v);
        assert_eq!(user_gdof(&spec, &tx, &rx).unwrap(), GdofTuple(vec![1.0]));
    }

    #[test]
    fn sub_noise_streams_are_ignored() {
        let spec = ChannelSpec::new(vec![vec![1.0, 0.2], vec![0.2, 1.0]]).unwrap();
        let tx = TxConfig::single_stream(1, vec![real_vector(&[1.0]), real_vector(&[1.0])], &[0.0, -0.5]).unwrap();
        let d = gdof_of_config(&spec, &tx).unwrap();
        assert!((d.0[0] - 1.0).abs() < 1e-12);
        assert!((d.0[1] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn zero_forcing_in_two_dimensions() {
        // user 0 sees a strong interferer it can null
        let spec = ChannelSpec::new(vec![vec![1.0, 0.8], vec![0.0, 1.0]]).unwrap();
        let tx = TxConfig::single_stream(2, vec![planar(0.0), planar(1.0)], &[0.0, 0.0]).unwrap();
        let rx = zfsc_receivers(&spec, &tx, &lexicographic_order(&[1, 1])).unwrap();
        assert!(rx.u[0][0].dotc(&planar(1.0)).norm() < 1e-12);
        let d = user_gdof(&spec, &tx, &rx).unwrap();
        assert!((d.0[0] - 0.5).abs() < 1e-12);
        assert_eq!(d, gdof_of_config(&spec, &tx).unwrap());
    }

    #[test]
    fn rates_need_phases_and_power() {
        let spec = ChannelSpec::new(vec![vec![1.0]]).unwrap();
        let tx = TxConfig::single_stream(1, vec![real_vector(&[1.0])], &[0.0]).unwrap();
        assert_eq!(finite_snr_rates(&spec, &tx, 100.0), Err(Error::MissingPhases));
        let spec = spec.with_theta(vec![vec![0.3]]).unwrap();
        assert_eq!(finite_snr_rates(&spec, &tx, 1.0), Err(Error::PowerTooLow(1.0)));
        let r = finite_snr_rates(&spec, &tx, 100.0).unwrap();
        assert!((r[0] - 101f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn two_stream_user_in_isolation() {
        let spec = ChannelSpec::new(vec![vec![1.0]]).unwrap();
        let tx = TxConfig::new(
            2,
            vec![vec![TxStream { v: planar(0.0), r: 0.0 }, TxStream { v: planar(0.7), r: -0.2 }]],
        )
        .unwrap();
        let d = gdof_of_config(&spec, &tx).unwrap();
        assert!((d.0[0] - 0.9).abs() < 1e-12);
        let rx = zfsc_receivers(&spec, &tx, &[vec![0, 1]]).unwrap();
        let per_stream = stream_gdof(&spec, &tx, &rx).unwrap();
        assert!((per_stream[0][0] - 0.5).abs() < 1e-12);
        assert!((per_stream[0][1] - 0.4).abs() < 1e-12);
    }
}
