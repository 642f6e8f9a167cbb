//! TIM-TIN decompositions: split the cross links into a part handled by
//! signal-space zero-forcing and a part handled by power control, solve each
//! part, and combine the two solutions into one scheme whose GDoF is the
//! per-user product.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelDoc, ChannelSpec, NeighborLayout, QuantizationScheme};
use crate::error::{Error, Result};
use crate::gdof::{gdof_of_config, user_gdof, zfsc_receivers, GdofTuple};
use crate::linalg::{basis_vector, CVector};
use crate::scheme::{lexicographic_order, TxConfig};
use crate::tin::{tin_symmetric_gdof, TinSolution, DEFAULT_BISECTION_TOL};

pub type Link = (usize, usize);

/// Partition of the cross links with positive exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    tim_links: BTreeSet<Link>,
    tin_links: BTreeSet<Link>,
}

impl Decomposition {
    pub fn new(spec: &ChannelSpec, tim: impl IntoIterator<Item = Link>, tin: impl IntoIterator<Item = Link>) -> Result<Self> {
        let tim_links: BTreeSet<Link> = tim.into_iter().collect();
        let tin_links: BTreeSet<Link> = tin.into_iter().collect();
        if let Some(l) = tim_links.intersection(&tin_links).next() {
            return Err(Error::InvalidDecomposition(format!("link {l:?} is on both sides")));
        }
        let all: BTreeSet<Link> = spec.cross_links().into_iter().collect();
        let union: BTreeSet<Link> = tim_links.union(&tin_links).copied().collect();
        if let Some(l) = all.difference(&union).next() {
            return Err(Error::InvalidDecomposition(format!("cross link {l:?} is not assigned")));
        }
        if let Some(l) = union.difference(&all).next() {
            return Err(Error::InvalidDecomposition(format!("{l:?} is not a cross link of the channel")));
        }
        Ok(Decomposition { tim_links, tin_links })
    }

    /// Links at or below `t` go to power control, the rest to zero-forcing.
    pub fn by_threshold(spec: &ChannelSpec, t: f64) -> Self {
        let (tin, tim): (Vec<Link>, Vec<Link>) =
            spec.cross_links().into_iter().partition(|&(rx, tx)| spec.alpha(rx, tx) <= t);
        Decomposition { tim_links: tim.into_iter().collect(), tin_links: tin.into_iter().collect() }
    }

    pub fn tim_links(&self) -> &BTreeSet<Link> {
        &self.tim_links
    }

    pub fn tin_links(&self) -> &BTreeSet<Link> {
        &self.tin_links
    }

    /// The zero-forcing part with every kept link at unit strength.
    pub fn tim_component(&self, spec: &ChannelSpec) -> ChannelSpec {
        let k = spec.users();
        let alpha = (0..k)
            .map(|rx| {
                (0..k)
                    .map(|tx| if rx == tx || self.tim_links.contains(&(rx, tx)) { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        ChannelSpec::new(alpha).expect("unit-strength component is valid")
    }

    /// The power-control part with its original exponents.
    pub fn tin_component(&self, spec: &ChannelSpec) -> ChannelSpec {
        spec.restricted(|rx, tx, a| self.tin_links.contains(&(rx, tx)).then_some(a))
    }
}

/// A channel document extended with the two link lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    #[serde(rename = "K")]
    pub k: usize,
    pub alpha: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<Vec<f64>>>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    pub tim_links: Vec<[usize; 2]>,
    pub tin_links: Vec<[usize; 2]>,
}

impl DecompositionDoc {
    pub fn new(spec: &ChannelSpec, d: &Decomposition) -> Self {
        let ChannelDoc { k, alpha, theta, power } = spec.to_doc();
        let pairs = |s: &BTreeSet<Link>| s.iter().map(|&(a, b)| [a, b]).collect();
        DecompositionDoc { k, alpha, theta, power, tim_links: pairs(&d.tim_links), tin_links: pairs(&d.tin_links) }
    }

    pub fn into_parts(self) -> Result<(ChannelSpec, Decomposition)> {
        let spec = ChannelSpec::from_doc(ChannelDoc { k: self.k, alpha: self.alpha, theta: self.theta, power: self.power })?;
        let to_links = |v: Vec<[usize; 2]>| v.into_iter().map(|[a, b]| (a, b)).collect::<Vec<_>>();
        let d = Decomposition::new(&spec, to_links(self.tim_links), to_links(self.tin_links))?;
        Ok((spec, d))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }
}

/// Zero-forcing constructions with a known achievable tuple.
#[derive(Debug, Clone, PartialEq)]
pub enum TimTopology {
    /// One beamformer per user over `n` channel uses.
    Explicit { n: usize, vectors: Vec<CVector> },
    /// Every user interferes with the `width` nearest users on each side.
    /// User `k` sends along basis vector `k mod (width + 1)`.
    Neighboring { users: usize, width: usize, layout: NeighborLayout },
}

/// Beamformers for the zero-forcing part and the tuple they reach there.
#[derive(Debug, Clone, PartialEq)]
pub struct TimSolution {
    pub n: usize,
    pub vectors: Vec<CVector>,
    pub gdof: GdofTuple,
}

impl TimSolution {
    pub fn symmetric(&self) -> f64 {
        self.gdof.min()
    }
}

/// Builds the beamformers for `topology` and checks on `tim_spec` that each
/// receiver can null all of its zero-forcing interferers.
pub fn tim_solution_for(tim_spec: &ChannelSpec, topology: &TimTopology) -> Result<TimSolution> {
    let (n, vectors) = match topology {
        TimTopology::Explicit { n, vectors } => (*n, vectors.clone()),
        TimTopology::Neighboring { users, width, layout } => {
            let period = width + 1;
            if *layout == NeighborLayout::Ring && users % period != 0 {
                return Err(Error::RingNotAligned { users: *users, period });
            }
            (period, (0..*users).map(|k| basis_vector(period, k % period)).collect())
        }
    };
    if vectors.len() != tim_spec.users() {
        return Err(Error::IncompatibleDecomposition(format!(
            "{} beamformers for {} users",
            vectors.len(),
            tim_spec.users()
        )));
    }
    let tx = TxConfig::single_stream(n, vectors.clone(), &vec![0.0; vectors.len()])?;
    let gdof = gdof_of_config(tim_spec, &tx)?;
    let full = 1.0 / n as f64;
    if let Some(k) = gdof.0.iter().position(|&d| (d - full).abs() > 1e-9) {
        return Err(Error::UnsupportedTopology(format!("receiver {k} cannot null its interferers")));
    }
    Ok(TimSolution { n, vectors, gdof })
}

/// The combined configuration and the product tuple it should reach.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedScheme {
    pub tx: TxConfig,
    pub product: GdofTuple,
}

pub fn compose(tim: &TimSolution, tin: &TinSolution, spec: &ChannelSpec) -> Result<ComposedScheme> {
    let k = spec.users();
    if tim.vectors.len() != k || tin.powers.len() != k {
        return Err(Error::IncompatibleDecomposition(format!(
            "channel has {k} users, zero-forcing part {}, power part {}",
            tim.vectors.len(),
            tin.powers.len()
        )));
    }
    let tx = TxConfig::single_stream(tim.n, tim.vectors.clone(), &tin.powers)?;
    let product = GdofTuple(tim.gdof.0.iter().zip(&tin.gdof.0).map(|(a, b)| a * b).collect());
    Ok(ComposedScheme { tx, product })
}

/// Tuple reached by the scheme's configuration on the full channel.
pub fn achieved_tuple(spec: &ChannelSpec, scheme: &ComposedScheme) -> Result<GdofTuple> {
    let rx = zfsc_receivers(spec, &scheme.tx, &lexicographic_order(&scheme.tx.stream_counts()))?;
    user_gdof(spec, &scheme.tx, &rx)
}

/// Whether the configuration reaches the claimed product on `spec`.
pub fn verify_scheme(spec: &ChannelSpec, scheme: &ComposedScheme) -> Result<bool> {
    let zf = achieved_tuple(spec, scheme)?;
    let joint = gdof_of_config(spec, &scheme.tx)?;
    Ok(zf.dominates(&scheme.product, 1e-9) && joint.dominates(&scheme.product, 1e-9))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorReport {
    pub tim_value: f64,
    pub tin_value: f64,
    pub achieved: f64,
    pub outer: f64,
    pub factor: f64,
    pub bound: f64,
    pub verified: bool,
}

impl FactorReport {
    pub fn within_bound(&self) -> bool {
        self.factor <= self.bound + 1e-9
    }
}

/// Symmetric value of a decomposition scheme against the smaller of its
/// two component values.
pub fn factor_bound(
    spec: &ChannelSpec,
    q: &QuantizationScheme,
    decomposition: &Decomposition,
    topology: &TimTopology,
) -> Result<FactorReport> {
    let top = q.top();
    if top > 0.5 {
        return Err(Error::ThresholdAboveHalf(top));
    }
    let tim = tim_solution_for(&decomposition.tim_component(spec), topology)?;
    let (tin_value, tin) = tin_symmetric_gdof(&decomposition.tin_component(spec), 1e-10)?;
    let scheme = compose(&tim, &tin, spec)?;
    let tim_value = tim.symmetric();
    let achieved = tim_value * tin_value;
    let outer = tim_value.min(tin_value);
    Ok(FactorReport {
        tim_value,
        tin_value,
        achieved,
        outer,
        factor: outer / achieved,
        bound: 1.0 / (1.0 - top),
        verified: verify_scheme(spec, &scheme)?,
    })
}

/// Symmetric GDoF of the neighbouring channel with `s` strong and `m`
/// medium interferers on each side.
pub fn neighboring_sym_gdof(s: usize, m: usize) -> f64 {
    if m <= s {
        1.0 / (s + m + 1) as f64
    } else {
        1.0 / (2 * (s + 1)) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighboringScheme {
    pub spec: ChannelSpec,
    pub decomposition: Decomposition,
    pub scheme: ComposedScheme,
    pub achieved: GdofTuple,
    pub verified: bool,
}

/// Decomposition scheme for the neighbouring channel.
///
/// With `m <= s` every interferer is zero-forced. Otherwise strong links
/// are zero-forced and medium links are treated as noise at full power.
pub fn neighboring_achievability(s: usize, m: usize, k: usize, layout: NeighborLayout) -> Result<NeighboringScheme> {
    let spec = crate::channel::gen_neighboring(k, s, m, layout)?;
    let strong: Vec<Link> = spec
        .cross_links()
        .into_iter()
        .filter(|&(rx, tx)| spec.alpha(rx, tx) >= crate::channel::DEFAULT_STRONG_EXPONENT)
        .collect();
    let (decomposition, width) = if m <= s {
        (Decomposition::new(&spec, spec.cross_links(), [])?, s + m)
    } else {
        let medium: Vec<Link> = spec.cross_links().into_iter().filter(|l| !strong.contains(l)).collect();
        (Decomposition::new(&spec, strong, medium)?, s)
    };
    let tim = tim_solution_for(
        &decomposition.tim_component(&spec),
        &TimTopology::Neighboring { users: k, width, layout },
    )?;
    let tin = TinSolution::from_powers(&decomposition.tin_component(&spec), vec![0.0; k])?;
    let scheme = compose(&tim, &tin, &spec)?;
    let achieved = achieved_tuple(&spec, &scheme)?;
    let verified = verify_scheme(&spec, &scheme)?;
    Ok(NeighboringScheme { spec, decomposition, scheme, achieved, verified })
}

/// Symmetric TIN value of a component, at the default resolution.
pub fn tin_value(spec: &ChannelSpec) -> Result<(f64, TinSolution)> {
    tin_symmetric_gdof(spec, DEFAULT_BISECTION_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn partition_is_checked() {
        let spec = catalog::two_level_network();
        let links = spec.cross_links();
        assert!(Decomposition::new(&spec, links.clone(), []).is_ok());
        assert!(matches!(
            Decomposition::new(&spec, links[1..].to_vec(), []),
            Err(Error::InvalidDecomposition(_))
        ));
        assert!(Decomposition::new(&spec, links.clone(), [links[0]]).is_err());
        assert!(Decomposition::new(&spec, links, [(0, 2)]).is_err());
    }

    #[test]
    fn threshold_split_of_two_level_network() {
        let spec = catalog::two_level_network();
        let d = Decomposition::by_threshold(&spec, 0.5);
        assert_eq!(d.tim_links().iter().copied().collect::<Vec<_>>(), {
            let mut s = catalog::two_level_strong_links();
            s.sort();
            s
        });
        assert_eq!(d.tin_links().len(), 5);
    }

    #[test]
    fn neighboring_formula() {
        assert!((neighboring_sym_gdof(2, 2) - 0.2).abs() < 1e-15);
        assert!((neighboring_sym_gdof(1, 2) - 0.25).abs() < 1e-15);
        assert_eq!(neighboring_sym_gdof(0, 0), 1.0);
    }

    #[test]
    fn line_layouts_reach_the_formula() {
        for (s, m, expect) in [(1, 2, 0.25), (1, 1, 1.0 / 3.0), (0, 1, 0.5)] {
            let out = neighboring_achievability(s, m, 13, NeighborLayout::Line).unwrap();
            assert!(out.verified);
            assert!(out.achieved.0.iter().all(|&d| d >= expect - 1e-9), "{s} {m} {:?}", out.achieved);
            assert!((out.scheme.product.min() - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn misaligned_ring_is_reported() {
        assert_eq!(
            neighboring_achievability(1, 1, 13, NeighborLayout::Ring).unwrap_err(),
            Error::RingNotAligned { users: 13, period: 3 }
        );
        let out = neighboring_achievability(1, 1, 12, NeighborLayout::Ring).unwrap();
        assert!(out.verified);
    }

    #[test]
    fn inflated_claim_fails_verification() {
        let spec = catalog::two_level_network();
        let mut scheme = ComposedScheme { tx: catalog::two_level_scheme(), product: GdofTuple(vec![0.3; 5]) };
        assert!(verify_scheme(&spec, &scheme).unwrap());
        scheme.product.0[2] += 0.01;
        assert!(!verify_scheme(&spec, &scheme).unwrap());
    }

    #[test]
    fn document_round_trip() {
        let spec = catalog::two_level_network();
        let d = Decomposition::by_threshold(&spec, 0.5);
        let doc = DecompositionDoc::from_json(&DecompositionDoc::new(&spec, &d).to_json()).unwrap();
        let (spec2, d2) = doc.into_parts().unwrap();
        assert_eq!(spec2, spec);
        assert_eq!(d2, d);
    }
}
