//! Transmit and receive configurations: beamformers, power exponents,
//! receive filters and successive-cancellation orders.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CVector;

const UNIT_NORM_TOL: f64 = 1e-12;

/// Identifies stream `stream` of user `user`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StreamId {
    pub user: usize,
    pub stream: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TxStream {
    pub v: CVector,
    /// Power exponent; the stream is sent with power `P^r`.
    pub r: f64,
}

/// Beamformers and power exponents of every stream, over `n` channel uses.
#[derive(Debug, Clone, PartialEq)]
pub struct TxConfig {
    pub n: usize,
    pub users: Vec<Vec<TxStream>>,
}

impl TxConfig {
    pub fn new(n: usize, users: Vec<Vec<TxStream>>) -> Result<Self> {
        let tx = TxConfig { n, users };
        tx.validate()?;
        Ok(tx)
    }

    /// One stream per user.
    pub fn single_stream(n: usize, vectors: Vec<CVector>, powers: &[f64]) -> Result<Self> {
        if vectors.len() != powers.len() {
            return Err(Error::DimensionMismatch("one power per beamformer expected".into()));
        }
        let users = vectors
            .into_iter()
            .zip(powers)
            .map(|(v, &r)| vec![TxStream { v, r }])
            .collect();
        Self::new(n, users)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidTxConfig("n must be positive".into()));
        }
        for (k, streams) in self.users.iter().enumerate() {
            if streams.len() > self.n {
                return Err(Error::InvalidStreamCount(format!(
                    "user {k} has {} streams over {} channel uses",
                    streams.len(),
                    self.n
                )));
            }
            for (l, s) in streams.iter().enumerate() {
                if s.v.len() != self.n {
                    return Err(Error::DimensionMismatch(format!(
                        "beamformer ({k},{l}) has length {}, expected {}",
                        s.v.len(),
                        self.n
                    )));
                }
                if (s.v.norm() - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::InvalidTxConfig(format!("beamformer ({k},{l}) is not unit norm")));
                }
                if !(s.r <= 0.0) {
                    return Err(Error::InvalidTxConfig(format!(
                        "power exponent of ({k},{l}) is {} > 0",
                        s.r
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn users(&self) -> usize {
        self.users.len()
    }

    pub fn stream_counts(&self) -> Vec<usize> {
        self.users.iter().map(Vec::len).collect()
    }

    pub fn total_streams(&self) -> usize {
        self.users.iter().map(Vec::len).sum()
    }

    pub fn stream(&self, id: StreamId) -> &TxStream {
        &self.users[id.user][id.stream]
    }

    /// All streams in lexicographic `(user, stream)` order.
    pub fn stream_ids(&self) -> Vec<StreamId> {
        self.users
            .iter()
            .enumerate()
            .flat_map(|(user, s)| (0..s.len()).map(move |stream| StreamId { user, stream }))
            .collect()
    }

    /// Power exponents flattened in lexicographic order.
    pub fn powers(&self) -> Vec<f64> {
        self.users.iter().flatten().map(|s| s.r).collect()
    }

    /// Replaces every power exponent, consuming a flat lexicographic list.
    pub fn with_powers(&self, powers: &[f64]) -> TxConfig {
        let mut it = powers.iter();
        let users = self
            .users
            .iter()
            .map(|s| s.iter().map(|st| TxStream { v: st.v.clone(), r: *it.next().expect("enough powers") }).collect())
            .collect();
        TxConfig { n: self.n, users }
    }

    pub fn to_doc(&self) -> TxConfigDoc {
        TxConfigDoc {
            n: self.n,
            users: self
                .users
                .iter()
                .map(|s| UserDoc {
                    streams: s.iter().map(|st| StreamDoc { v: vector_to_pairs(&st.v), r: st.r }).collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: TxConfigDoc) -> Result<Self> {
        let users = doc
            .users
            .into_iter()
            .map(|u| u.streams.into_iter().map(|s| TxStream { v: pairs_to_vector(&s.v), r: s.r }).collect())
            .collect();
        Self::new(doc.n, users)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TxConfigDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("tx config serializes")
    }
}

/// Receive filters and per-user cancellation orders.
#[derive(Debug, Clone, PartialEq)]
pub struct RxConfig {
    pub u: Vec<Vec<CVector>>,
    /// `sc_order[k]` lists user k's stream indices in decoding order.
    pub sc_order: Vec<Vec<usize>>,
}

impl RxConfig {
    pub fn validate(&self, tx: &TxConfig) -> Result<()> {
        if self.u.len() != tx.users() || self.sc_order.len() != tx.users() {
            return Err(Error::DimensionMismatch("receive config has wrong number of users".into()));
        }
        for (k, (filters, order)) in self.u.iter().zip(&self.sc_order).enumerate() {
            let b = tx.users[k].len();
            if filters.len() != b {
                return Err(Error::DimensionMismatch(format!("user {k} needs {b} receive filters")));
            }
            if !is_permutation(order, b) {
                return Err(Error::InvalidRxConfig(format!("sc_order of user {k} is not a permutation")));
            }
            for u in filters {
                if u.len() != tx.n {
                    return Err(Error::DimensionMismatch(format!("receive filter of user {k} has wrong length")));
                }
                if (u.norm() - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::InvalidRxConfig(format!("receive filter of user {k} is not unit norm")));
                }
            }
        }
        Ok(())
    }

    /// Position of each stream in its user's decoding order.
    pub fn decode_positions(&self) -> Vec<Vec<usize>> {
        self.sc_order
            .iter()
            .map(|order| {
                let mut pos = vec![0; order.len()];
                for (p, &l) in order.iter().enumerate() {
                    pos[l] = p;
                }
                pos
            })
            .collect()
    }
}

fn is_permutation(order: &[usize], b: usize) -> bool {
    if order.len() != b {
        return false;
    }
    let mut seen = vec![false; b];
    for &l in order {
        if l >= b || seen[l] {
            return false;
        }
        seen[l] = true;
    }
    true
}

/// Decoding order `0, 1, ..., b_k - 1` for every user.
pub fn lexicographic_order(b: &[usize]) -> Vec<Vec<usize>> {
    b.iter().map(|&bk| (0..bk).collect()).collect()
}

/// Decoding order `b_k - 1, ..., 0` for every user.
pub fn reverse_lexicographic_order(b: &[usize]) -> Vec<Vec<usize>> {
    b.iter().map(|&bk| (0..bk).rev().collect()).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TxConfigDoc {
    pub n: usize,
    pub users: Vec<UserDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserDoc {
    pub streams: Vec<StreamDoc>,
}

/// A stream on disk; `v` holds `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamDoc {
    pub v: Vec<[f64; 2]>,
    pub r: f64,
}

pub fn vector_to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

pub fn pairs_to_vector(pairs: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(pairs.len(), pairs.iter().map(|p| Complex64::new(p[0], p[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::planar;

    #[test]
    fn rejects_positive_power() {
        let err = TxConfig::single_stream(2, vec![planar(0.1)], &[0.2]).unwrap_err();
        assert!(matches!(err, Error::InvalidTxConfig(_)));
    }

    #[test]
    fn rejects_too_many_streams() {
        let s = TxStream { v: planar(0.0).rows(0, 1).into_owned(), r: 0.0 };
        let err = TxConfig::new(1, vec![vec![s.clone(), s]]).unwrap_err();
        assert!(matches!(err, Error::InvalidStreamCount(_)));
    }

    #[test]
    fn rejects_non_unit_beamformer() {
        let v = planar(0.3) * Complex64::new(1.01, 0.0);
        assert!(TxConfig::single_stream(2, vec![v], &[0.0]).is_err());
    }

    #[test]
    fn sc_order_must_be_permutation() {
        let tx = TxConfig::new(
            2,
            vec![vec![TxStream { v: planar(0.0), r: 0.0 }, TxStream { v: planar(1.0), r: 0.0 }]],
        )
        .unwrap();
        let rx = RxConfig { u: vec![vec![planar(0.0), planar(1.0)]], sc_order: vec![vec![0, 0]] };
        assert!(matches!(rx.validate(&tx), Err(Error::InvalidRxConfig(_))));
        let rx = RxConfig { sc_order: vec![vec![1, 0]], ..rx };
        assert!(rx.validate(&tx).is_ok());
        assert_eq!(rx.decode_positions(), vec![vec![1, 0]]);
    }

    #[test]
    fn json_round_trip() {
        let tx = TxConfig::single_stream(2, vec![planar(0.2), planar(1.4)], &[0.0, -0.5]).unwrap();
        let back = TxConfig::from_json(&tx.to_json()).unwrap();
        assert_eq!(back, tx);
    }
}
