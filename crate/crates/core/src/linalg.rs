//! Small dense complex linear algebra used by the GDoF and rate routines.
//!
//! Dimensions here are tiny (the number of channel uses `n` is usually 1-4),
//! so everything works on heap `DVector`/`DMatrix` without further tuning.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// Residual-norm threshold below which a vector counts as lying in a span.
pub const SPAN_TOL: f64 = 1e-9;

/// Threshold on `|u^H v|` below which a stream is considered zero-forced.
pub const INDICATOR_TOL: f64 = 1e-7;

/// An orthonormal basis for a subspace of `C^n`, grown one vector at a time.
#[derive(Debug, Clone)]
pub struct Subspace {
    dim: usize,
    basis: Vec<CVector>,
}

impl Subspace {
    pub fn new(dim: usize) -> Self {
        Subspace { dim, basis: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    /// Component of `v` orthogonal to the subspace (two Gram-Schmidt passes).
    pub fn residual(&self, v: &CVector) -> CVector {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &self.basis {
                let c = q.dotc(&r);
                r.axpy(-c, q, Complex64::new(1.0, 0.0));
            }
        }
        r
    }

    pub fn contains(&self, v: &CVector, tol: f64) -> bool {
        self.residual(v).norm() <= tol
    }

    /// Adds `v` to the span. Returns false (and leaves the basis alone) when
    /// `v` already lies in the span up to `tol`.
    pub fn insert(&mut self, v: &CVector, tol: f64) -> bool {
        let r = self.residual(v);
        let norm = r.norm();
        if norm <= tol {
            return false;
        }
        self.basis.push(r.unscale(norm));
        true
    }

    /// Some unit vector orthogonal to the subspace, if the subspace is proper.
    pub fn orthogonal_unit(&self) -> Option<CVector> {
        if self.rank() >= self.dim {
            return None;
        }
        (0..self.dim).find_map(|i| {
            let mut e = CVector::zeros(self.dim);
            e[i] = Complex64::new(1.0, 0.0);
            let r = self.residual(&e);
            let norm = r.norm();
            (norm > 1e-6).then(|| r.unscale(norm))
        })
    }
}

/// `log2 det(m)` for a Hermitian positive definite matrix.
pub fn log2_det_hpd(m: &CMatrix) -> f64 {
    match m.clone().cholesky() {
        Some(ch) => {
            let l = ch.l_dirty();
            (0..m.nrows()).map(|i| 2.0 * l[(i, i)].re.abs().log2()).sum()
        }
        // Fall back to the eigenvalues when rounding broke positivity.
        None => m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|&x| x.max(f64::MIN_POSITIVE).log2())
            .sum(),
    }
}

/// Adds `weight * v v^H` to `m`.
pub fn add_outer(m: &mut CMatrix, v: &CVector, weight: f64) {
    let n = v.len();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += v[i] * v[j].conj() * weight;
        }
    }
}

pub fn normalize(v: &CVector) -> Option<CVector> {
    let norm = v.norm();
    (norm > 0.0 && norm.is_finite()).then(|| v.unscale(norm))
}

/// A vector drawn uniformly from the unit sphere of `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
        if let Some(u) = normalize(&v) {
            return u;
        }
    }
}

/// Standard normal sample (Box-Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Builds a complex vector from real components.
pub fn real_vector(xs: &[f64]) -> CVector {
    CVector::from_iterator(xs.len(), xs.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// Unit vector at angle `theta` in the real plane.
pub fn planar(theta: f64) -> CVector {
    real_vector(&[theta.cos(), theta.sin()])
}

pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut e = CVector::zeros(n);
    e[i] = Complex64::new(1.0, 0.0);
    e
}
