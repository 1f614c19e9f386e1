//! Truncated matrix realization of the ascending discrete series with weight
//! k on the basis |k,m>, m = 0..m_max.
//!
//! The generators act as
//!   K3 |k,m> = (k+m) |k,m>,
//!   K+ |k,m> = sqrt((m+1)(2k+m)) |k,m+1>,
//!   K- |k,m> = sqrt(m(2k-1+m)) |k,m-1>,
//! with K1 = (K+ + K-)/2 and K2 = (K+ - K-)/(2i). Truncating K+ corrupts the
//! boundary rows of any product, so consistency statements only hold on the
//! "interior" block that excludes a guard band at the top.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::algebra::ApplyOp;
use crate::error::{Error, Result};

/// Default budget for the squared amplitude a state may carry in the guard
/// rows of the truncated space.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Hard cap on truncation-index escalation.
pub const M_MAX_CAP: usize = 1 << 14;

/// Number of top rows excluded from interior assertions.
pub fn guard_rows(m_max: usize) -> usize {
    (4.0 + 2.0 * (m_max as f64).sqrt()).ceil() as usize
}

struct RepInner {
    k: f64,
    m_max: usize,
    k_plus: Array2<Complex64>,
    k_minus: Array2<Complex64>,
    k1: Array2<Complex64>,
    k2: Array2<Complex64>,
    k3: Array2<Complex64>,
}

/// Truncated discrete-series representation; cheap to clone (the dense
/// generator matrices are shared behind an `Arc`).
#[derive(Clone)]
pub struct FockRep {
    inner: Arc<RepInner>,
}

impl FockRep {
    /// Build the generator matrices for weight `k > 0` on m = 0..=m_max.
    pub fn build(k: f64, m_max: usize) -> Result<FockRep> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!(
                "discrete-series weight must satisfy k > 0, got {k}"
            )));
        }
        if m_max < 8 {
            return Err(Error::Domain(format!(
                "m_max must be at least 8, got {m_max}"
            )));
        }
        if m_max > M_MAX_CAP {
            return Err(Error::Domain(format!(
                "m_max = {m_max} above the hard cap {M_MAX_CAP}"
            )));
        }
        let dim = m_max + 1;
        let mut k_plus = Array2::<Complex64>::zeros((dim, dim));
        let mut k_minus = Array2::<Complex64>::zeros((dim, dim));
        let mut k3 = Array2::<Complex64>::zeros((dim, dim));
        for m in 0..dim {
            let mf = m as f64;
            k3[[m, m]] = Complex64::new(k + mf, 0.0);
            if m + 1 < dim {
                let amp = ((mf + 1.0) * (2.0 * k + mf)).sqrt();
                k_plus[[m + 1, m]] = Complex64::new(amp, 0.0);
                k_minus[[m, m + 1]] = Complex64::new(amp, 0.0);
            }
        }
        let half = Complex64::new(0.5, 0.0);
        let half_over_i = Complex64::new(0.0, -0.5); // 1/(2i)
        let k1 = (&k_plus + &k_minus) * half;
        let k2 = (&k_plus - &k_minus) * half_over_i;
        Ok(FockRep {
            inner: Arc::new(RepInner {
                k,
                m_max,
                k_plus,
                k_minus,
                k1,
                k2,
                k3,
            }),
        })
    }

    pub fn k(&self) -> f64 {
        self.inner.k
    }

    pub fn m_max(&self) -> usize {
        self.inner.m_max
    }

    /// Matrix dimension m_max + 1.
    pub fn dim(&self) -> usize {
        self.inner.m_max + 1
    }

    pub fn guard(&self) -> usize {
        guard_rows(self.inner.m_max)
    }

    /// Dimension of the interior block free of truncation artifacts.
    pub fn interior_dim(&self) -> usize {
        self.dim().saturating_sub(self.guard())
    }

    pub fn k_plus(&self) -> &Array2<Complex64> {
        &self.inner.k_plus
    }

    pub fn k_minus(&self) -> &Array2<Complex64> {
        &self.inner.k_minus
    }

    pub fn k1(&self) -> &Array2<Complex64> {
        &self.inner.k1
    }

    pub fn k2(&self) -> &Array2<Complex64> {
        &self.inner.k2
    }

    pub fn k3(&self) -> &Array2<Complex64> {
        &self.inner.k3
    }

    /// Casimir matrix -(K+ K- + K- K+)/2 + K3 K3; equals k(k-1) times the
    /// identity on the interior block.
    pub fn casimir(&self) -> Array2<Complex64> {
        let half = Complex64::new(0.5, 0.0);
        let plus_minus = self.inner.k_plus.dot(&self.inner.k_minus);
        let minus_plus = self.inner.k_minus.dot(&self.inner.k_plus);
        let k3sq = self.inner.k3.dot(&self.inner.k3);
        k3sq - (plus_minus + minus_plus) * half
    }

    /// Dense contraction c1 K1 + c2 K2 + c3 K3 with literal coefficients.
    pub fn contract(&self, c: [Complex64; 3]) -> Array2<Complex64> {
        let mut out = Array2::<Complex64>::zeros((self.dim(), self.dim()));
        out.scaled_add(c[0], &self.inner.k1);
        out.scaled_add(c[1], &self.inner.k2);
        out.scaled_add(c[2], &self.inner.k3);
        out
    }
}

/// Tridiagonal form of a generator combination c1 K1 + c2 K2 + c3 K3; the
/// O(dim) action makes state construction by exponentiation cheap.
pub struct TriDiagOp {
    diag: Vec<Complex64>,
    /// lower[m] sits at (row m+1, col m)
    lower: Vec<Complex64>,
    /// upper[m] sits at (row m, col m+1)
    upper: Vec<Complex64>,
}

impl TriDiagOp {
    /// Tridiagonal realization of the literal contraction
    /// c[0] K1 + c[1] K2 + c[2] K3 for weight `k` on dimension `dim`.
    pub fn generator_combo(k: f64, dim: usize, c: [Complex64; 3]) -> TriDiagOp {
        let i = Complex64::new(0.0, 1.0);
        let mut diag = Vec::with_capacity(dim);
        let mut lower = Vec::with_capacity(dim.saturating_sub(1));
        let mut upper = Vec::with_capacity(dim.saturating_sub(1));
        for m in 0..dim {
            let mf = m as f64;
            diag.push(c[2] * (k + mf));
            if m + 1 < dim {
                let amp = ((mf + 1.0) * (2.0 * k + mf)).sqrt();
                // K+ contributes to (m+1, m), K- to (m, m+1)
                lower.push((c[0] * 0.5 - i * c[1] * 0.5) * amp);
                upper.push((c[0] * 0.5 + i * c[1] * 0.5) * amp);
            }
        }
        TriDiagOp { diag, lower, upper }
    }
}

impl ApplyOp for TriDiagOp {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        let n = self.diag.len();
        let mut out = Array1::<Complex64>::zeros(n);
        for m in 0..n {
            let mut acc = self.diag[m] * v[m];
            if m > 0 {
                acc += self.lower[m - 1] * v[m - 1];
            }
            if m + 1 < n {
                acc += self.upper[m] * v[m + 1];
            }
            out[m] = acc;
        }
        out
    }

    fn op_one_norm(&self) -> f64 {
        let n = self.diag.len();
        let mut worst = 0.0f64;
        for j in 0..n {
            let mut s = self.diag[j].norm();
            if j > 0 {
                s += self.upper[j - 1].norm();
            }
            if j + 1 < n {
                s += self.lower[j].norm();
            }
            worst = worst.max(s);
        }
        worst
    }
}

/// Complex coefficient vector over |k,m>, m = 0..=m_max, normalized to unit
/// norm with its guard-row tail weight recorded.
#[derive(Clone, Debug)]
pub struct StateVec {
    coeffs: Array1<Complex64>,
    k: f64,
    tail_weight: f64,
}

impl StateVec {
    /// Normalize `coeffs` and verify the tail budget over the guard rows.
    pub fn new(coeffs: Array1<Complex64>, k: f64, tail_tol: f64) -> Result<StateVec> {
        let m_max = coeffs.len().checked_sub(1).ok_or_else(|| {
            Error::Dimension("state vector must have at least one coefficient".into())
        })?;
        let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        let norm = norm_sq.sqrt();
        let coeffs = coeffs.mapv(|c| c / norm);
        let guard = guard_rows(m_max).min(coeffs.len());
        let tail_weight: f64 = coeffs
            .iter()
            .skip(coeffs.len() - guard)
            .map(|c| c.norm_sqr())
            .sum();
        if tail_weight >= tail_tol {
            return Err(Error::Truncation {
                tail_weight,
                tolerance: tail_tol,
                m_max,
            });
        }
        Ok(StateVec {
            coeffs,
            k,
            tail_weight,
        })
    }

    pub fn coeffs(&self) -> &Array1<Complex64> {
        &self.coeffs
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn m_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product <self|other>.
    pub fn overlap(&self, other: &StateVec) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "overlap between states of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{expm_multiply, iterated_commutator};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Worst interior entry of `a - b`, scaled by 1 + |p| + |q| entrywise
    /// where p, q are the products whose cancellation formed `a`.
    fn scaled_residual(
        a: &Array2<Complex64>,
        b: &Array2<Complex64>,
        scale: &Array2<Complex64>,
        interior: usize,
    ) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..interior {
            for j in 0..interior {
                let r = (a[[i, j]] - b[[i, j]]).norm() / (1.0 + scale[[i, j]].norm());
                worst = worst.max(r);
            }
        }
        worst
    }

    #[test]
    fn spectrum_and_ladder_entries() {
        let rep = FockRep::build(1.25, 64).unwrap();
        assert_eq!(rep.k3()[[0, 0]], c(1.25, 0.0));
        assert_eq!(rep.k3()[[5, 5]], c(6.25, 0.0));
        // K+ entry (1,0) = sqrt(2k)
        assert!((rep.k_plus()[[1, 0]] - c(2.5f64.sqrt(), 0.0)).norm() < 1e-15);
        // lowest weight annihilated by K-
        for i in 0..rep.dim() {
            assert_eq!(rep.k_minus()[[i, 0]], c(0.0, 0.0));
        }
    }

    #[test]
    fn commutation_relations_on_interior() {
        for &k in &[0.6, 0.75, 1.25, 5.0, 40.0] {
            for &m_max in &[32usize, 128] {
                let rep = FockRep::build(k, m_max).unwrap();
                let interior = rep.interior_dim();
                // [K3, K+] = K+
                let c1 = iterated_commutator(rep.k3(), rep.k_plus(), 1).unwrap();
                let scale = rep.k3().dot(rep.k_plus());
                assert!(
                    scaled_residual(&c1, rep.k_plus(), &scale, interior) < 1e-13,
                    "k = {k}, m_max = {m_max}"
                );
                // [K+, K-] = -2 K3
                let c2 = iterated_commutator(rep.k_plus(), rep.k_minus(), 1).unwrap();
                let neg2k3 = rep.k3() * c(-2.0, 0.0);
                let scale = rep.k_plus().dot(rep.k_minus());
                assert!(scaled_residual(&c2, &neg2k3, &scale, interior) < 1e-13);
            }
        }
    }

    #[test]
    fn hermiticity() {
        let rep = FockRep::build(0.75, 48).unwrap();
        for g in [rep.k1(), rep.k2(), rep.k3()] {
            for i in 0..rep.dim() {
                for j in 0..rep.dim() {
                    assert!((g[[i, j]] - g[[j, i]].conj()).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn casimir_interior_value() {
        let rep = FockRep::build(1.25, 64).unwrap();
        let cas = rep.casimir();
        let interior = rep.interior_dim();
        for i in 0..interior {
            assert!((cas[[i, i]] - c(0.3125, 0.0)).norm() < 1e-12 * (1.0 + cas[[i, i]].norm()));
            for j in 0..interior {
                if i != j {
                    assert!(cas[[i, j]].norm() < 1e-12);
                }
            }
        }
        // [C, K+] = 0 on the interior
        let comm = iterated_commutator(&cas, rep.k_plus(), 1).unwrap();
        let scale = cas.dot(rep.k_plus());
        let zero = Array2::<Complex64>::zeros(comm.raw_dim());
        assert!(scaled_residual(&comm, &zero, &scale, interior) < 1e-12);
    }

    #[test]
    fn build_rejects_bad_arguments() {
        assert!(FockRep::build(0.0, 32).is_err());
        assert!(FockRep::build(-1.0, 32).is_err());
        assert!(FockRep::build(1.0, 4).is_err());
        assert!(FockRep::build(1.0, M_MAX_CAP + 1).is_err());
    }

    #[test]
    fn tridiag_matches_dense_contraction() {
        let rep = FockRep::build(0.9, 32).unwrap();
        let coeffs = [c(0.3, 0.1), c(-0.2, 0.7), c(1.1, -0.4)];
        let dense = rep.contract(coeffs);
        let tri = TriDiagOp::generator_combo(rep.k(), rep.dim(), coeffs);
        let mut v = Array1::<Complex64>::zeros(rep.dim());
        for (i, x) in v.iter_mut().enumerate() {
            *x = c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos());
        }
        let a = dense.dot(&v);
        let b = tri.apply(&v);
        for i in 0..rep.dim() {
            assert!((a[i] - b[i]).norm() < 1e-12);
        }
        // exponential through the banded path agrees with the dense one
        let ea = expm_multiply(&dense, &v, 1e-14).unwrap();
        let eb = expm_multiply(&tri, &v, 1e-14).unwrap();
        let scale = ea.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for i in 0..rep.dim() {
            assert!((ea[i] - eb[i]).norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn statevec_normalizes_and_checks_tail() {
        let mut coeffs = Array1::<Complex64>::zeros(33);
        coeffs[0] = c(3.0, 0.0);
        coeffs[1] = c(0.0, 4.0);
        let sv = StateVec::new(coeffs, 1.25, DEFAULT_TAIL_TOL).unwrap();
        assert!((sv.norm() - 1.0).abs() < 1e-15);
        assert_eq!(sv.tail_weight(), 0.0);

        // all weight in the top row violates any tail budget
        let mut bad = Array1::<Complex64>::zeros(33);
        bad[32] = c(1.0, 0.0);
        match StateVec::new(bad, 1.25, DEFAULT_TAIL_TOL) {
            Err(Error::Truncation { tail_weight, .. }) => assert!((tail_weight - 1.0).abs() < 1e-15),
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }
}
