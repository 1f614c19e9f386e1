//! Metric-aware 3-vector algebra and the finite su(1,1) adjoint action.
//!
//! Conventions: the metric is eta = diag(1, 1, -1) and the totally
//! antisymmetric tensor has eps^{123} = +1. A [`Vec3M`] stores a plain
//! component triple; raising or lowering an index is the explicit operation
//! of flipping the sign of the third component. Boost/rotation matrices
//! M^i_j carry the row index up and the column index down, so row 3 of a
//! boost matrix is directly the covariant polarization triple of the
//! coherent state it generates.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockrep::FockRep;

const UNIT_TOL: f64 = 1e-12;

/// Maximum supported order for iterated commutators.
pub const MAX_COMMUTATOR_ORDER: usize = 64;

/// Real 3-vector under the (+, +, -) metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3M {
    c: [f64; 3],
}

impl Vec3M {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c: [c1, c2, c3] }
    }

    pub fn components(&self) -> [f64; 3] {
        self.c
    }

    /// Minkowski inner product a.b = a1 b1 + a2 b2 - a3 b3.
    pub fn minkowski_dot(&self, other: &Vec3M) -> f64 {
        self.c[0] * other.c[0] + self.c[1] * other.c[1] - self.c[2] * other.c[2]
    }

    pub fn minkowski_norm(&self) -> f64 {
        self.minkowski_dot(self)
    }

    /// Flip the sign of the third component (explicit index lowering or
    /// raising; the two are the same operation for a diagonal +/-1 metric).
    pub fn lower(&self) -> Vec3M {
        Vec3M::new(self.c[0], self.c[1], -self.c[2])
    }

    pub fn scale(&self, f: f64) -> Vec3M {
        Vec3M::new(f * self.c[0], f * self.c[1], f * self.c[2])
    }

    pub fn sub(&self, other: &Vec3M) -> Vec3M {
        Vec3M::new(
            self.c[0] - other.c[0],
            self.c[1] - other.c[1],
            self.c[2] - other.c[2],
        )
    }

    pub fn max_abs_diff(&self, other: &Vec3M) -> f64 {
        self.c
            .iter()
            .zip(other.c.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Spacelike unit vector: rejects |v.v - 1| > 1e-12.
    pub fn spacelike_unit(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let v = Vec3M::new(c1, c2, c3);
        if (v.minkowski_norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!(
                "not a spacelike unit vector: v.v = {}",
                v.minkowski_norm()
            )));
        }
        Ok(v)
    }

    /// Timelike unit vector: rejects |v.v + 1| > 1e-12.
    pub fn timelike_unit(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let v = Vec3M::new(c1, c2, c3);
        if (v.minkowski_norm() + 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!(
                "not a timelike unit vector: v.v = {}",
                v.minkowski_norm()
            )));
        }
        Ok(v)
    }
}

impl std::ops::Index<usize> for Vec3M {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.c[i]
    }
}

#[inline]
fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Totally antisymmetric eps^{ijk} with eps^{123} = +1 (0-based indices).
fn epsilon_upper(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Mixed tensor eps^i_j^k = eps^{ilk} eta_{lj}; for the diagonal metric the
/// contraction picks l = j and multiplies by eta_{jj}.
fn epsilon_mixed(i: usize, j: usize, k: usize) -> f64 {
    let eta = [1.0, 1.0, -1.0];
    epsilon_upper(i, j, k) * eta[j]
}

/// Axis character of a finite transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisKind {
    Spacelike,
    Timelike,
}

/// 3x3 real O(2,1) matrix M(tau, n): the adjoint action of the finite group
/// element exp(i tau n_i K^i) on the generator triple.
#[derive(Clone, Debug)]
pub struct BoostMatrix {
    entries: [[f64; 3]; 3],
    pub kind: AxisKind,
    pub tau: f64,
    pub axis: Vec3M,
}

impl BoostMatrix {
    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.entries
    }

    /// Row i as a coefficient triple (M^i_j over the column index j); for
    /// i = 2 this is the covariant polarization triple s_j of the coherent
    /// state generated by this transformation.
    pub fn row(&self, i: usize) -> Vec3M {
        Vec3M::new(self.entries[i][0], self.entries[i][1], self.entries[i][2])
    }

    /// Apply to an upper-index vector: (M v)^i = M^i_j v^j.
    pub fn apply(&self, v: &Vec3M) -> Vec3M {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..3 {
                *o += self.entries[i][j] * v[j];
            }
        }
        Vec3M::new(out[0], out[1], out[2])
    }

    /// Inverse transformation: M(-tau, n) = M(tau, -n) = M(tau, n)^(-1).
    pub fn inverse(&self) -> BoostMatrix {
        boost_matrix(-self.tau, &self.axis).expect("axis already validated")
    }

    pub fn det(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Worst entry of M eta M^T - eta; zero for exact pseudoorthogonality.
    pub fn pseudo_orthogonality_defect(&self) -> f64 {
        let m = &self.entries;
        let eta = [1.0, 1.0, -1.0];
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                for (l, e) in eta.iter().enumerate() {
                    v += m[i][l] * e * m[j][l];
                }
                let target = if i == j { eta[i] } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// Plain 3x3 matrix product with another transformation.
    pub fn compose_entries(&self, other: &BoostMatrix) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                for l in 0..3 {
                    *v += self.entries[i][l] * other.entries[l][j];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &[[f64; 3]; 3]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.entries[i][j] - other[i][j]).abs());
            }
        }
        worst
    }
}

/// Finite adjoint-action matrix M(tau, n) for a spacelike or timelike unit
/// axis n (upper-index components).
///
/// Spacelike: M^i_j = n^i n_j + (delta^i_j - n^i n_j) cosh tau
///                    - eps^i_j^k n_k sinh tau.
/// Timelike:  M^i_j = -n^i n_j + (delta^i_j + n^i n_j) cos tau
///                    - eps^i_j^k n_k sin tau.
pub fn boost_matrix(tau: f64, n: &Vec3M) -> Result<BoostMatrix> {
    let nn = n.minkowski_norm();
    let kind = if (nn - 1.0).abs() <= UNIT_TOL {
        AxisKind::Spacelike
    } else if (nn + 1.0).abs() <= UNIT_TOL {
        AxisKind::Timelike
    } else {
        return Err(Error::Domain(format!(
            "boost axis must be a unit spacelike or timelike vector, got n.n = {nn}"
        )));
    };
    let nl = n.lower();
    let mut entries = [[0.0; 3]; 3];
    match kind {
        AxisKind::Spacelike => {
            let (ch, sh) = (tau.cosh(), tau.sinh());
            for (i, row) in entries.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    let nij = n[i] * nl[j];
                    let mut v = nij + (delta(i, j) - nij) * ch;
                    for k in 0..3 {
                        v -= epsilon_mixed(i, j, k) * nl[k] * sh;
                    }
                    *e = v;
                }
            }
        }
        AxisKind::Timelike => {
            let (cs, sn) = (tau.cos(), tau.sin());
            for (i, row) in entries.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    let nij = n[i] * nl[j];
                    let mut v = -nij + (delta(i, j) + nij) * cs;
                    for k in 0..3 {
                        v -= epsilon_mixed(i, j, k) * nl[k] * sn;
                    }
                    *e = v;
                }
            }
        }
    }
    Ok(BoostMatrix {
        entries,
        kind,
        tau,
        axis: *n,
    })
}

// ---------------------------------------------------------------------------
// dense complex matrix helpers
// ---------------------------------------------------------------------------

fn check_square_same(x: &Array2<Complex64>, y: &Array2<Complex64>) -> Result<()> {
    if x.nrows() != x.ncols() || y.nrows() != y.ncols() || x.nrows() != y.nrows() {
        return Err(Error::Dimension(format!(
            "expected equal square matrices, got {}x{} and {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    Ok(())
}

/// [X, Y] = XY - YX.
pub fn commutator(x: &Array2<Complex64>, y: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    check_square_same(x, y)?;
    Ok(x.dot(y) - y.dot(x))
}

/// Iterated commutator [X, Y]_m with [X, Y]_0 = Y and
/// [X, Y]_m = [X, [X, Y]_{m-1}].
pub fn iterated_commutator(
    x: &Array2<Complex64>,
    y: &Array2<Complex64>,
    m: usize,
) -> Result<Array2<Complex64>> {
    check_square_same(x, y)?;
    if m > MAX_COMMUTATOR_ORDER {
        return Err(Error::Domain(format!(
            "iterated commutator order {m} above the supported bound {MAX_COMMUTATOR_ORDER}"
        )));
    }
    let mut acc = y.clone();
    for _ in 0..m {
        acc = x.dot(&acc) - acc.dot(x);
    }
    Ok(acc)
}

/// Transformed generator triple of the adjoint action,
/// Ktilde^i = M^i_j K^j, as dense matrices on the truncated space.
pub fn adjoint_action(m: &BoostMatrix, rep: &FockRep) -> [Array2<Complex64>; 3] {
    let gens = [rep.k1(), rep.k2(), rep.k3()];
    let dim = rep.dim();
    let mut out: [Array2<Complex64>; 3] = [
        Array2::zeros((dim, dim)),
        Array2::zeros((dim, dim)),
        Array2::zeros((dim, dim)),
    ];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, g) in gens.iter().enumerate() {
            let c = Complex64::new(m.entries()[i][j], 0.0);
            o.scaled_add(c, g);
        }
    }
    out
}

/// Maximum column sum of absolute values (the induced 1-norm).
pub fn one_norm(a: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        let mut s = 0.0;
        for i in 0..a.nrows() {
            s += a[[i, j]].norm();
        }
        worst = worst.max(s);
    }
    worst
}

pub fn identity(n: usize) -> Array2<Complex64> {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

// LU decomposition with partial pivoting, solving A X = B in place.
fn lu_solve(mut a: Array2<Complex64>, mut b: Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::Dimension("lu_solve requires square A and matching B".into()));
    }
    let m = b.ncols();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[[col, col]].norm();
        for r in col + 1..n {
            let v = a[[r, col]].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return Err(Error::Domain("singular matrix in lu_solve".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap([col, j], [piv, j]);
            }
            for j in 0..m {
                b.swap([col, j], [piv, j]);
            }
        }
        let d = a[[col, col]];
        for r in col + 1..n {
            let f = a[[r, col]] / d;
            if f.norm() == 0.0 {
                continue;
            }
            a[[r, col]] = f;
            for j in col + 1..n {
                let v = a[[col, j]];
                a[[r, j]] -= f * v;
            }
            for j in 0..m {
                let v = b[[col, j]];
                b[[r, j]] -= f * v;
            }
        }
    }
    // back substitution
    for col in (0..n).rev() {
        let d = a[[col, col]];
        for j in 0..m {
            b[[col, j]] /= d;
        }
        for r in 0..col {
            let f = a[[r, col]];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..m {
                let v = b[[col, j]];
                b[[r, j]] -= f * v;
            }
        }
    }
    Ok(b)
}

// Pade(13) coefficients for the matrix exponential, Higham (2005).
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const PADE13_THETA: f64 = 5.371_920_351_148_152;

/// Dense matrix exponential by scaling-and-squaring with the Pade(13)
/// approximant (Higham 2005).
pub fn matrix_exp(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension("matrix_exp requires a square matrix".into()));
    }
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    let norm = one_norm(a);
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(s as i32), 0.0);
    let a1 = a * scale;
    let a2 = a1.dot(&a1);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let id = identity(n);

    let b = |i: usize| Complex64::new(PADE13[i], 0.0);
    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = a1.dot(&(a6.dot(&u_inner) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1)));
    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&v_inner) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let mut r = lu_solve(&v - &u, &v + &u)?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Operators that can act on a complex vector; lets the scaled-Taylor
/// exponential run on dense matrices and banded generator combinations alike.
pub trait ApplyOp {
    fn dim(&self) -> usize;
    fn apply(&self, v: &Array1<Complex64>) -> Array1<Complex64>;
    fn op_one_norm(&self) -> f64;
}

impl ApplyOp for Array2<Complex64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        self.dot(v)
    }
    fn op_one_norm(&self) -> f64 {
        one_norm(self)
    }
}

const EXPMV_THETA: f64 = 5.0;
const EXPMV_MAX_TERMS: usize = 60;

/// exp(op) applied to a vector by repeated scaled Taylor applications:
/// the operator is split as op = 2^s B with |B| <= theta and exp(B) is
/// applied 2^s times through its truncated Taylor series.
pub fn expm_multiply(op: &impl ApplyOp, v: &Array1<Complex64>, tol: f64) -> Result<Array1<Complex64>> {
    if op.dim() != v.len() {
        return Err(Error::Dimension(format!(
            "operator dimension {} does not match vector length {}",
            op.dim(),
            v.len()
        )));
    }
    let norm = op.op_one_norm();
    let s: u32 = if norm > EXPMV_THETA {
        (norm / EXPMV_THETA).log2().ceil() as u32
    } else {
        0
    };
    let scale = (0.5f64).powi(s as i32);
    let reps = 1u64 << s;
    let mut w = v.clone();
    for _ in 0..reps {
        let mut acc = w.clone();
        let mut term = w;
        for j in 1..=EXPMV_MAX_TERMS {
            term = op.apply(&term);
            let f = Complex64::new(scale / j as f64, 0.0);
            term.mapv_inplace(|t| t * f);
            acc += &term;
            let tn = term.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let an = acc.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if tn <= tol * an.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        w = acc;
    }
    Ok(w)
}
