//! Coherent states of the discrete series: the group-generated family
//! (including the Perelomov-Gilmore states), the Barut-Girardello
//! lowering-operator eigenstates, and generic analytic-series states, plus
//! expectation-value and variance evaluation on the truncated space.
//!
//! Polarization vectors are stored as the covariant coefficient triple
//! (row 3 of the generating boost matrix), so the eigen-relation reads
//! literally s[0] K1 + s[1] K2 + s[2] K3 acting on the state with eigenvalue
//! k, and the third component satisfies s[2] >= 1.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::algebra::{boost_matrix, expm_multiply, ApplyOp, BoostMatrix, Vec3M};
use crate::error::{Error, Result};
use crate::fockrep::{FockRep, StateVec, TriDiagOp, DEFAULT_TAIL_TOL, M_MAX_CAP};
use crate::specialfn::ln_gamma_raw;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

// Group-generated states are built by exponentiating the truncated
// generators, whose boundary corruption leaks slightly into the interior;
// a tighter tail budget than the default keeps that leakage below the
// 1e-8 matching tolerances.
const GROUP_STATE_TAIL_TOL: f64 = 1e-15;

/// Perelomov-Gilmore coherent state |Phi(z)|, |z| < 1.
#[derive(Clone)]
pub struct PGState {
    pub z: Complex64,
    pub k: f64,
    /// Rapidity of the generating transformation, tau = 2 artanh |z|.
    pub tau: f64,
    /// Azimuth of the generating axis, phi = arg z.
    pub phi: f64,
    /// Disentangling parameter 2 ln cosh(tau/2).
    pub eta: f64,
    /// Covariant polarization triple (2 Re z, 2 Im z, 1+|z|^2)/(1-|z|^2).
    pub s: Vec3M,
    state: StateVec,
    boost: BoostMatrix,
    rep: FockRep,
}

impl PGState {
    pub fn state(&self) -> &StateVec {
        &self.state
    }

    pub fn rep(&self) -> &FockRep {
        &self.rep
    }

    /// Adjoint-action matrix of the generating group element.
    pub fn boost(&self) -> &BoostMatrix {
        &self.boost
    }

    /// Residual of the defining eigen-relation |(s_i K^i - k) psi|.
    pub fn eigen_residual(&self) -> f64 {
        polarization_residual(&self.s, self.k, &self.state)
    }
}

/// Barut-Girardello coherent state |Psi(w)>, the K^- eigenstate.
#[derive(Clone)]
pub struct BGState {
    pub w: Complex64,
    pub k: f64,
    /// Normalization N(w, k) = (sum_m |w|^{2m} / (m! Gamma(2k+m)))^{-1/2}.
    pub normalization: f64,
    state: StateVec,
    rep: FockRep,
}

impl BGState {
    pub fn state(&self) -> &StateVec {
        &self.state
    }

    pub fn rep(&self) -> &FockRep {
        &self.rep
    }

    /// Residual |K^- psi - w psi|.
    pub fn eigen_residual(&self) -> f64 {
        let op = TriDiagOp::generator_combo(self.k, self.state.dim(), [ONE, -I, Complex64::ZERO]);
        let applied = op.apply(self.state.coeffs());
        (&applied - &(self.state.coeffs() * self.w))
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Group-generated coherent state exp(i tau n_i K^i) |k,0>.
#[derive(Clone)]
pub struct GroupState {
    pub k: f64,
    pub tau: f64,
    /// Generating axis (upper-index components).
    pub axis: Vec3M,
    /// Covariant polarization triple, row 3 of the boost matrix.
    pub s: Vec3M,
    state: StateVec,
    boost: BoostMatrix,
    rep: FockRep,
}

impl GroupState {
    pub fn state(&self) -> &StateVec {
        &self.state
    }

    pub fn rep(&self) -> &FockRep {
        &self.rep
    }

    pub fn boost(&self) -> &BoostMatrix {
        &self.boost
    }

    pub fn eigen_residual(&self) -> f64 {
        polarization_residual(&self.s, self.k, &self.state)
    }
}

/// Analytic-series state M(z) sum_m c_m z^m |k,m>.
#[derive(Clone)]
pub struct SeriesState {
    /// Coefficients c_m as supplied, materialized up to the truncation.
    pub coefficients: Vec<Complex64>,
    pub z: Complex64,
    pub k: f64,
    /// Normalization M(z) = (sum |c_m|^2 |z|^{2m})^{-1/2}.
    pub normalization: f64,
    /// f(|z|) = sum_m conj(c_m) c_{m-1} sqrt(m(2k-1+m)) |z|^{2m-1}, evaluated
    /// with unit-normalized coefficients so that <K^+> = (conj(z)/|z|) f.
    pub f_value: Complex64,
    state: StateVec,
    rep: FockRep,
}

impl SeriesState {
    pub fn state(&self) -> &StateVec {
        &self.state
    }

    pub fn rep(&self) -> &FockRep {
        &self.rep
    }
}

/// Borrowed view over any of the coherent-state families; lets operations
/// accept all of them and reject what they cannot handle with a typed error.
#[derive(Clone, Copy)]
pub enum CoherentRef<'a> {
    Pg(&'a PGState),
    Group(&'a GroupState),
    Bg(&'a BGState),
}

impl<'a> From<&'a PGState> for CoherentRef<'a> {
    fn from(s: &'a PGState) -> Self {
        CoherentRef::Pg(s)
    }
}

impl<'a> From<&'a GroupState> for CoherentRef<'a> {
    fn from(s: &'a GroupState) -> Self {
        CoherentRef::Group(s)
    }
}

impl<'a> From<&'a BGState> for CoherentRef<'a> {
    fn from(s: &'a BGState) -> Self {
        CoherentRef::Bg(s)
    }
}

impl<'a> CoherentRef<'a> {
    pub fn k(&self) -> f64 {
        match self {
            CoherentRef::Pg(s) => s.k,
            CoherentRef::Group(s) => s.k,
            CoherentRef::Bg(s) => s.k,
        }
    }

    pub fn state(&self) -> &'a StateVec {
        match self {
            CoherentRef::Pg(s) => &s.state,
            CoherentRef::Group(s) => &s.state,
            CoherentRef::Bg(s) => &s.state,
        }
    }

    pub fn rep(&self) -> &'a FockRep {
        match self {
            CoherentRef::Pg(s) => &s.rep,
            CoherentRef::Group(s) => &s.rep,
            CoherentRef::Bg(s) => &s.rep,
        }
    }

    /// Boost matrix of the generating group element; `None` for
    /// Barut-Girardello states, which are not group-generated.
    pub fn boost(&self) -> Option<&'a BoostMatrix> {
        match self {
            CoherentRef::Pg(s) => Some(&s.boost),
            CoherentRef::Group(s) => Some(&s.boost),
            CoherentRef::Bg(_) => None,
        }
    }

    /// Rebuild the same state on a space truncated at `m_max`; errors with
    /// the group-generation contract violation for Barut-Girardello input.
    pub fn rebuild_group(&self, m_max: usize) -> Result<(StateVec, FockRep)> {
        match self {
            CoherentRef::Pg(s) => {
                let rep = FockRep::build(s.k, m_max)?;
                let st = pg_state(s.z, &rep)?;
                Ok((st.state, st.rep))
            }
            CoherentRef::Group(s) => {
                let rep = FockRep::build(s.k, m_max)?;
                let st = general_cs(s.tau, &s.axis, &rep)?;
                Ok((st.state, st.rep))
            }
            CoherentRef::Bg(_) => Err(Error::BarutGirardelloExpansion),
        }
    }
}

/// Residual |(s[0] K1 + s[1] K2 + s[2] K3 - k) psi| with literal coefficients.
fn polarization_residual(s: &Vec3M, k: f64, state: &StateVec) -> f64 {
    let op = TriDiagOp::generator_combo(
        k,
        state.dim(),
        [
            Complex64::new(s[0], 0.0),
            Complex64::new(s[1], 0.0),
            Complex64::new(s[2], 0.0),
        ],
    );
    let applied = op.apply(state.coeffs());
    (&applied - &(state.coeffs() * Complex64::new(k, 0.0)))
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Double m_max until the constructed coefficients satisfy the tail budget.
fn escalate_state<F>(k: f64, start_m_max: usize, tail_tol: f64, build: F) -> Result<(StateVec, usize)>
where
    F: Fn(usize) -> Result<Array1<Complex64>>,
{
    let mut m_max = start_m_max.clamp(8, M_MAX_CAP);
    loop {
        let coeffs = build(m_max)?;
        match StateVec::new(coeffs, k, tail_tol) {
            Ok(sv) => return Ok((sv, m_max)),
            Err(Error::Truncation { .. }) if m_max < M_MAX_CAP => {
                m_max = (m_max * 2).min(M_MAX_CAP);
            }
            Err(e) => return Err(e),
        }
    }
}

fn rep_at(k: f64, m_max: usize, rep: &FockRep) -> Result<FockRep> {
    if m_max == rep.m_max() {
        Ok(rep.clone())
    } else {
        FockRep::build(k, m_max)
    }
}

/// Perelomov-Gilmore coherent state for |z| < 1.
///
/// Coefficients proportional to sqrt(Gamma(2k+m)/(m! Gamma(2k))) (-conj(z))^m;
/// the analytic prefactor (1-|z|^2)^k is absorbed by the normalization.
pub fn pg_state(z: Complex64, rep: &FockRep) -> Result<PGState> {
    let r = z.norm();
    if !(r < 1.0 - 1e-6) {
        return Err(Error::Domain(format!(
            "pg_state requires |z| < 1 - 1e-6 (the coefficient series diverges on the unit circle), got |z| = {r}"
        )));
    }
    let k = rep.k();
    let build = |m_max: usize| -> Result<Array1<Complex64>> {
        let mut coeffs = Array1::<Complex64>::zeros(m_max + 1);
        let mut d = ONE;
        coeffs[0] = d;
        for m in 0..m_max {
            let mf = m as f64;
            d *= -z.conj() * ((2.0 * k + mf) / (mf + 1.0)).sqrt();
            coeffs[m + 1] = d;
        }
        Ok(coeffs)
    };
    let (state, m_max) = escalate_state(k, rep.m_max(), DEFAULT_TAIL_TOL, build)?;
    let rep = rep_at(k, m_max, rep)?;

    let denom = 1.0 - r * r;
    let s = Vec3M::new(2.0 * z.re / denom, 2.0 * z.im / denom, (1.0 + r * r) / denom);
    let tau = 2.0 * r.atanh();
    let phi = if r == 0.0 { 0.0 } else { z.arg() };
    let eta = -(-r * r).ln_1p(); // 2 ln cosh(tau/2)
    let axis = Vec3M::new(phi.sin(), -phi.cos(), 0.0);
    let boost = boost_matrix(tau, &axis)?;
    Ok(PGState {
        z,
        k,
        tau,
        phi,
        eta,
        s,
        state,
        boost,
        rep,
    })
}

/// Barut-Girardello coherent state: the normalized K^- eigenstate with
/// eigenvalue w, coefficients proportional to w^m / sqrt(m! Gamma(2k+m)).
pub fn bg_state(w: Complex64, rep: &FockRep) -> Result<BGState> {
    if !w.is_finite() {
        return Err(Error::Domain("bg_state requires finite w".into()));
    }
    let k = rep.k();
    let build = |m_max: usize| -> Result<Array1<Complex64>> {
        let mut coeffs = Array1::<Complex64>::zeros(m_max + 1);
        let mut d = ONE;
        coeffs[0] = d;
        for m in 0..m_max {
            let mf = m as f64;
            d *= w / ((mf + 1.0) * (2.0 * k + mf)).sqrt();
            coeffs[m + 1] = d;
        }
        Ok(coeffs)
    };
    let (state, m_max) = escalate_state(k, rep.m_max(), DEFAULT_TAIL_TOL, build)?;
    let rep = rep_at(k, m_max, rep)?;

    // The unnormalized weights carry a Gamma(2k) relative to the defining
    // c_m = w^m / sqrt(m! Gamma(2k+m)): sum |c|^2 = sum |d|^2 / Gamma(2k).
    let sum_d: f64 = {
        let mut d = 1.0f64;
        let mut s = 1.0f64;
        let aw = w.norm_sqr();
        for m in 0..m_max {
            let mf = m as f64;
            d *= aw / ((mf + 1.0) * (2.0 * k + mf));
            s += d;
        }
        s
    };
    let normalization = (0.5 * (ln_gamma_raw(2.0 * k) - sum_d.ln())).exp();
    Ok(BGState {
        w,
        k,
        normalization,
        state,
        rep,
    })
}

/// Group-generated coherent state exp(i tau n_i K^i) |k,0> for a spacelike
/// or timelike unit axis n; the exponential is applied through the banded
/// generator contraction with tail-controlled truncation.
pub fn general_cs(tau: f64, n: &Vec3M, rep: &FockRep) -> Result<GroupState> {
    let boost = boost_matrix(tau, n)?; // validates the axis
    let k = rep.k();
    let nl = n.lower();
    let build = |m_max: usize| -> Result<Array1<Complex64>> {
        let dim = m_max + 1;
        let c = [
            I * Complex64::new(tau * nl[0], 0.0),
            I * Complex64::new(tau * nl[1], 0.0),
            I * Complex64::new(tau * nl[2], 0.0),
        ];
        let op = TriDiagOp::generator_combo(k, dim, c);
        let mut e0 = Array1::<Complex64>::zeros(dim);
        e0[0] = ONE;
        expm_multiply(&op, &e0, 1e-16)
    };
    let (state, m_max) = escalate_state(k, rep.m_max(), GROUP_STATE_TAIL_TOL, build)?;
    let rep = rep_at(k, m_max, rep)?;
    let s = boost.row(2);
    Ok(GroupState {
        k,
        tau,
        axis: *n,
        s,
        state,
        boost,
        rep,
    })
}

/// Analytic-series state with caller-supplied coefficients c_m.
///
/// The normalization series sum |c_m|^2 |z|^{2m} must converge at the
/// supplied |z| (trailing-ratio test); divergence is a domain error.
pub fn series_state(
    c: &dyn Fn(usize) -> Complex64,
    z: Complex64,
    rep: &FockRep,
) -> Result<SeriesState> {
    let k = rep.k();
    let materialize = |m_max: usize| -> Array1<Complex64> {
        let mut coeffs = Array1::<Complex64>::zeros(m_max + 1);
        let mut zp = ONE;
        for m in 0..=m_max {
            coeffs[m] = c(m) * zp;
            zp *= z;
        }
        coeffs
    };

    let diverging = |coeffs: &Array1<Complex64>| -> bool {
        // trailing-ratio test on the weights over the last quarter
        let n = coeffs.len();
        let start = (3 * n) / 4;
        let mut grows = 0usize;
        let mut total = 0usize;
        for m in start..n - 1 {
            let a = coeffs[m].norm_sqr();
            let b = coeffs[m + 1].norm_sqr();
            if a > 0.0 {
                total += 1;
                if b >= a {
                    grows += 1;
                }
            }
        }
        total > 0 && grows * 2 > total
    };

    let mut m_max = rep.m_max().clamp(8, M_MAX_CAP);
    let (state, m_max) = loop {
        let coeffs = materialize(m_max);
        match StateVec::new(coeffs.clone(), k, DEFAULT_TAIL_TOL) {
            Ok(sv) => break (sv, m_max),
            Err(Error::Truncation { .. }) => {
                if diverging(&coeffs) || m_max >= M_MAX_CAP {
                    return Err(Error::DivergentNormalization { z_abs: z.norm() });
                }
                m_max = (m_max * 2).min(M_MAX_CAP);
            }
            Err(e) => return Err(e),
        }
    };
    let rep = rep_at(k, m_max, rep)?;

    let coefficients: Vec<Complex64> = (0..=m_max).map(c).collect();
    let raw = materialize(m_max);
    let sum_d: f64 = raw.iter().map(|x| x.norm_sqr()).sum();
    let normalization = 1.0 / sum_d.sqrt();

    // f from unit-normalized coefficients; terms below 1e-16 of the running
    // sum are dropped (geometric decay inside the radius of convergence).
    let f_value = if z.norm() == 0.0 {
        Complex64::ZERO
    } else {
        let phase = z / z.norm();
        let mut f = Complex64::ZERO;
        for m in 1..=m_max {
            let mf = m as f64;
            let term = raw[m].conj() * raw[m - 1] * (mf * (2.0 * k - 1.0 + mf)).sqrt();
            f += term;
            if term.norm() < 1e-16 * f.norm() && m > 8 {
                break;
            }
        }
        f * phase / sum_d
    };

    Ok(SeriesState {
        coefficients,
        z,
        k,
        normalization,
        f_value,
        state,
        rep,
    })
}

/// Expectation value <psi| op |psi>.
pub fn expval(state: &StateVec, op: &Array2<Complex64>) -> Result<Complex64> {
    if op.nrows() != state.dim() || op.ncols() != state.dim() {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but the state has dimension {}",
            op.nrows(),
            op.ncols(),
            state.dim()
        )));
    }
    let applied = op.dot(state.coeffs());
    Ok(state
        .coeffs()
        .iter()
        .zip(applied.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

fn hermiticity_defect(op: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..op.nrows() {
        for j in i..op.ncols() {
            let d = (op[[i, j]] - op[[j, i]].conj()).norm() / (1.0 + op[[i, j]].norm());
            worst = worst.max(d);
        }
    }
    worst
}

/// Variance <A^2> - <A>^2 of a hermitian operator; the second moment is
/// evaluated as |A psi|^2 so no matrix product is formed.
pub fn variance(state: &StateVec, op: &Array2<Complex64>) -> Result<f64> {
    if op.nrows() != state.dim() || op.ncols() != state.dim() {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but the state has dimension {}",
            op.nrows(),
            op.ncols(),
            state.dim()
        )));
    }
    if hermiticity_defect(op) > 1e-10 {
        return Err(Error::Domain("variance requires a hermitian operator".into()));
    }
    let applied = op.dot(state.coeffs());
    let mean: Complex64 = state
        .coeffs()
        .iter()
        .zip(applied.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    let second: f64 = applied.iter().map(|c| c.norm_sqr()).sum();
    Ok((second - mean.re * mean.re).max(0.0))
}

/// Result of scanning the timelike hyperboloid for an eigen-relation.
#[derive(Clone, Copy, Debug)]
pub struct TimelikeScan {
    pub min_variance: f64,
    pub argmin: Vec3M,
}

/// Minimum of Var(t_i K^i) over a grid of real timelike unit vectors
/// t = (sinh r cos a, sinh r sin a, cosh r), r <= rapidity_max.
///
/// A strictly positive minimum witnesses that the Barut-Girardello state
/// satisfies no real timelike eigen-relation. The lowest-weight case w = 0
/// is a genuine timelike eigenstate (of K3), so small |w| is excluded.
pub fn no_real_timelike_eigen_check(
    bg: &BGState,
    rapidity_max: f64,
    n_rapidity: usize,
    n_angle: usize,
) -> Result<TimelikeScan> {
    if bg.w.norm() <= 0.1 {
        return Err(Error::Domain(
            "timelike scan requires |w| > 0.1; the w = 0 state is a K3 eigenstate".into(),
        ));
    }
    if rapidity_max < 3.0 {
        return Err(Error::Domain(
            "grid must cover the hyperboloid up to rapidity 3".into(),
        ));
    }
    if n_rapidity < 2 || n_angle < 4 {
        return Err(Error::Domain("timelike scan grid too coarse".into()));
    }
    let state = bg.state();
    let mut best = f64::INFINITY;
    let mut arg = Vec3M::new(0.0, 0.0, 1.0);
    for ir in 0..n_rapidity {
        let r = rapidity_max * ir as f64 / (n_rapidity - 1) as f64;
        for ia in 0..n_angle {
            let a = 2.0 * std::f64::consts::PI * ia as f64 / n_angle as f64;
            let t = Vec3M::new(r.sinh() * a.cos(), r.sinh() * a.sin(), r.cosh());
            let op = TriDiagOp::generator_combo(
                bg.k,
                state.dim(),
                [
                    Complex64::new(t[0], 0.0),
                    Complex64::new(t[1], 0.0),
                    Complex64::new(t[2], 0.0),
                ],
            );
            let applied = op.apply(state.coeffs());
            let mean: Complex64 = state
                .coeffs()
                .iter()
                .zip(applied.iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            let second: f64 = applied.iter().map(|c| c.norm_sqr()).sum();
            let var = (second - mean.re * mean.re).max(0.0);
            if var < best {
                best = var;
                arg = t;
            }
        }
    }
    Ok(TimelikeScan {
        min_variance: best,
        argmin: arg,
    })
}

/// Worst coefficient difference between two states after aligning the global
/// phase on their shared prefix; excess coefficients of the longer state
/// count in full.
pub fn max_coeff_diff_up_to_phase(a: &StateVec, b: &StateVec) -> f64 {
    let n = a.dim().min(b.dim());
    let ov: Complex64 = b
        .coeffs()
        .iter()
        .take(n)
        .zip(a.coeffs().iter().take(n))
        .map(|(x, y)| x.conj() * y)
        .sum();
    let phase = if ov.norm() == 0.0 { ONE } else { ov / ov.norm() };
    let mut worst = 0.0f64;
    for i in 0..n {
        worst = worst.max((a.coeffs()[i] - phase * b.coeffs()[i]).norm());
    }
    for i in n..a.dim() {
        worst = worst.max(a.coeffs()[i].norm());
    }
    for i in n..b.dim() {
        worst = worst.max(b.coeffs()[i].norm());
    }
    worst
}
