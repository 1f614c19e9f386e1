//! Systematic 1/k expansion of coherent expectation values of operator
//! products.
//!
//! For a group-generated state the expectation of a product AB expands as
//!
//!   <AB> = sum_m  Gamma(2k) / (m! Gamma(2k+m))
//!                 * <[i Ktilde^+, A]_m> <[i Ktilde^-, B]_m>
//!
//! with Ktilde^i = M^i_j K^j the boost-transformed generators. The m-th
//! prefactor carries 2k(2k+1)...(2k-1+m) in the denominator while the
//! iterated commutators stay of fixed order in k, so the series is an
//! expansion in 1/k and its zeroth order is the classical factorized result.
//! The derivation conjugates the ladder operators through the group action;
//! Barut-Girardello states are not group-generated, so they are rejected
//! with a typed error.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::algebra::{adjoint_action, expm_multiply, one_norm};
use crate::coherent::CoherentRef;
use crate::error::{Error, Result};
use crate::fockrep::{FockRep, StateVec, M_MAX_CAP};
use crate::specialfn::ln_gamma_raw;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default truncation order of the expansion.
pub const DEFAULT_MAX_ORDER: usize = 12;

/// Generator symbols for operator polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    K1,
    K2,
    K3,
    /// Raising operator K^+ = K1 + i K2.
    Raise,
    /// Lowering operator K^- = K1 - i K2.
    Lower,
}

/// Polynomial in the generators: a sum of complex-weighted products of
/// generator symbols. Keeping operators symbolic lets the brute-force
/// reference rebuild them on a larger truncated space than the expansion
/// itself uses.
#[derive(Clone, Debug)]
pub struct GenPoly {
    terms: Vec<(Complex64, Vec<Gen>)>,
}

impl GenPoly {
    pub fn identity() -> Self {
        GenPoly {
            terms: vec![(Complex64::new(1.0, 0.0), vec![])],
        }
    }

    pub fn generator(g: Gen) -> Self {
        GenPoly {
            terms: vec![(Complex64::new(1.0, 0.0), vec![g])],
        }
    }

    pub fn monomial(coeff: Complex64, gens: Vec<Gen>) -> Self {
        GenPoly {
            terms: vec![(coeff, gens)],
        }
    }

    pub fn from_terms(terms: Vec<(Complex64, Vec<Gen>)>) -> Self {
        GenPoly { terms }
    }

    pub fn terms(&self) -> &[(Complex64, Vec<Gen>)] {
        &self.terms
    }

    /// Highest number of generator factors in any term.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, g)| g.len()).max().unwrap_or(0)
    }

    /// Parse products and sums like "k1*k2 + 0.5*k3*k3" or "id"; factors are
    /// k1, k2, k3, k+ (or kp), k- (or km), or a real coefficient.
    pub fn parse(text: &str) -> Result<Self> {
        // canonicalize the ladder symbols before '+' splits terms
        let text = text.to_ascii_lowercase().replace("k+", "kp").replace("k-", "km");
        let mut terms = Vec::new();
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                continue;
            }
            let mut coeff = Complex64::new(1.0, 0.0);
            let mut gens = Vec::new();
            for factor in term.split('*') {
                let f = factor.trim().to_ascii_lowercase();
                match f.as_str() {
                    "k1" => gens.push(Gen::K1),
                    "k2" => gens.push(Gen::K2),
                    "k3" => gens.push(Gen::K3),
                    "kp" => gens.push(Gen::Raise),
                    "km" => gens.push(Gen::Lower),
                    "id" | "1" => {}
                    other => match other.parse::<f64>() {
                        Ok(v) => coeff *= v,
                        Err(_) => {
                            return Err(Error::Domain(format!(
                                "cannot parse operator factor '{other}'"
                            )))
                        }
                    },
                }
            }
            terms.push((coeff, gens));
        }
        if terms.is_empty() {
            return Err(Error::Domain("empty operator expression".into()));
        }
        Ok(GenPoly { terms })
    }

    /// Dense matrix on the truncated space of `rep`.
    pub fn matrix(&self, rep: &FockRep) -> Array2<Complex64> {
        let dim = rep.dim();
        let mut out = Array2::<Complex64>::zeros((dim, dim));
        for (coeff, gens) in &self.terms {
            let mut acc = crate::algebra::identity(dim);
            for g in gens {
                let m = match g {
                    Gen::K1 => rep.k1(),
                    Gen::K2 => rep.k2(),
                    Gen::K3 => rep.k3(),
                    Gen::Raise => rep.k_plus(),
                    Gen::Lower => rep.k_minus(),
                };
                acc = acc.dot(m);
            }
            out.scaled_add(*coeff, &acc);
        }
        out
    }
}

/// Per-order record of an expansion run against its brute-force reference.
#[derive(Clone, Debug)]
pub struct ExpansionReport {
    /// Term value at order m (index m).
    pub terms: Vec<Complex64>,
    /// Partial sums through order m.
    pub partial_sums: Vec<Complex64>,
    pub term_magnitudes: Vec<f64>,
    /// Reference value <A B> evaluated on a doubled truncation.
    pub brute_force: Complex64,
    /// Smallest order whose partial sum is within `tolerance` of the
    /// reference (scaled by 1 + |reference|); `None` if never reached.
    pub converged_order: Option<usize>,
    pub tolerance: f64,
}

impl ExpansionReport {
    fn from_terms(terms: Vec<Complex64>, brute_force: Complex64, tolerance: f64) -> Self {
        let mut partial_sums = Vec::with_capacity(terms.len());
        let mut acc = Complex64::ZERO;
        for t in &terms {
            acc += t;
            partial_sums.push(acc);
        }
        let scale = 1.0 + brute_force.norm();
        let converged_order = partial_sums
            .iter()
            .position(|p| (p - brute_force).norm() <= tolerance * scale);
        let term_magnitudes = terms.iter().map(|t| t.norm()).collect();
        ExpansionReport {
            terms,
            partial_sums,
            term_magnitudes,
            brute_force,
            converged_order,
            tolerance,
        }
    }

    pub fn final_sum(&self) -> Complex64 {
        *self.partial_sums.last().unwrap_or(&Complex64::ZERO)
    }
}

struct GroupView<'a> {
    k: f64,
    state: &'a StateVec,
    rep: &'a FockRep,
}

fn group_view<'a>(cs: &CoherentRef<'a>) -> Result<(GroupView<'a>, &'a crate::algebra::BoostMatrix)> {
    let boost = cs.boost().ok_or(Error::BarutGirardelloExpansion)?;
    Ok((
        GroupView {
            k: cs.k(),
            state: cs.state(),
            rep: cs.rep(),
        },
        boost,
    ))
}

fn mean(state: &StateVec, applied: &Array1<Complex64>) -> Complex64 {
    state
        .coeffs()
        .iter()
        .zip(applied.iter())
        .map(|(a, b)| a.conj() * b)
        .sum()
}

fn expectation(state: &StateVec, op: &Array2<Complex64>) -> Complex64 {
    mean(state, &op.dot(state.coeffs()))
}

/// log of the m-th prefactor Gamma(2k) / (m! Gamma(2k+m)).
fn ln_prefactor(k: f64, m: usize) -> f64 {
    ln_gamma_raw(2.0 * k) - ln_gamma_raw(m as f64 + 1.0) - ln_gamma_raw(2.0 * k + m as f64)
}

/// Brute-force <A B> on a truncation doubled relative to the evaluation
/// space, giving the reference an independent error budget.
fn brute_force_product(
    a: &GenPoly,
    b: &GenPoly,
    cs: &CoherentRef<'_>,
    m_eval: usize,
) -> Result<Complex64> {
    let doubled = (m_eval * 2).min(M_MAX_CAP);
    let (state, rep) = cs.rebuild_group(doubled)?;
    let am = a.matrix(&rep);
    let bm = b.matrix(&rep);
    // <psi| A B |psi> = (A^dagger psi, B psi), two matrix-vector products
    let adag_psi = am.t().mapv(|c| c.conj()).dot(state.coeffs());
    let b_psi = bm.dot(state.coeffs());
    Ok(adag_psi
        .iter()
        .zip(b_psi.iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Truncation used for term evaluation. Each commutator order widens the
/// band of boundary rows corrupted by the truncated raising operator, and the
/// corrupted entries grow with k; padding the space pushes them out to rows
/// where the state amplitude has decayed to nothing.
fn padded_m_max(state_m_max: usize, max_order: usize, bandwidth: usize) -> usize {
    (state_m_max + 2 * (max_order + bandwidth) + 16).min(M_MAX_CAP)
}

/// Expansion of <A B> in iterated commutators of the transformed ladder
/// operators, reported order by order against the brute-force reference.
pub fn product_expansion(
    a: &GenPoly,
    b: &GenPoly,
    cs: CoherentRef<'_>,
    max_order: usize,
    tolerance: f64,
) -> Result<ExpansionReport> {
    let (view, boost) = group_view(&cs)?;
    let m_eval = padded_m_max(view.rep.m_max(), max_order, a.degree() + b.degree());
    let brute = brute_force_product(a, b, &cs, m_eval)?;
    let (state, rep) = cs.rebuild_group(m_eval)?;

    let kt = adjoint_action(boost, &rep);
    let kt_plus = &kt[0] + &(&kt[1] * I);
    let kt_minus = &kt[0] - &(&kt[1] * I);
    let am = a.matrix(&rep);
    let bm = b.matrix(&rep);

    let mut ca = am; // [i Ktilde^+, A]_m
    let mut cb = bm; // [i Ktilde^-, B]_m
    let mut terms = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order {
        if m > 0 {
            ca = (kt_plus.dot(&ca) - ca.dot(&kt_plus)) * I;
            cb = (kt_minus.dot(&cb) - cb.dot(&kt_minus)) * I;
        }
        let pref = ln_prefactor(view.k, m).exp();
        terms.push(expectation(&state, &ca) * expectation(&state, &cb) * pref);
    }
    Ok(ExpansionReport::from_terms(terms, brute, tolerance))
}

/// Variance expansion of a hermitian operator: non-negative terms
/// Gamma(2k)/(m! Gamma(2k+m)) |<[i Ktilde^-, A]_m>|^2 for m >= 1.
///
/// The order-0 entry of the report is zero by construction.
pub fn variance_expansion(
    a: &GenPoly,
    cs: CoherentRef<'_>,
    max_order: usize,
    tolerance: f64,
) -> Result<ExpansionReport> {
    let (view, boost) = group_view(&cs)?;
    let m_eval = padded_m_max(view.rep.m_max(), max_order, 2 * a.degree());
    let (state, rep) = cs.rebuild_group(m_eval)?;
    let am = a.matrix(&rep);
    if hermiticity_defect(&am) > 1e-10 {
        return Err(Error::Domain(
            "variance expansion requires a hermitian operator".into(),
        ));
    }

    // reference: direct variance on the doubled truncation
    let doubled = (m_eval * 2).min(M_MAX_CAP);
    let (state2, rep2) = cs.rebuild_group(doubled)?;
    let a2 = a.matrix(&rep2);
    let applied = a2.dot(state2.coeffs());
    let mean2 = mean(&state2, &applied);
    let second: f64 = applied.iter().map(|c| c.norm_sqr()).sum();
    let brute = Complex64::new((second - mean2.re * mean2.re).max(0.0), 0.0);

    let kt = adjoint_action(boost, &rep);
    let kt_minus = &kt[0] - &(&kt[1] * I);
    let mut cb = am;
    let mut terms = vec![Complex64::ZERO];
    for m in 1..=max_order {
        cb = (kt_minus.dot(&cb) - cb.dot(&kt_minus)) * I;
        let pref = ln_prefactor(view.k, m).exp();
        let ev = expectation(&state, &cb);
        terms.push(Complex64::new(pref * ev.norm_sqr(), 0.0));
    }
    Ok(ExpansionReport::from_terms(terms, brute, tolerance))
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

/// Leading-order variance (1/2k) eta_ij <[i K^i, A]> <[i K^j, A]> with the
/// untransformed generators; equal to the m = 1 term of the variance
/// expansion because the boost matrix relating K and Ktilde preserves the
/// metric.
pub fn leading_order_variance(a: &Array2<Complex64>, cs: CoherentRef<'_>) -> Result<f64> {
    let (view, _) = group_view(&cs)?;
    if a.nrows() != view.rep.dim() || a.ncols() != view.rep.dim() {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but the representation dimension is {}",
            a.nrows(),
            a.ncols(),
            view.rep.dim()
        )));
    }
    if hermiticity_defect(a) > 1e-10 {
        return Err(Error::Domain(
            "leading-order variance requires a hermitian operator".into(),
        ));
    }
    let gens = [view.rep.k1(), view.rep.k2(), view.rep.k3()];
    let mut v = [0.0f64; 3];
    for (vi, g) in v.iter_mut().zip(gens.iter()) {
        let comm = (g.dot(a) - a.dot(*g)) * I;
        *vi = expectation(view.state, &comm).re;
    }
    Ok(((v[0] * v[0] + v[1] * v[1] - v[2] * v[2]) / (2.0 * view.k)).max(0.0))
}

/// Leading-order energy variance from the time dependence of the generator
/// expectations: the Heisenberg derivatives d<K^i>/dt under exp(-iHt) are
/// taken by second-order central differences and contracted with the metric,
/// (1/2k) eta_ij <dK^i/dt> <dK^j/dt>. Units hbar = 1.
pub fn energy_variance_from_dynamics(
    h: &Array2<Complex64>,
    cs: CoherentRef<'_>,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!(
            "finite-difference step must be positive, got {dt}"
        )));
    }
    let (view, _) = group_view(&cs)?;
    if h.nrows() != view.rep.dim() || h.ncols() != view.rep.dim() {
        return Err(Error::Dimension(format!(
            "hamiltonian is {}x{} but the representation dimension is {}",
            h.nrows(),
            h.ncols(),
            view.rep.dim()
        )));
    }
    if hermiticity_defect(h) > 1e-10 {
        return Err(Error::Domain(
            "dynamics requires a hermitian hamiltonian".into(),
        ));
    }
    let step = h * Complex64::new(0.0, -dt);
    let psi_plus = expm_multiply(&step, view.state.coeffs(), 1e-16)?;
    let back = h * Complex64::new(0.0, dt);
    let psi_minus = expm_multiply(&back, view.state.coeffs(), 1e-16)?;

    let gens = [view.rep.k1(), view.rep.k2(), view.rep.k3()];
    let mut d = [0.0f64; 3];
    for (di, g) in d.iter_mut().zip(gens.iter()) {
        let plus = psi_plus
            .iter()
            .zip(g.dot(&psi_plus).iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re;
        let minus = psi_minus
            .iter()
            .zip(g.dot(&psi_minus).iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re;
        *di = (plus - minus) / (2.0 * dt);
    }
    Ok(((d[0] * d[0] + d[1] * d[1] - d[2] * d[2]) / (2.0 * view.k)).max(0.0))
}

/// Step size for central differences balancing truncation against round-off,
/// 1e-4 relative to the spectral scale of the hamiltonian.
pub fn dynamics_step(h: &Array2<Complex64>) -> f64 {
    let n = one_norm(h);
    if n > 0.0 {
        1e-4 / n
    } else {
        1e-4
    }
}
