//! The pseudoharmonic (radial/singular) oscillator
//! H = p^2/(2 mu) + mu omega^2 q^2 / 2 + lambda / q^2, realized on the
//! discrete series through H = 2 hbar omega K3 with weight
//! k = alpha/4 + 1/2, alpha = sqrt(8 mu lambda / hbar^2 + 1).
//!
//! Covers the parameter mapping, classical orbits and their matching to
//! coherent parameters, exact and asymptotic energy statistics for the
//! Perelomov-Gilmore and Barut-Girardello families, real-space
//! eigenfunctions, and stability of the time evolution.

use ndarray::Array2;
use num_complex::Complex64;

use crate::coherent::{bg_state, pg_state, CoherentRef};
use crate::error::{Error, Result};
use crate::fockrep::{FockRep, StateVec};
use crate::quad::adaptive_simpson;
use crate::specialfn::{bessel_i_ratio, laguerre, ln_gamma_raw};

/// Physical parameters of the oscillator with the derived representation
/// data. Energies are often quoted in units of sigma*omega with
/// sigma = sqrt(mu lambda); the classical minimum is sqrt(2) in those units.
#[derive(Clone, Copy, Debug)]
pub struct PhoParams {
    pub mu: f64,
    pub omega: f64,
    pub lambda: f64,
    pub hbar: f64,
    alpha: f64,
    k: f64,
    e_min: f64,
}

impl PhoParams {
    pub fn new(mu: f64, omega: f64, lambda: f64, hbar: f64) -> Result<Self> {
        if !(mu > 0.0 && omega > 0.0 && hbar > 0.0) {
            return Err(Error::Domain(format!(
                "mu, omega, hbar must be positive, got ({mu}, {omega}, {hbar})"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!(
                "lambda must be non-negative, got {lambda}"
            )));
        }
        let alpha = (8.0 * mu * lambda / (hbar * hbar) + 1.0).sqrt();
        let k = alpha / 4.0 + 0.5;
        let e_min = (2.0 * mu * lambda * omega * omega).sqrt();
        Ok(Self {
            mu,
            omega,
            lambda,
            hbar,
            alpha,
            k,
            e_min,
        })
    }

    /// alpha = sqrt(8 mu lambda / hbar^2 + 1).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Representation weight k = alpha/4 + 1/2.
    pub fn weight_k(&self) -> f64 {
        self.k
    }

    /// Classical energy minimum sqrt(2 mu lambda omega^2).
    pub fn e_cl_min(&self) -> f64 {
        self.e_min
    }

    /// sigma = sqrt(mu lambda).
    pub fn sigma(&self) -> f64 {
        (self.mu * self.lambda).sqrt()
    }

    /// sigma omega = sqrt(mu lambda omega^2), the energy unit.
    pub fn sigma_omega(&self) -> f64 {
        self.omega * self.sigma()
    }
}

/// Representation of the oscillator at its weight, together with the dense
/// Hamiltonian 2 hbar omega K3.
pub fn pho_rep(params: &PhoParams, m_max: usize) -> Result<(FockRep, Array2<Complex64>)> {
    let rep = FockRep::build(params.weight_k(), m_max)?;
    let h = rep.k3() * Complex64::new(2.0 * params.hbar * params.omega, 0.0);
    Ok((rep, h))
}

/// Classical orbit at energy E_cl >= E_min with initial phase phi:
/// q^2(t) = E_cl/(mu omega^2) + eta cos(2 omega t + phi),
/// eta(E_cl) = sqrt((E_cl/(mu omega^2))^2 - 2 lambda/(mu omega^2)).
#[derive(Clone, Copy, Debug)]
pub struct ClassicalOrbit {
    pub e_cl: f64,
    pub phi: f64,
    pub eta_cl: f64,
}

impl ClassicalOrbit {
    pub fn new(e_cl: f64, phi: f64, params: &PhoParams) -> Result<Self> {
        let e_min = params.e_cl_min();
        if e_cl < e_min * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "classical energy {e_cl} below the minimum {e_min}"
            )));
        }
        let mw2 = params.mu * params.omega * params.omega;
        let scale = (e_cl / mw2).powi(2);
        let mut eta_sq = scale - 2.0 * params.lambda / mw2;
        // the subtraction cancels exactly at E_min; snap round-off residue
        // to the turning-point-free constant orbit
        if eta_sq < 4e-15 * scale {
            eta_sq = 0.0;
        }
        Ok(Self {
            e_cl,
            phi,
            eta_cl: eta_sq.sqrt(),
        })
    }
}

/// Position and velocity of the classical solution at time t.
pub fn classical_trajectory(orbit: &ClassicalOrbit, params: &PhoParams, t: f64) -> (f64, f64) {
    let mw2 = params.mu * params.omega * params.omega;
    let phase = 2.0 * params.omega * t + orbit.phi;
    let q_sq = orbit.e_cl / mw2 + orbit.eta_cl * phase.cos();
    let q = q_sq.max(0.0).sqrt();
    let qdot = if q > 0.0 {
        -params.omega * orbit.eta_cl * phase.sin() / q
    } else {
        0.0
    };
    (q, qdot)
}

/// Classical energy evaluated along the trajectory (for residual checks).
pub fn classical_energy(params: &PhoParams, q: f64, qdot: f64) -> f64 {
    0.5 * params.mu * qdot * qdot
        + 0.5 * params.mu * params.omega * params.omega * q * q
        + params.lambda / (q * q)
}

/// Coherent parameters matched to a classical orbit at t = 0:
/// |w| = (mu omega / 2 hbar) eta with phase -phi, and
/// z = (k - sqrt(k^2 + |w|^2)) / w, which satisfies
/// -2 k z / (1 - |z|^2) = conj(w).
pub fn match_parameters(orbit: &ClassicalOrbit, params: &PhoParams) -> (Complex64, Complex64) {
    let wa = params.mu * params.omega / (2.0 * params.hbar) * orbit.eta_cl;
    let w = Complex64::from_polar(wa, -orbit.phi);
    let k = params.weight_k();
    let z = if wa == 0.0 {
        Complex64::ZERO
    } else {
        Complex64::new(k - (k * k + wa * wa).sqrt(), 0.0) / w
    };
    (z, w)
}

/// Brute-force transversal expectations (<K1>, <K2>) of a matched state at
/// time t, evaluated on the truncated space. For matched parameters both
/// families reproduce the classical forms
/// <K1> = (mu omega / 2 hbar) q^2(t) - E_cl/(2 hbar omega) and
/// <K2> = -(mu / 2 hbar) qdot(t) q(t).
pub fn transversal_expectations(
    state: CoherentRef<'_>,
    params: &PhoParams,
    t: f64,
) -> Result<(f64, f64)> {
    check_weight(state.k(), params)?;
    let rot = 2.0 * params.omega * t;
    let (st, rep) = match state {
        CoherentRef::Pg(pg) => {
            let zt = pg.z * Complex64::from_polar(1.0, rot);
            let evolved = pg_state(zt, pg.rep())?;
            (evolved.state().clone(), evolved.rep().clone())
        }
        CoherentRef::Bg(bg) => {
            let wt = bg.w * Complex64::from_polar(1.0, -rot);
            let evolved = bg_state(wt, bg.rep())?;
            (evolved.state().clone(), evolved.rep().clone())
        }
        CoherentRef::Group(_) => {
            return Err(Error::Domain(
                "transversal expectations are defined for matched PG or BG states".into(),
            ))
        }
    };
    let k1 = crate::coherent::expval(&st, rep.k1())?;
    let k2 = crate::coherent::expval(&st, rep.k2())?;
    Ok((k1.re, k2.re))
}

fn check_weight(k: f64, params: &PhoParams) -> Result<()> {
    if (k - params.weight_k()).abs() > 1e-9 * (1.0 + k) {
        return Err(Error::Domain(format!(
            "state weight k = {k} does not match the oscillator weight {}",
            params.weight_k()
        )));
    }
    Ok(())
}

/// Mean energy and energy variance (squared) of a Perelomov-Gilmore state:
/// <H> = 2 hbar omega k cosh(tau) and (Delta H)^2 = (2 hbar omega)^2 (k/2)
/// sinh^2(tau), tau = 2 artanh |z|. The Hamiltonian is linear in K3, so the
/// variance formula is exact (a single term of the variance expansion).
pub fn pg_energy_stats(z: Complex64, params: &PhoParams) -> Result<(f64, f64)> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::Domain(format!(
            "pg_energy_stats requires |z| < 1, got {r}"
        )));
    }
    let k = params.weight_k();
    let denom = 1.0 - r * r;
    let ch = (1.0 + r * r) / denom;
    let sh = 2.0 * r / denom;
    let scale = 2.0 * params.hbar * params.omega;
    Ok((scale * k * ch, scale * scale * 0.5 * k * sh * sh))
}

/// Mean energy and energy variance (squared) of a Barut-Girardello state,
/// through ratios of modified Bessel functions at 2|w| (log-domain once the
/// argument is large):
/// <H> = 2 hbar omega (k + |w| I_{2k}/I_{2k-1}),
/// (Delta H)^2 = (2 hbar omega)^2 (|w|^2 I_{2k+1}/I_{2k-1}
///               + |w| I_{2k}/I_{2k-1} - (|w| I_{2k}/I_{2k-1})^2).
pub fn bg_energy_stats(w: Complex64, params: &PhoParams) -> Result<(f64, f64)> {
    if !w.is_finite() {
        return Err(Error::Domain("bg_energy_stats requires finite w".into()));
    }
    let k = params.weight_k();
    let scale = 2.0 * params.hbar * params.omega;
    let wa = w.norm();
    if wa == 0.0 {
        return Ok((scale * k, 0.0));
    }
    let x = 2.0 * wa;
    // Small arguments: the series underflows once (x/2)^(2k-1) leaves the
    // f64 range; the leading-order ratios are then exact to O(x^2).
    let (r1, r2) = if x < 1e-6 || (2.0 * k - 1.0) * (0.5 * x).ln() < -650.0 {
        (wa / (2.0 * k), wa * wa / (2.0 * k * (2.0 * k + 1.0)))
    } else {
        (
            bessel_i_ratio(2.0 * k, 2.0 * k - 1.0, x)?,
            bessel_i_ratio(2.0 * k + 1.0, 2.0 * k - 1.0, x)?,
        )
    };
    let mean = scale * (k + wa * r1);
    let var = scale * scale * (wa * wa * r2 + wa * r1 - (wa * r1) * (wa * r1));
    Ok((mean, var.max(0.0)))
}

/// BG energy statistics matched to a classical energy (phase irrelevant).
pub fn matched_bg_stats(params: &PhoParams, e_cl: f64) -> Result<(f64, f64)> {
    let orbit = ClassicalOrbit::new(e_cl, 0.0, params)?;
    let (_, w) = match_parameters(&orbit, params);
    bg_energy_stats(w, params)
}

/// PG energy statistics matched to a classical energy.
pub fn matched_pg_stats(params: &PhoParams, e_cl: f64) -> Result<(f64, f64)> {
    let orbit = ClassicalOrbit::new(e_cl, 0.0, params)?;
    let (z, _) = match_parameters(&orbit, params);
    pg_energy_stats(z, params)
}

/// Real-space eigenfunction <q|k,m> of the regular family:
/// sqrt(sqrt(mu omega/hbar) * 2 m! / Gamma(alpha/2+1+m))
///   e^{-xi/2} xi^{(alpha+1)/4} L^{alpha/2}_m(xi),  xi = mu omega q^2 / hbar.
///
/// The companion family obtained by alpha -> -alpha diverges at the origin
/// and admits no classical limit; it is intentionally not constructed here.
pub fn wavefunction(params: &PhoParams, m: usize, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!(
            "wavefunction requires q > 0, got {q}"
        )));
    }
    wavefunction_at(params, m, q)
}

fn wavefunction_at(params: &PhoParams, m: usize, q: f64) -> Result<f64> {
    let a2 = params.alpha() / 2.0;
    let xi = params.mu * params.omega * q * q / params.hbar;
    let ln_norm = 0.25 * (params.mu * params.omega / params.hbar).ln()
        + 0.5 * (2.0f64.ln() + ln_gamma_raw(m as f64 + 1.0) - ln_gamma_raw(a2 + 1.0 + m as f64));
    let lag = laguerre(a2, m, xi)?;
    let envelope = ln_norm - 0.5 * xi + 0.25 * (params.alpha() + 1.0) * xi.ln();
    Ok(envelope.exp() * lag)
}

/// Overlap integral over q in (0, infinity) of two eigenfunctions by
/// adaptive quadrature; the cut point comes from the Gaussian envelope.
pub fn wavefunction_overlap(params: &PhoParams, m1: usize, m2: usize) -> Result<f64> {
    let xi_cut = 120.0 + 10.0 * (params.alpha() / 2.0 + 2.0 * m1.max(m2) as f64);
    let q_cut = (params.hbar * xi_cut / (params.mu * params.omega)).sqrt();
    let p = *params;
    let integrand = move |q: f64| -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        match (wavefunction_at(&p, m1, q), wavefunction_at(&p, m2, q)) {
            (Ok(a), Ok(b)) => a * b,
            _ => 0.0,
        }
    };
    Ok(adaptive_simpson(&integrand, 0.0, q_cut, 1e-11))
}

/// Stability fidelity of the Hamiltonian time evolution:
/// |<target(t)| exp(-iHt/hbar) |state>| where the target is the same family
/// at the rotated coherent parameter (z e^{i 2 omega t} for PG,
/// w e^{-i 2 omega t} for BG). Equals 1 when the evolution stays on the
/// coherent manifold. H = 2 hbar omega K3 is diagonal here, so the evolution
/// is applied as exact per-level phases e^{-i 2 omega (k+m) t}.
pub fn evolve_stability(state: CoherentRef<'_>, params: &PhoParams, t: f64) -> Result<f64> {
    check_weight(state.k(), params)?;
    let rot = 2.0 * params.omega * t;
    let (evolved, target) = match state {
        CoherentRef::Pg(pg) => {
            let target = pg_state(pg.z * Complex64::from_polar(1.0, rot), pg.rep())?;
            (evolve_diagonal(pg.state(), params, t), target.state().clone())
        }
        CoherentRef::Bg(bg) => {
            let target = bg_state(bg.w * Complex64::from_polar(1.0, -rot), bg.rep())?;
            (evolve_diagonal(bg.state(), params, t), target.state().clone())
        }
        CoherentRef::Group(_) => {
            return Err(Error::Domain(
                "stability fidelity is defined for PG or BG states".into(),
            ))
        }
    };
    if evolved.len() != target.dim() {
        return Err(Error::Dimension(format!(
            "evolved state dimension {} does not match target {}",
            evolved.len(),
            target.dim()
        )));
    }
    let overlap: Complex64 = target
        .coeffs()
        .iter()
        .zip(evolved.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(overlap.norm())
}

fn evolve_diagonal(state: &StateVec, params: &PhoParams, t: f64) -> Vec<Complex64> {
    let k = state.k();
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| c * Complex64::from_polar(1.0, -2.0 * params.omega * (k + m as f64) * t))
        .collect()
}
