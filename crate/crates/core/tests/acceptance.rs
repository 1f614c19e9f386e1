//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the observed worst case (run with `--nocapture` to see
//! them). Tolerances are pinned here, not configurable.

use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use su11_core::algebra::{boost_matrix, iterated_commutator};
use su11_core::coherent::{
    bg_state, expval, general_cs, max_coeff_diff_up_to_phase, pg_state, variance,
};
use su11_core::pho::{
    classical_trajectory, match_parameters, matched_bg_stats, matched_pg_stats,
    transversal_expectations, wavefunction, wavefunction_overlap, ClassicalOrbit, PhoParams,
    evolve_stability,
};
use su11_core::semiclassical::{
    energy_variance_from_dynamics, leading_order_variance, product_expansion, variance_expansion,
    Gen, GenPoly,
};
use su11_core::{FockRep, TriDiagOp, Vec3M};
use su11_core::algebra::ApplyOp;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scaled_residual(
    got: &Array2<Complex64>,
    want: &Array2<Complex64>,
    scale: &Array2<Complex64>,
    interior: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..interior {
        for j in 0..interior {
            worst = worst.max((got[[i, j]] - want[[i, j]]).norm() / (1.0 + scale[[i, j]].norm()));
        }
    }
    worst
}

#[test]
fn criterion_01_representation_exactness() {
    let start = Instant::now();
    let mut worst_comm = 0.0f64;
    let mut worst_cas = 0.0f64;
    for &k in &[0.6, 0.75, 1.25, 5.0, 40.0] {
        for &m_max in &[32usize, 128] {
            let rep = FockRep::build(k, m_max).unwrap();
            let interior = rep.interior_dim();

            // [K3, K+] - K+ and [K3, K-] + K-
            let c = iterated_commutator(rep.k3(), rep.k_plus(), 1).unwrap();
            let s = rep.k3().dot(rep.k_plus());
            worst_comm = worst_comm.max(scaled_residual(&c, rep.k_plus(), &s, interior));
            let c = iterated_commutator(rep.k3(), rep.k_minus(), 1).unwrap();
            let want = rep.k_minus() * c64(-1.0, 0.0);
            let s = rep.k3().dot(rep.k_minus());
            worst_comm = worst_comm.max(scaled_residual(&c, &want, &s, interior));
            // [K+, K-] + 2 K3
            let c = iterated_commutator(rep.k_plus(), rep.k_minus(), 1).unwrap();
            let want = rep.k3() * c64(-2.0, 0.0);
            let s = rep.k_plus().dot(rep.k_minus());
            worst_comm = worst_comm.max(scaled_residual(&c, &want, &s, interior));

            // Casimir = k(k-1) Id on the interior
            let cas = rep.casimir();
            let target = k * (k - 1.0);
            for i in 0..interior {
                for j in 0..interior {
                    let want = if i == j { target } else { 0.0 };
                    let scale = 1.0 + (k + i as f64).powi(2);
                    worst_cas = worst_cas.max((cas[[i, j]] - want).norm() / scale);
                }
            }
        }
    }
    assert!(worst_comm < 1e-13, "commutator residual {worst_comm:.3e}");
    assert!(worst_cas < 1e-12, "casimir residual {worst_cas:.3e}");
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "runtime {dt:?}");
    println!(
        "acceptance criterion 01 PASS - representation exactness: commutators {worst_comm:.2e} (<1e-13), casimir {worst_cas:.2e} (<1e-12), {dt:?}"
    );
}

#[test]
fn criterion_02_pseudoorthogonal_structure() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_po = 0.0f64;
    let mut worst_inv = 0.0f64;
    for sample in 0..200 {
        let timelike = sample % 2 == 0;
        let r: f64 = rng.random_range(-1.5..1.5);
        let t: f64 = rng.random_range(0.0..6.283_185_307);
        let n = if timelike {
            Vec3M::new(r.sinh() * t.cos(), r.sinh() * t.sin(), r.cosh())
        } else {
            Vec3M::new(r.cosh() * t.cos(), r.cosh() * t.sin(), r.sinh())
        };
        let tau: f64 = rng.random_range(-3.0..3.0);
        let m = boost_matrix(tau, &n).unwrap();
        let scale = 1.0
            + m.entries()
                .iter()
                .flatten()
                .fold(0.0f64, |a, v| a.max(v.abs()))
                .powi(2);
        worst_po = worst_po.max(m.pseudo_orthogonality_defect() / scale);
        let prod = m.inverse().compose_entries(&m);
        let id = boost_matrix(0.0, &n).unwrap();
        worst_inv = worst_inv.max(id.max_abs_diff(&prod) / scale);
    }
    assert!(worst_po < 1e-12, "pseudoorthogonality defect {worst_po:.3e}");
    assert!(worst_inv < 1e-12, "inverse defect {worst_inv:.3e}");
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "runtime {dt:?}");
    println!(
        "acceptance criterion 02 PASS - O(2,1) structure: M eta M^T {worst_po:.2e}, inverses {worst_inv:.2e} (<1e-12), {dt:?}"
    );
}

#[test]
fn criterion_03_pg_construction_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rep = FockRep::build(1.25, 64).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let tau: f64 = rng.random_range(0.0..2.5);
        let phi: f64 = rng.random_range(0.0..6.283_185_307);
        let n = Vec3M::spacelike_unit(phi.sin(), -phi.cos(), 0.0).unwrap();
        let g = general_cs(tau, &n, &rep).unwrap();
        let z = Complex64::from_polar((tau / 2.0).tanh(), phi);
        let p = pg_state(z, &rep).unwrap();
        worst = worst.max(max_coeff_diff_up_to_phase(g.state(), p.state()));
    }
    assert!(worst < 1e-8, "construction mismatch {worst:.3e}");
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "runtime {dt:?}");
    println!(
        "acceptance criterion 03 PASS - group construction matches PG series: worst coefficient gap {worst:.2e} (<1e-8), {dt:?}"
    );
}

#[test]
fn criterion_04_closed_form_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rep = FockRep::build(1.25, 96).unwrap();
    let k = rep.k();
    let mut worst_ev1 = 0.0f64;
    let mut worst_ev2 = 0.0f64;
    let mut worst_ev3 = 0.0f64;
    for _ in 0..50 {
        let z = Complex64::from_polar(rng.random_range(0.0..0.75), rng.random_range(0.0..6.283));
        let st = pg_state(z, &rep).unwrap();
        // ev1: <K^i> = -k s^i
        let expect = st.s.lower().scale(-k);
        let got = [
            expval(st.state(), st.rep().k1()).unwrap(),
            expval(st.state(), st.rep().k2()).unwrap(),
            expval(st.state(), st.rep().k3()).unwrap(),
        ];
        for (i, g) in got.iter().enumerate() {
            worst_ev1 = worst_ev1.max((g.re - expect[i]).abs().max(g.im.abs()));
        }
        // ev2 / ev3 for a random unit vector
        let r: f64 = rng.random_range(-1.5..1.5);
        let t: f64 = rng.random_range(0.0..6.283);
        let e = if rng.random_range(0.0..1.0) < 0.5 {
            Vec3M::new(r.cosh() * t.cos(), r.cosh() * t.sin(), r.sinh())
        } else {
            Vec3M::new(r.sinh() * t.cos(), r.sinh() * t.sin(), r.cosh())
        };
        let op = TriDiagOp::generator_combo(
            k,
            st.state().dim(),
            [c64(e[0], 0.0), c64(e[1], 0.0), c64(e[2], 0.0)],
        );
        let applied = op.apply(st.state().coeffs());
        let second: f64 = applied.iter().map(|x| x.norm_sqr()).sum();
        let mean: Complex64 = st
            .state()
            .coeffs()
            .iter()
            .zip(applied.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let es = e.minkowski_dot(&st.s);
        let ee = e.minkowski_norm();
        let closed2 = k * k * es * es + 0.5 * k * (ee + es * es);
        let closed3 = 0.5 * k * (ee + es * es);
        worst_ev2 = worst_ev2.max((second - closed2).abs() / (1.0 + closed2.abs()));
        let var = second - mean.re * mean.re;
        worst_ev3 = worst_ev3.max((var - closed3).abs() / (1.0 + closed3.abs()));
    }
    assert!(worst_ev1 < 1e-9, "ev1 {worst_ev1:.3e}");
    assert!(worst_ev2 < 1e-8, "ev2 {worst_ev2:.3e}");
    assert!(worst_ev3 < 1e-8, "ev3 {worst_ev3:.3e}");

    // minimal uncertainty products
    let mut worst_pg = 0.0f64;
    for _ in 0..8 {
        let z = Complex64::from_polar(rng.random_range(0.0..0.7), rng.random_range(0.0..6.283));
        let st = pg_state(z, &rep).unwrap();
        let u = st.boost().row(0);
        let v = st.boost().row(1);
        let uk = st.rep().contract([c64(u[0], 0.0), c64(u[1], 0.0), c64(u[2], 0.0)]);
        let vk = st.rep().contract([c64(v[0], 0.0), c64(v[1], 0.0), c64(v[2], 0.0)]);
        let du = variance(st.state(), &uk).unwrap().sqrt();
        let dv = variance(st.state(), &vk).unwrap().sqrt();
        worst_pg = worst_pg.max((du * dv - 0.5 * k).abs());
    }
    assert!(worst_pg < 1e-8, "PG uncertainty product {worst_pg:.3e}");

    let mut worst_bg = 0.0f64;
    for _ in 0..8 {
        let w = Complex64::from_polar(rng.random_range(0.3..3.0), rng.random_range(0.0..6.283));
        let st = bg_state(w, &rep).unwrap();
        let d1 = variance(st.state(), st.rep().k1()).unwrap().sqrt();
        let d2 = variance(st.state(), st.rep().k2()).unwrap().sqrt();
        let k3 = expval(st.state(), st.rep().k3()).unwrap().re;
        worst_bg = worst_bg.max((d1 * d2 - 0.5 * k3).abs());
    }
    assert!(worst_bg < 1e-8, "BG uncertainty product {worst_bg:.3e}");
    println!(
        "acceptance criterion 04 PASS - closed-form moments: ev1 {worst_ev1:.2e}, ev2 {worst_ev2:.2e}, ev3 {worst_ev3:.2e}, uncertainty products PG {worst_pg:.2e} / BG {worst_bg:.2e}"
    );
}

#[test]
fn criterion_05_expansion_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rep = FockRep::build(20.0, 64).unwrap();
    let gens = [Gen::K1, Gen::K2, Gen::K3, Gen::Raise, Gen::Lower];
    let mut random_poly = |rng: &mut ChaCha8Rng| -> GenPoly {
        let deg = rng.random_range(1..=2usize);
        let mono: Vec<Gen> = (0..deg).map(|_| gens[rng.random_range(0..gens.len())]).collect();
        let coeff = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        GenPoly::from_terms(vec![(coeff, mono), (c64(rng.random_range(-1.0..1.0), 0.0), vec![gens[rng.random_range(0..gens.len())]])])
    };
    let mut worst_order = 0usize;
    for _ in 0..10 {
        let a = random_poly(&mut rng);
        let b = random_poly(&mut rng);
        let z = Complex64::from_polar(rng.random_range(0.1..0.4), rng.random_range(0.0..6.283));
        let st = pg_state(z, &rep).unwrap();
        let r = product_expansion(&a, &b, (&st).into(), 10, 1e-9).unwrap();
        let order = r.converged_order.unwrap_or_else(|| {
            panic!(
                "no convergence: final gap {:.3e} vs reference {:.3e}",
                (r.final_sum() - r.brute_force).norm(),
                r.brute_force.norm()
            )
        });
        worst_order = worst_order.max(order);
    }
    assert!(worst_order <= 10, "converged order {worst_order}");

    // linear operators: variance series has exactly one term
    let mut worst_tail = 0.0f64;
    for _ in 0..5 {
        let z = Complex64::from_polar(rng.random_range(0.1..0.6), rng.random_range(0.0..6.283));
        let st = pg_state(z, &rep).unwrap();
        let a = GenPoly::from_terms(vec![
            (c64(rng.random_range(-1.0..1.0), 0.0), vec![Gen::K1]),
            (c64(rng.random_range(-1.0..1.0), 0.0), vec![Gen::K2]),
            (c64(rng.random_range(-1.0..1.0), 0.0), vec![Gen::K3]),
        ]);
        let r = variance_expansion(&a, (&st).into(), 6, 1e-10).unwrap();
        for m in 2..r.terms.len() {
            worst_tail = worst_tail.max(r.term_magnitudes[m] / (1.0 + r.term_magnitudes[1]));
        }
    }
    assert!(worst_tail < 1e-12, "linear variance tail {worst_tail:.3e}");

    // 1/k slopes at the non-vanishing orders
    let a = GenPoly::parse("k3*k3").unwrap();
    let b = GenPoly::parse("k1*k1").unwrap();
    let p = (a.degree() + b.degree()) as f64;
    let mut worst_slope = 0.0f64;
    for &m in &[1usize, 2] {
        let mut lnk = Vec::new();
        let mut lnt = Vec::new();
        for &k in &[5.0, 10.0, 20.0, 40.0, 80.0] {
            let repk = FockRep::build(k, 96).unwrap();
            let axis = Vec3M::spacelike_unit(0.4f64.sin(), -0.4f64.cos(), 0.0).unwrap();
            let st = general_cs(0.62, &axis, &repk).unwrap();
            let r = product_expansion(&a, &b, (&st).into(), m, 1e-9).unwrap();
            lnk.push(k.ln());
            lnt.push(r.term_magnitudes[m].ln());
        }
        let n = lnk.len() as f64;
        let sx: f64 = lnk.iter().sum();
        let sy: f64 = lnt.iter().sum();
        let sxx: f64 = lnk.iter().map(|v| v * v).sum();
        let sxy: f64 = lnk.iter().zip(lnt.iter()).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        worst_slope = worst_slope.max((slope - (p - m as f64)).abs());
    }
    assert!(worst_slope < 0.15, "slope deviation {worst_slope:.3}");
    println!(
        "acceptance criterion 05 PASS - expansion convergence: worst order {worst_order} (<=10), linear tail {worst_tail:.2e}, slope deviation {worst_slope:.3} (<0.15)"
    );
}

#[test]
fn criterion_06_leading_order_energy_variance() {
    let rep = FockRep::build(5.0, 64).unwrap();
    let st = pg_state(c64(0.3, 0.2), &rep).unwrap();
    let hams = [
        GenPoly::parse("k3").unwrap(),
        GenPoly::parse("k1 + 2*k3").unwrap(),
        GenPoly::parse("k3*k3").unwrap(),
        GenPoly::parse("k1*k1 + k3").unwrap(),
        GenPoly::parse("k1*k2 + k2*k1 + 3*k3").unwrap(),
    ];
    let mut worst = 0.0f64;
    for h_poly in &hams {
        let h = h_poly.matrix(st.rep());
        let lead = leading_order_variance(&h, (&st).into()).unwrap();
        let dt = su11_core::semiclassical::dynamics_step(&h);
        let dynv = energy_variance_from_dynamics(&h, (&st).into(), dt).unwrap();
        worst = worst.max((dynv - lead).abs() / lead.max(1e-30));
    }
    assert!(worst < 1e-6, "dynamics vs leading order {worst:.3e}");
    println!(
        "acceptance criterion 06 PASS - finite-difference energy variance matches the leading-order contraction: worst relative gap {worst:.2e} (<1e-6)"
    );
}

#[test]
fn criterion_07_figure_sweep_reproduction() {
    let start = Instant::now();
    let p = PhoParams::new(1.0, 1.0, 1.0, 0.1).unwrap();

    // zero-point gap at E = 100 sigma omega
    let (mean, _) = matched_bg_stats(&p, 100.0).unwrap();
    let gap = mean - 100.0;
    let target = 0.5 * p.hbar * p.omega;
    assert!(
        ((gap - target) / target).abs() < 0.02,
        "mean - E_cl = {gap} vs hbar omega/2 = {target}"
    );

    // relative-uncertainty slope over [30, 300]
    let npts = 40;
    let (mut lne, mut lnu) = (Vec::new(), Vec::new());
    for i in 0..npts {
        let e = 30.0 * (300.0f64 / 30.0).powf(i as f64 / (npts - 1) as f64);
        let (mean, var) = matched_bg_stats(&p, e).unwrap();
        lne.push(e.ln());
        lnu.push((var.sqrt() / mean).ln());
    }
    let n = lne.len() as f64;
    let sx: f64 = lne.iter().sum();
    let sy: f64 = lnu.iter().sum();
    let sxx: f64 = lne.iter().map(|v| v * v).sum();
    let sxy: f64 = lne.iter().zip(lnu.iter()).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(
        (slope + 0.5).abs() < 0.03,
        "log-log uncertainty slope {slope:.4}"
    );

    // PG relative spread approaches 1/sqrt(2k)
    let (mean, var) = matched_pg_stats(&p, 300.0).unwrap();
    let spread = var.sqrt() / mean;
    let pg_target = 1.0 / (2.0 * p.weight_k()).sqrt();
    assert!(
        ((spread - pg_target) / pg_target).abs() < 0.01,
        "PG spread {spread} vs {pg_target}"
    );

    // full default sweep stays well under a minute
    let e_min = p.e_cl_min();
    for &hbar in &[0.05, 0.1, 0.2, 0.5, 1.0] {
        let ph = PhoParams::new(1.0, 1.0, 1.0, hbar).unwrap();
        for i in 0..60 {
            let e = e_min * (300.0f64 / e_min).powf(i as f64 / 59.0);
            matched_bg_stats(&ph, e).unwrap();
            matched_pg_stats(&ph, e).unwrap();
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "sweep runtime {dt:?}");
    println!(
        "acceptance criterion 07 PASS - figure sweep: zero-point gap {gap:.4} ~ {target:.4} (2%), slope {slope:.4} ~ -0.5 (0.03), PG spread {spread:.5} ~ {pg_target:.5} (1%), {dt:?}"
    );
}

#[test]
fn criterion_08_stability_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let p = PhoParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let rep = FockRep::build(p.weight_k(), 64).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let z = Complex64::from_polar(rng.random_range(0.05..0.7), rng.random_range(0.0..6.283));
        let t: f64 = rng.random_range(0.0..3.0);
        let pg = pg_state(z, &rep).unwrap();
        let f = evolve_stability((&pg).into(), &p, t).unwrap();
        worst = worst.max((f - 1.0).abs());

        let w = Complex64::from_polar(rng.random_range(0.1..3.0), rng.random_range(0.0..6.283));
        let bg = bg_state(w, &rep).unwrap();
        let f = evolve_stability((&bg).into(), &p, t).unwrap();
        worst = worst.max((f - 1.0).abs());
    }
    assert!(worst < 1e-8, "fidelity defect {worst:.3e}");
    println!(
        "acceptance criterion 08 PASS - time evolution stays on the coherent manifolds: worst |1 - fidelity| {worst:.2e} (<1e-8)"
    );
}

#[test]
fn criterion_09_classical_matching() {
    let p = PhoParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let orbit = ClassicalOrbit::new(5.0, 0.7, &p).unwrap();
    let (z, w) = match_parameters(&orbit, &p);
    let rep = FockRep::build(p.weight_k(), 64).unwrap();
    let pg = pg_state(z, &rep).unwrap();
    let bg = bg_state(w, &rep).unwrap();
    let mut worst = 0.0f64;
    for i in 0..10 {
        let t = 0.31 * i as f64;
        let (q, qdot) = classical_trajectory(&orbit, &p, t);
        let k1_cl = p.mu * p.omega / (2.0 * p.hbar) * q * q - orbit.e_cl / (2.0 * p.hbar * p.omega);
        let k2_cl = -p.mu / (2.0 * p.hbar) * qdot * q;
        for state in [su11_core::CoherentRef::Pg(&pg), su11_core::CoherentRef::Bg(&bg)] {
            let (k1, k2) = transversal_expectations(state, &p, t).unwrap();
            worst = worst.max((k1 - k1_cl).abs().max((k2 - k2_cl).abs()));
        }
    }
    assert!(worst < 1e-7, "classical matching defect {worst:.3e}");
    println!(
        "acceptance criterion 09 PASS - matched transversal expectations follow the classical orbit: worst gap {worst:.2e} (<1e-7)"
    );
}

#[test]
fn criterion_10_eigenfunction_suite() {
    let p = PhoParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let mut worst_gram = 0.0f64;
    for m1 in 0..=10usize {
        for m2 in m1..=10usize {
            let overlap = wavefunction_overlap(&p, m1, m2).unwrap();
            let want = if m1 == m2 { 1.0 } else { 0.0 };
            worst_gram = worst_gram.max((overlap - want).abs());
        }
    }
    assert!(worst_gram < 1e-8, "gram defect {worst_gram:.3e}");

    // lambda = 0: half-line-normalized odd oscillator eigenfunctions
    let p0 = PhoParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
    let hermite = |n: usize, x: f64| -> f64 {
        let mut h0 = 1.0;
        let mut h1 = 2.0 * x;
        if n == 0 {
            return h0;
        }
        for j in 1..n {
            let next = 2.0 * x * h1 - 2.0 * j as f64 * h0;
            h0 = h1;
            h1 = next;
        }
        h1
    };
    let mut worst_ho = 0.0f64;
    for m in 0..=3usize {
        let n = 2 * m + 1;
        let ln_norm = -0.25 * std::f64::consts::PI.ln()
            - 0.5 * (n as f64 * 2.0f64.ln() + (1..=n).map(|j| (j as f64).ln()).sum::<f64>());
        let ho = |q: f64| -> f64 {
            2.0f64.sqrt() * ln_norm.exp() * hermite(n, q) * (-0.5 * q * q).exp()
        };
        let sign = (wavefunction(&p0, m, 0.8).unwrap() / ho(0.8)).signum();
        for i in 1..=45 {
            let q = 0.1 * i as f64;
            let a = wavefunction(&p0, m, q).unwrap();
            worst_ho = worst_ho.max((a - sign * ho(q)).abs());
        }
    }
    assert!(worst_ho < 1e-8, "odd-oscillator limit defect {worst_ho:.3e}");
    println!(
        "acceptance criterion 10 PASS - eigenfunction suite: gram defect {worst_gram:.2e} (<1e-8), odd-oscillator limit {worst_ho:.2e} (<1e-8)"
    );
}
