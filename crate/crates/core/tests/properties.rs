//! Randomized invariants: quadrature exactness and normalization, growth
//! bounds that must dominate pointwise, monotone zero statistics, and
//! recovery of planted decay laws.  Case counts are kept moderate because
//! each case runs real quadrature, not arithmetic.

mod support;

use disclab::{
    bloch_growth_bound, circle_mean, count_zeros_disk, disc_integral, fit_growth, jensen_check,
    superpose, zero_stats, DiscFunction, DiscIntegral, EntireFunction, GrowthModel, ZeroList,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{c64, poly_from_roots};

fn seeded_separated_roots(seed: u64, count: usize, max_modulus: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roots: Vec<Complex64> = Vec::with_capacity(count);
    while roots.len() < count {
        let r = max_modulus * rng.gen_range(0.0f64..1.0).sqrt();
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = Complex64::from_polar(r, t);
        if roots.iter().all(|w| (w - z).norm() > 0.08) {
            roots.push(z);
        }
    }
    roots
}

fn complex_coeffs(seed: u64, len: usize, scale: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| c64(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn circle_mean_recovers_trig_constant_term(
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        c in -5.0f64..5.0,
        k in 1u32..=12,
        m in 1u32..=12,
    ) {
        let r = circle_mean(
            |t| Ok(a + b * (k as f64 * t).cos() + c * (m as f64 * t).sin()),
            1e-13,
        )
        .unwrap();
        prop_assert!((r.value - a).abs() < 1e-13 * (1.0 + a.abs() + b.abs() + c.abs()),
            "mean {} constant {a}", r.value);
    }

    #[test]
    fn bloch_growth_bound_dominates_pointwise(
        seed in any::<u64>(),
        len in 2usize..=8,
        r in 0.0f64..0.95,
        t in 0.0f64..std::f64::consts::TAU,
    ) {
        let f = DiscFunction::taylor(complex_coeffs(seed, len, 1.0));
        let z = Complex64::from_polar(r, t);
        let (lhs, rhs) = bloch_growth_bound(&f, z, 1e-8).unwrap();
        prop_assert!(lhs <= rhs + 1e-10 * (1.0 + rhs), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn cauchy_derivative_bound_dominates(
        seed in any::<u64>(),
        len in 2usize..=7,
        rho in 1.0f64..10.0,
        t in 0.0f64..std::f64::consts::TAU,
    ) {
        let phi = EntireFunction::Poly(complex_coeffs(seed, len, 2.0));
        let u = Complex64::from_polar(rho, t);
        let (lhs, rhs) = phi.cauchy_derivative_bound(u).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-10) + 1e-10, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn entire_max_modulus_is_nondecreasing(
        seed in any::<u64>(),
        len in 1usize..=7,
        r0 in 0.1f64..4.0,
        grow in 1.01f64..3.0,
    ) {
        let phi = EntireFunction::Poly(complex_coeffs(seed, len, 2.0));
        let m0 = phi.max_modulus(r0).unwrap();
        let m1 = phi.max_modulus(r0 * grow).unwrap();
        prop_assert!(m0 <= m1 * (1.0 + 1e-12) + 1e-12, "M({r0}) = {m0} > {m1}");
    }

    #[test]
    fn zero_statistics_are_monotone(seed in any::<u64>(), n in 32usize..=200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let moduli: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-3..0.999)).collect();
        let zl = ZeroList::synthetic(&moduli).unwrap();
        let stats = zero_stats(&zl, GrowthModel::Power).unwrap();
        for w in stats.blaschke_partial_sums.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        for (i, w) in stats.log_partial_products.windows(2).enumerate() {
            prop_assert!(w[0] >= 0.0 && w[1] >= w[0], "log product dips at {i}");
        }
    }

    #[test]
    fn planted_power_decay_is_recovered(gamma in 0.3f64..3.0) {
        let moduli: Vec<f64> = (1..=1024).map(|k| (-gamma / k as f64).exp()).collect();
        let zl = ZeroList::synthetic(&moduli).unwrap();
        let (fitted, _band) = fit_growth(&zl, GrowthModel::Power).unwrap();
        prop_assert!((fitted - gamma).abs() < 0.03 * gamma, "gamma {gamma} fitted {fitted}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // The radial divergence gate calls three consecutive panel ratios of 0.9
    // a divergence, which caps the boundary weight near alpha = -0.85; the
    // sweep stays inside the supported range.
    #[test]
    fn weighted_disc_measure_is_normalized(alpha in -0.8f64..2.9) {
        match disc_integral(|_| Ok(1.0), alpha, 1e-10).unwrap() {
            DiscIntegral::Convergent { result, .. } => {
                prop_assert!((result.value - 1.0).abs() < 1e-9,
                    "alpha {alpha}: mass {} err {}", result.value, result.error_estimate);
            }
            other => prop_assert!(false, "alpha {alpha}: unexpected {other:?}"),
        }
    }

    #[test]
    fn winding_count_agrees_with_planted_roots(seed in any::<u64>(), degree in 1usize..=6) {
        let roots = seeded_separated_roots(seed, degree, 0.7);
        let f = DiscFunction::taylor(poly_from_roots(&roots));
        let n = count_zeros_disk(&f, 0.8, 1e-9).unwrap();
        prop_assert_eq!(n as usize, degree);
    }

    #[test]
    fn jensen_identity_residual_is_small(seed in any::<u64>(), degree in 2usize..=6) {
        let roots = seeded_separated_roots(seed, degree, 0.8);
        let f = DiscFunction::taylor(poly_from_roots(&roots));
        let residual = jensen_check(&f, 0.9, 1e-8).unwrap();
        prop_assert!(residual < 1e-6, "residual {residual}");
    }
}

#[test]
fn superposition_evaluates_as_weight_times_composition() {
    let phi = EntireFunction::Exp;
    let w = DiscFunction::taylor(vec![c64(1.0, 0.0), c64(-0.3, 0.2), c64(0.1, 0.0)]);
    let f = DiscFunction::taylor(vec![c64(0.2, -0.1), c64(0.7, 0.4), c64(0.0, -0.5)]);
    let s = superpose(&phi, &w, &f);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let z = Complex64::from_polar(rng.gen_range(0.0..0.97f64), rng.gen_range(0.0..std::f64::consts::TAU));
        let direct = w.eval(z).unwrap() * phi.eval(f.eval(z).unwrap()).unwrap();
        let via = s.eval(z).unwrap();
        assert!((direct - via).norm() <= 1e-12 * (1.0 + direct.norm()), "z {z}: {direct} vs {via}");
    }
}

#[test]
fn order_and_type_survive_differentiation() {
    let zoo = [
        EntireFunction::Exp,
        EntireFunction::ScaledExp { lambda: 2.0 },
        EntireFunction::Sin,
        EntireFunction::Cos,
        EntireFunction::CosSqrt,
    ];
    for phi in &zoo {
        let d = phi.derivative();
        let rho = phi.order_estimate(256).unwrap();
        let rho_d = d.order_estimate(256).unwrap();
        assert!((rho - rho_d).abs() <= 0.05, "{phi:?}: order {rho} vs {rho_d}");
        let tau = phi.type_estimate(rho, 256).unwrap();
        let tau_d = d.type_estimate(rho_d, 256).unwrap();
        assert!((tau - tau_d).abs() <= 0.05, "{phi:?}: type {tau} vs {tau_d}");
    }
}

#[test]
fn closed_disc_derivative_sup_dominates_samples() {
    let zoo = [
        EntireFunction::Exp,
        EntireFunction::Cos,
        EntireFunction::Poly(vec![c64(0.3, 0.0), c64(-1.0, 0.5), c64(0.0, 0.0), c64(2.0, -1.0)]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for phi in &zoo {
        let d = phi.derivative();
        let a = d.max_modulus(1.0).unwrap();
        for _ in 0..100 {
            let xi = Complex64::from_polar(rng.gen_range(0.0..1.0f64), rng.gen_range(0.0..std::f64::consts::TAU));
            let v = d.eval(xi).unwrap().norm();
            assert!(v <= a + 1e-9 * (1.0 + a), "{phi:?}: |phi'({xi})| = {v} > A = {a}");
        }
    }
}
