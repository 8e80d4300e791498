//! Cross-checks against oracles computed by independent routes: gamma
//! function closed forms, finite differences, mean-value formulas for
//! logarithms, and Durand-Kerner roots.

mod support;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use disclab::{bergman_norm, jensen_mean, locate_zeros, DiscFunction, EntireFunction};
use support::{c64, durand_kerner, pairing_distance, poly_from_roots};

fn monomial(n: usize) -> DiscFunction {
    let mut coeffs = vec![c64(0.0, 0.0); n + 1];
    coeffs[n] = c64(1.0, 0.0);
    DiscFunction::taylor(coeffs)
}

#[test]
fn monomial_bergman_norms_match_gamma_oracle() {
    // |z^n| in A^p_alpha has p-th power (alpha+1) B(np/2 + 1, alpha + 1).
    for p in [1.0, 2.0] {
        for alpha in [-0.5, 0.0, 1.0, 2.7] {
            for n in 0..=6usize {
                let q = n as f64 * p / 2.0;
                let expect = ((ln_gamma(q + 1.0) + ln_gamma(alpha + 2.0)
                    - ln_gamma(q + alpha + 2.0))
                    / p)
                    .exp();
                let got = bergman_norm(&monomial(n), p, alpha, 1e-10)
                    .unwrap()
                    .finite_value()
                    .unwrap();
                assert!(
                    (got - expect).abs() < 1e-8,
                    "p={p} alpha={alpha} n={n}: {got} vs {expect}"
                );
            }
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let zoo: Vec<DiscFunction> = vec![
        DiscFunction::taylor(vec![c64(0.3, -0.2), c64(1.0, 0.5), c64(-0.7, 0.0), c64(0.0, 2.0)]),
        DiscFunction::log_one_minus(),
        DiscFunction::power_one_minus(1.5),
        DiscFunction::factor_product(vec![
            disclab::Factor { c: 1.5, n: 3 },
            disclab::Factor { c: 2.0, n: 8 },
        ])
        .unwrap(),
        DiscFunction::compose_entire(
            EntireFunction::Exp,
            DiscFunction::taylor(vec![c64(0.0, 0.0), c64(0.8, 0.1)]),
        ),
        DiscFunction::weighted(
            DiscFunction::taylor(vec![c64(1.0, 0.0), c64(-0.5, 0.0)]),
            DiscFunction::log_one_minus(),
        ),
        DiscFunction::sum(
            DiscFunction::compose_entire(EntireFunction::CosSqrt, DiscFunction::identity()),
            DiscFunction::constant(c64(-0.25, 0.0)),
        ),
    ];
    let points = [c64(0.1, 0.2), c64(-0.3, 0.4), c64(0.5, -0.1), c64(-0.2, -0.6), c64(0.0, 0.0)];
    let h = 1e-6;
    for (i, f) in zoo.iter().enumerate() {
        let d = f.derivative();
        for z in points {
            let fd = (f.eval(z + c64(h, 0.0)).unwrap() - f.eval(z - c64(h, 0.0)).unwrap())
                / c64(2.0 * h, 0.0);
            let exact = d.eval(z).unwrap();
            let scale = 1.0 + exact.norm();
            assert!(
                (fd - exact).norm() < 1e-5 * scale,
                "zoo[{i}] at {z}: finite diff {fd} vs exact {exact}"
            );
        }
    }
}

fn seeded_roots(rng: &mut ChaCha8Rng, count: usize, max_modulus: f64) -> Vec<Complex64> {
    // Rejection keeps roots separated so multiplicity-one assumptions hold.
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

#[test]
fn locate_zeros_matches_durand_kerner() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..10 {
        let degree = rng.gen_range(3..=7usize);
        let coeffs = poly_from_roots(&seeded_roots(&mut rng, degree, 0.75));
        let oracle = durand_kerner(&coeffs);
        let zl = locate_zeros(&DiscFunction::taylor(coeffs), 0.85, 1e-9).unwrap();
        assert!(zl.complete, "trial {trial} incomplete");
        let located: Vec<Complex64> = zl.entries.iter().map(|e| e.location).collect();
        assert_eq!(located.len(), degree, "trial {trial}");
        let worst = pairing_distance(&oracle, &located);
        assert!(worst < 1e-7, "trial {trial}: worst pairing distance {worst}");
    }
}

#[test]
fn jensen_mean_matches_mean_value_oracle() {
    // Circle mean of log|z - a| over |z| = r is max(log r, log|a|), so for
    // a monic polynomial the Jensen mean is the sum over roots.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let r: f64 = 0.9;
    for trial in 0..8 {
        let degree = rng.gen_range(2..=6usize);
        let roots = seeded_roots(&mut rng, degree, 0.8);
        let f = DiscFunction::taylor(poly_from_roots(&roots));
        let expect: f64 = roots.iter().map(|z| r.ln().max(z.norm().ln())).sum();
        let got = jensen_mean(&f, r, 1e-9).unwrap().value;
        assert!((got - expect).abs() < 1e-7, "trial {trial}: {got} vs {expect}");
    }
}
