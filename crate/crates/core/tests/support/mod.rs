//! Shared oracles for the integration tests: polynomial construction from
//! roots, Horner evaluation, and a Durand-Kerner root finder kept
//! deliberately independent of the library's subdivision locator.

// Each test target compiles its own copy and none uses every helper.
#![allow(dead_code)]

use num_complex::Complex64;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coefficients (ascending) of the monic polynomial with the given roots.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![c64(1.0, 0.0)];
    for r in roots {
        let mut next = vec![c64(0.0, 0.0); coeffs.len() + 1];
        for (i, a) in coeffs.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        coeffs = next;
    }
    coeffs
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = c64(0.0, 0.0);
    for a in coeffs.iter().rev() {
        acc = acc * z + a;
    }
    acc
}

/// All roots of a polynomial by Durand-Kerner iteration.  The input need not
/// be monic; the leading coefficient is divided out.  Panics when the
/// iteration fails to settle, which on the test fixtures means a bug.
pub fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    assert!(degree >= 1, "constant polynomial has no roots");
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|a| a / lead).collect();
    let seed = c64(0.4, 0.9);
    let mut zs: Vec<Complex64> = (0..degree).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..degree {
            let mut denom = c64(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= zs[i] - zs[j];
                }
            }
            let step = horner(&monic, zs[i]) / denom;
            zs[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-13 {
            return zs;
        }
    }
    panic!("Durand-Kerner did not converge");
}

/// Greedy nearest-neighbour pairing; returns the largest paired distance.
pub fn pairing_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "point sets differ in size");
    let mut free: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for p in a {
        let (idx, dist) = free
            .iter()
            .enumerate()
            .map(|(i, q)| (i, (p - q).norm()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .expect("non-empty");
        worst = worst.max(dist);
        free.swap_remove(idx);
    }
    worst
}
