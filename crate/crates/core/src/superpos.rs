//! The weighted superposition operator S(f) = w * phi(f) and the
//! theorem-level experiments built on it: a divergence witness showing a
//! non-constant entire symbol throws Bergman functions out of the Bloch
//! space, a boundedness probe with fully computable proof constants, the
//! pointwise derivative-symbol bound, and the lacunary construction of a
//! weighted-sup function whose zeros break the Blaschke condition.
//!
//! Every experiment returns a ProbeReport: a named experiment, its inputs,
//! the constants the proof manipulates (each reproducible from inputs and
//! seed), a per-sample evidence table, and a verdict from a small enumerated
//! set.  Randomized families are drawn from a seeded stream so reports are
//! bit-reproducible.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::discfun::{ClosedForm, DiscFunction, Factor};
use crate::entire::EntireFunction;
use crate::error::{Error, Result};
use crate::spaces::{
    bergman_norm, bloch_norm, bloch_seminorm_profile, dhinfv_norm, hinfv_norm, Weight,
};
use crate::zeros::{blaschke_compatibility, locate_zeros, Compatibility, ZeroList};

/// Structured result of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub experiment: String,
    pub inputs: Value,
    pub constants: BTreeMap<String, f64>,
    pub samples: Vec<Value>,
    pub verdict: String,
    pub seed: u64,
}

/// S(f) = w * phi(f).  With w identically 1 this is plain superposition.
pub fn superpose(phi: &EntireFunction, w: &DiscFunction, f: &DiscFunction) -> DiscFunction {
    DiscFunction::weighted(w.clone(), DiscFunction::compose_entire(phi.clone(), f.clone()))
}

fn describe_entire(phi: &EntireFunction) -> String {
    match phi {
        EntireFunction::Exp => "exp".into(),
        EntireFunction::ScaledExp { lambda } => format!("exp({lambda} z)"),
        EntireFunction::Sin => "sin".into(),
        EntireFunction::Cos => "cos".into(),
        EntireFunction::CosSqrt => "cos_sqrt".into(),
        EntireFunction::Poly(c) => format!("poly(degree {})", c.len().saturating_sub(1)),
        EntireFunction::Scaled { factor, inner } => {
            format!("{} * ({})", factor, describe_entire(inner))
        }
        EntireFunction::CoeffShift { inner } => format!("derivative of {}", describe_entire(inner)),
    }
}

fn describe_disc(f: &DiscFunction) -> String {
    match f {
        DiscFunction::Taylor { coeffs, .. } => {
            format!("taylor(degree {})", coeffs.len().saturating_sub(1))
        }
        DiscFunction::FactorProduct(fs) => format!("factorprod({} factors)", fs.len()),
        DiscFunction::Closed(c) => match c {
            ClosedForm::Constant(a) => format!("constant({a})"),
            ClosedForm::Identity => "identity".into(),
            ClosedForm::LogOneMinus => "log(1/(1-z))".into(),
            ClosedForm::PowerOneMinus(g) => format!("(1-z)^(-{g})"),
            ClosedForm::RotatedScaled { scale, angle, inner } => {
                format!("{scale} * rot({angle}) ({})", describe_disc(&DiscFunction::Closed((**inner).clone())))
            }
        },
        DiscFunction::ComposedEntire { phi, inner } => {
            format!("{} of {}", describe_entire(phi), describe_disc(inner))
        }
        DiscFunction::Weighted { w, inner } => {
            format!("({}) * ({})", describe_disc(w), describe_disc(inner))
        }
        DiscFunction::Sum(a, b) => format!("({}) + ({})", describe_disc(a), describe_disc(b)),
        DiscFunction::Monomial { coeff, degree } => format!("{coeff} z^{degree}"),
    }
}

/// Hypothesis screen for the boundedness probe: the symbol must have order
/// below one, or order one with vanishing type.
fn subexp_hypothesis(phi: &EntireFunction) -> Result<()> {
    let rho = phi.order_estimate(256)?;
    if rho < 0.9 {
        return Ok(());
    }
    if (rho - 1.0).abs() <= 0.1 {
        let sigma = phi.type_estimate(rho, 256)?;
        if sigma <= 0.05 {
            return Ok(());
        }
        return Err(Error::Hypothesis(format!(
            "symbol must be of order less than one (or order one, type zero): estimated order {rho:.3}, type {sigma:.3}"
        )));
    }
    Err(Error::Hypothesis(format!(
        "symbol must be of order less than one: estimated order {rho:.3}"
    )))
}

fn monic_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, a) in coeffs.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        coeffs = next;
    }
    coeffs
}

/// Roots used by the zero-inheritance part of the Bloch-image witness:
/// six well-separated points inside |z| < 0.6.
fn inheritance_roots() -> [Complex64; 6] {
    [
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.4, 0.0),
        Complex64::new(0.0, 0.35),
        Complex64::new(0.0, -0.35),
        Complex64::new(0.2, 0.55),
        Complex64::new(-0.55, -0.2),
    ]
}

/// Witness experiment for "the image stays in the Bloch space only for
/// constant symbols": certifies f_c = c log(1/(1-z)) in the Bergman space,
/// then watches the Bloch seminorm of exp(f_c) = (1-z)^(-c) blow up along
/// the radial grid (closed form c(1+r)(1-r)^(-c) supplied per row), and
/// checks that the zeros of a known polynomial g survive into
/// w(exp(g) - 1), the zero-inheritance mechanism of the same proof.
pub fn theorem1_witness(p: f64, alpha: f64, c: f64, j_max: u32, tol: f64) -> Result<ProbeReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidSpec(format!("witness scale must be positive, got {c}")));
    }
    if !(4..=40).contains(&j_max) {
        return Err(Error::InvalidSpec(format!("witness grid depth must lie in [4, 40], got {j_max}")));
    }
    let f_c = DiscFunction::rotated_scaled(Complex64::new(c, 0.0), 0.0, ClosedForm::LogOneMinus);
    let cert = bergman_norm(&f_c, p, alpha, tol)?;
    let fc_norm = cert.finite_value().ok_or_else(|| {
        Error::Hypothesis("witness input is not certified in the source Bergman space".into())
    })?;

    let s = superpose(&EntireFunction::Exp, &DiscFunction::constant(Complex64::new(1.0, 0.0)), &f_c);
    let profile = bloch_seminorm_profile(&s, j_max, tol)?;
    let mut samples = Vec::new();
    let mut running: f64 = 0.0;
    let mut sups = Vec::with_capacity(profile.len());
    for row in &profile {
        running = running.max(row.value);
        sups.push(running);
        let closed = c * (1.0 + row.radius) * (1.0 - row.radius).powf(-c);
        samples.push(json!({
            "kind": "seminorm",
            "level": row.level,
            "radius": row.radius,
            "sup": row.value,
            "running_sup": running,
            "closed_form": closed,
        }));
    }
    let last = sups.len() - 1;
    let growth_ratio = if sups[last - 3] > 0.0 { sups[last] / sups[last - 3] } else { f64::INFINITY };

    let roots = inheritance_roots();
    let mut g_coeffs = monic_from_roots(&roots);
    for a in &mut g_coeffs {
        *a *= 0.5;
    }
    let g = DiscFunction::taylor(g_coeffs);
    let w = DiscFunction::taylor(vec![Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0)]);
    let big_f = DiscFunction::weighted(
        w,
        DiscFunction::sum(
            DiscFunction::compose_entire(EntireFunction::Exp, g),
            DiscFunction::constant(Complex64::new(-1.0, 0.0)),
        ),
    );
    let zl = locate_zeros(&big_f, 0.9, tol)?;
    let mut max_distance: f64 = 0.0;
    for r in &roots {
        let (dist, loc) = zl
            .entries
            .iter()
            .map(|e| ((e.location - r).norm(), e.location))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap_or((f64::INFINITY, Complex64::new(0.0, 0.0)));
        max_distance = max_distance.max(dist);
        samples.push(json!({
            "kind": "zero_inheritance",
            "root_re": r.re,
            "root_im": r.im,
            "located_re": loc.re,
            "located_im": loc.im,
            "distance": dist,
            "residual": big_f.eval(*r)?.norm(),
        }));
    }

    let witness = growth_ratio >= 1.5 && max_distance < 1e-8;
    let mut constants = BTreeMap::new();
    constants.insert("c".into(), c);
    constants.insert("p".into(), p);
    constants.insert("alpha".into(), alpha);
    constants.insert("bergman_norm".into(), fc_norm);
    constants.insert("growth_ratio".into(), growth_ratio);
    constants.insert("final_running_sup".into(), sups[last]);
    constants.insert("inheritance_max_distance".into(), max_distance);
    constants.insert("inherited_zero_total".into(), zl.total_count() as f64);
    Ok(ProbeReport {
        experiment: "theorem1_witness".into(),
        inputs: json!({
            "f": format!("{c} * log(1/(1-z))"),
            "phi": "exp",
            "w": "1",
            "p": p,
            "alpha": alpha,
            "j_max": j_max,
        }),
        constants,
        samples,
        verdict: if witness { "witness".into() } else { "inconclusive".into() },
        seed: 0,
    })
}

/// One member of the Bloch-normalized sample family: rotated logarithms,
/// phase-randomized lacunary series, and low-degree random polynomials,
/// each scaled to Bloch norm `k_norm`.
fn bloch_family(k_norm: f64, size: usize, seed: u64, tol: f64) -> Result<Vec<(String, DiscFunction)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut family = Vec::with_capacity(size);
    for i in 0..size {
        match i % 3 {
            0 => {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                let base = DiscFunction::rotated_scaled(Complex64::new(1.0, 0.0), theta, ClosedForm::LogOneMinus);
                let b = required_norm(&bloch_norm(&base, tol)?)?;
                family.push((
                    format!("rotated_log(theta={theta:.4})"),
                    DiscFunction::rotated_scaled(Complex64::new(k_norm / b, 0.0), theta, ClosedForm::LogOneMinus),
                ));
            }
            1 => {
                let mut coeffs = vec![Complex64::new(0.0, 0.0); 513];
                for k in 0..=9u32 {
                    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                    coeffs[1 << k] = Complex64::from_polar(1.0, phase);
                }
                let base = DiscFunction::taylor(coeffs.clone());
                let b = required_norm(&bloch_norm(&base, tol)?)?;
                for a in &mut coeffs {
                    *a *= k_norm / b;
                }
                family.push(("lacunary(512)".into(), DiscFunction::taylor(coeffs)));
            }
            _ => {
                let degree = rng.gen_range(3..=8usize);
                let mut coeffs = vec![Complex64::new(0.0, 0.0)];
                for _ in 1..=degree {
                    coeffs.push(Complex64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)));
                }
                let base = DiscFunction::taylor(coeffs.clone());
                let b = required_norm(&bloch_norm(&base, tol)?)?;
                for a in &mut coeffs {
                    *a *= k_norm / b;
                }
                family.push((format!("random_poly(degree {degree})"), DiscFunction::taylor(coeffs)));
            }
        }
    }
    Ok(family)
}

fn required_norm(v: &crate::spaces::MembershipVerdict) -> Result<f64> {
    v.finite_value().ok_or_else(|| {
        Error::Hypothesis("a sample norm expected to be finite did not stabilize".into())
    })
}

/// Boundedness probe with the proof constants made explicit.  The cap
///   2^(alpha-beta) D^p ((alpha+1)/(beta+1)) |w|_beta^p + M(r0)^p |w|_alpha^p
/// with D = exp((alpha-beta)/p) dominates |S(f)|^p for every Bloch f with
/// norm at most K, provided log M(r)/r <= (alpha-beta)/(2Kp) for r >= r0.
/// The threshold bound is half the naive one because the grid certifies
/// log M only at dyadic radii: between grid points log M(t) <= 2t * bound.
pub fn theorem2_probe(
    phi: &EntireFunction,
    w: &DiscFunction,
    p: f64,
    alpha: f64,
    beta: f64,
    k_norm: f64,
    family_size: usize,
    seed: u64,
    tol: f64,
) -> Result<ProbeReport> {
    if !(p > 0.0) {
        return Err(Error::InvalidSpec(format!("exponent must be positive, got {p}")));
    }
    if !(-1.0 < beta && beta < alpha) {
        return Err(Error::InvalidSpec(format!(
            "weights must satisfy -1 < beta < alpha, got beta = {beta}, alpha = {alpha}"
        )));
    }
    if !(k_norm > 0.0) {
        return Err(Error::InvalidSpec(format!("Bloch norm cap must be positive, got {k_norm}")));
    }
    if family_size == 0 {
        return Err(Error::InvalidSpec("family must not be empty".into()));
    }
    subexp_hypothesis(phi)?;
    let w_beta = bergman_norm(w, p, beta, tol)?;
    let w_beta = w_beta.finite_value().ok_or_else(|| {
        Error::Hypothesis("w is not certified in the source Bergman space".into())
    })?;
    let w_alpha = bergman_norm(w, p, alpha, tol)?;
    let w_alpha = w_alpha.finite_value().ok_or_else(|| {
        Error::Hypothesis("w is not certified in the target Bergman space".into())
    })?;

    let bound = (alpha - beta) / (2.0 * k_norm * p);
    let r0 = phi.subexp_threshold(bound)?;
    let m_r0 = phi.max_modulus(r0)?;
    let d = ((alpha - beta) / p).exp();
    let cap = (alpha - beta).exp2() * d.powf(p) * ((alpha + 1.0) / (beta + 1.0)) * w_beta.powf(p)
        + m_r0.powf(p) * w_alpha.powf(p);

    let family = bloch_family(k_norm, family_size, seed, tol)?;
    let norms: Vec<Result<f64>> = family
        .par_iter()
        .map(|(_, f)| {
            let s = superpose(phi, w, f);
            required_norm(&bergman_norm(&s, p, alpha, tol)?)
        })
        .collect();
    let mut samples = Vec::with_capacity(family.len());
    let mut all_pass = true;
    for (i, ((kind, f), norm)) in family.iter().zip(norms).enumerate() {
        let norm = norm?;
        let bn = required_norm(&bloch_norm(f, tol)?)?;
        let pass = norm.powf(p) <= cap;
        all_pass &= pass;
        samples.push(json!({
            "index": i,
            "kind": kind,
            "bloch_norm": bn,
            "image_norm": norm,
            "image_norm_p": norm.powf(p),
            "pass": pass,
        }));
    }

    let mut constants = BTreeMap::new();
    constants.insert("p".into(), p);
    constants.insert("alpha".into(), alpha);
    constants.insert("beta".into(), beta);
    constants.insert("K".into(), k_norm);
    constants.insert("r0".into(), r0);
    constants.insert("M_r0".into(), m_r0);
    constants.insert("D".into(), d);
    constants.insert("w_norm_beta".into(), w_beta);
    constants.insert("w_norm_alpha".into(), w_alpha);
    constants.insert("cap".into(), cap);
    Ok(ProbeReport {
        experiment: "theorem2_probe".into(),
        inputs: json!({
            "phi": describe_entire(phi),
            "w": describe_disc(w),
            "p": p,
            "alpha": alpha,
            "beta": beta,
            "K": k_norm,
            "family_size": family_size,
        }),
        constants,
        samples,
        verdict: if all_pass { "bounded-consistent".into() } else { "cap-violated".into() },
        seed,
    })
}

/// Bounded polynomial family for the derivative-symbol check: random
/// low-degree Taylor polynomials with coefficient mass at most `cap`, so
/// |f| <= cap on the closed disc.
fn bounded_family(cap: f64, size: usize, seed: u64) -> Vec<DiscFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut family = Vec::with_capacity(size);
    for _ in 0..size {
        let degree = rng.gen_range(2..=6usize);
        let mut coeffs: Vec<Complex64> = (0..=degree)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mass: f64 = coeffs.iter().map(|a| a.norm()).sum();
        let target = cap * rng.gen_range(0.3..1.0);
        for a in &mut coeffs {
            *a *= target / mass;
        }
        family.push(DiscFunction::taylor(coeffs));
    }
    family
}

fn poly_sup_norm(f: &DiscFunction) -> Result<f64> {
    match f {
        DiscFunction::Taylor { coeffs, .. } => {
            EntireFunction::Poly(coeffs.clone()).max_modulus(1.0)
        }
        _ => Err(Error::InvalidSpec("sup norm shortcut expects a polynomial sample".into())),
    }
}

const THETA_GRID: usize = 64;

/// Pointwise check behind "a bounded S_phi forces a bounded S_phi'": with
/// A = max of |phi'| on the closed unit disc and L estimated from the
/// rotated samples 2 e^(i theta) f (the proof trick covering the circle of
/// radius 2|f(z)|), every family member satisfies
///   v(z) |phi'(f(z))| <= max(A v(0), L |f|_X)
/// on the radial grid.  With `deriv` set the same argument runs one
/// derivative higher (the weighted-derivative target space): the check is
///   v(z) |phi''(f(z))| |f'(z)| <= max(A2 B_f, L_D |f|_X)
/// with A2 the max of |phi''| and B_f the weighted sup norm of f'.
pub fn theorem4_check(
    phi: &EntireFunction,
    v: &Weight,
    family_size: usize,
    seed: u64,
    deriv: bool,
    tol: f64,
) -> Result<ProbeReport> {
    v.validate()?;
    if family_size == 0 {
        return Err(Error::InvalidSpec("family must not be empty".into()));
    }
    let dphi = phi.derivative();
    let a_const = dphi.max_modulus(1.0)?;
    let v0 = v.eval(0.0);
    let one = DiscFunction::constant(Complex64::new(1.0, 0.0));
    let family = bounded_family(3.0, family_size, seed);
    let sup_norms: Vec<f64> = family.iter().map(poly_sup_norm).collect::<Result<Vec<_>>>()?;

    // L estimate: max over family and rotation angles of
    // |S_phi(2 e^(i theta) f)|_v / (2 |f|_X).
    let jobs: Vec<(usize, usize)> = (0..family.len())
        .flat_map(|i| (0..THETA_GRID).map(move |k| (i, k)))
        .collect();
    let estimate = |target_deriv: bool| -> Result<f64> {
        let vals: Vec<Result<f64>> = jobs
            .par_iter()
            .map(|&(i, k)| {
                let fx = sup_norms[i];
                if fx < 1e-12 {
                    return Ok(0.0);
                }
                let theta = std::f64::consts::TAU * k as f64 / THETA_GRID as f64;
                let rot = Complex64::from_polar(2.0, theta);
                let g = scale_taylor(&family[i], rot)?;
                let s = superpose(phi, &one, &g);
                let n = if target_deriv { dhinfv_norm(&s, v, tol)? } else { hinfv_norm(&s, v, tol)? };
                let val = n.finite_value().ok_or_else(|| {
                    Error::Hypothesis(
                        "the superposition image is not bounded in the weighted target on the sample family".into(),
                    )
                })?;
                Ok(val / (2.0 * fx))
            })
            .collect();
        let mut l_hat: f64 = 0.0;
        for v in vals {
            l_hat = l_hat.max(v?);
        }
        Ok(l_hat)
    };
    let l_hat = estimate(false)?;
    let l_hat_d = if deriv { estimate(true)? } else { 0.0 };
    let d2phi = dphi.derivative();
    let a2 = if deriv { d2phi.max_modulus(1.0)? } else { 0.0 };

    let slack = tol.max(1e-8);
    let mut samples = Vec::with_capacity(family.len());
    let mut all_pass = true;
    for (i, f) in family.iter().enumerate() {
        let fx = sup_norms[i];
        let df = f.derivative();
        let b_f = if deriv { required_norm(&hinfv_norm(&df, v, tol)?)? } else { 0.0 };
        let cap_plain = (a_const * v0).max(l_hat * fx) + slack;
        let cap_deriv = (a2 * b_f).max(l_hat_d * fx) + slack;
        let mut worst_plain: f64 = 0.0;
        let mut worst_deriv: f64 = 0.0;
        for j in 0..=24u32 {
            let r = 1.0 - 0.5f64.powi(j as i32);
            let vr = v.eval(r);
            for k in 0..64 {
                let z = Complex64::from_polar(r, std::f64::consts::TAU * (k as f64 + 0.37) / 64.0);
                let u = f.eval(z)?;
                let lhs = vr * dphi.eval(u)?.norm();
                worst_plain = worst_plain.max(lhs);
                if deriv {
                    let lhs2 = vr * d2phi.eval(u)?.norm() * df.eval(z)?.norm();
                    worst_deriv = worst_deriv.max(lhs2);
                }
            }
        }
        let pass = worst_plain <= cap_plain && (!deriv || worst_deriv <= cap_deriv);
        all_pass &= pass;
        let mut row = json!({
            "index": i,
            "sup_norm": fx,
            "worst_lhs": worst_plain,
            "bound": cap_plain,
            "pass": pass,
        });
        if deriv {
            row["worst_lhs_deriv"] = json!(worst_deriv);
            row["bound_deriv"] = json!(cap_deriv);
            row["weighted_derivative_norm"] = json!(b_f);
        }
        samples.push(row);
    }

    let mut constants = BTreeMap::new();
    constants.insert("A".into(), a_const);
    constants.insert("L".into(), l_hat);
    constants.insert("v0".into(), v0);
    if deriv {
        constants.insert("A2".into(), a2);
        constants.insert("L_deriv".into(), l_hat_d);
    }
    Ok(ProbeReport {
        experiment: if deriv { "theorem4_check(deriv)".into() } else { "theorem4_check".into() },
        inputs: json!({
            "phi": describe_entire(phi),
            "weight": v,
            "family_size": family_size,
            "deriv": deriv,
        }),
        constants,
        samples,
        verdict: if all_pass {
            "derivative-bounded-consistent".into()
        } else {
            "pointwise-violated".into()
        },
        seed,
    })
}

fn scale_taylor(f: &DiscFunction, factor: Complex64) -> Result<DiscFunction> {
    match f {
        DiscFunction::Taylor { coeffs, .. } => {
            Ok(DiscFunction::taylor(coeffs.iter().map(|a| a * factor).collect()))
        }
        _ => Err(Error::InvalidSpec("rotation shortcut expects a polynomial sample".into())),
    }
}

/// Number of radii in the lacunary construction grid.
pub const CONSTRUCTION_GRID: u32 = 24;

/// Build a factor product Prod(1 + c z^(n_k)) whose weighted sup norm is
/// certified finite while its zero sequence fails the Blaschke condition.
/// The gaps n_k are chosen greedily so that c sum_k r^(n_k) stays below
/// half of log psi(r) at every grid radius where psi(r) > e^2, giving the
/// membership certificate v(r)|f(r)| <= sqrt(v(r)); each factor then
/// contributes about log c to the Blaschke sums, which therefore diverge.
pub fn corollary1_construction(
    v: &Weight,
    depth: u32,
    c: f64,
    tol: f64,
) -> Result<(DiscFunction, ZeroList, ProbeReport)> {
    v.validate()?;
    if !(c > 1.0) {
        return Err(Error::InvalidSpec(format!("factor scale must exceed 1, got {c}")));
    }
    if depth == 0 || depth > 64 {
        return Err(Error::InvalidSpec(format!("depth must lie in [1, 64], got {depth}")));
    }
    if v.eval(0.0) > 1.0 + 1e-12 {
        return Err(Error::InvalidSpec(
            "construction needs v(0) <= 1 so that psi = 1/v is a growth function".into(),
        ));
    }
    let grid: Vec<(u32, f64, f64)> = (1..=CONSTRUCTION_GRID)
        .map(|j| {
            let r = 1.0 - 0.5f64.powi(j as i32);
            (j, r, v.psi(r).ln())
        })
        .collect();
    let active: Vec<(f64, f64)> = grid
        .iter()
        .filter(|(_, _, lp)| *lp > 2.0)
        .map(|(_, r, lp)| (*r, *lp))
        .collect();
    if active.is_empty() {
        return Err(Error::Hypothesis(
            "psi = 1/v never exceeds e^2 on the construction grid; no gap sequence exists".into(),
        ));
    }

    let mut factors: Vec<Factor> = Vec::with_capacity(depth as usize);
    let mut prev_n = 0u64;
    let mut reduced = false;
    'outer: for k in 1..=depth {
        let budget = 0.5f64.powi(k as i32);
        let mut need = prev_n + 1;
        for &(r, lp) in &active {
            let t = budget * 0.5 * lp / c;
            if t >= 1.0 {
                continue;
            }
            let n_req = (t.ln() / r.ln()).ceil();
            if !(n_req < 9.0e15) {
                reduced = true;
                break 'outer;
            }
            need = need.max(n_req as u64);
        }
        factors.push(Factor { c, n: need });
        prev_n = need;
    }
    if factors.is_empty() {
        return Err(Error::Hypothesis(
            "the first gap already overflows the representable range".into(),
        ));
    }
    let f = DiscFunction::factor_product(factors.clone())?;
    let zl = ZeroList::from_factor_product(&factors);

    // Membership certificate at every grid radius, active or not.
    let mut samples = Vec::new();
    let mut cert_ok = true;
    for &(j, r, lp) in &grid {
        let fr = f.eval(Complex64::new(r, 0.0))?.norm();
        let vr = v.eval(r);
        let bound = vr.sqrt();
        let pass = vr * fr <= bound * (1.0 + 1e-12);
        cert_ok &= pass;
        samples.push(json!({
            "kind": "certificate",
            "level": j,
            "radius": r,
            "weighted_value": vr * fr,
            "bound": bound,
            "log_psi": lp,
            "active": lp > 2.0,
            "pass": pass,
        }));
    }

    // Blaschke partial sums factor by factor: each adds roughly log c.
    let mut partial = 0.0;
    for (k, fac) in factors.iter().enumerate() {
        let n = fac.n as f64;
        let contribution = -n * (-fac.c.ln() / n).exp_m1();
        partial += contribution;
        samples.push(json!({
            "kind": "factor",
            "k": k + 1,
            "n": fac.n,
            "modulus": (-fac.c.ln() / n).exp(),
            "blaschke_contribution": contribution,
            "blaschke_partial_sum": partial,
        }));
    }
    let compat = blaschke_compatibility(&zl)?;

    let mut constants = BTreeMap::new();
    constants.insert("c".into(), c);
    constants.insert("depth_requested".into(), depth as f64);
    constants.insert("depth_achieved".into(), factors.len() as f64);
    constants.insert("blaschke_sum_total".into(), partial);
    constants.insert("zero_total".into(), zl.total_count() as f64);
    constants.insert("grid_levels".into(), CONSTRUCTION_GRID as f64);
    constants.insert("tol".into(), tol);
    let verdict = if !cert_ok {
        "certificate-failed"
    } else if reduced {
        "depth-reduced"
    } else if compat == Compatibility::Incompatible {
        "constructed-non-blaschke"
    } else {
        "inconclusive"
    };
    let report = ProbeReport {
        experiment: "corollary1_construction".into(),
        inputs: json!({ "weight": v, "depth": depth, "c": c }),
        constants,
        samples,
        verdict: verdict.into(),
        seed: 0,
    };
    Ok((f, zl, report))
}

/// Desk-scale companion of the log-weight corollary: the logarithm lies in
/// both the Bloch space and the log-weighted sup space, and the same
/// exponential image that leaves the Bloch space leaves it from the
/// weighted space too.
pub fn corollary2_experiment(j_max: u32, tol: f64) -> Result<ProbeReport> {
    if !(4..=40).contains(&j_max) {
        return Err(Error::InvalidSpec(format!("grid depth must lie in [4, 40], got {j_max}")));
    }
    let log = DiscFunction::log_one_minus();
    let bl = required_norm(&bloch_norm(&log, tol)?)?;
    let hv = required_norm(&hinfv_norm(&log, &Weight::Log, tol)?)?;
    let f2 = DiscFunction::rotated_scaled(Complex64::new(2.0, 0.0), 0.0, ClosedForm::LogOneMinus);
    let hv2 = required_norm(&hinfv_norm(&f2, &Weight::Log, tol)?)?;

    let s = superpose(&EntireFunction::Exp, &DiscFunction::constant(Complex64::new(1.0, 0.0)), &f2);
    let profile = bloch_seminorm_profile(&s, j_max, tol)?;
    let mut samples = Vec::new();
    let mut running: f64 = 0.0;
    let mut sups = Vec::with_capacity(profile.len());
    for row in &profile {
        running = running.max(row.value);
        sups.push(running);
        samples.push(json!({
            "kind": "seminorm",
            "level": row.level,
            "radius": row.radius,
            "sup": row.value,
            "running_sup": running,
        }));
    }
    let last = sups.len() - 1;
    let growth_ratio = if sups[last - 3] > 0.0 { sups[last] / sups[last - 3] } else { f64::INFINITY };

    let mut constants = BTreeMap::new();
    constants.insert("bloch_norm_log".into(), bl);
    constants.insert("hinfv_norm_log".into(), hv);
    constants.insert("hinfv_norm_f".into(), hv2);
    constants.insert("growth_ratio".into(), growth_ratio);
    Ok(ProbeReport {
        experiment: "corollary2_experiment".into(),
        inputs: json!({ "f": "2 * log(1/(1-z))", "phi": "exp", "weight": "log", "j_max": j_max }),
        constants,
        samples,
        verdict: if growth_ratio >= 1.5 { "witness".into() } else { "inconclusive".into() },
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn superpose_closed_forms() {
        let one = DiscFunction::constant(c64(1.0, 0.0));
        let s = superpose(&EntireFunction::Exp, &one, &DiscFunction::constant(c64(0.0, 0.0)));
        assert!((s.eval(c64(0.3, 0.2)).unwrap() - c64(1.0, 0.0)).norm() < 1e-15);

        let f2 = DiscFunction::rotated_scaled(c64(2.0, 0.0), 0.0, ClosedForm::LogOneMinus);
        let s = superpose(&EntireFunction::Exp, &one, &f2);
        assert!((s.eval(c64(0.5, 0.0)).unwrap() - c64(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn superpose_constant_symbol_scales_weight() {
        let a = c64(0.0, 2.0);
        let phi = EntireFunction::constant(a);
        let w = DiscFunction::taylor(vec![c64(0.5, 0.0), c64(0.25, 0.0)]);
        let f = DiscFunction::log_one_minus();
        let s = superpose(&phi, &w, &f);
        for z in [c64(0.0, 0.0), c64(0.4, -0.3), c64(-0.7, 0.1)] {
            let got = s.eval(z).unwrap();
            let want = a * w.eval(z).unwrap();
            assert!((got - want).norm() < 1e-14);
        }
        let sn = bloch_norm(&s, 1e-9).unwrap().finite_value().unwrap();
        let wn = bloch_norm(&w, 1e-9).unwrap().finite_value().unwrap();
        assert!((sn - 2.0 * wn).abs() < 1e-8, "{sn} vs {wn}");
    }

    #[test]
    fn witness_for_square_log() {
        let report = theorem1_witness(2.0, 0.0, 2.0, 12, 1e-8).unwrap();
        assert_eq!(report.verdict, "witness");
        assert!(report.constants["final_running_sup"] > 1e3);
        assert!(report.constants["growth_ratio"] >= 1.8f64.powi(3));
        assert!(report.constants["inheritance_max_distance"] < 1e-8);
        assert!((report.constants["inherited_zero_total"] - 6.0).abs() < 0.5);
        // Scanned seminorms track the closed form c(1+r)(1-r)^(-c).
        for row in &report.samples {
            if row["kind"] == "seminorm" && row["level"].as_u64().unwrap() >= 1 {
                let sup = row["sup"].as_f64().unwrap();
                let cf = row["closed_form"].as_f64().unwrap();
                assert!((sup - cf).abs() <= 1e-6 * cf, "{sup} vs {cf}");
            }
        }
    }

    #[test]
    fn witness_for_gentle_scales() {
        for c in [0.5, 1.0] {
            let report = theorem1_witness(2.0, 0.0, c, 12, 1e-8).unwrap();
            assert_eq!(report.verdict, "witness", "c={c}");
        }
    }

    #[test]
    fn probe_cos_sqrt_is_bounded_consistent() {
        let report = theorem2_probe(
            &EntireFunction::CosSqrt,
            &DiscFunction::constant(c64(1.0, 0.0)),
            2.0,
            1.0,
            0.0,
            1.0,
            6,
            7,
            1e-8,
        )
        .unwrap();
        assert_eq!(report.verdict, "bounded-consistent");
        assert_eq!(report.constants["r0"], 16.0);
        // cosh(4)^2 + 2 e (alpha+1)/(beta+1): frozen arithmetic.
        assert!((report.constants["cap"] - 756.612).abs() < 0.05, "{}", report.constants["cap"]);
        assert!(report.samples.iter().all(|s| s["pass"].as_bool().unwrap()));
        assert!(report.samples.iter().all(|s| s["image_norm_p"].as_f64().unwrap() < 100.0));
    }

    #[test]
    fn probe_polynomial_symbol() {
        let phi = EntireFunction::Poly(vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let report = theorem2_probe(
            &phi,
            &DiscFunction::constant(c64(1.0, 0.0)),
            2.0,
            1.0,
            0.0,
            1.0,
            3,
            11,
            1e-8,
        )
        .unwrap();
        assert_eq!(report.verdict, "bounded-consistent");
    }

    #[test]
    fn probe_rejects_exponential_symbol() {
        let err = theorem2_probe(
            &EntireFunction::Exp,
            &DiscFunction::constant(c64(1.0, 0.0)),
            2.0,
            1.0,
            0.0,
            1.0,
            3,
            1,
            1e-8,
        )
        .unwrap_err();
        match err {
            Error::Hypothesis(msg) => assert!(msg.contains("order less than one"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn derivative_symbol_check_exp() {
        let report = theorem4_check(&EntireFunction::Exp, &Weight::StandardPower { gamma: 1.0 }, 4, 3, false, 1e-8).unwrap();
        assert_eq!(report.verdict, "derivative-bounded-consistent");
        assert!((report.constants["A"] - std::f64::consts::E).abs() < 1e-9);
        assert!(report.constants["L"] > 0.0);
    }

    #[test]
    fn derivative_symbol_check_poly_with_deriv_flag() {
        let phi = EntireFunction::Poly(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let report = theorem4_check(&phi, &Weight::StandardPower { gamma: 1.0 }, 4, 5, true, 1e-8).unwrap();
        assert_eq!(report.verdict, "derivative-bounded-consistent");
        // A = max |3u^2 + 1| on |u| = 1 is 4.
        assert!((report.constants["A"] - 4.0).abs() < 1e-9);
        assert!(report.constants.contains_key("A2") && report.constants.contains_key("L_deriv"));
    }

    #[test]
    fn lacunary_construction_log_weight() {
        let (f, zl, report) = corollary1_construction(&Weight::Log, 8, std::f64::consts::E, 1e-8).unwrap();
        assert_eq!(report.verdict, "constructed-non-blaschke");
        assert_eq!(report.constants["depth_achieved"], 8.0);
        assert!(report.constants["blaschke_sum_total"] > 5.0);
        // First gap activates around level 24 of the grid.
        let n1 = match &f {
            DiscFunction::FactorProduct(fs) => fs[0].n,
            _ => unreachable!(),
        };
        assert!((2.0e7..2.6e7).contains(&(n1 as f64)), "{n1}");
        assert!(zl.total_count() > 1 << 27);
        assert!(report
            .samples
            .iter()
            .filter(|s| s["kind"] == "certificate")
            .all(|s| s["pass"].as_bool().unwrap()));
        assert_eq!(
            report.samples.iter().filter(|s| s["kind"] == "certificate").count(),
            24
        );
    }

    #[test]
    fn construction_rejects_large_central_value() {
        // Valid weight, but v(0) > 1 breaks the membership certificate:
        // at radii where psi < e the bound sqrt(v) < 1 <= |f| must fail.
        let knots = (0..=21)
            .map(|j| (1.0 - 0.5f64.powi(j), 2.0 * 0.5f64.powi(j)))
            .collect();
        let v = Weight::Custom { knots };
        assert!(v.validate().is_ok());
        let err = corollary1_construction(&v, 4, 2.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)), "{err:?}");
    }

    #[test]
    fn log_weight_companion() {
        let report = corollary2_experiment(12, 1e-8).unwrap();
        assert_eq!(report.verdict, "witness");
        assert!((report.constants["bloch_norm_log"] - 2.0).abs() < 1e-5);
        let hv = report.constants["hinfv_norm_log"];
        assert!(hv > 0.9 && hv <= 1.0 + 1e-9, "{hv}");
    }
}
