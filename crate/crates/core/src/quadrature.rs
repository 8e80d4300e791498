//! Quadrature over circles and the unit disc.
//!
//! Circle means use the trapezoid rule with node doubling, which is
//! spectrally accurate for smooth periodic integrands; a budget-capped
//! adaptive Gauss-Legendre fallback covers integrands with sharp angular
//! features (log-modulus near a zero, narrow peaks).
//!
//! Disc integrals are reduced to a radial integral of circle means over
//! geometric panels accumulating at the boundary: [0, 1/2] and then
//! [1 - 2^-j, 1 - 2^-(j+1)] up to j = 40.  On each panel a 16-point
//! Gauss-Legendre rule is paired with an 8-point rule for an error estimate.
//! Panel sums of boundary-concentrated integrands behave geometrically, so
//! the truncated tail is extrapolated from the observed panel ratio and the
//! extrapolation error is charged against the ratio's drift.  Sustained panel
//! ratios at or above one are reported as divergence together with a rough
//! classification of its strength.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A quadrature value with its accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

/// Outcome of a disc integral: either a value with error accounting or
/// structured evidence of divergence.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscIntegral {
    Convergent {
        result: QuadResult<f64>,
        panel_values: Vec<f64>,
    },
    Divergent {
        /// Sum of the panels computed before divergence was called.
        partial: f64,
        /// Sustained ratio between consecutive panel contributions.
        growth_ratio: f64,
        panel_values: Vec<f64>,
        classification: DivergenceClass,
    },
}

/// Rough strength of a detected divergence.  A panel ratio q corresponds to
/// an integrand growing like (1-r)^{-s} with s = 1 + log2(q); ratios near
/// one indicate a logarithmic divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceClass {
    Logarithmic,
    Power { exponent_hint: f64 },
}

/// 16-point Gauss-Legendre rule on [-1, 1], positive-abscissa half.
const GL16: [(f64, f64); 8] = [
    (0.0950125098376374, 0.1894506104550685),
    (0.2816035507792589, 0.1826034150449236),
    (0.4580167776572274, 0.1691565193950025),
    (0.6178762444026438, 0.1495959888165767),
    (0.7554044083550030, 0.1246289712555339),
    (0.8656312023878318, 0.0951585116824928),
    (0.9445750230732326, 0.0622535239386479),
    (0.9894009349916499, 0.0271524594117541),
];

/// 8-point Gauss-Legendre rule on [-1, 1], positive-abscissa half.
const GL8: [(f64, f64); 4] = [
    (0.1834346424956498, 0.3626837833783620),
    (0.5255324099163290, 0.3137066458778873),
    (0.7966664774136267, 0.2223810344533745),
    (0.9602898564975363, 0.1012285362903763),
];

const CIRCLE_NODES_MAX: usize = 1 << 20;
const CIRCLE_PANEL_BUDGET: usize = 4096;
const RADIAL_PANELS_MAX: u32 = 40;

/// Mean of a real function of the angle over a full turn.
pub fn circle_mean<F>(sample: F, tol: f64) -> Result<QuadResult<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let r = circle_mean_complex(|t| sample(t).map(|v| Complex64::new(v, 0.0)), tol)?;
    Ok(QuadResult {
        value: r.value.re,
        error_estimate: r.error_estimate,
        nodes_used: r.nodes_used,
        converged: r.converged,
    })
}

/// Mean of a complex function of the angle over a full turn.
pub fn circle_mean_complex<F>(sample: F, tol: f64) -> Result<QuadResult<Complex64>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let tau = std::f64::consts::TAU;
    let probe = |t: f64| -> Result<Complex64> {
        let v = sample(t)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "circle sample not finite at angle {t}"
            )));
        }
        Ok(v)
    };

    let mut m = 16usize;
    let mut nodes = 0usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..m {
        acc += probe(tau * k as f64 / m as f64)?;
    }
    nodes += m;
    let mut mean = acc / m as f64;
    let mut stable_runs = 0u32;
    let mut last_gap = f64::INFINITY;
    while m < CIRCLE_NODES_MAX {
        let mut odd = Complex64::new(0.0, 0.0);
        for k in 0..m {
            odd += probe(tau * (k as f64 + 0.5) / m as f64)?;
        }
        nodes += m;
        let refined = (mean + odd / m as f64) * 0.5;
        last_gap = (refined - mean).norm();
        if last_gap <= tol * (1.0 + refined.norm()) {
            stable_runs += 1;
        } else {
            stable_runs = 0;
        }
        mean = refined;
        m *= 2;
        if stable_runs >= 2 {
            return Ok(QuadResult { value: mean, error_estimate: last_gap, nodes_used: nodes, converged: true });
        }
    }

    // Doubling exhausted: the integrand has features the uniform grid cannot
    // settle.  Bisect adaptively with a Gauss pair on the worst panel.
    let mut panels: Vec<(f64, f64, Complex64, f64)> = Vec::new();
    for k in 0..8 {
        let (a, b) = (tau * k as f64 / 8.0, tau * (k + 1) as f64 / 8.0);
        let (v, e, n) = gl_pair(&probe, a, b)?;
        nodes += n;
        panels.push((a, b, v, e));
    }
    loop {
        let total: Complex64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= tol * tau * (1.0 + total.norm() / tau) {
            return Ok(QuadResult { value: total / tau, error_estimate: err / tau, nodes_used: nodes, converged: true });
        }
        if panels.len() >= CIRCLE_PANEL_BUDGET {
            return Ok(QuadResult {
                value: total / tau,
                error_estimate: (err / tau).max(last_gap),
                nodes_used: nodes,
                converged: false,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (a, b, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (v, e, n) = gl_pair(&probe, lo, hi)?;
            nodes += n;
            panels.push((lo, hi, v, e));
        }
    }
}

/// Paired 16/8-point Gauss-Legendre estimate of the integral over [a, b];
/// returns (value, error estimate, evaluations).
fn gl_pair<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64, usize)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut v16 = Complex64::new(0.0, 0.0);
    for (x, w) in GL16 {
        v16 += (f(mid + half * x)? + f(mid - half * x)?) * w;
    }
    v16 *= half;
    let mut v8 = Complex64::new(0.0, 0.0);
    for (x, w) in GL8 {
        v8 += (f(mid + half * x)? + f(mid - half * x)?) * w;
    }
    v8 *= half;
    Ok((v16, (v16 - v8).norm(), 40))
}

/// Integral of g against the normalized weighted area measure
/// (alpha+1) (1-|z|^2)^alpha dA(z) on the unit disc (total mass one for
/// g = 1).  The weight is evaluated here, in the boundary distance s = 1-r,
/// because (1-r^2) recomputed from coordinates loses every significant digit
/// once s drops below roundoff of 1; as s(2-s) it stays exact.  The integrand
/// is sampled pointwise; a value overflow while sampling is treated as
/// divergence of the integral.
pub fn disc_integral<G>(g: G, alpha: f64, tol: f64) -> Result<DiscIntegral>
where
    G: Fn(Complex64) -> Result<f64>,
{
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::InvalidSpec(format!("weight exponent must exceed -1, got {alpha}")));
    }
    let theta_tol = (tol / 8.0).max(1e-14);
    let mut nodes = 0usize;
    let mut partial = 0.0f64;
    let mut gl_err = 0.0f64;
    let mut panel_values: Vec<f64> = Vec::new();

    // Radial profile h(s) built from the circle mean at r = 1 - s; the
    // integral is 2 int_0^1 w(r) mean(r) r dr written in s = 1 - r, with
    // 1 - r^2 = s(2 - s).
    let mut radial = |s: f64| -> Result<f64> {
        let r = 1.0 - s;
        let w = (alpha + 1.0) * (s * (2.0 - s)).powf(alpha);
        let m = circle_mean(|t| g(Complex64::from_polar(r, t)), theta_tol)?;
        nodes += m.nodes_used;
        if !m.converged {
            return Err(Error::ToleranceNotMet { achieved: m.error_estimate, requested: theta_tol });
        }
        Ok(2.0 * r * w * m.value)
    };

    let panel = |j: u32, radial: &mut dyn FnMut(f64) -> Result<f64>| -> Result<(f64, f64)> {
        // Panel j covers s in [2^-(j+1), 2^-j] except the first, which spans
        // [1/2, 1] (that is, r in [0, 1/2]).
        let (lo, hi) = if j == 0 { (0.5, 1.0) } else { (0.5f64.powi(j as i32 + 1), 0.5f64.powi(j as i32)) };
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut v16 = 0.0;
        for (x, w) in GL16 {
            v16 += (radial(mid + half * x)? + radial(mid - half * x)?) * w;
        }
        v16 *= half;
        let mut v8 = 0.0;
        for (x, w) in GL8 {
            v8 += (radial(mid + half * x)? + radial(mid - half * x)?) * w;
        }
        v8 *= half;
        Ok((v16, (v16 - v8).abs()))
    };

    let mut prev_ratio: Option<f64> = None;
    let mut high_ratio_run = 0u32;
    for j in 0..=RADIAL_PANELS_MAX {
        let (value, err) = match panel(j, &mut radial) {
            Ok(p) => p,
            Err(Error::Overflow { .. }) => {
                return Ok(DiscIntegral::Divergent {
                    partial,
                    growth_ratio: f64::INFINITY,
                    panel_values,
                    classification: DivergenceClass::Power { exponent_hint: f64::INFINITY },
                });
            }
            Err(e) => return Err(e),
        };
        partial += value;
        gl_err += err;
        panel_values.push(value);

        let ratio = if panel_values.len() >= 2 {
            let prev = panel_values[panel_values.len() - 2];
            if prev.abs() > 0.0 { Some((value / prev).abs()) } else { None }
        } else {
            None
        };

        if let Some(q) = ratio {
            if j >= 10 && q >= 0.9 {
                high_ratio_run += 1;
            } else {
                high_ratio_run = 0;
            }
            if high_ratio_run >= 3 {
                let classification = if q <= 1.05 {
                    DivergenceClass::Logarithmic
                } else {
                    DivergenceClass::Power { exponent_hint: 1.0 + q.log2() }
                };
                return Ok(DiscIntegral::Divergent { partial, growth_ratio: q, panel_values, classification });
            }

            // Geometric tail extrapolation once the ratio has settled below
            // one: tail = c_j q / (1 - q), charged with the ratio drift.
            if j >= 12 && q < 0.9 {
                if let Some(qp) = prev_ratio {
                    if qp < 0.9 {
                        let tail = value * q / (1.0 - q);
                        let drift = (q - qp).abs();
                        let tail_err = tail.abs() * (4.0 * drift / (1.0 - q) + 1e-13);
                        let total = partial + tail;
                        if gl_err + tail_err <= tol * (1.0 + total.abs()) {
                            return Ok(DiscIntegral::Convergent {
                                result: QuadResult {
                                    value: total,
                                    error_estimate: gl_err + tail_err,
                                    nodes_used: nodes,
                                    converged: true,
                                },
                                panel_values,
                            });
                        }
                    }
                }
            }
            prev_ratio = Some(q);
        } else {
            prev_ratio = None;
            high_ratio_run = 0;
            // A dead tail: recent panels contribute nothing at all.
            if panel_values.len() >= 3
                && panel_values.iter().rev().take(2).all(|v| v.abs() <= 1e-300)
                && j >= 12
            {
                let converged = gl_err <= tol * (1.0 + partial.abs());
                return Ok(DiscIntegral::Convergent {
                    result: QuadResult {
                        value: partial,
                        error_estimate: gl_err,
                        nodes_used: nodes,
                        converged,
                    },
                    panel_values,
                });
            }
        }
    }

    // Panel budget exhausted without a divergence call: report the partial
    // sum with the best available tail estimate and an honest flag.
    let (tail, tail_err) = match prev_ratio {
        Some(q) if q < 1.0 => {
            let c = *panel_values.last().unwrap();
            let t = c * q / (1.0 - q);
            (t, t.abs() * 0.5 + c.abs())
        }
        _ => (0.0, panel_values.last().map(|c| c.abs()).unwrap_or(0.0) * 8.0),
    };
    let total = partial + tail;
    let err = gl_err + tail_err;
    let converged = err <= tol * (1.0 + total.abs());
    Ok(DiscIntegral::Convergent {
        result: QuadResult { value: total, error_estimate: err, nodes_used: nodes, converged },
        panel_values,
    })
}
