//! Analytic functions on the open unit disc.
//!
//! A `DiscFunction` is a small expression tree over five base
//! representations: finite Taylor expansions, products of sparse factors
//! prod_k (1 + c_k z^{n_k}), named closed forms, compositions phi(f) with an
//! entire outer function, and pointwise products w * f.  `Sum` and `Monomial`
//! nodes exist so that differentiation never leaves the family: the product
//! rule rewrites a factor product derivative as a sum of monomial-weighted
//! subproducts.
//!
//! Every evaluation checks |z| < 1 first and reports magnitudes above the
//! overflow ceiling as a tagged `Overflow` error rather than an infinity, so
//! norm scans can treat it as divergence evidence.

use num_complex::Complex64;

use crate::entire::EntireFunction;
use crate::error::{Error, Result, OVERFLOW_CEILING};

/// Named closed forms, all analytic on the open disc.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    Constant(Complex64),
    Identity,
    /// log(1/(1-z)), principal branch.
    LogOneMinus,
    /// (1-z)^{-gamma} for gamma > 0.
    PowerOneMinus(f64),
    /// scale * inner(e^{i angle} z).
    RotatedScaled {
        scale: Complex64,
        angle: f64,
        inner: Box<ClosedForm>,
    },
}

impl ClosedForm {
    fn eval(&self, z: Complex64, ceiling: f64) -> Result<Complex64> {
        let v = match self {
            ClosedForm::Constant(a) => *a,
            ClosedForm::Identity => z,
            ClosedForm::LogOneMinus => -((Complex64::new(1.0, 0.0) - z).ln()),
            ClosedForm::PowerOneMinus(gamma) => {
                ((Complex64::new(1.0, 0.0) - z).ln() * (-gamma)).exp()
            }
            ClosedForm::RotatedScaled { scale, angle, inner } => {
                scale * inner.eval(z * Complex64::from_polar(1.0, *angle), ceiling)?
            }
        };
        guard_magnitude(v, ceiling)
    }

    fn derivative(&self) -> ClosedForm {
        match self {
            ClosedForm::Constant(_) => ClosedForm::Constant(Complex64::new(0.0, 0.0)),
            ClosedForm::Identity => ClosedForm::Constant(Complex64::new(1.0, 0.0)),
            ClosedForm::LogOneMinus => ClosedForm::PowerOneMinus(1.0),
            ClosedForm::PowerOneMinus(gamma) => ClosedForm::RotatedScaled {
                scale: Complex64::new(*gamma, 0.0),
                angle: 0.0,
                inner: Box::new(ClosedForm::PowerOneMinus(gamma + 1.0)),
            },
            ClosedForm::RotatedScaled { scale, angle, inner } => ClosedForm::RotatedScaled {
                scale: scale * Complex64::from_polar(1.0, *angle),
                angle: *angle,
                inner: Box::new(inner.derivative()),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ClosedForm::PowerOneMinus(gamma) if !(*gamma > 0.0) => Err(Error::InvalidSpec(
                format!("(1-z)^(-gamma) needs gamma > 0, got {gamma}"),
            )),
            ClosedForm::RotatedScaled { inner, .. } => inner.validate(),
            _ => Ok(()),
        }
    }
}

/// One sparse factor 1 + c z^n with c > 0 and n >= 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub c: f64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiscFunction {
    /// Finite Taylor expansion sum a_k z^k, analytic at least on the disc.
    Taylor { coeffs: Vec<Complex64>, radius: f64 },
    /// prod_k (1 + c_k z^{n_k}) with strictly increasing gaps n_k.
    FactorProduct(Vec<Factor>),
    Closed(ClosedForm),
    /// phi(inner(z)) with phi entire.
    ComposedEntire {
        phi: EntireFunction,
        inner: Box<DiscFunction>,
    },
    /// w(z) * inner(z).
    Weighted {
        w: Box<DiscFunction>,
        inner: Box<DiscFunction>,
    },
    Sum(Box<DiscFunction>, Box<DiscFunction>),
    /// coeff * z^degree; produced by factor-product differentiation.
    Monomial { coeff: Complex64, degree: u64 },
}

/// Evaluation controls: relative truncation tolerance for the
/// possibly-infinite representations and the overflow ceiling.
#[derive(Debug, Clone, Copy)]
pub struct EvalOpts {
    pub tol: f64,
    pub ceiling: f64,
}

impl Default for EvalOpts {
    fn default() -> Self {
        EvalOpts { tol: 1e-13, ceiling: OVERFLOW_CEILING }
    }
}

fn guard_magnitude(v: Complex64, ceiling: f64) -> Result<Complex64> {
    if !v.re.is_finite() || !v.im.is_finite() || v.norm() > ceiling {
        Err(Error::Overflow { ceiling })
    } else {
        Ok(v)
    }
}

/// z^n for potentially very large n (factor gaps reach 1e8 and beyond).
fn pow_u64(z: Complex64, n: u64) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if z.im == 0.0 {
        return Complex64::new(z.re.powf(n as f64), 0.0);
    }
    if n <= u32::MAX as u64 {
        z.powu(n as u32)
    } else {
        (z.ln() * n as f64).exp()
    }
}

impl DiscFunction {
    pub fn constant(a: Complex64) -> Self {
        DiscFunction::Closed(ClosedForm::Constant(a))
    }

    pub fn identity() -> Self {
        DiscFunction::Closed(ClosedForm::Identity)
    }

    pub fn log_one_minus() -> Self {
        DiscFunction::Closed(ClosedForm::LogOneMinus)
    }

    pub fn power_one_minus(gamma: f64) -> Self {
        DiscFunction::Closed(ClosedForm::PowerOneMinus(gamma))
    }

    /// scale * f(e^{i angle} z) for a closed form f.
    pub fn rotated_scaled(scale: Complex64, angle: f64, inner: ClosedForm) -> Self {
        DiscFunction::Closed(ClosedForm::RotatedScaled { scale, angle, inner: Box::new(inner) })
    }

    pub fn taylor(coeffs: Vec<Complex64>) -> Self {
        DiscFunction::Taylor { coeffs, radius: f64::INFINITY }
    }

    pub fn factor_product(factors: Vec<Factor>) -> Result<Self> {
        let f = DiscFunction::FactorProduct(factors);
        f.validate()?;
        Ok(f)
    }

    pub fn compose_entire(phi: EntireFunction, inner: DiscFunction) -> Self {
        DiscFunction::ComposedEntire { phi, inner: Box::new(inner) }
    }

    pub fn weighted(w: DiscFunction, inner: DiscFunction) -> Self {
        DiscFunction::Weighted { w: Box::new(w), inner: Box::new(inner) }
    }

    pub fn sum(a: DiscFunction, b: DiscFunction) -> Self {
        DiscFunction::Sum(Box::new(a), Box::new(b))
    }

    /// Structural sanity of the representation (gap monotonicity, positive
    /// factor scales, declared radius, closed-form parameters).
    pub fn validate(&self) -> Result<()> {
        match self {
            DiscFunction::Taylor { radius, .. } => {
                if !(*radius >= 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "Taylor radius of analyticity must be >= 1, got {radius}"
                    )));
                }
                Ok(())
            }
            DiscFunction::FactorProduct(factors) => {
                let mut prev = 0u64;
                for f in factors {
                    if !(f.c > 0.0) {
                        return Err(Error::InvalidSpec(format!("factor scale {} not > 0", f.c)));
                    }
                    if f.n <= prev && !(prev == 0 && f.n >= 1) {
                        return Err(Error::InvalidSpec(format!(
                            "factor gaps must be strictly increasing, saw {} after {}",
                            f.n, prev
                        )));
                    }
                    if f.n == 0 {
                        return Err(Error::InvalidSpec("factor gap must be >= 1".into()));
                    }
                    prev = f.n;
                }
                Ok(())
            }
            DiscFunction::Closed(c) => c.validate(),
            DiscFunction::ComposedEntire { inner, .. } => inner.validate(),
            DiscFunction::Weighted { w, inner } => {
                w.validate()?;
                inner.validate()
            }
            DiscFunction::Sum(a, b) => {
                a.validate()?;
                b.validate()
            }
            DiscFunction::Monomial { .. } => Ok(()),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.eval_opts(z, &EvalOpts::default())
    }

    pub fn eval_opts(&self, z: Complex64, opts: &EvalOpts) -> Result<Complex64> {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::OutsideDisc { modulus: r });
        }
        self.eval_inner(z, opts)
    }

    fn eval_inner(&self, z: Complex64, opts: &EvalOpts) -> Result<Complex64> {
        let v = match self {
            DiscFunction::Taylor { coeffs, .. } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in coeffs.iter().rev() {
                    acc = acc * z + a;
                }
                acc
            }
            DiscFunction::FactorProduct(factors) => {
                return factor_product_eval(factors, z, opts);
            }
            DiscFunction::Closed(c) => return c.eval(z, opts.ceiling),
            DiscFunction::ComposedEntire { phi, inner } => {
                let u = inner.eval_inner(z, opts)?;
                phi.eval(u)?
            }
            DiscFunction::Weighted { w, inner } => {
                w.eval_inner(z, opts)? * inner.eval_inner(z, opts)?
            }
            DiscFunction::Sum(a, b) => a.eval_inner(z, opts)? + b.eval_inner(z, opts)?,
            DiscFunction::Monomial { coeff, degree } => coeff * pow_u64(z, *degree),
        };
        guard_magnitude(v, opts.ceiling)
    }

    /// Derivative in the same representation family.
    pub fn derivative(&self) -> DiscFunction {
        match self {
            DiscFunction::Taylor { coeffs, radius } => {
                let d: Vec<Complex64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, a)| a * k as f64)
                    .collect();
                DiscFunction::Taylor {
                    coeffs: if d.is_empty() { vec![Complex64::new(0.0, 0.0)] } else { d },
                    radius: *radius,
                }
            }
            DiscFunction::FactorProduct(factors) => factor_product_derivative(factors),
            DiscFunction::Closed(c) => DiscFunction::Closed(c.derivative()),
            DiscFunction::ComposedEntire { phi, inner } => DiscFunction::Weighted {
                w: Box::new(inner.derivative()),
                inner: Box::new(DiscFunction::ComposedEntire {
                    phi: phi.derivative(),
                    inner: inner.clone(),
                }),
            },
            DiscFunction::Weighted { w, inner } => DiscFunction::Sum(
                Box::new(DiscFunction::Weighted { w: Box::new(w.derivative()), inner: inner.clone() }),
                Box::new(DiscFunction::Weighted { w: w.clone(), inner: Box::new(inner.derivative()) }),
            ),
            DiscFunction::Sum(a, b) => {
                DiscFunction::Sum(Box::new(a.derivative()), Box::new(b.derivative()))
            }
            DiscFunction::Monomial { coeff, degree } => {
                if *degree == 0 {
                    DiscFunction::constant(Complex64::new(0.0, 0.0))
                } else {
                    DiscFunction::Monomial { coeff: coeff * *degree as f64, degree: degree - 1 }
                }
            }
        }
    }

    /// Taylor coefficients a_0..a_n recovered from circle averages at radius
    /// rho < 1, with a per-coefficient error estimate from the last doubling.
    pub fn taylor_coefficients(
        &self,
        n: usize,
        rho: f64,
        tol: f64,
    ) -> Result<Vec<(Complex64, f64)>> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidSpec(format!("coefficient radius {rho} not in (0, 1)")));
        }
        let opts = EvalOpts::default();
        let tau = std::f64::consts::TAU;
        let mut m = (4 * (n + 1)).next_power_of_two().max(64);
        let mut prev: Option<Vec<Complex64>> = None;
        loop {
            let samples: Vec<Complex64> = (0..m)
                .map(|j| self.eval_opts(Complex64::from_polar(rho, tau * j as f64 / m as f64), &opts))
                .collect::<Result<_>>()?;
            let mut coeffs = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, s) in samples.iter().enumerate() {
                    acc += s * Complex64::from_polar(1.0, -tau * (j * k % m) as f64 / m as f64);
                }
                coeffs.push(acc / m as f64 / rho.powi(k as i32));
            }
            if let Some(p) = &prev {
                let errs: Vec<f64> = coeffs.iter().zip(p).map(|(a, b)| (a - b).norm()).collect();
                let worst = errs.iter().cloned().fold(0.0, f64::max);
                if worst <= tol {
                    return Ok(coeffs.into_iter().zip(errs).collect());
                }
                if m >= 1 << 16 {
                    return Err(Error::ToleranceNotMet { achieved: worst, requested: tol });
                }
            }
            prev = Some(coeffs);
            m *= 2;
        }
    }
}

/// Factor product evaluation with a certified multiplicative tail bound:
/// once exp(sum of remaining c_k r^{n_k}) - 1 <= tol the remaining factors
/// are dropped.
fn factor_product_eval(factors: &[Factor], z: Complex64, opts: &EvalOpts) -> Result<Complex64> {
    let r = z.norm();
    let mags: Vec<f64> = factors.iter().map(|f| f.c * r.powf(f.n as f64)).collect();
    let mut suffix = vec![0.0; factors.len() + 1];
    for k in (0..factors.len()).rev() {
        suffix[k] = suffix[k + 1] + mags[k];
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for (k, f) in factors.iter().enumerate() {
        if suffix[k].exp_m1() <= opts.tol {
            break;
        }
        acc *= Complex64::new(1.0, 0.0) + pow_u64(z, f.n) * f.c;
        acc = guard_magnitude(acc, opts.ceiling)?;
    }
    Ok(acc)
}

/// Product rule for prod_k (1 + c_k z^{n_k}): a sum over k of the monomial
/// c_k n_k z^{n_k - 1} times the product with factor k removed.
fn factor_product_derivative(factors: &[Factor]) -> DiscFunction {
    if factors.is_empty() {
        return DiscFunction::constant(Complex64::new(0.0, 0.0));
    }
    let mut terms: Vec<DiscFunction> = Vec::with_capacity(factors.len());
    for (k, f) in factors.iter().enumerate() {
        let rest: Vec<Factor> = factors
            .iter()
            .enumerate()
            .filter_map(|(j, g)| if j == k { None } else { Some(*g) })
            .collect();
        let mono = DiscFunction::Monomial {
            coeff: Complex64::new(f.c * f.n as f64, 0.0),
            degree: f.n - 1,
        };
        let term = if rest.is_empty() {
            mono
        } else {
            DiscFunction::Weighted {
                w: Box::new(mono),
                inner: Box::new(DiscFunction::FactorProduct(rest)),
            }
        };
        terms.push(term);
    }
    let mut it = terms.into_iter();
    let first = it.next().unwrap();
    it.fold(first, |acc, t| DiscFunction::Sum(Box::new(acc), Box::new(t)))
}

/// Partial product over the first `depth` factors plus the certified bound on
/// the relative change any deeper truncation could still cause at |z| = r.
pub fn factor_product_partial(factors: &[Factor], z: Complex64, depth: usize) -> (Complex64, f64) {
    let r = z.norm();
    let mut acc = Complex64::new(1.0, 0.0);
    for f in factors.iter().take(depth) {
        acc *= Complex64::new(1.0, 0.0) + pow_u64(z, f.n) * f.c;
    }
    let tail: f64 = factors.iter().skip(depth).map(|f| f.c * r.powf(f.n as f64)).sum();
    (acc, tail.exp_m1())
}
