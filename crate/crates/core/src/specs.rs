//! Serialisable input grammar for functions, shared by the command line and
//! config files.  Field names are part of the published interface: complex
//! numbers are `[re, im]` pairs, factor products are `[c, n]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discfun::{DiscFunction, Factor};
use crate::entire::EntireFunction;
use crate::error::{Error, Result};

fn c64(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

/// Entire-function spec: {"kind":"exp"}, {"kind":"cossqrt"},
/// {"kind":"poly","coeffs":[[re,im],...]}, {"kind":"scaledexp","lambda":2},
/// plus "sin", "cos", and {"kind":"const","value":[re,im]}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EntireSpec {
    Exp,
    ScaledExp { lambda: f64 },
    Sin,
    Cos,
    CosSqrt,
    Poly { coeffs: Vec<[f64; 2]> },
    Const { value: [f64; 2] },
}

impl EntireSpec {
    pub fn build(&self) -> Result<EntireFunction> {
        match self {
            EntireSpec::Exp => Ok(EntireFunction::Exp),
            EntireSpec::ScaledExp { lambda } => {
                if !lambda.is_finite() {
                    return Err(Error::InvalidSpec(format!("scaledexp needs a finite lambda, got {lambda}")));
                }
                Ok(EntireFunction::ScaledExp { lambda: *lambda })
            }
            EntireSpec::Sin => Ok(EntireFunction::Sin),
            EntireSpec::Cos => Ok(EntireFunction::Cos),
            EntireSpec::CosSqrt => Ok(EntireFunction::CosSqrt),
            EntireSpec::Poly { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidSpec("poly needs at least one coefficient".into()));
                }
                Ok(EntireFunction::Poly(coeffs.iter().map(|p| c64(*p)).collect()))
            }
            EntireSpec::Const { value } => Ok(EntireFunction::constant(c64(*value))),
        }
    }
}

/// Disc-function spec: {"kind":"taylor","coeffs":[[re,im],...]},
/// {"kind":"closed","name":...}, {"kind":"factorprod","factors":[[c,n],...]},
/// {"kind":"compose","entire":...,"inner":...},
/// {"kind":"wprod","w":...,"inner":...}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Taylor {
        coeffs: Vec<[f64; 2]>,
    },
    /// Catalog entries: "log1m", "identity", "pow1m" (needs gamma),
    /// "const" (needs value).
    Closed {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<[f64; 2]>,
    },
    FactorProd {
        factors: Vec<(f64, u64)>,
    },
    Compose {
        entire: EntireSpec,
        inner: Box<FunctionSpec>,
    },
    WProd {
        w: Box<FunctionSpec>,
        inner: Box<FunctionSpec>,
    },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<DiscFunction> {
        match self {
            FunctionSpec::Taylor { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidSpec("taylor needs at least one coefficient".into()));
                }
                Ok(DiscFunction::taylor(coeffs.iter().map(|p| c64(*p)).collect()))
            }
            FunctionSpec::Closed { name, gamma, value } => match name.as_str() {
                "log1m" => Ok(DiscFunction::log_one_minus()),
                "identity" => Ok(DiscFunction::identity()),
                "pow1m" => {
                    let g = gamma.ok_or_else(|| {
                        Error::InvalidSpec("closed form pow1m needs a gamma field".into())
                    })?;
                    if !(g > 0.0) {
                        return Err(Error::InvalidSpec(format!("pow1m needs gamma > 0, got {g}")));
                    }
                    Ok(DiscFunction::power_one_minus(g))
                }
                "const" => {
                    let v = value.ok_or_else(|| {
                        Error::InvalidSpec("closed form const needs a value field".into())
                    })?;
                    Ok(DiscFunction::constant(c64(v)))
                }
                other => Err(Error::InvalidSpec(format!("unknown closed form: {other}"))),
            },
            FunctionSpec::FactorProd { factors } => {
                DiscFunction::factor_product(factors.iter().map(|&(c, n)| Factor { c, n }).collect())
            }
            FunctionSpec::Compose { entire, inner } => {
                Ok(DiscFunction::compose_entire(entire.build()?, inner.build()?))
            }
            FunctionSpec::WProd { w, inner } => {
                Ok(DiscFunction::weighted(w.build()?, inner.build()?))
            }
        }
    }
}
