//! Zero location by the argument principle and statistics of zero sequences:
//! Blaschke partial sums, partial products of reciprocal moduli, growth-law
//! fits, and the compatibility verdicts built on them.
//!
//! The locator subdivides the disc into annulus sectors, computes the
//! winding number of f around each cell boundary by continuous argument
//! tracking, recurses into cells with nonzero winding, and Newton-polishes
//! isolated zeros.  Boundaries that pass too close to a zero are retried
//! with slightly jittered cell walls; the adversarial case of a zero pinned
//! to a wall ends in an honest incomplete flag or a count-mismatch error,
//! never a silent miss.  Zeros closer together than about 1e-9 are reported
//! merged, with summed multiplicity.
//!
//! Zero lists group zeros that share a modulus: a lacunary factor
//! contributes millions of equally spaced zeros on one circle, and every
//! statistic here depends only on the moduli, so a group is stored once
//! with its cardinality.  Per-index expansion (statistics vectors, CSV) is
//! capped at 2^20 zeros.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::discfun::{DiscFunction, Factor};
use crate::error::{Error, Result};
use crate::quadrature::circle_mean_complex;

/// How a zero list was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Known in closed form (factor-product roots).
    Analytic,
    /// Found by the subdivision locator.
    Located,
    /// Moduli prescribed; arguments carry no information.
    Synthetic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Located => "located",
            Provenance::Synthetic => "synthetic",
        })
    }
}

/// One zero, or a group of `count` zeros sharing a modulus (and a
/// multiplicity); `location` is the group representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEntry {
    pub location: Complex64,
    pub multiplicity: u32,
    pub count: u64,
}

impl ZeroEntry {
    pub fn modulus(&self) -> f64 {
        self.location.norm()
    }

    /// Zeros this entry stands for, counting multiplicities.
    pub fn weight(&self) -> u64 {
        self.count * self.multiplicity as u64
    }
}

/// Zeros sorted by increasing modulus.  `complete` is false when the
/// locator ran out of cell budget or dropped an unresolvable cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub entries: Vec<ZeroEntry>,
    pub provenance: Provenance,
    pub complete: bool,
}

/// Cap on materialized per-zero sequences (statistics, CSV rows).
pub const EXPANSION_CAP: u64 = 1 << 20;

/// Cells the locator may process before flagging the result incomplete.
pub const CELL_BUDGET: usize = 100_000;

const GOLDEN_FRAC: f64 = 0.618_033_988_749_894_9;

fn golden_angle(k: u64) -> f64 {
    std::f64::consts::TAU * ((k as f64 * GOLDEN_FRAC).fract())
}

impl ZeroList {
    /// Prescribed moduli in [0, 1); arguments are filled with an
    /// equidistributed sequence since no statistic reads them.
    pub fn synthetic(moduli: &[f64]) -> Result<ZeroList> {
        let mut entries = Vec::with_capacity(moduli.len());
        for (k, &m) in moduli.iter().enumerate() {
            if !(0.0..1.0).contains(&m) {
                return Err(Error::InvalidSpec(format!("synthetic modulus {m} outside [0, 1)")));
            }
            entries.push(ZeroEntry {
                location: Complex64::from_polar(m, golden_angle(k as u64 + 1)),
                multiplicity: 1,
                count: 1,
            });
        }
        let mut zl = ZeroList { entries, provenance: Provenance::Synthetic, complete: true };
        zl.sort();
        Ok(zl)
    }

    /// Closed-form zeros of a product of factors 1 + c z^n: each factor with
    /// c > 1 contributes n simple zeros on the circle of radius c^(-1/n), at
    /// odd multiples of pi/n.  Factors with c <= 1 have no zeros in the open
    /// disc and contribute nothing.
    pub fn from_factor_product(factors: &[Factor]) -> ZeroList {
        let mut entries = Vec::new();
        for f in factors {
            if f.c <= 1.0 {
                continue;
            }
            let n = f.n as f64;
            let modulus = (-f.c.ln() / n).exp();
            entries.push(ZeroEntry {
                location: Complex64::from_polar(modulus, std::f64::consts::PI / n),
                multiplicity: 1,
                count: f.n,
            });
        }
        let mut zl = ZeroList { entries, provenance: Provenance::Analytic, complete: true };
        zl.sort();
        zl
    }

    fn sort(&mut self) {
        self.entries.sort_by(|a, b| {
            let ka = (a.modulus(), positive_angle(a.location));
            let kb = (b.modulus(), positive_angle(b.location));
            ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    /// Total number of zeros counting multiplicities.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.weight()).sum()
    }

    /// Moduli repeated per zero and multiplicity, in increasing order.
    pub fn expand_moduli(&self) -> Result<Vec<f64>> {
        let total = self.total_count();
        if total > EXPANSION_CAP {
            return Err(Error::InvalidSpec(format!(
                "zero list expands to {total} zeros, beyond the per-index cap {EXPANSION_CAP}; use the grouped statistics"
            )));
        }
        let mut out = Vec::with_capacity(total as usize);
        for e in &self.entries {
            for _ in 0..e.weight() {
                out.push(e.modulus());
            }
        }
        Ok(out)
    }

    /// CSV rows, one per distinct zero (groups expanded), with the exact
    /// header `k,re,im,modulus,multiplicity,provenance`.
    pub fn to_csv(&self) -> Result<String> {
        let distinct: u64 = self.entries.iter().map(|e| e.count).sum();
        if distinct > EXPANSION_CAP {
            return Err(Error::InvalidSpec(format!(
                "zero list has {distinct} distinct zeros, beyond the CSV cap {EXPANSION_CAP}"
            )));
        }
        let mut s = String::from("k,re,im,modulus,multiplicity,provenance\n");
        let mut k = 0u64;
        for e in &self.entries {
            let m = e.modulus();
            let base = positive_angle(e.location);
            for j in 0..e.count {
                k += 1;
                // Zeros in a group are equally spaced; a single zero keeps
                // its located argument.
                let t = if e.count > 1 {
                    base + std::f64::consts::TAU * j as f64 / e.count as f64
                } else {
                    base
                };
                let z = Complex64::from_polar(m, t);
                s.push_str(&format!("{k},{},{},{m},{},{}\n", z.re, z.im, e.multiplicity, self.provenance));
            }
        }
        Ok(s)
    }
}

fn positive_angle(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Blaschke partial sum over the first n zeros (modulus order, counting
/// multiplicities): sum of (1 - |z_k|).
pub fn blaschke_sum(zl: &ZeroList, n: u64) -> Result<f64> {
    if n > zl.total_count() {
        return Err(Error::InvalidSpec(format!(
            "partial sum index {n} exceeds list length {}",
            zl.total_count()
        )));
    }
    let mut remaining = n;
    let mut acc = 0.0;
    for e in &zl.entries {
        if remaining == 0 {
            break;
        }
        let take = remaining.min(e.weight());
        acc += take as f64 * (1.0 - e.modulus());
        remaining -= take;
    }
    Ok(acc)
}

/// Product of 1/|z_k| over the first n zeros, computed in log space.
pub fn partial_products(zl: &ZeroList, n: u64) -> Result<f64> {
    Ok(log_partial_product(zl, n)?.exp())
}

fn log_partial_product(zl: &ZeroList, n: u64) -> Result<f64> {
    if n > zl.total_count() {
        return Err(Error::InvalidSpec(format!(
            "partial product index {n} exceeds list length {}",
            zl.total_count()
        )));
    }
    let mut remaining = n;
    let mut acc = 0.0;
    for e in &zl.entries {
        if remaining == 0 {
            break;
        }
        let m = e.modulus();
        if m <= 0.0 {
            return Err(Error::DegenerateInput(
                "partial products need g(0) != 0: a zero sits at the origin".into(),
            ));
        }
        let take = remaining.min(e.weight());
        acc += take as f64 * -m.ln();
        remaining -= take;
    }
    Ok(acc)
}

/// Growth law fitted to the log partial products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthModel {
    /// log products grow like gamma * log n (products like n^gamma).
    Power,
    /// log products grow like B * sqrt(log n).
    SqrtLog,
}

/// Target law for the incompatibility verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum GrowthLaw {
    Power { gamma: f64 },
    SqrtLog,
    Blaschke,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compatibility {
    Incompatible,
    Compatible,
    Inconclusive,
}

impl fmt::Display for Compatibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Compatibility::Incompatible => "incompatible",
            Compatibility::Compatible => "compatible",
            Compatibility::Inconclusive => "inconclusive",
        })
    }
}

/// Per-index statistics of a zero sequence plus one fitted growth law.
/// `fitted_band` is the relative fit residual, read as a confidence
/// half-width on `fitted_exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroStats {
    pub blaschke_partial_sums: Vec<f64>,
    pub log_partial_products: Vec<f64>,
    pub fitted_exponent: f64,
    pub fitted_band: f64,
    pub fitted_model: GrowthModel,
}

impl ZeroStats {
    /// CSV with the exact header `n,blaschke_sum,log_partial_product`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,blaschke_sum,log_partial_product\n");
        for (i, (b, p)) in self
            .blaschke_partial_sums
            .iter()
            .zip(&self.log_partial_products)
            .enumerate()
        {
            s.push_str(&format!("{},{b},{p}\n", i + 1));
        }
        s
    }
}

/// Materialize the partial-sum sequences and fit the requested growth law.
pub fn zero_stats(zl: &ZeroList, model: GrowthModel) -> Result<ZeroStats> {
    let moduli = zl.expand_moduli()?;
    if moduli.iter().any(|&m| m <= 0.0) {
        return Err(Error::DegenerateInput(
            "zero statistics need g(0) != 0: a zero sits at the origin".into(),
        ));
    }
    let mut blaschke = Vec::with_capacity(moduli.len());
    let mut logprod = Vec::with_capacity(moduli.len());
    let mut b = 0.0;
    let mut p = 0.0;
    for &m in &moduli {
        b += 1.0 - m;
        p += -m.ln();
        blaschke.push(b);
        logprod.push(p);
    }
    let (coeff, band) = fit_growth(zl, model)?;
    Ok(ZeroStats {
        blaschke_partial_sums: blaschke,
        log_partial_products: logprod,
        fitted_exponent: coeff,
        fitted_band: band,
        fitted_model: model,
    })
}

/// Least-squares fit of the log partial products against gamma*log n or
/// B*sqrt(log n) over the tail half of the sequence (the laws are
/// asymptotic; early terms bias the fit).  An intercept is always included:
/// without one, the harmonic-tail constant leaks into the slope.  Returns
/// the coefficient and the relative residual of the fit.
pub fn fit_growth(zl: &ZeroList, model: GrowthModel) -> Result<(f64, f64)> {
    let moduli = zl.expand_moduli()?;
    let n = moduli.len();
    if n < 32 {
        return Err(Error::NeedLargerN(32));
    }
    if moduli.iter().any(|&m| m <= 0.0) {
        return Err(Error::DegenerateInput(
            "growth fit needs g(0) != 0: a zero sits at the origin".into(),
        ));
    }
    let spread = moduli[n - 1] - moduli[0];
    if spread < 1e-12 && moduli[0] < 0.5 {
        return Err(Error::IllConditionedFit(format!(
            "all zeros share the tiny modulus {}: partial products grow linearly in n, not like any fitted law",
            moduli[0]
        )));
    }
    let mut lp = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &m in &moduli {
        acc += -m.ln();
        lp.push(acc);
    }
    let lo = n / 2;
    let xs: Vec<f64> = (lo..n)
        .map(|i| {
            let k = (i + 1) as f64;
            match model {
                GrowthModel::Power => k.ln(),
                GrowthModel::SqrtLog => k.ln().sqrt(),
            }
        })
        .collect();
    let ys = &lp[lo..];
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = m * sxx - sx * sx;
    if det.abs() < 1e-12 * m * sxx.max(1.0) {
        return Err(Error::IllConditionedFit("regressor has no spread over the tail window".into()));
    }
    let slope = (m * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / m;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let e = y - (slope * x + intercept);
        ss_res += e * e;
        ss_tot += y * y;
    }
    let residual = (ss_res / ss_tot.max(1e-300)).sqrt();
    Ok((slope, residual))
}

/// Desk-scale test of "the zeros of X cannot be zeros of Y": compare the
/// fitted growth of statsX against the law of Y at the tail (indices N/2,
/// N, and extrapolated 2N).  Incompatible when X dominates by a growing
/// factor of at least 10; compatible when dominated the same way; otherwise
/// inconclusive.  Against the Blaschke law the comparison is between
/// doubling-window increments of the partial sums, which vanish exactly for
/// convergent sums.
pub fn zero_incompatibility_verdict(stats: &ZeroStats, law: GrowthLaw) -> Result<Compatibility> {
    let n = stats.blaschke_partial_sums.len();
    if n < 256 {
        return Err(Error::NeedLargerN(256));
    }
    match law {
        GrowthLaw::Blaschke => {
            let s = &stats.blaschke_partial_sums;
            Ok(blaschke_increment_rule(s[n / 4 - 1], s[n / 2 - 1], s[n - 1]))
        }
        GrowthLaw::Power { .. } | GrowthLaw::SqrtLog => {
            let stats_growth = |k: f64| -> f64 {
                match stats.fitted_model {
                    GrowthModel::Power => k.powf(stats.fitted_exponent),
                    GrowthModel::SqrtLog => stats.fitted_exponent * k.ln().sqrt(),
                }
            };
            let law_growth = |k: f64| -> f64 {
                match law {
                    GrowthLaw::Power { gamma } => k.powf(gamma),
                    GrowthLaw::SqrtLog => k.ln().sqrt(),
                    GrowthLaw::Blaschke => unreachable!(),
                }
            };
            let ratio = |k: f64| stats_growth(k) / law_growth(k);
            let (r1, r2, r3) = (ratio(n as f64 / 2.0), ratio(n as f64), ratio(2.0 * n as f64));
            if r3 >= 10.0 && r2 > r1 && r3 > r2 {
                Ok(Compatibility::Incompatible)
            } else if r3 <= 0.1 && r2 < r1 && r3 < r2 {
                Ok(Compatibility::Compatible)
            } else {
                Ok(Compatibility::Inconclusive)
            }
        }
    }
}

fn blaschke_increment_rule(s_quarter: f64, s_half: f64, s_full: f64) -> Compatibility {
    let d1 = s_half - s_quarter;
    let d2 = s_full - s_half;
    if d2 >= 0.1 && d2 >= 0.8 * d1 {
        Compatibility::Incompatible
    } else if d2 <= 0.01 * (1.0 + s_full) || d2 <= 0.3 * d1 {
        Compatibility::Compatible
    } else {
        Compatibility::Inconclusive
    }
}

/// Blaschke verdict straight from a zero list, without materializing the
/// per-index statistics: grouped lists with astronomically many zeros stay
/// cheap because the partial sums are evaluated only at N/4, N/2, and N.
pub fn blaschke_compatibility(zl: &ZeroList) -> Result<Compatibility> {
    let total = zl.total_count();
    if total < 256 {
        return Err(Error::NeedLargerN(256));
    }
    let s_quarter = blaschke_sum(zl, total / 4)?;
    let s_half = blaschke_sum(zl, total / 2)?;
    let s_full = blaschke_sum(zl, total)?;
    Ok(blaschke_increment_rule(s_quarter, s_half, s_full))
}

const CONTOUR_FLOOR: f64 = 1e-13;
const MAX_NUDGES: u32 = 5;

/// Winding number of f around |z| = r, i.e. the number of zeros in |z| < r
/// counting multiplicities.  The radius is nudged a few nanometer-scale
/// steps when a zero sits on (or the integral misbehaves near) the contour.
pub fn count_zeros_disk(f: &DiscFunction, r: f64, tol: f64) -> Result<u32> {
    count_zeros_disk_inner(f, r, tol).map(|(n, _)| n)
}

/// Same, returning the radius actually used after nudging, so callers can
/// keep outer boundaries consistent with the count.
fn count_zeros_disk_inner(f: &DiscFunction, r: f64, tol: f64) -> Result<(u32, f64)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidSpec(format!("contour radius must lie in (0, 1), got {r}")));
    }
    let d = f.derivative();
    let mut attempts = 0u32;
    loop {
        let nudge = match attempts {
            0 => 0.0,
            k if k % 2 == 1 => ((k + 1) / 2) as f64 * 1e-9,
            k => -(((k + 1) / 2) as f64) * 1e-9,
        };
        let rr = (r + nudge).clamp(1e-12, 1.0 - 1e-12);
        if contour_clear(f, rr)? {
            let integrand = |t: f64| -> Result<Complex64> {
                let z = Complex64::from_polar(rr, t);
                let fv = f.eval(z)?;
                if fv.norm() == 0.0 {
                    return Err(Error::DegenerateInput("zero on the contour".into()));
                }
                Ok(z * d.eval(z)? / fv)
            };
            match circle_mean_complex(integrand, tol.min(1e-3)) {
                Ok(q) => {
                    let w = q.value;
                    let rounded = w.re.round();
                    if (w - Complex64::new(rounded, 0.0)).norm() > 0.25 {
                        return Err(Error::NonIntegerWinding { value: w.re });
                    }
                    if rounded < 0.0 {
                        return Err(Error::NonIntegerWinding { value: w.re });
                    }
                    return Ok((rounded as u32, rr));
                }
                // A contour grazing a zero shows up as a convergence failure;
                // treat it like a detected near-zero and nudge.
                Err(Error::ToleranceNotMet { .. }) | Err(Error::DegenerateInput(_)) => {}
                Err(e) => return Err(e),
            }
        }
        attempts += 1;
        if attempts > MAX_NUDGES {
            return Err(Error::ContourNearZero { attempts });
        }
    }
}

/// Coarse screen: sampled |f| on the contour must stay above a floor
/// relative to the circle's own scale (a tiny circle around a multiple
/// zero legitimately has tiny |f| everywhere).
fn contour_clear(f: &DiscFunction, r: f64) -> Result<bool> {
    let n = 512;
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    for k in 0..n {
        let t = std::f64::consts::TAU * (k as f64 + 0.131) / n as f64;
        let v = f.eval(Complex64::from_polar(r, t))?.norm();
        min = min.min(v);
        max = max.max(v);
    }
    Ok(max > 0.0 && min > CONTOUR_FLOOR * max)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    // True when r1 is the counted-disc boundary itself.  That wall was
    // already nudged clear of zeros by the counting pass and must never
    // move: expanding it would capture uncounted zeros, shrinking it would
    // leave counted ones stranded outside every cell.
    rim: bool,
}

impl Cell {
    fn arc_extent(&self) -> f64 {
        self.r1 * (self.t1 - self.t0)
    }

    fn radial_extent(&self) -> f64 {
        self.r1 - self.r0
    }

    fn size(&self) -> f64 {
        self.arc_extent().max(self.radial_extent())
    }

    fn center(&self) -> Complex64 {
        Complex64::from_polar((self.r0 * self.r1).sqrt().max(0.5 * (self.r0 + self.r1) * 0.1), 0.5 * (self.t0 + self.t1))
    }

    fn contains(&self, z: Complex64, halo: f64) -> bool {
        let m = z.norm();
        let hr = halo * self.radial_extent();
        if m < self.r0 - hr || m > self.r1 + hr {
            return false;
        }
        let ht = halo * (self.t1 - self.t0);
        let a = positive_angle(z);
        for shift in [-std::f64::consts::TAU, 0.0, std::f64::consts::TAU] {
            let aa = a + shift;
            if aa >= self.t0 - ht && aa <= self.t1 + ht {
                return true;
            }
        }
        false
    }
}

enum EdgeArg {
    Value(f64),
    NearZero,
}

enum CellOutcome {
    Empty,
    Zero(ZeroEntry),
    Split(Vec<Cell>),
    Dropped,
}

/// Locate all zeros of f in |z| <= r_max by recursive annulus-sector
/// subdivision with argument-principle winding counts and Newton polish.
pub fn locate_zeros(f: &DiscFunction, r_max: f64, tol: f64) -> Result<ZeroList> {
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::InvalidSpec(format!("r_max must lie in (0, 1), got {r_max}")));
    }
    let (target, r_used) = count_zeros_disk_inner(f, r_max, tol)?;
    let mut list = ZeroList { entries: Vec::new(), provenance: Provenance::Located, complete: true };
    if target == 0 {
        return Ok(list);
    }
    let d = f.derivative();

    // The origin is a corner of every root sector, so it is handled apart:
    // a vanishing f(0) gets its multiplicity from a tiny circle, and the
    // sector cells start just outside.  Zeros within 1e-9 of the origin
    // merge into the origin entry.
    let r_in = 1e-9;
    let (m_in, _) = count_zeros_disk_inner(f, r_in, tol)?;
    let mut located: Vec<ZeroEntry> = Vec::new();
    if m_in > 0 {
        let f0 = f.eval(Complex64::new(0.0, 0.0))?;
        if f0.norm() > 1e-300 {
            return Err(Error::DegenerateInput(format!(
                "{m_in} zeros hide within 1e-9 of the origin but f(0) != 0; the subdivision cannot separate them"
            )));
        }
        located.push(ZeroEntry {
            location: Complex64::new(0.0, 0.0),
            multiplicity: m_in,
            count: 1,
        });
    }

    // Sector walls start at an arbitrary non-round offset so that zeros on
    // the axes (common for real-coefficient functions) sit inside cells.
    let t_off = 0.283_711;
    let mut frontier: Vec<Cell> = (0..4)
        .map(|k| Cell {
            r0: r_in,
            r1: r_used,
            t0: t_off + std::f64::consts::FRAC_PI_2 * k as f64,
            t1: t_off + std::f64::consts::FRAC_PI_2 * (k + 1) as f64,
            rim: true,
        })
        .collect();

    let mut processed = 0usize;
    let mut dropped = false;
    while !frontier.is_empty() {
        if processed + frontier.len() > CELL_BUDGET {
            list.complete = false;
            break;
        }
        processed += frontier.len();
        let outcomes: Vec<Result<CellOutcome>> = frontier
            .par_iter()
            .map(|cell| process_cell(f, &d, cell, tol))
            .collect();
        let mut next = Vec::new();
        for oc in outcomes {
            match oc? {
                CellOutcome::Empty => {}
                CellOutcome::Zero(e) => located.push(e),
                CellOutcome::Split(children) => next.extend(children),
                CellOutcome::Dropped => {
                    dropped = true;
                }
            }
        }
        frontier = next;
    }
    if dropped {
        list.complete = false;
    }

    // Deduplicate polish results that straddled a shared wall.
    located.sort_by(|a, b| {
        (a.modulus(), positive_angle(a.location))
            .partial_cmp(&(b.modulus(), positive_angle(b.location)))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut entries: Vec<ZeroEntry> = Vec::with_capacity(located.len());
    for e in located {
        if let Some(last) = entries.last() {
            if (last.location - e.location).norm() < 1e-9 * (1.0 + e.modulus()) {
                continue;
            }
        }
        entries.push(e);
    }
    list.entries = entries;
    list.sort();

    if list.complete {
        let total = list.total_count();
        if total != target as u64 {
            return Err(Error::ZeroCountMismatch { counted: target as i64, located: total as i64 });
        }
    }
    Ok(list)
}

fn process_cell(f: &DiscFunction, d: &DiscFunction, cell: &Cell, tol: f64) -> Result<CellOutcome> {
    // Jittered retries expand the movable walls slightly when the boundary
    // tracking runs into a zero; the counted-disc rim never moves, so no
    // zero outside the counted region can be captured.
    let mut wound = None;
    let mut used = *cell;
    for attempt in 0..6u32 {
        let c = jittered(cell, attempt);
        match cell_winding(f, d, &c)? {
            EdgeArg::Value(w) => {
                let rounded = w.round();
                if (w - rounded).abs() <= 0.25 && rounded >= 0.0 {
                    wound = Some(rounded as u32);
                    used = c;
                    break;
                }
            }
            EdgeArg::NearZero => {}
        }
    }
    let Some(w) = wound else {
        return Ok(CellOutcome::Dropped);
    };
    if w == 0 {
        return Ok(CellOutcome::Empty);
    }
    // Winding 1 pins a unique simple zero, so Newton may run on any cell
    // size; multiple zeros must first be separated down to small cells
    // where a cluster is acceptable as one multiple zero.
    if w == 1 || used.size() < 1e-3 {
        if let Some(e) = polish(f, d, &used, w) {
            return Ok(CellOutcome::Zero(e));
        }
    }
    Ok(CellOutcome::Split(split(&used, tol)))
}

fn jittered(cell: &Cell, attempt: u32) -> Cell {
    if attempt == 0 {
        return *cell;
    }
    let a = attempt as f64;
    let dr = cell.radial_extent() * 1e-5 * a * a;
    let dt = (cell.t1 - cell.t0) * 1.31e-5 * a * a;
    // Every movable wall expands.  A shared wall is then covered from both
    // sides, so a zero pinned on it lands inside at least one neighbour;
    // a zero polished twice merges in the dedup pass.  Shrinking any wall
    // would open a sliver owned by no cell and lose the zero silently.
    Cell {
        r0: (cell.r0 - 0.7 * dr).max(1e-12),
        r1: if cell.rim { cell.r1 } else { cell.r1 + 0.41 * dr },
        t0: cell.t0 - dt,
        t1: cell.t1 + 0.83 * dt,
        rim: cell.rim,
    }
}

fn split(cell: &Cell, _tol: f64) -> Vec<Cell> {
    if cell.radial_extent() >= cell.arc_extent() {
        // Geometric-mean radius keeps thin inner annuli balanced when the
        // cell spans many scales.
        let rm = (cell.r0 * cell.r1).sqrt();
        vec![Cell { r1: rm, rim: false, ..*cell }, Cell { r0: rm, ..*cell }]
    } else {
        let tm = 0.5 * (cell.t0 + cell.t1);
        vec![Cell { t1: tm, ..*cell }, Cell { t0: tm, ..*cell }]
    }
}

fn polish(f: &DiscFunction, d: &DiscFunction, cell: &Cell, m: u32) -> Option<ZeroEntry> {
    let mut z = cell.center();
    let size = cell.size();
    let mf = m as f64;
    for _ in 0..50 {
        let fv = f.eval(z).ok()?;
        let dv = d.eval(z).ok()?;
        if fv.norm() < 1e-12 * (1.0 + dv.norm() * size) {
            // The winding count pinned this cell's zero strictly inside its
            // walls, so a limit materially outside them is a neighbour's
            // zero that Newton wandered to; accepting it would both steal
            // the neighbour's entry and orphan this cell's own zero.  The
            // sliver of halo covers rounding only.
            if cell.contains(z, 1e-6) {
                return Some(ZeroEntry { location: z, multiplicity: m, count: 1 });
            }
            return None;
        }
        if dv.norm() == 0.0 {
            return None;
        }
        z -= mf * fv / dv;
        if z.norm() > 0.999_999_999 {
            return None;
        }
    }
    None
}

/// Winding number of f around the cell boundary via continuous argument
/// tracking along the four edges.
fn cell_winding(f: &DiscFunction, d: &DiscFunction, cell: &Cell) -> Result<EdgeArg> {
    let edges = [
        Edge::Arc { r: cell.r1, ta: cell.t0, tb: cell.t1 },
        Edge::Radial { t: cell.t1, ra: cell.r1, rb: cell.r0 },
        Edge::Arc { r: cell.r0, ta: cell.t1, tb: cell.t0 },
        Edge::Radial { t: cell.t0, ra: cell.r0, rb: cell.r1 },
    ];
    let mut total = 0.0;
    for e in &edges {
        match edge_delta_arg(f, d, e)? {
            EdgeArg::Value(v) => total += v,
            EdgeArg::NearZero => return Ok(EdgeArg::NearZero),
        }
    }
    Ok(EdgeArg::Value(total / std::f64::consts::TAU))
}

enum Edge {
    Arc { r: f64, ta: f64, tb: f64 },
    Radial { t: f64, ra: f64, rb: f64 },
}

impl Edge {
    fn at(&self, s: f64) -> Complex64 {
        match self {
            Edge::Arc { r, ta, tb } => Complex64::from_polar(*r, ta + s * (tb - ta)),
            Edge::Radial { t, ra, rb } => Complex64::from_polar(ra + s * (rb - ra), *t),
        }
    }

    /// Crude bound on d(arg f)/ds along the edge, from |f'/f| probes; used
    /// to size the initial sample grid so that fast phase rotation (high
    /// degrees) cannot alias through the principal value.
    fn phase_speed(&self, f: &DiscFunction, d: &DiscFunction) -> Result<f64> {
        let mut speed: f64 = 0.0;
        for k in 0..=8 {
            let s = k as f64 / 8.0;
            let z = self.at(s);
            let fv = f.eval(z)?;
            let dv = d.eval(z)?;
            let logd = if fv.norm() > 0.0 { dv.norm() / fv.norm() } else { f64::INFINITY };
            let step = match self {
                Edge::Arc { r, ta, tb } => r * (tb - ta).abs(),
                Edge::Radial { ra, rb, .. } => (rb - ra).abs(),
            };
            speed = speed.max(logd * step);
        }
        Ok(speed)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut w = a % tau;
    if w > std::f64::consts::PI {
        w -= tau;
    } else if w <= -std::f64::consts::PI {
        w += tau;
    }
    w
}

fn edge_delta_arg(f: &DiscFunction, d: &DiscFunction, e: &Edge) -> Result<EdgeArg> {
    let speed = e.phase_speed(f, d)?;
    let n0 = if speed.is_finite() {
        ((speed / 0.5).ceil() as usize).clamp(16, 16_384)
    } else {
        16_384
    };
    let mut samples = Vec::with_capacity(n0 + 1);
    let mut scale: f64 = 0.0;
    for k in 0..=n0 {
        let s = k as f64 / n0 as f64;
        let v = f.eval(e.at(s))?;
        scale = scale.max(v.norm());
        samples.push((s, v));
    }
    if scale == 0.0 {
        return Ok(EdgeArg::NearZero);
    }
    let floor = 1e-13 * scale;
    if samples.iter().any(|(_, v)| v.norm() < floor) {
        return Ok(EdgeArg::NearZero);
    }
    let mut total = 0.0;
    for w in samples.windows(2) {
        match refine_arg(f, e, w[0].0, w[0].1, w[1].0, w[1].1, floor, 0)? {
            Some(v) => total += v,
            None => return Ok(EdgeArg::NearZero),
        }
    }
    Ok(EdgeArg::Value(total))
}

fn refine_arg(
    f: &DiscFunction,
    e: &Edge,
    s0: f64,
    v0: Complex64,
    s1: f64,
    v1: Complex64,
    floor: f64,
    depth: u32,
) -> Result<Option<f64>> {
    let jump = wrap_angle(v1.arg() - v0.arg());
    if jump.abs() <= 0.8 {
        // Also require the values not to swing through a near-cancellation
        // between samples, which is how a wrap hides from the principal
        // value.
        let chord = (v1 - v0).norm();
        if chord <= 1.2 * v0.norm().min(v1.norm()) || depth >= 42 {
            return Ok(Some(jump));
        }
    }
    if depth >= 42 {
        return Ok(None);
    }
    let sm = 0.5 * (s0 + s1);
    let vm = f.eval(e.at(sm))?;
    if vm.norm() < floor {
        return Ok(None);
    }
    let left = refine_arg(f, e, s0, v0, sm, vm, floor, depth + 1)?;
    let right = refine_arg(f, e, sm, vm, s1, v1, floor, depth + 1)?;
    match (left, right) {
        (Some(a), Some(b)) => Ok(Some(a + b)),
        _ => Ok(None),
    }
}

/// Absolute residual of the Jensen identity at radius r:
/// circle mean of log|f| versus log|f(0)| plus the located-zero correction
/// sum of m_k log(r/|z_k|).
pub fn jensen_check(f: &DiscFunction, r: f64, tol: f64) -> Result<f64> {
    let f0 = f.eval(Complex64::new(0.0, 0.0))?;
    if f0.norm() < 1e-300 {
        return Err(Error::DegenerateInput("Jensen identity needs f(0) != 0".into()));
    }
    let lhs = crate::spaces::jensen_mean(f, r, tol)?.value;
    let zl = locate_zeros(f, r, tol)?;
    let mut rhs = f0.norm().ln();
    for e in &zl.entries {
        let m = e.modulus();
        if m < r {
            rhs += e.weight() as f64 * (r / m).ln();
        }
    }
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly_from_roots(roots: &[Complex64]) -> DiscFunction {
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            coeffs = next;
        }
        DiscFunction::taylor(coeffs)
    }

    #[test]
    fn count_monomial_cube() {
        let f = DiscFunction::taylor(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(count_zeros_disk(&f, 0.5, 1e-9).unwrap(), 3);
    }

    #[test]
    fn count_shifted_square() {
        let f = DiscFunction::taylor(vec![c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(count_zeros_disk(&f, 0.4, 1e-9).unwrap(), 0);
        assert_eq!(count_zeros_disk(&f, 0.6, 1e-9).unwrap(), 2);
    }

    #[test]
    fn count_matches_root_oracle() {
        let roots = [c(0.3, 0.0), c(-0.2, 0.4), c(0.0, 0.5), c(-0.6, 0.0), c(0.1, -0.1)];
        let f = poly_from_roots(&roots);
        for r in [0.15, 0.35, 0.55, 0.75, 0.9] {
            let expect = roots.iter().filter(|z| z.norm() < r).count() as u32;
            assert_eq!(count_zeros_disk(&f, r, 1e-9).unwrap(), expect, "r={r}");
        }
    }

    #[test]
    fn locate_two_real_roots() {
        let f = DiscFunction::taylor(vec![c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let zl = locate_zeros(&f, 0.9, 1e-9).unwrap();
        assert!(zl.complete);
        assert_eq!(zl.entries.len(), 2);
        let mut found: Vec<f64> = zl.entries.iter().map(|e| e.location.re).collect();
        found.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((found[0] + 0.5).abs() < 1e-10 && (found[1] - 0.5).abs() < 1e-10, "{found:?}");
        assert!(zl.entries.iter().all(|e| e.location.im.abs() < 1e-10));
        assert!(zl.entries.iter().all(|e| e.multiplicity == 1));
    }

    #[test]
    fn locate_factor_ring() {
        let f = DiscFunction::factor_product(vec![Factor { c: std::f64::consts::E, n: 8 }]).unwrap();
        let zl = locate_zeros(&f, 0.95, 1e-9).unwrap();
        assert!(zl.complete);
        assert_eq!(zl.total_count(), 8);
        let want_mod = (-1.0f64 / 8.0).exp();
        for e in &zl.entries {
            assert!((e.modulus() - want_mod).abs() < 1e-10, "{}", e.modulus());
            // Arguments at odd multiples of pi/8.
            let a = positive_angle(e.location) / (std::f64::consts::PI / 8.0);
            let odd = a.round();
            assert!((a - odd).abs() < 1e-8 && (odd as i64) % 2 == 1, "{a}");
            let residual = f.eval(e.location).unwrap().norm();
            assert!(residual < 1e-9, "{residual}");
        }
    }

    #[test]
    fn locate_quintic_matches_oracle() {
        let roots = [c(0.3, 0.0), c(-0.2, 0.4), c(0.0, 0.5), c(-0.6, 0.0), c(0.1, -0.1)];
        let f = poly_from_roots(&roots);
        let zl = locate_zeros(&f, 0.9, 1e-9).unwrap();
        assert_eq!(zl.total_count(), 5);
        for r in &roots {
            let hit = zl.entries.iter().any(|e| (e.location - r).norm() < 1e-8);
            assert!(hit, "missing {r}");
        }
    }

    #[test]
    fn locate_origin_multiple_zero() {
        // z^3 (1 - z^2/2): triple zero at the origin, no other zeros in the
        // disc.
        let f = DiscFunction::taylor(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(-0.5, 0.0),
        ]);
        let zl = locate_zeros(&f, 0.9, 1e-9).unwrap();
        assert_eq!(zl.entries.len(), 1);
        assert_eq!(zl.entries[0].multiplicity, 3);
        assert!(zl.entries[0].modulus() < 1e-12);
    }

    #[test]
    fn blaschke_sums_closed_forms() {
        let zl = ZeroList::synthetic(&[]).unwrap();
        assert_eq!(blaschke_sum(&zl, 0).unwrap(), 0.0);

        let moduli: Vec<f64> = (1..=3).map(|k| 1.0 - 1.0 / (k as f64 * k as f64)).collect();
        let zl = ZeroList::synthetic(&moduli).unwrap();
        assert!((blaschke_sum(&zl, 3).unwrap() - 49.0 / 36.0).abs() < 1e-15);

        let moduli: Vec<f64> = (1..=10).map(|k| 1.0 - 1.0 / k as f64).collect();
        let zl = ZeroList::synthetic(&moduli).unwrap();
        let h10: f64 = (1..=10).map(|k| 1.0 / k as f64).sum();
        assert!((blaschke_sum(&zl, 10).unwrap() - h10).abs() < 1e-12);
    }

    #[test]
    fn partial_products_closed_forms() {
        let moduli: Vec<f64> = (1..=100).map(|k| (-1.5 / k as f64).exp()).collect();
        let zl = ZeroList::synthetic(&moduli).unwrap();
        let h100: f64 = (1..=100).map(|k| 1.0 / k as f64).sum();
        let got = partial_products(&zl, 100).unwrap();
        assert!((got - (1.5 * h100).exp()).abs() / got < 1e-12);

        let zl = ZeroList::from_factor_product(&[Factor { c: std::f64::consts::E, n: 8 }]);
        let got = partial_products(&zl, 8).unwrap();
        assert!((got - std::f64::consts::E).abs() < 1e-12, "{got}");

        let zl = ZeroList::synthetic(&[0.0, 0.5]).unwrap();
        assert!(matches!(partial_products(&zl, 2), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn grouped_and_expanded_statistics_agree() {
        let zl = ZeroList::from_factor_product(&[
            Factor { c: 2.0, n: 4 },
            Factor { c: 3.0, n: 16 },
        ]);
        let moduli = zl.expand_moduli().unwrap();
        assert_eq!(moduli.len(), 20);
        let flat = ZeroList::synthetic(&moduli).unwrap();
        for n in [1u64, 3, 4, 5, 17, 20] {
            assert!((blaschke_sum(&zl, n).unwrap() - blaschke_sum(&flat, n).unwrap()).abs() < 1e-14);
            let a = log_partial_product(&zl, n).unwrap();
            let b = log_partial_product(&flat, n).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn fit_power_harmonic_sequence() {
        let moduli: Vec<f64> = (1..=2048).map(|k| (-1.5 / k as f64).exp()).collect();
        let zl = ZeroList::synthetic(&moduli).unwrap();
        let (gamma, res) = fit_growth(&zl, GrowthModel::Power).unwrap();
        assert!((1.485..=1.515).contains(&gamma), "{gamma}");
        assert!(res < 0.01, "{res}");
    }

    #[test]
    fn fit_sqrtlog_forced_sequence() {
        // log products forced to sqrt(log(n+1)) exactly.
        let mut moduli = Vec::with_capacity(2048);
        let mut prev = 0.0f64;
        for n in 1..=2048u64 {
            let lp = ((n + 1) as f64).ln().sqrt();
            moduli.push((-(lp - prev)).exp());
            prev = lp;
        }
        let zl = ZeroList::synthetic(&moduli).unwrap();
        let (b, _) = fit_growth(&zl, GrowthModel::SqrtLog).unwrap();
        assert!((b - 1.0).abs() <= 0.01, "{b}");
    }

    #[test]
    fn fit_power_blaschke_sequence_is_flat() {
        let moduli: Vec<f64> = (2..=2049).map(|k| 1.0 - 1.0 / (k as f64 * k as f64)).collect();
        let zl = ZeroList::synthetic(&moduli).unwrap();
        let (gamma, _) = fit_growth(&zl, GrowthModel::Power).unwrap();
        assert!(gamma.abs() <= 0.05, "{gamma}");
    }

    #[test]
    fn fit_degenerate_and_short() {
        let zl = ZeroList::synthetic(&vec![1e-6; 64]).unwrap();
        assert!(matches!(fit_growth(&zl, GrowthModel::Power), Err(Error::IllConditionedFit(_))));
        let zl = ZeroList::synthetic(&[0.5; 8]).unwrap();
        assert!(matches!(fit_growth(&zl, GrowthModel::Power), Err(Error::NeedLargerN(32))));
    }

    #[test]
    fn verdict_examples() {
        // gamma = 0.4 power growth against the sqrt-log law.
        let moduli: Vec<f64> = (1..=4096).map(|k| (-0.4 / k as f64).exp()).collect();
        let stats = zero_stats(&ZeroList::synthetic(&moduli).unwrap(), GrowthModel::Power).unwrap();
        assert_eq!(
            zero_incompatibility_verdict(&stats, GrowthLaw::SqrtLog).unwrap(),
            Compatibility::Incompatible
        );
        // Same stats dominated by a faster power law.
        assert_eq!(
            zero_incompatibility_verdict(&stats, GrowthLaw::Power { gamma: 1.5 }).unwrap(),
            Compatibility::Compatible
        );

        let moduli: Vec<f64> = (2..=4097).map(|k| 1.0 - 1.0 / (k as f64 * k as f64)).collect();
        let stats = zero_stats(&ZeroList::synthetic(&moduli).unwrap(), GrowthModel::Power).unwrap();
        assert_eq!(
            zero_incompatibility_verdict(&stats, GrowthLaw::Blaschke).unwrap(),
            Compatibility::Compatible
        );

        let moduli: Vec<f64> = (2..=4097).map(|k| 1.0 - 1.0 / k as f64).collect();
        let stats = zero_stats(&ZeroList::synthetic(&moduli).unwrap(), GrowthModel::Power).unwrap();
        assert_eq!(
            zero_incompatibility_verdict(&stats, GrowthLaw::Blaschke).unwrap(),
            Compatibility::Incompatible
        );
    }

    #[test]
    fn jensen_residuals() {
        let f = DiscFunction::constant(c(3.0, 0.0));
        assert!(jensen_check(&f, 0.5, 1e-9).unwrap() < 1e-10);

        let f = DiscFunction::taylor(vec![c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let res = jensen_check(&f, 0.75, 1e-9).unwrap();
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn csv_headers_exact() {
        let zl = ZeroList::synthetic(&[0.5, 0.75]).unwrap();
        let csv = zl.to_csv().unwrap();
        assert!(csv.starts_with("k,re,im,modulus,multiplicity,provenance\n"));
        assert!(csv.lines().count() == 3);
        assert!(csv.lines().nth(1).unwrap().ends_with(",synthetic"));

        let stats = zero_stats(
            &ZeroList::synthetic(&(1..=64).map(|k| 1.0 - 0.5 / k as f64).collect::<Vec<_>>()).unwrap(),
            GrowthModel::Power,
        )
        .unwrap();
        let csv = stats.to_csv();
        assert!(csv.starts_with("n,blaschke_sum,log_partial_product\n"));
        assert_eq!(csv.lines().count(), 65);
    }

    #[test]
    fn stats_sequences_monotone() {
        let moduli: Vec<f64> = (1..=300).map(|k| 1.0 - 1.0 / (k as f64 + 1.0)).collect();
        let stats = zero_stats(&ZeroList::synthetic(&moduli).unwrap(), GrowthModel::Power).unwrap();
        assert!(stats.blaschke_partial_sums.windows(2).all(|w| w[1] >= w[0]));
        assert!(stats.log_partial_products.windows(2).all(|w| w[1] >= w[0]));
        assert!(stats.log_partial_products.iter().all(|&p| p >= 0.0));
    }
}
