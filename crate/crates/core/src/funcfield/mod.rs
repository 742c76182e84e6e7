//! Places and heights over the rational function field Q(t): orders of
//! vanishing, isotriviality testing, the divisors carrying the generic-fiber
//! local heights, and the specialization experiment that compares fiberwise
//! canonical heights against the generic one.
//!
//! The base curve is P¹ over Q, so the places are the monic irreducible
//! polynomials π(t) together with the place at infinity; every place is
//! non-archimedean, which keeps all local heights exact rationals.

pub mod factor;
pub mod poly;
pub mod ratfunc;

use crate::arith::{weil_height, Rational};
use crate::field::Field;
use crate::local_heights::{canonical_height, HeightConfig, HeightError};
use crate::map::{HenonMap, PlanePoint};
use num_traits::{One, Zero};
use poly::Poly;
use ratfunc::RatFunc;
use std::collections::BTreeMap;
use thiserror::Error;

/// Iteration budget for entering an escape region over Q(t). Degrees double
/// each step, so this is already generous: designed families escape within
/// two steps.
const PRE_ESCAPE_CAP_FF: u32 = 12;

/// Degree guard on intermediate coordinates. Degrees and coefficient sizes
/// both double per step, so each further step costs about eight times the
/// previous one; escape in designed experiments happens within two steps.
const MAX_COORD_DEGREE: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum FfError {
    #[error("order of vanishing of the zero function is undefined")]
    ZeroInput,
    #[error("place polynomial must be monic")]
    NotMonic,
    #[error("place polynomial is not irreducible over Q: {0}")]
    NotIrreducible(Poly),
    #[error("operation requires a constant multiplier a")]
    UnsupportedNonConstantA,
    #[error("root-spread test is only implemented for quadratic polynomials (got degree {0})")]
    DegreeUnsupported(usize),
    #[error("orbit did not settle within the iteration budget")]
    CapExceeded { partial_plus: QDivisor, partial_minus: QDivisor },
}

/// A place of Q(t): a monic irreducible polynomial, or the place at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FFPlace {
    Finite(Poly),
    Infinity,
}

impl FFPlace {
    /// A finite place, validated monic and irreducible.
    pub fn finite(pi: Poly) -> Result<Self, FfError> {
        if !pi.is_monic() {
            return Err(FfError::NotMonic);
        }
        if !factor::is_irreducible(&pi) {
            return Err(FfError::NotIrreducible(pi));
        }
        Ok(FFPlace::Finite(pi))
    }

    pub fn infinity() -> Self {
        FFPlace::Infinity
    }

    /// Residue degree: deg π, and 1 at infinity.
    pub fn degree(&self) -> usize {
        match self {
            FFPlace::Finite(pi) => pi.degree().unwrap_or(0),
            FFPlace::Infinity => 1,
        }
    }
}

impl std::fmt::Display for FFPlace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FFPlace::Finite(pi) => write!(f, "{pi}"),
            FFPlace::Infinity => write!(f, "inf"),
        }
    }
}

impl PartialOrd for FFPlace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FFPlace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (FFPlace::Finite(a), FFPlace::Finite(b)) => {
                (a.degree(), a.coeffs()).cmp(&(b.degree(), b.coeffs()))
            }
            (FFPlace::Finite(_), FFPlace::Infinity) => std::cmp::Ordering::Less,
            (FFPlace::Infinity, FFPlace::Finite(_)) => std::cmp::Ordering::Greater,
            (FFPlace::Infinity, FFPlace::Infinity) => std::cmp::Ordering::Equal,
        }
    }
}

/// ord_β(g): multiplicity of π in g at a finite place, and
/// deg(den) − deg(num) at infinity.
pub fn ord_at_place(g: &RatFunc, place: &FFPlace) -> Result<i64, FfError> {
    ord_or_infinite(g, place).ok_or(FfError::ZeroInput)
}

/// As ord_at_place, but None encodes ord(0) = +∞ for internal comparisons.
fn ord_or_infinite(g: &RatFunc, place: &FFPlace) -> Option<i64> {
    if Field::is_zero(g) {
        return None;
    }
    Some(match place {
        FFPlace::Finite(pi) => {
            g.num().multiplicity_of(pi) as i64 - g.den().multiplicity_of(pi) as i64
        }
        FFPlace::Infinity => g.den().degree().unwrap() as i64 - g.num().degree().unwrap() as i64,
    })
}

/// A finite formal sum of places with rational weights.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QDivisor {
    weights: BTreeMap<FFPlace, Rational>,
}

impl QDivisor {
    pub fn zero() -> Self {
        QDivisor::default()
    }

    pub fn insert(&mut self, place: FFPlace, weight: Rational) {
        if !Field::is_zero(&weight) {
            self.weights.insert(place, weight);
        }
    }

    pub fn weight(&self, place: &FFPlace) -> Rational {
        self.weights.get(place).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FFPlace, &Rational)> {
        self.weights.iter()
    }

    /// deg D = Σ weight·deg(place).
    pub fn degree(&self) -> Rational {
        let mut acc = Rational::zero();
        for (place, w) in &self.weights {
            acc += w * Rational::from_integer(place.degree().into());
        }
        acc
    }
}

/// Whether the family becomes constant after an affine change of variables.
///
/// Depressing f by α = −b_{d−1}/d is a complete test in characteristic zero:
/// if any translate of f has constant coefficients, the depressed form does.
/// Requires a constant multiplier a.
pub fn is_isotrivial(map: &HenonMap<RatFunc>) -> Result<bool, FfError> {
    let a = map.a().as_constant().ok_or(FfError::UnsupportedNonConstantA)?;
    debug_assert!(!Field::is_zero(&a));
    let d = map.degree();
    let alpha = map.coeffs()[d - 1]
        .neg()
        .mul(&RatFunc::constant(Rational::new(1.into(), (d as i64).into())));
    // expand f(z + α) by Horner in the polynomial variable
    let one = RatFunc::constant(Rational::one());
    let mut h: Vec<RatFunc> = vec![one];
    for i in (0..d).rev() {
        let mut next = vec![alpha.zero_like(); h.len() + 1];
        for (j, c) in h.iter().enumerate() {
            next[j + 1] = next[j + 1].add(c);
            next[j] = next[j].add(&c.mul(&alpha));
        }
        next[0] = next[0].add(&map.coeffs()[i]);
        h = next;
    }
    Ok(h.iter().all(RatFunc::is_constant))
}

/// Whether the roots of a quadratic f spread further apart than 1 at the
/// given place: for f = y² + b₁y + b₀ the squared root difference is the
/// discriminant, so the test is ord_β(b₁² − 4b₀) < 0.
pub fn rho_exceeds_one(map: &HenonMap<RatFunc>, place: &FFPlace) -> Result<bool, FfError> {
    if map.degree() != 2 {
        return Err(FfError::DegreeUnsupported(map.degree()));
    }
    let b0 = &map.coeffs()[0];
    let b1 = &map.coeffs()[1];
    let four = RatFunc::constant(Rational::from_integer(4.into()));
    let disc = b1.mul(b1).sub(&four.mul(b0));
    match ord_or_infinite(&disc, place) {
        None => Ok(false), // repeated root: spread is zero
        Some(v) => Ok(v < 0),
    }
}

/// Escape-region membership over a place of Q(t), in valuation form.
fn in_escape_ff(
    map: &HenonMap<RatFunc>,
    pt: &PlanePoint<RatFunc>,
    place: &FFPlace,
    forward: bool,
) -> bool {
    let d = map.degree() as i64;
    let (lead, other) = if forward {
        (pt.y.clone(), &pt.x)
    } else {
        (pt.x.mul(&map.a().inv().expect("a nonzero")), &pt.y)
    };
    let Some(lead_ord) = ord_or_infinite(&lead, place) else {
        return false;
    };
    // |lead| > 1
    if lead_ord >= 0 {
        return false;
    }
    // |lead| > |other|^{1/d}
    if let Some(v) = ord_or_infinite(other, place) {
        if d * lead_ord >= v {
            return false;
        }
    }
    // |lead| > |b_i|^{1/(d−i)}
    for (i, b) in map.coeffs().iter().enumerate() {
        if let Some(v) = ord_or_infinite(b, place) {
            if (d - i as i64) * lead_ord >= v {
                return false;
            }
        }
    }
    // |lead| > |a|^{1/(d−1)}
    let va = ord_or_infinite(map.a(), place).expect("a nonzero");
    (d - 1) * lead_ord < va
}

/// Good reduction and integrality at a place keep a half-orbit integral, and
/// integral points never escape.
fn ff_zero_shortcut(
    map: &HenonMap<RatFunc>,
    start: &PlanePoint<RatFunc>,
    place: &FFPlace,
    forward: bool,
) -> bool {
    let nonneg = |g: &RatFunc| ord_or_infinite(g, place).is_none_or(|v| v >= 0);
    if !map.coeffs().iter().all(nonneg) || !nonneg(&start.x) || !nonneg(&start.y) {
        return false;
    }
    let va = ord_or_infinite(map.a(), place).expect("a nonzero");
    if forward {
        va >= 0
    } else {
        va <= 0
    }
}

/// One weight of a height divisor, with the step at which the orbit entered
/// the escape region (the weight is then an integer divided by d^step).
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorEntry {
    pub place: FFPlace,
    pub weight: Rational,
    pub escape_step: u32,
}

fn coordinate_degree(p: &PlanePoint<RatFunc>) -> usize {
    let deg = |g: &RatFunc| g.num().degree().unwrap_or(0).max(g.den().degree().unwrap_or(0));
    deg(&p.x).max(deg(&p.y))
}

/// The finite places where anything interesting can happen: irreducible
/// factors of coefficient and coordinate denominators, and of both parts of a.
fn relevant_finite_places(map: &HenonMap<RatFunc>, start: &PlanePoint<RatFunc>) -> Vec<FFPlace> {
    let mut polys: Vec<&Poly> = Vec::new();
    for b in map.coeffs() {
        polys.push(b.den());
    }
    polys.push(start.x.den());
    polys.push(start.y.den());
    polys.push(map.a().num());
    polys.push(map.a().den());
    let mut places: Vec<FFPlace> = Vec::new();
    for p in polys {
        if p.is_constant() {
            continue;
        }
        for (q, _) in factor::factor(p).1 {
            let place = FFPlace::Finite(q);
            if !places.contains(&place) {
                places.push(place);
            }
        }
    }
    places.sort();
    places
}

fn divisor_side(
    map: &HenonMap<RatFunc>,
    start: &PlanePoint<RatFunc>,
    places: &[FFPlace],
    forward: bool,
) -> Result<Vec<DivisorEntry>, Vec<DivisorEntry>> {
    let d = map.degree();
    let mut entries = Vec::new();
    let mut orbit: Vec<PlanePoint<RatFunc>> = vec![start.clone()];
    let mut incomplete = false;
    for place in places {
        if ff_zero_shortcut(map, start, place, forward) {
            continue;
        }
        let mut escaped = None;
        for step in 0..=PRE_ESCAPE_CAP_FF {
            while orbit.len() <= step as usize {
                let next = if forward {
                    map.apply(orbit.last().unwrap())
                } else {
                    map.apply_inverse(orbit.last().unwrap())
                };
                if coordinate_degree(&next) > MAX_COORD_DEGREE {
                    break;
                }
                orbit.push(next);
            }
            let Some(pt) = orbit.get(step as usize) else { break };
            if in_escape_ff(map, pt, place, forward) {
                escaped = Some((step, pt.clone()));
                break;
            }
        }
        match escaped {
            Some((step, pt)) => {
                let dn = Rational::from_integer((d as i64).into()).pow(step as i32);
                let weight = if forward {
                    let vy = ord_or_infinite(&pt.y, place).expect("escaped leading coordinate");
                    Rational::from_integer((-vy).into()) / dn
                } else {
                    let vx = ord_or_infinite(&pt.x, place).expect("escaped leading coordinate");
                    let va = ord_or_infinite(map.a(), place).expect("a nonzero");
                    let a_term = Rational::new((d as i64 * va).into(), (d as i64 - 1).into());
                    (Rational::from_integer((-vx).into()) + a_term) / dn
                };
                entries.push(DivisorEntry { place: place.clone(), weight, escape_step: step });
            }
            None => incomplete = true,
        }
    }
    if incomplete {
        Err(entries)
    } else {
        Ok(entries)
    }
}

fn entries_to_divisor(entries: &[DivisorEntry]) -> QDivisor {
    let mut div = QDivisor::zero();
    for e in entries {
        div.insert(e.place.clone(), e.weight.clone());
    }
    div
}

/// The divisor entries behind D₊ and D₋, with escape steps retained.
pub fn height_divisor_entries(
    map: &HenonMap<RatFunc>,
    start: &PlanePoint<RatFunc>,
) -> Result<(Vec<DivisorEntry>, Vec<DivisorEntry>), FfError> {
    // a periodic point is bounded at every place, so both divisors vanish;
    // scan with the degree guard since non-periodic orbits blow up quickly
    let mut current = start.clone();
    for _ in 0..PRE_ESCAPE_CAP_FF {
        current = map.apply(&current);
        if coordinate_degree(&current) > MAX_COORD_DEGREE {
            break;
        }
        if current == *start {
            return Ok((Vec::new(), Vec::new()));
        }
    }
    let mut places = relevant_finite_places(map, start);
    places.push(FFPlace::Infinity);
    let plus = divisor_side(map, start, &places, true);
    let minus = divisor_side(map, start, &places, false);
    match (plus, minus) {
        (Ok(p), Ok(m)) => Ok((p, m)),
        (p, m) => {
            let partial = |r: Result<Vec<DivisorEntry>, Vec<DivisorEntry>>| match r {
                Ok(v) | Err(v) => entries_to_divisor(&v),
            };
            Err(FfError::CapExceeded {
                partial_plus: partial(p),
                partial_minus: partial(m),
            })
        }
    }
}

/// D₊(φ, P) and D₋(φ, P): places weighted by the local canonical heights of
/// the generic fiber. Places with weight zero are omitted.
pub fn height_divisors(
    map: &HenonMap<RatFunc>,
    start: &PlanePoint<RatFunc>,
) -> Result<(QDivisor, QDivisor), FfError> {
    let (plus, minus) = height_divisor_entries(map, start)?;
    Ok((entries_to_divisor(&plus), entries_to_divisor(&minus)))
}

/// ĥ_φ(P) on the generic fiber: deg D₊ + deg D₋, an exact rational.
pub fn generic_canonical_height(
    map: &HenonMap<RatFunc>,
    start: &PlanePoint<RatFunc>,
) -> Result<Rational, FfError> {
    let (dp, dm) = height_divisors(map, start)?;
    Ok(dp.degree() + dm.degree())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecStatus {
    Ok,
    /// Some coefficient or coordinate has a pole at the sample, or the
    /// specialized map degenerates (a(t₀) = 0).
    PoleAtSample,
    CapExceeded,
}

impl SpecStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpecStatus::Ok => "ok",
            SpecStatus::PoleAtSample => "pole",
            SpecStatus::CapExceeded => "cap_exceeded",
        }
    }
}

/// One row of the specialization table.
#[derive(Debug, Clone)]
pub struct SpecRow {
    pub t0: Rational,
    pub h_t0: f64,
    pub hhat: Option<f64>,
    pub error_radius: Option<f64>,
    pub ratio: Option<f64>,
    pub status: SpecStatus,
}

/// Specialize the family at each sample parameter and compare the fiberwise
/// canonical height against the height of the parameter.
pub fn specialization_experiment(
    map: &HenonMap<RatFunc>,
    start: &PlanePoint<RatFunc>,
    samples: &[Rational],
    config: &HeightConfig,
) -> Vec<SpecRow> {
    samples
        .iter()
        .map(|t0| {
            let h_t0 = weil_height(t0);
            let incomplete = |status| SpecRow {
                t0: t0.clone(),
                h_t0,
                hhat: None,
                error_radius: None,
                ratio: None,
                status,
            };
            let Some(fiber) = specialize_map(map, t0) else {
                return incomplete(SpecStatus::PoleAtSample);
            };
            let (Some(x0), Some(y0)) = (start.x.eval(t0), start.y.eval(t0)) else {
                return incomplete(SpecStatus::PoleAtSample);
            };
            match canonical_height(&fiber, &PlanePoint::new(x0, y0), config) {
                Ok(h) => {
                    let ratio = if h_t0 > 0.0 { Some(h.total / h_t0) } else { None };
                    SpecRow {
                        t0: t0.clone(),
                        h_t0,
                        hhat: Some(h.total),
                        error_radius: Some(h.error_radius),
                        ratio,
                        status: SpecStatus::Ok,
                    }
                }
                Err(HeightError::CanonicalCapExceeded { .. }) | Err(_) => {
                    incomplete(SpecStatus::CapExceeded)
                }
            }
        })
        .collect()
}

/// The fiber map at t = t₀, or None when a coefficient has a pole there or
/// the multiplier vanishes.
pub fn specialize_map(map: &HenonMap<RatFunc>, t0: &Rational) -> Option<HenonMap<Rational>> {
    let a0 = map.a().eval(t0)?;
    if Field::is_zero(&a0) {
        return None;
    }
    let coeffs: Option<Vec<Rational>> = map.coeffs().iter().map(|b| b.eval(t0)).collect();
    HenonMap::new(a0, coeffs?).ok()
}
