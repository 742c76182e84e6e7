//! Escape regions, local canonical heights λ̂±_v at every place of Q, and
//! globally assembled canonical heights ĥ⁺, ĥ⁻, ĥ with certified error.
//!
//! The certification boundary sits exactly here: finite-place heights are
//! exact symbolic values (a rational coefficient times log p), while the
//! archimedean place carries an explicit interval. Once an orbit enters the
//! escape region the growth of log‖φ^N P‖ is pure powering up to a
//! multiplicative factor that is controlled step by step, so the interval
//! width shrinks doubly exponentially with each extra iteration.

use crate::arith::{
    factor_biguint, ln_abs_rational, padic_valuation, ArithError, QPlace, Rational, Valuation,
};
use crate::field::Field;
use crate::map::{HenonMap, PlanePoint};
use num_traits::{One, Signed, ToPrimitive};
use std::collections::BTreeSet;
use thiserror::Error;

/// Which of the two canonical heights a local value contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightConfig {
    /// Target width for the archimedean interval.
    pub arch_tolerance: f64,
    /// Iteration budget for entering an escape region.
    pub pre_escape_cap: u32,
    /// Abort threshold on coordinate size, in bits. Escape is doubly
    /// exponential, so genuine escapers certify long before this; the cap
    /// guards near-Julia pathologies and orbits that stay bounded at one
    /// place while exploding at another. Reduction costs grow quadratically
    /// in this bound, so raising it far past the default gets expensive.
    pub max_coordinate_bits: u64,
}

impl Default for HeightConfig {
    fn default() -> Self {
        HeightConfig {
            arch_tolerance: 1e-9,
            pre_escape_cap: 64,
            // about twenty thousand decimal digits
            max_coordinate_bits: 65_536,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum HeightError {
    #[error("iteration budget exhausted before the requested tolerance was met")]
    CapExceeded { partial: Box<LocalHeightValue> },
    #[error("canonical height incomplete: a local computation exhausted its budget")]
    CanonicalCapExceeded { partial: Box<CanonicalHeightValue> },
    #[error("cannot determine the relevant primes: {0}")]
    Factorization(ArithError),
}

/// One local canonical height λ̂±_v.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalHeightValue {
    pub place: QPlace,
    pub direction: Direction,
    pub form: LocalHeightForm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalHeightForm {
    /// coeff · log(base), exactly. Only at finite places, after the orbit
    /// enters the escape region at `escape_step`.
    ExactLog { coeff: Rational, base: u64, escape_step: u32 },
    /// A certified enclosure; only at the archimedean place. `lo = 0`
    /// means a bounded-looking orbit whose true value is very likely zero,
    /// and the reported value is then 0 with error radius `hi`.
    Interval { lo: f64, hi: f64 },
    /// Exactly zero: good reduction and an integral point, so the orbit can
    /// never meet the escape region.
    CertifiedZero,
    /// A bad place where the orbit still looked bounded when the iteration
    /// budget ran out. The true value lies in [0, allowance]; reported as 0
    /// with the allowance folded into the error radius.
    HeuristicZero { allowance: f64, steps: u32 },
}

impl LocalHeightValue {
    /// The reported real value.
    pub fn value(&self) -> f64 {
        match &self.form {
            LocalHeightForm::ExactLog { coeff, base, .. } => {
                rational_to_f64(coeff) * (*base as f64).ln()
            }
            LocalHeightForm::Interval { lo, hi } => {
                if *lo == 0.0 {
                    0.0
                } else {
                    0.5 * (lo + hi)
                }
            }
            LocalHeightForm::CertifiedZero => 0.0,
            LocalHeightForm::HeuristicZero { .. } => 0.0,
        }
    }

    /// Bound on |reported − true|.
    pub fn error_radius(&self) -> f64 {
        match &self.form {
            // the symbolic value is exact; only its f64 rendering rounds
            LocalHeightForm::ExactLog { .. } => self.value().abs() * 1e-14,
            LocalHeightForm::Interval { lo, hi } => {
                if *lo == 0.0 {
                    *hi
                } else {
                    0.5 * (hi - lo)
                }
            }
            LocalHeightForm::CertifiedZero => 0.0,
            LocalHeightForm::HeuristicZero { allowance, .. } => *allowance,
        }
    }
}

/// ĥ⁺, ĥ⁻, and ĥ = ĥ⁺ + ĥ⁻ with a certified error radius and the per-place
/// breakdown that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalHeightValue {
    pub h_plus: f64,
    pub h_minus: f64,
    pub total: f64,
    pub error_radius: f64,
    pub local_breakdown: Vec<LocalHeightValue>,
}

fn rational_to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    if q.numer().magnitude().bits() <= 52 && q.denom().magnitude().bits() <= 52 {
        sign * (q.numer().magnitude().to_u64().unwrap() as f64
            / q.denom().magnitude().to_u64().unwrap() as f64)
    } else {
        sign * ln_abs_rational(q).exp()
    }
}

/// C_{f,v} = max_i { |b_i|_v^{1/(d−i)}, 1 } as a float. The exact membership
/// predicates below never go through this; it exists for reporting.
pub fn c_f_v(coeffs: &[Rational], v: QPlace) -> f64 {
    let d = coeffs.len();
    let mut best = 1.0f64;
    for (i, b) in coeffs.iter().enumerate() {
        if b.is_zero() {
            continue;
        }
        let abs = crate::arith::abs_at_place(b, v);
        best = best.max(abs.powf(1.0 / (d - i) as f64));
    }
    best
}

/// Compare |q|_v with c·|r|_v^{1/k} without leaving exact arithmetic:
/// |q| > c·|r|^{1/k}  ⇔  |q|^k > c^k·|r|. `c` is the archimedean constant;
/// at finite places c = 1.
fn abs_power_gt(q: &Rational, k: usize, c: u64, r: &Rational, place: QPlace) -> bool {
    match place {
        QPlace::Archimedean => {
            let lhs = q.abs().pow(k as i32);
            let rhs = Rational::from_integer(c.into()).pow(k as i32) * r.abs();
            lhs > rhs
        }
        QPlace::Finite(p) => {
            if q.is_zero() {
                return false;
            }
            if r.is_zero() {
                return true;
            }
            let vq = padic_valuation(q, p).unwrap_finite();
            let vr = padic_valuation(r, p).unwrap_finite();
            // |q|^k > |r| ⇔ −k·v(q) > −v(r)
            k as i64 * vq < vr
        }
    }
}

/// Membership in the forward escape region ℬ⁺_v.
///
/// For the quadratic family (d = 2, a = 1) this is the refined region
/// |y|_v² > (3)_v·max{|x|_v, |b|_v, 1}; otherwise the general region
/// |y|_v > (d+2)_v·max{|x|_v^{1/d}, C_{f,v}, |a|_v^{1/(d−1)}}.
pub fn in_escape_plus(map: &HenonMap<Rational>, p: &PlanePoint<Rational>, v: QPlace) -> bool {
    if let Some(b) = map.quadratic_parameter() {
        quadratic_region(&p.y, &p.x, b, v)
    } else {
        general_region_plus(map, p, v)
    }
}

/// Membership in the backward escape region ℬ⁻_v. Quadratic refined form:
/// |x|_v² > (3)_v·max{|y|_v, |b|_v, 1}.
pub fn in_escape_minus(map: &HenonMap<Rational>, p: &PlanePoint<Rational>, v: QPlace) -> bool {
    if let Some(b) = map.quadratic_parameter() {
        quadratic_region(&p.x, &p.y, b, v)
    } else {
        general_region_minus(map, p, v)
    }
}

/// |lead|² > (3)_v·max{|other|, |b|, 1}, exactly.
fn quadratic_region(lead: &Rational, other: &Rational, b: &Rational, v: QPlace) -> bool {
    match v {
        QPlace::Archimedean => {
            let three = Rational::from_integer(3.into());
            let lhs = lead.abs() * lead.abs();
            let mut rhs = other.abs();
            if b.abs() > rhs {
                rhs = b.abs();
            }
            if rhs < Rational::one() {
                rhs = Rational::one();
            }
            lhs > three * rhs
        }
        QPlace::Finite(p) => {
            if lead.is_zero() {
                return false;
            }
            let vl = padic_valuation(lead, p).unwrap_finite();
            // 2·v(lead) < min(v(other), v(b), 0)
            let mut min = 0i64;
            if let Valuation::Finite(vo) = padic_valuation(other, p) {
                min = min.min(vo);
            }
            if let Valuation::Finite(vb) = padic_valuation(b, p) {
                min = min.min(vb);
            }
            2 * vl < min
        }
    }
}

fn general_region_plus(map: &HenonMap<Rational>, p: &PlanePoint<Rational>, v: QPlace) -> bool {
    general_region(map, &p.y, &p.x, v)
}

fn general_region_minus(map: &HenonMap<Rational>, p: &PlanePoint<Rational>, v: QPlace) -> bool {
    let a_inv_x = &p.x * map.a().recip();
    general_region(map, &a_inv_x, &p.y, v)
}

/// |lead|_v > (d+2)_v·max{|other|_v^{1/d}, C_{f,v}, |a|_v^{1/(d−1)}}, exactly,
/// term by term with cleared exponents.
fn general_region(map: &HenonMap<Rational>, lead: &Rational, other: &Rational, v: QPlace) -> bool {
    let d = map.degree();
    let c = match v {
        QPlace::Archimedean => (d + 2) as u64,
        QPlace::Finite(_) => 1,
    };
    if lead.is_zero() {
        return false;
    }
    // |lead| > c·|other|^{1/d}
    if !abs_power_gt(lead, d, c, other, v) {
        return false;
    }
    // |lead| > c·|b_i|^{1/(d−i)} for every i, and |lead| > c·1
    if !abs_power_gt(lead, 1, c, &Rational::one(), v) {
        return false;
    }
    for (i, b) in map.coeffs().iter().enumerate() {
        if !b.is_zero() && !abs_power_gt(lead, d - i, c, b, v) {
            return false;
        }
    }
    // |lead| > c·|a|^{1/(d−1)}
    abs_power_gt(lead, d - 1, c, map.a(), v)
}

/// Per-place confinement bound for the quadratic family:
/// ‖x, y‖_v ≤ (3)_v·max{1, |b|_v}^{1/2} at ∞ and at every prime dividing a
/// denominator of x, y, or b. Periodic points satisfy this everywhere.
pub fn confinement_check(map: &HenonMap<Rational>, p: &PlanePoint<Rational>) -> bool {
    let b = map
        .quadratic_parameter()
        .expect("confinement bound is specific to the quadratic family");
    // archimedean: max(|x|, |y|)² ≤ 9·max(1, |b|)
    let norm = if p.x.abs() > p.y.abs() { p.x.abs() } else { p.y.abs() };
    let mut rhs = b.abs();
    if rhs < Rational::one() {
        rhs = Rational::one();
    }
    if &norm * &norm > Rational::from_integer(9.into()) * rhs {
        return false;
    }
    // finite: 2·min(v(x), v(y)) ≥ min(0, v(b)) at primes of the denominators
    let mut primes = BTreeSet::new();
    for q in [&p.x, &p.y, b] {
        if let Ok(fs) = factor_biguint(q.denom().magnitude()) {
            primes.extend(fs.into_iter().map(|(pr, _)| pr));
        }
    }
    for prime in primes {
        let mut min_v = i64::MAX;
        for q in [&p.x, &p.y] {
            if let Valuation::Finite(vq) = padic_valuation(q, prime) {
                min_v = min_v.min(vq);
            }
        }
        if min_v == i64::MAX {
            continue; // both coordinates zero
        }
        let vb = match padic_valuation(b, prime) {
            Valuation::Finite(v) => v.min(0),
            Valuation::Infinite => 0,
        };
        if 2 * min_v < vb {
            return false;
        }
    }
    true
}

/// Lazily extended exact orbit in one direction, with a bit-size guard.
struct OrbitCache<'m> {
    map: &'m HenonMap<Rational>,
    direction: Direction,
    pts: Vec<PlanePoint<Rational>>,
    max_bits: u64,
    capped: bool,
}

fn point_bits(p: &PlanePoint<Rational>) -> u64 {
    let b = |q: &Rational| q.numer().magnitude().bits().max(q.denom().magnitude().bits());
    b(&p.x).max(b(&p.y))
}

impl<'m> OrbitCache<'m> {
    fn new(map: &'m HenonMap<Rational>, direction: Direction, start: PlanePoint<Rational>, max_bits: u64) -> Self {
        OrbitCache { map, direction, pts: vec![start], max_bits, capped: false }
    }

    /// φ^{±n}(P), or None once the size guard has tripped.
    fn get(&mut self, n: usize) -> Option<&PlanePoint<Rational>> {
        while self.pts.len() <= n {
            if self.capped {
                return None;
            }
            let next = match self.direction {
                Direction::Plus => self.map.apply(self.pts.last().unwrap()),
                Direction::Minus => self.map.apply_inverse(self.pts.last().unwrap()),
            };
            if point_bits(&next) > self.max_bits {
                self.capped = true;
                return None;
            }
            self.pts.push(next);
        }
        self.pts.get(n)
    }

    fn last_step(&self) -> usize {
        self.pts.len() - 1
    }
}

/// log⁺‖P‖_v.
fn log_plus_norm(p: &PlanePoint<Rational>, v: QPlace) -> f64 {
    match v {
        QPlace::Archimedean => {
            let norm = if p.x.abs() > p.y.abs() { p.x.abs() } else { p.y.abs() };
            if norm <= Rational::one() {
                0.0
            } else {
                ln_abs_rational(&norm)
            }
        }
        QPlace::Finite(prime) => {
            let mut min_v = i64::MAX;
            for q in [&p.x, &p.y] {
                if let Valuation::Finite(vq) = padic_valuation(q, prime) {
                    min_v = min_v.min(vq);
                }
            }
            if min_v == i64::MAX || min_v >= 0 {
                0.0
            } else {
                (-min_v) as f64 * (prime as f64).ln()
            }
        }
    }
}

/// ln of the one-step growth constant: log⁺‖step(Q)‖ ≤ d·log⁺‖Q‖ + ln C_v.
fn growth_constant_ln(map: &HenonMap<Rational>, v: QPlace, direction: Direction) -> f64 {
    let d = map.degree() as f64;
    let abs = |q: &Rational| crate::arith::abs_at_place(q, v);
    let coeff_max = map.coeffs().iter().map(&abs).fold(1.0f64, f64::max);
    let c = match direction {
        Direction::Plus => coeff_max.max(abs(map.a())),
        Direction::Minus => coeff_max * abs(&map.a().recip()).max(1.0).powf(d),
    };
    match v {
        QPlace::Archimedean => ((map.degree() + 2) as f64 * c).ln().max(0.0),
        QPlace::Finite(_) => c.ln().max(0.0),
    }
}

/// Unconditional upper bound on λ̂±_v(P) from the point reached at `step`:
/// d^{−step}·(log⁺‖P_step‖_v + ln C_v/(d−1)).
fn residual_bound(
    map: &HenonMap<Rational>,
    reached: &PlanePoint<Rational>,
    step: usize,
    v: QPlace,
    direction: Direction,
) -> f64 {
    let d = map.degree() as f64;
    let scale = d.powi(-(step as i32));
    scale * (log_plus_norm(reached, v) + growth_constant_ln(map, v, direction) / (d - 1.0))
}

/// λ̂±_p at a finite place: iterate exactly until the orbit enters the escape
/// region (then the value is an exact multiple of log p), or certify zero, or
/// report a bounded-looking orbit with an explicit allowance.
fn local_height_finite(
    map: &HenonMap<Rational>,
    cache: &mut OrbitCache,
    prime: u64,
    direction: Direction,
    config: &HeightConfig,
) -> LocalHeightValue {
    let place = QPlace::Finite(prime);
    let d = map.degree();
    if finite_zero_shortcut(map, &cache.pts[0], prime, direction) {
        return LocalHeightValue { place, direction, form: LocalHeightForm::CertifiedZero };
    }
    for step in 0..=config.pre_escape_cap {
        let Some(pt) = cache.get(step as usize) else { break };
        let escaped = match direction {
            Direction::Plus => in_escape_plus(map, pt, place),
            Direction::Minus => in_escape_minus(map, pt, place),
        };
        if escaped {
            let dn = Rational::from_integer(d.into()).pow(step as i32);
            let coeff = match direction {
                Direction::Plus => {
                    let vy = padic_valuation(&pt.y, prime).unwrap_finite();
                    Rational::from_integer((-vy).into()) / dn
                }
                Direction::Minus => {
                    let vx = padic_valuation(&pt.x, prime).unwrap_finite();
                    let va = match padic_valuation(map.a(), prime) {
                        Valuation::Finite(v) => v,
                        Valuation::Infinite => unreachable!("a is nonzero"),
                    };
                    let a_term = Rational::new((d as i64 * va).into(), (d as i64 - 1).into());
                    (Rational::from_integer((-vx).into()) + a_term) / dn
                }
            };
            return LocalHeightValue {
                place,
                direction,
                form: LocalHeightForm::ExactLog { coeff, base: prime, escape_step: step },
            };
        }
    }
    let steps = cache.last_step().min(config.pre_escape_cap as usize);
    let reached = &cache.pts[steps];
    let allowance = residual_bound(map, reached, steps, place, direction);
    LocalHeightValue {
        place,
        direction,
        form: LocalHeightForm::HeuristicZero { allowance, steps: steps as u32 },
    }
}

/// Good reduction plus an integral point keeps the relevant half-orbit
/// integral forever, and an integral point can never enter the escape region.
fn finite_zero_shortcut(
    map: &HenonMap<Rational>,
    start: &PlanePoint<Rational>,
    prime: u64,
    direction: Direction,
) -> bool {
    let nonneg = |q: &Rational| match padic_valuation(q, prime) {
        Valuation::Finite(v) => v >= 0,
        Valuation::Infinite => true,
    };
    if !map.coeffs().iter().all(nonneg) || !nonneg(&start.x) || !nonneg(&start.y) {
        return false;
    }
    let va = padic_valuation(map.a(), prime).unwrap_finite();
    match direction {
        Direction::Plus => va >= 0,
        Direction::Minus => va <= 0,
    }
}

/// λ̂±_∞: iterate exactly into the forward-closed escape region, then tighten
/// the enclosure by further steps. At a region point T (at least one step past
/// entry), λ̂ = d^{−T}(ln m_T − κ_a) + tail with |tail| ≤ d^{−T}·2c/((d−1)·m_T),
/// where m_T is the leading coordinate size, κ_a the a-correction for the
/// backward direction, and c a fixed constant of the map. m_T squares per
/// step, so a handful of extra iterations certify any sensible tolerance.
fn local_height_arch(
    map: &HenonMap<Rational>,
    cache: &mut OrbitCache,
    direction: Direction,
    config: &HeightConfig,
) -> Result<LocalHeightValue, HeightError> {
    let place = QPlace::Archimedean;
    let d = map.degree();
    let df = d as f64;

    // phase 1: find entry into the forward-closed general region
    let mut entry = None;
    for step in 0..=config.pre_escape_cap {
        let Some(pt) = cache.get(step as usize) else { break };
        let inside = match direction {
            Direction::Plus => general_region_plus(map, pt, place),
            Direction::Minus => general_region_minus(map, pt, place),
        };
        if inside {
            entry = Some(step as usize);
            break;
        }
    }
    let Some(entry) = entry else {
        // bounded-looking orbit: the true value sits in [0, residual]
        let steps = cache.last_step().min(config.pre_escape_cap as usize);
        let hi = residual_bound(map, &cache.pts[steps], steps, place, direction);
        let value = LocalHeightValue {
            place,
            direction,
            form: LocalHeightForm::Interval { lo: 0.0, hi },
        };
        return if hi <= config.arch_tolerance {
            Ok(value)
        } else {
            Err(HeightError::CapExceeded { partial: Box::new(value) })
        };
    };

    // c bounds the relative one-step deviation: |u_j| ≤ c/m_j from one step
    // past entry onwards
    let abs_arch = |q: &Rational| crate::arith::abs_at_place(q, QPlace::Archimedean);
    let coeff_sum: f64 = map.coeffs().iter().map(&abs_arch).sum();
    let c = match direction {
        Direction::Plus => coeff_sum + abs_arch(map.a()).max(1.0),
        Direction::Minus => coeff_sum + 1.0,
    };
    // backward direction measures m through w = x/a and corrects by
    // κ_a = (d/(d−1))·ln|a|
    let a_abs_ln = ln_abs_rational(map.a());
    let kappa = match direction {
        Direction::Plus => 0.0,
        Direction::Minus => df / (df - 1.0) * a_abs_ln,
    };

    let hard_cap = entry + 1 + 96;
    let mut t = entry + 1;
    loop {
        if cache.get(t).is_none() || t > hard_cap {
            // size guard tripped: fall back to the fixed window
            // [−ln(d+2), ln((2d+3)/(d+2))]/(d−1) valid at any region point
            let t_last = cache.last_step().min(hard_cap).max(entry);
            let m_ln = leading_ln(map, &cache.pts[t_last], direction);
            let scale = df.powi(-(t_last as i32));
            let eps_lo = -((d + 2) as f64).ln() / (df - 1.0);
            let eps_hi = ((2 * d + 3) as f64 / (d + 2) as f64).ln() / (df - 1.0);
            let slop = 1e-13 * (1.0 + m_ln.abs() + kappa.abs());
            let lo = (scale * (m_ln - kappa + eps_lo - slop)).max(0.0);
            let hi = scale * (m_ln - kappa + eps_hi + slop);
            let value = LocalHeightValue {
                place,
                direction,
                form: LocalHeightForm::Interval { lo, hi },
            };
            return if hi - lo <= config.arch_tolerance {
                Ok(value)
            } else {
                Err(HeightError::CapExceeded { partial: Box::new(value) })
            };
        }
        let pt = &cache.pts[t];
        let m_ln = leading_ln(map, pt, direction);
        // tail bound needs c/m ≤ 1/2
        let ratio_ln = c.ln() - m_ln;
        if ratio_ln <= -(2.0f64.ln()) {
            let tau = 2.0 * ratio_ln.exp() / (df - 1.0) + 1e-300;
            let scale = df.powi(-(t as i32));
            let slop = 1e-13 * (1.0 + m_ln.abs() + kappa.abs());
            let center = scale * (m_ln - kappa);
            let hw = scale * (tau + slop);
            if 2.0 * hw <= config.arch_tolerance {
                return Ok(LocalHeightValue {
                    place,
                    direction,
                    form: LocalHeightForm::Interval { lo: (center - hw).max(0.0), hi: center + hw },
                });
            }
        }
        t += 1;
    }
}

/// ln of the coordinate that measures growth: |y| forward, |x/a| backward.
fn leading_ln(map: &HenonMap<Rational>, pt: &PlanePoint<Rational>, direction: Direction) -> f64 {
    match direction {
        Direction::Plus => ln_abs_rational(&pt.y),
        Direction::Minus => ln_abs_rational(&pt.x) - ln_abs_rational(map.a()),
    }
}

/// λ̂±_v(P) for a single place.
pub fn local_height(
    map: &HenonMap<Rational>,
    start: &PlanePoint<Rational>,
    place: QPlace,
    direction: Direction,
    config: &HeightConfig,
) -> Result<LocalHeightValue, HeightError> {
    let mut cache = OrbitCache::new(map, direction, start.clone(), config.max_coordinate_bits);
    match place {
        QPlace::Archimedean => local_height_arch(map, &mut cache, direction, config),
        QPlace::Finite(p) => Ok(local_height_finite(map, &mut cache, p, direction, config)),
    }
}

/// The primes where a local height can be nonzero: divisors of coefficient or
/// coordinate denominators, plus primes where |a|_p ≠ 1.
fn relevant_primes(
    map: &HenonMap<Rational>,
    start: &PlanePoint<Rational>,
) -> Result<BTreeSet<u64>, HeightError> {
    let mut primes = BTreeSet::new();
    let mut add_factors = |n: &num_bigint::BigUint| -> Result<(), HeightError> {
        if n.is_one() {
            return Ok(());
        }
        for (p, _) in factor_biguint(n).map_err(HeightError::Factorization)? {
            primes.insert(p);
        }
        Ok(())
    };
    for q in map.coeffs() {
        add_factors(q.denom().magnitude())?;
    }
    add_factors(start.x.denom().magnitude())?;
    add_factors(start.y.denom().magnitude())?;
    add_factors(map.a().numer().magnitude())?;
    add_factors(map.a().denom().magnitude())?;
    Ok(primes)
}

/// ĥ⁺(P) + ĥ⁻(P) as a sum of local values over the archimedean place and the
/// finitely many relevant primes, with a certified error radius.
pub fn canonical_height(
    map: &HenonMap<Rational>,
    start: &PlanePoint<Rational>,
    config: &HeightConfig,
) -> Result<CanonicalHeightValue, HeightError> {
    let primes = relevant_primes(map, start)?;
    let mut locals = Vec::new();
    let mut capped = false;
    for direction in [Direction::Plus, Direction::Minus] {
        let mut cache =
            OrbitCache::new(map, direction, start.clone(), config.max_coordinate_bits);
        match local_height_arch(map, &mut cache, direction, config) {
            Ok(v) => locals.push(v),
            Err(HeightError::CapExceeded { partial }) => {
                capped = true;
                locals.push(*partial);
            }
            Err(e) => return Err(e),
        }
        for &p in &primes {
            locals.push(local_height_finite(map, &mut cache, p, direction, config));
        }
    }
    let sum_dir = |dir: Direction| -> f64 {
        locals
            .iter()
            .filter(|l| l.direction == dir)
            .map(|l| l.value())
            .sum()
    };
    let h_plus = sum_dir(Direction::Plus);
    let h_minus = sum_dir(Direction::Minus);
    let error_radius: f64 = locals.iter().map(|l| l.error_radius()).sum();
    let value = CanonicalHeightValue {
        h_plus,
        h_minus,
        total: h_plus + h_minus,
        error_radius,
        local_breakdown: locals,
    };
    if capped {
        Err(HeightError::CanonicalCapExceeded { partial: Box::new(value) })
    } else {
        Ok(value)
    }
}
