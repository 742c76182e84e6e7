//! Output rendering: fixed-field JSON for scripting, terse text for humans,
//! CSV for the tabular commands.

use henon::funcfield::{DivisorEntry, SpecRow};
use henon::local_heights::LocalHeightForm;
use henon::map::PlanePoint;
use henon::search::{BatchReport, RationalCycle, Verdict};
use henon::{CanonicalHeightValue, LocalHeightValue, Rational};
use serde_json::{json, Value};

pub fn rational_str(q: &Rational) -> String {
    q.to_string()
}

pub fn point_str(p: &PlanePoint<Rational>) -> String {
    format!("{},{}", p.x, p.y)
}

fn direction_str(v: &LocalHeightValue) -> &'static str {
    match v.direction {
        henon::Direction::Plus => "plus",
        henon::Direction::Minus => "minus",
    }
}

pub fn local_json(v: &LocalHeightValue) -> Value {
    let mut obj = json!({
        "place": v.place.to_string(),
        "direction": direction_str(v),
        "value": v.value(),
        "error_radius": v.error_radius(),
    });
    let extra = match &v.form {
        LocalHeightForm::ExactLog { coeff, base, escape_step } => json!({
            "kind": "exact_log",
            "coeff": rational_str(coeff),
            "base": base,
            "escape_step": escape_step,
        }),
        LocalHeightForm::Interval { lo, hi } => json!({
            "kind": "interval",
            "lo": lo,
            "hi": hi,
        }),
        LocalHeightForm::CertifiedZero => json!({"kind": "certified_zero"}),
        LocalHeightForm::HeuristicZero { allowance, steps } => json!({
            "kind": "heuristic_zero",
            "allowance": allowance,
            "steps": steps,
        }),
    };
    merge(&mut obj, extra);
    obj
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn height_json(b: &Rational, p: &PlanePoint<Rational>, h: &CanonicalHeightValue) -> Value {
    json!({
        "b": rational_str(b),
        "point": point_str(p),
        "h_plus": h.h_plus,
        "h_minus": h.h_minus,
        "total": h.total,
        "error_radius": h.error_radius,
        "locals": h.local_breakdown.iter().map(local_json).collect::<Vec<_>>(),
    })
}

pub fn height_text(h: &CanonicalHeightValue) -> String {
    let mut out = String::new();
    out.push_str(&format!("h_plus       = {:.12}\n", h.h_plus));
    out.push_str(&format!("h_minus      = {:.12}\n", h.h_minus));
    out.push_str(&format!("total        = {:.12}\n", h.total));
    out.push_str(&format!("error_radius = {:.3e}\n", h.error_radius));
    out.push_str("locals:\n");
    for l in &h.local_breakdown {
        let desc = match &l.form {
            LocalHeightForm::ExactLog { coeff, base, escape_step } => {
                format!("exact {coeff}·log {base} (escape at step {escape_step})")
            }
            LocalHeightForm::Interval { lo, hi } => format!("interval [{lo:.3e}, {hi:.3e}]"),
            LocalHeightForm::CertifiedZero => "certified zero".to_string(),
            LocalHeightForm::HeuristicZero { allowance, steps } => {
                format!("heuristic zero (allowance {allowance:.3e} after {steps} steps)")
            }
        };
        out.push_str(&format!(
            "  v={:<6} {:<5} {:>14.9}  {desc}\n",
            l.place.to_string(),
            direction_str(l),
            l.value()
        ));
    }
    out
}

pub fn height_csv(h: &CanonicalHeightValue) -> String {
    let mut out = String::from("place,direction,kind,value,error_radius\n");
    for l in &h.local_breakdown {
        let kind = match &l.form {
            LocalHeightForm::ExactLog { .. } => "exact_log",
            LocalHeightForm::Interval { .. } => "interval",
            LocalHeightForm::CertifiedZero => "certified_zero",
            LocalHeightForm::HeuristicZero { .. } => "heuristic_zero",
        };
        out.push_str(&format!(
            "{},{},{kind},{},{}\n",
            l.place,
            direction_str(l),
            l.value(),
            l.error_radius()
        ));
    }
    out
}

fn cycle_json(c: &RationalCycle) -> Value {
    json!({
        "period": c.period(),
        "points": c.points.iter().map(point_str).collect::<Vec<_>>(),
    })
}

pub fn verdict_json(b: &Rational, v: &Verdict) -> Value {
    match v {
        Verdict::VerifiedByFilter { primes } => json!({
            "b": rational_str(b),
            "verdict": "verified_by_filter",
            "primes": primes,
        }),
        Verdict::VerifiedBySearch { periods } => json!({
            "b": rational_str(b),
            "verdict": "verified_by_search",
            "periods": periods,
        }),
        Verdict::VacuousNonSquareDenominator => json!({
            "b": rational_str(b),
            "verdict": "vacuous_non_square_denominator",
        }),
        Verdict::Refuted { witness } => json!({
            "b": rational_str(b),
            "verdict": "refuted",
            "witness": cycle_json(witness),
        }),
    }
}

pub fn verdict_text(b: &Rational, v: &Verdict) -> String {
    match v {
        Verdict::VerifiedByFilter { primes } => {
            let ps: Vec<String> = primes.iter().map(u64::to_string).collect();
            format!("b = {b}: verified by mod-p filters (primes {})\n", ps.join(", "))
        }
        Verdict::VerifiedBySearch { periods } => {
            let ps: Vec<String> = periods.iter().map(u32::to_string).collect();
            format!("b = {b}: verified by exhaustive search (periods {})\n", ps.join(", "))
        }
        Verdict::VacuousNonSquareDenominator => {
            format!("b = {b}: vacuous (denominator is not a perfect square)\n")
        }
        Verdict::Refuted { witness } => format!(
            "b = {b}: REFUTED by a cycle of length {} through {}\n",
            witness.period(),
            point_str(witness.representative())
        ),
    }
}

pub fn batch_json(r: &BatchReport) -> Value {
    json!({
        "max_height": r.max_height,
        "total": r.total,
        "verified_filter": r.verified_filter,
        "verified_search": r.verified_search,
        "vacuous": r.vacuous,
        "refuted": r.refuted,
    })
}

pub fn batch_csv(r: &BatchReport) -> String {
    let mut out = String::from("outcome,count\n");
    out.push_str(&format!("verified_filter,{}\n", r.verified_filter));
    out.push_str(&format!("verified_search,{}\n", r.verified_search));
    out.push_str(&format!("vacuous,{}\n", r.vacuous));
    out.push_str(&format!("refuted,{}\n", r.refuted.len()));
    out
}

pub fn divisor_json(entries: &[DivisorEntry]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|e| {
                json!({
                    "place": e.place.to_string(),
                    "weight": rational_str(&e.weight),
                    "degree": e.place.degree(),
                    "escape_step": e.escape_step,
                })
            })
            .collect(),
    )
}

pub fn spec_rows_json(rows: &[SpecRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "t0": rational_str(&r.t0),
                    "h_t0": r.h_t0,
                    "hhat": r.hhat,
                    "ratio": r.ratio,
                    "status": r.status.as_str(),
                })
            })
            .collect(),
    )
}

pub fn spec_rows_csv(rows: &[SpecRow]) -> String {
    let mut out = String::from("t0,h_t0,hhat,ratio,status\n");
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.t0,
            r.h_t0,
            opt(r.hhat),
            opt(r.ratio),
            r.status.as_str()
        ));
    }
    out
}
