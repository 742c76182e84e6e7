//! Exhaustive, certified search for all Q-rational periodic points of
//! φ(x, y) = (y, x + y² + b), and the per-parameter verdict pipeline with a
//! checkpointed batch driver.
//!
//! Two facts make the search finite and exact. A parameter whose denominator
//! is not a perfect square has no rational periodic points at all. Otherwise,
//! writing den(b) = s², every periodic point has both coordinates of the form
//! m/s with |m| ≤ ⌈3·s·max(1, |b|)^{1/2}⌉, so the candidate grid is a small
//! box of integer numerators and the whole orbit of a periodic candidate
//! stays inside it. Walking each candidate with pure integer arithmetic
//! either returns to its start (a cycle, with the first return time being the
//! minimal period) or leaves the box (a certificate of non-periodicity).

use crate::arith::{ceil_sqrt_rational, integer_sqrt_exact, Rational};
use crate::map::PlanePoint;
use crate::modp::{default_filter_primes, intersect_filters, PeriodSet};
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// The conjectured complete set of rational periods for the quadratic family.
pub const ALLOWED_PERIODS: [u64; 6] = [1, 2, 3, 4, 6, 8];

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search grid would need {cells} cells; the parameter is far past desk scale")]
    GridTooLarge { cells: u128 },
    #[error("checkpoint I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint line {0} is malformed: {1:?}")]
    CorruptCheckpoint(usize, String),
}

/// Grid dimensions for one parameter: candidate coordinates are m/s with
/// |m| ≤ numerator_bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBounds {
    pub s: u64,
    pub numerator_bound: u64,
}

/// den(b) = s² gives the grid; a non-square denominator means no rational
/// periodic point exists and the search is vacuous.
pub fn search_bounds(b: &Rational) -> Option<SearchBounds> {
    let s = integer_sqrt_exact(b.denom().magnitude())?;
    let s: u64 = s.to_u64()?;
    // numerator bound ⌈3·s·max(1, |b|)^{1/2}⌉ = ⌈sqrt(9·s²·max(1, |b|))⌉
    let mut scaled = b.abs();
    if scaled < Rational::one() {
        scaled = Rational::one();
    }
    let bound2 = Rational::from_integer((9 * s * s).into()) * scaled;
    let nb = ceil_sqrt_rational(&bound2);
    Some(SearchBounds { s, numerator_bound: nb.to_u64().unwrap_or(u64::MAX) })
}

/// One rational cycle, points in orbit order from the first-found
/// representative (grid order: ascending y-numerator, then x-numerator).
#[derive(Debug, Clone, PartialEq)]
pub struct RationalCycle {
    pub points: Vec<PlanePoint<Rational>>,
}

impl RationalCycle {
    pub fn period(&self) -> u32 {
        self.points.len() as u32
    }

    pub fn representative(&self) -> &PlanePoint<Rational> {
        &self.points[0]
    }
}

const GRID_CELL_LIMIT: u128 = 1 << 26;

#[derive(Clone, Copy, PartialEq)]
enum Cell {
    Unknown,
    Dead,
    InCycle,
}

/// Complete list of Q-rational cycles of φ_b, exact.
///
/// Every candidate in the grid is iterated with integer arithmetic on
/// numerators; a candidate is discarded the moment an iterate needs a
/// denominator not dividing s (the step fails the divisibility s | n² + β)
/// or violates the archimedean confinement bound (leaves the box), and
/// accepted on exact return to its start.
pub fn find_rational_periodic_points(b: &Rational) -> Result<Vec<RationalCycle>, SearchError> {
    let Some(bounds) = search_bounds(b) else {
        return Ok(Vec::new()); // non-square denominator: no periodic points
    };
    let nb = bounds.numerator_bound as i64;
    let side = 2 * nb as u128 + 1;
    if side * side > GRID_CELL_LIMIT {
        return Err(SearchError::GridTooLarge { cells: side * side });
    }
    let s = bounds.s as i64;
    // β = num(b)·(s²/den(b)) = num(b) since den(b) = s² exactly
    let beta = b.numer().to_i64().expect("numerator bounded by the grid limit");

    let side = side as i64;
    let idx = |m: i64, n: i64| ((m + nb) * side + (n + nb)) as usize;
    let mut state = vec![Cell::Unknown; (side * side) as usize];
    let mut cycles = Vec::new();

    // outer loop on the y-numerator, inner on the x-numerator, ascending
    for n0 in -nb..=nb {
        for m0 in -nb..=nb {
            if state[idx(m0, n0)] != Cell::Unknown {
                continue;
            }
            let mut path: Vec<(i64, i64)> = vec![(m0, n0)];
            let outcome = loop {
                let (m, n) = *path.last().unwrap();
                // φ(m/s, n/s) = (n/s, (m·s + n² + β)/s²); the image stays on
                // the grid iff s divides n² + β and the new numerator fits
                let num = n * n + beta;
                if num.rem_euclid(s) != 0 {
                    break Cell::Dead;
                }
                let n_next = m + num / s;
                if n_next.abs() > nb {
                    break Cell::Dead;
                }
                let next = (n, n_next);
                if next == (m0, n0) {
                    break Cell::InCycle;
                }
                match state[idx(next.0, next.1)] {
                    Cell::Dead => break Cell::Dead,
                    Cell::InCycle => {
                        // unreachable for an invertible map: a path cannot
                        // join a cycle it did not start on
                        debug_assert!(false, "path from {m0},{n0} joined a foreign cycle");
                        break Cell::Dead;
                    }
                    Cell::Unknown => path.push(next),
                }
            };
            for &(m, n) in &path {
                state[idx(m, n)] = outcome;
            }
            if outcome == Cell::InCycle {
                let points = path
                    .iter()
                    .map(|&(m, n)| {
                        PlanePoint::new(
                            Rational::new(m.into(), s.into()),
                            Rational::new(n.into(), s.into()),
                        )
                    })
                    .collect();
                cycles.push(RationalCycle { points });
            }
        }
    }
    Ok(cycles)
}

/// Outcome of the verdict pipeline for one parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// The mod-p filters alone confine every possible period to the allowed set.
    VerifiedByFilter { primes: Vec<u64> },
    /// The filters were inconclusive; the exhaustive search found exactly
    /// these periods (multiset, ascending), all allowed.
    VerifiedBySearch { periods: Vec<u32> },
    /// Non-square denominator: no rational periodic points can exist.
    VacuousNonSquareDenominator,
    /// A cycle whose length is outside the allowed set, with the exact witness.
    Refuted { witness: RationalCycle },
}

/// The verdict pipeline: vacuous check, then mod-p filters, then exhaustive
/// search if the filters leave a disallowed period alive.
pub fn verify_conjecture_for(
    b: &Rational,
    filter_primes: &[u64],
    force_search: bool,
) -> Result<Verdict, SearchError> {
    verify_with_allowed(b, filter_primes, &BTreeSet::from(ALLOWED_PERIODS), force_search)
}

/// Same pipeline against an arbitrary allowed set. Tests shrink the set to
/// exercise the refutation path, which the conjectured set never reaches.
pub fn verify_with_allowed(
    b: &Rational,
    filter_primes: &[u64],
    allowed: &BTreeSet<u64>,
    force_search: bool,
) -> Result<Verdict, SearchError> {
    if search_bounds(b).is_none() {
        return Ok(Verdict::VacuousNonSquareDenominator);
    }
    if !force_search {
        if let PeriodSet::Allowed(s) = intersect_filters(b, filter_primes) {
            if s.is_subset(allowed) {
                return Ok(Verdict::VerifiedByFilter { primes: filter_primes.to_vec() });
            }
        }
    }
    let cycles = find_rational_periodic_points(b)?;
    if let Some(witness) = cycles.iter().find(|c| !allowed.contains(&(c.period() as u64))) {
        return Ok(Verdict::Refuted { witness: witness.clone() });
    }
    let mut periods: Vec<u32> = cycles.iter().map(|c| c.period()).collect();
    periods.sort_unstable();
    Ok(Verdict::VerifiedBySearch { periods })
}

/// How the batch driver picks filter primes for each parameter.
#[derive(Debug, Clone)]
pub enum PrimeSelection {
    /// First n primes ≥ 5 of good reduction for the parameter at hand.
    FirstGood(usize),
    Explicit(Vec<u64>),
}

impl PrimeSelection {
    pub fn primes_for(&self, b: &Rational) -> Vec<u64> {
        match self {
            PrimeSelection::FirstGood(n) => default_filter_primes(b, *n),
            PrimeSelection::Explicit(ps) => ps.clone(),
        }
    }
}

impl Default for PrimeSelection {
    fn default() -> Self {
        PrimeSelection::FirstGood(8)
    }
}

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub max_height: u64,
    pub primes: PrimeSelection,
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
    pub chunk_size: usize,
}

impl BatchConfig {
    pub fn new(max_height: u64) -> Self {
        BatchConfig {
            max_height,
            primes: PrimeSelection::default(),
            workers: 1,
            checkpoint: None,
            resume: false,
            chunk_size: 512,
        }
    }
}

/// Aggregated outcome counts over every enumerated parameter. The rendering
/// is canonical: identical runs (fresh or resumed) produce identical bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchReport {
    pub max_height: u64,
    pub total: u64,
    pub verified_filter: u64,
    pub verified_search: u64,
    pub vacuous: u64,
    pub refuted: Vec<String>,
}

impl BatchReport {
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("max height: {}\n", self.max_height));
        out.push_str(&format!("parameters: {}\n", self.total));
        out.push_str(&format!("verified by filter: {}\n", self.verified_filter));
        out.push_str(&format!("verified by search: {}\n", self.verified_search));
        out.push_str(&format!("vacuous (non-square denominator): {}\n", self.vacuous));
        out.push_str(&format!("refuted: {}\n", self.refuted.len()));
        for r in &self.refuted {
            out.push_str(&format!("  {r}\n"));
        }
        out
    }
}

fn rational_key(b: &Rational) -> String {
    format!("{}/{}", b.numer(), b.denom())
}

fn format_point(p: &PlanePoint<Rational>) -> String {
    format!("{},{}", p.x, p.y)
}

/// One checkpoint record: `n/m<TAB>outcome<TAB>detail`.
fn record_line(b: &Rational, verdict: &Verdict) -> String {
    let key = rational_key(b);
    match verdict {
        Verdict::VerifiedByFilter { primes } => {
            let list: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
            format!("{key}\tverified_filter\tprimes={}", list.join(","))
        }
        Verdict::VerifiedBySearch { periods } => {
            let list: Vec<String> = periods.iter().map(|p| p.to_string()).collect();
            format!("{key}\tverified_search\tperiods={}", list.join(","))
        }
        Verdict::VacuousNonSquareDenominator => format!("{key}\tvacuous\t-"),
        Verdict::Refuted { witness } => format!(
            "{key}\trefuted\tperiod={};base={}",
            witness.period(),
            format_point(witness.representative())
        ),
    }
}

/// Checkpoint with write-temp-then-rename discipline: the live file always
/// holds a complete, parseable prefix of the run.
pub struct Checkpoint {
    path: PathBuf,
    lines: Vec<String>,
}

impl Checkpoint {
    /// Open a checkpoint. With `resume` the existing content is loaded and
    /// replayed; without it any existing file is started over.
    pub fn open(path: &Path, resume: bool) -> Result<Self, SearchError> {
        let mut lines = Vec::new();
        if resume && path.exists() {
            let content = std::fs::read_to_string(path)?;
            for (i, line) in content.lines().enumerate() {
                if line.splitn(3, '\t').count() != 3 {
                    return Err(SearchError::CorruptCheckpoint(i + 1, line.to_string()));
                }
                lines.push(line.to_string());
            }
        }
        Ok(Checkpoint { path: path.to_path_buf(), lines })
    }

    pub fn processed_keys(&self) -> HashSet<String> {
        self.lines
            .iter()
            .map(|l| l.split('\t').next().unwrap_or_default().to_string())
            .collect()
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    /// Write the full content including `new_lines` to a temporary file,
    /// fsync, then rename over the live path. A crash at any point leaves
    /// either the old complete file or the new complete file.
    pub fn append_batch(&mut self, new_lines: &[String]) -> Result<(), SearchError> {
        self.lines.extend_from_slice(new_lines);
        let tmp = self.write_snapshot_tmp()?;
        std::fs::rename(&tmp, &self.path)?;
        if let Some(dir) = self.path.parent() {
            if let Ok(d) = std::fs::File::open(dir) {
                let _ = d.sync_all();
            }
        }
        Ok(())
    }

    /// The temp-file half of `append_batch`, separated so the crash window
    /// can be exercised in tests.
    fn write_snapshot_tmp(&self) -> Result<PathBuf, SearchError> {
        let tmp = self.path.with_extension("tmp");
        let mut f = std::fs::File::create(&tmp)?;
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        f.sync_all()?;
        Ok(tmp)
    }
}

/// Run the verdict pipeline over every b with H(b) ≤ max_height, in the
/// canonical enumeration order, with per-chunk parallelism and optional
/// checkpointing. The report and the checkpoint content are independent of
/// the parallel schedule, and a resumed run reproduces a fresh run byte for
/// byte.
pub fn batch_verify(config: &BatchConfig) -> Result<BatchReport, SearchError> {
    let mut report = BatchReport {
        max_height: config.max_height,
        total: 0,
        verified_filter: 0,
        verified_search: 0,
        vacuous: 0,
        refuted: Vec::new(),
    };
    let mut checkpoint = match &config.checkpoint {
        Some(path) => Some(Checkpoint::open(path, config.resume)?),
        None => None,
    };
    let done: HashSet<String> = checkpoint
        .as_ref()
        .map(|c| c.processed_keys())
        .unwrap_or_default();
    // replay already-recorded outcomes into the tallies
    if let Some(c) = &checkpoint {
        for line in c.lines() {
            tally_line(&mut report, line);
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .expect("worker pool construction");

    let todo: Vec<Rational> = crate::arith::enumerate_rationals(config.max_height, false)
        .filter(|b| !done.contains(&rational_key(b)))
        .collect();

    for chunk in todo.chunks(config.chunk_size.max(1)) {
        let results: Vec<String> = pool.install(|| {
            chunk
                .par_iter()
                .map(|b| {
                    let primes = config.primes.primes_for(b);
                    let verdict = verify_conjecture_for(b, &primes, false)
                        .expect("grid bounded by the enumeration height");
                    record_line(b, &verdict)
                })
                .collect()
        });
        for line in &results {
            tally_line(&mut report, line);
        }
        if let Some(c) = checkpoint.as_mut() {
            c.append_batch(&results)?;
        }
    }
    Ok(report)
}

fn tally_line(report: &mut BatchReport, line: &str) {
    report.total += 1;
    let mut parts = line.split('\t');
    let key = parts.next().unwrap_or_default();
    match parts.next().unwrap_or_default() {
        "verified_filter" => report.verified_filter += 1,
        "verified_search" => report.verified_search += 1,
        "vacuous" => report.vacuous += 1,
        other => {
            debug_assert_eq!(other, "refuted", "unknown outcome token");
            let detail = parts.next().unwrap_or_default();
            report.refuted.push(format!("{key} {detail}"));
        }
    }
}
