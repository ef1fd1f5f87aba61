//! Deterministic exhaustive enumeration of candidate families with GAPN
//! filtering.
//!
//! Every candidate has an ordinal. For the monomial, binomial and trinomial
//! shapes the exponent tuples `d_1 < ... < d_k` (drawn from `1..=q-1`) are
//! ranked lexicographically and the coefficients of each tuple follow as a
//! mixed-radix number over their log indices, first coefficient most
//! significant:
//!
//! `ordinal = tuple_rank * (q-1)^free + coefficient_rank`
//!
//! where `free = k - 1` when the first coefficient is fixed to 1.
//! For the digit-sum-reduced shape the slots are all exponents of digit sum
//! at least `p`, each coefficient ranges over `0, g^0, g^1, ...` (digit
//! `0` is zero, digit `j + 1` is `g^j`) and the ordinal is the mixed-radix
//! number over the slots in increasing exponent order. The all-zero
//! assignment (ordinal 0) is skipped.
//!
//! Work is split into contiguous ordinal ranges; results are merged by
//! ordinal, so the output does not depend on the number of workers.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::derivative::{is_gapn_serial, GapnVerdict};
use crate::field::{Field, FieldElem};
use crate::json::function_json;
use crate::poly::{digit_sum, SparsePoly};

/// Default cap on GAPN checks per job.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Candidates handed to a worker at a time.
const CHUNK: u64 = 2048;

/// Cap on materialized exponent tuples.
const MAX_TUPLES: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("job needs {needed} GAPN checks, above the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("enumeration space too large to index")]
    SpaceTooLarge,
    #[error("unknown shape {0:?}")]
    UnknownShape(String),
    #[error("failed to build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Monomial,
    Binomial,
    Trinomial,
    DigitsumReduced,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Monomial => "monomial",
            Shape::Binomial => "binomial",
            Shape::Trinomial => "trinomial",
            Shape::DigitsumReduced => "digitsum-reduced",
        }
    }

    fn arity(self) -> Option<usize> {
        match self {
            Shape::Monomial => Some(1),
            Shape::Binomial => Some(2),
            Shape::Trinomial => Some(3),
            Shape::DigitsumReduced => None,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Shape {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, SearchError> {
        match s {
            "monomial" => Ok(Shape::Monomial),
            "binomial" => Ok(Shape::Binomial),
            "trinomial" => Ok(Shape::Trinomial),
            "digitsum-reduced" => Ok(Shape::DigitsumReduced),
            _ => Err(SearchError::UnknownShape(s.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchJob {
    pub field: Field,
    pub shape: Shape,
    pub degree_filter: Option<BTreeSet<u64>>,
    /// Fix the first nonzero coefficient to 1.
    pub canonicalize: bool,
    /// Keep only the first `limit` hits (by ordinal).
    pub limit: Option<usize>,
    pub budget: u64,
    /// Worker count; 0 uses the available parallelism, 1 runs serially.
    pub threads: usize,
    /// Restrict the job to an ordinal range.
    pub ordinals: Option<Range<u64>>,
}

impl SearchJob {
    pub fn new(field: &Field, shape: Shape) -> Self {
        SearchJob {
            field: field.clone(),
            shape,
            degree_filter: None,
            canonicalize: true,
            limit: None,
            budget: DEFAULT_BUDGET,
            threads: 0,
            ordinals: None,
        }
    }

    pub fn degrees(mut self, degrees: impl IntoIterator<Item = u64>) -> Self {
        self.degree_filter = Some(degrees.into_iter().collect());
        self
    }

    pub fn canonical(mut self, yes: bool) -> Self {
        self.canonicalize = yes;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn ordinals(mut self, range: Range<u64>) -> Self {
        self.ordinals = Some(range);
        self
    }

    fn accepts(&self, degree: u64) -> bool {
        self.degree_filter
            .as_ref()
            .is_none_or(|f| f.contains(&degree))
    }
}

/// One verified candidate.
#[derive(Debug, Clone)]
pub struct SearchHit {
    pub ordinal: u64,
    pub function: SparsePoly,
    pub verdict: GapnVerdict,
    pub degree: u64,
}

impl SearchHit {
    /// `{"ordinal", "degree", "function", "worst_fiber"}`.
    pub fn to_json(&self) -> Value {
        json!({
            "ordinal": self.ordinal,
            "degree": self.degree,
            "function": function_json(&self.function),
            "worst_fiber": self.verdict.worst_fiber,
        })
    }

    /// Flattened row: ordinal, degree, worst fiber, `exp:c0;c1` terms joined by `+`.
    pub fn csv_row(&self) -> Vec<String> {
        let k = self.function.field();
        let terms = self
            .function
            .terms()
            .iter()
            .map(|&(e, c)| {
                let cs: Vec<String> = k.coeffs(c).iter().map(u32::to_string).collect();
                format!("{e}:{}", cs.join(";"))
            })
            .collect::<Vec<_>>()
            .join("+");
        vec![
            self.ordinal.to_string(),
            self.degree.to_string(),
            self.verdict.worst_fiber.to_string(),
            terms,
        ]
    }
}

pub const CSV_HEADER: [&str; 4] = ["ordinal", "degree", "worst_fiber", "terms"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSummary {
    /// Candidates enumerated (after canonicalization, before the degree filter).
    pub enumerated: u64,
    /// Candidates that passed the degree filter and were checked.
    pub examined: u64,
    pub hits_by_degree: BTreeMap<u64, u64>,
    pub elapsed_ms: u128,
}

impl SearchSummary {
    /// `{"claim", "examined", "hits_by_degree", "elapsed_ms"}`.
    pub fn to_json(&self, claim: Option<&str>) -> Value {
        let hits: serde_json::Map<String, Value> = self
            .hits_by_degree
            .iter()
            .map(|(d, c)| (d.to_string(), json!(c)))
            .collect();
        json!({
            "claim": claim,
            "examined": self.examined,
            "hits_by_degree": hits,
            "elapsed_ms": self.elapsed_ms as u64,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub hits: Vec<SearchHit>,
    pub summary: SearchSummary,
}

enum Plan {
    Tuples {
        /// `(rank, exponents, degree)` for tuples passing the degree filter.
        tuples: Vec<(u64, Vec<u64>, u64)>,
        total_tuples: u64,
        per_tuple: u64,
        free: u32,
    },
    Assignments {
        exps: Vec<u64>,
        total: u64,
    },
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn next_combination(c: &mut [u64], max: u64) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < max - (k - 1 - i) as u64 {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exponents with digit sum at least `p`; lower terms never change a verdict.
pub fn reduced_exponents(k: &Field) -> Vec<u64> {
    let p = k.p() as u64;
    (0..k.order() as u64)
        .filter(|&e| digit_sum(p, e) >= p)
        .collect()
}

impl Plan {
    fn new(job: &SearchJob) -> Result<(Plan, u128), SearchError> {
        let k = &job.field;
        let p = k.p() as u64;
        let q = k.order() as u64;
        match job.shape.arity() {
            Some(arity) => {
                let total = binomial(q - 1, arity as u64);
                if total > MAX_TUPLES as u128 {
                    return Err(SearchError::SpaceTooLarge);
                }
                let free = if job.canonicalize { arity - 1 } else { arity } as u32;
                let per_tuple = (q - 1).checked_pow(free).ok_or(SearchError::SpaceTooLarge)?;
                let mut tuples = Vec::new();
                let mut c: Vec<u64> = (1..=arity as u64).collect();
                let mut rank = 0u64;
                loop {
                    let degree = c.iter().map(|&e| digit_sum(p, e)).max().unwrap();
                    if job.accepts(degree) {
                        tuples.push((rank, c.clone(), degree));
                    }
                    rank += 1;
                    if !next_combination(&mut c, q - 1) {
                        break;
                    }
                }
                let total_tuples = rank;
                (total_tuples as u128)
                    .checked_mul(per_tuple as u128)
                    .filter(|&t| t <= u64::MAX as u128)
                    .ok_or(SearchError::SpaceTooLarge)?;
                let checks = tuples.len() as u128 * per_tuple as u128;
                Ok((
                    Plan::Tuples {
                        tuples,
                        total_tuples,
                        per_tuple,
                        free,
                    },
                    checks,
                ))
            }
            None => {
                let exps = reduced_exponents(k);
                let total = (q as u128)
                    .checked_pow(exps.len() as u32)
                    .filter(|&t| t <= u64::MAX as u128)
                    .ok_or(SearchError::SpaceTooLarge)? as u64;
                // count assignments whose largest nonzero slot degree passes the filter
                let degrees: BTreeSet<u64> = exps.iter().map(|&e| digit_sum(p, e)).collect();
                let mut checks = 0u128;
                for &d in &degrees {
                    if !job.accepts(d) {
                        continue;
                    }
                    let upto = exps.iter().filter(|&&e| digit_sum(p, e) <= d).count() as u32;
                    let below = exps.iter().filter(|&&e| digit_sum(p, e) < d).count() as u32;
                    let count = (q as u128).pow(upto) - (q as u128).pow(below);
                    checks += if job.canonicalize { count / (q as u128 - 1) } else { count };
                }
                Ok((Plan::Assignments { exps, total }, checks))
            }
        }
    }

    fn total(&self) -> u64 {
        match self {
            Plan::Tuples {
                total_tuples,
                per_tuple,
                ..
            } => total_tuples * per_tuple,
            Plan::Assignments { total, .. } => *total,
        }
    }

    /// Ordinal ranges containing candidates, split into chunks.
    fn chunks(&self, window: &Range<u64>) -> Vec<Range<u64>> {
        let mut out = Vec::new();
        let mut push = |r: Range<u64>| {
            let (lo, hi) = (r.start.max(window.start), r.end.min(window.end));
            let mut s = lo;
            while s < hi {
                let e = (s + CHUNK).min(hi);
                out.push(s..e);
                s = e;
            }
        };
        match self {
            Plan::Tuples {
                tuples, per_tuple, ..
            } => {
                for (rank, _, _) in tuples {
                    push(rank * per_tuple..(rank + 1) * per_tuple);
                }
            }
            Plan::Assignments { total, .. } => push(1..*total),
        }
        out
    }

    fn candidate(&self, k: &Field, job: &SearchJob, ordinal: u64) -> Option<(SparsePoly, u64)> {
        let q = k.order() as u64;
        match self {
            Plan::Tuples {
                tuples,
                per_tuple,
                free,
                ..
            } => {
                let rank = ordinal / per_tuple;
                let idx = tuples.binary_search_by_key(&rank, |t| t.0).ok()?;
                let (_, exps, degree) = &tuples[idx];
                let mut rest = ordinal % per_tuple;
                let mut logs = vec![0u64; *free as usize];
                for slot in logs.iter_mut().rev() {
                    *slot = rest % (q - 1);
                    rest /= q - 1;
                }
                let offset = exps.len() - *free as usize;
                let terms = exps.iter().enumerate().map(|(i, &e)| {
                    let c = if i < offset {
                        k.one()
                    } else {
                        k.gen_pow(logs[i - offset] as i64)
                    };
                    (e, c)
                });
                Some((SparsePoly::new(k, terms).ok()?, *degree))
            }
            Plan::Assignments { exps, .. } => {
                let mut rest = ordinal;
                let mut digits = vec![0u64; exps.len()];
                for d in digits.iter_mut().rev() {
                    *d = rest % q;
                    rest /= q;
                }
                if job.canonicalize && digits.iter().find(|&&d| d != 0) != Some(&1) {
                    return None;
                }
                let p = k.p() as u64;
                let mut degree = 0;
                let mut terms: Vec<(u64, FieldElem)> = Vec::new();
                for (&e, &d) in exps.iter().zip(&digits) {
                    if d != 0 {
                        degree = degree.max(digit_sum(p, e));
                        terms.push((e, k.gen_pow(d as i64 - 1)));
                    }
                }
                Some((SparsePoly::new(k, terms).ok()?, degree))
            }
        }
    }
}

/// Candidate functions of a job in ordinal order, with their ordinals.
/// The degree filter is not applied.
pub fn enumerate(job: &SearchJob) -> Result<impl Iterator<Item = (u64, SparsePoly)> + '_, SearchError> {
    let unfiltered = SearchJob {
        degree_filter: None,
        ..job.clone()
    };
    let (plan, _) = Plan::new(&unfiltered)?;
    let window = job.ordinals.clone().unwrap_or(0..plan.total());
    let chunks = plan.chunks(&window);
    Ok(chunks.into_iter().flat_map(move |r| {
        let plan = &plan;
        r.filter_map(move |o| plan.candidate(&job.field, job, o).map(|(f, _)| (o, f)))
            .collect::<Vec<_>>()
    }))
}

/// Number of GAPN checks a job would perform.
pub fn estimate_checks(job: &SearchJob) -> Result<u128, SearchError> {
    Plan::new(job).map(|(_, c)| c)
}

fn run_chunk(job: &SearchJob, plan: &Plan, range: Range<u64>) -> (Vec<SearchHit>, u64, u64) {
    let mut hits = Vec::new();
    let mut enumerated = 0;
    let mut examined = 0;
    for ordinal in range {
        let Some((f, degree)) = plan.candidate(&job.field, job, ordinal) else {
            continue;
        };
        enumerated += 1;
        if !job.accepts(degree) {
            continue;
        }
        examined += 1;
        let verdict = is_gapn_serial(&f);
        if verdict.is_gapn {
            hits.push(SearchHit {
                ordinal,
                function: f,
                verdict,
                degree,
            });
        }
    }
    (hits, enumerated, examined)
}

pub fn run(job: &SearchJob) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let (plan, checks) = Plan::new(job)?;
    if checks > job.budget as u128 {
        return Err(SearchError::BudgetExceeded {
            needed: checks,
            budget: job.budget,
        });
    }
    let window = job.ordinals.clone().unwrap_or(0..plan.total());
    let chunks = plan.chunks(&window);

    let parts: Vec<(Vec<SearchHit>, u64, u64)> = if job.threads == 1 {
        chunks
            .into_iter()
            .map(|r| run_chunk(job, &plan, r))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(job.threads)
            .build()
            .map_err(|e| SearchError::Pool(e.to_string()))?;
        pool.install(|| {
            chunks
                .into_par_iter()
                .map(|r| run_chunk(job, &plan, r))
                .collect()
        })
    };

    let mut hits = Vec::new();
    let mut enumerated = 0;
    let mut examined = 0;
    for (h, en, ex) in parts {
        hits.extend(h);
        enumerated += en;
        examined += ex;
    }
    if let Some(limit) = job.limit {
        hits.truncate(limit);
    }
    let mut hits_by_degree: BTreeMap<u64, u64> = job
        .degree_filter
        .iter()
        .flatten()
        .map(|&d| (d, 0))
        .collect();
    for h in &hits {
        *hits_by_degree.entry(h.degree).or_insert(0) += 1;
    }
    Ok(SearchResult {
        hits,
        summary: SearchSummary {
            enumerated,
            examined,
            hits_by_degree,
            elapsed_ms: start.elapsed().as_millis(),
        },
    })
}
