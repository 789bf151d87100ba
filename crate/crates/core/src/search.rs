//! Enumeration of small monoids up to isomorphism and searches for
//! FitzGerald counterexamples and (RI) non-transfer witnesses.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Operation};
use crate::monoid::{is_canonical_table, verify_monoid_axioms, FiniteMonoid};
use crate::props::{bridge_audit, full_report_with, Analysis, BridgeAudit, PropertyReport, PropsConfig};

/// Largest order enumerated without the long-running opt-in.
pub const MAX_ORDER: usize = 6;
/// Largest order enumerated at all.
pub const MAX_ORDER_LONG: usize = 7;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("order {order} exceeds the enumeration limit {limit}")]
    OrderLimitExceeded { order: usize, limit: usize },
    #[error("candidate budget of {budget} exhausted after {tried} algebras")]
    BudgetExceeded { tried: usize, budget: usize },
    #[error("max_order must be at least 1")]
    InvalidConfig,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

const UNSET: usize = usize::MAX;

/// Depth-first filling of the non-identity cells, checking every
/// associativity instance that becomes decidable after each assignment.
struct TableFill {
    n: usize,
    table: Vec<usize>,
    cells: Vec<(usize, usize)>,
}

impl TableFill {
    fn new(n: usize) -> Self {
        let mut table = vec![UNSET; n * n];
        for x in 0..n {
            table[x] = x;
            table[x * n] = x;
        }
        let cells = (1..n).flat_map(|i| (1..n).map(move |j| (i, j))).collect();
        TableFill { n, table, cells }
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    /// Every associativity instance touching cell `(a, b)` whose both sides
    /// are now defined must hold.
    fn consistent(&self, a: usize, b: usize) -> bool {
        let n = self.n;
        let v = self.get(a, b);
        let same = |l: usize, r: usize| l == UNSET || r == UNSET || l == r;
        let mul = |x: usize, y: usize| {
            if x == UNSET || y == UNSET {
                UNSET
            } else {
                self.get(x, y)
            }
        };
        for k in 0..n {
            // (ab)k = a(bk)
            if !same(mul(v, k), mul(a, self.get(b, k))) {
                return false;
            }
            // (ka)b = k(ab)
            if !same(mul(self.get(k, a), b), mul(k, v)) {
                return false;
            }
        }
        for x in 0..n {
            for y in 0..n {
                // (xy)z with xy = a, z = b
                if self.get(x, y) == a && !same(v, mul(x, self.get(y, b))) {
                    return false;
                }
                // x(yz) with x = a, yz = b
                if self.get(x, y) == b && !same(v, mul(self.get(a, x), y)) {
                    return false;
                }
            }
        }
        true
    }

    fn fill(&mut self, pos: usize, out: &mut Vec<Vec<usize>>) {
        if pos == self.cells.len() {
            if is_canonical_table(&self.table, self.n) {
                out.push(self.table.clone());
            }
            return;
        }
        let (a, b) = self.cells[pos];
        for v in 0..self.n {
            self.table[a * self.n + b] = v;
            if self.consistent(a, b) {
                self.fill(pos + 1, out);
            }
        }
        self.table[a * self.n + b] = UNSET;
    }
}

/// All monoids of order `n` up to isomorphism, as shortlex-least tables,
/// sorted by table.
pub fn enumerate_monoids(n: usize) -> Result<Vec<FiniteMonoid>, SearchError> {
    enumerate_monoids_with(n, 1, false)
}

/// [`enumerate_monoids`] split across `workers` threads by the value of the
/// first free cell; the result does not depend on `workers`.
pub fn enumerate_monoids_with(
    n: usize,
    workers: usize,
    long_running: bool,
) -> Result<Vec<FiniteMonoid>, SearchError> {
    let limit = if long_running { MAX_ORDER_LONG } else { MAX_ORDER };
    if n > limit {
        return Err(SearchError::OrderLimitExceeded { order: n, limit });
    }
    if n == 0 {
        return Err(SearchError::InvalidConfig);
    }
    if n == 1 {
        return Ok(vec![FiniteMonoid::trivial()]);
    }
    let branch = |v: usize| {
        let mut fill = TableFill::new(n);
        let mut out = Vec::new();
        fill.table[n + 1] = v;
        if fill.consistent(1, 1) {
            fill.fill(1, &mut out);
        }
        out
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let mut tables: Vec<Vec<usize>> =
        pool.install(|| (0..n).into_par_iter().flat_map_iter(branch).collect());
    tables.sort();
    Ok(tables
        .into_iter()
        .map(|t| verify_monoid_axioms(t, n).expect("enumerated tables are monoids"))
        .collect())
}

/// All four properties hold for the canonical right set of `m`, yet its
/// idempotents do not commute.
pub fn is_counterexample(m: &FiniteMonoid) -> bool {
    counterexample_report(m).is_counterexample()
}

fn counterexample_report(m: &FiniteMonoid) -> PropertyReport {
    let set = m.canonical_right_mset();
    let cfg = PropsConfig {
        endo_limit: set.size().max(PropsConfig::default().endo_limit),
        ..PropsConfig::default()
    };
    full_report_with(&set, &cfg).expect("canonical right sets are within the size limit")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Predicate {
    Counterexample,
    RiGap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_order: usize,
    pub predicate: Predicate,
    pub workers: usize,
    pub long_running: bool,
}

impl SearchConfig {
    pub fn new(max_order: usize) -> Self {
        SearchConfig {
            max_order,
            predicate: Predicate::Counterexample,
            workers: 1,
            long_running: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderStats {
    pub order: usize,
    pub monoids: usize,
    pub counterexamples: usize,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchStats {
    pub per_order: Vec<OrderStats>,
    pub total_monoids: usize,
    pub elapsed_ms: u128,
}

pub enum SearchEvent<'a> {
    Found(&'a FiniteMonoid),
    OrderDone(&'a OrderStats),
}

/// Filters every monoid of order `1..=max_order` through
/// [`is_counterexample`], in order of (order, canonical table).
pub fn find_counterexamples(
    cfg: &SearchConfig,
    mut on_event: impl FnMut(SearchEvent<'_>),
) -> Result<(Vec<FiniteMonoid>, SearchStats), SearchError> {
    if cfg.max_order == 0 {
        return Err(SearchError::InvalidConfig);
    }
    let limit = if cfg.long_running { MAX_ORDER_LONG } else { MAX_ORDER };
    if cfg.max_order > limit {
        return Err(SearchError::OrderLimitExceeded {
            order: cfg.max_order,
            limit,
        });
    }
    let start = Instant::now();
    let mut found = Vec::new();
    let mut per_order = Vec::new();
    for order in 1..=cfg.max_order {
        let t = Instant::now();
        let monoids = enumerate_monoids_with(order, cfg.workers, cfg.long_running)?;
        let hits: Vec<FiniteMonoid> = monoids
            .par_iter()
            .filter(|m| is_counterexample(m))
            .cloned()
            .collect();
        for m in &hits {
            on_event(SearchEvent::Found(m));
        }
        let stats = OrderStats {
            order,
            monoids: monoids.len(),
            counterexamples: hits.len(),
            elapsed_ms: t.elapsed().as_millis(),
        };
        on_event(SearchEvent::OrderDone(&stats));
        per_order.push(stats);
        found.extend(hits);
    }
    let total_monoids = per_order.iter().map(|s| s.monoids).sum();
    Ok((
        found,
        SearchStats {
            per_order,
            total_monoids,
            elapsed_ms: start.elapsed().as_millis(),
        },
    ))
}

/// Limits for [`find_ri_gap_witness`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapBudget {
    pub max_size: usize,
    pub max_unary: usize,
    pub max_constants: usize,
    /// Algebras examined before giving up.
    pub max_candidates: usize,
    /// Random sampling instead of systematic enumeration.
    pub seed: Option<u64>,
}

impl Default for GapBudget {
    fn default() -> Self {
        GapBudget {
            max_size: 6,
            max_unary: 3,
            max_constants: 2,
            max_candidates: 200_000,
            seed: None,
        }
    }
}

/// An algebra failing (RI) whose endomorphism monoid's canonical right set
/// satisfies (RI).
#[derive(Debug, Clone)]
pub struct GapWitness {
    pub algebra: FiniteAlgebra,
    pub audit: BridgeAudit,
}

#[derive(Debug, Clone)]
pub enum GapOutcome {
    Found(Box<GapWitness>),
    NoneFound { tried: usize, exhaustive: bool },
}

fn unary_algebra(n: usize, unary: &[usize], constants: &[usize]) -> FiniteAlgebra {
    let mut ops: Vec<Operation> = unary
        .iter()
        .enumerate()
        .map(|(i, &code)| {
            let mut c = code;
            let mut table = vec![0; n];
            for slot in table.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            Operation {
                name: format!("u{i}"),
                arity: 1,
                table,
            }
        })
        .collect();
    ops.extend(constants.iter().enumerate().map(|(i, &c)| Operation {
        name: format!("c{i}"),
        arity: 0,
        table: vec![c],
    }));
    FiniteAlgebra::new(n, ops).expect("generated tables are in range")
}

/// Checks one candidate; `Some` when it is a gap witness.
fn examine(a: &FiniteAlgebra) -> Result<Option<GapWitness>, SearchError> {
    let analysis = Analysis::new(a, a.size().max(1))?;
    if analysis.check_ri().holds {
        return Ok(None);
    }
    let m = &analysis.end.monoid;
    let set = m.canonical_right_mset();
    if !Analysis::new(&set, set.size())?.check_ri().holds {
        return Ok(None);
    }
    let cfg = PropsConfig {
        endo_limit: a.size(),
        monoid_limit: usize::MAX,
    };
    let audit = bridge_audit(a, &cfg)?;
    Ok(Some(GapWitness {
        algebra: a.clone(),
        audit,
    }))
}

/// Non-decreasing sequences of length `len` over `0..base`.
fn multisets(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(base: usize, len: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in from..base {
            cur.push(v);
            go(base, len, v, cur, out);
            cur.pop();
        }
    }
    go(base, len, 0, &mut Vec::new(), &mut out);
    out
}

/// Searches unary algebras with constants for an (RI) non-transfer witness.
///
/// Systematic mode walks sizes, operation counts and tables in order (tables
/// of equal arity taken as multisets) and fails with `BudgetExceeded` if the
/// candidate budget runs out first. Random mode samples `max_candidates`
/// algebras from a seeded generator.
pub fn find_ri_gap_witness(budget: &GapBudget) -> Result<GapOutcome, SearchError> {
    if budget.max_size > MAX_ORDER || budget.max_unary > 3 || budget.max_constants > 2 {
        return Err(SearchError::BudgetExceeded {
            tried: 0,
            budget: budget.max_candidates,
        });
    }
    let mut tried = 0;
    if let Some(seed) = budget.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget.max_candidates {
            let n = rng.gen_range(1..=budget.max_size.max(1));
            let k = rng.gen_range(0..=budget.max_unary);
            let c = rng.gen_range(0..=budget.max_constants);
            let unary: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n.pow(n as u32))).collect();
            let consts: Vec<usize> = (0..c).map(|_| rng.gen_range(0..n)).collect();
            tried += 1;
            if let Some(w) = examine(&unary_algebra(n, &unary, &consts))? {
                return Ok(GapOutcome::Found(Box::new(w)));
            }
        }
        return Ok(GapOutcome::NoneFound {
            tried,
            exhaustive: false,
        });
    }
    for n in 1..=budget.max_size {
        let maps = n.pow(n as u32);
        for k in 0..=budget.max_unary {
            for c in 0..=budget.max_constants {
                for unary in multisets(maps, k) {
                    for consts in multisets(n, c) {
                        if tried >= budget.max_candidates {
                            return Err(SearchError::BudgetExceeded {
                                tried,
                                budget: budget.max_candidates,
                            });
                        }
                        tried += 1;
                        if let Some(w) = examine(&unary_algebra(n, &unary, &consts))? {
                            return Ok(GapOutcome::Found(Box::new(w)));
                        }
                    }
                }
            }
        }
    }
    Ok(GapOutcome::NoneFound {
        tried,
        exhaustive: true,
    })
}
