//! Offset generators and solver-ready subset-sum instances.
//!
//! An instance is assembled from a regressively regular `(f, E)` pair and a
//! total offset map `rho` with `rho(x) >= min(x)`:
//!
//! * the `low` block contributes `f(x) - min(E)` — negative values strictly
//!   inside `(-e0, 0)`, at most one per order-type class;
//! * the `high` block contributes `rho(x) - min(x)` — nonnegative offsets,
//!   split at the window bound `e0 * k^k` into *small* and *large*
//!   positives;
//! * the `mid` block is empty whenever `f` is regular, so no `gamma` values
//!   appear in a structured instance.
//!
//! `rho` is *t-log bounded* when the distinct offsets strictly inside
//! `(0, e0 * k^k)` number at most `floor(t * log2(p^k))`. The generator
//! enforces this budget exactly: that many tuples (chosen by seeded shuffle)
//! receive distinct small offsets and every other tuple receives a distinct
//! large one. Zero offsets would put the value 0 into the instance and make
//! it trivially solvable, so they are dropped and counted, or reported as
//! `TrivialZero` when the caller asks to keep them.
//!
//! All Δ-sets are sets of *distinct* values. This is what makes the solver's
//! enumeration bounds exact; the raw multiset is recoverable from
//! [`build_deltas`] plus the block sizes.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::FiniteFn;
use crate::ordertype::{class_count_by_formula, KTuple};
use crate::regularity::{check_regressively_regular, partition_blocks, GridE, RegRegError};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Grid(#[from] RegRegError),
    #[error("rho is undefined at grid tuple {0}")]
    MissingRho(KTuple),
    #[error("gamma is undefined at grid tuple {0}")]
    MissingGamma(KTuple),
    #[error("rho({x}) = {value} is below min(x)")]
    RhoBelowMin { x: KTuple, value: u64 },
    #[error("function is not regressively regular (class {failing_class} fails)")]
    NotRegular { failing_class: String },
    #[error("rho is not t-log bounded: {distinct_small} distinct small offsets, cap {cap}")]
    NotTLogBounded { distinct_small: usize, cap: u64 },
    #[error("negative term {value} is out of range (must exceed -{e0})")]
    NegativeOutOfRange { value: i64, e0: u64 },
    #[error("{zero_tuples} zero offsets kept: instance is trivially solvable")]
    TrivialZero { zero_tuples: u64 },
    #[error("cannot place {needed} distinct small offsets in (0, {window})")]
    InfeasibleSmallRange { needed: u64, window: u64 },
    #[error("delta value {0} overflows the instance value range")]
    ValueOutOfRange(i128),
    #[error("instance invariant violated: {0}")]
    InvariantViolation(String),
    #[error("malformed instance json: {0}")]
    MalformedJson(String),
}

/// Total map `E^k -> N` with `rho(x) >= min(x)` everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoFn {
    values: BTreeMap<KTuple, u64>,
}

impl RhoFn {
    pub fn new(values: BTreeMap<KTuple, u64>) -> Result<Self, InstanceError> {
        for (x, &v) in &values {
            if v < x.min_coord() {
                return Err(InstanceError::RhoBelowMin {
                    x: x.clone(),
                    value: v,
                });
            }
        }
        Ok(Self { values })
    }

    /// Builds `rho(x) = min(x) + offset(x)` over the whole grid.
    pub fn from_offsets(grid: &GridE, offset: impl Fn(&KTuple) -> u64) -> Self {
        let values = grid
            .tuples()
            .into_iter()
            .map(|x| {
                let v = x
                    .min_coord()
                    .checked_add(offset(&x))
                    .expect("rho overflows u64");
                (x, v)
            })
            .collect();
        Self { values }
    }

    pub fn value(&self, x: &KTuple) -> Option<u64> {
        self.values.get(x).copied()
    }

    /// `rho(x) - min(x)`.
    pub fn offset(&self, x: &KTuple) -> Option<u64> {
        self.value(x).map(|v| v - x.min_coord())
    }
}

/// Total map `E^k -> Z`, used for the `mid` block of non-regular functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaFn {
    values: BTreeMap<KTuple, i64>,
}

impl GammaFn {
    pub fn new(values: BTreeMap<KTuple, i64>) -> Self {
        Self { values }
    }

    pub fn from_fn(grid: &GridE, value: impl Fn(&KTuple) -> i64) -> Self {
        let values = grid.tuples().into_iter().map(|x| {
            let v = value(&x);
            (x, v)
        });
        Self {
            values: values.collect(),
        }
    }

    pub fn value(&self, x: &KTuple) -> Option<i64> {
        self.values.get(x).copied()
    }
}

/// `floor(t * log2(p^k))` — the cap on distinct small offsets.
pub fn tlog_cap(p: usize, k: usize, t: u32) -> u64 {
    let size = (p as f64).powi(k as i32);
    (t as f64 * size.log2()).floor() as u64
}

/// Smallest `e0` for which the generator can place `min(cap, p^k)` distinct
/// small offsets inside `(0, e0 * k^k)`. Grids below this bound make
/// [`gen_rho_tlog`] fail with `InfeasibleSmallRange`.
pub fn min_feasible_e0(k: usize, p: usize, t: u32) -> u64 {
    let n = (p as u64).pow(k as u32);
    let s = tlog_cap(p, k, t).min(n);
    let kk = (k as u64).pow(k as u32);
    // ceil((s + 1) / k^k)
    (s + kk) / kk
}

/// Draws `count` distinct values from `lo..hi` by seeded rejection sampling.
fn draw_distinct(rng: &mut ChaCha8Rng, lo: u64, hi: u64, count: u64) -> Vec<u64> {
    debug_assert!(hi - lo >= count);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count as usize);
    while (out.len() as u64) < count {
        let v = rng.random_range(lo..hi);
        if seen.insert(v) {
            out.push(v);
        }
    }
    out
}

/// Deterministic t-log-bounded offset map: exactly `min(cap, p^k)` tuples
/// (seeded shuffle) get distinct offsets strictly inside `(0, e0*k^k)`; every
/// other tuple gets a distinct offset at or above the window.
pub fn gen_rho_tlog(grid: &GridE, t: u32, seed: u64) -> Result<RhoFn, InstanceError> {
    assert!(t >= 1, "t must be at least 1");
    let n = grid.tuple_count();
    let window = grid.small_window();
    let cap = tlog_cap(grid.p(), grid.k(), t);
    let small_count = cap.min(n);
    let available = window.saturating_sub(1);
    if available < small_count {
        return Err(InstanceError::InfeasibleSmallRange {
            needed: small_count,
            window,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tuples = grid.tuples();
    let mut order: Vec<usize> = (0..tuples.len()).collect();
    order.shuffle(&mut rng);

    let smalls = draw_distinct(&mut rng, 1, window, small_count);
    let large_count = n - small_count;
    let span = (large_count * 8).max(64);
    let hi = window.checked_add(span).expect("offset span overflows u64");
    let larges = draw_distinct(&mut rng, window, hi, large_count);

    let mut offsets = vec![0u64; tuples.len()];
    for (i, &tuple_idx) in order.iter().enumerate() {
        offsets[tuple_idx] = if i < smalls.len() {
            smalls[i]
        } else {
            larges[i - smalls.len()]
        };
    }

    let values = tuples
        .into_iter()
        .zip(offsets)
        .map(|(x, off)| {
            let v = x.min_coord().checked_add(off).expect("rho overflows u64");
            (x, v)
        })
        .collect();
    Ok(RhoFn { values })
}

/// Seeded uniform values in `[-bound, bound]` for every grid tuple.
pub fn gen_gamma(grid: &GridE, seed: u64, bound: u64) -> GammaFn {
    assert!(bound >= 1, "bound must be at least 1");
    let b = i64::try_from(bound).expect("bound fits i64");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = grid
        .tuples()
        .into_iter()
        .map(|x| (x, rng.random_range(-b..=b)))
        .collect();
    GammaFn::new(values)
}

/// True iff the distinct offsets strictly inside `(0, e0*k^k)` number at most
/// `floor(t * log2(p^k))`.
pub fn check_tlog_bounded(rho: &RhoFn, grid: &GridE, t: u32) -> Result<bool, InstanceError> {
    Ok(count_small_offsets(rho, grid)? as u64 <= tlog_cap(grid.p(), grid.k(), t))
}

fn count_small_offsets(rho: &RhoFn, grid: &GridE) -> Result<usize, InstanceError> {
    let window = grid.small_window();
    let mut small = BTreeSet::new();
    for x in grid.tuples() {
        let off = rho
            .offset(&x)
            .ok_or_else(|| InstanceError::MissingRho(x.clone()))?;
        if 0 < off && off < window {
            small.insert(off);
        }
    }
    Ok(small.len())
}

fn to_value(v: i128) -> Result<i64, InstanceError> {
    i64::try_from(v).map_err(|_| InstanceError::ValueOutOfRange(v))
}

/// The three deduplicated Δ-sets: `f(x) - min(E)` over `low`, `gamma(x)`
/// over `mid`, `rho(x) - min(x)` over `high`.
#[allow(clippy::type_complexity)]
pub fn build_deltas(
    f: &FiniteFn,
    grid: &GridE,
    rho: &RhoFn,
    gamma: &GammaFn,
) -> Result<(BTreeSet<i64>, BTreeSet<i64>, BTreeSet<i64>), InstanceError> {
    // Totality is a precondition for all three maps.
    for x in grid.tuples() {
        if rho.value(&x).is_none() {
            return Err(InstanceError::MissingRho(x));
        }
        if gamma.value(&x).is_none() {
            return Err(InstanceError::MissingGamma(x));
        }
    }
    let part = partition_blocks(f, grid)?;
    let e0 = grid.e0() as i128;

    let mut d0 = BTreeSet::new();
    for x in &part.low {
        let v = f.value(x).expect("partition checked domain") as i128 - e0;
        d0.insert(to_value(v)?);
    }
    let mut d1 = BTreeSet::new();
    for x in &part.mid {
        d1.insert(gamma.value(x).expect("checked above"));
    }
    let mut d2 = BTreeSet::new();
    for x in &part.high {
        let off = rho.offset(x).expect("checked above");
        d2.insert(to_value(off as i128)?);
    }
    Ok((d0, d1, d2))
}

/// A solver-ready subset-sum instance with target zero.
///
/// Serializes to single-line JSON with a fixed key order, so re-serializing
/// a parsed instance is byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredInstance {
    pub k: usize,
    pub p: usize,
    pub t: u32,
    pub e0: u64,
    /// Distinct values in `(-e0, 0)`, at most one per order-type class.
    pub negatives: Vec<i64>,
    /// Distinct values in `(0, e0*k^k)`, at most `floor(t*log2(p^k))` many.
    pub small_positives: Vec<i64>,
    /// Distinct values at or above `e0*k^k`.
    pub large_positives: Vec<i64>,
    /// Grid tuples whose offset was zero and therefore dropped.
    pub dropped_zeros: u64,
}

impl StructuredInstance {
    /// All instance values, ascending. The three ranges are disjoint and
    /// ordered, so concatenation is already sorted.
    pub fn all_values(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(
            self.negatives.len() + self.small_positives.len() + self.large_positives.len(),
        );
        out.extend_from_slice(&self.negatives);
        out.extend_from_slice(&self.small_positives);
        out.extend_from_slice(&self.large_positives);
        out
    }

    pub fn value_count(&self) -> usize {
        self.negatives.len() + self.small_positives.len() + self.large_positives.len()
    }

    /// The window bound `e0 * k^k`.
    pub fn window(&self) -> u128 {
        (self.e0 as u128) * (self.k as u128).pow(self.k as u32)
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let fail = |msg: String| Err(InstanceError::InvariantViolation(msg));
        if self.k < 2 {
            return fail(format!("k must be >= 2, got {}", self.k));
        }
        if self.p < 2 {
            return fail(format!("p must be >= 2, got {}", self.p));
        }
        if self.t < 1 {
            return fail("t must be >= 1".to_string());
        }
        let window = self.window();
        let e0 = self.e0 as i128;

        for w in [
            &self.negatives,
            &self.small_positives,
            &self.large_positives,
        ] {
            if w.windows(2).any(|pair| pair[0] >= pair[1]) {
                return fail("values must be strictly ascending".to_string());
            }
        }
        for &v in &self.negatives {
            if !(-e0 < (v as i128) && v < 0) {
                return fail(format!("negative {v} outside (-{}, 0)", self.e0));
            }
        }
        let class_bound = class_count_by_formula(self.k);
        if self.negatives.len() as u128 > class_bound {
            return fail(format!(
                "{} negatives exceed the {} order-type classes",
                self.negatives.len(),
                class_bound
            ));
        }
        for &v in &self.small_positives {
            if !(0 < v && (v as i128) < window as i128) {
                return fail(format!("small positive {v} outside (0, {window})"));
            }
        }
        let cap = tlog_cap(self.p, self.k, self.t);
        if self.small_positives.len() as u64 > cap {
            return fail(format!(
                "{} small positives exceed cap {cap}",
                self.small_positives.len()
            ));
        }
        for &v in &self.large_positives {
            if v <= 0 || (v as i128) < window as i128 {
                return fail(format!("large positive {v} below window {window}"));
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    /// Parses and validates; trailing whitespace is tolerated.
    pub fn from_json_str(s: &str) -> Result<Self, InstanceError> {
        let inst: Self =
            serde_json::from_str(s).map_err(|e| InstanceError::MalformedJson(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }
}

/// Assembles a structured instance from a regressively regular `(f, E)` pair
/// and a t-log-bounded `rho`. Both preconditions are re-checked internally.
pub fn build_structured(
    f: &FiniteFn,
    grid: &GridE,
    rho: &RhoFn,
    t: u32,
    keep_zeros: bool,
) -> Result<StructuredInstance, InstanceError> {
    let report = check_regressively_regular(f, grid)?;
    if !report.is_regular {
        let failing_class = report
            .verdicts
            .iter()
            .find(|(_, v)| v.is_fail())
            .map(|(sig, _)| sig.to_string())
            .unwrap_or_default();
        return Err(InstanceError::NotRegular { failing_class });
    }
    let cap = tlog_cap(grid.p(), grid.k(), t);
    let distinct_small = count_small_offsets(rho, grid)?;
    if distinct_small as u64 > cap {
        return Err(InstanceError::NotTLogBounded {
            distinct_small,
            cap,
        });
    }

    let part = partition_blocks(f, grid)?;
    debug_assert!(part.mid.is_empty(), "regularity forces an empty mid block");

    let e0 = grid.e0();
    let mut negatives = BTreeSet::new();
    for x in &part.low {
        let v = f.value(x).expect("partition checked domain") as i128 - e0 as i128;
        if v <= -(e0 as i128) {
            return Err(InstanceError::NegativeOutOfRange {
                value: to_value(v).unwrap_or(i64::MIN),
                e0,
            });
        }
        negatives.insert(to_value(v)?);
    }

    let window = grid.small_window();
    let mut zero_tuples = 0u64;
    let mut small_positives = BTreeSet::new();
    let mut large_positives = BTreeSet::new();
    for x in &part.high {
        let off = rho
            .offset(x)
            .ok_or_else(|| InstanceError::MissingRho(x.clone()))?;
        if off == 0 {
            zero_tuples += 1;
        } else if off < window {
            small_positives.insert(to_value(off as i128)?);
        } else {
            large_positives.insert(to_value(off as i128)?);
        }
    }
    if zero_tuples > 0 && keep_zeros {
        return Err(InstanceError::TrivialZero { zero_tuples });
    }

    let inst = StructuredInstance {
        k: grid.k(),
        p: grid.p(),
        t,
        e0,
        negatives: negatives.into_iter().collect(),
        small_positives: small_positives.into_iter().collect(),
        large_positives: large_positives.into_iter().collect(),
        dropped_zeros: zero_tuples,
    };
    inst.validate()?;
    Ok(inst)
}
