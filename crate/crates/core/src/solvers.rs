//! Subset-sum solvers, all for target zero over sets of distinct integers.
//!
//! [`solve_structured`] is the split-enumeration procedure for structured
//! instances: it enumerates every subset sum of the negatives and every
//! subset sum of the small positives, and looks for a pair cancelling to
//! zero. Large positives are excluded outright — each one is at least
//! `e0 * k^k`, which strictly exceeds the magnitude of any sum of negatives
//! (fewer than `k^k` of them, each above `-e0`) — so no zero-sum subset can
//! contain one. With at most `k^k` negatives and at most
//! `floor(t*log2(p^k))` small positives, the enumeration performs at most
//! `2^(k^k) * (p^k)^t` sum comparisons; `stats` reports exactly these
//! bound-relevant counts whether or not the search exits early.
//!
//! [`solve_mitm`] and [`solve_dp`] are independent oracles over arbitrary
//! value sets, used to cross-validate the structured solver. A subset must
//! be nonempty to count as a solution; a literal `0` in the value set makes
//! the instance trivially solvable, reported as `TrivialZero` with
//! witness `[0]`.
//!
//! All solvers are deterministic: subsets are ranked in ascending
//! binary-counter order over the values sorted ascending (bit `i` selects
//! the `i`-th smallest value) and the first zero-sum subset in that order is
//! the witness for the enumerating solvers.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instances::{tlog_cap, StructuredInstance};

/// Value-count guard for meet-in-the-middle.
pub const MITM_MAX_VALUES: usize = 40;
/// Absolute-sum guard for the reachability table.
pub const DP_MAX_ABS_SUM: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instance invariant violated: {0}")]
    InvariantViolation(String),
    #[error("input too large for {solver}: {size} exceeds limit {limit}")]
    TooLarge {
        solver: &'static str,
        size: u128,
        limit: u128,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Found,
    None,
    TrivialZero,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Found => "found",
            Self::None => "none",
            Self::TrivialZero => "trivial_zero",
        }
    }

    /// True for any outcome that exhibits a zero-sum subset.
    pub fn is_yes(&self) -> bool {
        !matches!(self, Self::None)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    pub sums_enumerated: u64,
    pub comparisons: u64,
}

#[derive(Serialize, Deserialize)]
struct SolveResultWire {
    status: String,
    witness: Option<Vec<i64>>,
    sums_enumerated: u64,
    comparisons: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SolveResultWire", into = "SolveResultWire")]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Ascending zero-sum subset; present iff the status is a yes.
    pub witness: Option<Vec<i64>>,
    pub stats: SolveStats,
}

impl SolveResult {
    fn no(stats: SolveStats) -> Self {
        Self {
            status: SolveStatus::None,
            witness: None,
            stats,
        }
    }

    fn found(witness: Vec<i64>, stats: SolveStats) -> Self {
        Self {
            status: SolveStatus::Found,
            witness: Some(witness),
            stats,
        }
    }

    fn trivial_zero() -> Self {
        Self {
            status: SolveStatus::TrivialZero,
            witness: Some(vec![0]),
            stats: SolveStats::default(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("result serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, String> {
        serde_json::from_str(s).map_err(|e| e.to_string())
    }
}

impl From<SolveResult> for SolveResultWire {
    fn from(r: SolveResult) -> Self {
        SolveResultWire {
            status: r.status.as_str().to_string(),
            witness: r.witness,
            sums_enumerated: r.stats.sums_enumerated,
            comparisons: r.stats.comparisons,
        }
    }
}

impl TryFrom<SolveResultWire> for SolveResult {
    type Error = String;

    fn try_from(w: SolveResultWire) -> Result<Self, Self::Error> {
        let status = match w.status.as_str() {
            "found" => SolveStatus::Found,
            "none" => SolveStatus::None,
            "trivial_zero" => SolveStatus::TrivialZero,
            other => return Err(format!("unknown status {other:?}")),
        };
        Ok(SolveResult {
            status,
            witness: w.witness,
            stats: SolveStats {
                sums_enumerated: w.sums_enumerated,
                comparisons: w.comparisons,
            },
        })
    }
}

/// `sums[mask]` = sum of the values selected by `mask`.
/// Sums are accumulated in i128: at most 48 values of i64 magnitude can
/// never overflow, and the type invariants do not bound `e0`.
fn subset_sums(values: &[i64]) -> Vec<i128> {
    let n = values.len();
    let mut sums = vec![0i128; 1usize << n];
    for mask in 1..1usize << n {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + values[low] as i128;
    }
    sums
}

fn mask_values(mask: u64, values: &[i64]) -> Vec<i64> {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &v)| v)
        .collect()
}

/// Split enumeration over a structured instance: index all negative subset
/// sums, probe with each small-positive subset sum, exclude large positives.
pub fn solve_structured(inst: &StructuredInstance) -> Result<SolveResult, SolveError> {
    inst.validate()
        .map_err(|e| SolveError::InvariantViolation(e.to_string()))?;

    let negs = &inst.negatives;
    let smalls = &inst.small_positives;
    let nn = negs.len();
    let ns = smalls.len();
    assert!(
        nn + ns <= 48,
        "enumeration over {} + {} values is beyond desk scale",
        nn,
        ns
    );

    let neg_sums = subset_sums(negs);
    let pos_sums = subset_sums(smalls);

    // First mask per sum, inserted in ascending counter order.
    let mut table: HashMap<i128, u64> = HashMap::with_capacity(neg_sums.len());
    for (mask, &s) in neg_sums.iter().enumerate() {
        table.entry(s).or_insert(mask as u64);
    }

    // The empty/empty pairing is excluded; a nonempty positive side can
    // legitimately pair with the empty negative mask only at sum zero,
    // which positive values never reach, so skipping mask 0 is exact.
    let mut hit: Option<(u64, u64)> = None;
    for (pmask, &ps) in pos_sums.iter().enumerate().skip(1) {
        if let Some(&nmask) = table.get(&-ps) {
            hit = Some((nmask, pmask as u64));
            break;
        }
    }

    let stats = SolveStats {
        sums_enumerated: (1u64 << nn) + (1u64 << ns),
        comparisons: (1u64 << nn)
            .checked_mul(1u64 << ns)
            .expect("comparison count overflows u64"),
    };
    // The proof-side bound: nn < k^k classes and ns <= floor(t*log2(p^k)),
    // so 2^nn * 2^ns <= 2^(k^k) * (p^k)^t. Checked in the exponent domain
    // to avoid astronomically large powers.
    if let Some(kk) = (inst.k as u128).checked_pow(inst.k as u32) {
        let cap = tlog_cap(inst.p, inst.k, inst.t) as u128;
        assert!(
            (nn + ns) as u128 <= kk + cap,
            "comparison bound exceeded: 2^({nn}+{ns}) > 2^(k^k)*(p^k)^t"
        );
    }

    Ok(match hit {
        Some((nmask, pmask)) => {
            let mut witness = mask_values(nmask, negs);
            witness.extend(mask_values(pmask, smalls));
            SolveResult::found(witness, stats)
        }
        None => SolveResult::no(stats),
    })
}

/// Meet-in-the-middle over an arbitrary value set; exact for up to
/// [`MITM_MAX_VALUES`] values. The witness is the first zero-sum subset in
/// ascending binary-counter order over the sorted values.
pub fn solve_mitm(values: &[i64]) -> Result<SolveResult, SolveError> {
    let vals: Vec<i64> = values
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = vals.len();
    if n > MITM_MAX_VALUES {
        return Err(SolveError::TooLarge {
            solver: "mitm",
            size: n as u128,
            limit: MITM_MAX_VALUES as u128,
        });
    }
    if vals.binary_search(&0).is_ok() {
        return Ok(SolveResult::trivial_zero());
    }
    if n == 0 {
        return Ok(SolveResult::no(SolveStats::default()));
    }

    // Low mask bits select from the left half, high bits from the right;
    // ascending full-counter order is ascending (high, low) pairs.
    let half = n / 2;
    let (left, right) = vals.split_at(half);
    let left_sums = subset_sums(left);
    let right_sums = subset_sums(right);

    let mut table: HashMap<i128, u64> = HashMap::with_capacity(left_sums.len());
    let mut zero_nonempty_lo: Option<u64> = None;
    for (lo, &s) in left_sums.iter().enumerate() {
        table.entry(s).or_insert(lo as u64);
        if s == 0 && lo > 0 && zero_nonempty_lo.is_none() {
            zero_nonempty_lo = Some(lo as u64);
        }
    }

    let mut probes = 0u64;
    let mut hit: Option<(u64, u64)> = None;
    for (hi, &hs) in right_sums.iter().enumerate() {
        probes += 1;
        let lo = if hi == 0 {
            // The right side is empty here, so the left side must supply a
            // nonempty zero-sum subset on its own.
            zero_nonempty_lo
        } else {
            table.get(&-hs).copied()
        };
        if let Some(lo) = lo {
            hit = Some((lo, hi as u64));
            break;
        }
    }

    let stats = SolveStats {
        sums_enumerated: left_sums.len() as u64 + right_sums.len() as u64,
        comparisons: probes,
    };
    Ok(match hit {
        Some((lo, hi)) => {
            let mut witness = mask_values(lo, left);
            witness.extend(mask_values(hi, right));
            SolveResult::found(witness, stats)
        }
        None => SolveResult::no(stats),
    })
}

/// Pseudopolynomial reachability over shifted sums with back-pointer
/// reconstruction; exact while the total absolute sum stays within
/// [`DP_MAX_ABS_SUM`].
pub fn solve_dp(values: &[i64]) -> Result<SolveResult, SolveError> {
    let vals: Vec<i64> = values
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let abs_sum: u128 = vals.iter().map(|&v| v.unsigned_abs() as u128).sum();
    if abs_sum > DP_MAX_ABS_SUM {
        return Err(SolveError::TooLarge {
            solver: "dp",
            size: abs_sum,
            limit: DP_MAX_ABS_SUM,
        });
    }
    if vals.binary_search(&0).is_ok() {
        return Ok(SolveResult::trivial_zero());
    }
    if vals.is_empty() {
        return Ok(SolveResult::no(SolveStats::default()));
    }

    let neg_total: i64 = vals.iter().filter(|&&v| v < 0).map(|&v| -v).sum();
    let pos_total: i64 = vals.iter().filter(|&&v| v > 0).copied().sum();
    let offset = neg_total as usize;
    let size = (neg_total + pos_total + 1) as usize;

    let mut reached = vec![false; size];
    let mut back: Vec<Option<(usize, usize)>> = vec![None; size];
    let mut reach_list: Vec<usize> = Vec::with_capacity(size.min(1 << vals.len().min(20)));
    reached[offset] = true;
    reach_list.push(offset);

    let mut comparisons = 0u64;
    for (i, &v) in vals.iter().enumerate() {
        let snapshot = reach_list.len();
        for idx in 0..snapshot {
            let j = reach_list[idx];
            let nj = j as i64 + v;
            debug_assert!(nj >= 0 && (nj as usize) < size);
            let nj = nj as usize;
            comparisons += 1;
            if nj == offset {
                if j != offset {
                    // Nonempty path to -v plus v itself sums to zero.
                    let mut witness = backtrack(&back, &vals, j, offset);
                    witness.push(v);
                    witness.sort_unstable();
                    let stats = SolveStats {
                        sums_enumerated: reach_list.len() as u64,
                        comparisons,
                    };
                    return Ok(SolveResult::found(witness, stats));
                }
                continue;
            }
            if !reached[nj] {
                reached[nj] = true;
                back[nj] = Some((i, j));
                reach_list.push(nj);
            }
        }
    }

    Ok(SolveResult::no(SolveStats {
        sums_enumerated: reach_list.len() as u64,
        comparisons,
    }))
}

fn backtrack(
    back: &[Option<(usize, usize)>],
    vals: &[i64],
    mut slot: usize,
    offset: usize,
) -> Vec<i64> {
    let mut out = Vec::new();
    while slot != offset {
        let (i, prev) = back[slot].expect("reachable slots carry back-pointers");
        out.push(vals[i]);
        slot = prev;
    }
    out
}

/// True iff `witness` is a nonempty sub-*set* of `values` summing to zero.
pub fn verify_witness(values: &[i64], witness: &[i64]) -> bool {
    if witness.is_empty() {
        return false;
    }
    let value_set: BTreeSet<i64> = values.iter().copied().collect();
    let witness_set: BTreeSet<i64> = witness.iter().copied().collect();
    if witness_set.len() != witness.len() || !witness_set.is_subset(&value_set) {
        return false;
    }
    witness.iter().map(|&v| v as i128).sum::<i128>() == 0
}
