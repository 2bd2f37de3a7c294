//! Block partitions of `E^k` and the regressive-regularity checker.
//!
//! A function `f` with `E^k` inside its domain splits the grid into three
//! blocks by comparing `f(x)` against `min(E)` and `min(x)`:
//!
//! * `low`  — `f(x) < min(E)`
//! * `mid`  — `min(E) <= f(x) < min(x)`
//! * `high` — `f(x) >= min(x)`
//!
//! `f` is *regressively regular* over `E` when every order-type class of
//! `E^k` is either constant with a value below `min(E)` or satisfies
//! `f(x) >= min(x)` pointwise. Regularity forces the `mid` block to be
//! empty and caps the number of regressive values by the number of classes,
//! which is strictly below `k^k`.

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::families::{make_fn, FamilySpec, FiniteFn};
use crate::ordertype::{signature, KTuple, OrderTypeSig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegRegError {
    #[error("grid needs at least 2 elements, got {0}")]
    GridTooSmall(usize),
    #[error("grid arity must be at least 2, got {0}")]
    GridArityTooSmall(usize),
    #[error("grid element {0} exceeds the supported range")]
    GridElementTooLarge(u64),
    #[error("function is undefined at grid tuple {0}")]
    MissingDomain(KTuple),
}

/// The k-th Cartesian power of a finite set `E` of naturals, `|E| = p >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridE {
    elements: Vec<u64>,
    k: usize,
}

impl GridE {
    pub fn new(elements: Vec<u64>, k: usize) -> Result<Self, RegRegError> {
        if k < 2 {
            return Err(RegRegError::GridArityTooSmall(k));
        }
        let mut elements = elements;
        elements.sort_unstable();
        elements.dedup();
        if elements.len() < 2 {
            return Err(RegRegError::GridTooSmall(elements.len()));
        }
        if let Some(&e) = elements.iter().find(|&&e| e > i64::MAX as u64) {
            return Err(RegRegError::GridElementTooLarge(e));
        }
        Ok(Self { elements, k })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `p = |E|`.
    pub fn p(&self) -> usize {
        self.elements.len()
    }

    /// `e0 = min(E)`.
    pub fn e0(&self) -> u64 {
        self.elements[0]
    }

    /// Number of grid tuples, `p^k`.
    pub fn tuple_count(&self) -> u64 {
        (self.p() as u64)
            .checked_pow(self.k as u32)
            .expect("p^k overflows u64")
    }

    /// The window bound `e0 * k^k` separating small from large offsets.
    pub fn small_window(&self) -> u64 {
        let kk = (self.k as u64)
            .checked_pow(self.k as u32)
            .expect("k^k overflows u64");
        self.e0().checked_mul(kk).expect("e0 * k^k overflows u64")
    }

    /// All tuples of `E^k` in ascending lexicographic order.
    pub fn tuples(&self) -> Vec<KTuple> {
        let p = self.p();
        let mut out = Vec::with_capacity(self.tuple_count() as usize);
        let mut idx = vec![0usize; self.k];
        loop {
            let coords: Vec<u64> = idx.iter().map(|&i| self.elements[i]).collect();
            out.push(KTuple::new(coords).expect("k >= 2"));
            let mut pos = self.k;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < p {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub fn tuple_set(&self) -> BTreeSet<KTuple> {
        self.tuples().into_iter().collect()
    }
}

/// Three-way split of `E^k`; blocks are disjoint and their union is the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    /// `f(x) < min(E)`.
    pub low: BTreeSet<KTuple>,
    /// `min(E) <= f(x) < min(x)`.
    pub mid: BTreeSet<KTuple>,
    /// `f(x) >= min(x)`.
    pub high: BTreeSet<KTuple>,
}

fn grid_value(f: &FiniteFn, x: &KTuple) -> Result<i64, RegRegError> {
    f.value(x)
        .ok_or_else(|| RegRegError::MissingDomain(x.clone()))
}

/// Splits `E^k` by the `low`/`mid`/`high` inequalities.
pub fn partition_blocks(f: &FiniteFn, grid: &GridE) -> Result<BlockPartition, RegRegError> {
    let e0 = grid.e0() as i64;
    let mut part = BlockPartition {
        low: BTreeSet::new(),
        mid: BTreeSet::new(),
        high: BTreeSet::new(),
    };
    for x in grid.tuples() {
        let v = grid_value(f, &x)?;
        let min_x = x.min_coord() as i64;
        if v < e0 {
            part.low.insert(x);
        } else if v < min_x {
            part.mid.insert(x);
        } else {
            part.high.insert(x);
        }
    }
    Ok(part)
}

/// Per-class outcome of the regularity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassVerdict {
    /// Every tuple of the class maps to the same value, strictly below
    /// `min(E)`.
    ConstantBelowMin { value: i64 },
    /// `f(x) >= min(x)` for every tuple of the class.
    GeqMin,
    /// Neither case holds. `x` is the first tuple with `f(x) < min(x)`;
    /// `y` demonstrates non-constancy when `fy != fx`, otherwise the class
    /// is constant with a value not below `min(E)` and `y = x`.
    Fail {
        x: KTuple,
        fx: i64,
        y: KTuple,
        fy: i64,
    },
}

impl ClassVerdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Self::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegRegReport {
    pub is_regular: bool,
    pub verdicts: BTreeMap<OrderTypeSig, ClassVerdict>,
    /// Distinct values `n` with `f(x) = n < min(x)` for some grid tuple `x`.
    pub regressive_value_count: usize,
}

impl Serialize for ClassVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::ConstantBelowMin { value } => {
                let mut s = serializer.serialize_struct("ClassVerdict", 2)?;
                s.serialize_field("verdict", "constant_below_min")?;
                s.serialize_field("value", value)?;
                s.end()
            }
            Self::GeqMin => {
                let mut s = serializer.serialize_struct("ClassVerdict", 1)?;
                s.serialize_field("verdict", "geq_min")?;
                s.end()
            }
            Self::Fail { x, fx, y, fy } => {
                let mut s = serializer.serialize_struct("ClassVerdict", 5)?;
                s.serialize_field("verdict", "fail")?;
                s.serialize_field("x", x.coords())?;
                s.serialize_field("fx", fx)?;
                s.serialize_field("y", y.coords())?;
                s.serialize_field("fy", fy)?;
                s.end()
            }
        }
    }
}

impl Serialize for RegRegReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Verdicts<'a>(&'a BTreeMap<OrderTypeSig, ClassVerdict>);

        impl Serialize for Verdicts<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut m = serializer.serialize_map(Some(self.0.len()))?;
                for (sig, verdict) in self.0 {
                    m.serialize_entry(&sig.to_string(), verdict)?;
                }
                m.end()
            }
        }

        let mut s = serializer.serialize_struct("RegRegReport", 3)?;
        s.serialize_field("is_regular", &self.is_regular)?;
        s.serialize_field("verdicts", &Verdicts(&self.verdicts))?;
        s.serialize_field("regressive_value_count", &self.regressive_value_count)?;
        s.end()
    }
}

impl RegRegReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Classifies every order-type class of `E^k` and reports whether `f` is
/// regressively regular over `E`.
pub fn check_regressively_regular(f: &FiniteFn, grid: &GridE) -> Result<RegRegReport, RegRegError> {
    let e0 = grid.e0() as i64;
    let mut classes: BTreeMap<OrderTypeSig, Vec<(KTuple, i64)>> = BTreeMap::new();
    for x in grid.tuples() {
        let v = grid_value(f, &x)?;
        classes.entry(signature(&x)).or_default().push((x, v));
    }

    let mut verdicts = BTreeMap::new();
    for (sig, members) in classes {
        let geq = members.iter().all(|(x, v)| *v >= x.min_coord() as i64);
        let verdict = if geq {
            ClassVerdict::GeqMin
        } else {
            let first = members[0].1;
            let constant = members.iter().all(|(_, v)| *v == first);
            if constant && first < e0 {
                ClassVerdict::ConstantBelowMin { value: first }
            } else {
                let (x, fx) = members
                    .iter()
                    .find(|(x, v)| *v < x.min_coord() as i64)
                    .cloned()
                    .expect("class is not pointwise geq-min");
                let (y, fy) = members
                    .iter()
                    .find(|(_, v)| *v != fx)
                    .cloned()
                    .unwrap_or_else(|| (x.clone(), fx));
                ClassVerdict::Fail { x, fx, y, fy }
            }
        };
        verdicts.insert(sig, verdict);
    }

    let is_regular = verdicts.values().all(|v| !v.is_fail());
    let regressive_value_count = regressive_values(f, &grid.tuple_set())?.len();
    Ok(RegRegReport {
        is_regular,
        verdicts,
        regressive_value_count,
    })
}

/// `{n : f(x) = n < min(x) for some x in X}`.
pub fn regressive_values(
    f: &FiniteFn,
    x_set: &BTreeSet<KTuple>,
) -> Result<BTreeSet<i64>, RegRegError> {
    let mut values = BTreeSet::new();
    for x in x_set {
        let v = grid_value(f, x)?;
        if v < x.min_coord() as i64 {
            values.insert(v);
        }
    }
    Ok(values)
}

/// Bounded search for a regressively regular `(f, E)` pair: enumerates
/// p-subsets `E` of the ground set in lexicographic order, builds the family
/// function with domain exactly `E^k`, and returns the first regular pair.
/// Gives up after `budget` candidate subsets.
pub fn find_regressively_regular(
    spec: &FamilySpec,
    k: usize,
    p: usize,
    ground: &BTreeSet<u64>,
    budget: u64,
) -> Option<(FiniteFn, GridE)> {
    let ground: Vec<u64> = ground.iter().copied().collect();
    if p < 2 || k < 2 || ground.len() < p {
        return None;
    }
    let mut tried = 0u64;
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        if tried >= budget {
            return None;
        }
        tried += 1;

        let elements: Vec<u64> = idx.iter().map(|&i| ground[i]).collect();
        let grid = GridE::new(elements, k).expect("p >= 2, k >= 2");
        if let Ok(f) = make_fn(spec, &grid.tuple_set()) {
            if let Ok(report) = check_regressively_regular(&f, &grid) {
                if report.is_regular {
                    return Some((f, grid));
                }
            }
        }

        // Advance to the next p-combination in lexicographic order.
        let n = ground.len();
        let mut pos = p;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            if idx[pos] < n - (p - pos) {
                idx[pos] += 1;
                for j in pos + 1..p {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn kt(coords: &[u64]) -> KTuple {
        KTuple::from_coords(coords)
    }

    /// Constant function over the grid, made reflexive by an extra marker
    /// tuple `(c,..,c)` outside `E^k`.
    fn constant_fn(grid: &GridE, c: u64) -> FiniteFn {
        let mut entries = BTreeMap::new();
        for x in grid.tuples() {
            entries.insert(x, c as i64);
        }
        entries.insert(kt(&vec![c; grid.k()]), c as i64);
        FiniteFn::new(entries).unwrap()
    }

    #[test]
    fn grid_tuples_are_lexicographic() {
        let grid = GridE::new(vec![5, 2], 2).unwrap();
        let tuples = grid.tuples();
        assert_eq!(
            tuples,
            vec![kt(&[2, 2]), kt(&[2, 5]), kt(&[5, 2]), kt(&[5, 5])]
        );
        assert_eq!(grid.e0(), 2);
        assert_eq!(grid.p(), 2);
    }

    #[test]
    fn min_family_puts_everything_in_high() {
        let grid = GridE::new(vec![2, 5], 2).unwrap();
        let f = make_fn(&FamilySpec::Min, &grid.tuple_set()).unwrap();
        let part = partition_blocks(&f, &grid).unwrap();
        assert!(part.low.is_empty());
        assert!(part.mid.is_empty());
        assert_eq!(part.high.len(), 4);
    }

    #[test]
    fn constant_below_min_goes_low() {
        let grid = GridE::new(vec![3, 5], 2).unwrap();
        let f = constant_fn(&grid, 1);
        let part = partition_blocks(&f, &grid).unwrap();
        assert_eq!(part.low.len(), 4);
        assert!(part.mid.is_empty() && part.high.is_empty());
    }

    #[test]
    fn constant_at_min_e_splits_mid_and_high() {
        let grid = GridE::new(vec![3, 5], 2).unwrap();
        let f = constant_fn(&grid, 3);
        let part = partition_blocks(&f, &grid).unwrap();
        assert_eq!(part.mid, [kt(&[5, 5])].into_iter().collect());
        assert_eq!(
            part.high,
            [kt(&[3, 3]), kt(&[3, 5]), kt(&[5, 3])]
                .into_iter()
                .collect()
        );
        assert!(part.low.is_empty());
    }

    #[test]
    fn partition_requires_full_domain() {
        let grid = GridE::new(vec![2, 5], 2).unwrap();
        let mut entries = BTreeMap::new();
        entries.insert(kt(&[2, 2]), 2);
        let f = FiniteFn::new(entries).unwrap();
        assert!(matches!(
            partition_blocks(&f, &grid),
            Err(RegRegError::MissingDomain(_))
        ));
    }

    #[test]
    fn min_is_regular_everywhere() {
        let grid = GridE::new(vec![1, 4, 6], 2).unwrap();
        let f = make_fn(&FamilySpec::Min, &grid.tuple_set()).unwrap();
        let report = check_regressively_regular(&f, &grid).unwrap();
        assert!(report.is_regular);
        assert!(report.verdicts.values().all(|v| *v == ClassVerdict::GeqMin));
        assert_eq!(report.regressive_value_count, 0);
    }

    #[test]
    fn min_field_fails_on_small_grid() {
        // Over E = {2,5} the constant class carries f((5,5)) = 2, which is
        // neither below min(E) = 2 nor >= min((5,5)) = 5.
        let grid = GridE::new(vec![2, 5], 2).unwrap();
        let f = make_fn(&FamilySpec::MinField, &grid.tuple_set()).unwrap();
        let report = check_regressively_regular(&f, &grid).unwrap();
        assert!(!report.is_regular);
        let diag = report.verdicts.get(&signature(&kt(&[5, 5]))).unwrap();
        match diag {
            ClassVerdict::Fail { x, fx, .. } => {
                assert_eq!(*x, kt(&[5, 5]));
                assert_eq!(*fx, 2);
            }
            other => panic!("expected fail, got {other:?}"),
        }
    }

    #[test]
    fn constant_below_min_is_regular() {
        let grid = GridE::new(vec![3, 5], 2).unwrap();
        let f = constant_fn(&grid, 1);
        let report = check_regressively_regular(&f, &grid).unwrap();
        assert!(report.is_regular);
        assert!(report
            .verdicts
            .values()
            .all(|v| *v == ClassVerdict::ConstantBelowMin { value: 1 }));
        assert_eq!(report.regressive_value_count, 1);
    }

    #[test]
    fn regressive_values_examples() {
        let grid = GridE::new(vec![2, 5], 2).unwrap();
        let f_min = make_fn(&FamilySpec::Min, &grid.tuple_set()).unwrap();
        assert!(regressive_values(&f_min, &grid.tuple_set())
            .unwrap()
            .is_empty());

        let grid35 = GridE::new(vec![3, 5], 2).unwrap();
        let f_const = constant_fn(&grid35, 1);
        let vals = regressive_values(&f_const, &grid35.tuple_set()).unwrap();
        assert_eq!(vals, [1i64].into_iter().collect());

        let f_mf = make_fn(&FamilySpec::MinField, &grid.tuple_set()).unwrap();
        let vals = regressive_values(&f_mf, &grid.tuple_set()).unwrap();
        assert_eq!(vals, [2i64].into_iter().collect());
    }

    #[test]
    fn search_returns_first_regular_grid() {
        let ground: BTreeSet<u64> = (0..=5).collect();
        let (f, grid) = find_regressively_regular(&FamilySpec::Min, 2, 2, &ground, 100).unwrap();
        assert_eq!(grid.elements(), &[0, 1]);
        let report = check_regressively_regular(&f, &grid).unwrap();
        assert!(report.is_regular);
    }

    #[test]
    fn search_outcome_reverifies() {
        // MAX_MIN: whatever the search reports must be consistent with the
        // checker when re-run.
        let ground: BTreeSet<u64> = (0..=5).collect();
        match find_regressively_regular(&FamilySpec::MaxMin, 2, 2, &ground, 15) {
            Some((f, grid)) => {
                let report = check_regressively_regular(&f, &grid).unwrap();
                assert!(report.is_regular);
            }
            None => {
                // Exhausted all 15 two-element subsets of {0..5}.
            }
        }
    }

    #[test]
    fn search_respects_budget() {
        let ground: BTreeSet<u64> = (0..=5).collect();
        assert!(find_regressively_regular(&FamilySpec::MaxMin, 2, 2, &ground, 1).is_none());
    }

    #[test]
    fn report_serializes_keyed_by_signature_string() {
        let grid = GridE::new(vec![2, 5], 2).unwrap();
        let f = make_fn(&FamilySpec::Min, &grid.tuple_set()).unwrap();
        let report = check_regressively_regular(&f, &grid).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.to_json_string()).unwrap();
        assert_eq!(json["is_regular"], serde_json::Value::Bool(true));
        assert_eq!(json["verdicts"]["0,0"]["verdict"], "geq_min");
        assert_eq!(json["verdicts"]["0,1"]["verdict"], "geq_min");
        assert_eq!(json["verdicts"]["1,0"]["verdict"], "geq_min");
    }
}
