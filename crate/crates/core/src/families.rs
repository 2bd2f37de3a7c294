//! Finite reflexive functions and the built-in function families.
//!
//! A [`FiniteFn`] is a total map from a finite set of k-tuples to the
//! integers. It is *reflexive* when every value it takes appears as a
//! coordinate of some domain tuple. The built-in families assign, for any
//! finite domain `D`, a function `f_D`:
//!
//! * `MIN` — `f_D(x) = min(x)`.
//! * `MIN_FIELD` — `f_D(x) = min(field(D_x ∪ {x}))` where
//!   `D_x = {z ∈ D : max(z) < max(x)}` is the below-max search region.
//! * `MAX_MIN` — `f_D(x) = max{min(z) : z ∈ D_x}` when `D_x` is nonempty,
//!   else `min(x)`. Included as a negative control: growing the search
//!   region can raise the recorded value, so the jump-free checker must
//!   flag it.
//!
//! Fullness (a function for *every* finite domain) quantifies over all of
//! `N^k` and cannot be decided mechanically; [`check_full_sample`] tests a
//! caller-supplied sample of domains instead.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordertype::KTuple;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("domain must be nonempty")]
    EmptyDomain,
    #[error("domain mixes arities {0} and {1}")]
    MixedArity(usize, usize),
    #[error("family rule is undefined at {0}")]
    RuleUndefined(KTuple),
    #[error("malformed function json: {0}")]
    MalformedJson(String),
    #[error("unknown family id {0:?}")]
    UnknownFamily(String),
}

/// The set of all coordinates appearing in any tuple of `A`.
pub fn field_of(a: &BTreeSet<KTuple>) -> BTreeSet<u64> {
    a.iter().flat_map(|t| t.coords().iter().copied()).collect()
}

/// `D_x = {z ∈ D : max(z) < max(x)}` — strictly-below-max region.
pub fn restricted_domain(d: &BTreeSet<KTuple>, x: &KTuple) -> BTreeSet<KTuple> {
    let cap = x.max_coord();
    d.iter().filter(|z| z.max_coord() < cap).cloned().collect()
}

#[derive(Serialize, Deserialize)]
struct FnEntry {
    x: Vec<u64>,
    v: i64,
}

#[derive(Serialize, Deserialize)]
struct FiniteFnWire {
    k: usize,
    entries: Vec<FnEntry>,
}

/// A total map from a finite, uniform-arity set of k-tuples to the integers.
///
/// Values are signed so the same type can carry instance-building maps into
/// `Z`; the reflexivity check treats any negative value as outside the field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteFnWire", into = "FiniteFnWire")]
pub struct FiniteFn {
    k: usize,
    entries: BTreeMap<KTuple, i64>,
}

impl FiniteFn {
    pub fn new(entries: BTreeMap<KTuple, i64>) -> Result<Self, FamilyError> {
        let k = match entries.keys().next() {
            Some(t) => t.arity(),
            None => return Err(FamilyError::EmptyDomain),
        };
        for t in entries.keys() {
            if t.arity() != k {
                return Err(FamilyError::MixedArity(k, t.arity()));
            }
        }
        Ok(Self { k, entries })
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &KTuple> {
        self.entries.keys()
    }

    pub fn domain_set(&self) -> BTreeSet<KTuple> {
        self.entries.keys().cloned().collect()
    }

    pub fn contains(&self, x: &KTuple) -> bool {
        self.entries.contains_key(x)
    }

    pub fn value(&self, x: &KTuple) -> Option<i64> {
        self.entries.get(x).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&KTuple, i64)> {
        self.entries.iter().map(|(t, &v)| (t, v))
    }

    /// Byte-stable JSON: `{"k":..,"entries":[{"x":[..],"v":..},..]}` with
    /// entries sorted lexicographically by `x`.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("finite function serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, FamilyError> {
        serde_json::from_str(s).map_err(|e| FamilyError::MalformedJson(e.to_string()))
    }
}

impl From<FiniteFn> for FiniteFnWire {
    fn from(f: FiniteFn) -> Self {
        let entries = f
            .entries
            .into_iter()
            .map(|(t, v)| FnEntry { x: t.into(), v })
            .collect();
        FiniteFnWire { k: f.k, entries }
    }
}

impl TryFrom<FiniteFnWire> for FiniteFn {
    type Error = FamilyError;

    fn try_from(wire: FiniteFnWire) -> Result<Self, Self::Error> {
        let mut entries = BTreeMap::new();
        for e in wire.entries {
            let t = KTuple::new(e.x).map_err(|err| FamilyError::MalformedJson(err.to_string()))?;
            entries.insert(t, e.v);
        }
        let f = FiniteFn::new(entries)?;
        if f.k != wire.k {
            return Err(FamilyError::MalformedJson(format!(
                "declared k={} but entries have arity {}",
                wire.k, f.k
            )));
        }
        Ok(f)
    }
}

/// A user-supplied family rule: given the full domain and a point, produce
/// the value, or `None` where the rule is undefined.
pub type RuleFn = dyn Fn(&BTreeSet<KTuple>, &KTuple) -> Option<i64> + Send + Sync;

#[derive(Clone)]
pub struct CustomRule {
    pub name: String,
    rule: Arc<RuleFn>,
}

impl CustomRule {
    pub fn new(name: impl Into<String>, rule: Arc<RuleFn>) -> Self {
        Self {
            name: name.into(),
            rule,
        }
    }
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule")
            .field("name", &self.name)
            .finish()
    }
}

/// Selects which rule [`make_fn`] applies.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Min,
    MinField,
    MaxMin,
    Custom(CustomRule),
}

impl FamilySpec {
    pub fn from_id(id: &str) -> Result<Self, FamilyError> {
        match id {
            "MIN" => Ok(Self::Min),
            "MIN_FIELD" => Ok(Self::MinField),
            "MAX_MIN" => Ok(Self::MaxMin),
            other => Err(FamilyError::UnknownFamily(other.to_string())),
        }
    }

    pub fn id(&self) -> &str {
        match self {
            Self::Min => "MIN",
            Self::MinField => "MIN_FIELD",
            Self::MaxMin => "MAX_MIN",
            Self::Custom(rule) => &rule.name,
        }
    }

    fn apply(&self, domain: &BTreeSet<KTuple>, x: &KTuple) -> Option<i64> {
        match self {
            Self::Min => Some(x.min_coord() as i64),
            Self::MinField => {
                let mut region = restricted_domain(domain, x);
                region.insert(x.clone());
                field_of(&region).first().map(|&m| m as i64)
            }
            Self::MaxMin => {
                let region = restricted_domain(domain, x);
                let best = region.iter().map(|z| z.min_coord()).max();
                Some(best.unwrap_or_else(|| x.min_coord()) as i64)
            }
            Self::Custom(rule) => (rule.rule)(domain, x),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Builds `f_D` for the given family rule over domain `D`.
pub fn make_fn(spec: &FamilySpec, domain: &BTreeSet<KTuple>) -> Result<FiniteFn, FamilyError> {
    let k = match domain.first() {
        Some(t) => t.arity(),
        None => return Err(FamilyError::EmptyDomain),
    };
    for t in domain {
        if t.arity() != k {
            return Err(FamilyError::MixedArity(k, t.arity()));
        }
    }
    let mut entries = BTreeMap::new();
    for x in domain {
        match spec.apply(domain, x) {
            Some(v) => {
                entries.insert(x.clone(), v);
            }
            None => return Err(FamilyError::RuleUndefined(x.clone())),
        }
    }
    FiniteFn::new(entries)
}

/// True iff every value of `f` occurs as a coordinate of some domain tuple.
pub fn check_reflexive(f: &FiniteFn) -> bool {
    let field = field_of(&f.domain_set());
    f.entries()
        .all(|(_, v)| v >= 0 && field.contains(&(v as u64)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpFreeViolation {
    /// Point where the premises hold but `f_A(x) >= f_B(x)` fails.
    pub witness: KTuple,
    pub value_a: i64,
    pub value_b: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JumpFreeOutcome {
    Pass,
    Violation(JumpFreeViolation),
}

impl JumpFreeOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, Self::Pass)
    }
}

/// Checks the jump-free condition on an ordered pair of functions: for every
/// `x` in both domains with `A_x ⊆ B_x` and `f_A = f_B` on `A_x`, it must
/// hold that `f_A(x) >= f_B(x)`. Returns the first violation in tuple order.
pub fn check_jump_free_pair(fa: &FiniteFn, fb: &FiniteFn) -> JumpFreeOutcome {
    let a = fa.domain_set();
    let b = fb.domain_set();
    for x in a.intersection(&b) {
        let ax = restricted_domain(&a, x);
        let bx = restricted_domain(&b, x);
        if !ax.is_subset(&bx) {
            continue;
        }
        if !ax.iter().all(|y| fa.value(y) == fb.value(y)) {
            continue;
        }
        let va = fa.value(x).expect("x in A");
        let vb = fb.value(x).expect("x in B");
        if va < vb {
            return JumpFreeOutcome::Violation(JumpFreeViolation {
                witness: x.clone(),
                value_a: va,
                value_b: vb,
            });
        }
    }
    JumpFreeOutcome::Pass
}

/// Sampled surrogate for fullness: true iff the family produces a reflexive
/// function for every sampled domain.
pub fn check_full_sample(spec: &FamilySpec, domains: &[BTreeSet<KTuple>]) -> bool {
    domains.iter().all(|d| match make_fn(spec, d) {
        Ok(f) => check_reflexive(&f),
        Err(_) => false,
    })
}
