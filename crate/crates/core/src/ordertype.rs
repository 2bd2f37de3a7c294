//! Order-type signatures of k-tuples.
//!
//! Two tuples are order equivalent when they share the same pattern of
//! strict inequalities and equalities between coordinates, i.e. the index
//! sets `{(i,j) : x_i < x_j}` and `{(i,j) : x_i = x_j}` coincide. The
//! canonical form used here is the dense rank vector: position `i` holds the
//! number of distinct coordinate values strictly below `coords[i]`. Equal
//! rank vectors are equivalent to equal index sets, and the rank vector is
//! independent of the coordinate magnitudes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderTypeError {
    #[error("tuple arity must be at least 2, got {0}")]
    ArityTooSmall(usize),
    #[error("coordinate {0} exceeds the supported range")]
    CoordinateTooLarge(u64),
    #[error("class enumeration requires k >= 2, got {0}")]
    InvalidArity(usize),
    #[error("malformed signature string {0:?}")]
    MalformedSignature(String),
}

/// A k-tuple of naturals, `k >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct KTuple {
    coords: Vec<u64>,
}

impl KTuple {
    /// Coordinates are capped at `i64::MAX` so that comparisons against
    /// signed function values never overflow.
    pub fn new(coords: Vec<u64>) -> Result<Self, OrderTypeError> {
        if coords.len() < 2 {
            return Err(OrderTypeError::ArityTooSmall(coords.len()));
        }
        if let Some(&c) = coords.iter().find(|&&c| c > i64::MAX as u64) {
            return Err(OrderTypeError::CoordinateTooLarge(c));
        }
        Ok(Self { coords })
    }

    /// Convenience constructor for literals; panics on an invalid tuple.
    pub fn from_coords(coords: &[u64]) -> Self {
        Self::new(coords.to_vec()).expect("invalid k-tuple")
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Smallest coordinate.
    pub fn min_coord(&self) -> u64 {
        *self.coords.iter().min().expect("nonempty")
    }

    /// Largest coordinate.
    pub fn max_coord(&self) -> u64 {
        *self.coords.iter().max().expect("nonempty")
    }
}

impl TryFrom<Vec<u64>> for KTuple {
    type Error = OrderTypeError;

    fn try_from(coords: Vec<u64>) -> Result<Self, Self::Error> {
        Self::new(coords)
    }
}

impl From<KTuple> for Vec<u64> {
    fn from(t: KTuple) -> Self {
        t.coords
    }
}

impl fmt::Display for KTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Canonical signature of a tuple's `<`/`=` pattern: `ranks[i]` is the number
/// of distinct coordinate values strictly below `coords[i]`. The ranks always
/// form the contiguous range `{0, .., d-1}` where `d` is the number of
/// distinct coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderTypeSig {
    ranks: Vec<usize>,
}

impl OrderTypeSig {
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn arity(&self) -> usize {
        self.ranks.len()
    }
}

impl fmt::Display for OrderTypeSig {
    /// Comma-separated rank vector, e.g. `0,2,1`. Used as the JSON map key
    /// for per-class reports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.ranks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for OrderTypeSig {
    type Err = OrderTypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || OrderTypeError::MalformedSignature(s.to_string());
        let ranks: Vec<usize> = s
            .split(',')
            .map(|part| part.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| malformed())?;
        if ranks.len() < 2 {
            return Err(malformed());
        }
        // Ranks must form a contiguous range starting at 0.
        let distinct: BTreeSet<usize> = ranks.iter().copied().collect();
        if !distinct.iter().copied().eq(0..distinct.len()) {
            return Err(malformed());
        }
        Ok(Self { ranks })
    }
}

/// Dense-rank canonical form. Two tuples get equal signatures exactly when
/// they are order equivalent.
pub fn signature(x: &KTuple) -> OrderTypeSig {
    let mut distinct = x.coords().to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let ranks = x
        .coords()
        .iter()
        .map(|c| distinct.partition_point(|v| v < c))
        .collect();
    OrderTypeSig { ranks }
}

/// All signatures realized by tuples in `{0,..,k-1}^k`. A k-value alphabet
/// realizes every pattern, so this is the complete set of classes for
/// arity `k`. The count equals [`class_count_by_formula`] and is strictly
/// below `k^k`.
pub fn enumerate_classes(k: usize) -> Result<BTreeSet<OrderTypeSig>, OrderTypeError> {
    if k < 2 {
        return Err(OrderTypeError::InvalidArity(k));
    }
    let mut classes = BTreeSet::new();
    let mut counter = vec![0u64; k];
    loop {
        let tuple = KTuple::new(counter.clone()).expect("k >= 2");
        classes.insert(signature(&tuple));
        // Mixed-radix increment over {0,..,k-1}^k.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(classes);
            }
            pos -= 1;
            counter[pos] += 1;
            if counter[pos] < k as u64 {
                break;
            }
            counter[pos] = 0;
        }
    }
}

/// Independent cross-check for the class count: the sum over `j` of the
/// number of surjections from a k-set onto a j-set, computed by
/// inclusion-exclusion. Kept separate from [`enumerate_classes`] on purpose
/// so the two routes can validate each other.
pub fn class_count_by_formula(k: usize) -> u128 {
    (1..=k).map(|j| surjection_count(k, j)).sum()
}

fn surjection_count(k: usize, j: usize) -> u128 {
    // sigma(k, j) = sum_{i=0..j} (-1)^i C(j, i) (j - i)^k
    let mut total: i128 = 0;
    for i in 0..=j {
        let term = (binomial(j, i) as i128) * ((j - i) as u128).pow(k as u32) as i128;
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u128
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
