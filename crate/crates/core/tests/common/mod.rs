//! Shared helpers for integration tests: seeded grids, domains, and
//! synthesized regressively regular functions with negative-bearing classes.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use regreg_core::ordertype::{signature, KTuple, OrderTypeSig};
use regreg_core::regularity::GridE;
use regreg_core::FiniteFn;

pub use regreg_core::instances::min_feasible_e0;

/// Random grid whose `e0` is at least `e0_min`.
pub fn random_grid(rng: &mut ChaCha8Rng, k: usize, p: usize, e0_min: u64) -> GridE {
    let mut elements = Vec::with_capacity(p);
    let mut next = e0_min + rng.random_range(0..4);
    for _ in 0..p {
        elements.push(next);
        next += rng.random_range(1..=3);
    }
    GridE::new(elements, k).expect("p >= 2, k >= 2")
}

/// Random domain of up to `max_len` tuples with coordinates below `coord_cap`.
pub fn random_domain(
    rng: &mut ChaCha8Rng,
    k: usize,
    max_len: usize,
    coord_cap: u64,
) -> BTreeSet<KTuple> {
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| {
            let coords: Vec<u64> = (0..k).map(|_| rng.random_range(0..coord_cap)).collect();
            KTuple::new(coords).expect("k >= 2")
        })
        .collect()
}

/// Builds a function that is regressively regular over the grid by
/// construction: each order-type class is either pointwise `min(x)` or a
/// random constant in `(0, e0)`. Constant classes contribute negative
/// instance values; a marker tuple per constant keeps the function
/// reflexive without touching `E^k`.
pub fn synth_regular_fn(grid: &GridE, rng: &mut ChaCha8Rng) -> FiniteFn {
    let e0 = grid.e0();
    let mut classes: BTreeMap<OrderTypeSig, Vec<KTuple>> = BTreeMap::new();
    for x in grid.tuples() {
        classes.entry(signature(&x)).or_default().push(x);
    }

    let mut entries = BTreeMap::new();
    let mut markers = BTreeSet::new();
    for members in classes.values() {
        if e0 >= 2 && rng.random_bool(0.5) {
            let c = rng.random_range(1..e0);
            markers.insert(c);
            for x in members {
                entries.insert(x.clone(), c as i64);
            }
        } else {
            for x in members {
                entries.insert(x.clone(), x.min_coord() as i64);
            }
        }
    }
    for c in markers {
        entries.insert(KTuple::new(vec![c; grid.k()]).unwrap(), c as i64);
    }
    FiniteFn::new(entries).expect("nonempty uniform domain")
}
