//! Subset-sum instances from block partitions of `E^k`.
//!
//! The pipeline implemented here:
//!
//! 1. [`ordertype`] — canonical order-type signatures of k-tuples and
//!    enumeration of every signature class for a given arity.
//! 2. [`families`] — finite reflexive functions, the built-in function
//!    families (`MIN`, `MIN_FIELD`, `MAX_MIN`), and the reflexivity /
//!    fullness / jump-free checkers.
//! 3. [`regularity`] — the three-way block partition of `E^k` induced by a
//!    function, the regressive-regularity checker, and a bounded search for
//!    a regular `(f, E)` pair.
//! 4. [`instances`] — offset generators and assembly of solver-ready
//!    subset-sum instances (negatives, small positives, large positives).
//! 5. [`solvers`] — the split-enumeration solver for structured instances,
//!    plus meet-in-the-middle and dynamic-programming oracles for
//!    cross-validation.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs (generators take an explicit seed), so the whole
//! crate is safe for unrestricted concurrent use.

pub mod families;
pub mod instances;
pub mod ordertype;
pub mod regularity;
pub mod solvers;

pub use families::{FamilyError, FamilySpec, FiniteFn, JumpFreeOutcome, JumpFreeViolation};
pub use instances::{GammaFn, InstanceError, RhoFn, StructuredInstance};
pub use ordertype::{KTuple, OrderTypeError, OrderTypeSig};
pub use regularity::{BlockPartition, ClassVerdict, GridE, RegRegError, RegRegReport};
pub use solvers::{SolveError, SolveResult, SolveStats, SolveStatus};
