//! Exact evaluation of genus-g Gromov–Witten invariants of Grassmannians
//! by root-of-unity sums over cyclotomic fields, with a quantum cohomology
//! oracle and the parabolic-bundle bookkeeping that feeds it.

pub mod cli;
pub mod cyclotomic;
pub mod parabolic;
pub mod qh_oracle;
pub mod subsets;
pub mod symfunc;
pub mod vi_engine;

pub use cyclotomic::{root_power_sum, CyclotomicError, CyclotomicNumber, RationalScalar};
pub use symfunc::{Partition, QuantumClassSum};
pub use vi_engine::{
    check_admissible, count_maximal, degree_reduce, twist_reduce, vi_invariant, Convention,
    EngineError, EvalOptions, InvariantQuery, InvariantResult,
};

/// Serializes an exact rational as a string such as `"2"` or `"-7/3"`.
pub fn serialize_rational<S: serde::Serializer>(
    value: &RationalScalar,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&value.to_string())
}
