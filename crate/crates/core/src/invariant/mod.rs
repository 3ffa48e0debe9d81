//! Local-unitary invariants labeled by tuples of permutations.

mod canonical;
mod evaluate;
mod perm;

pub use canonical::{
    canonicalize, component_tuples, connected_components, enumerate_invariants, is_real_guaranteed, same_orbit,
    CanonicalClass, MAX_DEGREE,
};
pub use evaluate::{
    evaluate, evaluate_by_components, evaluate_fast, permutation_operator, pure_jk, tensor_power, trace_with_operator,
    verify_invariance, verify_invariance_by,
};
pub use perm::{PermTuple, Permutation};
