//! Free-group words, presentations and the commutator criterion, with
//! slicing, matrix playground and state-sum evaluators built on top.

pub mod criterion;
pub mod freegroup;
pub mod presentation;
pub mod slicing;
pub mod playground;
pub mod statesum;
