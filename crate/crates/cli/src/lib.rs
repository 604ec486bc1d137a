//! Library surface of the command-line front end, shared with the
//! integration and acceptance test suites.

// Validation is written as negated comparisons (`!(x > 0.0)`) so NaN
// inputs fall into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csvout;
