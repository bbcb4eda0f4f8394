//! Continued fractions with cone-valued partial numerators and denominators.
//!
//! Indices follow the usual mathematical convention: `x_1` is the first
//! partial numerator, a depth `k` means the first `k` levels, and spans such
//! as `[x_i, …, x_k]` are 1-based and inclusive.

mod closed;
mod general;
mod trace;
mod unit;

pub use closed::{f_closed, f_direct, h_vector, q_apply, q_operator, u_vec, Op, OpChain};
pub use general::{
    cf_general, cf_general_convergents, cf_ordinary, to_ordinary, CfSequence, OrdinaryForm,
};
pub use trace::{ConvergentTrace, TraceRecord};
pub use unit::{bracket, w_seq, UnitFraction};
