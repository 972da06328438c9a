//! Parameter-space analysis of multi-valued regulatory networks.
//!
//! A regulatory network whose parameters (the levels each node evolves
//! towards under each regulator state) are left open describes a whole family
//! of dynamics at once. This crate answers questions about the family without
//! enumerating it:
//!
//! - [`model`] — influence graphs, states, parametrisations, transitions;
//! - [`plattice`] — the parameter-box domain: convex sublattices of
//!   parametrisation space, narrowed exactly by observed transitions;
//! - [`constraints`] — sign/observability influence constraints and the
//!   Min-Max rule, as box-narrowing operators;
//! - [`unfolding`] — occurrence nets labelled with parameter boxes: the
//!   partial-order semantics of all admissible dynamics, superposed;
//! - [`prefix`] — the complete finite prefix construction with box-based
//!   cut-off events;
//! - [`oracle`] — brute-force enumeration of parametrisation space, used to
//!   validate the symbolic machinery on small networks;
//! - [`io`] — the textual model format, DOT and JSON emission.

pub mod constraints;
pub mod io;
pub mod model;
pub mod oracle;
pub mod plattice;
pub mod prefix;
pub mod unfolding;

#[cfg(test)]
pub(crate) mod testutil;
