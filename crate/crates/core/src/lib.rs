//! Exact boxicity toolkit: graphs, gadget constructions, box geometry,
//! complete decision procedures for "boxicity at most d" with side
//! constraints, and lemma-level verification drivers.
//!
//! Everything that claims `Feasible` hands back a concrete integer
//! representation that has been re-verified geometrically; everything that
//! claims `Infeasible` did so by a completed refutation, never a timeout.

pub mod gadgets;
pub mod geometry;
pub mod graph;
pub mod solver;
pub mod verify;
