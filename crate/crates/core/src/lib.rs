//! Equality saturation over E-graphs viewed as tree automata, the standard
//! and Skolem chase, translations between the two, and a termination check.

pub mod bridge;
pub mod chase;
pub mod egraph;
pub mod eqsat;
pub mod generators;
pub mod syntax;
pub mod term;
pub mod termination;
