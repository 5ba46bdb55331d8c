//! Finite-scale constructions on hyperbolic groups: exact Cayley balls,
//! lex-minimal geodesic rays and their types, the boundary-to-shift map, and
//! audits of the resulting equivalence-relation bounds.

pub mod cayley;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod group;
pub mod rational;
pub mod rays;
pub mod shift_space;

pub use error::{Error, Result};
pub use rational::Rational;
