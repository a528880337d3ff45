pub mod arith;
pub mod classify;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod graphs;
pub mod groups;
pub mod linalg;
pub mod local;
pub mod moments;
pub mod pairings;
pub mod rng;
pub mod theory;
