//! Extended graph permanents: permanents of block-duplicated signed incidence
//! matrices of graphs, reduced modulo primes, together with the graph
//! transformations, point counts and modular-form comparisons used to study
//! them.

pub mod arith;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod families;
pub mod graph;
pub mod iso;
pub mod modform;
pub mod perm;
pub mod pointcount;
pub mod sequence;
pub mod transforms;
pub mod verify;
pub mod weighted;

pub use error::{Error, Result};
pub use graph::{BlockSpec, Edge, OrientedGraph};
