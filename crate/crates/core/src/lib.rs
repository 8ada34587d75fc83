//! Exact combinatorial Hopf algebras for perturbative renormalization.

pub mod characters;
pub mod dse;
pub mod error;
pub mod hall;
pub mod hopf;
pub mod laurent;
pub mod nijenhuis;
pub mod rational;
mod text;
pub mod trees;
pub mod usf;
pub mod words;

pub use error::{Error, Result};
pub use hopf::TensorPoly;
pub use rational::Q;
pub use trees::{Alphabet, Decoration, Forest, RootedTree, TreePoly};
