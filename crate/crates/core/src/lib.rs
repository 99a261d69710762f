//! Workbench for the power alternative in groups acting on simplicial trees.
//!
//! Words and normal forms live in [`word`] and [`group`]; trees in [`tree`]
//! and [`bass_serre`]; the pair pipeline and certificates in [`alternative`];
//! defining-graph analytics in [`artin`]; the class calculus in [`upa`].

pub mod alternative;
pub mod artin;
pub mod bass_serre;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod group;
pub mod tree;
pub mod upa;
pub mod word;

pub use error::{Error, Result};
pub use graph::{PresentationGraph, VisualSplitting};
pub use group::{GroupDescription, GroupSpec, SubgroupDescriptor, SubgroupTag};
pub use word::{Alphabet, ElementWord, Letter};
