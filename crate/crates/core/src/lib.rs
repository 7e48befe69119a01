//! Exact computation in torsion-free nilpotent groups of class at most 3:
//! polycyclic collection, finite-index subgroups, virtual endomorphisms and
//! the self-similar tree actions they induce.

pub mod cli;
pub mod error;
pub mod intlattice;
pub mod pcgroup;
pub mod selfsim;
pub mod subgroup;
pub mod zoo;

pub use error::{Error, Result};
