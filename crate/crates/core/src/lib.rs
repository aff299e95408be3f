//! Finite-group laboratory for the action of `Aut(F_n)` on tuples of group
//! elements by Nielsen moves.
//!
//! The crate covers group construction ([`group`]), subgroup lattices
//! ([`lattice`]), rank and incompressibility invariants ([`invariants`]),
//! orbit enumeration and redundancy ([`nielsen`]), constructive normal forms
//! with replayable witnesses ([`normalize`]), explicit rank constants
//! ([`constants`]), integer symplectic reduction ([`symplectic`]) and
//! product-replacement random walks ([`sampling`]).

pub mod group;
pub mod lattice;
pub mod invariants;
pub mod nielsen;
pub mod normalize;
pub mod constants;
pub mod sampling;
pub mod symplectic;
