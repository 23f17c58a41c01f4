//! Exact and numerical building blocks for checking mirror-symmetry
//! constructions at desk scale: integral lattices and the
//! Dolgachev–Nikulin mirror, reflexive polytopes and discrete Legendre
//! data, theta-function gluing of Landau–Ginzburg models, SL2(Z)
//! monodromy bookkeeping, and Bohr–Sommerfeld counts.
//!
//! The crate is `no_std` and only needs `alloc`. Floating point special
//! functions go through `libm`.
#![no_std]

extern crate alloc;

pub mod arith;
pub mod check;
pub mod lattice;
pub mod monodromy;
pub mod polytope;
pub mod quantize;
pub mod theta;

pub use check::Check;
