//! Combinatorial tools for one-dimensional flow spaces presented by
//! sequences of substitutions: symbolic maps and their properness and
//! primitivity, free group homomorphisms, Stallings folding, conjugacy of
//! positive maps, abelian invariants and the return-word rewrite.

pub mod abelian;
pub mod cli;
pub mod folding;
pub mod format;
pub mod freegroup;
pub mod rewrite;
pub mod symbolic;
pub mod trope;
