//! Rational cohomology of classifying spaces of Kac–Moody groups.
//!
//! The pipeline runs from a generalized Cartan matrix to its finite-type
//! subsets, the Weyl-invariant subrings attached to them, and finally the
//! inductive Mayer–Vietoris expression for `H*(BG(A); Q)`, together with an
//! independent Čech-complex computation of the same groups.

pub mod cartan;
pub mod cech;
pub mod cli;
pub mod exactlin;
pub mod gradedlat;
pub mod invariants;
pub mod mvss;
pub mod weyl;
