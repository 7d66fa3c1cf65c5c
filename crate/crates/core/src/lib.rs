//! Finite-difference solver for the singularly perturbed free-boundary problem
//! `Δu = β_ε(u - u(0) + ε)` on an `m`-fold symmetric disk, together with the
//! blow-up diagnostics used to look for a degenerate point at the origin.

pub mod diagnostics;
pub mod geometry;
pub mod linalg;
pub mod oracle1d;
pub mod reaction;
pub mod solver;
