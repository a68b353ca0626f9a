//! Finite-dimensional laboratory for bilinear operator multipliers and
//! bilinear Schur multipliers on Hilbert–Schmidt classes.
//!
//! A symbol `φ ∈ M_{d1} ⊗ M_{d2}^op ⊗ M_{d3}` defines the bilinear map
//! `τ_φ : S²(H₂,H₃) × S²(H₁,H₂) → B(H₁,H₃)` through the rule
//! `τ_{R⊗S⊗T}(y, x) = T·y·S·x·R`. A function `φ(t1,t2,t3)` on finite sets
//! defines the Schur multiplier `Λ_φ`, which is the special case of a
//! symbol that is diagonal in every leg.
//!
//! The crate computes actions, norms into `S²`, `B` and `S¹`, level-n
//! amplifications, modularity with respect to triples of matrix
//! `*`-algebras, and explicit factorizations `φ = Σ (aᵢ⊗1)(1⊗bᵢ)`.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod factorize;
pub mod io;
pub mod linalg;
pub mod multiplier;
pub mod norms;
pub mod rng;
pub mod symbols;

pub use error::{Error, Result};
pub use linalg::{CMatrix, SvdResult};
pub use num_complex::Complex64;
