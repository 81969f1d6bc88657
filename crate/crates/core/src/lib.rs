//! Exact combinatorial sheaf theory on toric fans.
//!
//! The crate is organised bottom-up:
//!
//! - [`intlat`] — arbitrary-precision integer matrices, Smith/Hermite normal
//!   forms, lattice saturation, and quotient presentations. Every other module
//!   reduces its group theory to these kernels.
//! - [`fan`] — cones, fans, face enumeration, and the orbit poset of the
//!   associated toric variety (Alexandroff order on torus orbits).
//! - [`fundcat`] — the fundamental (exit-path) category of the stratification:
//!   objects are orbits, hom groups are lattice quotients, with an optional
//!   finite-level Galois enrichment.
//! - [`sheafcalc`] — constructible sheaves of finite sets as functors on the
//!   fundamental category, together with the six-functor-style calculus
//!   (restriction, extension by empty, pushforwards, recollement, limits,
//!   hom sets, enumeration, representables).
//! - [`tame`] — Kummer covers of split tori: the surjection/lattice-extension
//!   correspondence, component counts over smaller strata, and the descent
//!   dichotomy cross-check against the sheaf calculus.
//! - [`fans`] — a small library of standard test fans.
//!
//! Conventions, fixed once and used everywhere: lattice elements are **row**
//! vectors, homomorphisms act by **right** multiplication, and all quotient
//! coordinates are the canonical ones produced by Smith normal form.

pub mod fan;
pub mod fans;
pub mod fundcat;
pub mod intlat;
pub mod perm;
pub mod sheafcalc;
pub mod tame;

mod feas;
