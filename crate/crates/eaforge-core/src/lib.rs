//! Analysis of vectorial Boolean functions up to extended-affine equivalence.
//!
//! The crate is organised around a truth-table representation of functions
//! `F: F_2^n -> F_2^m` ([`vbf::Vbf`]) and provides:
//!
//! * dense bit-packed linear algebra over `F_2` ([`bits`]),
//! * `GF(2^n)` arithmetic for materialising univariate polynomial
//!   representations ([`field`]),
//! * classical statistics: ANF, degree, DDT, Walsh spectra ([`vbf`]),
//! * the linear part of the Jacobian of a quadratic function and its rank
//!   table ([`jacobian`]),
//! * EA-equivalence recovery for quadratic functions ([`recovery`]),
//! * EA/CCZ class invariants, most notably the ortho-derivative label used
//!   to partition sets of quadratic APN functions ([`invariants`]),
//! * Walsh-zero space search and CCZ-class exploration ([`ccz`]).
//!
//! Everything is pure and deterministic; all types are immutable after
//! construction and safe to share across threads.
//!
//! The crate is `no_std` (with `alloc`). The `rayon` feature parallelises
//! the recovery guess loop without changing any result.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod bits;
pub mod ccz;
mod error;
pub mod field;
pub mod invariants;
pub mod jacobian;
pub mod recovery;
pub mod vbf;

pub use error::Error;
