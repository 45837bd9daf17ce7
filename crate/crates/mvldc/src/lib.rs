//! Matching-vector locally decodable codes over GF(2^t).
//!
//! The pipeline, bottom to top:
//!
//! * [`zmod`] — arithmetic mod an odd composite `m`: factorization, CRT,
//!   canonical sets S_m, and vectors over Z_m^h.
//! * [`gf2`] — binary field contexts GF(2^t) with packed-bit elements,
//!   multiplicative orders, minimal polynomials, and subfield searches.
//! * [`mvfam`] — S-matching vector families: verification and seeded
//!   backtracking search.
//! * [`decpoly`] — S-decoding polynomials: verification, the canonical
//!   (|S|+1)-monomial construction, and exhaustive minimal-monomial search
//!   with nonexistence certificates.
//! * [`ldc`] — the code itself: encoding, the smooth local decoder,
//!   corruption models, and exact smoothness certification.
//! * [`compose`] — the query-count composition: two decoding polynomials for
//!   coprime moduli multiply into one for the product modulus.
//! * [`pir`] — a k-server private information retrieval simulation driven by
//!   the smooth decoder.
//!
//! Data-parallel kernels run on rayon when the `parallel` feature (default)
//! is enabled; every entry point also has a sequential path selected by
//! [`par::Parallelism`], and results never depend on the worker count.

pub mod compose;
pub mod decpoly;
pub mod error;
pub mod gf2;
pub mod ldc;
pub mod mvfam;
pub mod par;
pub mod pir;
pub mod zmod;

pub use error::Error;

/// Shipped 3-monomial decoding polynomial for m = 511 over GF(2^9)
/// (gamma a root of x^9 + x^4 + 1), in the standard polynomial JSON format.
pub const M511_POLY_JSON: &str = include_str!("../assets/poly_m511_k3.json");
