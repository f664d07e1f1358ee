//! Numerical operator theory on the unit circle: finite Blaschke products,
//! model spaces, truncated Toeplitz operators, and reducing-subspace
//! decisions with verifiable witnesses.
//!
//! The crate is organized bottom-up:
//!
//! - [`poly`]: dense complex polynomials and root finding
//!   (Aberth–Ehrlich with a companion-matrix fallback);
//! - [`matrix`]: small dense complex matrices, Hermitian Jacobi
//!   eigendecomposition, singular values, Hessenberg QR;
//! - [`blaschke`]: finite Blaschke products, compositions, fibers,
//!   polyphase components, and the unimodular-quotient factorization
//!   of circle-equimodular polynomials;
//! - [`modelspace`]: Takenaka–Malmquist orthonormal bases of `K_B` and
//!   circle quadrature;
//! - [`tto`]: matrix assembly of compressed multiplication operators
//!   `A^B_phi` on `K_B`;
//! - [`charfn`]: the characteristic function `Phi(lambda) = A^B_{theta/(1-lambda*conj(B))}`
//!   by quadrature and, for `B = z^N`, in polyphase closed form;
//! - [`reduce`]: decision procedures for reducing subspaces with
//!   one-dimensional defects, witness verification, and a numeric common
//!   block-diagonalization detector.
//!
//! Everything is pure computation over `Complex<f64>`; the crate is
//! `no_std`-compatible (with `alloc`).

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blaschke;
pub mod charfn;
pub mod error;
pub mod matrix;
pub mod modelspace;
pub mod poly;
pub mod reduce;
pub mod tto;

pub use error::Error;

/// The scalar type used throughout: double-precision complex numbers.
pub type Complex64 = num_complex::Complex<f64>;

/// Shorthand result type for fallible operations in this crate.
pub type Result<T> = core::result::Result<T, Error>;
