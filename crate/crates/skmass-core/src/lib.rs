//! Level-one modular forms at desk scale: Hecke eigenbases, the Petersson trace
//! formula, symmetric-square L-values, the pullback mass N(F_g) of Saito–Kurokawa
//! lifts, the amplified sum S_A and the exponent bookkeeping behind k^(1-1/210).
//!
//! The crate is `no_std` with `alloc`. The `std` feature (on by default) adds the
//! FFT-based eigenvalue extension in [`extend`].

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

use alloc::string::String;
use core::fmt;

pub mod amplifier;
pub mod arith;
#[cfg(feature = "std")]
pub mod extend;
pub mod linalg;
pub mod lseries;
pub mod mass;
pub mod qseries;
pub mod specfun;
pub mod trace;

pub use qseries::{EigenBasis, HeckeEigenform, QExpansion};

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the documented domain.
    Domain(&'static str),
    /// Not enough q-expansion coefficients or prime eigenvalues.
    InsufficientPrecision { needed: u64, available: u64 },
    /// The characteristic polynomial of T_2 has a repeated root.
    EigenvalueCollision { weight: u32 },
    /// A quantity that must be real came out with an imaginary part.
    NonReal { imag: f64 },
    /// k even where the Saito–Kurokawa setting needs k odd.
    Parity { weight: u32 },
    /// Numerical failure with a description.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "{msg}"),
            Error::InsufficientPrecision { needed, available } => write!(
                f,
                "insufficient precision: need {needed}, have {available}"
            ),
            Error::EigenvalueCollision { weight } => {
                write!(f, "repeated T_2 eigenvalue in weight {weight}")
            }
            Error::NonReal { imag } => write!(f, "expected a real value, imaginary part {imag:e}"),
            Error::Parity { weight } => write!(
                f,
                "weight {weight} = 2k with k even; the lift needs k odd"
            ),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
