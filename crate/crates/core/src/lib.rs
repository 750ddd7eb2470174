//! Compiler, resource analyzer and exact simulator for non-adaptive
//! l2-MBQC: measurement-based computations on GHZ or stabilizer resource
//! states whose classical side-processing is linear mod 2.

pub mod acceptance;
pub mod adaptive;
pub mod boolfn;
pub mod compiler;
pub mod dyadic;
pub mod error;
pub mod gf2;
pub mod pauli;
pub mod qcount;
pub mod quditext;
pub mod simulator;
pub mod stabilizer;

pub use boolfn::{Anf, BoolFn, RealPoly, WalshSpectrum};
pub use compiler::{MeasurementScheme, StabilizerScheme};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
